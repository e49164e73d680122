import json

import pytest

from jlsbubble.cli import main
from jlsbubble.lppl import LpplParams, ModelSpec

from synth import draw_params, recovery_errors

M3 = ModelSpec.M3


def _strip_metadata(path):
    doc = json.loads(path.read_text())
    doc.pop("metadata")
    return doc


def _simulate(tmp_path, params, label="toy", n_days=250):
    argv = ["simulate", "--out", str(tmp_path), "--label", label, "--param", f"n_days={n_days}"]
    argv += [f"--param={k}={v!r}" for k, v in params.as_dict().items()]
    assert main(argv) == 0
    return tmp_path / f"{label}.csv"


def test_missing_price_file_exits_2(tmp_path, capsys):
    code = main(["fit", "--prices", str(tmp_path / "nowhere.csv"), "--out", str(tmp_path)])
    assert code == 2
    assert "nowhere.csv" in capsys.readouterr().err


def test_bad_simulation_settings_exit_2(tmp_path):
    assert main(["simulate", "--out", str(tmp_path), "--param", "m=0.5"]) == 2


def test_simulate_then_fit_round_trip(tmp_path):
    truth = draw_params(M3, 0)
    prices = _simulate(tmp_path, truth)
    assert main(["fit", "--prices", str(prices), "--spec", "M3", "--n-starts", "10", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "fit_toy_M3.json").read_text())
    assert doc["schema_version"] and doc["seed"] == 0 and doc["inputs"][str(prices)]
    assert doc["result"]["rate_backfilled"] is False
    got = LpplParams(**doc["result"]["params"])
    assert recovery_errors(M3, truth, got) == []
    residual_lines = (tmp_path / "residuals_toy_M3.csv").read_text().splitlines()
    assert residual_lines[0].startswith("# ") and len([x for x in residual_lines if x[0].isdigit()]) == 250


def test_compare_writes_all_pairs(tmp_path):
    prices = _simulate(tmp_path, draw_params(ModelSpec.M1, 2))
    assert main(["compare", "--prices", str(prices), "--n-starts", "4", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "compare_toy.json").read_text())
    assert set(doc["result"]["wilks"]) == {"M0,M1", "M0,M2", "M1,M3", "M2,M3", "M0,M3"}


def test_scan_three_windows(tmp_path):
    prices = _simulate(tmp_path, LpplParams(t_c=330, m=0.5, omega=7, phi=1, A=6.9, B=-0.03, C=0.001), n_days=300)
    argv = ["scan", "--prices", str(prices), "--length", "250", "--step", "25", "--n-starts", "2",
            "--out", str(tmp_path)]
    assert main(argv) == 0
    rows = [x for x in (tmp_path / "scan_toy_M0_L250.csv").read_text().splitlines() if x[0].isdigit()]
    assert len(rows) == 3
    assert json.loads((tmp_path / "scan_toy_M0_L250.json").read_text())["result"]["n_windows"] == 3


def test_bootstrap_reruns_are_identical(tmp_path):
    prices = _simulate(tmp_path, draw_params(ModelSpec.M0, 1))
    outputs = []
    out = tmp_path / "boot"
    argv = ["bootstrap", "--prices", str(prices), "--pair", "M0:M1", "--n-reps", "3", "--n-starts", "4",
            "--seed", "5", "--out", str(out)]
    for _ in range(2):
        assert main(argv) == 0
        outputs.append(_strip_metadata(out / "bootstrap_toy_M0_M1_b25.json"))
    assert outputs[0] == outputs[1]
    assert outputs[0]["seed"] == 5 and outputs[0]["config_hash"]


def test_report_collates_outputs(tmp_path):
    prices = _simulate(tmp_path, draw_params(ModelSpec.M0, 1))
    assert main(["fit", "--prices", str(prices), "--spec", "M0", "--n-starts", "4", "--out", str(tmp_path)]) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "report.md").read_text()
    assert "## Fits" in text and "fit_toy_M0" in text


def test_config_file(tmp_path):
    prices = _simulate(tmp_path, draw_params(ModelSpec.M0, 1))
    ini = tmp_path / "run.ini"
    ini.write_text(f"[data]\nprices = {prices}\n\n[fit]\nspecs = M0\nn_starts = 3\nseed = 2\n\n"
                   f"[output]\ndir = {tmp_path / 'cfg'}\n")
    assert main(["fit", "--config", str(ini)]) == 0
    assert json.loads((tmp_path / "cfg" / "fit_toy_M0.json").read_text())["seed"] == 2
    ini.write_text("[fit]\nn_starts = lots\n")
    assert main(["fit", "--config", str(ini)]) == 2


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for cmd in ("fit", "compare", "bootstrap", "scan", "simulate", "report"):
        assert cmd in out
