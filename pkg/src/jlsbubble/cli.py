"""Command-line interface: ``jlsbubble {fit,compare,bootstrap,scan,simulate,report}``.

Settings come from an optional INI file (``--config``) and are overridden by
flags. Exit codes: 0 success, 1 computational failure, 2 configuration or I/O
error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as dt
import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import ScanCensus, WindowOutcome, crash_metrics, scan_windows
from .calibration import SCHEMA_VERSION, FitError, FitResult, SearchBounds, fit_family
from .lppl import LpplParams, ModelSpec, model_price
from .sim import HazardNegative, PathDiscarded, SimConfig, SimMode, simulate
from .stats.bootstrap import bootstrap_compare
from .stats.wilks import NESTED_PAIRS, compare_fits
from .timeseries import DataError, discount, index_to_date, load_price_csv, load_rate_csv, to_date

log = logging.getLogger("jlsbubble")

EXIT_OK, EXIT_COMPUTE, EXIT_CONFIG = 0, 1, 2
ALL_PAIRS = tuple(f"{lo.value}:{hi.value}" for lo, hi in NESTED_PAIRS)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    prices: Path | None = None
    rates: Path | None = None
    rate_units: str = "percent"
    label: str = ""
    t1: str | None = None
    t2: str | None = None
    specs: tuple[str, ...] = ("M0",)
    n_starts: int = 50
    seed: int = 0
    workers: int = 1
    tc_extension: float = 0.4
    bounds: dict = field(default_factory=dict)
    pairs: tuple[str, ...] = ALL_PAIRS
    n_reps: int = 1000
    block_len: int = 25
    boot_n_starts: int | None = None
    length: int = 550
    step: int = 25
    offset: int = 0
    peak_slack_days: int = 60
    dd_max_months: int = 12
    sim: dict = field(default_factory=dict)
    out: Path = Path("out")

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        for k in ("prices", "rates", "out"):
            d[k] = str(d[k]) if d[k] is not None else None
        d["specs"], d["pairs"] = list(self.specs), list(self.pairs)
        return d

    def hash(self) -> str:
        return hashlib.sha256(json.dumps(self.as_dict(), sort_keys=True).encode()).hexdigest()


def _split(text: str) -> tuple[str, ...]:
    return tuple(p for p in text.replace(",", " ").replace(";", " ").split() if p)


def _pair_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.replace(";", " ").split() if p.strip())


def load_config(path: Path | None) -> RunConfig:
    """Read an INI file; relative data paths resolve against the file's directory."""
    cfg = RunConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such config file: {path}")
    ini = configparser.ConfigParser()
    ini.read(path)
    base = path.parent

    def get(section, key, conv=str):
        if ini.has_option(section, key):
            try:
                return conv(ini.get(section, key))
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from None
        return None

    def set_(attr, value):
        if value is not None:
            setattr(cfg, attr, value)

    set_("prices", get("data", "prices", lambda s: base / s))
    set_("rates", get("data", "rates", lambda s: base / s))
    set_("rate_units", get("data", "rate_units"))
    set_("label", get("data", "label"))
    set_("t1", get("window", "t1"))
    set_("t2", get("window", "t2"))
    set_("specs", get("fit", "specs", _split))
    set_("n_starts", get("fit", "n_starts", int))
    set_("seed", get("fit", "seed", int))
    set_("workers", get("fit", "workers", int))
    set_("tc_extension", get("fit", "tc_extension", float))
    if ini.has_section("bounds"):
        cfg.bounds = {k: tuple(float(v) for v in _split(ini.get("bounds", k))) for k in ini.options("bounds")}
    set_("pairs", get("bootstrap", "pairs", _pair_list))
    set_("n_reps", get("bootstrap", "n_reps", int))
    set_("block_len", get("bootstrap", "block_len", int))
    set_("boot_n_starts", get("bootstrap", "n_starts", int))
    set_("length", get("scan", "length", int))
    set_("step", get("scan", "step", int))
    set_("offset", get("scan", "offset", int))
    set_("peak_slack_days", get("crash", "peak_slack_days", int))
    set_("dd_max_months", get("crash", "dd_max_months", int))
    if ini.has_section("simulate"):
        cfg.sim = dict(ini.items("simulate"))
    set_("out", get("output", "dir", lambda s: base / s))
    return cfg


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    for attr in ("prices", "rates", "rate_units", "label", "t1", "t2", "n_starts", "seed", "workers",
                 "tc_extension", "n_reps", "block_len", "length", "step", "offset", "out"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg, attr, Path(value) if attr in ("prices", "rates", "out") else value)
    if getattr(args, "spec", None):
        cfg.specs = tuple(args.spec)
    if getattr(args, "pair", None):
        cfg.pairs = tuple(args.pair)
    if getattr(args, "boot_n_starts", None) is not None:
        cfg.boot_n_starts = args.boot_n_starts
    for item in getattr(args, "param", None) or ():
        key, _, value = item.partition("=")
        if not value:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        cfg.sim[key.strip()] = value.strip()
    for item in getattr(args, "bound", None) or ():
        key, _, value = item.partition("=")
        cfg.bounds[key.strip()] = tuple(float(v) for v in _split(value))
    if cfg.seed is None:
        raise ConfigError("a seed is required")
    return cfg


def sha256_of(path: Path | None) -> str | None:
    if path is None:
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _clean(obj):
    """JSON-safe copy: NaN/inf become None, numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (dt.date, Path)):
        return str(obj)
    return obj


class Run:
    """Output writer carrying provenance for one command invocation."""

    def __init__(self, command: str, cfg: RunConfig):
        self.command, self.cfg = command, cfg
        self.inputs = {str(p): sha256_of(p) for p in (cfg.prices, cfg.rates) if p is not None}
        cfg.out.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def header(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "command": self.command, "seed": self.cfg.seed,
                "config_hash": self.cfg.hash(), "inputs": self.inputs}

    def write_json(self, name: str, result) -> Path:
        doc = dict(self.header(), result=result, config=self.cfg.as_dict(),
                   metadata={"created": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
                             "version": __version__})
        path = self.cfg.out / name
        path.write_text(json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n")
        self.written.append(path)
        return path

    def open_csv(self, name: str, fields):
        """CSV writer preceded by ``# key=value`` provenance lines."""
        path = self.cfg.out / name
        fh = path.open("w", newline="")
        for k, v in self.header().items():
            fh.write(f"# {k}={json.dumps(v, sort_keys=True)}\n")
        writer = csv.writer(fh)
        writer.writerow(fields)
        self.written.append(path)
        return fh, writer


def _load_inputs(cfg: RunConfig):
    if cfg.prices is None:
        raise ConfigError("no price file given (use --prices or [data] prices)")
    prices = load_price_csv(cfg.prices, label=cfg.label or None)
    rates = load_rate_csv(cfg.rates, units=cfg.rate_units) if cfg.rates else None
    return prices, rates


def _window(cfg: RunConfig, prices):
    t1 = to_date(cfg.t1) if cfg.t1 else to_date(prices.dates[0])
    t2 = to_date(cfg.t2) if cfg.t2 else to_date(prices.dates[-1])
    return t1, t2


def _specs(names) -> list[ModelSpec]:
    return [ModelSpec.parse(s) for s in names]


def _bounds(cfg: RunConfig, series):
    return SearchBounds.for_series(series, cfg.tc_extension, **cfg.bounds)


def _fit_summary(res: FitResult, prices, series) -> dict:
    d = res.as_dict()
    d["t_c_date"] = index_to_date(prices, prices.index_of(series.t1), res.params.t_c).isoformat()
    if res.spec.has_p1:
        d["fundamental_fraction_t1"] = res.params.p1 / float(series.values[0])
    d["rate_backfilled"] = series.rate_backfilled
    if series.rate_backfilled:
        d.setdefault("notes", []).append("rates before the first quote were backfilled")
    return d


def _write_fit_outputs(run: Run, res: FitResult, prices, rates, series, tag: str) -> dict:
    summary = _fit_summary(res, prices, series)
    try:
        summary["crash"] = crash_metrics(prices, rates, res, series.t1, run.cfg.peak_slack_days,
                                         run.cfg.dd_max_months).as_dict()
    except DataError as exc:
        summary["crash"] = None
        summary.setdefault("notes", []).append(f"crash metrics unavailable: {exc}")
    run.write_json(f"fit_{tag}.json", summary)
    fh, w = run.open_csv(f"residuals_{tag}.csv", ["date", "t", "residual"])
    with fh:
        for d, t, r in zip(series.dates, series.t_index, res.residuals.values):
            w.writerow([str(d), int(t), repr(float(r))])
    fh, w = run.open_csv(f"curve_{tag}.csv", ["date", "t", "observed", "discounted", "model"])
    with fh:
        pricing = res.spec.price_form
        for d, t, o, p in zip(series.dates, series.t_index, series.observed, series.values):
            w.writerow([str(d), int(t), repr(float(o)), repr(float(p)),
                        repr(float(model_price(pricing, res.params, t)))])
        t = float(series.t_index[-1]) + 1.0
        while t < res.params.t_c:
            day = index_to_date(prices, prices.index_of(series.t1), t)
            try:
                w.writerow([day.isoformat(), int(t), "", "", repr(float(model_price(pricing, res.params, t)))])
            except ValueError:
                break
            t += 1.0
    return summary


def _tag(cfg: RunConfig, prices, *parts) -> str:
    label = cfg.label or prices.label or "series"
    return "_".join([label, *parts]).replace(" ", "-")


def cmd_fit(cfg: RunConfig) -> int:
    prices, rates = _load_inputs(cfg)
    t1, t2 = _window(cfg, prices)
    series = discount(prices, rates, t1, t2)
    run = Run("fit", cfg)
    specs = _specs(cfg.specs)
    fits = fit_family(series, specs, _bounds(cfg, series), cfg.n_starts, cfg.seed, cfg.workers)
    for spec in specs:
        s = _write_fit_outputs(run, fits[spec], prices, rates, series, _tag(cfg, prices, spec.value))
        print(f"{spec.value}: t_c={s['t_c_date']} m={fits[spec].params.m:.3f} "
              f"omega={fits[spec].params.omega:.3f} rms={fits[spec].rms:.4f} boundary_ok={fits[spec].boundary_ok}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    prices, rates = _load_inputs(cfg)
    t1, t2 = _window(cfg, prices)
    series = discount(prices, rates, t1, t2)
    run = Run("compare", cfg)
    specs = (ModelSpec.M0, ModelSpec.M1, ModelSpec.M2, ModelSpec.M3)
    fits = fit_family(series, specs, _bounds(cfg, series), cfg.n_starts, cfg.seed, cfg.workers)
    for spec in specs:
        _write_fit_outputs(run, fits[spec], prices, rates, series, _tag(cfg, prices, spec.value))
    wilks = compare_fits(fits)
    result = {"wilks": {k: v.as_dict() for k, v in wilks.items()},
              "fits": {s.value: {"cost": fits[s].cost, "rms": fits[s].rms, "boundary_ok": fits[s].boundary_ok}
                       for s in specs}}
    run.write_json(f"compare_{_tag(cfg, prices)}.json", result)
    for k, v in wilks.items():
        print(f"({k}): T={v.T:.4f} k={v.k} p={v.p_value:.4g}")
    return EXIT_OK


def _parse_pair(text: str) -> tuple[ModelSpec, ModelSpec]:
    parts = text.replace(",", ":").split(":")
    if len(parts) != 2:
        raise ConfigError(f"pair must look like M0:M1, got {text!r}")
    return ModelSpec.parse(parts[0]), ModelSpec.parse(parts[1])


def cmd_bootstrap(cfg: RunConfig) -> int:
    prices, rates = _load_inputs(cfg)
    t1, t2 = _window(cfg, prices)
    series = discount(prices, rates, t1, t2)
    run = Run("bootstrap", cfg)
    n_starts = cfg.boot_n_starts or cfg.n_starts
    for text in cfg.pairs:
        lo, hi = _parse_pair(text)
        fits = fit_family(series, (lo, hi), _bounds(cfg, series), n_starts, cfg.seed, cfg.workers)
        res = bootstrap_compare(lo, hi, series, cfg.n_reps, cfg.block_len, cfg.seed, n_starts,
                                cfg.workers, fits=fits)
        run.write_json(f"bootstrap_{_tag(cfg, prices, lo.value, hi.value, f'b{cfg.block_len}')}.json",
                       res.as_dict())
        print(f"({lo.value},{hi.value}) block={cfg.block_len}: p_l_true={res.p_l_true:.3f} "
              f"p_h_true={res.p_h_true:.3f} failed={res.n_failed_l + res.n_failed_h}")
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    prices, rates = _load_inputs(cfg)
    if cfg.t1 or cfg.t2:
        lo = prices.index_of(cfg.t1) if cfg.t1 else 0
        hi = prices.index_of(cfg.t2, "right") + 1 if cfg.t2 else len(prices)
        prices = type(prices)(prices.dates[lo:hi], prices.values[lo:hi], prices.label)
    run = Run("scan", cfg)
    for spec in _specs(cfg.specs):
        tag = _tag(cfg, prices, spec.value, f"L{cfg.length}")
        outcomes = []
        fh, w = run.open_csv(f"scan_{tag}.csv", WindowOutcome.CSV_FIELDS)
        with fh:
            for o in scan_windows(prices, rates, spec, cfg.length, cfg.step, cfg.offset, cfg.n_starts,
                                  cfg.seed, cfg.workers):
                w.writerow([_csv_cell(v) for v in o.row().values()])
                fh.flush()
                outcomes.append(o)
        census = ScanCensus(spec, cfg.length, cfg.step, tuple(outcomes))
        run.write_json(f"scan_{tag}.json", census.as_dict())
        print(f"{spec.value}: windows={census.n_windows} failed={census.n_failed} "
              f"PP={census.frac_pp:.3f} DF={census.frac_df:.3f} P_LPPL={census.p_lppl:.3f} "
              f"PP|LPPL={census.frac_pp_lppl:.3f}")
    return EXIT_OK


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return v


SIM_PARAM_KEYS = ("t_c", "m", "omega", "phi", "A", "B", "C", "p1", "gamma")


def cmd_simulate(cfg: RunConfig) -> int:
    sim = {k.lower(): v for k, v in cfg.sim.items()}
    try:
        params = LpplParams(**{k: float(sim[k.lower()]) for k in SIM_PARAM_KEYS if k.lower() in sim})
        config = SimConfig(params=params, kappa=float(sim.get("kappa", 1.0)), sigma=float(sim.get("sigma", 0.0)),
                           n_days=int(sim.get("n_days", 250)), seed=cfg.seed,
                           mode=SimMode(sim.get("mode", "curve")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad [simulate] settings: {exc}") from None
    path = simulate(config)
    run = Run("simulate", cfg)
    label = cfg.label or f"sim_{config.spec.value}"
    start = sim.get("start", "2000-01-03")
    csv_path = cfg.out / f"{label}.csv"
    path.to_csv(csv_path, start=start)
    run.written.append(csv_path)
    run.write_json(f"{label}.json", {"params": params.as_dict(), "spec": config.spec.value, "kappa": config.kappa,
                                     "sigma": config.sigma, "n_days": config.n_days, "mode": config.mode.value,
                                     "start": start, "crash_day": path.crash_day, "jumped": path.jumped,
                                     "jump_size": path.jump_size, "prices_sha256": sha256_of(csv_path)})
    print(f"wrote {csv_path} ({len(path.prices)} days, jumped={path.jumped})")
    return EXIT_OK


def _fmt(v, spec="{:.2f}"):
    return "-" if v is None else spec.format(v)


def cmd_report(cfg: RunConfig) -> int:
    """Collate JSON outputs in the output directory into ``report.md``."""
    out = cfg.out
    if not out.is_dir():
        raise FileNotFoundError(f"no such output directory: {out}")
    docs = []
    for p in sorted(out.glob("*.json")):
        try:
            docs.append((p, json.loads(p.read_text())))
        except json.JSONDecodeError as exc:
            raise DataError(f"unreadable report {p}: {exc}") from None
    lines = ["# Calibration report", ""]
    fits = [(p, d) for p, d in docs if d.get("command") in ("fit", "compare") and "spec" in d.get("result", {})]
    if fits:
        lines += ["## Fits", "",
                  "| file | spec | t_c | m | omega | phi | p1/p(t1) | p1/p(t_p) | gamma | RC 2m | RC max | RMS | boundary_ok |",
                  "|---|---|---|---|---|---|---|---|---|---|---|---|---|"]
        for p, d in fits:
            r = d["result"]
            par, crash = r["params"], r.get("crash") or {}
            gamma = par["gamma"] if r["spec"] in ("M2", "M3") else None
            lines.append(
                f"| {p.stem} | {r['spec']} | {r.get('t_c_date', '-')} | {par['m']:.2f} | {par['omega']:.2f} | "
                f"{par['phi']:.2f} | {_fmt(r.get('fundamental_fraction_t1'))} | "
                f"{_fmt(crash.get('fundamental_fraction_tp'))} | {_fmt(gamma)} | {_fmt(crash.get('RC_2months'))} | "
                f"{_fmt(crash.get('RC_max'))} | {r['rms']:.4f} | {r['boundary_ok']} |")
        lines.append("")
    scans = [(p, d) for p, d in docs if d.get("command") == "scan"]
    if scans:
        lines += ["## Rolling-window census", "",
                  "| file | spec | windows | failed | PP stationary | DF stationary | P_LPPL | PP given LPPL | DF given LPPL |",
                  "|---|---|---|---|---|---|---|---|---|"]
        for p, d in scans:
            r = d["result"]
            pct = lambda v: "-" if v is None else f"{100 * v:.1f}%"
            lines.append(f"| {p.stem} | {r['spec']} | {r['n_windows']} | {r['n_failed']} | {pct(r['frac_pp'])} | "
                         f"{pct(r['frac_df'])} | {pct(r['p_lppl'])} | {pct(r['frac_pp_lppl'])} | "
                         f"{pct(r['frac_df_lppl'])} |")
        lines.append("")
    comps = [(p, d) for p, d in docs if d.get("command") == "compare" and "wilks" in d.get("result", {})]
    if comps:
        lines += ["## Wilks tests", "", "| file | pair | T | k | p |", "|---|---|---|---|---|"]
        for p, d in comps:
            for pair, w in d["result"]["wilks"].items():
                lines.append(f"| {p.stem} | ({pair}) | {w['T']:.4f} | {w['k']} | {w['p_value']:.4g} |")
        lines.append("")
    boots = [(p, d) for p, d in docs if d.get("command") == "bootstrap"]
    if boots:
        lines += ["## Bootstrap", "", "| file | pair | block | n_reps | p (M_l true) | p (M_h true) | failed |",
                  "|---|---|---|---|---|---|---|"]
        for p, d in boots:
            r = d["result"]
            lines.append(f"| {p.stem} | ({','.join(r['pair'])}) | {r['block_len']} | {r['n_reps']} | "
                         f"{_fmt(r['p_l_true'], '{:.3f}')} | {_fmt(r['p_h_true'], '{:.3f}')} | "
                         f"{r['n_failed_l'] + r['n_failed_h']} |")
        lines.append("")
    if len(lines) == 2:
        lines.append("No results found.")
    target = out / "report.md"
    target.write_text("\n".join(lines) + "\n")
    print(f"wrote {target}")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "compare": cmd_compare, "bootstrap": cmd_bootstrap, "scan": cmd_scan,
            "simulate": cmd_simulate, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jlsbubble", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI configuration file")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--label", help="name used in output file names")
    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--prices", help="CSV of date,close")
    data.add_argument("--rates", help="CSV of date,annualized risk-free rate")
    data.add_argument("--rate-units", dest="rate_units", choices=("percent", "decimal"))
    data.add_argument("--t1", help="window start (ISO date)")
    data.add_argument("--t2", help="window end (ISO date)")
    data.add_argument("--n-starts", dest="n_starts", type=int, help="taboo starting points per fit")
    data.add_argument("--workers", type=int, help="worker processes")
    data.add_argument("--tc-extension", dest="tc_extension", type=float,
                      help="t_c search extends this fraction of the window past t2")
    data.add_argument("--bound", action="append", metavar="NAME=LO,HI", help="override a search interval")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("fit", parents=[common, data], help="calibrate one or more specs on a window")
    p.add_argument("--spec", nargs="+", help="M0 M1 M2 M3 M0prime")
    sub.add_parser("compare", parents=[common, data], help="fit M0-M3 and run Wilks tests on nested pairs")
    p = sub.add_parser("bootstrap", parents=[common, data], help="residual-reshuffling bootstrap for nested pairs")
    p.add_argument("--pair", nargs="+", help=f"pairs such as M0:M1 (default: {' '.join(ALL_PAIRS)})")
    p.add_argument("--n-reps", dest="n_reps", type=int)
    p.add_argument("--block-len", dest="block_len", type=int)
    p.add_argument("--boot-n-starts", dest="boot_n_starts", type=int,
                   help="taboo starts for the data fits; replicas use a quarter")
    p = sub.add_parser("scan", parents=[common, data], help="rolling-window stationarity census")
    p.add_argument("--spec", nargs="+")
    p.add_argument("--length", type=int)
    p.add_argument("--step", type=int)
    p.add_argument("--offset", type=int, help="index of the first window start")
    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic price path")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="t_c, m, omega, phi, A, B, C, p1, gamma, kappa, sigma, n_days, mode, start")
    sub.add_parser("report", parents=[common], help="collate outputs into report.md")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _apply_flags(load_config(args.config), args)
        return COMMANDS[args.command](cfg)
    except (FitError, HazardNegative, PathDiscarded, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (FileNotFoundError, PermissionError, ConfigError, DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
