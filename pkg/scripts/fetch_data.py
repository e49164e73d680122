"""Download the public daily series used by the acceptance suite.

Writes ``date,close`` CSVs for the Hang Seng (hsi.csv), S&P 500 (gspc.csv) and
Shanghai Composite (ssec.csv) indices and the US 3-month T-bill secondary
market rate in percent (dtb3.csv). Raw data are not redistributed; this script
fetches them and checks each file against ``SHA256SUMS`` in the data directory.

    python3 scripts/fetch_data.py [--dest data] [--record]

``--record`` writes the checksums of the files just downloaded. Without it a
mismatch with a recorded checksum is an error, because vendors revise history
and the reference calibrations depend on the exact closes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import sys
import urllib.request
from pathlib import Path

STOOQ = "https://stooq.com/q/d/l/?s={symbol}&i=d"
FRED = "https://fred.stlouisfed.org/graph/fredgraph.csv?id=DTB3"

SOURCES = {
    "hsi.csv": (STOOQ.format(symbol="%5Ehsi"), "Date", "Close"),
    "gspc.csv": (STOOQ.format(symbol="%5Espx"), "Date", "Close"),
    "ssec.csv": (STOOQ.format(symbol="%5Eshc"), "Date", "Close"),
    "dtb3.csv": (FRED, None, "DTB3"),
}
SUMS = "SHA256SUMS"


def _download(url: str) -> str:
    req = urllib.request.Request(url, headers={"User-Agent": "jlsbubble-fetch/1"})
    with urllib.request.urlopen(req, timeout=60) as resp:
        return resp.read().decode("utf-8")


def _two_columns(text: str, date_key: str | None, value_key: str) -> str:
    """Reduce a vendor CSV to ``date,value`` rows keeping missing markers as-is."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or value_key not in reader.fieldnames:
        raise ValueError(f"column {value_key!r} not in {reader.fieldnames}")
    date_key = date_key or reader.fieldnames[0]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["date", "value"])
    for row in reader:
        w.writerow([row[date_key], row[value_key].strip()])
    return out.getvalue()


def _read_sums(path: Path) -> dict[str, str]:
    if not path.is_file():
        return {}
    pairs = (line.split() for line in path.read_text().splitlines() if line.strip())
    return {name: digest for digest, name in pairs}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    ap.add_argument("--record", action="store_true", help="write checksums of the downloaded files")
    args = ap.parse_args(argv)
    args.dest.mkdir(parents=True, exist_ok=True)
    recorded = _read_sums(args.dest / SUMS)
    digests, bad = {}, []
    for name, (url, date_key, value_key) in SOURCES.items():
        print(f"fetching {name} from {url}")
        body = _two_columns(_download(url), date_key, value_key).encode()
        digest = hashlib.sha256(body).hexdigest()
        (args.dest / name).write_bytes(body)
        digests[name] = digest
        if not args.record and name in recorded and recorded[name] != digest:
            bad.append(name)
    if args.record:
        (args.dest / SUMS).write_text("".join(f"{d}  {n}\n" for n, d in sorted(digests.items())))
        print(f"recorded checksums in {args.dest / SUMS}")
    elif not recorded:
        print(f"no {SUMS} in {args.dest}; rerun with --record to pin these downloads")
    if bad:
        print(f"checksum mismatch for {', '.join(bad)}: the vendor history changed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
