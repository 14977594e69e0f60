#!/usr/bin/env python3
"""Download the five regression benchmarks and write them as canonical CSVs.

Each output file has a header row whose column names match the presets
compiled into war_bench (see README). Sources are tried in order; a dataset
that no source can provide is reported and skipped.

    python3 scripts/fetch_datasets.py [--out data] [--only boston yacht]
"""

from __future__ import annotations

import argparse
import csv
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
BOSTON_COLUMNS = ["CRIM", "ZN", "INDUS", "CHAS", "NOX", "RM", "AGE", "DIS", "RAD",
                  "TAX", "PTRATIO", "B", "LSTAT", "MEDV"]


def http_get(url: str, timeout: float = 20.0) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as response:
        return response.read()


def whitespace_rows(text: str) -> list[list[str]]:
    return [line.split() for line in text.splitlines() if line.strip()]


def airfoil() -> tuple[list[str], list[list[str]]]:
    text = http_get(f"{UCI}/00291/airfoil_self_noise.dat").decode()
    header = ["frequency", "angle", "chord", "velocity", "thickness", "sound_pressure"]
    return header, whitespace_rows(text)


def yacht() -> tuple[list[str], list[list[str]]]:
    text = http_get(f"{UCI}/00243/yacht_hydrodynamics.data").decode()
    header = ["buoyancy", "prismatic", "length_displacement", "beam_draught",
              "length_beam", "froude", "resistance"]
    return header, [r for r in whitespace_rows(text) if len(r) == 7]


def energy() -> tuple[list[str], list[list[str]]]:
    import pandas as pd  # reading .xlsx also needs openpyxl

    frame = pd.read_excel(io.BytesIO(http_get(f"{UCI}/00242/ENB2012_data.xlsx")))
    frame = frame.dropna(how="all").iloc[:, :10]
    header = [f"X{i}" for i in range(1, 9)] + ["Y1", "Y2"]
    return header, [[repr(float(v)) for v in row] for row in frame.itertuples(index=False)]


def concrete_slump() -> tuple[list[str], list[list[str]]]:
    text = http_get(f"{UCI}/concrete/slump/slump_test.data").decode()
    rows = list(csv.reader(io.StringIO(text)))
    header = ["no", "cement", "slag", "fly_ash", "water", "sp", "coarse_aggr", "fine_aggr",
              "slump", "flow", "strength"]
    return header, [[c.strip() for c in r] for r in rows[1:] if len(r) == 11]


def boston_from_pip() -> tuple[list[str], list[list[str]]]:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp,
                        "mlxtend==0.24.0"], check=True)
        wheel = next(Path(tmp).glob("mlxtend-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            text = zf.read("mlxtend/data/data/boston_housing.csv").decode()
    rows = [[repr(float(c)) for c in r] for r in csv.reader(io.StringIO(text)) if r]
    return BOSTON_COLUMNS, rows


def boston_from_cmu() -> tuple[list[str], list[list[str]]]:
    text = http_get("http://lib.stat.cmu.edu/datasets/boston").decode("latin-1")
    numbers: list[str] = []
    for line in text.splitlines()[22:]:
        numbers.extend(line.split())
    return BOSTON_COLUMNS, [numbers[i:i + 14] for i in range(0, len(numbers), 14)]


SOURCES = {
    "boston": [boston_from_cmu, boston_from_pip],
    "airfoil": [airfoil],
    "energy": [energy],
    "yacht": [yacht],
    "concrete_slump": [concrete_slump],
}


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    width = len(header)
    bad = [i for i, r in enumerate(rows) if len(r) != width]
    if bad:
        raise ValueError(f"{len(bad)} rows do not have {width} columns")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--only", nargs="*", choices=sorted(SOURCES))
    parser.add_argument("--force", action="store_true", help="overwrite existing files")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    missing = []
    for name in args.only or list(SOURCES):
        target = args.out / f"{name}.csv"
        if target.exists() and not args.force:
            print(f"{name}: present at {target}")
            continue
        for source in SOURCES[name]:
            try:
                header, rows = source()
                write_csv(target, header, rows)
                print(f"{name}: {len(rows)} rows from {source.__name__} -> {target}")
                break
            except Exception as exc:  # noqa: BLE001 - try the next source
                print(f"{name}: {source.__name__} failed ({exc.__class__.__name__}: {exc})")
        else:
            missing.append(name)
    if missing:
        print("unavailable: " + ", ".join(missing))
    return 0


if __name__ == "__main__":
    sys.exit(main())
