#!/usr/bin/env python3
"""Download the public benchmark datasets and write dataset configs.

Fetches the UCI Wine Quality tables (red + white, merged with a `color`
column) and the Pima Indians Diabetes table (via public mirrors), writes
them as single CSVs under data/, and drops a matching dataset config into
configs/ for each. The package itself never downloads anything; this
script is the one place network access happens, and the dataset tests in
tests/test_acceptance.py skip cleanly when the files are absent.

Usage:
    python3 scripts/fetch_datasets.py            # fetch everything
    python3 scripts/fetch_datasets.py --only wine
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np
import pandas as pd

WINE_URLS = {
    "red": [
        "https://archive.ics.uci.edu/ml/machine-learning-databases/wine-quality/winequality-red.csv",
        "https://raw.githubusercontent.com/stedy/Machine-Learning-with-R-datasets/master/winequality-red.csv",
    ],
    "white": [
        "https://archive.ics.uci.edu/ml/machine-learning-databases/wine-quality/winequality-white.csv",
        "https://raw.githubusercontent.com/stedy/Machine-Learning-with-R-datasets/master/winequality-white.csv",
    ],
}

# column order of the raw Pima table (the jbrownlee mirror has no header)
PIMA_COLUMNS = [
    "pregnancies", "glucose", "blood_pressure", "skin_thickness",
    "insulin", "bmi", "pedigree", "age", "outcome",
]
PIMA_URLS = [
    "https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.data.csv",
    "https://raw.githubusercontent.com/plotly/datasets/master/diabetes.csv",
]


def _download(urls: list[str], timeout: float) -> bytes:
    """Try each mirror in order; return the first successful body."""
    last: Exception | None = None
    for url in urls:
        try:
            print(f"  fetching {url}")
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            print(f"    failed: {exc}", file=sys.stderr)
            last = exc
    raise RuntimeError(f"all mirrors failed (last error: {last})")


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    print(f"  wrote {path} ({len(frame)} rows, sha256 {digest[:16]}...)")


def _write_config(doc: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(f"  wrote {path}")


def fetch_wine(data_dir: Path, config_dir: Path, timeout: float) -> None:
    """Merge the red and white Wine Quality tables; color is protected."""
    parts = []
    for color, urls in WINE_URLS.items():
        body = _download(urls, timeout)
        frame = pd.read_csv(io.BytesIO(body), sep=";")
        if frame.shape[1] == 1:
            # some mirrors ship comma-separated copies
            frame = pd.read_csv(io.BytesIO(body))
        frame.columns = [c.strip().strip('"').replace(" ", "_")
                         for c in frame.columns]
        if "quality" not in frame.columns or frame.shape[1] != 12:
            raise RuntimeError(
                f"unexpected wine-{color} layout: {list(frame.columns)}")
        frame["color"] = color
        parts.append(frame)
    merged = pd.concat(parts, ignore_index=True)
    _write_csv(merged, data_dir / "wine.csv")
    _write_config({
        "path": str(data_dir / "wine.csv"),
        "protected_col": "color",
        "positive_value": "red",
        "drop_cols": ["quality"],
    }, config_dir / "wine.json")


def fetch_pima(data_dir: Path, config_dir: Path, timeout: float) -> None:
    """Pima diabetes table; protected attribute is an age split at the median."""
    body = _download(PIMA_URLS, timeout)
    frame = pd.read_csv(io.BytesIO(body), header=None)
    if frame.iloc[0].astype(str).str.contains("[A-Za-z]").any():
        # mirror with a header row
        frame = pd.read_csv(io.BytesIO(body))
    if frame.shape[1] != len(PIMA_COLUMNS):
        raise RuntimeError(f"unexpected pima layout: {frame.shape[1]} columns")
    frame.columns = PIMA_COLUMNS
    threshold = int(np.median(frame["age"].to_numpy(dtype=float)))
    frame["age_group"] = np.where(frame["age"] >= threshold, "older", "younger")
    if frame["age_group"].nunique() < 2:
        raise RuntimeError(f"age split at {threshold} left one group empty")
    print(f"  age_group split at median age {threshold}")
    _write_csv(frame, data_dir / "pima.csv")
    _write_config({
        "path": str(data_dir / "pima.csv"),
        "protected_col": "age_group",
        "positive_value": "older",
        "drop_cols": ["age", "outcome"],
    }, config_dir / "pima.json")


FETCHERS = {"wine": fetch_wine, "pima": fetch_pima}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--only", choices=sorted(FETCHERS),
                        help="fetch a single dataset")
    parser.add_argument("--data-dir", default="data")
    parser.add_argument("--config-dir", default="configs")
    parser.add_argument("--timeout", type=float, default=30.0)
    args = parser.parse_args(argv)

    names = [args.only] if args.only else sorted(FETCHERS)
    failures = []
    for name in names:
        print(f"[{name}]")
        try:
            FETCHERS[name](Path(args.data_dir), Path(args.config_dir),
                           args.timeout)
        except Exception as exc:
            print(f"  {name}: {exc}", file=sys.stderr)
            failures.append(name)
    if failures:
        print(f"\ncould not fetch: {', '.join(failures)} "
              "(dataset tests skip when the files are absent)",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
