#!/usr/bin/env python3
"""Download SuiteSparse Matrix Market files into tests/fixtures/suitesparse.

Usage::

    python3 scripts/fetch_suitesparse.py            # divorce, Trec8, Stranke94
    python3 scripts/fetch_suitesparse.py --extra    # also Ragusa18 and well1033

Each archive is fetched from the collection's ``MM/<group>/<name>.tar.gz``
path, the ``<name>.mtx`` member is extracted, and the file is checked by
loading it with the package's reader.
"""
from __future__ import annotations

import argparse
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

BASE_URL = "https://sparse.tamu.edu/MM"
DEFAULT = {"divorce": "Pajek", "Trec8": "JGD_Kocay", "Stranke94": "Pajek"}
EXTRA = {"Ragusa18": "Pajek", "well1033": "HB"}
DEST = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "suitesparse"


def fetch(name: str, group: str, dest: Path, base_url: str, timeout: float) -> Path:
    url = f"{base_url}/{group}/{name}.tar.gz"
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        data = resp.read()
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
        member = next(m for m in tar.getmembers() if m.name.endswith(f"/{name}.mtx"))
        payload = tar.extractfile(member).read()
    out = dest / f"{name}.mtx"
    out.write_bytes(payload)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--extra", action="store_true", help="also fetch the larger matrices")
    ap.add_argument("--dest", type=Path, default=DEST)
    ap.add_argument("--base-url", default=BASE_URL)
    ap.add_argument("--timeout", type=float, default=60.0)
    args = ap.parse_args(argv)

    from oblique_kaczmarz.problems import density, load_matrix_market

    wanted = {**DEFAULT, **(EXTRA if args.extra else {})}
    args.dest.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name, group in wanted.items():
        try:
            path = fetch(name, group, args.dest, args.base_url, args.timeout)
            A = load_matrix_market(path, drop_zero_rows=True, allow_pattern=True)
            print(f"{name}: {A.n_rows}x{A.n_cols}, density {100 * density(A):.2f}% -> {path}")
        except Exception as exc:  # report and continue with the rest
            print(f"{name}: failed ({exc})", file=sys.stderr)
            failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
