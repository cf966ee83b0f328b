#!/usr/bin/env python3
"""Extract the benchmark instances the acceptance suite consumes from
locally downloaded SATLIB archives (this tool performs no network access;
see benchmarks/README.md for sources).

    python3 scripts/unpack_benchmarks.py ~/Downloads/uf75-325.tar.gz ...
"""

import argparse
import sys
import tarfile
from pathlib import Path

WANTED = {
    "uf75-01.cnf", "uf75-02.cnf", "uf75-03.cnf",
    "uf100-01.cnf", "uf100-02.cnf", "uf100-03.cnf",
    "uf200-03.cnf",
    "flat75-1.cnf", "flat75-2.cnf", "flat75-3.cnf",
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("archives", nargs="+", metavar="ARCHIVE.tar.gz")
    parser.add_argument(
        "--dest",
        default=Path(__file__).resolve().parent.parent / "benchmarks",
        type=Path,
    )
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)
    extracted = 0
    for archive in args.archives:
        with tarfile.open(archive) as tar:
            for member in tar.getmembers():
                name = Path(member.name).name
                if name not in WANTED or not member.isfile():
                    continue
                data = tar.extractfile(member).read()
                (args.dest / name).write_bytes(data)
                print("extracted %s" % name)
                extracted += 1
    if not extracted:
        print("no wanted members found; see benchmarks/README.md", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
