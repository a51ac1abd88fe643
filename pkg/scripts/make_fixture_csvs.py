#!/usr/bin/env python3
"""Write the reference datasets as CSV files (default: ./data) for use with
the CLI and the web client."""

from __future__ import annotations

import argparse
from pathlib import Path

from rulehide.dataset import write_csv
from rulehide.fixtures import parallel_hiding_dataset, single_hiding_dataset


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "single_hiding.csv").write_text(write_csv(single_hiding_dataset()))
    (out / "parallel_hiding.csv").write_text(write_csv(parallel_hiding_dataset()))
    print(f"wrote {out / 'single_hiding.csv'} and {out / 'parallel_hiding.csv'}")


if __name__ == "__main__":
    main()
