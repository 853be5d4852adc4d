#!/usr/bin/env python3
"""Run the whole pipeline end to end on the vendored data.

Steps, all through the public CLI so the script doubles as a usage
demo: preprocess the temperature snapshot, train a small model on the
bundled corpus, sonify single years (seeded, empty-seed, and a long
2004 run), render the two decade ranges, and inspect the checkpoint.

Everything lands under --work-dir (default out/repro). The default
recipe trains a deliberately small model in about a minute; pass
--full for the full-scale configuration (hidden 256, sql 16, key
augmentation, up to 500 epochs), which takes hours on CPU.
"""

from __future__ import annotations

import argparse
import shutil
import sys
import time
from pathlib import Path

from climatune.cli import parse_args as parse_cli
from climatune.cli import run

ROOT = Path(__file__).resolve().parents[1]


def step(label: str, argv: list[str]) -> None:
    print(f"\n== {label}")
    print("   climatune " + " ".join(argv))
    started = time.monotonic()
    code = run(parse_cli(argv))
    if code != 0:
        print(f"step failed with exit code {code}", file=sys.stderr)
        raise SystemExit(code)
    print(f"   ({time.monotonic() - started:.1f} s)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--work-dir", default=str(ROOT / "out" / "repro"),
                        help="directory for all generated files")
    parser.add_argument("--epochs", type=int, default=15,
                        help="training epochs for the small recipe")
    parser.add_argument("--full", action="store_true",
                        help="full-scale training instead of the small recipe")
    args = parser.parse_args()

    work = Path(args.work_dir)
    data = work / "data"
    out = work / "out"
    data.mkdir(parents=True, exist_ok=True)
    shutil.copy(ROOT / "data" / "tokyo_tmax_monthly.csv", data / "tokyo_tmax_monthly.csv")
    corpus = str(ROOT / "data" / "corpus")

    step("preprocess: temperature vectors + vocabulary",
         ["preprocess", "--data-dir", str(data), "--corpus-dir", corpus])

    if args.full:
        sql = 16
        train_flags = ["--sql", "16", "--hidden", "256", "--d-pitch", "64",
                       "--d-duration", "16", "--epochs", "500"]
    else:
        sql = 8
        train_flags = ["--sql", "8", "--hidden", "32", "--d-pitch", "16",
                       "--d-duration", "8", "--epochs", str(args.epochs),
                       "--no-augment"]
    step("train", ["train", "--corpus-dir", corpus, "--data-dir", str(data),
                   "--seed", "0", *train_flags])

    common = ["-sql", str(sql), "--data-dir", str(data), "--out-dir", str(out)]
    step("generate: 1984 with a seeded eighth-note A4",
         ["-y", "1984", "-s", "[['A4'],[0.5]]", "-mxx", "8", "-mxl", "16", *common])
    step("generate: 2021 without a priming seed",
         ["-y", "2021", "-s", "[[],[]]", *common])
    step("generate: 2004 with 32 extra notes",
         ["-y", "2004", "-mxx", "32", "-mxl", "40", *common])
    step("range: first decade, empty seed, four events per year",
         ["range", "--from-year", "1876", "--to-year", "1886", "-n", "4",
          "-s", "[[],[]]", *common])
    step("range: last decade",
         ["range", "--from-year", "2011", "--to-year", "2021", "-n", "4",
          "-s", "[[],[]]", *common])
    step("inspect", ["inspect", "--checkpoint", str(data / "checkpoint.cltn")])

    print(f"\nall outputs under {work}")


if __name__ == "__main__":
    main()
