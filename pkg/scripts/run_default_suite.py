"""Run the bundled default suite and write results under ``results/default``.

    python3 scripts/run_default_suite.py [--workers K] [--out DIR]
"""
import argparse
import sys
from pathlib import Path

from difflab.cli import main

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "default")
    args = ap.parse_args()
    sys.exit(main(["suite", str(ROOT / "configs" / "default"), "--out", str(args.out),
                   "--workers", str(args.workers)]))
