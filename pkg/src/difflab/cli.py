"""Command line entry point.

    difflab run <config> [--out DIR] [--seed S]
    difflab suite <dir> [--out DIR] [--workers K] [--seed S]
    difflab expected --N n --alpha a

Exit status: 0 when every verdict passes, 1 when any fails, 2 on a config error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load
from .decay import expected_exponents
from .experiments import csv_text, run_experiment

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _run_one(cfg: ExperimentConfig):
    verdict, rows = run_experiment(cfg)
    return cfg, verdict, csv_text(rows)


def run_suite(configs, workers: int = 1):
    """Run configs (in parallel when ``workers > 1``); results sorted by experiment id."""
    ids = [c.ident for c in configs]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise ConfigError(f"duplicate experiment ids: {', '.join(dup)}")
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, configs))
    else:
        results = [_run_one(c) for c in configs]
    return sorted(results, key=lambda r: r[1].ident)


def expected_table(pairs) -> str:
    keys = ["heat_L2", "thm1_diff"] + [f"energy_{k}" for k in range(3)] + [f"grad_{k}" for k in range(3)]
    lines = ["N  alpha    " + "  ".join(f"{k:>10}" for k in keys)]
    for dim, alpha in sorted(set(pairs)):
        e = expected_exponents(dim, alpha)
        lines.append(f"{dim:<2} {alpha:<8g} " + "  ".join(f"{e[k]:>10.6f}" for k in keys))
    return "\n".join(lines) + "\n"


def emit_report(verdicts) -> tuple[str, str, int]:
    """Summary text, concatenated key=value verdicts and the exit status."""
    verdicts = sorted(verdicts, key=lambda v: v.ident)
    if not verdicts:
        return "", "", EXIT_OK
    lines = []
    for v in verdicts:
        status = "PASS" if v.passed else "FAIL"
        tag = " (informational)" if v.informational else ""
        slopes = " ".join(f"{s.label}={s.slope:.4f}/-{s.expected:.4f}" for s in v.series)
        lines.append(f"{status} {v.ident}{tag} {slopes}".rstrip())
        lines += [f"    {msg}" for msg in v.failures()]
    gating = [v for v in verdicts if not v.informational]
    n_fail = sum(not v.passed for v in gating)
    lines.append(f"{len(gating) - n_fail}/{len(gating)} passed")
    lines.append("")
    lines.append("expected decay exponents")
    summary = "\n".join(lines) + "\n" + expected_table((v.dim, v.alpha) for v in verdicts)
    keyvalue = "\n".join(v.to_keyvalue() for v in verdicts)
    return summary, keyvalue, EXIT_FAIL if n_fail else EXIT_OK


def write_results(results, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    for _, verdict, text in results:
        (out / f"{verdict.ident}.csv").write_text(text)
        (out / f"{verdict.ident}.verdict").write_text(verdict.to_keyvalue())
    summary, keyvalue, code = emit_report([r[1] for r in results])
    (out / "summary.txt").write_text(summary)
    (out / "verdicts.txt").write_text(keyvalue)
    sys.stdout.write(summary)
    return code


def load_suite(directory: Path, seed: int | None = None) -> list[ExperimentConfig]:
    paths = sorted(directory.glob("*.cfg"))
    if not paths:
        raise ConfigError(f"no *.cfg files in {directory}")
    configs = []
    for p in paths:
        cfg = _load(p, seed)
        configs.append(cfg if cfg.name else replace(cfg, name=p.stem))
    return configs


def _load(path: Path, seed: int | None) -> ExperimentConfig:
    try:
        cfg = load(path)
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg if seed is None else replace(cfg, seed=seed)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="difflab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("config", type=Path)
    suite = sub.add_parser("suite", help="run every *.cfg in a directory")
    suite.add_argument("directory", type=Path)
    suite.add_argument("--workers", type=int, default=1)
    for p in (run, suite):
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    exp = sub.add_parser("expected", help="print predicted decay exponents")
    exp.add_argument("--N", type=int, required=True)
    exp.add_argument("--alpha", type=float, required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "expected":
            sys.stdout.write(expected_table([(args.N, args.alpha)]))
            return EXIT_OK
        if args.command == "run":
            configs = [_load(args.config, args.seed)]
            workers = 1
        else:
            configs = load_suite(args.directory, args.seed)
            workers = max(1, args.workers)
        out = args.out
        if out is None:
            out = Path(configs[0].out) if len(configs) == 1 and configs[0].out else Path("results")
        results = run_suite(configs, workers)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return write_results(results, out)


if __name__ == "__main__":
    sys.exit(main())
