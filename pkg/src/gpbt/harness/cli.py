"""Command-line entry point: ``gpbt run|compare|plot-data|validate``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from gpbt.errors import GPBTError
from gpbt.harness.config import load_config
from gpbt.harness.metrics import compare
from gpbt.harness.runner import emit_plot_data, read_summary, run_experiment

log = logging.getLogger("gpbt")


def _seed_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be integers, got {text!r}") from None


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    rows, run_dir = run_experiment(cfg, out=args.out, seeds=args.seeds)
    for r in rows:
        print(f"{r.optimizer:<8} seed={r.seed:<4} best_mean_reward={r.best_mean_reward:.6g} updates={r.updates_applied}")
    print(f"outputs: {run_dir}")
    return 0


def cmd_compare(args) -> int:
    rows = [row for path in args.inputs for row in read_summary(path)]
    table = compare(rows)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "optimizer", "reference", "seeds", "max", "median", "mean", "std", "q1", "q3", "pct_diff", "rendered"])
        for s in table.stats:
            w.writerow(["stats", s.optimizer, "", len(s.seeds), repr(s.max), repr(s.median), repr(s.mean), repr(s.std), repr(s.q1), repr(s.q3), "", ""])
        for d in table.diffs:
            w.writerow(["diff", d.optimizer, d.reference, "", "", "", "", "", "", "", repr(100 * d.fraction), d.rendered])
    print(table.render())
    return 0


def cmd_plot_data(args) -> int:
    for path in emit_plot_data(args.inputs, args.out, points=args.points):
        print(path)
    return 0


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    cells = len(cfg.optimizers) * len(cfg.seeds)
    print(f"{args.config}: ok ({cfg.trainable}, d={cfg.space.d}, n={cfg.scheduler.n}, {cells} cells)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpbt", description="Population-based hyperparameter optimization experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every optimizer x seed cell of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override output_dir from the config")
    p.add_argument("--seeds", type=_seed_list, help="override seeds, e.g. '0,1,2'")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="tabulate summary.csv files")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot-data", help="write mean/std best-score curves per optimizer")
    p.add_argument("--inputs", nargs="+", required=True, help="run directories")
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int, default=100)
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GPBTError as exc:
        print(f"gpbt: {exc.category} error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gpbt: io error: {exc}", file=sys.stderr)
        return 9


if __name__ == "__main__":
    sys.exit(main())
