"""Command line entry point: `drbench run | synth | figures`."""

from __future__ import annotations

import argparse
import logging
import sys

from .classifiers import CLASSIFIERS
from .dataset import DatasetError, write_csv
from .modelselect import OBJECTIVES
from .runner import (DEFAULT_S_VALUES, ExperimentConfig, export_figure_data, load_config,
                     make_synthetic, read_report_table, run_experiment)

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


def _csv_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in _csv_list(text)]


def build_parser():
    p = argparse.ArgumentParser(prog="drbench", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="cross-validated sweep over reducers, s, classifiers")
    run.add_argument("--config", help="re-run from a config.json written by an earlier run")
    run.add_argument("--data", help="CSV file with a header row")
    run.add_argument("--label-col", default="label")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--s-values", type=_int_list,
                     default=list(DEFAULT_S_VALUES), help="comma separated, e.g. 3,6,12")
    run.add_argument("--reducers", type=_csv_list, default=["anova", "pca"])
    run.add_argument("--classifiers", type=_csv_list, default=list(CLASSIFIERS))
    run.add_argument("--objectives", type=_csv_list, default=list(OBJECTIVES))
    run.add_argument("--no-standardize", action="store_true")
    run.add_argument("--leaky-reduction", action="store_true",
                     help="fit scaling and reduction once on all rows instead of per fold")
    run.add_argument("--out", help="output directory (default: results, or the one in --config)")

    synth = sub.add_parser("synth", help="write a synthetic two-class dataset")
    synth.add_argument("--n", type=int, default=150)
    synth.add_argument("--d", type=int, default=184)
    synth.add_argument("--informative", type=int, default=10)
    synth.add_argument("--separation", type=float, default=1.0)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True)

    fig = sub.add_parser("figures", help="per (reducer, objective) tables from a report")
    fig.add_argument("--report", required=True)
    fig.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "synth":
        try:
            data = make_synthetic(args.n, args.d, args.informative, args.separation, args.seed)
        except ValueError as e:
            print(f"drbench: {e}", file=sys.stderr)
            return EXIT_ERROR
        write_csv(data, args.out)
        return EXIT_OK

    if args.command == "figures":
        try:
            paths = export_figure_data(read_report_table(args.report), args.out)
        except (OSError, ValueError, KeyError) as e:
            print(f"drbench: {e}", file=sys.stderr)
            return EXIT_ERROR
        for path in paths:
            print(path)
        return EXIT_OK

    try:
        if args.config:
            cfg = load_config(args.config)
            cfg.out = args.out or cfg.out or "results"
        else:
            if not args.data:
                print("drbench: run needs --data or --config", file=sys.stderr)
                return EXIT_ERROR
            cfg = ExperimentConfig(
                data=args.data, label_col=args.label_col, seed=args.seed,
                s_values=args.s_values, reducers=args.reducers,
                classifiers=args.classifiers, objectives=args.objectives,
                standardize=not args.no_standardize, leaky_reduction=args.leaky_reduction,
                out=args.out or "results")
        report = run_experiment(cfg)
    except (DatasetError, ValueError, OSError) as e:
        print(f"drbench: {e}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{len(report.rows)} rows written to {cfg.out}; {len(report.failures)} failed")
    return EXIT_PARTIAL if report.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
