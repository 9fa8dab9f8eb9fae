"""Command-line interface.

Subcommands mirror the analysis workflow: ``decinter`` tests cell-quantile
contrasts, ``iband`` compares the quantiles of the two all-pairwise
difference distributions, ``simulate`` drives Monte Carlo sweeps from an
experiment file, and ``plotdata`` exports shift-function points as tidy
CSV.  Exit codes: 0 success, 1 simulation condition failed, 2 argument or
experiment-file error, 3 data-file error.
"""

import argparse
import csv
import dataclasses
import json
import os
import sys
import time

import numpy as np

from .bootstrap import DECILES, BootstrapConfig
from .contrasts import decinter
from .data import DataError, parse_level_order, read_long_csv
from .design import INTERACTION, MAIN_A, MAIN_B
from .pairwise import IBAND_QUANTILES, iband, pairwise_differences, ph_probability
from .quantiles import estimate_quantiles
from .simulation import (
    ExperimentError,
    REPORT_COLUMNS,
    load_experiment,
    report_csv_rows,
    report_metadata,
    sweep,
)

_TABLE_HEADER = ("Quant", "Est.Lev 1", "Est.Lev 2", "Dif", "ci.low", "ci.up", "p-value", "p.adj")
_PLOT_HEADER = ("panel", "quant", "x", "dif", "ci.low", "ci.up")

_CONTRAST_FLAGS = {"interaction": INTERACTION, "main-a": MAIN_A, "main-b": MAIN_B}


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _parse_quantiles(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse quantile list {text!r}") from None


def _parse_levels(text: str):
    try:
        return parse_level_order(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_data_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="long-format CSV file")
    sub.add_argument("--factor-a", default="a", help="column with factor A labels")
    sub.add_argument("--factor-b", default="b", help="column with factor B labels")
    sub.add_argument("--value", default="y", help="column with the numeric outcome")
    sub.add_argument("--level-order", type=_parse_levels, default=None, metavar="A1,A2:B1,B2",
                     help="explicit level ordering (default: lexicographic)")


def _add_analysis_flags(sub: argparse.ArgumentParser, default_quantiles) -> None:
    sub.add_argument("--estimator", choices=("hd", "t7"), default="hd")
    sub.add_argument("--quantiles", type=_parse_quantiles, default=default_quantiles,
                     metavar="Q1,Q2,...", help="quantile levels, each strictly in (0,1)")
    sub.add_argument("--nboot", type=int, default=2000, help="bootstrap replicates")
    sub.add_argument("--alpha", type=float, default=0.05)
    sub.add_argument("--correction", choices=("bh", "hochberg", "none"), default="bh")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--format", choices=("tsv", "json"), default="tsv")
    sub.add_argument("--threads", type=int, default=os.cpu_count(),
                     help="worker processes (analysis output never depends on this)")
    sub.add_argument("--progress", action="store_true",
                     help="report progress on stderr")


def _load_sample(args):
    sample, dropped = read_long_csv(
        args.input, args.factor_a, args.factor_b, args.value, args.level_order
    )
    if dropped:
        print(f"warning: dropped {dropped} rows with missing values", file=sys.stderr)
    if args.progress:
        sizes = sample.sizes()
        print(
            f"loaded cells {sizes} with A levels {sample.factor_a} "
            f"and B levels {sample.factor_b}",
            file=sys.stderr,
        )
    return sample


def _config(args, quantiles) -> BootstrapConfig:
    return BootstrapConfig(
        n_boot=args.nboot,
        alpha=args.alpha,
        seed=args.seed,
        estimator=args.estimator,
        quantiles=quantiles,
    )


def _result_payload(command: str, args, sample, rows, extra=None) -> dict:
    payload = {
        "schema_version": 1,
        "command": command,
        "estimator": args.estimator,
        "correction": args.correction,
        "alpha": args.alpha,
        "n_boot": args.nboot,
        "seed": args.seed,
        "factor_a": {"column": args.factor_a, "levels": list(sample.factor_a)},
        "factor_b": {"column": args.factor_b, "levels": list(sample.factor_b)},
        "cell_sizes": [list(r) for r in sample.sizes()],
        "rows": [dataclasses.asdict(r) for r in rows],
    }
    if extra:
        payload.update(extra)
    return payload


def _emit_table(rows, args, payload, out=None) -> None:
    out = out if out is not None else sys.stdout
    if args.format == "json":
        json.dump(payload, out, indent=2)
        out.write("\n")
        return
    print("\t".join(_TABLE_HEADER), file=out)
    for r in rows:
        print("\t".join(_fmt(v) for v in (
            r.q, r.est_lev1, r.est_lev2, r.dif, r.ci_low, r.ci_high,
            r.p_value, r.p_adjusted,
        )), file=out)


def _cmd_decinter(args) -> int:
    sample = _load_sample(args)
    config = _config(args, args.quantiles)
    kind = _CONTRAST_FLAGS[args.contrast]
    t0 = time.perf_counter()
    rows = decinter(sample, kind, config, args.correction)
    if args.progress:
        print(f"bootstrap of {args.nboot} replicates took "
              f"{time.perf_counter() - t0:.2f}s", file=sys.stderr)
    payload = _result_payload("decinter", args, sample, rows, {"contrast": kind})
    _emit_table(rows, args, payload)
    return 0


def _cmd_iband(args) -> int:
    sample = _load_sample(args)
    config = _config(args, args.quantiles)
    t0 = time.perf_counter()
    rows = iband(sample, config, args.correction)
    if args.progress:
        print(f"bootstrap of {args.nboot} replicates took "
              f"{time.perf_counter() - t0:.2f}s", file=sys.stderr)
    extra = {"contrast": INTERACTION}
    ph = None
    if args.ph:
        ph = (
            ph_probability(pairwise_differences(sample.cell(1, 1), sample.cell(1, 2))),
            ph_probability(pairwise_differences(sample.cell(2, 1), sample.cell(2, 2))),
        )
        extra["ph_level1"] = ph[0]
        extra["ph_level2"] = ph[1]
    payload = _result_payload("iband", args, sample, rows, extra)
    _emit_table(rows, args, payload)
    if ph is not None and args.format == "tsv":
        print(f"ph.lev1\t{_fmt(ph[0])}")
        print(f"ph.lev2\t{_fmt(ph[1])}")
    return 0


def _plot_rows(sample, args):
    """Shift-function points for every panel of the 2x2 summary."""
    config = _config(args, args.quantiles)
    x11, x12, x21, x22 = sample.flat_cells()
    pooled = {
        "a": estimate_quantiles(np.concatenate([x11, x12]), config.quantiles, config.estimator),
        "b": estimate_quantiles(np.concatenate([x11, x21]), config.quantiles, config.estimator),
    }
    out = []

    inter = decinter(sample, INTERACTION, config, args.correction)
    for row, x in zip(inter, pooled["a"]):
        out.append(("interaction", row.q, float(x), row.dif, row.ci_low, row.ci_high))

    for kind, tag, pool_key in ((MAIN_A, "main-a", "a"), (MAIN_B, "main-b", "b")):
        rows = decinter(sample, kind, config, args.correction)
        for row in rows:
            out.append((f"{tag}-averaged", row.q, row.est_lev1, row.dif, row.ci_low, row.ci_high))
        for row, x in zip(rows, pooled[pool_key]):
            out.append((f"{tag}-pooled", row.q, float(x), row.dif, row.ci_low, row.ci_high))
    return out


def _cmd_plotdata(args) -> int:
    sample = _load_sample(args)
    rows = _plot_rows(sample, args)

    def write(out):
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(_PLOT_HEADER)
        for panel, quant, x, dif, lo, hi in rows:
            writer.writerow([panel, _fmt(quant), _fmt(x), _fmt(dif), _fmt(lo), _fmt(hi)])

    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write(fh)
    else:
        write(sys.stdout)
    return 0


def _cmd_simulate(args) -> int:
    conditions = load_experiment(args.experiment)

    progress = None
    if args.progress:
        total = len(conditions)

        def progress(i, cond, report):
            status = "failed" if report.error else f"rate={report.rate:.4f}"
            print(f"[{i + 1}/{total}] {cond.name}: {status} "
                  f"({report.wall_time:.1f}s)", file=sys.stderr)

    reports = sweep(conditions, workers=args.threads, progress=progress)

    def write_csv(out):
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(report_csv_rows(reports))

    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh)
    else:
        write_csv(sys.stdout)

    meta = json.dumps(report_metadata(reports), indent=2)
    if args.metadata:
        with open(args.metadata, "w", encoding="utf-8") as fh:
            fh.write(meta + "\n")
    else:
        print(meta, file=sys.stderr)
    return 1 if any(r.error for r in reports) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qshift",
        description="Quantile-shift tests for 2x2 between-subjects designs",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("decinter", help="quantile-by-quantile contrast test")
    _add_data_flags(p)
    p.add_argument("--contrast", choices=tuple(_CONTRAST_FLAGS), default="interaction")
    _add_analysis_flags(p, DECILES)
    p.set_defaults(func=_cmd_decinter)

    p = subs.add_parser("iband", help="all-pairwise-difference quantile interaction test")
    _add_data_flags(p)
    p.add_argument("--ph", action="store_true",
                   help="also report P(X<Y) for each level of factor A")
    _add_analysis_flags(p, IBAND_QUANTILES)
    p.set_defaults(func=_cmd_iband)

    p = subs.add_parser("plotdata", help="export shift-function points as tidy CSV")
    _add_data_flags(p)
    _add_analysis_flags(p, DECILES)
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=_cmd_plotdata)

    p = subs.add_parser("simulate", help="run a Monte Carlo experiment file")
    p.add_argument("experiment", help="JSON experiment file")
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")
    p.add_argument("--metadata", default=None,
                   help="metadata JSON path (default: stderr)")
    p.add_argument("--threads", type=int, default=os.cpu_count(),
                   help="worker processes (results never depend on this)")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
