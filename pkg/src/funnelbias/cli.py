"""Command-line interface: analyze, funnel, simulate.

Exit codes: 0 success, 2 input/usage error (bad CSV, bad grid file,
bad flags), 3 statistical precondition failure (too few studies, a
degenerate design, every study excluded).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .asymmetry import (
    EggerWeighting,
    MacaskillWeighting,
    PrecisionAxis,
    TrimFillEstimator,
    funnel_points,
)
from .errors import (
    DataError,
    DatasetFormatError,
    FunnelBiasError,
    GridFormatError,
    MeasureError,
    StatisticalError,
    TooFewStudies,
)
from .harness import (
    TestFamily,
    TestVariantId,
    run_grid,
    run_variant,
    summarize,
    write_results_csv,
)
from .measures import measure_studies
from .model import (
    CorrectionPolicy,
    MeasureId,
    Sidedness,
    read_dataset_csv,
    validate_dataset,
)
from .sampler import default_grid, load_grid

SCHEMA_VERSION = 1

_MEASURES = {m.value: m for m in MeasureId}
_FAMILIES = {f.value: f for f in TestFamily}
_AXES = {"se": PrecisionAxis.SE, "n": PrecisionAxis.N, "ess": PrecisionAxis.ESS, "inv-n": PrecisionAxis.INV_N}
_ESTIMATORS = {"r": TrimFillEstimator.R, "l": TrimFillEstimator.L}
_SIDEDNESS = {"one": Sidedness.ONE_SIDED, "two": Sidedness.TWO_SIDED}


def _resolve_weighting(family: TestFamily, token: str | None):
    if token is None or token == "none":
        return None
    if token == "ivfixed":
        if family is TestFamily.EGGER:
            return EggerWeighting.INV_VARIANCE_FIXED
        return MacaskillWeighting.INV_VARIANCE_FIXED
    if token == "unweighted":
        return EggerWeighting.UNWEIGHTED
    if token == "ivrandom":
        return EggerWeighting.INV_VARIANCE_RANDOM
    if token == "ess":
        return MacaskillWeighting.ESS
    return MacaskillWeighting.PETERS


def _build_variant(args) -> TestVariantId:
    family = _FAMILIES[args.test]
    try:
        return TestVariantId(
            family=family,
            measure=_MEASURES[args.measure],
            axis=_AXES[args.axis],
            weighting=_resolve_weighting(family, args.weighting),
            estimator=_ESTIMATORS[args.estimator] if args.estimator else None,
            sidedness=_SIDEDNESS[args.sided],
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


class _UsageError(Exception):
    """Invalid flag combination; mapped to exit code 2."""


def _add_variant_flags(parser: argparse.ArgumentParser, with_test: bool = True) -> None:
    parser.add_argument("--measure", choices=sorted(_MEASURES), default="lndor")
    if with_test:
        parser.add_argument("--test", choices=sorted(_FAMILIES), default="trimfill")
    parser.add_argument("--axis", choices=["se", "n", "ess", "inv-n"], default="se")
    parser.add_argument(
        "--weighting",
        choices=["none", "unweighted", "ivfixed", "ivrandom", "ess", "peters"],
        default=None,
    )
    parser.add_argument("--estimator", choices=["r", "l"], default=None)
    parser.add_argument("--sided", choices=["one", "two"], default="one")
    parser.add_argument("--alpha", type=float, default=0.1)
    parser.add_argument("--correction", choices=["half", "never"], default="half")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funnelbias",
        description="Publication-bias (funnel-plot asymmetry) tests for diagnostic meta-analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run one asymmetry test on a dataset CSV")
    analyze.add_argument("--input", required=True, help="dataset CSV (study_id,tp,fn,fp,tn)")
    _add_variant_flags(analyze)

    funnel = sub.add_parser("funnel", help="emit funnel-plot coordinates")
    funnel.add_argument("--input", required=True)
    funnel.add_argument("--measure", choices=sorted(_MEASURES), default="lndor")
    funnel.add_argument("--axis", choices=["se", "n", "ess", "inv-n"], default="se")
    funnel.add_argument("--correction", choices=["half", "never"], default="half")
    funnel.add_argument("--format", choices=["csv", "json"], default="csv")

    simulate = sub.add_parser("simulate", help="run the Monte Carlo rejection-rate study")
    simulate.add_argument("--grid", default="default", help="'default' or a grid JSON path")
    simulate.add_argument("--reps", type=int, default=1000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", default="results.csv")
    simulate.add_argument("--parallelism", type=int, default=1)
    _add_variant_flags(simulate)

    return parser


def _policy(token: str) -> CorrectionPolicy:
    return CorrectionPolicy.HALF_IF_ANY_ZERO if token == "half" else CorrectionPolicy.NEVER


def _load_estimates(args):
    """Shared analyze/funnel input pipeline: read, validate, measure."""
    dataset, study_ids = read_dataset_csv(args.input)
    validate_dataset(dataset)
    records = measure_studies(dataset, _MEASURES[args.measure], _policy(args.correction))
    warnings = []
    for rec in records:
        sid = study_ids[rec.index]
        if rec.correction_applied:
            warnings.append(f"study {sid}: continuity correction applied")
        if rec.error is not None:
            warnings.append(f"study {sid}: excluded: {rec.error}")
    usable = [(study_ids[r.index], r.estimate) for r in records if r.estimate is not None]
    return dataset, records, usable, warnings


def _cmd_analyze(args) -> int:
    dataset, records, usable, warnings = _load_estimates(args)
    estimates = [est for _, est in usable]
    if len(estimates) < 3:
        raise TooFewStudies(
            f"only {len(estimates)} usable studies after exclusions; need at least 3"
        )
    variant = _build_variant(args)
    result = run_variant(variant, estimates, args.alpha)
    report = {
        "schema_version": SCHEMA_VERSION,
        "input": str(args.input),
        "k": dataset.k,
        "measure": args.measure,
        "correction": args.correction,
        "studies": [
            {
                "study_id": sid,
                "value": est.value,
                "se": est.se,
                "n": est.n,
                "ess": est.ess,
            }
            for sid, est in usable
        ],
        "warnings": warnings,
        "test": {
            "test_id": result.test_id,
            "statistic": result.statistic,
            "p_value": result.p_value,
            "sided": result.sidedness.value,
            "alpha": result.alpha,
            "reject": result.reject,
        },
    }
    if result.k0 is not None:
        report["test"]["k0"] = result.k0
        report["test"]["pooled_effect"] = result.pooled_effect
        report["test"]["converged"] = result.converged
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_funnel(args) -> int:
    _, _, usable, warnings = _load_estimates(args)
    for message in warnings:
        print(message, file=sys.stderr)
    if not usable:
        raise TooFewStudies("no usable studies")
    ids = [sid for sid, _ in usable]
    points = funnel_points([est for _, est in usable], _AXES[args.axis])
    if args.format == "json":
        rows = [
            {"study_id": sid, "effect": x, "axis_value": y}
            for sid, (x, y) in zip(ids, points)
        ]
        json.dump(rows, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        print("study_id,effect,axis_value")
        for sid, (x, y) in zip(ids, points):
            print(f"{sid},{x!r},{y!r}")
    return 0


def _cmd_simulate(args) -> int:
    if args.reps < 1:
        raise _UsageError(f"--reps must be >= 1, got {args.reps}")
    if args.parallelism < 1:
        raise _UsageError(f"--parallelism must be >= 1, got {args.parallelism}")
    grid = default_grid() if args.grid == "default" else load_grid(args.grid)
    variant = _build_variant(args)
    results = run_grid(
        grid,
        [variant],
        reps=args.reps,
        alpha=args.alpha,
        master_seed=args.seed,
        parallelism=args.parallelism,
        policy=_policy(args.correction),
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=out.parent, prefix=out.name, suffix=".tmp")
    os.close(fd)
    try:
        write_results_csv(tmp_name, results)
        os.replace(tmp_name, out)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    print(f"wrote {len(results)} rows to {out}")
    print(f"variant: {variant.label}  alpha={args.alpha}  reps={args.reps}  seed={args.seed}")
    print("bias          strength  rate      95% interval")
    for row in summarize(results, ("bias", "bias_strength")):
        bias, strength = row.key
        print(
            f"{bias:<13} {strength:<9g} {row.rate:<9.4f} "
            f"[{row.wilson_low:.4f}, {row.wilson_high:.4f}]"
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "funnel":
            return _cmd_funnel(args)
        return _cmd_simulate(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DatasetFormatError as exc:
        line = f" (line {exc.line_no})" if exc.line_no is not None else ""
        print(f"error: {args.input if hasattr(args, 'input') else 'input'}{line}: {exc}", file=sys.stderr)
        return 2
    except GridFormatError as exc:
        print(f"error: bad grid: {exc}", file=sys.stderr)
        return 2
    except (StatisticalError, MeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FunnelBiasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
