"""Monte Carlo harness: rejection rates over a grid of conditions.

For every replicate one dataset is generated and *all* requested test
variants are evaluated on it (a paired design, so between-variant
comparisons share the Monte Carlo noise). A replicate on which a
variant cannot be evaluated (degenerate estimates, test precondition
failure) is counted in ``degenerate_reps`` and scored as a
non-rejection.

Seeds are derived per (master seed, condition index, replicate index),
so rejection counts are identical whatever the parallelism degree.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from collections.abc import Sequence

from scipy import stats as _scipy_stats

from .asymmetry import (
    BeggDispersion,
    EggerWeighting,
    MacaskillPredictor,
    MacaskillWeighting,
    PrecisionAxis,
    TrimFillEstimator,
    begg_test,
    egger_test,
    macaskill_test,
    trim_fill_test,
)
from .errors import EmptyInput, MeasureError, StatisticalError
from .measures import compute_usable
from .model import (
    AsymmetryTestResult,
    CorrectionPolicy,
    EffectEstimate,
    MeasureId,
    Sidedness,
)
from .sampler import SimCondition, generate_meta_analysis, replicate_rng

MIN_USABLE_STUDIES = 3


class TestFamily(enum.Enum):
    EGGER = "egger"
    MACASKILL = "macaskill"
    BEGG = "begg"
    TRIMFILL = "trimfill"


_EGGER_AXES = (PrecisionAxis.SE, PrecisionAxis.N)
_MACASKILL_PREDICTORS = {
    PrecisionAxis.N: MacaskillPredictor.N,
    PrecisionAxis.ESS: MacaskillPredictor.INV_SQRT_ESS,
    PrecisionAxis.INV_N: MacaskillPredictor.INV_N,
}
_MACASKILL_DEFAULT_WEIGHTING = {
    PrecisionAxis.N: MacaskillWeighting.INV_VARIANCE_FIXED,
    PrecisionAxis.ESS: MacaskillWeighting.ESS,
    PrecisionAxis.INV_N: MacaskillWeighting.PETERS,
}
_BEGG_DISPERSIONS = {
    PrecisionAxis.SE: BeggDispersion.VARIANCE,
    PrecisionAxis.N: BeggDispersion.INV_N,
    PrecisionAxis.INV_N: BeggDispersion.INV_N,
    PrecisionAxis.ESS: BeggDispersion.INV_ESS,
}


@dataclass(frozen=True, slots=True)
class TestVariantId:
    """One runnable combination of family, measure, axis and options.

    Construction validates the combination: Egger takes SE/N axes and an
    Egger weighting; Macaskill takes N/ESS/inv-N axes (mapped to the
    predictors N, 1/sqrt(ESS), 1/N) and a Macaskill weighting, defaulted
    canonically per axis; Begg takes SE/N/ESS/inv-N (mapped to the
    dispersions variance, 1/N, 1/ESS); trim and fill takes SE/N plus an
    estimator and is one-sided only.
    """

    family: TestFamily
    measure: MeasureId
    axis: PrecisionAxis
    weighting: EggerWeighting | MacaskillWeighting | None = None
    estimator: TrimFillEstimator | None = None
    sidedness: Sidedness = Sidedness.ONE_SIDED

    def __post_init__(self) -> None:
        if self.family is TestFamily.EGGER:
            if self.axis not in _EGGER_AXES:
                raise ValueError(f"Egger axis must be SE or N, got {self.axis}")
            if self.weighting is None:
                object.__setattr__(self, "weighting", EggerWeighting.UNWEIGHTED)
            elif not isinstance(self.weighting, EggerWeighting):
                raise ValueError(f"Egger weighting expected, got {self.weighting}")
            if self.estimator is not None:
                raise ValueError("estimator applies to trim and fill only")
        elif self.family is TestFamily.MACASKILL:
            if self.axis not in _MACASKILL_PREDICTORS:
                raise ValueError(f"Macaskill axis must be N, ESS or inv-N, got {self.axis}")
            if self.weighting is None:
                object.__setattr__(
                    self, "weighting", _MACASKILL_DEFAULT_WEIGHTING[self.axis]
                )
            elif not isinstance(self.weighting, MacaskillWeighting):
                raise ValueError(f"Macaskill weighting expected, got {self.weighting}")
            if self.estimator is not None:
                raise ValueError("estimator applies to trim and fill only")
        elif self.family is TestFamily.BEGG:
            if self.axis not in _BEGG_DISPERSIONS:
                raise ValueError(f"Begg axis must be SE, N, ESS or inv-N, got {self.axis}")
            if self.weighting is not None:
                raise ValueError("Begg's test takes no weighting")
            if self.estimator is not None:
                raise ValueError("estimator applies to trim and fill only")
        else:
            if self.axis not in _EGGER_AXES:
                raise ValueError(f"trim-and-fill axis must be SE or N, got {self.axis}")
            if self.estimator is None:
                object.__setattr__(self, "estimator", TrimFillEstimator.R)
            if self.weighting is not None:
                raise ValueError("trim and fill takes no weighting")
            if self.sidedness is not Sidedness.ONE_SIDED:
                raise ValueError("trim and fill is one-sided only")

    @property
    def label(self) -> str:
        parts = [self.measure.value, self.axis.value]
        if self.family in (TestFamily.EGGER, TestFamily.MACASKILL):
            parts.append(self.weighting.value)
        if self.family is TestFamily.TRIMFILL:
            parts.append(self.estimator.value)
        letter = self.family.value[0].upper()
        suffix = "" if self.sidedness is Sidedness.ONE_SIDED else ":two"
        return f"{letter}({','.join(parts)}){suffix}"


def run_variant(
    variant: TestVariantId, estimates: Sequence[EffectEstimate], alpha: float
) -> AsymmetryTestResult:
    """Evaluate one variant on one set of estimates."""
    if variant.family is TestFamily.EGGER:
        return egger_test(
            estimates,
            axis=variant.axis,
            weighting=variant.weighting,
            sidedness=variant.sidedness,
            alpha=alpha,
        )
    if variant.family is TestFamily.MACASKILL:
        return macaskill_test(
            estimates,
            predictor=_MACASKILL_PREDICTORS[variant.axis],
            weighting=variant.weighting,
            sidedness=variant.sidedness,
            alpha=alpha,
        )
    if variant.family is TestFamily.BEGG:
        return begg_test(
            estimates,
            dispersion=_BEGG_DISPERSIONS[variant.axis],
            sidedness=variant.sidedness,
            alpha=alpha,
        )
    return trim_fill_test(
        estimates, axis=variant.axis, estimator=variant.estimator, alpha=alpha
    )


@dataclass(frozen=True, slots=True)
class SimResult:
    """Rejection tally for one (condition, variant) cell."""

    condition_id: int
    condition: SimCondition
    variant: TestVariantId
    reps: int
    rejections: int
    degenerate_reps: int
    seed: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.reps


def run_condition(
    condition: SimCondition,
    variants: Sequence[TestVariantId],
    reps: int,
    alpha: float = 0.1,
    master_seed: int = 0,
    condition_index: int = 0,
    policy: CorrectionPolicy = CorrectionPolicy.HALF_IF_ANY_ZERO,
) -> list[SimResult]:
    """Rejection counts for every variant over ``reps`` paired replicates."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not variants:
        raise ValueError("no test variants supplied")
    measures = sorted({v.measure for v in variants}, key=lambda m: m.value)
    rejections = [0] * len(variants)
    degenerate = [0] * len(variants)
    for rep in range(reps):
        rng = replicate_rng(master_seed, condition_index, rep)
        dataset = generate_meta_analysis(condition, rng)
        estimates_by_measure = {
            m: compute_usable(dataset, m, policy)[0] for m in measures
        }
        for j, variant in enumerate(variants):
            estimates = estimates_by_measure[variant.measure]
            if len(estimates) < MIN_USABLE_STUDIES:
                degenerate[j] += 1
                continue
            try:
                result = run_variant(variant, estimates, alpha)
            except (StatisticalError, MeasureError):
                degenerate[j] += 1
                continue
            if result.reject:
                rejections[j] += 1
    return [
        SimResult(
            condition_id=condition_index,
            condition=condition,
            variant=variant,
            reps=reps,
            rejections=rejections[j],
            degenerate_reps=degenerate[j],
            seed=master_seed,
        )
        for j, variant in enumerate(variants)
    ]


def _run_condition_task(args) -> list[SimResult]:
    index, condition, variants, reps, alpha, master_seed, policy = args
    return run_condition(
        condition,
        variants,
        reps,
        alpha=alpha,
        master_seed=master_seed,
        condition_index=index,
        policy=policy,
    )


def run_grid(
    grid: Sequence[SimCondition],
    variants: Sequence[TestVariantId],
    reps: int,
    alpha: float = 0.1,
    master_seed: int = 0,
    parallelism: int = 1,
    policy: CorrectionPolicy = CorrectionPolicy.HALF_IF_ANY_ZERO,
) -> list[SimResult]:
    """Run every condition of the grid; output order follows the grid."""
    tasks = [
        (i, condition, tuple(variants), reps, alpha, master_seed, policy)
        for i, condition in enumerate(grid)
    ]
    results: list[SimResult] = []
    if parallelism <= 1:
        for task in tasks:
            results.extend(_run_condition_task(task))
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for chunk in pool.map(_run_condition_task, tasks):
                results.extend(chunk)
    return results


# ---------------------------------------------------------------------------
# aggregation and persistence
# ---------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = float(_scipy_stats.norm.ppf(0.5 + confidence / 2.0))
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials**2)) / denom
    low = 0.0 if successes == 0 else max(center - half, 0.0)
    high = 1.0 if successes == trials else min(center + half, 1.0)
    return low, high


_FIELD_GETTERS = {
    "condition_id": lambda r: r.condition_id,
    "mu_a": lambda r: r.condition.params.mu[0],
    "mu_b": lambda r: r.condition.params.mu[1],
    "sigma_a2": lambda r: r.condition.params.sigma_a2,
    "sigma_ab": lambda r: r.condition.params.sigma_ab,
    "sigma_b2": lambda r: r.condition.params.sigma_b2,
    "k": lambda r: r.condition.k,
    "pi": lambda r: r.condition.pi,
    "bias": lambda r: r.condition.bias.mechanism.value,
    "bias_strength": lambda r: r.condition.bias.strength,
    "test_family": lambda r: r.variant.family.value,
    "measure": lambda r: r.variant.measure.value,
    "axis": lambda r: r.variant.axis.value,
    "weighting": lambda r: r.variant.weighting.value if r.variant.weighting else "",
    "estimator": lambda r: r.variant.estimator.value if r.variant.estimator else "",
    "sided": lambda r: r.variant.sidedness.value,
}


@dataclass(frozen=True, slots=True)
class SummaryRow:
    key: tuple
    rate: float
    reps: int
    rejections: int
    wilson_low: float
    wilson_high: float


def summarize(
    results: Sequence[SimResult], group_by: Sequence[str]
) -> list[SummaryRow]:
    """Pool rejection counts by the given result fields.

    Group keys may mix condition fields (mu_a, ..., bias, bias_strength)
    and variant fields (test_family, measure, axis, weighting,
    estimator, sided). The rate is pooled rejections over pooled reps,
    with a Wilson 95% interval.
    """
    if not results:
        raise EmptyInput("no simulation results to summarize")
    unknown = [f for f in group_by if f not in _FIELD_GETTERS]
    if unknown:
        raise ValueError(f"unknown group fields: {unknown}")
    getters = [_FIELD_GETTERS[f] for f in group_by]
    buckets: dict[tuple, list[int]] = {}
    order: list[tuple] = []
    for r in results:
        key = tuple(g(r) for g in getters)
        if key not in buckets:
            buckets[key] = [0, 0]
            order.append(key)
        buckets[key][0] += r.rejections
        buckets[key][1] += r.reps
    rows = []
    for key in order:
        rejections, reps = buckets[key]
        low, high = wilson_interval(rejections, reps)
        rows.append(
            SummaryRow(
                key=key,
                rate=rejections / reps,
                reps=reps,
                rejections=rejections,
                wilson_low=low,
                wilson_high=high,
            )
        )
    return rows


RESULTS_CSV_HEADER = (
    "condition_id,mu_a,mu_b,sigma_a2,sigma_ab,sigma_b2,k,pi,bias,bias_strength,"
    "test_family,measure,axis,weighting,estimator,sided,reps,rejections,rate,"
    "degenerate,seed"
)


def write_results_csv(path: str | Path, results: Sequence[SimResult]) -> None:
    """Write results in a stable, byte-reproducible CSV layout."""
    columns = RESULTS_CSV_HEADER.split(",")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for r in results:
            row = [_FIELD_GETTERS[c](r) for c in columns[:16]]
            row += [r.reps, r.rejections, repr(r.rejection_rate), r.degenerate_reps, r.seed]
            writer.writerow(row)
