"""Univariate accuracy measures and their standard errors.

Four measures are supported, each computed from a (possibly
continuity-corrected) 2x2 table and each oriented so that larger values
mean a more accurate test:

* ``LNDOR`` - log diagnostic odds ratio, ln(xz / yw).
* ``NEG_LNTHETA`` - negated log of the Lehmann ROC parameter; the raw
  parameter satisfies Sen = FPR**theta, so theta = ln(Sen)/ln(FPR) and
  small theta means high accuracy. Negating its log flips the direction
  to match the other measures.
* ``YOUDEN`` - Youden's index, Sen + Spe - 1.
* ``KAPPA`` - Cohen's kappa between index test and gold standard, with
  the Fleiss large-sample standard error.

The SE formulas are delta-method approximations; their accuracy is
checked against parametric-bootstrap oracles in the test suite.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

from .errors import (
    BoundaryProportion,
    DegenerateMarginals,
    DegenerateSE,
    MeasureError,
    ZeroCell,
)
from .model import (
    CorrectedTable,
    CorrectionPolicy,
    EffectEstimate,
    MeasureId,
    MetaDataset,
    StudyTable,
    continuity_correct,
)


def effective_sample_size(table: StudyTable) -> float:
    """4 * n1 * n2 / (n1 + n2): equals N for balanced groups, less otherwise."""
    return 4.0 * table.n1 * table.n2 / (table.n1 + table.n2)


def _estimate(table: CorrectedTable, measure: MeasureId, value: float, se: float) -> EffectEstimate:
    src = table.source
    return EffectEstimate(
        measure=measure,
        value=value,
        se=se,
        ess=effective_sample_size(src),
        n=src.n,
        m1=src.m1,
        m2=src.m2,
    )


def ln_dor(table: CorrectedTable) -> EffectEstimate:
    """Log diagnostic odds ratio with se = sqrt(1/x + 1/y + 1/w + 1/z)."""
    x, w, y, z = table.x, table.w, table.y, table.z
    if 0.0 in (x, w, y, z):
        raise ZeroCell("lnDOR undefined with a zero cell; apply continuity correction")
    value = math.log(x * z / (y * w))
    se = math.sqrt(1.0 / x + 1.0 / y + 1.0 / w + 1.0 / z)
    return _estimate(table, MeasureId.LNDOR, value, se)


def neg_ln_theta(table: CorrectedTable) -> EffectEstimate:
    """Negated log Lehmann parameter, -ln(ln(Sen) / ln(FPR))."""
    x, y = table.x, table.y
    n1, n2 = table.n1, table.n2
    if x == 0.0 or y == 0.0:
        raise ZeroCell("lnTheta undefined with x = 0 or y = 0")
    if x == n1 or y == n2:
        raise BoundaryProportion("lnTheta degenerate when Sen = 1 or FPR = 1")
    log_sen = math.log(x) - math.log(n1)
    log_fpr = math.log(y) - math.log(n2)
    value = -math.log(log_sen / log_fpr)
    se = math.sqrt(
        (1.0 / x - 1.0 / n1) / log_sen**2 + (1.0 / y - 1.0 / n2) / log_fpr**2
    )
    if se == 0.0:
        raise DegenerateSE("lnTheta standard error is zero")
    return _estimate(table, MeasureId.NEG_LNTHETA, value, se)


def youden(table: CorrectedTable) -> EffectEstimate:
    """Youden's index x/n1 + z/n2 - 1 with the binomial standard error."""
    sen = table.x / table.n1
    fpr = table.y / table.n2
    value = sen + (1.0 - fpr) - 1.0
    se = math.sqrt(sen * (1.0 - sen) / table.n1 + fpr * (1.0 - fpr) / table.n2)
    if se == 0.0:
        raise DegenerateSE("Youden standard error is zero (both proportions on a boundary)")
    return _estimate(table, MeasureId.YOUDEN, value, se)


def kappa(table: CorrectedTable) -> EffectEstimate:
    """Cohen's kappa 2(xz - yw) / (n1*m2 + n2*m1) with the Fleiss SE.

    The variance pieces follow the Fleiss-Cohen-Everitt large-sample
    form for a 2x2 agreement table: the A term collects the diagonal
    (agreement) cells x and z, B the off-diagonal cells w and y, and C
    the centering correction.
    """
    x, w, y, z = table.x, table.w, table.y, table.z
    n1, n2, m1, m2 = table.n1, table.n2, table.m1, table.m2
    n = table.n
    denom = n1 * m2 + n2 * m1
    if denom == 0.0:
        raise DegenerateMarginals("kappa undefined: n1*m2 + n2*m1 = 0")
    value = 2.0 * (x * z - y * w) / denom
    p_e = (n1 * m1 + n2 * m2) / n**2
    if p_e == 1.0:
        raise DegenerateMarginals("kappa SE undefined: expected agreement is 1")
    one_minus_k = 1.0 - value
    a_term = (
        x * (n - (n1 + m1) * one_minus_k) ** 2 + z * (n - (n2 + m2) * one_minus_k) ** 2
    ) / n**3
    b_term = one_minus_k**2 * (w * (n2 + m1) ** 2 + y * (n1 + m2) ** 2) / n**3
    c_term = (value - p_e * one_minus_k) ** 2
    variance_core = max(a_term + b_term - c_term, 0.0)
    se = math.sqrt(variance_core) / ((1.0 - p_e) * math.sqrt(n))
    if se == 0.0:
        raise DegenerateSE("kappa standard error is zero")
    return _estimate(table, MeasureId.KAPPA, value, se)


MEASURES: dict[MeasureId, Callable[[CorrectedTable], EffectEstimate]] = {
    MeasureId.LNDOR: ln_dor,
    MeasureId.NEG_LNTHETA: neg_ln_theta,
    MeasureId.YOUDEN: youden,
    MeasureId.KAPPA: kappa,
}


def compute_all(
    dataset: MetaDataset,
    measure: MeasureId,
    policy: CorrectionPolicy = CorrectionPolicy.HALF_IF_ANY_ZERO,
) -> list[EffectEstimate]:
    """Correct and measure every study, in order; strict about failures.

    A study whose measure is undefined raises the underlying
    :class:`MeasureError` with the 0-based study index attached.
    """
    fn = MEASURES[measure]
    estimates = []
    for i, study in enumerate(dataset.studies):
        try:
            estimates.append(fn(continuity_correct(study, policy)))
        except MeasureError as exc:
            exc.study_index = i
            exc.args = (f"study {i}: {exc.args[0]}",)
            raise
    return estimates


@dataclass(frozen=True, slots=True)
class StudyMeasurement:
    """Per-study measurement outcome, for reporting pipelines."""

    index: int
    estimate: EffectEstimate | None
    correction_applied: bool
    error: str | None


def measure_studies(
    dataset: MetaDataset,
    measure: MeasureId,
    policy: CorrectionPolicy = CorrectionPolicy.HALF_IF_ANY_ZERO,
) -> list[StudyMeasurement]:
    """Correct and measure every study, recording corrections and failures."""
    fn = MEASURES[measure]
    records = []
    for i, study in enumerate(dataset.studies):
        corrected = continuity_correct(study, policy)
        try:
            estimate = fn(corrected)
            error = None
        except MeasureError as exc:
            estimate = None
            error = str(exc)
        records.append(
            StudyMeasurement(
                index=i,
                estimate=estimate,
                correction_applied=corrected.correction_applied,
                error=error,
            )
        )
    return records


def compute_usable(
    dataset: MetaDataset,
    measure: MeasureId,
    policy: CorrectionPolicy = CorrectionPolicy.HALF_IF_ANY_ZERO,
) -> tuple[list[EffectEstimate], list[tuple[int, str]]]:
    """Like :func:`compute_all` but skips degenerate studies.

    Returns the usable estimates (input order preserved) together with
    ``(study_index, reason)`` pairs for every excluded study, so callers
    can surface them as warnings instead of silently dropping data.
    """
    estimates: list[EffectEstimate] = []
    skipped: list[tuple[int, str]] = []
    for record in measure_studies(dataset, measure, policy):
        if record.estimate is not None:
            estimates.append(record.estimate)
        else:
            skipped.append((record.index, record.error or "undefined"))
    return estimates, skipped
