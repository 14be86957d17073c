"""Statistical tests for funnel-plot asymmetry.

Four test families operate on a list of per-study effect estimates:

* Egger-style regression of the standardized effect t/SE on a precision
  coordinate; publication bias pushes the intercept above zero.
* Macaskill-style weighted regression of the raw effect on a sample-size
  coordinate; bias tilts the slope.
* Begg-Mazumdar rank correlation (Kendall's tau) between standardized
  centered effects and a dispersion measure.
* Duval-Tweedie trim and fill, which estimates the number of suppressed
  studies (k0) from the run/rank structure of effects centered on an
  iteratively re-estimated pooled effect, and tests k0 > 0 under a
  symmetric-signs null.

All effect measures are oriented so that larger values mean higher
accuracy, hence suppressed studies are assumed to sit on the left of
the funnel and every one-sided alternative points in a fixed direction
per family.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from collections.abc import Sequence

import numpy as np
from scipy import stats

from .errors import (
    AllTied,
    LengthMismatch,
    SingularDesign,
    TooFewStudies,
)
from .model import AsymmetryTestResult, EffectEstimate, Sidedness

MAX_TRIM_ITERATIONS = 50


class PrecisionAxis(enum.Enum):
    """Funnel-plot y-axis choices (and test variants keyed on them)."""

    SE = "se"  # precision 1/SE
    N = "n"  # total sample size
    ESS = "ess"  # effective sample size
    INV_N = "inv_n"  # 1/N


class EggerWeighting(enum.Enum):
    UNWEIGHTED = "unweighted"
    INV_VARIANCE_FIXED = "ivfixed"
    INV_VARIANCE_RANDOM = "ivrandom"


class MacaskillPredictor(enum.Enum):
    N = "n"
    INV_SQRT_ESS = "inv_sqrt_ess"  # Deeks' 1/sqrt(ESS)
    INV_N = "inv_n"  # Peters' 1/N


class MacaskillWeighting(enum.Enum):
    INV_VARIANCE_FIXED = "ivfixed"
    ESS = "ess"
    PETERS = "peters"  # m1*m2/N mass weight


class BeggDispersion(enum.Enum):
    VARIANCE = "var"
    INV_N = "inv_n"
    INV_ESS = "inv_ess"


class TrimFillEstimator(enum.Enum):
    R = "r"  # run-based
    L = "l"  # rank-sum based


@dataclass(frozen=True, slots=True)
class RegressionFit:
    """A two-parameter weighted least-squares fit y = b0 + b1*x."""

    b0: float
    b1: float
    se_b0: float
    se_b1: float
    df: int


@dataclass(frozen=True, slots=True)
class TrimFillState:
    """Final state of the trim-and-fill iteration.

    ``centered`` and ``ranks`` cover all k original studies; ranks are
    average ranks of the absolute centered effects. ``r_estimate`` is
    gamma_plus - 1 before clamping (so it can be -1), ``k0`` the clamped
    integer actually used for trimming.
    """

    theta_hat: float
    centered: tuple[float, ...]
    ranks: tuple[float, ...]
    gamma_plus: int
    r_estimate: int
    l_estimate: float
    k0: int
    iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _require_studies(estimates: Sequence[EffectEstimate], minimum: int = 3) -> None:
    if len(estimates) < minimum:
        raise TooFewStudies(f"need at least {minimum} estimates, got {len(estimates)}")


def _measure_token(estimates: Sequence[EffectEstimate]) -> str:
    measures = {e.measure for e in estimates}
    if len(measures) != 1:
        raise ValueError(f"estimates mix measures: {sorted(m.value for m in measures)}")
    return measures.pop().value


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def _arrays(estimates: Sequence[EffectEstimate]):
    values = np.array([e.value for e in estimates], dtype=float)
    ses = np.array([e.se for e in estimates], dtype=float)
    ns = np.array([e.n for e in estimates], dtype=float)
    esses = np.array([e.ess for e in estimates], dtype=float)
    return values, ses, ns, esses


def weighted_linear_fit(
    x: np.ndarray, y: np.ndarray, weights: np.ndarray | None = None
) -> RegressionFit:
    """Weighted least squares for y = b0 + b1*x with known relative weights.

    Coefficient standard errors use the usual scaled covariance
    sigma2 * (X'WX)^-1 with sigma2 = weighted RSS / (k - 2). A constant
    predictor raises :class:`SingularDesign`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = len(x)
    if k < 3:
        raise TooFewStudies(f"regression needs k >= 3, got {k}")
    if np.ptp(x) == 0.0:
        raise SingularDesign("predictor is constant across studies")
    w = np.ones(k) if weights is None else np.asarray(weights, dtype=float)
    sw = np.sqrt(w)
    design = np.column_stack([sw, sw * x])
    rhs = sw * y
    beta, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < 2:
        raise SingularDesign("design matrix is rank deficient")
    resid = rhs - design @ beta
    rss = float(resid @ resid)
    # An exact fit leaves only rounding noise in the residuals; treat it
    # as zero so coefficient SEs do not become noise ratios.
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if rss < (1e-10 * scale) ** 2 * k:
        rss = 0.0
    sigma2 = rss / (k - 2)
    xtwx_inv = np.linalg.inv(design.T @ design)
    se = np.sqrt(np.maximum(sigma2 * np.diag(xtwx_inv), 0.0))
    return RegressionFit(
        b0=float(beta[0]), b1=float(beta[1]), se_b0=float(se[0]), se_b1=float(se[1]), df=k - 2
    )


def _coefficient_statistic(coef: float, se_coef: float, scale: float) -> float:
    """t statistic for a coefficient, defined under perfect fits too.

    With zero residual variance the SE collapses to 0; a coefficient that
    is itself (numerically) zero then carries no evidence in either
    direction, so the statistic is 0, otherwise it is +/- infinity.
    """
    if se_coef > 0.0:
        return coef / se_coef
    if abs(coef) <= 1e-12 * max(1.0, scale):
        return 0.0
    return math.copysign(math.inf, coef)


def _t_pvalue(statistic: float, df: int, sidedness: Sidedness, direction: str) -> float:
    if sidedness is Sidedness.TWO_SIDED:
        return float(2.0 * stats.t.sf(abs(statistic), df))
    if direction == "greater":
        return float(stats.t.sf(statistic, df))
    return float(stats.t.cdf(statistic, df))


def _finish(
    test_id: str,
    statistic: float,
    p_value: float,
    sidedness: Sidedness,
    alpha: float,
    **extra,
) -> AsymmetryTestResult:
    p_value = min(max(p_value, 0.0), 1.0)
    return AsymmetryTestResult(
        test_id=test_id,
        statistic=statistic,
        p_value=p_value,
        sidedness=sidedness,
        alpha=alpha,
        reject=p_value <= alpha,
        **extra,
    )


# ---------------------------------------------------------------------------
# pooled effects
# ---------------------------------------------------------------------------


def pool_fixed_effects(estimates: Sequence[EffectEstimate]) -> float:
    """Inverse-variance weighted mean of the estimates."""
    if not estimates:
        raise TooFewStudies("cannot pool an empty set of estimates")
    values, ses, _, _ = _arrays(estimates)
    return _pool_fixed(values, ses**2)


def pool_random_effects(estimates: Sequence[EffectEstimate]) -> tuple[float, float]:
    """DerSimonian-Laird pooled effect and between-study variance tau2."""
    if len(estimates) < 2:
        raise TooFewStudies(f"random-effects pooling needs k >= 2, got {len(estimates)}")
    values, ses, _, _ = _arrays(estimates)
    return _pool_dersimonian_laird(values, ses**2)


def _pool_fixed(values: np.ndarray, variances: np.ndarray) -> float:
    w = 1.0 / variances
    return float(np.sum(w * values) / np.sum(w))


def _pool_dersimonian_laird(values: np.ndarray, variances: np.ndarray) -> tuple[float, float]:
    k = len(values)
    if k == 1:
        return float(values[0]), 0.0
    w = 1.0 / variances
    sum_w = np.sum(w)
    t_bar = np.sum(w * values) / sum_w
    q = float(np.sum(w * (values - t_bar) ** 2))
    denom = sum_w - np.sum(w**2) / sum_w
    tau2 = max(0.0, (q - (k - 1)) / denom) if denom > 0 else 0.0
    w_star = 1.0 / (variances + tau2)
    theta = float(np.sum(w_star * values) / np.sum(w_star))
    return theta, float(tau2)


# ---------------------------------------------------------------------------
# Egger and Macaskill regressions
# ---------------------------------------------------------------------------


def egger_test(
    estimates: Sequence[EffectEstimate],
    axis: PrecisionAxis = PrecisionAxis.SE,
    weighting: EggerWeighting = EggerWeighting.UNWEIGHTED,
    sidedness: Sidedness = Sidedness.ONE_SIDED,
    alpha: float = 0.1,
) -> AsymmetryTestResult:
    """Regress t/SE on precision (1/SE) or on N and test the intercept.

    The one-sided alternative is b0 > 0: under bias the small imprecise
    studies drag the standardized effects up near the origin.
    """
    _require_studies(estimates)
    if axis not in (PrecisionAxis.SE, PrecisionAxis.N):
        raise ValueError("Egger regression supports axis SE or N only")
    values, ses, ns, _ = _arrays(estimates)
    response = values / ses
    predictor = 1.0 / ses if axis is PrecisionAxis.SE else ns
    if weighting is EggerWeighting.UNWEIGHTED:
        weights = None
    elif weighting is EggerWeighting.INV_VARIANCE_FIXED:
        weights = 1.0 / ses**2
    else:
        _, tau2 = _pool_dersimonian_laird(values, ses**2)
        weights = 1.0 / (ses**2 + tau2)
    fit = weighted_linear_fit(predictor, response, weights)
    statistic = _coefficient_statistic(fit.b0, fit.se_b0, float(np.max(np.abs(response))))
    p = _t_pvalue(statistic, fit.df, sidedness, "greater")
    test_id = f"E({_measure_token(estimates)},{axis.value},{weighting.value})"
    return _finish(test_id, statistic, p, sidedness, alpha)


def macaskill_test(
    estimates: Sequence[EffectEstimate],
    predictor: MacaskillPredictor = MacaskillPredictor.N,
    weighting: MacaskillWeighting = MacaskillWeighting.INV_VARIANCE_FIXED,
    sidedness: Sidedness = Sidedness.ONE_SIDED,
    alpha: float = 0.1,
) -> AsymmetryTestResult:
    """Weighted regression of the raw effect on a size coordinate; tests b1.

    With predictor N the alternative is b1 < 0 (small studies inflated);
    the reciprocal predictors 1/sqrt(ESS) and 1/N flip it to b1 > 0.
    """
    _require_studies(estimates)
    values, ses, ns, esses = _arrays(estimates)
    if predictor is MacaskillPredictor.N:
        x = ns
        direction = "less"
    elif predictor is MacaskillPredictor.INV_SQRT_ESS:
        x = 1.0 / np.sqrt(esses)
        direction = "greater"
    else:
        x = 1.0 / ns
        direction = "greater"
    if weighting is MacaskillWeighting.INV_VARIANCE_FIXED:
        weights = 1.0 / ses**2
    elif weighting is MacaskillWeighting.ESS:
        weights = esses
    else:
        weights = np.array([e.m1 * e.m2 / e.n for e in estimates], dtype=float)
    fit = weighted_linear_fit(x, values, weights)
    statistic = _coefficient_statistic(fit.b1, fit.se_b1, float(np.max(np.abs(values))))
    p = _t_pvalue(statistic, fit.df, sidedness, direction)
    test_id = f"M({_measure_token(estimates)},{predictor.value},{weighting.value})"
    return _finish(test_id, statistic, p, sidedness, alpha)


# ---------------------------------------------------------------------------
# Kendall's tau and Begg's rank correlation
# ---------------------------------------------------------------------------

EXACT_KENDALL_MAX_K = 7


@lru_cache(maxsize=None)
def _kendall_s_tail_table(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Null distribution of S = C - D for untied samples of size k.

    Returns (support, P(S >= support)) computed from the Mahonian
    (permutation inversion) counts: S = k(k-1)/2 - 2 * inversions.
    """
    counts = np.array([1], dtype=float)  # inversion counts, start with 0 inversions
    for i in range(2, k + 1):
        kernel = np.ones(i)
        counts = np.convolve(counts, kernel)
    n0 = k * (k - 1) // 2
    support = n0 - 2 * np.arange(len(counts))  # S for 0, 1, ... inversions
    probs = counts / counts.sum()
    tail = np.cumsum(probs)  # P(S >= support[j]) since support is decreasing
    return support, tail


def _exact_kendall_tail(k: int, s: int) -> float:
    """P(S_perm >= s) under the untied null for sample size k."""
    support, tail = _kendall_s_tail_table(k)
    idx = np.nonzero(support >= s)[0]
    if len(idx) == 0:
        return 0.0
    return float(tail[idx[-1]])


@dataclass(frozen=True, slots=True)
class _KendallDetail:
    tau: float
    s: float
    p_greater: float
    p_less: float
    p_two: float
    exact: bool


def _tie_stats(values: np.ndarray) -> tuple[float, float, float]:
    _, counts = np.unique(values, return_counts=True)
    t = counts.astype(float)
    return (
        float(np.sum(t * (t - 1) / 2)),
        float(np.sum(t * (t - 1) * (2 * t + 5))),
        float(np.sum(t * (t - 1) * (t - 2))),
    )


def _kendall_detail(xs: np.ndarray, ys: np.ndarray) -> _KendallDetail:
    k = len(xs)
    iu = np.triu_indices(k, 1)
    dx = np.sign(xs[:, None] - xs[None, :])[iu]
    dy = np.sign(ys[:, None] - ys[None, :])[iu]
    s = float(np.sum(dx * dy))
    n0 = k * (k - 1) / 2
    tx_pairs, tx_var, tx_triple = _tie_stats(xs)
    ty_pairs, ty_var, ty_triple = _tie_stats(ys)
    denom = math.sqrt((n0 - tx_pairs) * (n0 - ty_pairs))
    if denom == 0.0:
        # one vector is constant: every pair ties, no evidence either way
        return _KendallDetail(0.0, 0.0, 0.5, 0.5, 1.0, exact=False)
    tau = s / denom

    no_ties = tx_pairs == 0.0 and ty_pairs == 0.0
    if no_ties and k <= EXACT_KENDALL_MAX_K:
        p_greater = _exact_kendall_tail(k, int(round(s)))
        p_less = _exact_kendall_tail(k, int(round(-s)))  # symmetric null
        p_two = min(1.0, 2.0 * min(p_greater, p_less))
        return _KendallDetail(tau, s, p_greater, p_less, p_two, exact=True)

    var_s = (
        (k * (k - 1) * (2 * k + 5) - tx_var - ty_var) / 18.0
        + tx_pairs * ty_pairs / (2.0 * n0)
        + tx_triple * ty_triple / (9.0 * k * (k - 1) * (k - 2))
    )
    sd = math.sqrt(var_s) if var_s > 0 else 0.0
    if sd == 0.0:
        # All pair comparisons tied away; no information either way.
        return _KendallDetail(tau, s, 0.5, 0.5, 1.0, exact=False)
    # continuity correction: S moves on a lattice of spacing 2 when untied,
    # so each tail threshold shifts by half a step toward the center
    p_greater = float(stats.norm.sf((s - 1.0) / sd))
    p_less = float(stats.norm.cdf((s + 1.0) / sd))
    p_two = min(1.0, 2.0 * min(p_greater, p_less))
    return _KendallDetail(tau, s, p_greater, p_less, p_two, exact=False)


def kendall_tau(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Kendall's tau-b and the one-sided (tau > 0) p-value.

    Uses exact enumeration of the permutation null for k <= 7 untied
    samples and the tie-corrected normal approximation with continuity
    correction otherwise. A constant vector carries no ordering
    information and yields (0.0, 0.5) by convention.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(ys):
        raise LengthMismatch(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise TooFewStudies(f"Kendall's tau needs k >= 3, got {len(xs)}")
    detail = _kendall_detail(xs, ys)
    return detail.tau, detail.p_greater


def begg_test(
    estimates: Sequence[EffectEstimate],
    dispersion: BeggDispersion = BeggDispersion.VARIANCE,
    sidedness: Sidedness = Sidedness.ONE_SIDED,
    alpha: float = 0.1,
    plain_se_standardization: bool = False,
) -> AsymmetryTestResult:
    """Rank correlation between standardized centered effects and dispersion.

    Effects are centered on the fixed-effects pooled mean and divided by
    sqrt(Var_i - Var(t_bar)), the variance of the centered value (the
    naive division by SE_i alone is available behind
    ``plain_se_standardization`` but is miscalibrated under the null).
    Every dispersion variant (variance, 1/N, 1/ESS) grows as studies
    shrink, so the one-sided alternative is tau > 0 throughout.
    """
    _require_studies(estimates)
    values, ses, ns, esses = _arrays(estimates)
    variances = ses**2
    t_bar = _pool_fixed(values, variances)
    if plain_se_standardization:
        se_star = ses
    else:
        pooled_var = 1.0 / np.sum(1.0 / variances)
        se_star = np.sqrt(variances - pooled_var)
    if np.any(se_star <= 0.0):
        raise AllTied("centered-effect variance is not positive for every study")
    t_star = (values - t_bar) / se_star
    if dispersion is BeggDispersion.VARIANCE:
        disp = variances
    elif dispersion is BeggDispersion.INV_N:
        disp = 1.0 / ns
    else:
        disp = 1.0 / esses
    if np.ptp(disp) == 0.0:
        raise AllTied("dispersion values are all identical")
    detail = _kendall_detail(t_star, disp)
    p = detail.p_two if sidedness is Sidedness.TWO_SIDED else detail.p_greater
    test_id = f"B({_measure_token(estimates)},{dispersion.value})"
    return _finish(test_id, detail.tau, p, sidedness, alpha)


# ---------------------------------------------------------------------------
# trim and fill
# ---------------------------------------------------------------------------


def _center_and_rank(values: np.ndarray, theta: float):
    """Centered effects, average ranks of |centered|, gamma_plus, L pieces.

    gamma_plus is the length of the run of strictly positive centered
    effects holding the top |centered| ranks. A tie group mixing
    positive and non-positive values interrupts the run before any of
    its members are counted, which keeps the run statistic conservative.
    """
    k = len(values)
    centered = values - theta
    abs_c = np.abs(centered)
    ranks = stats.rankdata(abs_c, method="average")
    gamma_plus = 0
    for value in np.unique(abs_c)[::-1]:  # descending tie groups
        group = centered[abs_c == value]
        if np.all(group > 0):
            gamma_plus += len(group)
        else:
            break
    s_plus = float(np.sum(ranks[centered > 0]))
    l_estimate = (4.0 * s_plus - k * (k + 1)) / (2.0 * k - 1.0)
    return centered, ranks, gamma_plus, s_plus, l_estimate


@lru_cache(maxsize=None)
def _signed_rank_tail_counts(k: int) -> np.ndarray:
    """counts[s] = number of subsets of {1..k} with rank sum exactly s."""
    max_sum = k * (k + 1) // 2
    counts = np.zeros(max_sum + 1, dtype=float)
    counts[0] = 1.0
    for r in range(1, k + 1):
        counts[r:] += counts[:-r].copy()
    return counts


def _signed_rank_tail(k: int, s_plus: float) -> float:
    """P(S+ >= s_plus) when every sign is an independent fair coin."""
    counts = _signed_rank_tail_counts(k)
    threshold = math.ceil(s_plus - 1e-9)
    if threshold <= 0:
        return 1.0
    if threshold > len(counts) - 1:
        return 0.0
    return float(counts[threshold:].sum() / 2.0**k)


def _l_pvalue(k: int, ranks: np.ndarray, s_plus: float) -> float:
    """One-sided p for the L estimator under the symmetric-signs null.

    Exact via the signed-rank-sum distribution when the ranks are the
    untied integers 1..k; otherwise a normal approximation with
    continuity correction on the rank-sum scale.
    """
    untied = np.array_equal(np.sort(ranks), np.arange(1, k + 1, dtype=float))
    if untied:
        return _signed_rank_tail(k, s_plus)
    mean = k * (k + 1) / 4.0
    sd = math.sqrt(k * (k + 1) * (2 * k + 1) / 24.0)
    return float(stats.norm.sf((s_plus - 0.5 - mean) / sd))


def _trim_pool(values: np.ndarray, variances: np.ndarray, ns: np.ndarray, axis: PrecisionAxis) -> float:
    if axis is PrecisionAxis.N:
        return float(np.sum(ns * values) / np.sum(ns))
    theta, _ = _pool_dersimonian_laird(values, variances)
    return theta


def trim_fill_iterate(
    values: np.ndarray,
    variances: np.ndarray,
    ns: np.ndarray,
    estimator: TrimFillEstimator,
    axis: PrecisionAxis = PrecisionAxis.SE,
) -> TrimFillState:
    """Run the trim-and-fill iteration and return its final state.

    Each pass pools the currently kept studies, centers all k original
    values on that pooled effect and re-estimates the number of
    suppressed studies k0; the k0 largest effects are trimmed for the
    next pass until k0 stabilizes (or the iteration cap is hit).
    """
    k = len(values)
    order = np.argsort(values, kind="stable")  # ascending; trim from the top
    k0 = 0
    converged = False
    iterations = 0
    state_parts = None
    for iterations in range(1, MAX_TRIM_ITERATIONS + 1):
        kept = order[: k - k0]
        theta = _trim_pool(values[kept], variances[kept], ns[kept], axis)
        centered, ranks, gamma_plus, s_plus, l_estimate = _center_and_rank(values, theta)
        estimate = float(gamma_plus - 1) if estimator is TrimFillEstimator.R else l_estimate
        k0_new = min(max(_round_half_up(estimate), 0), k - 1)
        state_parts = (theta, centered, ranks, gamma_plus, s_plus, l_estimate)
        if k0_new == k0:
            converged = True
            break
        k0 = k0_new
    theta, centered, ranks, gamma_plus, s_plus, l_estimate = state_parts
    return TrimFillState(
        theta_hat=theta,
        centered=tuple(centered),
        ranks=tuple(ranks),
        gamma_plus=gamma_plus,
        r_estimate=gamma_plus - 1,
        l_estimate=l_estimate,
        k0=k0,
        iterations=iterations,
        converged=converged,
    )


def trim_fill_test(
    estimates: Sequence[EffectEstimate],
    axis: PrecisionAxis = PrecisionAxis.SE,
    estimator: TrimFillEstimator = TrimFillEstimator.R,
    alpha: float = 0.1,
) -> AsymmetryTestResult:
    """Trim-and-fill test for suppressed left-side studies (one-sided only).

    The run estimator R = gamma_plus - 1 has exact one-sided
    p = 2**(-gamma_plus) under the fair-signs null; the rank-sum
    estimator L is tested via the signed-rank-sum null distribution.
    The axis picks the pooling weights: inverse-variance (DerSimonian-
    Laird) for SE, plain sample-size weights for N.
    """
    _require_studies(estimates)
    if axis not in (PrecisionAxis.SE, PrecisionAxis.N):
        raise ValueError("trim and fill supports axis SE or N only")
    values, ses, ns, _ = _arrays(estimates)
    state = trim_fill_iterate(values, ses**2, ns, estimator, axis)
    k = len(values)
    if estimator is TrimFillEstimator.R:
        statistic = float(state.r_estimate)
        p = 2.0 ** (-state.gamma_plus)
    else:
        statistic = state.l_estimate
        s_plus = float(np.sum(np.asarray(state.ranks)[np.asarray(state.centered) > 0]))
        p = _l_pvalue(k, np.asarray(state.ranks), s_plus)
    test_id = f"T({_measure_token(estimates)},{axis.value},{estimator.value})"
    return _finish(
        test_id,
        statistic,
        p,
        Sidedness.ONE_SIDED,
        alpha,
        k0=state.k0,
        pooled_effect=state.theta_hat,
        converged=state.converged,
    )


# ---------------------------------------------------------------------------
# funnel coordinates
# ---------------------------------------------------------------------------


def funnel_points(
    estimates: Sequence[EffectEstimate], axis: PrecisionAxis
) -> list[tuple[float, float]]:
    """(effect, axis value) pairs in study order, for external plotting."""
    if axis is PrecisionAxis.SE:
        return [(e.value, 1.0 / e.se) for e in estimates]
    if axis is PrecisionAxis.N:
        return [(e.value, float(e.n)) for e in estimates]
    if axis is PrecisionAxis.ESS:
        return [(e.value, e.ess) for e in estimates]
    return [(e.value, 1.0 / e.n) for e in estimates]
