import math

import pytest

from funnelbias.asymmetry import (
    EggerWeighting,
    MacaskillWeighting,
    PrecisionAxis,
    TrimFillEstimator,
)
from funnelbias.errors import EmptyInput
from funnelbias.harness import (
    RESULTS_CSV_HEADER,
    TestFamily,
    TestVariantId,
    run_condition,
    run_grid,
    summarize,
    wilson_interval,
    write_results_csv,
)
from funnelbias.model import CorrectionPolicy, MeasureId, Sidedness
from funnelbias.sampler import BiasMechanism, BiasSpec, BivariateParams, SimCondition

LNDOR = MeasureId.LNDOR
T_SE_R = TestVariantId(TestFamily.TRIMFILL, LNDOR, PrecisionAxis.SE, estimator=TrimFillEstimator.R)
E_SE = TestVariantId(TestFamily.EGGER, LNDOR, PrecisionAxis.SE)
B_VAR = TestVariantId(TestFamily.BEGG, LNDOR, PrecisionAxis.SE)


def fe_condition(k=10, bias=None, **kw):
    return SimCondition(
        params=BivariateParams(mu=(1.0, -1.0)), k=k, pi=0.5,
        bias=bias or BiasSpec(), **kw,
    )


# ---------------------------------------------------------------------------
# variant construction
# ---------------------------------------------------------------------------


def test_variant_validation():
    with pytest.raises(ValueError):
        TestVariantId(TestFamily.EGGER, LNDOR, PrecisionAxis.ESS)
    with pytest.raises(ValueError):
        TestVariantId(TestFamily.MACASKILL, LNDOR, PrecisionAxis.SE)
    with pytest.raises(ValueError):
        TestVariantId(TestFamily.BEGG, LNDOR, PrecisionAxis.SE, weighting=EggerWeighting.UNWEIGHTED)
    with pytest.raises(ValueError):
        TestVariantId(TestFamily.TRIMFILL, LNDOR, PrecisionAxis.SE, sidedness=Sidedness.TWO_SIDED)
    with pytest.raises(ValueError):
        TestVariantId(TestFamily.EGGER, LNDOR, PrecisionAxis.SE, estimator=TrimFillEstimator.R)


def test_variant_canonical_weighting_defaults():
    deeks = TestVariantId(TestFamily.MACASKILL, LNDOR, PrecisionAxis.ESS)
    assert deeks.weighting is MacaskillWeighting.ESS
    peters = TestVariantId(TestFamily.MACASKILL, LNDOR, PrecisionAxis.INV_N)
    assert peters.weighting is MacaskillWeighting.PETERS
    macaskill = TestVariantId(TestFamily.MACASKILL, LNDOR, PrecisionAxis.N)
    assert macaskill.weighting is MacaskillWeighting.INV_VARIANCE_FIXED
    assert E_SE.weighting is EggerWeighting.UNWEIGHTED
    assert T_SE_R.label == "T(lndor,se,r)"


# ---------------------------------------------------------------------------
# run_condition / run_grid
# ---------------------------------------------------------------------------


def test_run_condition_single_rep_deterministic():
    cond = fe_condition(k=10)
    a = run_condition(cond, [T_SE_R], reps=1, master_seed=5)
    b = run_condition(cond, [T_SE_R], reps=1, master_seed=5)
    assert a[0].rejections == b[0].rejections
    assert a[0].reps == 1
    assert a[0].seed == 5


def test_run_condition_paired_design():
    # every variant sees the same replicate datasets, so running variants
    # separately or together cannot change any per-variant tally
    cond = fe_condition(k=12)
    together = run_condition(cond, [E_SE, B_VAR, T_SE_R], reps=60, master_seed=9)
    alone = [
        run_condition(cond, [v], reps=60, master_seed=9)[0]
        for v in (E_SE, B_VAR, T_SE_R)
    ]
    assert [r.rejections for r in together] == [r.rejections for r in alone]


def test_run_condition_degenerate_scored_as_non_rejection():
    # tiny studies without correction produce undefined lnDOR everywhere
    cond = fe_condition(k=5, n_min=3, n_max=4)
    res = run_condition(
        cond, [E_SE], reps=40, master_seed=1, policy=CorrectionPolicy.NEVER
    )[0]
    assert res.degenerate_reps > 0
    assert res.rejections + res.degenerate_reps <= res.reps
    assert 0.0 <= res.rejection_rate <= 1.0


def test_run_condition_validates_args():
    with pytest.raises(ValueError):
        run_condition(fe_condition(), [T_SE_R], reps=0)
    with pytest.raises(ValueError):
        run_condition(fe_condition(), [], reps=5)


def test_run_grid_cardinality_and_order():
    grid = [fe_condition(k=10), fe_condition(k=12), fe_condition(k=14)]
    results = run_grid(grid, [E_SE, T_SE_R], reps=5, master_seed=2)
    assert len(results) == 6
    assert [r.condition_id for r in results] == [0, 0, 1, 1, 2, 2]
    assert [r.condition.k for r in results] == [10, 10, 12, 12, 14, 14]


def test_run_grid_parallelism_invariant():
    grid = [fe_condition(k=10), fe_condition(k=10, bias=BiasSpec(BiasMechanism.SELECTION, selection_fraction=0.4))]
    serial = run_grid(grid, [T_SE_R], reps=40, master_seed=3, parallelism=1)
    parallel = run_grid(grid, [T_SE_R], reps=40, master_seed=3, parallelism=4)
    assert [r.rejections for r in serial] == [r.rejections for r in parallel]
    assert [r.degenerate_reps for r in serial] == [r.degenerate_reps for r in parallel]


def test_begg_variants_gain_power_under_selection():
    # selection leaves inflated small studies behind, so every dispersion
    # flavor should fire more often than it does under the null
    params = BivariateParams(mu=(2.0, -2.0), sigma_a2=0.5, sigma_ab=0.3, sigma_b2=0.5)
    variants = [
        TestVariantId(TestFamily.BEGG, LNDOR, PrecisionAxis.SE),
        TestVariantId(TestFamily.BEGG, LNDOR, PrecisionAxis.N),
        TestVariantId(TestFamily.BEGG, LNDOR, PrecisionAxis.ESS),
    ]
    reps = 800
    null_cond = SimCondition(params=params, k=30, pi=0.5)
    sel_cond = SimCondition(
        params=params, k=30, pi=0.5,
        bias=BiasSpec(BiasMechanism.SELECTION, selection_fraction=0.4),
    )
    null_rates = {r.variant.label: r.rejection_rate
                  for r in run_condition(null_cond, variants, reps=reps, master_seed=0)}
    sel_rates = {r.variant.label: r.rejection_rate
                 for r in run_condition(sel_cond, variants, reps=reps, master_seed=0)}
    for label, null_rate in null_rates.items():
        gap_se = math.sqrt(
            (null_rate * (1 - null_rate) + sel_rates[label] * (1 - sel_rates[label])) / reps
        )
        assert sel_rates[label] - null_rate > 2.0 * gap_se, label


def test_bias_strength_monotonicity_paired():
    """More suppression, more detections: none <= small <= large selection."""
    variants = [T_SE_R]
    params = BivariateParams(mu=(2.0, -2.0), sigma_a2=0.5, sigma_ab=0.3, sigma_b2=0.5)
    reps = 2000
    rates = []
    for frac in (0.0, 0.2, 0.4):
        bias = (
            BiasSpec()
            if frac == 0.0
            else BiasSpec(BiasMechanism.SELECTION, selection_fraction=frac)
        )
        cond = SimCondition(params=params, k=30, pi=0.5, bias=bias)
        res = run_condition(cond, variants, reps=reps, master_seed=0)[0]
        rates.append(res.rejection_rate)
    for low, high in zip(rates, rates[1:]):
        gap_se = math.sqrt((low * (1 - low) + high * (1 - high)) / reps)
        assert high - low > 2.0 * gap_se


# ---------------------------------------------------------------------------
# summaries and persistence
# ---------------------------------------------------------------------------


def test_wilson_interval_golden():
    low, high = wilson_interval(1000, 10000)
    assert low == pytest.approx(0.0943, abs=1e-4)
    assert high == pytest.approx(0.1061, abs=1e-4)
    # precision claim: half-width below 0.007 at rate 0.1, reps 10000
    assert (high - low) / 2 < 0.007


def test_wilson_interval_bounds():
    low, high = wilson_interval(0, 50)
    assert low == 0.0
    assert high > 0.0
    low, high = wilson_interval(50, 50)
    assert high == 1.0


def test_summarize_single_result():
    res = run_condition(fe_condition(), [T_SE_R], reps=20, master_seed=4)
    rows = summarize(res, ("test_family",))
    assert len(rows) == 1
    assert rows[0].rate == res[0].rejection_rate
    assert rows[0].reps == 20


def test_summarize_by_bias_level():
    grid = [fe_condition(k=10, bias=b) for b in (
        BiasSpec(),
        BiasSpec(BiasMechanism.SELECTION, selection_fraction=0.2),
        BiasSpec(BiasMechanism.SELECTION, selection_fraction=0.4),
        BiasSpec(BiasMechanism.MIXTURE, eta=(0.75, -0.75)),
        BiasSpec(BiasMechanism.MIXTURE, eta=(1.25, -1.25)),
    )]
    results = run_grid(grid, [T_SE_R], reps=5, master_seed=6)
    rows = summarize(results, ("bias", "bias_strength"))
    assert len(rows) == 5


def test_summarize_empty_and_unknown_fields():
    with pytest.raises(EmptyInput):
        summarize([], ("bias",))
    res = run_condition(fe_condition(), [T_SE_R], reps=5, master_seed=7)
    with pytest.raises(ValueError):
        summarize(res, ("nope",))


def test_write_results_csv(tmp_path):
    res = run_grid([fe_condition(k=10)], [T_SE_R, E_SE], reps=5, master_seed=8)
    path = tmp_path / "results.csv"
    write_results_csv(path, res)
    lines = path.read_text().splitlines()
    assert lines[0] == RESULTS_CSV_HEADER
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[10] == "trimfill"
    assert first[16] == "5"
    # byte-for-byte reproducible
    path2 = tmp_path / "results2.csv"
    write_results_csv(path2, res)
    assert path.read_bytes() == path2.read_bytes()
