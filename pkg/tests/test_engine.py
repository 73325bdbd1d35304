import math
from dataclasses import replace

import numpy as np
import pytest

from qwalk import (
    ProbabilityDistributions,
    RandomnessMode,
    Seed,
    StepLimitExceeded,
    WalkConfig,
    WalkVariant,
    fit_growth_exponent,
    fit_tail,
    localization_report,
    resolve_workers,
    run_walk,
    steady_state,
    sweep_theta,
)

LN2 = math.log(2.0)


def config(variant=WalkVariant.CONVENTIONAL, n=30, steps=None, mode=None, seed=None, **kw):
    from qwalk import max_steps

    if mode is None:
        mode = RandomnessMode.none(0.5)
    if steps is None:
        steps = max_steps(variant, n)
    return WalkConfig(
        variant=variant, n_half=n, steps=steps, mode=mode,
        seed=seed or Seed(42), **kw,
    )


def test_series_shape_and_initial_record():
    s = run_walk(config(steps=12))
    assert len(s) == 13
    assert np.array_equal(s.time, np.arange(13))
    assert s.entropy[0] == pytest.approx(0.0, abs=1e-15)
    assert s.overlap[0] == pytest.approx(0.125, abs=1e-15)
    assert s.pop_plus[0] == pytest.approx(0.5, abs=1e-15)
    assert s.pop_minus[0] == pytest.approx(0.5, abs=1e-15)
    assert s.variance[0] == pytest.approx(1.0, abs=1e-15)


def test_step_budget_enforced_up_front():
    with pytest.raises(StepLimitExceeded):
        run_walk(config(n=10, steps=10))
    with pytest.raises(ValueError):
        run_walk(config(steps=0))


def test_snapshots_recorded_at_requested_steps():
    s = run_walk(config(steps=8, record_distributions=(0, 3, 8)))
    assert sorted(s.snapshots) == [0, 3, 8]
    assert isinstance(s.snapshots[3], ProbabilityDistributions)
    assert s.snapshots[8].p_total.sum() == pytest.approx(1.0, abs=1e-12)


def test_conventional_identity_coin_is_bell_exact():
    # theta=0, phi=pi/2: the coin is the identity, the two components
    # ride apart forever; entropy locks at ln 2, overlap at 0.
    s = run_walk(config(mode=RandomnessMode.none(0.0), steps=20,
                        record_distributions=(7,)))
    assert np.all(s.entropy[1:] == pytest.approx(LN2, abs=1e-14))
    assert np.all(s.overlap[1:] == 0.0)
    d = s.snapshots[7]
    plus_support = set(d.x[d.p_plus > 1e-15])
    minus_support = set(d.x[d.p_minus > 1e-15])
    assert plus_support == {7, 8}
    assert minus_support == {-8, -7}
    assert d.p_plus[d.p_plus > 0] == pytest.approx([0.25, 0.25])


def test_conventional_swap_coin_alternates():
    # theta=pi/2, phi=pi/2 swaps the components each step: the walk
    # revisits a product state every even step.
    s = run_walk(config(mode=RandomnessMode.none(math.pi / 2), steps=12))
    assert s.entropy[1::2] == pytest.approx([LN2] * 6, abs=1e-13)
    assert s.entropy[0::2] == pytest.approx([0.0] * 7, abs=1e-13)
    assert s.overlap[1::2] == pytest.approx([0.0] * 6, abs=1e-15)
    assert s.overlap[0::2] == pytest.approx([0.125] * 7, abs=1e-14)


@pytest.mark.parametrize("theta", [0.0, 0.4, math.pi / 4, 2.5])
def test_symmetric_walk_never_entangles(theta):
    s = run_walk(config(variant=WalkVariant.SYMMETRIC,
                        mode=RandomnessMode.none(theta), steps=25))
    assert np.max(s.entropy) < 1e-12
    assert np.max(np.abs(s.overlap - 0.125)) < 1e-12


@pytest.mark.parametrize("maker", [RandomnessMode.time_random, RandomnessMode.space_random])
def test_symmetric_walk_immune_to_randomness(maker):
    s = run_walk(config(variant=WalkVariant.SYMMETRIC, n=40, steps=39,
                        mode=maker(0.9, 0.4), seed=Seed(7)))
    assert np.max(s.entropy) < 1e-10
    assert np.max(np.abs(s.overlap - 0.125)) < 1e-12


def test_split_step_swap_coin_pins_minus_component():
    # theta=pi/2, phi=pi/2: |+> races out two sites per step, |-> is
    # trapped at x=+-1; maximally entangled from the first step.
    s = run_walk(config(variant=WalkVariant.SPLIT_STEP, n=30, steps=10,
                        mode=RandomnessMode.none(math.pi / 2),
                        record_distributions=(4,)))
    assert np.all(s.entropy[1:] == pytest.approx(LN2, abs=1e-13))
    d = s.snapshots[4]
    assert set(d.x[d.p_plus > 1e-15]) == {-9, 9}
    assert set(d.x[d.p_minus > 1e-15]) == {-1, 1}


def test_split_step_identity_coin_moves_both_outward():
    s = run_walk(config(variant=WalkVariant.SPLIT_STEP, n=30, steps=10,
                        mode=RandomnessMode.none(0.0),
                        record_distributions=(6,)))
    assert np.max(s.entropy) == 0.0
    d = s.snapshots[6]
    assert set(d.x[d.p_total > 1e-15]) == {-7, 7}
    assert s.variance[10] == pytest.approx(11.0**2, abs=1e-10)


def test_run_walk_deterministic():
    cfg = config(mode=RandomnessMode.time_random(0.8, 0.3), n=40, steps=30)
    a, b = run_walk(cfg), run_walk(cfg)
    assert np.array_equal(a.entropy, b.entropy)
    assert np.array_equal(a.variance, b.variance)


# -- sweeps ----------------------------------------------------------------

def test_sweep_validation():
    base = config()
    with pytest.raises(ValueError):
        sweep_theta(base, [])
    with pytest.raises(ValueError):
        sweep_theta(base, [0.5, 0.4])
    with pytest.raises(ValueError):
        sweep_theta(base, [0.1, 0.2], realizations=0)
    rand = config(mode=RandomnessMode.time_random(0.5, 0.3))
    with pytest.raises(ValueError):
        sweep_theta(rand, [0.1, 0.5])  # below dtheta
    with pytest.raises(ValueError):
        sweep_theta(rand, [0.5, math.pi - 0.1])


def test_sweep_statistics_match_manual_recompute():
    base = config(n=20, steps=19, mode=RandomnessMode.time_random(0.5, 0.2))
    grid = np.array([0.4, 0.9, 1.4])
    res = sweep_theta(base, grid, realizations=3)
    assert res.es_mean.shape == (3,)
    for i in range(3):
        vals = [res.summaries[i][r].es_mean for r in range(3)]
        assert res.es_mean[i] == pytest.approx(np.mean(vals), abs=1e-15)
        assert res.es_std[i] == pytest.approx(np.std(vals, ddof=1), abs=1e-15)


def test_sweep_single_realization_has_zero_std():
    res = sweep_theta(config(n=16, steps=15), np.array([0.3, 0.8]), realizations=1)
    assert np.all(res.es_std == 0.0)
    assert np.all(res.ov_std == 0.0)


def test_sweep_worker_count_invariance():
    base = config(n=16, steps=15, mode=RandomnessMode.space_random(0.7, 0.25))
    grid = np.linspace(0.3, math.pi - 0.3, 5)
    a = sweep_theta(base, grid, realizations=4, workers=1)
    b = sweep_theta(base, grid, realizations=4, workers=2)
    assert np.array_equal(a.es_mean, b.es_mean)
    assert np.array_equal(a.ov_std, b.ov_std)


def test_sweep_matches_direct_runs():
    # grid point i must use the hashed child master and realization index
    from qwalk import split_master

    base = config(n=18, steps=17, mode=RandomnessMode.time_random(0.5, 0.2))
    grid = np.array([0.5, 1.1])
    res = sweep_theta(base, grid, realizations=2)
    direct = run_walk(replace(
        base,
        mode=replace(base.mode, theta0=1.1),
        seed=Seed(split_master(42, 1), 1),
    ))
    summ = steady_state(direct, base.window_fraction)
    assert res.summaries[1][1] == summ


def test_sweep_flags_split_step_random_edges():
    base = config(variant=WalkVariant.SPLIT_STEP, n=20, steps=9,
                  mode=RandomnessMode.time_random(0.5, 0.3))
    lo, hi = 0.3, math.pi - 0.3
    # 40 points: the 15% margin falls at 5.85 grid steps, safely between
    # points (41 points would put it exactly on a point).
    grid = np.linspace(lo, hi, 40)
    res = sweep_theta(base, grid, realizations=1)
    assert res.flagged.sum() == 12
    assert res.flagged[:6].all() and res.flagged[34:].all()
    assert not res.flagged[6:34].any()


def test_no_flags_without_randomness_or_for_other_variants():
    grid = np.linspace(0, math.pi, 9)
    res = sweep_theta(config(variant=WalkVariant.SPLIT_STEP, n=20, steps=9), grid)
    assert not res.flagged.any()
    res = sweep_theta(
        config(mode=RandomnessMode.time_random(0.5, 0.3), n=20, steps=19),
        np.linspace(0.3, math.pi - 0.3, 9),
    )
    assert not res.flagged.any()


# -- fits ------------------------------------------------------------------

def test_growth_exponent_recovers_power_law():
    t = np.arange(0, 200)
    var = 3.0 * np.maximum(t, 1) ** 1.7
    assert fit_growth_exponent(t, var, 0.25) == pytest.approx(1.7, abs=1e-12)


def test_growth_exponent_nan_when_unusable():
    t = np.arange(0, 10)
    assert math.isnan(fit_growth_exponent(t, np.zeros(10), 0.25))


def synthetic_dist(n, profile):
    x = np.concatenate([np.arange(-n, 0), np.arange(1, n + 1)])
    p = profile(np.abs(x).astype(float))
    p /= p.sum()
    return ProbabilityDistributions(x=x, p_plus=p / 2, p_minus=p / 2, p_total=p)


def test_tail_fit_identifies_exponential():
    d = synthetic_dist(120, lambda r: np.exp(-0.2 * r))
    fit = fit_tail(d)
    assert fit.exp_rate == pytest.approx(0.2, abs=1e-6)
    assert fit.exp_r2 > 0.999999
    assert fit.exp_r2 > fit.gauss_r2


def test_tail_fit_identifies_gaussian():
    d = synthetic_dist(120, lambda r: np.exp(-(r**2) / 200.0))
    fit = fit_tail(d)
    assert fit.gauss_r2 > 0.999999
    assert fit.gauss_r2 > fit.exp_r2


def test_tail_fit_needs_enough_points():
    d = synthetic_dist(20, lambda r: np.where(r <= 3, 1.0, 1e-17))
    fit = fit_tail(d)
    assert math.isnan(fit.exp_rate)


# -- localization reports ----------------------------------------------------

def test_localization_report_shapes_and_determinism():
    cfg = config(n=40, steps=30, mode=RandomnessMode.space_random(0.6, 0.3),
                 seed=Seed(5))
    rep = localization_report(cfg, realizations=4)
    assert rep.exponents.shape == (4,)
    assert len(rep.tails) == 4
    assert rep.ensemble_distribution.p_total.sum() == pytest.approx(1.0, abs=1e-12)
    assert len(rep.ensemble_variance) == 31
    rep2 = localization_report(cfg, realizations=4, workers=2)
    assert np.array_equal(rep.exponents, rep2.exponents)
    assert rep.ensemble_exponent == rep2.ensemble_exponent


def test_localization_clean_walk_is_ballistic():
    cfg = config(n=100, steps=99, mode=RandomnessMode.none(math.pi / 6))
    rep = localization_report(cfg, realizations=1)
    assert rep.ensemble_exponent == pytest.approx(2.0, abs=0.3)


def test_resolve_workers_env_cap(monkeypatch):
    monkeypatch.delenv("QWALK_THREADS", raising=False)
    assert resolve_workers(3) == 3
    monkeypatch.setenv("QWALK_THREADS", "2")
    assert resolve_workers(8) == 2
    assert resolve_workers(1) == 1
    assert resolve_workers(None) == 2
