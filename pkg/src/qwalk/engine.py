"""Walk driver, theta sweeps over realization ensembles, localization fits.

A sweep distributes independent (theta, realization) walks over a process
pool.  Every walk is seeded by hashing (master seed, theta index) into a
child master and carrying the realization index, so results depend only
on the configuration, never on the worker count or completion order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .lattice import WalkerState, initial_state, make_lattice
from .observables import (
    ObservableSeries,
    ProbabilityDistributions,
    SteadyStateSummary,
    _entropy_of_pair,
    _eigenvalues_2x2,
    distributions,
    steady_state,
)
from .randomness import RandomnessMode, Seed, make_schedule, split_master
from .translate import StepLimitExceeded, WalkVariant, max_steps, step

__all__ = [
    "LocalizationReport",
    "SweepResult",
    "TailFit",
    "WalkConfig",
    "localization_report",
    "resolve_workers",
    "run_walk",
    "sweep_theta",
]

# Split-step sweeps under randomness are flagged (not dropped) within this
# fraction of the admissible theta span from either end, where the walk
# need not be fully localized.
FLAG_FRACTION = 0.15

_TAIL_FLOOR = 1e-12
_TAIL_REL_FLOOR = 1e-6
_TAIL_MIN_POINTS = 8


@dataclass(frozen=True)
class WalkConfig:
    """Everything one walk needs: variant, sizes, coin model, seed, window."""

    variant: WalkVariant
    n_half: int
    steps: int
    mode: RandomnessMode
    seed: Seed
    window_fraction: float = 0.25
    record_distributions: tuple[int, ...] = ()

    @property
    def phi1(self) -> float:
        return self.mode.phi1

    @property
    def phi2(self) -> float:
        return self.mode.phi2


@dataclass
class SweepResult:
    """Steady-state entropy and overlap statistics over a theta grid."""

    thetas: np.ndarray
    realizations: int
    summaries: list[list[SteadyStateSummary]]
    es_mean: np.ndarray
    es_std: np.ndarray
    ov_mean: np.ndarray
    ov_std: np.ndarray
    flagged: np.ndarray


@dataclass(frozen=True)
class TailFit:
    """Least-squares tail shape of a folded distribution q(r), r = |x|."""

    exp_rate: float
    exp_r2: float
    gauss_r2: float
    r_lo: int
    r_hi: int
    n_points: int


@dataclass
class LocalizationReport:
    """Variance-growth exponents and tail fits, per realization and ensemble."""

    realizations: int
    exponents: np.ndarray
    tails: list[TailFit]
    ensemble_exponent: float
    ensemble_tail: TailFit
    ensemble_distribution: ProbabilityDistributions
    time: np.ndarray
    ensemble_variance: np.ndarray


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, capped by QWALK_THREADS if set."""
    cap = os.environ.get("QWALK_THREADS")
    cap = int(cap) if cap else None
    if workers is None:
        workers = cap if cap is not None else (os.cpu_count() or 1)
    if cap is not None:
        workers = min(workers, cap)
    return max(1, workers)


def run_walk(config: WalkConfig) -> ObservableSeries:
    """Evolve one walk and record observables at every step (t = 0 included).

    Deterministic given (config, seed).  Raises StepLimitExceeded when
    config.steps exceeds the variant's limit, before any work is done.
    """
    lattice = make_lattice(config.n_half)
    limit = max_steps(config.variant, config.n_half)
    if config.steps < 1:
        raise ValueError(f"steps must be >= 1, got {config.steps}")
    if config.steps > limit:
        raise StepLimitExceeded(
            f"{config.steps} steps exceed the {config.variant.value} walk "
            f"limit of {limit} for n_half={config.n_half}"
        )
    schedule = make_schedule(config.mode, lattice, config.steps, config.seed)
    coords = lattice.coordinates.astype(np.float64)
    coords_sq = coords * coords

    n_rec = config.steps + 1
    es = np.empty(n_rec)
    ov = np.empty(n_rec)
    pop_p = np.empty(n_rec)
    pop_m = np.empty(n_rec)
    var = np.empty(n_rec)
    snapshots: dict[int, ProbabilityDistributions] = {}
    wanted = set(config.record_distributions)

    state = initial_state(lattice)

    def record(t: int, s: WalkerState) -> None:
        plus, minus = s.amplitudes
        pp = np.abs(plus) ** 2
        pm = np.abs(minus) ** 2
        pop_p[t] = pp.sum()
        pop_m[t] = pm.sum()
        ov[t] = np.dot(pp, pm)
        es[t] = _entropy_of_pair(
            _eigenvalues_2x2(pop_p[t], pop_m[t], complex(np.vdot(minus, plus)))
        )
        ptot = pp + pm
        mean = np.dot(ptot, coords)
        var[t] = np.dot(ptot, coords_sq) - mean * mean
        if t in wanted:
            snapshots[t] = distributions(s)

    record(0, state)
    for t in range(config.steps):
        state = step(state, config.variant, schedule.field_at_step(t))
        record(t + 1, state)

    return ObservableSeries(
        time=np.arange(n_rec),
        entropy=es,
        overlap=ov,
        pop_plus=pop_p,
        pop_minus=pop_m,
        variance=var,
        snapshots=snapshots,
    )


def _config_for(base: WalkConfig, theta: float, theta_index: int, realization: int) -> WalkConfig:
    child = Seed(split_master(base.seed.master, theta_index), realization)
    return replace(base, mode=replace(base.mode, theta0=theta), seed=child)


def _sweep_task(args: tuple[int, int, WalkConfig]) -> tuple[int, int, SteadyStateSummary]:
    i, r, config = args
    summary = steady_state(run_walk(config), config.window_fraction)
    return i, r, summary


def _run_tasks(tasks, fn, workers):
    if workers <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _admissible_range(mode: RandomnessMode) -> tuple[float, float]:
    if mode.is_random:
        return mode.dtheta, math.pi - mode.dtheta
    return 0.0, math.pi


def sweep_theta(
    base: WalkConfig,
    grid,
    realizations: int = 1,
    workers: int | None = None,
) -> SweepResult:
    """Run the walk over a theta grid and realization ensemble.

    Ensemble statistics are the mean and sample standard deviation of the
    per-realization steady-state values at each grid point.  Output is
    independent of the worker count.
    """
    thetas = np.asarray(grid, dtype=np.float64)
    if thetas.ndim != 1 or len(thetas) < 1:
        raise ValueError("theta grid must be a nonempty 1D sequence")
    if np.any(np.diff(thetas) <= 0):
        raise ValueError("theta grid must be strictly increasing")
    if realizations < 1:
        raise ValueError(f"realizations must be >= 1, got {realizations}")
    if base.mode.is_random:
        lo, hi = _admissible_range(base.mode)
        if thetas[0] < lo - 1e-12 or thetas[-1] > hi + 1e-12:
            raise ValueError(
                f"grid [{thetas[0]:g}, {thetas[-1]:g}] outside the admissible "
                f"range [{lo:g}, {hi:g}] for dtheta={base.mode.dtheta:g}"
            )

    tasks = [
        (i, r, _config_for(base, float(thetas[i]), i, r))
        for i in range(len(thetas))
        for r in range(realizations)
    ]
    results = _run_tasks(tasks, _sweep_task, resolve_workers(workers))

    summaries: list[list[SteadyStateSummary]] = [
        [None] * realizations for _ in thetas  # type: ignore[list-item]
    ]
    for i, r, summary in results:
        summaries[i][r] = summary

    ddof = 1 if realizations > 1 else 0
    es_vals = np.array([[s.es_mean for s in row] for row in summaries])
    ov_vals = np.array([[s.ov_mean for s in row] for row in summaries])
    return SweepResult(
        thetas=thetas,
        realizations=realizations,
        summaries=summaries,
        es_mean=es_vals.mean(axis=1),
        es_std=es_vals.std(axis=1, ddof=ddof),
        ov_mean=ov_vals.mean(axis=1),
        ov_std=ov_vals.std(axis=1, ddof=ddof),
        flagged=_flag_rows(base, thetas),
    )


def _flag_rows(base: WalkConfig, thetas: np.ndarray) -> np.ndarray:
    flagged = np.zeros(len(thetas), dtype=bool)
    if base.variant is WalkVariant.SPLIT_STEP and base.mode.is_random:
        lo, hi = _admissible_range(base.mode)
        margin = FLAG_FRACTION * (hi - lo)
        flagged = (thetas - lo < margin) | (hi - thetas < margin)
    return flagged


def fit_growth_exponent(time: np.ndarray, variance: np.ndarray, window_fraction: float) -> float:
    """Slope of ln(variance) vs ln(t) over the trailing window.

    Entries with t < 1 or nonpositive variance are skipped; returns nan
    if fewer than two usable points remain.
    """
    n = len(time)
    win = math.ceil(window_fraction * n)
    t = np.asarray(time[n - win:], dtype=np.float64)
    v = np.asarray(variance[n - win:], dtype=np.float64)
    ok = (t >= 1) & (v > 0)
    if ok.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(t[ok]), np.log(v[ok]), 1)
    return float(slope)


def _linfit_r2(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else float("nan")
    return float(slope), r2


def fit_tail(dist: ProbabilityDistributions) -> TailFit:
    """Fit the folded distribution q(r) = P(r) + P(-r) from its peak outward.

    Compares an exponential profile (ln q linear in r) against a Gaussian
    one (ln q linear in r^2) by the r^2 statistic of each regression.
    Points below 1e-6 of the peak are excluded so the fit measures the
    established envelope, not the causal cutoff at the ballistic front.
    """
    n = len(dist.x) // 2
    # storage order puts -r at index n-r and +r at index n+r-1
    q = dist.p_total[n:] + dist.p_total[n - 1:: -1]
    r = np.arange(1, n + 1, dtype=np.float64)
    peak = int(np.argmax(q))
    floor = max(q[peak] * _TAIL_REL_FLOOR, _TAIL_FLOOR)
    sel = (np.arange(n) >= peak) & (q > floor)
    if sel.sum() < _TAIL_MIN_POINTS:
        nan = float("nan")
        return TailFit(nan, nan, nan, peak + 1, peak + 1, int(sel.sum()))
    rr = r[sel]
    lnq = np.log(q[sel])
    exp_slope, exp_r2 = _linfit_r2(rr, lnq)
    _, gauss_r2 = _linfit_r2(rr * rr, lnq)
    return TailFit(
        exp_rate=-exp_slope,
        exp_r2=exp_r2,
        gauss_r2=gauss_r2,
        r_lo=int(rr[0]),
        r_hi=int(rr[-1]),
        n_points=int(sel.sum()),
    )


def _localization_task(args: tuple[int, WalkConfig]) -> tuple[int, ObservableSeries]:
    r, config = args
    return r, run_walk(config)


def localization_report(
    config: WalkConfig,
    realizations: int = 100,
    workers: int | None = None,
) -> LocalizationReport:
    """Variance-growth exponent and tail shape over a realization ensemble.

    Each realization r runs with seed (master, r).  The ensemble exponent
    is fit on the realization-averaged variance curve; the ensemble tail
    on the realization-averaged final distribution.
    """
    if realizations < 1:
        raise ValueError(f"realizations must be >= 1, got {realizations}")
    final = config.steps
    tasks = [
        (
            r,
            replace(
                config,
                seed=Seed(config.seed.master, r),
                record_distributions=(final,),
            ),
        )
        for r in range(realizations)
    ]
    results = _run_tasks(tasks, _localization_task, resolve_workers(workers))
    series_by_r: list[ObservableSeries] = [None] * realizations  # type: ignore[list-item]
    for r, series in results:
        series_by_r[r] = series

    time = series_by_r[0].time
    variances = np.stack([s.variance for s in series_by_r])
    wf = config.window_fraction
    exponents = np.array(
        [fit_growth_exponent(time, v, wf) for v in variances]
    )
    tails = [fit_tail(s.snapshots[final]) for s in series_by_r]

    mean_var = variances.mean(axis=0)
    dist0 = series_by_r[0].snapshots[final]
    mean_dist = ProbabilityDistributions(
        x=dist0.x,
        p_plus=np.mean([s.snapshots[final].p_plus for s in series_by_r], axis=0),
        p_minus=np.mean([s.snapshots[final].p_minus for s in series_by_r], axis=0),
        p_total=np.mean([s.snapshots[final].p_total for s in series_by_r], axis=0),
    )
    return LocalizationReport(
        realizations=realizations,
        exponents=exponents,
        tails=tails,
        ensemble_exponent=fit_growth_exponent(time, mean_var, wf),
        ensemble_tail=fit_tail(mean_dist),
        ensemble_distribution=mean_dist,
        time=time,
        ensemble_variance=mean_var,
    )
