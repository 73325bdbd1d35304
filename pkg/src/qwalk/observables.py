"""Per-step physical quantities of a walker state.

Covers the probability distributions of the two internal states, their
overlap, the 2x2 reduced density matrix of the internal space (traced
over position, accumulated directly from amplitudes), the von Neumann
entanglement entropy in base e, the position variance, and late-window
steady-state averages of entropy and overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import WalkerState, norm

__all__ = [
    "ObservableSeries",
    "ProbabilityDistributions",
    "ReducedDensity",
    "SteadyStateSummary",
    "distributions",
    "entanglement_entropy",
    "overlap",
    "position_variance",
    "reduced_density",
    "steady_state",
]

# Eigenvalues this close to 0 or 1 are clamped before taking logs.
_EIG_CLAMP = 1e-12


@dataclass
class ProbabilityDistributions:
    """Site-resolved probabilities of the internal states and their sum."""

    x: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    p_total: np.ndarray


@dataclass(frozen=True)
class ReducedDensity:
    """2x2 Hermitian reduced density matrix of the internal space."""

    matrix: np.ndarray
    eigenvalues: tuple[float, float]


@dataclass
class ObservableSeries:
    """Per-step records of one walk, indexed by time 0..steps."""

    time: np.ndarray
    entropy: np.ndarray
    overlap: np.ndarray
    pop_plus: np.ndarray
    pop_minus: np.ndarray
    variance: np.ndarray
    snapshots: dict[int, ProbabilityDistributions] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.time)


@dataclass(frozen=True)
class SteadyStateSummary:
    """Late-window means and standard deviations of entropy and overlap."""

    es_mean: float
    es_std: float
    ov_mean: float
    ov_std: float
    window_start: int
    window_len: int


def distributions(state: WalkerState) -> ProbabilityDistributions:
    """Squared magnitudes of the amplitudes, per site and internal state."""
    p = np.abs(state.amplitudes) ** 2
    return ProbabilityDistributions(
        x=state.lattice.coordinates,
        p_plus=p[0],
        p_minus=p[1],
        p_total=p[0] + p[1],
    )


def overlap(state: WalkerState) -> float:
    """Sum over sites of P_plus(x) * P_minus(x)."""
    p = np.abs(state.amplitudes) ** 2
    return float(np.dot(p[0], p[1]))


def _eigenvalues_2x2(rho00: float, rho11: float, rho01: complex) -> tuple[float, float]:
    # Closed form for a Hermitian 2x2 with trace rho00 + rho11.
    mid = 0.5 * (rho00 + rho11)
    d = math.sqrt(0.25 * (rho00 - rho11) ** 2 + abs(rho01) ** 2)
    return mid + d, mid - d


def reduced_density(state: WalkerState) -> ReducedDensity:
    """Trace out position: rho[s,s'] = sum_x c_{x,s} conj(c_{x,s'}).

    The full position-space density matrix is never formed; the 2x2
    result is accumulated in one pass over the amplitudes.

    Raises
    ------
    ValueError
        If the state norm deviates from 1 by more than 1e-10.
    """
    total = norm(state)
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"state norm {total!r} is not 1 within 1e-10")
    plus, minus = state.amplitudes
    rho00 = float(np.real(np.vdot(plus, plus)))
    rho11 = float(np.real(np.vdot(minus, minus)))
    rho01 = complex(np.vdot(minus, plus))
    matrix = np.array([[rho00, rho01], [np.conj(rho01), rho11]], dtype=np.complex128)
    return ReducedDensity(matrix, _eigenvalues_2x2(rho00, rho11, rho01))


def _entropy_of_pair(eigenvalues: tuple[float, float]) -> float:
    s = 0.0
    for lam in eigenvalues:
        lam = min(max(lam, 0.0), 1.0) if -_EIG_CLAMP <= lam <= 1.0 + _EIG_CLAMP else lam
        if lam < 0.0 or lam > 1.0:
            raise ValueError(f"eigenvalue {lam!r} outside [0, 1] beyond tolerance")
        if lam > 0.0:
            s -= lam * math.log(lam)
    return s


def entanglement_entropy(rho: ReducedDensity) -> float:
    """Von Neumann entropy -sum lam ln(lam) in base e, with 0 ln 0 = 0.

    Eigenvalues within 1e-12 of the [0, 1] interval are clamped onto it
    before the log; the result lies in [0, ln 2].
    """
    return _entropy_of_pair(rho.eigenvalues)


def position_variance(dist: ProbabilityDistributions) -> float:
    """Variance of the position under the total distribution."""
    x = dist.x.astype(np.float64)
    mean = float(np.dot(dist.p_total, x))
    mean_sq = float(np.dot(dist.p_total, x * x))
    return mean_sq - mean * mean


def steady_state(series: ObservableSeries, window_fraction: float) -> SteadyStateSummary:
    """Average entropy and overlap over the trailing window of a series.

    The window is the final ceil(window_fraction * len(series)) records;
    standard deviations are across the window (population form).
    """
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError(f"window_fraction must be in (0, 1], got {window_fraction}")
    length = len(series)
    if length < 4:
        raise ValueError(f"series too short for a steady-state window ({length} < 4)")
    win = math.ceil(window_fraction * length)
    if win < 1:
        raise ValueError("empty steady-state window")
    start = length - win
    es = series.entropy[start:]
    ov = series.overlap[start:]
    return SteadyStateSummary(
        es_mean=float(np.mean(es)),
        es_std=float(np.std(es)),
        ov_mean=float(np.mean(ov)),
        ov_std=float(np.std(ov)),
        window_start=int(series.time[start]),
        window_len=win,
    )
