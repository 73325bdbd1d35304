"""Even-site lattice, walker state, and the symmetric initial condition.

The lattice has 2N sites at coordinates x = -N..-1, 1..N with no site at
x = 0.  Storage is one contiguous complex row per internal state, so a
walker state is a (2, 2N) complex array: row 0 holds the |+> amplitudes,
row 1 the |-> amplitudes, both ordered by increasing x.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "InternalState",
    "Lattice",
    "WalkerState",
    "initial_state",
    "make_lattice",
    "norm",
]


class InternalState(enum.IntEnum):
    """The two internal (coin) states; the value is the storage row."""

    PLUS = 0
    MINUS = 1


@dataclass(frozen=True)
class Lattice:
    """1D lattice of 2*n_half sites with the center x=0 excised.

    Coordinates run -n_half..-1, 1..n_half; index(x) maps them monotonically
    onto storage slots 0..2*n_half-1.
    """

    n_half: int

    def __post_init__(self):
        if self.n_half < 2:
            raise ValueError(f"n_half must be >= 2, got {self.n_half}")

    @property
    def site_count(self) -> int:
        return 2 * self.n_half

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Site coordinates in storage order (skips 0)."""
        n = self.n_half
        return np.concatenate([np.arange(-n, 0), np.arange(1, n + 1)])

    def index(self, x: int) -> int:
        """Storage index of coordinate x.

        Raises
        ------
        ValueError
            If x is 0 or outside [-n_half, n_half].
        """
        n = self.n_half
        if x == 0 or not -n <= x <= n:
            raise ValueError(f"coordinate {x} is not on the lattice (n_half={n})")
        return x + n if x < 0 else x + n - 1

    def coordinate(self, i: int) -> int:
        """Coordinate stored at index i (inverse of index)."""
        n = self.n_half
        if not 0 <= i < 2 * n:
            raise ValueError(f"index {i} out of range for {2 * n} sites")
        return i - n if i < n else i - n + 1


@dataclass
class WalkerState:
    """Walker wavefunction: amplitudes[sigma, site] plus a step counter."""

    lattice: Lattice
    amplitudes: np.ndarray
    time: int = 0

    def __post_init__(self):
        expected = (2, self.lattice.site_count)
        if self.amplitudes.shape != expected:
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} != {expected}"
            )

    def copy(self) -> "WalkerState":
        return WalkerState(self.lattice, self.amplitudes.copy(), self.time)


def make_lattice(n_half: int) -> Lattice:
    """Build the 2*n_half-site lattice; rejects n_half < 2."""
    return Lattice(int(n_half))


def initial_state(lattice: Lattice) -> WalkerState:
    """Equal superposition of |x,sigma> over x = +-1, sigma = +-.

    All four occupied amplitudes are 1/2, so the state is normalized.
    """
    amp = np.zeros((2, lattice.site_count), dtype=np.complex128)
    for x in (-1, 1):
        amp[:, lattice.index(x)] = 0.5
    return WalkerState(lattice, amp, time=0)


def norm(state: WalkerState) -> float:
    """Total probability sum |c_{x,sigma}|^2."""
    a = state.amplitudes
    return float(np.real(np.vdot(a, a)))
