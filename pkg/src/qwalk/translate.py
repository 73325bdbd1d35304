"""Translation operators and one full time step for each walk variant.

Three translations are implemented as block shifts on the storage rows:

* conventional: |+> moves one site right, |-> one site left, with the
  missing x = 0 skipped (succ(-1) = +1, pred(+1) = -1);
* symmetric: both components move outward (x > 0 to x+1, x < 0 to x-1),
  vacating x = +-1;
* one-component: the outward shift applied to a single internal state,
  the building block of the split-step walk.

Amplitude is never silently truncated at the open boundary: if more than
BOUNDARY_TOL of amplitude would leave the lattice, the shift raises
BoundaryBreach.  Within each variant's step limit this cannot happen.
"""

from __future__ import annotations

import enum

import numpy as np

from .coin import apply_coin
from .lattice import InternalState, WalkerState

__all__ = [
    "BOUNDARY_TOL",
    "BoundaryBreach",
    "SimulationError",
    "StepLimitExceeded",
    "WalkVariant",
    "max_steps",
    "step",
    "translate_conventional",
    "translate_one_component",
    "translate_symmetric",
]

BOUNDARY_TOL = 1e-14


class SimulationError(Exception):
    """Base class for walk evolution failures."""


class BoundaryBreach(SimulationError):
    """Nonzero amplitude would be pushed off the open boundary."""


class StepLimitExceeded(SimulationError):
    """Stepping past the variant's safe step count."""


class WalkVariant(enum.Enum):
    CONVENTIONAL = "conventional"
    SYMMETRIC = "symmetric"
    SPLIT_STEP = "split-step"


def max_steps(variant: WalkVariant, n_half: int) -> int:
    """Largest safe step count: the walker can never reach past x = +-N.

    The conventional and symmetric walks move support outward at most one
    site per step (N-1 steps from the +-1 start); the split-step walk
    moves up to two sites per step (N/2 - 1 steps).
    """
    if variant is WalkVariant.SPLIT_STEP:
        return n_half // 2 - 1
    return n_half - 1


def _check_boundary(value: complex, what: str) -> None:
    if abs(value) > BOUNDARY_TOL:
        raise BoundaryBreach(
            f"{what} holds amplitude {abs(value):.3e} > {BOUNDARY_TOL:g}; "
            "the shift would push it off the lattice"
        )


def translate_conventional(state: WalkerState) -> WalkerState:
    """Shift |+> one site rightward and |-> one site leftward.

    Crossing the center gap maps -1 -> +1 for |+> and +1 -> -1 for |->,
    which in storage order is a plain one-slot shift of each row.
    """
    plus, minus = state.amplitudes
    _check_boundary(plus[-1], "site x=+N, state |+>")
    _check_boundary(minus[0], "site x=-N, state |->")
    new = np.zeros_like(state.amplitudes)
    new[0, 1:] = plus[:-1]
    new[1, :-1] = minus[1:]
    return WalkerState(state.lattice, new, state.time)


def _shift_outward(row: np.ndarray, n: int, out: np.ndarray) -> None:
    # x > 0 -> x+1 and x < 0 -> x-1; slots for x = -1, +1 stay vacated.
    out[n + 1:] = row[n:-1]
    out[: n - 1] = row[1:n]


def translate_one_component(state: WalkerState, sigma: InternalState) -> WalkerState:
    """Shift one internal component outward, leaving the other untouched."""
    n = state.lattice.n_half
    row = state.amplitudes[sigma]
    sign = "+" if sigma is InternalState.PLUS else "-"
    _check_boundary(row[0], f"site x=-N, state |{sign}>")
    _check_boundary(row[-1], f"site x=+N, state |{sign}>")
    new = state.amplitudes.copy()
    new[sigma] = 0.0
    _shift_outward(row, n, new[sigma])
    return WalkerState(state.lattice, new, state.time)


def translate_symmetric(state: WalkerState) -> WalkerState:
    """Shift both internal components outward (the coin-blind translation)."""
    n = state.lattice.n_half
    for sigma in InternalState:
        row = state.amplitudes[sigma]
        sign = "+" if sigma is InternalState.PLUS else "-"
        _check_boundary(row[0], f"site x=-N, state |{sign}>")
        _check_boundary(row[-1], f"site x=+N, state |{sign}>")
    new = np.zeros_like(state.amplitudes)
    _shift_outward(state.amplitudes[0], n, new[0])
    _shift_outward(state.amplitudes[1], n, new[1])
    return WalkerState(state.lattice, new, state.time)


def step(state: WalkerState, variant: WalkVariant, field: np.ndarray) -> WalkerState:
    """Advance the walker by one full time step of the given variant.

    Conventional and symmetric steps are translate(coin(state)); the
    split-step walk is coin(shift-|->(coin(shift-|+>(state)))), with the
    same field used for both coin applications.

    Raises
    ------
    StepLimitExceeded
        If state.time is already at the variant's limit.
    BoundaryBreach
        Propagated from the translations.
    """
    limit = max_steps(variant, state.lattice.n_half)
    if state.time >= limit:
        raise StepLimitExceeded(
            f"step {state.time + 1} exceeds the {variant.value} walk limit "
            f"of {limit} steps for n_half={state.lattice.n_half}"
        )
    if variant is WalkVariant.CONVENTIONAL:
        out = translate_conventional(apply_coin(state, field))
    elif variant is WalkVariant.SYMMETRIC:
        out = translate_symmetric(apply_coin(state, field))
    else:
        out = translate_one_component(state, InternalState.PLUS)
        out = apply_coin(out, field)
        out = translate_one_component(out, InternalState.MINUS)
        out = apply_coin(out, field)
    out.time = state.time + 1
    return out
