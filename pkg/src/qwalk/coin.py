"""Coin (internal-state rotation) operators.

The single-site coin is the 2x2 unitary

    C(theta, phi1, phi2) = [[cos(theta),            e^{i phi1} sin(theta)],
                            [e^{i phi2} sin(theta), -e^{i(phi1+phi2)} cos(theta)]]

A coin field assigns one such matrix to every lattice site.  Uniform
fields are broadcast views of a single matrix, so per-site and uniform
coins go through the same apply path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .lattice import WalkerState

__all__ = ["CoinParams", "apply_coin", "build_coin", "uniform_field"]


@dataclass(frozen=True)
class CoinParams:
    """Rotation angle and the two phase angles, all in radians."""

    theta: float
    phi1: float
    phi2: float


def build_coin(params: CoinParams) -> np.ndarray:
    """Return the 2x2 coin unitary for the given angles.

    Angles are not range-reduced; the matrix is periodic in all three.

    Returns
    -------
    numpy.ndarray
        Complex (2, 2) unitary matrix.
    """
    c = math.cos(params.theta)
    s = math.sin(params.theta)
    e1 = cmath.exp(1j * params.phi1)
    e2 = cmath.exp(1j * params.phi2)
    return np.array([[c, e1 * s], [e2 * s, -e1 * e2 * c]], dtype=np.complex128)


def uniform_field(matrix: np.ndarray, site_count: int) -> np.ndarray:
    """Broadcast one coin matrix to a per-site field of shape (sites, 2, 2).

    The result is a zero-copy view; every site shares the same matrix.
    """
    if matrix.shape != (2, 2):
        raise ValueError(f"coin matrix must be 2x2, got {matrix.shape}")
    return np.broadcast_to(matrix, (site_count, 2, 2))


def apply_coin(state: WalkerState, field: np.ndarray) -> WalkerState:
    """Apply a per-site coin field: (c+, c-) <- M(x) (c+, c-) at every x.

    Parameters
    ----------
    state: WalkerState
        Input state; not modified.
    field: numpy.ndarray
        (site_count, 2, 2) array of coin matrices (may be a broadcast view).

    Returns
    -------
    WalkerState
        New state at the same time; norm and per-site total probability
        are preserved.

    Raises
    ------
    ValueError
        If the field does not cover the state's lattice.
    """
    sites = state.lattice.site_count
    if field.shape != (sites, 2, 2):
        raise ValueError(
            f"coin field shape {field.shape} does not match lattice "
            f"({sites} sites)"
        )
    new = np.einsum("xij,jx->ix", field, state.amplitudes)
    return WalkerState(state.lattice, new, state.time)
