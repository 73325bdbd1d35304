"""Coin schedules: fixed, per-step random, and per-site random angles.

Random modes flip a fair classical coin between the two angles
theta0 + dtheta and theta0 - dtheta.  The time mode flips once per step
and applies the drawn angle lattice-wide; the space mode flips once per
site at t=0 and keeps that assignment for the whole walk.

All draws are made at construction from a counter-style seed tree
(numpy SeedSequence keyed by master seed and realization index), so a
schedule is a pure function of (mode, lattice, max_steps, seed) and
parallel realizations never share a draw stream.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .coin import CoinParams, build_coin, uniform_field
from .lattice import Lattice

__all__ = [
    "CoinSchedule",
    "RandomnessKind",
    "RandomnessMode",
    "Seed",
    "make_schedule",
]

# Salt words keep schedule streams and sweep seed-splitting streams apart.
_SCHEDULE_SALT = 0x5C4ED
_SPLIT_SALT = 0x59717


class RandomnessKind(enum.Enum):
    NONE = "none"
    TIME = "time"
    SPACE = "space"


@dataclass(frozen=True)
class RandomnessMode:
    """Randomness model plus the coin angles shared by every draw."""

    kind: RandomnessKind
    theta0: float
    dtheta: float = 0.0
    phi1: float = math.pi / 2
    phi2: float = math.pi / 2

    def __post_init__(self):
        if self.dtheta < 0:
            raise ValueError(f"dtheta must be >= 0, got {self.dtheta}")

    @classmethod
    def none(cls, theta0, *, phi1=math.pi / 2, phi2=math.pi / 2):
        return cls(RandomnessKind.NONE, theta0, 0.0, phi1, phi2)

    @classmethod
    def time_random(cls, theta0, dtheta, *, phi1=math.pi / 2, phi2=math.pi / 2):
        return cls(RandomnessKind.TIME, theta0, dtheta, phi1, phi2)

    @classmethod
    def space_random(cls, theta0, dtheta, *, phi1=math.pi / 2, phi2=math.pi / 2):
        return cls(RandomnessKind.SPACE, theta0, dtheta, phi1, phi2)

    @property
    def is_random(self) -> bool:
        return self.kind is not RandomnessKind.NONE


@dataclass(frozen=True)
class Seed:
    """Master seed plus realization index; together they fix every draw."""

    master: int
    realization: int = 0


def split_master(master: int, index: int) -> int:
    """Derive a child master seed for one sweep grid point.

    Hash-based on (master, index), so every grid point owns an
    independent stream regardless of how work is scheduled.
    """
    ss = np.random.SeedSequence(master, spawn_key=(_SPLIT_SALT, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: Seed) -> np.random.Generator:
    ss = np.random.SeedSequence(seed.master, spawn_key=(_SCHEDULE_SALT, seed.realization))
    return np.random.default_rng(ss)


class CoinSchedule:
    """Deterministic map (step, site) -> coin parameters, with prebuilt fields."""

    def __init__(self, mode: RandomnessMode, lattice: Lattice, max_steps: int, seed: Seed):
        if max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {max_steps}")
        self.mode = mode
        self.lattice = lattice
        self.max_steps = max_steps
        self.seed = seed

        sites = lattice.site_count
        hi = mode.theta0 + mode.dtheta
        lo = mode.theta0 - mode.dtheta
        if mode.kind is RandomnessKind.NONE:
            self.theta_by_step = None
            self.theta_by_site = None
            self._field = uniform_field(
                build_coin(CoinParams(mode.theta0, mode.phi1, mode.phi2)), sites
            )
        elif mode.kind is RandomnessKind.TIME:
            bits = _rng(seed).integers(0, 2, size=max_steps)
            self.theta_by_step = np.where(bits == 1, hi, lo)
            self.theta_by_site = None
            self._fields = [
                uniform_field(build_coin(CoinParams(hi, mode.phi1, mode.phi2)), sites),
                uniform_field(build_coin(CoinParams(lo, mode.phi1, mode.phi2)), sites),
            ]
            self._pick = np.where(bits == 1, 0, 1)
        else:
            bits = _rng(seed).integers(0, 2, size=sites)
            self.theta_by_step = None
            self.theta_by_site = np.where(bits == 1, hi, lo)
            m_hi = build_coin(CoinParams(hi, mode.phi1, mode.phi2))
            m_lo = build_coin(CoinParams(lo, mode.phi1, mode.phi2))
            self._field = np.where((bits == 1)[:, None, None], m_hi, m_lo)

    def _check_step(self, t: int) -> None:
        if not 0 <= t < self.max_steps:
            raise ValueError(f"step {t} outside schedule range [0, {self.max_steps})")

    def theta_at(self, t: int, x: int) -> float:
        self._check_step(t)
        if self.theta_by_step is not None:
            return float(self.theta_by_step[t])
        if self.theta_by_site is not None:
            return float(self.theta_by_site[self.lattice.index(x)])
        return self.mode.theta0

    def params_at(self, t: int, x: int) -> CoinParams:
        """Coin parameters used at step t on site x."""
        return CoinParams(self.theta_at(t, x), self.mode.phi1, self.mode.phi2)

    def field_at_step(self, t: int) -> np.ndarray:
        """Per-site coin field for step t, shape (site_count, 2, 2)."""
        self._check_step(t)
        if self.mode.kind is RandomnessKind.TIME:
            return self._fields[self._pick[t]]
        return self._field


def make_schedule(
    mode: RandomnessMode, lattice: Lattice, max_steps: int, seed: Seed
) -> CoinSchedule:
    """Build the coin schedule for one walk realization."""
    return CoinSchedule(mode, lattice, max_steps, seed)
