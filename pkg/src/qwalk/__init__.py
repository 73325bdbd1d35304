"""Discrete-time quantum walks on a finite line with coin-position
entanglement diagnostics.

Three walk variants (conventional, symmetric, split-step), optional
classical randomness in the coin angle (per step or per site), and the
observables needed to study the steady state: entanglement entropy of
the internal qubit, the distribution overlap, populations, and position
variance.  A sweep engine runs theta grids over realization ensembles
deterministically, and the qwalk CLI serializes everything to CSV with
reproducible manifests.
"""

from .coin import CoinParams, apply_coin, build_coin, uniform_field
from .engine import (
    LocalizationReport,
    SweepResult,
    TailFit,
    WalkConfig,
    fit_growth_exponent,
    fit_tail,
    localization_report,
    resolve_workers,
    run_walk,
    sweep_theta,
)
from .lattice import (
    InternalState,
    Lattice,
    WalkerState,
    initial_state,
    make_lattice,
    norm,
)
from .observables import (
    ObservableSeries,
    ProbabilityDistributions,
    ReducedDensity,
    SteadyStateSummary,
    distributions,
    entanglement_entropy,
    overlap,
    position_variance,
    reduced_density,
    steady_state,
)
from .randomness import (
    CoinSchedule,
    RandomnessKind,
    RandomnessMode,
    Seed,
    make_schedule,
    split_master,
)
from .translate import (
    BoundaryBreach,
    SimulationError,
    StepLimitExceeded,
    WalkVariant,
    max_steps,
    step,
    translate_conventional,
    translate_one_component,
    translate_symmetric,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryBreach",
    "CoinParams",
    "CoinSchedule",
    "InternalState",
    "Lattice",
    "LocalizationReport",
    "ObservableSeries",
    "ProbabilityDistributions",
    "RandomnessKind",
    "RandomnessMode",
    "ReducedDensity",
    "Seed",
    "SimulationError",
    "StepLimitExceeded",
    "SteadyStateSummary",
    "SweepResult",
    "TailFit",
    "WalkConfig",
    "WalkVariant",
    "WalkerState",
    "apply_coin",
    "build_coin",
    "distributions",
    "entanglement_entropy",
    "fit_growth_exponent",
    "fit_tail",
    "initial_state",
    "localization_report",
    "make_lattice",
    "make_schedule",
    "max_steps",
    "norm",
    "overlap",
    "position_variance",
    "reduced_density",
    "resolve_workers",
    "run_walk",
    "split_master",
    "steady_state",
    "step",
    "sweep_theta",
    "translate_conventional",
    "translate_one_component",
    "translate_symmetric",
    "uniform_field",
    "__version__",
]
