"""Matrix cocycles over symbolic hyperbolic dynamics.

Shift spaces on eventually periodic sequences, finite-window matrix cocycles,
invariant holonomies with certified truncation, and reconstruction of the
conjugacy between cocycles with conjugated periodic data.
"""

from cocycle_rigidity.symbolic import (
    AdmissibilityError,
    Agreement,
    EnumerationCapError,
    Point,
    ShiftSpace,
    agreement_range,
)
from cocycle_rigidity.cocycles import (
    BunchingReport,
    Cocycle,
    LyapunovPair,
    WindowGenerator,
    load_generator,
    operator_norm,
    save_generator,
    stable_norm_product_check,
)
from cocycle_rigidity.holonomy import (
    ConvergenceError,
    HolonomyConstants,
    HolonomyResult,
    NotBunchedError,
    holonomy_constants,
    holonomy_identity_residuals,
    stable_holonomy,
    stable_holonomy_exact,
    unstable_holonomy,
    unstable_holonomy_exact,
)
from cocycle_rigidity.rigidity import (
    ConjugacyEvaluator,
    PeriodicDataReport,
    PremiseError,
    ReducedConjugacy,
    bezout_minimal,
    closed_orbit_identity,
    combine_coprime,
    lipschitz_estimate,
    periodic_data_check,
    reduce_to_fixed_point,
    synthesize_cohomologous,
    verify_cohomology,
)
from cocycle_rigidity.scenario import Scenario

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "Agreement",
    "BunchingReport",
    "Cocycle",
    "ConjugacyEvaluator",
    "ConvergenceError",
    "EnumerationCapError",
    "HolonomyConstants",
    "HolonomyResult",
    "LyapunovPair",
    "NotBunchedError",
    "PeriodicDataReport",
    "Point",
    "PremiseError",
    "ReducedConjugacy",
    "Scenario",
    "ShiftSpace",
    "WindowGenerator",
    "agreement_range",
    "bezout_minimal",
    "closed_orbit_identity",
    "combine_coprime",
    "holonomy_constants",
    "holonomy_identity_residuals",
    "lipschitz_estimate",
    "load_generator",
    "operator_norm",
    "periodic_data_check",
    "reduce_to_fixed_point",
    "save_generator",
    "stable_holonomy",
    "stable_holonomy_exact",
    "stable_norm_product_check",
    "synthesize_cohomologous",
    "unstable_holonomy",
    "unstable_holonomy_exact",
    "verify_cohomology",
]
