"""lorenzlab: contracting Lorenz maps of the interval.

Represents two-branch increasing interval maps with one break point,
computes first-return maps, nice and renormalization intervals, avoiding
sets and their gaps, trapping regions, non-wandering strata, and classifies
the topological attractor. Every qualitative claim is a budgeted numerical
probe; reports carry their budgets.
"""

__version__ = "0.1.0"

from .map_core import (
    BranchSpec,
    DirectedPoint,
    LorenzMapSpec,
    Side,
    UnimodalSpec,
    ValidationReport,
    builtin_map,
    critical_values,
    derivative,
    embed_unimodal,
    evaluate,
    load_map,
    logistic,
    preimages,
    quadratic_pair,
    schwarzian,
    validate_map,
)
from .orbits import (
    Itinerary,
    LimitSetEstimate,
    OrbitSegment,
    estimate_alpha_limit,
    estimate_omega_limit,
    iterate_orbit,
    itinerary,
    lyapunov,
    rotation_number,
)
from .periodic import (
    Lap,
    PeriodicOrbitRecord,
    count_nonrepelling,
    find_periodic_points,
    laps,
    minimal_period_orbit_in,
)
from .renorm import (
    DegenerateRecord,
    NestedSequence,
    RenormalizationRecord,
    detect_degenerate,
    find_renormalizations,
    is_renormalization,
    renormalization_cycle,
    trapping_region,
)
from .return_maps import (
    GapRecord,
    NiceInterval,
    PhobicEstimate,
    ReturnMapBranch,
    ReturnMapRec,
    first_return_map,
    gaps,
    is_nice,
    mane_expansion_check,
    order,
    phobic_measure,
    root_interval,
)
from .spectral import (
    AttractorClass,
    Budgets,
    DecompositionRecord,
    Stratum,
    classify_attractor,
    decompose,
    entropy_estimate,
    omega0,
    stratum_blocks,
)

__all__ = [
    "BranchSpec",
    "DirectedPoint",
    "LorenzMapSpec",
    "Side",
    "UnimodalSpec",
    "ValidationReport",
    "builtin_map",
    "critical_values",
    "derivative",
    "embed_unimodal",
    "evaluate",
    "load_map",
    "logistic",
    "preimages",
    "quadratic_pair",
    "schwarzian",
    "validate_map",
    "Itinerary",
    "LimitSetEstimate",
    "OrbitSegment",
    "estimate_alpha_limit",
    "estimate_omega_limit",
    "iterate_orbit",
    "itinerary",
    "lyapunov",
    "rotation_number",
    "Lap",
    "PeriodicOrbitRecord",
    "count_nonrepelling",
    "find_periodic_points",
    "laps",
    "minimal_period_orbit_in",
    "DegenerateRecord",
    "NestedSequence",
    "RenormalizationRecord",
    "detect_degenerate",
    "find_renormalizations",
    "is_renormalization",
    "renormalization_cycle",
    "trapping_region",
    "GapRecord",
    "NiceInterval",
    "PhobicEstimate",
    "ReturnMapBranch",
    "ReturnMapRec",
    "first_return_map",
    "gaps",
    "is_nice",
    "mane_expansion_check",
    "order",
    "phobic_measure",
    "root_interval",
    "AttractorClass",
    "Budgets",
    "DecompositionRecord",
    "Stratum",
    "classify_attractor",
    "decompose",
    "entropy_estimate",
    "omega0",
    "stratum_blocks",
]
