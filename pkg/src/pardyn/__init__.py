"""Exact finite models of partial automorphisms twisted by vector bundles."""

__version__ = "0.1.0"

from .breaking import (
    BreakReport,
    VerifyReport,
    break_orbit,
    check_conditions,
    verify_blurbs,
    verify_break_traces,
    verify_minimal_breaks,
    verify_simplicity,
)
from .bundles import (
    CPAlgebra,
    CycleError,
    RelationError,
    Trace,
    bn_fibers,
    build_cp_algebra,
    fixed_point_fibers,
    inner_product,
    left_act,
    measure_from_trace,
    right_act,
    trace_from_measure,
    traces_of_cp,
)
from .dynamics import (
    FiniteSystem,
    OrbitType,
    ValidationError,
    chain_decomposition,
    compute_domains,
    disjoint_union,
    is_free,
    is_minimal,
    minimality_report,
    orbit_decomposition,
    orbit_space,
    restrict_domain,
    restrict_to_invariant,
    system,
)
from .generators import chain, cycle, make, parse_spec, random_system, rotation
from .measures import (
    Measure,
    MeasurePolytope,
    conformal_measure_polytope,
    conformal_sequence,
    invariant_measure_polytope,
    verify_vanishing,
)
from .ranks import RankFunction, as_rank

__all__ = [name for name in dir() if not name.startswith("_")]
