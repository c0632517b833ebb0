"""Finite resource theories of knowledge, checked exhaustively."""

from .errors import (
    BadProbability,
    CapExceeded,
    DimMismatch,
    DuplicateName,
    EmptyIntersection,
    EmptySpecification,
    Incompatible,
    IncompatibleSideResource,
    IncompatibleW,
    InternalInconsistency,
    LengthMismatch,
    LumpingOrderViolated,
    NoChainsDeclared,
    NotComplete,
    NotEndomorphism,
    NotInJoin,
    NotInMonoid,
    NotIndependent,
    NotIsomorphism,
    NotOrderEmbedding,
    NotSubmonoid,
    NotSubtheory,
    ParseError,
    RtkError,
    SpaceMismatch,
    TooLarge,
    UnknownIndex,
    UnknownReference,
    UnknownState,
)
from .spec_core import (
    SpecMap,
    Specification,
    StateSpace,
    apply,
    apply_mask,
    bits,
    combine,
    compose,
    constant_map,
    endo_map,
    forget,
    full_spec,
    identity_map,
    is_endo,
    is_inflating,
    make_map,
    make_spec,
    maps_equal,
    space,
)
from .theory import (
    DEFAULT_CAP,
    Quotient,
    ReachWitness,
    ResourceTheory,
    TransformationMonoid,
    close_monoid,
    combine_theories,
    is_conserved,
    is_free,
    monoid_from_elements,
    quotient,
    reaches,
    resource_independent_maps,
)
from .embed import (
    Decomposition,
    Embedding,
    GaloisInsertion,
    GeneratedLumping,
    InsertionReport,
    Lumping,
    LumpingReport,
    as_lumping,
    classify_embedding,
    decompose_embedding,
    effective_theory,
    identity_insertion,
    insertion_from_lumping,
    intensive_adjoint,
    is_local,
    lumping_from_maps,
    nest,
    restrict_theory,
    verify_insertion,
    verify_lumping,
)
from .locality import (
    AgentsReport,
    CompatibilityReport,
    CompleteLattice,
    ProcessingReport,
    Subsystem,
    SwapReport,
    are_independent,
    as_subsystem,
    bicommutant,
    centre,
    check_agents_theorem,
    check_compatibility,
    check_freely_composable,
    check_independent_processing,
    commutant,
    commutes,
    copy_spec,
    derive_agents,
    enumerate_complete,
    generated_lumping,
    inherited_subsystems,
    is_centreless,
    is_complete,
    is_submonoid,
    join,
    meet,
    n_copies,
    verify_swap,
)
from .approx import (
    ApproxIndex,
    ApproximationStructure,
    ChainAddition,
    ReducedStructure,
    StructureReport,
    TriangleReport,
    approx_index,
    approximate,
    approximation_space,
    check_triangle,
    is_robust,
    is_stable,
    reduce_structure,
    verify_structure,
)
from .convex import (
    AffineMap,
    ConvexityReport,
    Distribution,
    DoublyConvexReport,
    Point,
    PointSpec,
    affine_map,
    apply_spec,
    as_point,
    check_convexity_preserving,
    check_doubly_convex,
    compose_affine,
    constant_affine,
    direct_mixture,
    distribution,
    extreme_points,
    format_point,
    format_points,
    hull_contains,
    identity_affine,
    mix,
    mix_maps,
    mix_specs,
    nested_mixture,
    parse_points,
    point_spec,
    prob_equivalent,
)
from .oracle import oracle_commutant, oracle_hull_contains, oracle_reaches
from .cli import TheoryFile, export_dot, format_model, parse_theory, run_command

__all__ = [name for name in dir() if not name.startswith("_")]
