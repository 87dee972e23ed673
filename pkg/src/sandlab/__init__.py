"""One-dimensional pile dynamics: parallel rules, sequential rewrite digraphs,
closed-form predictions, and counterexample searches."""

from .pile import (
    Configuration,
    HeightProfile,
    LatticeWindow,
    MultipleOrigins,
    NegativeValue,
    ParseError,
    height_profile,
    is_fp_stable,
    is_gk_stable,
    is_perfect_support,
    normalize,
    parse_height_literal,
    parse_literal,
    shift,
    to_literal,
    total_granules,
    translation_equivalent,
)
from .rules import (
    FpTripletCase,
    GkTripletCase,
    NegativityWitness,
    OrbitTrace,
    RuleKind,
    RuleSpec,
    SignedImage,
    classify_fp_triplet,
    classify_gk_triplet,
    const_g1_rule,
    fp_rule,
    fp_step,
    gen1g_prime_rule,
    gen1g_rule,
    gen1g_step,
    gk_rule,
    gk_step,
    heaviside,
    height_rule,
    height_step,
    orbit,
    sm1_rule,
    step,
    symmetric_step,
)
from .sequential import (
    ALL_RULES,
    BT_FAMILY,
    HR_FAMILY,
    VR_FAMILY,
    DecompositionResult,
    InapplicableMove,
    MoveRule,
    NecessityReport,
    NotOrderedPartition,
    RulesetPolicy,
    SequentialMove,
    SpmOrbitSummary,
    TransitionDigraph,
    applicable_moves,
    apply_move,
    decompose_parallel_transition,
    enumerate_paths,
    explore_digraph,
    mirror_image,
    mirror_move,
    necessity_analysis,
    sequential_spm_orbit,
)
from .analysis import (
    BoundExceeded,
    CheckResult,
    CrosscheckReport,
    NNViolation,
    PartitionCounts,
    TriangularDecomposition,
    conservation_audit,
    decompose_triangular,
    enumerate_partition_spaces,
    fp_equilibrium_shape,
    gk_equilibrium_shape,
    gk_transient_time,
    nn_search,
    prediction_crosscheck,
)

__version__ = "0.1.0"
