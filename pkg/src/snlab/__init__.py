"""snlab: isoperimetric and amenability invariants of locally finite spaces."""

from .embeddability import (
    BallGrowthProfile,
    CoverEstimate,
    GramCheckResult,
    UBGReport,
    ball_growth_profile,
    covering_estimate,
    schoenberg_test,
    schoenberg_test_space,
    sn_vs_doubling_report,
    ubg_report,
)
from .errors import (
    BudgetExceededError,
    FileFormatError,
    HorizonExceededError,
    InsufficientLevelsError,
    MetricViolationError,
    PreconditionError,
    SnlabError,
    UnvalidatedGraphError,
)
from .isoperimetry import (
    BoundEstimate,
    BwResult,
    CghResult,
    IsoQuotientRecord,
    QuasiLattice,
    SnSearchResult,
    amenability_bw_test,
    amenability_cgh_test,
    folner_boundary,
    identity_lattice,
    iso_constant_estimate,
    k_quotient,
    quasi_lattice_verify,
    sn_witness_search,
)
from .metric_graph import (
    CompatibilityReport,
    TripodWitness,
    WeightedGraph,
    find_tripod,
    graph_boundary,
    induced_metric,
    validate_metric_graph,
    verify_tripod_witness,
)
from .spaces import (
    DistanceLevels,
    NeighborhoodResult,
    SpaceHandle,
    bfs_ball_sizes,
    closed_boundary,
    closed_neighborhood,
    discrete_neighborhood,
    distance_levels,
    distance_to_set,
    verify_complete_chain,
)
from .zoom import (
    GrowthClassification,
    ZoomProfile,
    ZoomSummary,
    growth_classify,
    zoom_aggregate,
    zoom_profile,
)
from .zoo import (
    BoxSpace,
    FiniteMetricSpace,
    FreeGroupSpace,
    HarmonicSpace,
    IntegerLattice,
    RegularTreeSpace,
    TreePlusRaySpace,
    WeightedTreeSpace,
    box_space_of_cycles,
    box_space_random_regular,
    cycle_graph,
    graph_window,
    ivanov_tree,
    make_space,
    random_regular_graph,
    semi_tripod_space,
    tripod_space,
    truncate_space,
    zoo_catalog,
)

__version__ = "0.1.0"
