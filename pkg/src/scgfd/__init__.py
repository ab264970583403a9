"""Front-door identification of total effects in summary causal graphs.

A summary causal graph (SCG) collapses a multivariate time series into one
macro vertex per series, keeping directed edges (cycles and self-loops
allowed) and dashed bidirected edges for latent confounding.  This package
decides whether a lagged total effect is identifiable through a front-door
style criterion stated directly on the SCG, constructs the mediator and
adjustment sets, emits the do-free estimand, and verifies every graphical
claim at desk scale with brute-force oracles: exhaustive candidate
full-time-graph enumeration, m-separation, and exact discrete simulation.
"""

from scgfd.graph import (
    LinkMark,
    PathKind,
    Scg,
    ScgError,
    ScgParseError,
    ScgPath,
    UnknownVertexError,
    classify_scg_path,
    cycles_containing,
    enumerate_scg_paths,
    has_activated_backdoor,
    backdoors_blocked_by_x,
    intercepts_all_activated_directed,
    parse_scg,
    scg_ancestors,
    scg_descendants,
    scg_parents,
    scg_path_blocked,
    serialize_scg,
)
from scgfd.criterion import (
    CriterionReport,
    EffectQuery,
    check_front_door,
    search_front_door_sets,
)
from scgfd.estimand import (
    EstimandAst,
    FrontDoorSets,
    MicroVertex,
    ZeroProbabilityError,
    build_bf,
    build_bx,
    build_bx_general,
    build_estimand,
    evaluate_estimand,
    front_door_sets,
    mediator_instances,
    parse_estimand_json,
    render_estimand,
    cause_side_marginal,
    shared_covariate_caveat,
)
from scgfd.unroll import (
    CandidateSpec,
    EdgeTemplate,
    WindowGraph,
    WindowTooShortError,
    count_candidates,
    enumerate_candidates,
    instantiate_window,
    iter_candidates,
    latent_project,
)
from scgfd.oracle import (
    VerificationReport,
    backdoor_holds,
    d_connected,
    d_connected_by_paths,
    demonstrate_unblockable,
    find_direction_ambiguity,
    micro_ancestors,
    micro_descendants,
    verify_front_door_claims,
)
from scgfd.simulate import (
    DiscreteDynamicScm,
    JointDistribution,
    compare,
    exact_joint,
    interventional_truth,
    sample_scm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
