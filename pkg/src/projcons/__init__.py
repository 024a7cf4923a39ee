"""Consensus seeking on weighted digraphs by orthogonal projection of the initial state.

The basic continuous protocol ``dx/dt = -L x`` converges to ``J x(0)``, where
``J`` is the eigenprojection of the Laplacian (the normalized matrix of
maximum in-forests).  That limit is a consensus only when the digraph has a
spanning in-tree.  Projecting ``x(0)`` orthogonally onto ``R(L) + span(1)``
with the matrix ``S`` always yields a consensus, ``J S x(0)``.
"""
from .digraph import (
    ComponentStructure,
    WeightedDigraph,
    enumerate_max_in_forests,
    forest_matrix,
    has_spanning_in_tree,
    random_digraph,
    strongly_connected_components,
)
from .dynamics import (
    ProtocolKind,
    SimulationTrace,
    consensus_check,
    degroot_iterate,
    quasi_consensus_limit,
    run_protocol,
    simulate_continuous,
    simulate_ode,
)
from .estimators import ForestConsensus, ProjectionConsensus
from .exceptions import (
    ConvergenceError,
    EnumerationLimitError,
    GraphFormatError,
    SingularMatrixError,
    TauRangeError,
)
from .graphio import parse_graph, read_graph
from .laplacian import (
    LaplacianSystem,
    build_laplacian,
    cesaro_limit,
    check_tau,
    degroot_matrix,
    eigenprojection_nullspace,
    eigenprojection_resolvent,
)
from .projection import (
    ProjectionBundle,
    approximation_error,
    build_projection,
    build_u_matrix,
    consensus_projection,
    in_consensus_domain,
    l_tilde,
    orthogonal_projection_s,
    p_tilde,
    project_initial,
)

__version__ = "0.1.0"

__all__ = [
    "ComponentStructure",
    "ConvergenceError",
    "EnumerationLimitError",
    "ForestConsensus",
    "GraphFormatError",
    "LaplacianSystem",
    "ProjectionBundle",
    "ProjectionConsensus",
    "ProtocolKind",
    "SimulationTrace",
    "SingularMatrixError",
    "TauRangeError",
    "WeightedDigraph",
    "approximation_error",
    "build_laplacian",
    "build_projection",
    "build_u_matrix",
    "cesaro_limit",
    "check_tau",
    "consensus_check",
    "consensus_projection",
    "degroot_iterate",
    "degroot_matrix",
    "eigenprojection_nullspace",
    "eigenprojection_resolvent",
    "enumerate_max_in_forests",
    "forest_matrix",
    "has_spanning_in_tree",
    "in_consensus_domain",
    "l_tilde",
    "orthogonal_projection_s",
    "p_tilde",
    "parse_graph",
    "project_initial",
    "quasi_consensus_limit",
    "random_digraph",
    "read_graph",
    "run_protocol",
    "simulate_continuous",
    "simulate_ode",
    "strongly_connected_components",
]
