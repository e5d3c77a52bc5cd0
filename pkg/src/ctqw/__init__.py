"""Continuous-time quantum walks on finite graphs via Laplacian block decompositions."""

from .decomposition import (
    FidPartition,
    FidViolation,
    block_diagonal_laplacian,
    clique_gateway_split,
    dominating_split,
    reduced_matrix,
    tilde_matrix,
    twin_coarsen,
    verify_fid,
)
from .graphs import (
    Graph,
    build_graph,
    complete,
    cycle,
    disjoint_union,
    edgeless,
    erdos_renyi,
    generate,
    join,
    laplacian,
    parse_edge_list,
    path,
    serialize_edge_list,
    star,
    threshold_model,
)
from .spectral import (
    BlockSpectrum,
    EigenDecomposition,
    ReducedSpectrum,
    block_spectrum,
    eigh,
    reduced_spectrum,
)
from .walk import (
    GapResult,
    ProbabilityReport,
    ScanRow,
    amplitude_direct,
    amplitude_fid,
    build_clique_gateway_graph,
    dominating_cross_probability,
    dominating_return_probability,
    invariant_report,
    localization_scan,
    probability_direct,
    probability_fid_terms,
    probability_matrix_direct,
    probability_matrix_fid,
    return_probability_gap,
    time_grid,
)

__version__ = "0.1.0"
