"""Gromov-Wasserstein and Gromov-Monge distances for finite measure networks."""

from .euclidean import (
    EuclideanCloud,
    Isometry,
    cloud_to_network,
    gm_em_infinity,
    gm_em_lower,
    m_iso,
    procrustes_align,
    simplex_point_embedding_value,
)
from .graphs import Graph, adjacency_network, heat_kernel_network, laplacian
from .networks import (
    EPS_SUPP,
    TOL_MASS,
    TOL_METRIC,
    Coupling,
    MarginalError,
    MeasureNetwork,
    MetricFlag,
    MongeMap,
    NotMeasurePreservingError,
    check_exponent,
    check_measure_preserving,
    coupling_from_map,
    distortion_map,
    distortion_p,
    one_point_network,
    parse_exponent,
    product_coupling,
    pullback_network,
    simplex_network,
    size_p,
    validate_network,
)
from .solvers import (
    CapExceededError,
    MassSplit,
    NotSPDError,
    SolveReport,
    enumerate_monge_maps,
    gm_exact,
    gm_infinity,
    gm_over_split,
    gw_frank_wolfe,
    gw_spd_vertex_ascent,
    mass_split_from_coupling,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "Coupling",
    "EPS_SUPP",
    "EuclideanCloud",
    "Graph",
    "Isometry",
    "MarginalError",
    "MassSplit",
    "MeasureNetwork",
    "MetricFlag",
    "MongeMap",
    "NotMeasurePreservingError",
    "NotSPDError",
    "SolveReport",
    "TOL_MASS",
    "TOL_METRIC",
    "adjacency_network",
    "check_exponent",
    "check_measure_preserving",
    "cloud_to_network",
    "coupling_from_map",
    "distortion_map",
    "distortion_p",
    "enumerate_monge_maps",
    "gm_em_infinity",
    "gm_em_lower",
    "gm_exact",
    "gm_infinity",
    "gm_over_split",
    "gw_frank_wolfe",
    "gw_spd_vertex_ascent",
    "heat_kernel_network",
    "laplacian",
    "m_iso",
    "mass_split_from_coupling",
    "one_point_network",
    "parse_exponent",
    "procrustes_align",
    "product_coupling",
    "pullback_network",
    "simplex_network",
    "simplex_point_embedding_value",
    "size_p",
    "validate_network",
]
