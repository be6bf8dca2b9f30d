"""Spectral radius of bipartite graphs: exact values, degree-sequence bounds,
extremal constructions and exhaustive verification at small sizes."""

from .bounds import (
    BoundGrid,
    PhiParams,
    bound_d1d1,
    bound_sqrt_e,
    equality_case_check,
    phi,
    phi_1q,
    phi_grid,
    phi_p1,
    phi_pq_closed,
    phi_pq_partial_dp,
    rho_k_brace_closed,
    rho_k_bracket_closed,
)
from .graph import (
    BipartiteGraph,
    Decomposition,
    DegreeProfile,
    bipartite_sum,
    canonical_form,
    common_neighbors,
    complete_bipartite,
    decompose_ks_plus_biregular,
    degree_profile,
    empty_bipartite,
    format_graph,
    from_biadjacency,
    is_biregular,
    is_connected,
    k_brace,
    k_bracket,
    parse_graph,
)
from .search import (
    ConjectureVerdict,
    EnumerationSpec,
    SearchRecord,
    enumerate_kpqe,
    max_spectral,
    scan_conjecture3,
    verify_conjecture2,
)
from .spectral import (
    CertificateReport,
    QuotientMatrix,
    max_eigenvalue_small,
    quotient_matrix,
    scaling_certificate,
    spectral_radius,
)

__version__ = "0.1.0"
