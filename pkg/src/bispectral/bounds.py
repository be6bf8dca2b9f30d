"""Degree-sequence upper bounds phi_{s,t} on the spectral radius.

For degree sequences d_1 >= ... >= d_p and d'_1 >= ... >= d'_q and any
1 <= s <= p, 1 <= t <= q::

    L = sum_{i<s} (d_i - d_s)          R = sum_{j<t} (d'_j - d'_t)
    X = d_s d'_t + L + R               Y = L R
    phi_{s,t} = sqrt((X + sqrt(X^2 - 4Y)) / 2)

so phi^2 is the larger root of z^2 - X z + Y.  X and Y are kept as exact
integers; only the two square roots are taken in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real

import numpy as np

from .errors import DomainError, PreconditionError, TheoremViolation
from .graph import (
    BipartiteGraph,
    Decomposition,
    DegreeProfile,
    components,
    decompose_ks_plus_biregular,
    degree_profile,
    is_biregular,
    is_connected,
)
from .spectral import DEFAULT_TOL, spectral_radius

TIGHT_RTOL = 1e-7


def _phi_from_xy(x, y) -> float:
    disc = x * x - 4 * y
    if disc < 0:
        # only reachable with non-integer inputs through rounding
        disc = 0
    return math.sqrt((x + math.sqrt(disc)) / 2)


@dataclass(frozen=True)
class PhiParams:
    s: int
    t: int
    d_s: int
    d_t_prime: int
    excess_left: int
    excess_right: int
    X: int
    Y: int
    phi: float


def phi(profile: DegreeProfile, s: int, t: int) -> PhiParams:
    """phi_{s,t} for a degree profile; ``s`` and ``t`` are 1-based as in the bound."""
    if not (1 <= s <= profile.p and 1 <= t <= profile.q):
        raise DomainError(f"(s, t) = ({s}, {t}) outside [1, {profile.p}] x [1, {profile.q}]")
    d, dp = profile.d, profile.dprime
    d_s, d_t = d[s - 1], dp[t - 1]
    left = sum(d[i] - d_s for i in range(s - 1))
    right = sum(dp[j] - d_t for j in range(t - 1))
    x = d_s * d_t + left + right
    y = left * right
    return PhiParams(s, t, d_s, d_t, left, right, x, y, _phi_from_xy(x, y))


@dataclass(frozen=True)
class BoundGrid:
    values: np.ndarray  # values[s-1, t-1] = phi_{s,t}
    best: tuple[int, int]
    best_value: float
    rho: float
    tight_cells: tuple[tuple[int, int], ...]
    params: tuple[tuple[PhiParams, ...], ...]


def is_tight(bound: float, rho: float, rtol: float = TIGHT_RTOL) -> bool:
    return abs(bound - rho) <= rtol * max(1.0, rho)


def phi_grid(g: BipartiteGraph, tol: float = DEFAULT_TOL) -> BoundGrid:
    """phi_{s,t} over every cell, with the minimising cell and the tight cells.

    ``best`` is the first minimiser in row-major order.  Tight cells are
    flagged at relative tolerance 1e-7 against the power-iteration radius.
    """
    prof = degree_profile(g)
    rho = spectral_radius(g, tol)
    params = tuple(tuple(phi(prof, s, t) for t in range(1, g.q + 1)) for s in range(1, g.p + 1))
    values = np.array([[c.phi for c in row] for row in params])
    flat = int(np.argmin(values))
    best = (flat // g.q + 1, flat % g.q + 1)
    tight = tuple(
        (s, t)
        for s in range(1, g.p + 1)
        for t in range(1, g.q + 1)
        if is_tight(values[s - 1, t - 1], rho)
    )
    return BoundGrid(values, best, float(values[best[0] - 1, best[1] - 1]), rho, tight, params)


def phi_1q(profile: DegreeProfile) -> float:
    """phi_{1,q} = sqrt(e - (q - d_1) d'_q)."""
    return math.sqrt(profile.e - (profile.q - profile.d[0]) * profile.dprime[-1])


def phi_p1(profile: DegreeProfile) -> float:
    """phi_{p,1} = sqrt(e - (p - d'_1) d_p)."""
    return math.sqrt(profile.e - (profile.p - profile.dprime[0]) * profile.d[-1])


def _pq_xy(p, q, e, d_p, d_q):
    # X = 2e - (p d_p + q d'_q - d_p d'_q),  Y = (e - p d_p)(e - q d'_q)
    x = 2 * e - (p * d_p + q * d_q - d_p * d_q)
    y = (e - p * d_p) * (e - q * d_q)
    return x, y


def phi_pq_closed(p: int, q: int, e: int, d_p: Real, d_q_prime: Real) -> float:
    """phi_{p,q} from (p, q, e) and the two minimum degrees alone.

    Non-integer degrees are accepted so the function can be probed as a
    function of two real variables.
    """
    if d_p < 0 or d_q_prime < 0 or p * d_p > e or q * d_q_prime > e:
        raise DomainError(
            f"need 0 <= d_p, 0 <= d'_q, p d_p <= e, q d'_q <= e; got {(p, q, e, d_p, d_q_prime)}"
        )
    return _phi_from_xy(*_pq_xy(p, q, e, d_p, d_q_prime))


def phi_pq_real(p: float, q: float, e: float, d_p: float, d_q_prime: float) -> float:
    """Unchecked real-valued phi_{p,q}(d_p, d'_q) for finite differencing."""
    return _phi_from_xy(*_pq_xy(p, q, e, d_p, d_q_prime))


def phi_pq_partial_dp(p: int, q: int, e: int, d_p: Real, d_q_prime: int) -> float:
    """d/d(d_p) of 2 phi_{p,q}^2 = 2e - S + sqrt(S^2 - 4 d_p d'_q (pq - e)),
    S = p d_p + q d'_q - d_p d'_q.

    Negative whenever 1 <= d'_q <= p - 1, q d'_q <= e < pq.  At e = pq the
    derivative is identically zero, so that edge is excluded.
    """
    if not (1 <= d_q_prime <= p - 1 and q * d_q_prime <= e < p * q):
        raise DomainError(
            f"need 1 <= d'_q <= p-1 and q d'_q <= e < pq; got p={p}, q={q}, e={e}, d'_q={d_q_prime}"
        )
    if d_p < 0 or p * d_p > e:
        raise DomainError(f"need 0 <= d_p <= e/p; got d_p={d_p}")
    k = p * q - e
    s = p * d_p + q * d_q_prime - d_p * d_q_prime
    root = math.sqrt(s * s - 4 * d_p * d_q_prime * k)
    return -p + d_q_prime + (s * (p - d_q_prime) - 2 * d_q_prime * k) / root


def _oriented(p: int, q: int, e: int, limit) -> tuple[int, int]:
    if p < 1 or q < 1:
        raise DomainError(f"part orders must be >= 1, got ({p}, {q})")
    k = p * q - e
    if not 1 <= k <= limit(p, q):
        raise DomainError(f"need 1 <= pq - e <= {limit.__name__}(p, q); got pq - e = {k}")
    return (p, q) if p <= q else (q, p)


def rho_k_brace_closed(p: int, q: int, e: int) -> float:
    """rho(K^{e}_{p,q}) = sqrt((e + sqrt(e^2 - 4(q-1)(p-pq+e)(pq-e))) / 2), p <= q."""
    p, q = _oriented(p, q, e, min)
    disc = e * e - 4 * (q - 1) * (p - p * q + e) * (p * q - e)
    return math.sqrt((e + math.sqrt(disc)) / 2)


def rho_k_bracket_closed(p: int, q: int, e: int) -> float:
    """rho(K^{[e]}_{p,q}) = phi_{p,q}(q - pq + e, p - 1), p <= q."""
    p, q = _oriented(p, q, e, max)
    return phi_pq_closed(p, q, e, q - p * q + e, p - 1)


@dataclass(frozen=True)
class ClassicalBound:
    value: float
    equality: bool | None  # None when the equality test does not apply


def _complete_plus_isolated(g: BipartiteGraph) -> bool:
    with_edges = [(l, r) for l, r in components(g) if l and r]
    if len(with_edges) > 1:
        return False
    if not with_edges:
        return True
    left, right = with_edges[0]
    return g.e == left.bit_count() * right.bit_count()


def bound_sqrt_e(g: BipartiteGraph) -> ClassicalBound:
    """rho <= sqrt(e); equality iff complete bipartite plus isolated vertices."""
    return ClassicalBound(math.sqrt(g.e), _complete_plus_isolated(g))


def bound_d1d1(g: BipartiteGraph) -> ClassicalBound:
    """rho <= sqrt(d_1 d'_1); for connected graphs equality iff biregular."""
    prof = degree_profile(g)
    eq = is_biregular(g) if is_connected(g) else None
    return ClassicalBound(math.sqrt(prof.d[0] * prof.dprime[0]), eq)


@dataclass(frozen=True)
class EqualityDiagnosis:
    s: int
    t: int
    phi: float
    rho: float
    tight: bool
    decomposition: Decomposition | None
    structural: bool


def equality_case_check(g: BipartiteGraph, s: int, t: int, tol: float = DEFAULT_TOL) -> EqualityDiagnosis:
    """Check tightness of phi_{s,t} numerically and structurally.

    ``tight`` compares phi with rho; ``structural`` asks whether g splits as
    K_{s',t'} + H with H biregular, s' < s and t' < t.  The two must agree.
    """
    if not is_connected(g):
        raise PreconditionError("equality characterisation needs a connected graph")
    prm = phi(degree_profile(g), s, t)
    rho = spectral_radius(g, tol)
    tight = is_tight(prm.phi, rho)
    dec = decompose_ks_plus_biregular(g)
    structural = dec is not None and dec.s_prime < s and dec.t_prime < t
    if tight != structural:
        raise TheoremViolation(
            f"(s, t) = ({s}, {t}): tight={tight} (phi={prm.phi!r}, rho={rho!r}) "
            f"but decomposition={dec}"
        )
    return EqualityDiagnosis(s, t, prm.phi, rho, tight, dec, structural)
