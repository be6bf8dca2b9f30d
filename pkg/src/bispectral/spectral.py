"""Spectral radius, quotient matrices and the row-sum scaling certificate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .errors import (
    CertificateViolation,
    ConvergenceError,
    DimensionError,
    DomainError,
    PartitionError,
)
from .graph import BipartiteGraph, _bits, common_neighbors, components

DEFAULT_TOL = 1e-10
DEFAULT_TOL_SQ = 1e-9
MAX_ITER = 10**6
_STALL = 5000


def _perron_root(m: np.ndarray, tol: float) -> float:
    """Largest eigenvalue of a primitive symmetric nonnegative matrix, returned
    as its square root.

    Collatz-Wielandt bounds min(Mx/x) <= lambda <= max(Mx/x) bracket the
    root at every step; iteration stops once the bracket on sqrt(lambda) is
    narrower than ``tol``.
    """
    n = m.shape[0]
    if n == 1:
        return math.sqrt(float(m[0, 0]))
    x = np.ones(n)
    best_width = math.inf
    last_gain = 0
    lo = hi = 0.0
    for it in range(MAX_ITER):
        y = m @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        r_lo, r_hi = math.sqrt(max(lo, 0.0)), math.sqrt(hi)
        width = r_hi - r_lo
        if width < tol:
            return 0.5 * (r_lo + r_hi)
        if width < best_width:
            best_width, last_gain = width, it
        elif it - last_gain > _STALL:
            break
        x = y / np.linalg.norm(y)
    raise ConvergenceError(
        f"power iteration did not reach tol={tol}", (math.sqrt(max(lo, 0.0)), math.sqrt(hi))
    )


def spectral_radius(g: BipartiteGraph, tol: float = DEFAULT_TOL) -> float:
    """rho(G) to absolute error ``tol``.

    Each connected component is handled separately; on a component the power
    iteration runs on the smaller of its two Gram matrices, started from the
    all-ones vector.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if g.e == 0:
        return 0.0
    b = g.biadjacency()
    best = 0.0
    for left, right in components(g):
        if not left or not right:
            continue
        sub = b[np.ix_(list(_bits(left)), list(_bits(right)))].astype(float)
        gram = sub @ sub.T if sub.shape[0] <= sub.shape[1] else sub.T @ sub
        best = max(best, _perron_root(gram, tol))
    return best


# ---------------------------------------------------------------------------
# quotient matrices


@dataclass(frozen=True)
class QuotientMatrix:
    entries: np.ndarray
    equitable: bool
    partition: tuple[tuple[int, ...], ...]
    exact: tuple[tuple[Fraction, ...], ...]


def _check_partition(partition: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    blocks = tuple(tuple(int(i) for i in block) for block in partition)
    seen: set[int] = set()
    for block in blocks:
        if not block:
            raise PartitionError("partition blocks must be non-empty")
        for i in block:
            if not 0 <= i < n:
                raise PartitionError(f"index {i} outside 0..{n - 1}")
            if i in seen:
                raise PartitionError(f"index {i} appears in two blocks")
            seen.add(i)
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise PartitionError(f"partition does not cover indices {missing}")
    return blocks


def quotient_matrix(
    g: BipartiteGraph,
    partition: Sequence[Sequence[int]],
    of: Literal["adjacency", "square"] = "adjacency",
) -> QuotientMatrix:
    """Block-average row sums of A (or A^2) over ``partition``.

    Indices 0..p-1 are the left vertices, p..p+q-1 the right ones.
    """
    a = g.adjacency()
    if of == "square":
        a = a @ a
    elif of != "adjacency":
        raise DomainError(f"unknown matrix {of!r}")
    blocks = _check_partition(partition, g.p + g.q)
    exact = []
    equitable = True
    for rows in blocks:
        row = []
        for cols in blocks:
            sums = a[np.ix_(rows, cols)].sum(axis=1)
            if len(set(sums.tolist())) > 1:
                equitable = False
            row.append(Fraction(int(sums.sum()), len(rows)))
        exact.append(tuple(row))
    entries = np.array([[float(x) for x in row] for row in exact])
    return QuotientMatrix(entries, equitable, blocks, tuple(exact))


# ---------------------------------------------------------------------------
# small dense eigenvalues

Poly = list  # coefficients, lowest degree first


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pmul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _trim(a: Poly) -> Poly:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    a = [Fraction(x) for x in a]
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        quot[shift] = f
        for i, y in enumerate(b):
            a[i + shift] -= f * y
        a = _trim(a)
    return _trim(quot), a


def _pderiv(a: Poly) -> Poly:
    return _trim([i * a[i] for i in range(1, len(a))]) if len(a) > 1 else [Fraction(0)]


def _pgcd(a: Poly, b: Poly) -> Poly:
    while any(b):
        _, r = _pdivmod(a, b)
        a, b = b, r
    return [x / a[-1] for x in a]


def _peval(a: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def charpoly(m: Sequence[Sequence[float]]) -> Poly:
    """det(lambda I - M) by cofactor expansion, exact over the rationals."""
    n = len(m)
    cells = [
        [([-Fraction(m[i][j]), Fraction(1)] if i == j else [-Fraction(m[i][j])]) for j in range(n)]
        for i in range(n)
    ]

    def det(rows: tuple[int, ...], cols: tuple[int, ...]) -> Poly:
        if len(rows) == 1:
            return _trim(cells[rows[0]][cols[0]])
        total: Poly = [Fraction(0)]
        r, rest = rows[0], rows[1:]
        for k, c in enumerate(cols):
            minor = det(rest, cols[:k] + cols[k + 1 :])
            term = _pmul(cells[r][c], minor)
            if k % 2:
                term = [-x for x in term]
            total = _padd(total, term)
        return total

    return det(tuple(range(n)), tuple(range(n)))


def _sign_changes(chain: list[Poly], x: Fraction) -> int:
    signs = [v for v in (_peval(p, x) for p in chain) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def largest_real_root(poly: Poly, tol: float) -> float | None:
    """Largest real root of ``poly`` by Sturm-sequence bisection, or None."""
    poly = _trim([Fraction(c) for c in poly])
    if len(poly) < 2:
        return None
    g = _pgcd(poly, _pderiv(poly))
    squarefree, _ = _pdivmod(poly, g)
    chain = [squarefree, _pderiv(squarefree)]
    while len(chain[-1]) > 1:
        _, r = _pdivmod(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-c for c in r])
    bound = 1 + max(abs(c / squarefree[-1]) for c in squarefree[:-1]) if len(squarefree) > 1 else Fraction(1)
    lo, hi = -bound, bound
    if _sign_changes(chain, lo) - _sign_changes(chain, hi) == 0:
        return None
    step = Fraction(tol) / 4
    while hi - lo > step:
        mid = (lo + hi) / 2
        # round mid to a short dyadic to keep the exact arithmetic cheap
        mid = Fraction(round(mid / step)) * step
        if not lo < mid < hi:
            break
        if _sign_changes(chain, mid) - _sign_changes(chain, hi) > 0:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def _shifted_power(m: np.ndarray, tol: float) -> float:
    n = m.shape[0]
    shift = float(np.abs(m).sum(axis=1).max())
    if shift == 0:
        return 0.0
    ms = m + shift * np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    prev = math.inf
    for _ in range(MAX_ITER):
        y = ms @ x
        lam = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0:
            return -shift
        x = y / norm
        if abs(lam - prev) < tol * 1e-2 and np.linalg.norm(ms @ x - lam * x) < tol:
            return lam - shift
        prev = lam
    raise ConvergenceError("shifted power iteration did not converge", (prev - shift, prev - shift))


def max_eigenvalue_small(m: Sequence[Sequence[float]] | np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Largest real eigenvalue of a small square matrix with real spectrum.

    Exact characteristic polynomial plus Sturm bisection for n <= 4, shifted
    power iteration for 5 <= n <= 8.  On the nonnegative quotient matrices
    used here this is the Perron root.
    """
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    n = arr.shape[0]
    if n > 8:
        raise DimensionError(f"dimension {n} > 8")
    if n <= 4:
        root = largest_real_root(charpoly(arr.tolist()), tol)
        if root is None:
            raise DomainError("matrix has no real eigenvalue")
        return root
    return _shifted_power(arr, tol)


# ---------------------------------------------------------------------------
# scaling certificate


@dataclass(frozen=True)
class CertificateReport:
    s: int
    t: int
    phi_sq: float
    x: tuple[float, ...]
    xprime: tuple[float, ...]
    row_sums: tuple[float, ...]
    max_row_sum: float
    verdict: bool
    left_order: tuple[int, ...]
    right_order: tuple[int, ...]


def _degree_order(degrees: list[int]) -> list[int]:
    return sorted(range(len(degrees)), key=lambda i: (-degrees[i], i))


def _weights(deg: list[int], k: int, other_min: int, phi_sq: float, own_excess: int, degenerate: bool) -> list[float]:
    if degenerate:
        return [1.0] * (k - 1)
    d_k = deg[k - 1]
    return [1 + other_min * (deg[i] - d_k) / (phi_sq - own_excess) for i in range(k - 1)]


def scaling_certificate(g: BipartiteGraph, s: int, t: int, tol: float = DEFAULT_TOL_SQ) -> CertificateReport:
    """Row sums of U^-1 A^2 U for the diagonal scaling that proves rho <= phi_{s,t}.

    Vertices are relabelled by non-increasing degree (ties by index) first;
    ``row_sums`` lists the left then the right vertices in that order.
    Raises CertificateViolation if any row sum exceeds phi^2 + tol.
    """
    from .bounds import phi
    from .graph import degree_profile

    if not (1 <= s <= g.p and 1 <= t <= g.q):
        raise DomainError(f"(s, t) = ({s}, {t}) outside [1, {g.p}] x [1, {g.q}]")
    params = phi(degree_profile(g), s, t)
    left_order = _degree_order(g.left_degrees())
    right_order = _degree_order(g.right_degrees())
    d = [g.left_degrees()[i] for i in left_order]
    dp = [g.right_degrees()[j] for j in right_order]
    phi_sq = params.phi**2

    # phi^2 equals an excess sum exactly when d_s d'_t = 0 and that excess is the larger one
    zero = params.d_s * params.d_t_prime == 0
    x = _weights(d, s, params.d_t_prime, phi_sq, params.excess_left, zero and params.excess_left >= params.excess_right)
    xp = _weights(dp, t, params.d_s, phi_sq, params.excess_right, zero and params.excess_right >= params.excess_left)
    if min(x + xp, default=1.0) < 1:
        raise CertificateViolation(f"weight below 1 at (s, t) = ({s}, {t})")

    left, right = common_neighbors(g)
    left = left[np.ix_(left_order, left_order)].astype(float)
    right = right[np.ix_(right_order, right_order)].astype(float)
    u = np.ones(g.p)
    u[: s - 1] = x
    v = np.ones(g.q)
    v[: t - 1] = xp
    rows = np.concatenate([(left @ u) / u, (right @ v) / v])
    max_row = float(rows.max())
    report = CertificateReport(
        s, t, phi_sq, tuple(x), tuple(xp), tuple(float(r) for r in rows), max_row,
        max_row <= phi_sq + tol, tuple(left_order), tuple(right_order),
    )
    if not report.verdict:
        raise CertificateViolation(
            f"row sum {max_row!r} exceeds phi^2 = {phi_sq!r} at (s, t) = ({s}, {t})"
        )
    return report
