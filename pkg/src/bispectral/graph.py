"""Bipartite graphs with a fixed ordered bipartition.

A graph is stored as its p x q biadjacency matrix packed into ``p`` integer
bitmasks: bit ``j`` of ``rows[i]`` is set iff ``u_i ~ v_j``.  Vertices are
0-indexed; the left part is ``U = {u_0..u_{p-1}}``, the right part is
``V = {v_0..v_{q-1}}``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InputShapeError, InputValueError, PreconditionError

MAX_PART = 64
MAX_CANONICAL_SIDE = 8


@dataclass(frozen=True)
class BipartiteGraph:
    p: int
    q: int
    rows: tuple[int, ...]
    e: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise DomainError(f"part orders must be >= 1, got ({self.p}, {self.q})")
        if self.p > MAX_PART or self.q > MAX_PART:
            raise DomainError(f"part orders are capped at {MAX_PART}")
        if len(self.rows) != self.p:
            raise InputShapeError(f"expected {self.p} rows, got {len(self.rows)}")
        full = (1 << self.q) - 1
        for r in self.rows:
            if r < 0 or r & ~full:
                raise InputValueError(f"row bitmask {r} has bits outside {self.q} columns")
        object.__setattr__(self, "e", sum(r.bit_count() for r in self.rows))

    def __repr__(self):
        return f"BipartiteGraph(p={self.p}, q={self.q}, e={self.e})"

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.rows) for j in range(self.q) if r >> j & 1]

    def columns(self) -> tuple[int, ...]:
        """Column bitmasks: bit ``i`` of ``columns()[j]`` is set iff ``u_i ~ v_j``."""
        cols = [0] * self.q
        for i, r in enumerate(self.rows):
            for j in range(self.q):
                if r >> j & 1:
                    cols[j] |= 1 << i
        return tuple(cols)

    def transpose(self) -> BipartiteGraph:
        """The same graph with the two parts swapped."""
        return BipartiteGraph(self.q, self.p, self.columns())

    def biadjacency(self) -> np.ndarray:
        b = np.zeros((self.p, self.q), dtype=np.int64)
        for i, r in enumerate(self.rows):
            for j in range(self.q):
                if r >> j & 1:
                    b[i, j] = 1
        return b

    def adjacency(self) -> np.ndarray:
        n = self.p + self.q
        a = np.zeros((n, n), dtype=np.int64)
        b = self.biadjacency()
        a[: self.p, self.p :] = b
        a[self.p :, : self.p] = b.T
        return a

    def left_degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def right_degrees(self) -> list[int]:
        return [c.bit_count() for c in self.columns()]


@dataclass(frozen=True)
class DegreeProfile:
    d: tuple[int, ...]
    dprime: tuple[int, ...]
    e: int

    @property
    def p(self) -> int:
        return len(self.d)

    @property
    def q(self) -> int:
        return len(self.dprime)

    @classmethod
    def from_sequences(cls, d: Iterable[int], dprime: Iterable[int]) -> DegreeProfile:
        """Build a (possibly hypothetical) profile; sequences are sorted non-increasing."""
        d = tuple(sorted(d, reverse=True))
        dprime = tuple(sorted(dprime, reverse=True))
        if not d or not dprime:
            raise DomainError("degree sequences must be non-empty")
        if sum(d) != sum(dprime):
            raise DomainError(f"degree sums differ: {sum(d)} != {sum(dprime)}")
        if d[-1] < 0 or dprime[-1] < 0 or d[0] > len(dprime) or dprime[0] > len(d):
            raise DomainError("degrees out of range for the part orders")
        return cls(d, dprime, sum(d))


@dataclass(frozen=True)
class Decomposition:
    s_prime: int
    t_prime: int
    h: BipartiteGraph
    h_biregular: bool


def from_biadjacency(rows: Sequence[Sequence[int]]) -> BipartiteGraph:
    if len(rows) == 0:
        raise InputShapeError("biadjacency matrix has no rows")
    q = len(rows[0])
    if q == 0:
        raise InputShapeError("biadjacency rows are empty")
    packed = []
    for i, row in enumerate(rows):
        if len(row) != q:
            raise InputShapeError(f"row {i} has length {len(row)}, expected {q}")
        mask = 0
        for j, x in enumerate(row):
            if x not in (0, 1):
                raise InputValueError(f"entry ({i}, {j}) is {x!r}, expected 0 or 1")
            if x:
                mask |= 1 << j
        packed.append(mask)
    return BipartiteGraph(len(rows), q, tuple(packed))


def from_edges(p: int, q: int, edges: Iterable[tuple[int, int]]) -> BipartiteGraph:
    rows = [0] * p
    for i, j in edges:
        if not (0 <= i < p and 0 <= j < q):
            raise InputValueError(f"edge ({i}, {j}) outside {p}x{q}")
        rows[i] |= 1 << j
    return BipartiteGraph(p, q, tuple(rows))


def complete_bipartite(p: int, q: int) -> BipartiteGraph:
    if p < 1 or q < 1:
        raise DomainError(f"K_{{p,q}} needs p, q >= 1, got ({p}, {q})")
    return BipartiteGraph(p, q, ((1 << q) - 1,) * p)


def empty_bipartite(s: int, t: int) -> BipartiteGraph:
    if s < 1 or t < 1:
        raise DomainError(f"N_{{s,t}} needs s, t >= 1, got ({s}, {t})")
    return BipartiteGraph(s, t, (0,) * s)


def bipartite_sum(h: BipartiteGraph, hp: BipartiteGraph) -> BipartiteGraph:
    """Disjoint union of ``h`` and ``hp`` plus every edge X x Y' and X' x Y.

    Left part is X then X', right part is Y then Y' (X, Y from ``h``).
    """
    y_all = (1 << h.q) - 1
    yp_all = ((1 << hp.q) - 1) << h.q
    rows = [r | yp_all for r in h.rows] + [(r << h.q) | y_all for r in hp.rows]
    return BipartiteGraph(h.p + hp.p, h.q + hp.q, tuple(rows))


def _deleted(p: int, q: int, e: int) -> int:
    if p < 1 or q < 1:
        raise DomainError(f"part orders must be >= 1, got ({p}, {q})")
    k = p * q - e
    if k < 1:
        raise DomainError(f"need pq - e >= 1, got pq - e = {k}")
    return k


def k_bracket(p: int, q: int, e: int) -> BipartiteGraph:
    """K_{p,q} minus pq-e edges at one vertex of the smaller part.

    For p <= q this is K_{p-1,q-pq+e} + N_{1,pq-e}: the last left vertex is
    adjacent to the first q-(pq-e) right vertices.  For p > q the parts are
    swapped, built, and swapped back.
    """
    k = _deleted(p, q, e)
    if k > max(p, q):
        raise DomainError(f"K^[e] needs pq - e <= max(p, q); got {k} > {max(p, q)}")
    if p > q:
        return k_bracket(q, p, e).transpose()
    full = (1 << q) - 1
    return BipartiteGraph(p, q, (full,) * (p - 1) + ((1 << (q - k)) - 1,))


def k_brace(p: int, q: int, e: int) -> BipartiteGraph:
    """K_{p,q} minus pq-e edges at one vertex of the larger part.

    For p <= q this is K_{p-pq+e,q-1} + N_{pq-e,1}: the last right vertex is
    adjacent to the first p-(pq-e) left vertices.
    """
    k = _deleted(p, q, e)
    if k > min(p, q):
        raise DomainError(f"K^{{e}} needs pq - e <= min(p, q); got {k} > {min(p, q)}")
    if p > q:
        return k_brace(q, p, e).transpose()
    full = (1 << q) - 1
    short = (1 << (q - 1)) - 1
    return BipartiteGraph(p, q, (full,) * (p - k) + (short,) * k)


def degree_profile(g: BipartiteGraph) -> DegreeProfile:
    return DegreeProfile(
        tuple(sorted(g.left_degrees(), reverse=True)),
        tuple(sorted(g.right_degrees(), reverse=True)),
        g.e,
    )


def common_neighbors(g: BipartiteGraph) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrices B B^T (left, p x p) and B^T B (right, q x q).

    Entry (i, j) counts the common neighbours of the two vertices, so the
    diagonals are the degrees.
    """
    b = g.biadjacency()
    return b @ b.T, b.T @ b


def is_biregular(g: BipartiteGraph) -> bool:
    return len(set(g.left_degrees())) == 1 and len(set(g.right_degrees())) == 1


def components(g: BipartiteGraph) -> list[tuple[int, int]]:
    """Connected components as (left bitmask, right bitmask) pairs.

    Isolated vertices form their own components.
    """
    cols = g.columns()
    seen_left = 0
    seen_right = 0
    out = []
    for start in range(g.p):
        if seen_left >> start & 1:
            continue
        left, right = 1 << start, 0
        frontier_left = left
        while frontier_left:
            new_right = 0
            for i in _bits(frontier_left):
                new_right |= g.rows[i]
            new_right &= ~right
            right |= new_right
            new_left = 0
            for j in _bits(new_right):
                new_left |= cols[j]
            frontier_left = new_left & ~left
            left |= frontier_left
        seen_left |= left
        seen_right |= right
        out.append((left, right))
    for j in range(g.q):
        if not seen_right >> j & 1:
            out.append((0, 1 << j))
    return out


def is_connected(g: BipartiteGraph) -> bool:
    return len(components(g)) == 1


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def induced(g: BipartiteGraph, left: Sequence[int], right: Sequence[int]) -> BipartiteGraph:
    rows = []
    for i in left:
        r = g.rows[i]
        rows.append(sum(1 << k for k, j in enumerate(right) if r >> j & 1))
    return BipartiteGraph(len(left), len(right), tuple(rows))


def decompose_ks_plus_biregular(g: BipartiteGraph) -> Decomposition | None:
    """Split ``g`` as K_{s',t'} + H with H biregular, or return None.

    s' and t' count the left vertices of degree q and right vertices of
    degree p.  A complete graph is reported as the biregular case
    s' = t' = 0, H = g, since its maximal split leaves H with empty parts.
    """
    if not is_connected(g):
        raise PreconditionError("decomposition is defined for connected graphs only")
    if g.e == g.p * g.q:
        return Decomposition(0, 0, g, True)
    full_left = (1 << g.q) - 1
    full_right = (1 << g.p) - 1
    x = [i for i, r in enumerate(g.rows) if r == full_left]
    cols = g.columns()
    y = [j for j, c in enumerate(cols) if c == full_right]
    rest_left = [i for i in range(g.p) if g.rows[i] != full_left]
    rest_right = [j for j in range(g.q) if cols[j] != full_right]
    h = induced(g, rest_left, rest_right)
    if not is_biregular(h):
        return None
    return Decomposition(len(x), len(y), h, True)


# ---------------------------------------------------------------------------
# canonical form


@lru_cache(maxsize=None)
def _perm_tables(n: int) -> tuple[tuple[int, ...], ...]:
    # table[k][mask] = mask with bit j moved to position perm_k[j]
    tables = []
    for perm in itertools.permutations(range(n)):
        table = []
        for mask in range(1 << n):
            out = 0
            for j in range(n):
                if mask >> j & 1:
                    out |= 1 << perm[j]
            table.append(out)
        tables.append(tuple(table))
    return tuple(tables)


def _permuted_masks(n: int) -> Iterable[Sequence[int]]:
    if n <= 6:
        yield from _perm_tables(n)
        return
    for perm in itertools.permutations(range(n)):
        yield _LazyPermTable(perm)


class _LazyPermTable:
    __slots__ = ("perm",)

    def __init__(self, perm):
        self.perm = perm

    def __getitem__(self, mask: int) -> int:
        out = 0
        for j, target in enumerate(self.perm):
            if mask >> j & 1:
                out |= 1 << target
        return out


def _max_sorted_rows(rows: Sequence[int], width: int) -> tuple[int, ...]:
    best: tuple[int, ...] | None = None
    for table in _permuted_masks(width):
        cand = tuple(sorted((table[r] for r in rows), reverse=True))
        if best is None or cand > best:
            best = cand
    assert best is not None
    return best


def _encode_rows(rows: Sequence[int], width: int) -> str:
    return "/".join("".join("1" if r >> j & 1 else "0" for j in range(width)) for r in rows)


def canonical_form(g: BipartiteGraph) -> bytes:
    """Part-respecting isomorphism invariant of ``g``.

    The side with fewer vertices is permuted exhaustively; the other side is
    sorted.  Two graphs with the same (p, q) get equal forms iff some row
    permutation and column permutation map one biadjacency matrix onto the
    other.  Parts are never swapped.
    """
    if min(g.p, g.q) > MAX_CANONICAL_SIDE:
        raise DomainError(f"canonical_form needs min(p, q) <= {MAX_CANONICAL_SIDE}")
    if g.q <= g.p:
        rows = _max_sorted_rows(g.rows, g.q)
        body = _encode_rows(rows, g.q)
        tag = ""
    else:
        rows = _max_sorted_rows(g.columns(), g.p)
        body = _encode_rows(rows, g.p)
        tag = "T"
    return f"{g.p}x{g.q}{tag}:{body}".encode()


def from_canonical(form: bytes | str) -> BipartiteGraph:
    """Rebuild a representative graph from a canonical form."""
    if isinstance(form, bytes):
        form = form.decode()
    head, _, body = form.partition(":")
    transposed = head.endswith("T")
    p, q = (int(x) for x in head.rstrip("T").split("x"))
    rows = [[int(c) for c in line] for line in body.split("/")]
    g = from_biadjacency(rows)
    g = g.transpose() if transposed else g
    if (g.p, g.q) != (p, q):
        raise InputShapeError(f"canonical form {form!r} is inconsistent")
    return g


def automorphism_count(g: BipartiteGraph) -> int:
    """Number of (row permutation, column permutation) pairs fixing ``g``."""
    if g.q <= g.p:
        masks, width = g.rows, g.q
    else:
        masks, width = g.columns(), g.p
    target = Counter(masks)
    stabilizer = math.prod(math.factorial(m) for m in target.values())
    fixed = sum(1 for table in _permuted_masks(width) if Counter(table[r] for r in masks) == target)
    return fixed * stabilizer


def orbit_size(g: BipartiteGraph) -> int:
    """Number of labelled graphs on the same vertex sets isomorphic to ``g``."""
    return math.factorial(g.p) * math.factorial(g.q) // automorphism_count(g)


# ---------------------------------------------------------------------------
# text formats


class GraphParseError(InputShapeError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def parse_graph(text: str) -> BipartiteGraph:
    """Parse the matrix format ("p q" + p rows of 0/1) or the edge-list format
    ("p q e" + e lines "i j")."""
    lines = [(n, ln.strip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphParseError("empty graph file", 1)
    n0, header = lines[0]
    try:
        nums = [int(x) for x in header.split()]
    except ValueError:
        raise GraphParseError(f"bad header {header!r}", n0) from None
    body = lines[1:]
    if len(nums) == 2:
        p, q = nums
        if p < 1 or q < 1:
            raise GraphParseError("part orders must be >= 1", n0)
        if len(body) != p:
            line = body[p][0] if len(body) > p else (body[-1][0] + 1 if body else n0 + 1)
            raise GraphParseError(f"expected {p} matrix rows, found {len(body)}", line)
        rows = []
        for n, ln in body:
            if len(ln) != q:
                raise GraphParseError(f"row has {len(ln)} entries, expected {q}", n, min(len(ln), q) + 1)
            bad = next((c for c, ch in enumerate(ln, 1) if ch not in "01"), None)
            if bad is not None:
                raise GraphParseError(f"entry {ln[bad - 1]!r} is not 0 or 1", n, bad)
            rows.append([int(ch) for ch in ln])
        return from_biadjacency(rows)
    if len(nums) == 3:
        p, q, e = nums
        if p < 1 or q < 1:
            raise GraphParseError("part orders must be >= 1", n0)
        if len(body) != e:
            raise GraphParseError(f"expected {e} edge lines, found {len(body)}", n0)
        edges = set()
        for n, ln in body:
            parts = ln.split()
            try:
                i, j = (int(x) for x in parts)
            except ValueError:
                raise GraphParseError(f"bad edge line {ln!r}", n) from None
            if not (0 <= i < p and 0 <= j < q):
                raise GraphParseError(f"edge ({i}, {j}) outside {p}x{q}", n)
            if (i, j) in edges:
                raise GraphParseError(f"duplicate edge ({i}, {j})", n)
            edges.add((i, j))
        return from_edges(p, q, edges)
    raise GraphParseError(f"header must have 2 or 3 integers, got {len(nums)}", n0)


def format_graph(g: BipartiteGraph) -> str:
    lines = [f"{g.p} {g.q}"]
    lines += ["".join("1" if r >> j & 1 else "0" for j in range(g.q)) for r in g.rows]
    return "\n".join(lines) + "\n"
