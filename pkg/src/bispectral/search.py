"""Isomorphism-free enumeration of K(p,q,e) and the extremal-graph searches.

K(p,q,e) is the set of e-edge spanning subgraphs of K_{p,q} with the
bipartition orders fixed as an ordered pair.  Exhaustive runs are capped at
pq <= 25.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import random
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

from .bounds import rho_k_brace_closed
from .errors import DomainError, ScaleError
from .graph import BipartiteGraph, canonical_form, from_canonical, k_brace
from .spectral import DEFAULT_TOL, spectral_radius

log = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 25

CONFIRMED = "confirmed"
REFUTED = "refuted"
INAPPLICABLE = "inapplicable"
SAMPLED = "sampled"


@dataclass(frozen=True)
class EnumerationSpec:
    p: int
    q: int
    e: int
    dedupe_transpose: bool = False
    shard: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise DomainError(f"part orders must be >= 1, got ({self.p}, {self.q})")
        if not 0 <= self.e <= self.p * self.q:
            raise DomainError(f"need 0 <= e <= pq, got e={self.e}")
        k, m = self.shard
        if not (m >= 1 and 0 <= k < m):
            raise DomainError(f"bad shard {self.shard}")


def class_key(g: BipartiteGraph, dedupe_transpose: bool = False) -> bytes:
    """Canonical form, optionally identifying g with its part swap when p = q."""
    form = canonical_form(g)
    if dedupe_transpose and g.p == g.q:
        form = min(form, canonical_form(g.transpose()))
    return form


def shard_of(form: bytes, count: int) -> int:
    return zlib.crc32(form) % count


def _row_multisets(p: int, q: int, e: int) -> Iterator[tuple[int, ...]]:
    """Rows sorted by (popcount, value) descending with total popcount e and
    non-increasing column degrees."""
    masks = sorted(range(1 << q), key=lambda m: (m.bit_count(), m), reverse=True)
    pops = [m.bit_count() for m in masks]
    rows: list[int] = []

    def rec(start: int, left: int, remaining: int):
        if left == 0:
            if remaining == 0:
                yield tuple(rows)
            return
        for idx in range(start, len(masks)):
            c = pops[idx]
            if c > remaining:
                continue
            if c * left < remaining:
                break  # pops only decrease from here
            rows.append(masks[idx])
            yield from rec(idx, left - 1, remaining - c)
            rows.pop()

    for cand in rec(0, p, e):
        degs = [sum(r >> j & 1 for r in cand) for j in range(q)]
        if all(a >= b for a, b in zip(degs, degs[1:])):
            yield cand


def _class_forms(spec: EnumerationSpec) -> Iterator[bytes]:
    if spec.p * spec.q > EXHAUSTIVE_CAP:
        raise ScaleError(
            f"exhaustive enumeration is capped at pq <= {EXHAUSTIVE_CAP}; "
            f"use sample_kpqe for ({spec.p}, {spec.q})"
        )
    k, m = spec.shard
    seen: set[bytes] = set()
    for rows in _row_multisets(spec.p, spec.q, spec.e):
        form = class_key(BipartiteGraph(spec.p, spec.q, rows), spec.dedupe_transpose)
        if form in seen:
            continue
        seen.add(form)
        if m == 1 or shard_of(form, m) == k:
            yield form


def enumerate_kpqe(spec: EnumerationSpec) -> Iterator[BipartiteGraph]:
    """One representative per isomorphism class of K(p,q,e), in a fixed order.

    Representatives are rebuilt from their canonical forms.  With
    ``shard=(k, m)`` only classes whose canonical form hashes to k mod m are
    produced, so the m shards partition the class set.
    """
    for form in _class_forms(spec):
        yield from_canonical(form)


def sample_kpqe(p: int, q: int, e: int, n: int, seed: int = 0) -> Iterator[BipartiteGraph]:
    """``n`` labelled graphs drawn uniformly from K(p,q,e)."""
    if not 0 <= e <= p * q:
        raise DomainError(f"need 0 <= e <= pq, got e={e}")
    rng = random.Random(seed)
    cells = list(itertools.product(range(p), range(q)))
    for _ in range(n):
        rows = [0] * p
        for i, j in rng.sample(cells, e):
            rows[i] |= 1 << j
        yield BipartiteGraph(p, q, tuple(rows))


@dataclass(frozen=True)
class SearchRecord:
    spec: EnumerationSpec
    class_count: int
    max_rho: float
    maximizers: tuple[bytes, ...]
    extremal_value: float | None
    verdict: str
    # rho of each retained maximizer, aligned with ``maximizers``
    maximizer_rhos: tuple[float, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        s = self.spec
        return {
            "kind": "max",
            "p": s.p,
            "q": s.q,
            "e": s.e,
            "classes": self.class_count,
            "max_rho": self.max_rho,
            "extremal_rho": self.extremal_value,
            "verdict": self.verdict,
            "maximizers": [m.decode() for m in self.maximizers],
        }


def in_conjecture2_range(p: int, q: int, e: int) -> bool:
    return 0 < p * q - e < min(p, q)


def _partial_max(spec: EnumerationSpec, tol: float) -> tuple[int, float, list[tuple[bytes, float]]]:
    scored = [(form, spectral_radius(from_canonical(form), tol / 10)) for form in _class_forms(spec)]
    best = max((r for _, r in scored), default=-math.inf)
    return len(scored), best, [(f, r) for f, r in scored if r >= best - tol]


def _finish(spec: EnumerationSpec, count: int, best: float, tied: Iterable[tuple[bytes, float]], tol: float) -> SearchRecord:
    tied = sorted((f, r) for f, r in tied if r >= best - tol)
    forms = tuple(f for f, _ in tied)
    p, q, e = spec.p, spec.q, spec.e
    if in_conjecture2_range(p, q, e):
        extremal = rho_k_brace_closed(p, q, e)
        target = class_key(k_brace(p, q, e), spec.dedupe_transpose)
        ok = abs(best - extremal) <= tol and target in forms
        verdict = CONFIRMED if ok else REFUTED
    else:
        extremal, verdict = None, INAPPLICABLE
    return SearchRecord(spec, count, best, forms, extremal, verdict, tuple(r for _, r in tied))


def merge_partials(spec: EnumerationSpec, partials, tol: float) -> SearchRecord:
    """Reduce per-shard (count, max, ties) triples into one record.

    The result does not depend on the order of ``partials``.
    """
    count = sum(c for c, _, _ in partials)
    best = max((b for _, b, _ in partials), default=-math.inf)
    tied = [t for _, _, ts in partials for t in ts]
    return _finish(spec, count, best, tied, tol)


def _run_shard(args):
    spec, tol = args
    return _partial_max(spec, tol)


def max_spectral(spec: EnumerationSpec, tol: float = DEFAULT_TOL, workers: int = 1) -> SearchRecord:
    """Maximum spectral radius over K(p,q,e) with every class attaining it.

    With ``workers > 1`` (and an unsharded spec) the class set is split
    into ``workers`` shards evaluated in separate processes.
    """
    if spec.shard != (0, 1) or workers <= 1:
        return merge_partials(spec, [_partial_max(spec, tol)], tol)
    shards = [replace(spec, shard=(k, workers)) for k in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        partials = list(pool.map(_run_shard, [(s, tol) for s in shards]))
    return merge_partials(spec, partials, tol)


def max_spectral_sampled(p: int, q: int, e: int, samples: int, seed: int = 0, tol: float = DEFAULT_TOL) -> SearchRecord:
    """Randomised stand-in for max_spectral beyond the exhaustive cap.

    ``class_count`` is the number of samples drawn; the verdict is always
    ``sampled``.
    """
    spec = EnumerationSpec(p, q, e)
    best = -math.inf
    tied: dict[bytes, float] = {}
    for g in sample_kpqe(p, q, e, samples, seed):
        rho = spectral_radius(g, tol / 10)
        if rho < best - tol:
            continue
        best = max(best, rho)
        try:
            key = canonical_form(g)
        except DomainError:
            key = b"%dx%d:" % (p, q) + ",".join(map(str, g.rows)).encode()
        tied[key] = rho
    tied_list = sorted((f, r) for f, r in tied.items() if r >= best - tol)
    extremal = rho_k_brace_closed(p, q, e) if in_conjecture2_range(p, q, e) else None
    return SearchRecord(
        spec, samples, best, tuple(f for f, _ in tied_list), extremal, SAMPLED, tuple(r for _, r in tied_list)
    )


def verify_conjecture2(p: int, q: int, e: int, tol: float = DEFAULT_TOL, workers: int = 1) -> SearchRecord:
    """Exhaustively check rho(G) <= rho(K^{e}_{p,q}) on K(p,q,e), 0 < pq-e < min(p,q)."""
    if not in_conjecture2_range(p, q, e):
        raise DomainError(f"({p}, {q}, {e}) violates 0 < pq - e < min(p, q)")
    record = max_spectral(EnumerationSpec(p, q, e), tol, workers)
    if record.verdict == REFUTED:
        log.error(
            "REFUTED at (p, q, e) = (%d, %d, %d): max rho %.15g vs closed form %.15g; maximizers %s",
            p, q, e, record.max_rho, record.extremal_value, record.maximizers,
        )
    return record


@dataclass(frozen=True)
class ConjectureVerdict:
    spec: EnumerationSpec
    max_rho: float
    class_count: int
    best_st: tuple[int, int] | None
    found: bool
    hits: tuple[tuple[int, int, float], ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": "scan3",
            "p": self.spec.p,
            "q": self.spec.q,
            "e": self.spec.e,
            "classes": self.class_count,
            "max_rho": self.max_rho,
            "found": self.found,
            "witness": list(self.best_st) if self.best_st else None,
        }


def brace_candidates(p: int, q: int, e: int) -> list[tuple[int, int, float]]:
    """(s, t, rho(K^{e}_{s,t})) for s <= p, t <= q, 0 <= st - e <= min(s, t),
    ordered by decreasing st then increasing s."""
    out = []
    for s in range(1, p + 1):
        for t in range(1, q + 1):
            k = s * t - e
            if 0 <= k <= min(s, t):
                rho = math.sqrt(e) if k == 0 else rho_k_brace_closed(s, t, e)
                out.append((s, t, rho))
    out.sort(key=lambda c: (-c[0] * c[1], c[0]))
    return out


def scan_conjecture3(
    p: int,
    q: int,
    e: int,
    tol: float = DEFAULT_TOL,
    list_all: bool = False,
    workers: int = 1,
    record: SearchRecord | None = None,
) -> ConjectureVerdict:
    """Look for s <= p, t <= q with 0 <= st - e <= min(s, t) and
    rho(K^{e}_{s,t}) >= max rho over K(p,q,e).

    A miss is a candidate counterexample for human review, not a disproof.
    """
    spec = EnumerationSpec(p, q, e)
    if record is None:
        record = max_spectral(spec, tol, workers)
    hits = []
    for s, t, rho in brace_candidates(p, q, e):
        if rho >= record.max_rho - tol:
            hits.append((s, t, rho))
            if not list_all:
                break
    best = (hits[0][0], hits[0][1]) if hits else None
    return ConjectureVerdict(spec, record.max_rho, record.class_count, best, bool(hits), tuple(hits))


# ---------------------------------------------------------------------------
# JSONL result log


def append_jsonl(path: str | Path, obj: dict) -> None:
    with open(path, "a") as fh:
        fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError:
                log.warning("skipping unreadable log line %d in %s", n, path)
    return out


def completed_cells(path: str | Path, kind: str) -> set[tuple[int, int, int]]:
    return {(r["p"], r["q"], r["e"]) for r in read_jsonl(path) if r.get("kind") == kind}
