"""Brute-force ground truth for rainbow, transversal and ordered-transversal copies.

The search is plain backtracking over bitset candidate sets: each placed host
vertex filters the remaining candidates to its neighbours or non-neighbours as
the pattern demands, so induced-ness is enforced incrementally.

Counting units: ordered-transversal counts assignments; transversal and
rainbow count distinct vertex-set images.  For the unordered kinds, block maps
are enumerated modulo pattern automorphisms (one representative per coset),
which makes the images found under different representatives disjoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .graphcore import (
    KINDS,
    ORDERED,
    RAINBOW,
    TRANSVERSAL,
    Blockade,
    Graph,
    Pattern,
    Witness,
    iter_bits,
    verify_witness,
)

DEFAULT_MAX_TUPLES = 5_000_000


class BudgetExceeded(RuntimeError):
    """The search cap was hit; the answer is indeterminate."""


@dataclass(frozen=True)
class SearchBudget:
    max_tuples: int = DEFAULT_MAX_TUPLES


def _as_budget(budget) -> SearchBudget:
    if budget is None:
        return SearchBudget()
    if isinstance(budget, int):
        return SearchBudget(budget)
    return budget


class _Meter:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self, n: int = 1):
        self.left -= n
        if self.left < 0:
            raise BudgetExceeded("search budget exhausted")


def automorphisms(h: Graph) -> list[tuple[int, ...]]:
    """All automorphisms of a small graph, as permutation tuples."""
    return list(_automorphisms(h.n, h.rows))


@lru_cache(maxsize=256)
def _automorphisms(n: int, rows: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    out = []
    degs = [r.bit_count() for r in rows]

    def rec(perm: list[int], used: int):
        i = len(perm)
        if i == n:
            out.append(tuple(perm))
            return
        for a in range(n):
            if used >> a & 1 or degs[a] != degs[i]:
                continue
            if all((rows[i] >> j & 1) == (rows[a] >> perm[j] & 1) for j in range(i)):
                perm.append(a)
                rec(perm, used | 1 << a)
                perm.pop()

    rec([], 0)
    return tuple(out)


def coset_representatives(h: Graph, targets: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Bijections sigma: V(h) -> targets, one per class sigma ~ sigma o alpha.

    The representative is the lexicographically least member of its class.
    """
    auts = _automorphisms(h.n, h.rows)
    reps = []
    for sigma in itertools.permutations(targets):
        if all(tuple(sigma[a[v]] for v in range(h.n)) >= sigma for a in auts):
            reps.append(sigma)
    return reps


def _ordered_search(g: Graph, h: Graph, masks: list[int], order: list[int], meter: _Meter,
                    count: bool):
    """Embed pattern vertex ``v`` into ``masks[v]``, placing vertices in ``order``.

    Returns the count, or the first assignment found (as a tuple) / None.
    """
    k = h.n
    rows = g.rows
    hrows = h.rows
    host = [-1] * k
    placed: list[int] = []
    total = 0

    def cands(v: int) -> int:
        c = masks[v]
        for q in placed:
            if hrows[v] >> q & 1:
                c &= rows[host[q]]
            else:
                c &= ~rows[host[q]]
            c &= ~(1 << host[q])
        return c

    def rec(depth: int):
        nonlocal total
        if depth == k:
            if count:
                total += 1
                return None
            return tuple(host)
        v = order[depth]
        c = cands(v)
        if depth == k - 1 and count:
            meter.spend()
            total += c.bit_count()
            return None
        for x in iter_bits(c):
            meter.spend()
            host[v] = x
            placed.append(v)
            r = rec(depth + 1)
            placed.pop()
            host[v] = -1
            if r is not None:
                return r
        return None

    r = rec(0)
    return total if count else r


def _check_kind(b: Blockade, p: Pattern, kind: str):
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind in (TRANSVERSAL, ORDERED) and p.k != b.k:
        raise ValueError(f"{kind} search needs pattern size {p.k} == blockade length {b.k}")
    if kind == RAINBOW and p.k > b.k:
        raise ValueError(f"rainbow pattern of size {p.k} exceeds blockade length {b.k}")


def _by_size(b: Blockade, sigma) -> list[int]:
    return sorted(range(len(sigma)), key=lambda v: (b.size(sigma[v]), sigma[v]))


def count_copies(b: Blockade, p: Pattern, kind: str = ORDERED, budget=None) -> int:
    """Exact count; raises ``BudgetExceeded`` rather than returning a partial count."""
    _check_kind(b, p, kind)
    meter = _Meter(_as_budget(budget).max_tuples)
    g, h = b.graph, p.graph
    if kind == ORDERED:
        sigma = tuple(range(b.k))
        return _ordered_search(g, h, [b.masks[i] for i in sigma], _by_size(b, sigma), meter, True)
    subsets = [tuple(range(b.k))] if kind == TRANSVERSAL else itertools.combinations(range(b.k), p.k)
    total = 0
    for sub in subsets:
        for sigma in coset_representatives(h, sub):
            total += _ordered_search(g, h, [b.masks[i] for i in sigma], _by_size(b, sigma), meter, True)
    return total


def find_copy(b: Blockade, p: Pattern, kind: str = ORDERED, budget=None) -> Optional[Witness]:
    """Lexicographically least witness, or None once the space is exhausted.

    Order: block subsets lexicographically, then host vertices listed by block
    index.
    """
    _check_kind(b, p, kind)
    meter = _Meter(_as_budget(budget).max_tuples)
    g, h = b.graph, p.graph
    if kind == ORDERED:
        sigma = tuple(range(b.k))
        a = _ordered_search(g, h, list(b.masks), list(range(b.k)), meter, False)
        if a is None:
            return None
        w = Witness(a, sigma, ORDERED)
        assert verify_witness(b, p, w)
        return w
    subsets = [tuple(range(b.k))] if kind == TRANSVERSAL else itertools.combinations(range(b.k), p.k)
    for sub in subsets:
        best = None
        for sigma in coset_representatives(h, sub):
            # place pattern vertices in increasing block order so the first hit is lex-least
            order = sorted(range(h.n), key=lambda v: sigma[v])
            a = _ordered_search(g, h, [b.masks[i] for i in sigma], order, meter, False)
            if a is None:
                continue
            key = tuple(a[v] for v in order)
            if best is None or key < best[0]:
                best = (key, a, sigma)
        if best is not None:
            w = Witness(best[1], tuple(best[2]), kind)
            assert verify_witness(b, p, w)
            return w
    return None


def count_copies_naive(b: Blockade, p: Pattern, kind: str = ORDERED) -> int:
    """Independent reference: enumerate host tuples and test isomorphism by
    trying every vertex permutation.  Only for tiny instances."""
    _check_kind(b, p, kind)
    g, h = b.graph, p.graph
    k = h.n
    pat_edges = {frozenset(e) for e in h.edges()}

    def induced(hosts) -> set:
        return {frozenset((x, y)) for x, y in itertools.combinations(range(k), 2)
                if g.adjacent(hosts[x], hosts[y])}

    if kind == ORDERED:
        return sum(1 for hosts in itertools.product(*b.blocks) if induced(hosts) == pat_edges)

    perms = list(itertools.permutations(range(k)))
    images = set()
    if kind == TRANSVERSAL:
        subsets = [tuple(range(b.k))]
    else:
        subsets = list(itertools.combinations(range(b.k), k))
    for sub in subsets:
        for hosts in itertools.product(*(b.blocks[i] for i in sub)):
            got = induced(hosts)
            for perm in perms:
                # pattern vertex x -> hosts[perm[x]]
                mapped = {frozenset((perm[x], perm[y])) for x, y in (tuple(e) for e in pat_edges)}
                if mapped == got:
                    images.add(frozenset(hosts))
                    break
    return len(images)
