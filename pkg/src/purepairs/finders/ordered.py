"""Ordered transversal trees: the caterpillar recursion and a tree embedder.

Ordered means pattern vertex i must land in block i.

Caterpillar recursion, with a current head h and a candidate set C for it:

* if h still has at least two neighbours, take a leaf neighbour j, choose
  u_j in block j seeing as much of C as possible, shrink C to N(u_j) and
  clear N(u_j) out of every other remaining block;
* if h has exactly one neighbour j, choose u_h in C with at least
  W^(1-1/d)/2 neighbours in block j, clear N(u_h) elsewhere and continue
  with j as the head and those neighbours as its candidates.

Every chosen vertex strips its neighbourhood from the blocks that must stay
non-adjacent to it, so the copy is induced by construction.
"""

from __future__ import annotations

from fractions import Fraction

from .. import bounds
from ..exact import Threshold, power_of
from ..graphcore import ORDERED, Blockade, Pattern, Witness, iter_bits, lowest
from .outcome import FinderOutcome, FinderPrecondition, Tracer


def _check_tree(p: Pattern) -> None:
    h = p.graph
    if h.num_edges() != h.n - 1:
        raise FinderPrecondition("pattern is not a tree")
    seen = 1
    frontier = 1
    while frontier:
        v = lowest(frontier)
        frontier &= frontier - 1
        new = h.rows[v] & ~seen
        seen |= new
        frontier |= new
    if seen.bit_count() != h.n:
        raise FinderPrecondition("pattern is not connected")


def caterpillar_spine(p: Pattern) -> list[int]:
    """Vertices of degree > 1 in path order; raises if they do not form a path."""
    _check_tree(p)
    h = p.graph
    spine = [v for v in range(h.n) if h.degree(v) > 1]
    if len(spine) <= 1:
        return spine
    smask = sum(1 << v for v in spine)
    sdeg = {v: (h.rows[v] & smask).bit_count() for v in spine}
    ends = [v for v in spine if sdeg[v] == 1]
    if len(ends) != 2 or any(d > 2 for d in sdeg.values()):
        raise FinderPrecondition("pattern is not a caterpillar")
    order = [ends[0]]
    prev = -1
    while len(order) < len(spine):
        cur = order[-1]
        nxt = [u for u in iter_bits(h.rows[cur] & smask) if u != prev]
        prev = cur
        order.append(nxt[0])
    return order


def is_head(p: Pattern, v: int) -> bool:
    spine = caterpillar_spine(p)
    h = p.graph
    if len(spine) <= 1:
        return True
    if v in spine:
        return v in (spine[0], spine[-1])
    (u,) = list(iter_bits(h.rows[v]))
    return u in (spine[0], spine[-1])


def find_ordered_caterpillar(b: Blockade, p: Pattern, head: int = 0, C1=None, eps=None, d=None) -> FinderOutcome:
    """Ordered transversal copy of the caterpillar ``p`` with ``head`` mapped into ``C1``.

    ``C1`` is a vertex mask (or iterable of vertices) inside the head's block;
    it defaults to the whole block.
    """
    k = p.k
    if b.k != k:
        raise FinderPrecondition(f"ordered pattern on {k} vertices needs {k} blocks, got {b.k}")
    if not 0 <= head < k:
        raise FinderPrecondition("head out of range")
    h = p.graph
    if not is_head(p, head):
        raise FinderPrecondition(f"vertex {head} is not a head of the caterpillar")
    maxdeg = max((h.degree(v) for v in range(k)), default=0)
    d = max(maxdeg, 1) if d is None else d
    if d < max(maxdeg, 1):
        raise FinderPrecondition(f"d={d} is below the pattern's maximum degree {maxdeg}")
    card = bounds.regime_card("caterpillar", k=k, d=d, eps=eps)
    W = b.width
    tr = Tracer(card, W)
    rows = b.graph.rows
    if C1 is None:
        C = b.masks[head]
    elif isinstance(C1, int):
        C = C1
    else:
        C = sum(1 << v for v in set(C1))
    if C & ~b.masks[head]:
        raise FinderPrecondition("C1 must lie inside the head's block")
    d1 = h.degree(head)
    tr.at_least("C1-floor", power_of(Fraction(4) ** (d1 - d), W, Fraction(d1, d)), C.bit_count())

    cand = {i: b.masks[i] for i in range(k)}
    cand[head] = C
    left = set(range(k))
    host: dict[int, int] = {}
    cur = head
    step = 0
    inv = Fraction(1, d)

    def strip(u: int, keep: set):
        for i in left:
            if i not in keep:
                cand[i] &= ~rows[u]

    while True:
        step += 1
        nbrs = [j for j in iter_bits(h.rows[cur]) if j in left]
        width = max(1, min([b.size(cur)] + [cand[i].bit_count() for i in left if i != cur]))
        if len(left) == 1:
            if not cand[cur]:
                return tr.fail(f"{step}:last", 1, 0, f"vertex {cur}", p)
            host[cur] = lowest(cand[cur])
            tr.log(f"{step}:last", 1, cand[cur].bit_count(), True, f"vertex {cur}")
            break
        if len(nbrs) >= 2:
            leaves = [j for j in nbrs if sum(1 for x in iter_bits(h.rows[j]) if x in left) == 1]
            j = leaves[0]
            best, cnt = None, -1
            for u in iter_bits(cand[j]):
                m = (rows[u] & cand[cur]).bit_count()
                if m > cnt:
                    best, cnt = u, m
            need = power_of(Fraction(cand[cur].bit_count(), 4), width, -inv)
            if best is None or cnt == 0:
                return tr.fail(f"{step}:leaf[{j}]", need, max(cnt, 0), "no vertex sees the head's set", p)
            tr.at_least(f"{step}:leaf[{j}]", need, cnt, f"u={best}")
            host[j] = best
            left.discard(j)
            cand[cur] &= rows[best]
            strip(best, {cur})
            continue
        if len(nbrs) == 1:
            j = nbrs[0]
            thr = power_of(Fraction(1, 2), width, 1 - inv)
            chosen, met, cnt = None, False, 0
            for u in iter_bits(cand[cur]):
                m = (rows[u] & cand[j]).bit_count()
                if thr.le(m):
                    chosen, met, cnt = u, True, m
                    break
                if m > cnt:
                    chosen, cnt = u, m
            if chosen is None:
                return tr.fail(f"{step}:move[{cur}->{j}]", thr, 0, "no candidate sees the next block", p)
            tr.log(f"{step}:move[{cur}->{j}]", thr, cnt, met, f"u={chosen}")
            host[cur] = chosen
            left.discard(cur)
            cand[j] &= rows[chosen]
            strip(chosen, {j})
            cur = j
            continue
        raise FinderPrecondition("pattern is not connected")
    w = Witness(tuple(host[i] for i in range(k)), tuple(range(k)), ORDERED)
    return tr.success(b, p, w)


def peel_order_ok(p: Pattern) -> bool:
    """Every vertex after the first has exactly one earlier neighbour."""
    h = p.graph
    return all((h.rows[i] & ((1 << i) - 1)).bit_count() == 1 for i in range(1, h.n))


def embed_ordered_tree(b: Blockade, p: Pattern, c=None, budget: int = 1_000_000) -> FinderOutcome:
    """Ordered transversal copy of an ordered tree, extending one vertex at a time.

    Vertex i is placed among the vertices of block i adjacent to its unique
    earlier neighbour and non-adjacent to the rest of the partial image,
    backtracking when an extension runs dry.
    """
    k = p.k
    if b.k != k:
        raise FinderPrecondition(f"ordered pattern on {k} vertices needs {k} blocks, got {b.k}")
    _check_tree(p)
    if not peel_order_ok(p):
        raise FinderPrecondition("ordering cannot be peeled leaf-last: some vertex has no single earlier neighbour")
    card = bounds.regime_card("tree-count", k=k, c=c)
    W = b.width
    tr = Tracer(card, W)
    rows = b.graph.rows
    hrows = p.graph.rows
    host = [-1] * k
    nodes = 0
    best_depth = [0]

    def cands(i: int) -> int:
        m = b.masks[i]
        for q in range(i):
            m = m & rows[host[q]] if hrows[i] >> q & 1 else m & ~rows[host[q]]
        return m

    def rec(i: int) -> bool:
        nonlocal nodes
        if i == k:
            return True
        best_depth[0] = max(best_depth[0], i)
        for v in iter_bits(cands(i)):
            nodes += 1
            if nodes > budget:
                return False
            host[i] = v
            if rec(i + 1):
                return True
        host[i] = -1
        return False

    found = rec(0)
    tr.log("count-floor", card.thresholds(W)["count_floor"], "see oracle count", True,
           "guaranteed number of copies when the premises hold")
    if not found:
        if nodes > budget:
            return tr.fail("budget", budget, nodes, "search budget exhausted", p)
        return tr.fail(f"extend[{best_depth[0]}]", 1, 0, "no extension of any partial copy", p)
    tr.log("extend", k, k, True, f"{nodes} nodes")
    w = Witness(tuple(host), tuple(range(k)), ORDERED)
    return tr.success(b, p, w)
