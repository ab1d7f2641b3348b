"""Transversal cycles: C_4 on four blocks, C_k on k >= 5 blocks.

Both finders follow the counting arguments step by step.  Each selection
first looks for a vertex meeting the quantitative bound; when none exists
(off-regime) it falls back to any vertex that still keeps the construction
alive, and records the missed bound as a failed stage.  A step only aborts
when no usable vertex is left at all.
"""

from __future__ import annotations

from fractions import Fraction

from .. import bounds
from ..exact import Threshold
from ..graphcore import TRANSVERSAL, Blockade, Witness, cycle_pattern, iter_bits, lowest
from .outcome import FinderOutcome, FinderPrecondition, Tracer


def _nbhd(rows, mask: int) -> int:
    out = 0
    for v in iter_bits(mask):
        out |= rows[v]
    return out & ~mask


def _pick(rows, pool: int, targets: list[int], thr: Threshold):
    """Lowest v in ``pool`` with at least ``thr`` neighbours in every target.

    Falls back to the v maximising the smallest count (ties: lowest) as long
    as that count is positive.  Returns (v, met, smallest count) or None.
    """
    best = None
    for v in iter_bits(pool):
        m = min((rows[v] & T).bit_count() for T in targets)
        if thr.le(m):
            return v, True, m
        if m > 0 and (best is None or m > best[1]):
            best = (v, m)
    if best is None:
        return None
    return best[0], False, best[1]


def _cycle_witness(tr: Tracer, b: Blockade, seq: list[tuple[int, int]], k: int) -> FinderOutcome:
    w = Witness(tuple(h for _, h in seq), tuple(blk for blk, _ in seq), TRANSVERSAL)
    return tr.success(b, cycle_pattern(k), w)


def find_transversal_c4(b: Blockade, eps=None, c=None) -> FinderOutcome:
    if b.k != 4:
        raise FinderPrecondition(f"4-cycle finder needs exactly 4 blocks, got {b.k}")
    card = bounds.regime_card("cycle4", eps=eps, c=c)
    pattern = cycle_pattern(4)
    tr = Tracer(card)
    rows = b.graph.rows
    B = b.masks
    W = b.width
    half = card.half_co_root(W)      # W^(1-c)/2
    small = card.eps_root(W)         # eps W^c

    # (2) classify the edges between blocks 2 and 3
    edges = [(x, y) for x in iter_bits(B[2]) for y in iter_bits(rows[x] & B[3])]
    one = [(x, y) for x, y in edges if half.le((rows[x] & B[3]).bit_count())]
    two = [(x, y) for x, y in one if half.le((rows[y] & B[1] & ~rows[x]).bit_count())]
    tr.log("2:two-good", Fraction(len(edges), 2), len(two), 2 * len(two) > len(edges) > 0,
           f"{len(edges)} edges, {len(one)} 1-good")
    if not edges:
        return tr.fail("3:edge", 1, 0, "no edge between blocks 2 and 3", pattern)

    # (3) direct completion through a C_1-C_2 edge; blocks 0 and 1 play
    # symmetric roles, so both orientations are tried
    pairs = []
    for x, y in edges:
        for p, q in ((0, 1), (1, 0)):
            C1 = B[p] & rows[x] & ~rows[y]
            C2 = B[q] & rows[y] & ~rows[x]
            for a in iter_bits(C1):
                hit = rows[a] & C2
                if hit:
                    tr.log("3:direct", 1, 1, True, f"edge {x}-{y}")
                    return _cycle_witness(tr, b, [(2, x), (p, a), (q, lowest(hit)), (3, y)], 4)
            pairs.append((x, y, C1, C2))
    tr.log("3:direct", "C_1-C_2 edge", "none", True, "C_1, C_2 anticomplete for every edge")
    good = [p for p in pairs if half.le(p[2].bit_count()) and half.le(p[3].bit_count())]
    if good:
        x, y, C1, C2 = good[0]
        tr.log("3:anticomplete-pair", half, min(C1.bit_count(), C2.bit_count()), True, f"edge {x}-{y}")
    else:
        x, y, C1, C2 = max(pairs, key=lambda p: min(p[2].bit_count(), p[3].bit_count()))
        m = min(C1.bit_count(), C2.bit_count())
        tr.log("3:anticomplete-pair", half, m, False, f"best edge {x}-{y}")
        if m == 0:
            return tr.fail("3:nonempty", 1, 0, pattern=pattern)

    # (4) a vertex of block 2 seeing both sides
    got = _pick(rows, B[2], [C1, C2], small)
    if got is None:
        return tr.fail("4:v3", small, 0, "no vertex of block 2 sees both C_1 and C_2", pattern)
    v3, met, m = got
    tr.log("4:v3", small, m, met, f"v3={v3}")
    A1, A2 = rows[v3] & C1, rows[v3] & C2

    # final: a vertex of block 3 joining A_1 and A_2, missing v3
    pool = B[3] & ~rows[v3]
    for v4 in iter_bits(pool):
        h1, h2 = rows[v4] & A1, rows[v4] & A2
        if h1 and h2:
            tr.log("5:v4", 1, 1, True, f"v4={v4}")
            a1, a2 = lowest(h1), lowest(h2)
            return _cycle_witness(tr, b, [(2, v3), (b.block_of(a1), a1), (3, v4), (b.block_of(a2), a2)], 4)
    return tr.fail("5:v4", 1, 0, "no vertex of block 3 closes the cycle", pattern)


def induced_path(b: Blockade, seq: list[tuple[int, int]], thr: Threshold, tr: Tracer, tag: str):
    """Induced path v_1-...-v_s with v_r in the r-th (block, set) of ``seq``.

    Level by level: v_1 is the lowest vertex with at least ``thr``
    neighbours in the next set; the next set shrinks to those neighbours and
    every later set drops the neighbours of v_1.  Returns the hosts or None.
    """
    rows = b.graph.rows
    sets = [m for _, m in seq]
    out = []
    for r in range(len(seq)):
        if r == len(seq) - 1:
            if not sets[r]:
                tr.log(f"{tag}[{r}]", 1, 0, False)
                return None
            out.append(lowest(sets[r]))
            break
        got = _pick(rows, sets[r], [sets[r + 1]], thr)
        if got is None:
            tr.log(f"{tag}[{r}]", thr, 0, False, f"block {seq[r][0]}")
            return None
        v, met, m = got
        tr.log(f"{tag}[{r}]", thr, m, met, f"block {seq[r][0]}")
        out.append(v)
        sets[r + 1] &= rows[v]
        for q in range(r + 2, len(seq)):
            sets[q] &= ~rows[v]
    return out


def find_transversal_cycle(b: Blockade, eps=None, c=None) -> FinderOutcome:
    k = b.k
    if k < 5:
        raise FinderPrecondition(f"k-cycle finder needs at least 5 blocks, got {k}")
    card = bounds.regime_card("cycle", k=k, eps=eps, c=c)
    pattern = cycle_pattern(k)
    tr = Tracer(card)
    rows = b.graph.rows
    B = b.masks
    W = b.width
    half = card.half_co_root(W)

    # v1 in block 0 with many neighbours in blocks 1 and 2
    got = _pick(rows, B[0], [B[1], B[2]], half)
    if got is None:
        return tr.fail("v1", half, 0, "no vertex of block 0 sees blocks 1 and 2", pattern)
    v1, met, m = got
    tr.log("v1", half, m, met, f"v1={v1}")
    A = {1: B[1] & rows[v1], 2: B[2] & rows[v1]}
    for i in range(3, k):
        A[i] = B[i] & ~rows[v1]

    # least prefix C_2 of A_1 dominating a third of some later block
    C2 = 0
    hit = {i: 0 for i in range(3, k)}
    j4 = None
    rest = A[1]
    while rest and j4 is None:
        v = lowest(rest)
        rest &= rest - 1
        C2 |= 1 << v
        for i in hit:
            hit[i] |= A[i] & rows[v]
        for i in sorted(hit):
            if 3 * hit[i].bit_count() >= b.size(i):
                j4 = i
                break
    if j4 is None:
        best = max(hit, key=lambda i: (hit[i].bit_count(), -i))
        return tr.fail("C2-cover", Threshold(Fraction(b.size(best), 3)), hit[best].bit_count(), pattern=pattern)
    tr.log("C2-cover", Threshold(Fraction(b.size(j4), 3)), hit[j4].bit_count(), True,
           f"|C_2|={C2.bit_count()}, block {j4} plays B_4")
    nC2 = _nbhd(rows, C2)
    C = {j4: A[j4] & nC2}
    tail = [i for i in range(3, k) if i != j4]
    for i in tail:
        C[i] = A[i] & ~nC2
        tr.at_least(f"C-floor[{i}]", Threshold(Fraction(b.size(i), 3)), C[i].bit_count())
    j5, later = tail[0], tail[1:]

    got = _pick(rows, A[2], [C[j5]], half)
    if got is None:
        return tr.fail("v3", half, 0, f"no vertex of A_2 sees block {j5}", pattern)
    v3, met, m = got
    tr.log("v3", half, m, met, f"v3={v3}, block {j5} plays B_5")
    D = {j5: C[j5] & rows[v3], 0: B[0] & ~rows[v3], j4: C[j4] & ~rows[v3]}
    for i in later:
        D[i] = C[i] & ~rows[v3]
    mid = [(i, D[i]) for i in later]

    def close(path_seq, tag):
        hosts = induced_path(b, path_seq, half, tr, tag)
        if hosts is None:
            return None
        return list(zip([blk for blk, _ in path_seq], hosts))

    D4 = D[j4]
    C2_far = C2 & ~rows[v3]
    seen_far = D4 & _nbhd(rows, C2_far)
    if 2 * seen_far.bit_count() >= D4.bit_count() and seen_far:
        tr.log("case", Threshold(Fraction(D4.bit_count(), 2)), seen_far.bit_count(), True,
               "D_4 reached through C_2 away from v3")
        path = close([(j5, D[j5])] + mid + [(j4, seen_far)], "path")
        if path is None:
            return tr.outcome(None, pattern)
        v4 = path[-1][1]
        v2 = lowest(C2_far & rows[v4])
        return _cycle_witness(tr, b, path + [(1, v2), (0, v1), (2, v3)], k)

    # D_2 inside C_2 and N(v3), grown until it reaches half of D_4 or of D_1
    D1 = D[0]
    near = C2 & rows[v3]
    D2 = 0
    h4 = h1 = 0
    sub = None
    rest = near
    while rest and sub is None:
        v = lowest(rest)
        rest &= rest - 1
        D2 |= 1 << v
        h4 |= D4 & rows[v]
        h1 |= D1 & rows[v]
        if h4 and 2 * h4.bit_count() >= D4.bit_count():
            sub = "a"
        elif h1 and 2 * h1.bit_count() >= D1.bit_count():
            sub = "b"
    if sub is None:
        return tr.fail("case", "half of D_4 or D_1", max(h4.bit_count(), h1.bit_count()), pattern=pattern)
    nD2 = _nbhd(rows, D2)
    if sub == "a":
        tr.log("case", Threshold(Fraction(D4.bit_count(), 2)), h4.bit_count(), True, "D_2 reaches half of D_4")
        path = close([(j5, D[j5])] + mid + [(0, D1 & ~nD2), (j4, D4 & nD2)], "path")
        if path is None:
            return tr.outcome(None, pattern)
        v4 = path[-1][1]
        v2 = lowest(D2 & rows[v4])
        return _cycle_witness(tr, b, path + [(1, v2), (2, v3)], k)
    tr.log("case", Threshold(Fraction(D1.bit_count(), 2)), h1.bit_count(), True, "D_2 reaches half of D_1")
    path = close([(j5, D[j5])] + mid + [(j4, D4 & ~nD2), (0, D1 & nD2)], "path")
    if path is None:
        return tr.outcome(None, pattern)
    v1p = path[-1][1]
    v2 = lowest(D2 & rows[v1p])
    return _cycle_witness(tr, b, path + [(1, v2), (2, v3)], k)
