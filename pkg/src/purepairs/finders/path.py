"""Transversal induced path with an end in the first block.

Blocks are visited in an order t_1 = 0, t_2, ... chosen on the fly.  At step
i the candidate set D holds the vertices of B_{t_i} adjacent to A_{t_{i-1}}
but to no earlier A; A_{t_i} is grown from D in ascending order until some
unvisited block has at least eps|B_j| of its still-clean vertices dominated,
and the first such block becomes t_{i+1}.  The path is read off backwards,
always taking the least adjacent predecessor.
"""

from __future__ import annotations

from fractions import Fraction

from .. import bounds
from ..exact import Threshold, frac_of
from ..graphcore import TRANSVERSAL, Blockade, Witness, lowest, path_pattern
from .outcome import FinderOutcome, FinderPrecondition, Tracer


def _nbhd_rows(rows, mask: int) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= rows[low.bit_length() - 1]
        mask ^= low
    return out


def find_transversal_path(b: Blockade, eps=None) -> FinderOutcome:
    k = b.k
    if k < 2:
        raise FinderPrecondition("path finder needs at least two blocks")
    card = bounds.regime_card("path", k=k, eps=eps)
    eps = card.eps
    pattern = path_pattern(k)
    tr = Tracer(card)
    rows = b.graph.rows
    masks = b.masks
    order = [0]
    A: dict[int, int] = {}
    n_earlier = 0  # vertices with a neighbour in A_{t_1..t_{i-2}}
    n_prev = 0     # vertices with a neighbour in A_{t_{i-1}}
    for i in range(1, k + 1):
        cur = order[-1]
        if i == 1:
            D = masks[cur]
        else:
            D = masks[cur] & n_prev & ~n_earlier
            tr.at_least(f"{i}:D-size", frac_of(eps, b.size(cur)), D.bit_count())
        if not D:
            return tr.fail(f"{i}:D-nonempty", 1, 0, pattern=pattern)
        if i == k:
            A[cur] = D
            break
        n_all = n_earlier | n_prev
        unused = [j for j in range(k) if j not in order]
        C = {j: masks[j] & ~n_all for j in unused}
        floor = 1 - 2 * (i - 1) * eps
        for j in unused:
            tr.at_least(f"{i}:C-floor[{j}]", Threshold(max(floor, Fraction(0)) * b.size(j)), C[j].bit_count())
        thr = {j: frac_of(eps, b.size(j)) for j in unused}
        grown = 0
        hit = {j: 0 for j in unused}
        nxt = None
        rest = D
        while rest and nxt is None:
            v = lowest(rest)
            rest &= rest - 1
            grown |= 1 << v
            for j in unused:
                hit[j] |= C[j] & rows[v]
            for j in unused:
                if thr[j].le(hit[j].bit_count()):
                    nxt = j
                    break
        if nxt is None:
            best = max(unused, key=lambda j: (hit[j].bit_count(), -j))
            return tr.fail(f"{i}:cover", thr[best], hit[best].bit_count(),
                           "no unvisited block reached the threshold", pattern)
        tr.log(f"{i}:cover", thr[nxt], hit[nxt].bit_count(), True,
               f"|A|={grown.bit_count()} of |D|={D.bit_count()}, next block {nxt}")
        A[cur] = grown
        order.append(nxt)
        n_earlier |= n_prev
        n_prev = _nbhd_rows(rows, grown)
    # read the path off backwards
    hosts = [0] * k
    hosts[k - 1] = lowest(A[order[k - 1]])
    for i in range(k - 2, -1, -1):
        cand = A[order[i]] & rows[hosts[i + 1]]
        if not cand:
            return tr.fail("backtrace", 1, 0, pattern=pattern)
        hosts[i] = lowest(cand)
    w = Witness(tuple(hosts), tuple(order), TRANSVERSAL)
    return tr.success(b, pattern, w)
