"""Transversal brooms B(k, t) through a covering digraph.

Pipeline, in order:

(1) build a tau-covering digraph J; if some block q has t in-neighbours, find a
    path on the cores ending in A_q and hang one vertex of each X_{j,q} on it;
(2) otherwise pick 2^t+1 blocks, pairwise non-adjacent in J with no shared
    out-neighbour, greedily by least outdegree;
(3) build a maximal family of disjoint rainbow S_{t+1} copies on those cores,
    keep the most common type, and take the least prefix F of it such that
    F inside some star block r dominates 1/(2t+2) of a remaining core A_s;
(5)/(6) keep the vertices of A_s that see F only inside A_r, clear the other
    path blocks of anything touching F, run the path finder from A_s, and
    join the path to the star through an edge uv.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

from .. import bounds
from ..exact import Threshold
from ..graphcore import TRANSVERSAL, Blockade, Witness, broom_pattern, iter_bits, lowest
from .covering import build_covering_digraph
from .outcome import FinderOutcome, FinderPrecondition, Tracer
from .path import find_transversal_path


def _nbhd(rows, mask: int) -> int:
    out = 0
    for v in iter_bits(mask):
        out |= rows[v]
    return out & ~mask


def _run_path(b: Blockade, sets: list[tuple[int, int]], tr: Tracer, prefix: str):
    """Transversal path over (block, set) pairs, starting in the first set.

    Returns a list of (block, host) from the first set outwards, or None.
    """
    if len(sets) == 1:
        blk, m = sets[0]
        return [(blk, lowest(m))]
    sub = Blockade(b.graph, [list(iter_bits(m)) for _, m in sets])
    out = find_transversal_path(sub)
    for st in out.trace:
        tr.stages.append(type(st)(f"{prefix}/{st.name}", st.required, st.measured, st.passed, st.note))
    if not out.ok:
        return None
    w = out.result
    return [(sets[blk][0], h) for h, blk in zip(w.assignment, w.blocks_used)]


def independent_blocks(J, want: int) -> list[int]:
    """Greedy selection: least outdegree first, deleting its conflict set each time."""
    left = set(range(J.k))
    chosen = []
    while left and len(chosen) < want:
        outs = {i: [j for j in J.out_nbrs(i) if j in left] for i in left}
        i = min(left, key=lambda v: (len(outs[v]), v))
        ins = [j for j in J.in_nbrs(i) if j in left]
        share = [h for h in left if h != i and set(outs[h]) & set(outs[i])]
        chosen.append(i)
        left -= {i, *ins, *outs[i], *share}
    return sorted(chosen)


def star_family(b: Blockade, cores: dict[int, int], blocks: list[int], t: int, max_nodes: int):
    """Maximal family of disjoint rainbow S_{t+1} copies on ``cores`` of ``blocks``.

    Each copy is (centre block, centre, ((leaf block, leaf), ...)).  Returns
    (family, exhausted) where exhausted means the node budget ran out, in
    which case the family may not be maximal.
    """
    rows = b.graph.rows
    used = 0
    family = []
    nodes = 0
    exhausted = False
    for cb in blocks:
        others = [j for j in blocks if j != cb]
        for v in iter_bits(cores[cb]):
            if used >> v & 1:
                continue
            found = None
            for leaf_blocks in itertools.combinations(others, t + 1):
                cand = [cores[j] & rows[v] & ~used for j in leaf_blocks]
                if not all(cand):
                    continue

                def rec(d, picked, avoid):
                    nonlocal nodes
                    if d == len(leaf_blocks):
                        return list(picked)
                    for x in iter_bits(cand[d] & ~avoid):
                        nodes += 1
                        if nodes > max_nodes:
                            return None
                        picked.append(x)
                        r = rec(d + 1, picked, avoid | rows[x])
                        if r is not None:
                            return r
                        picked.pop()
                    return None

                got = rec(0, [], 0)
                if nodes > max_nodes:
                    exhausted = True
                    break
                if got is not None:
                    found = (cb, v, tuple(zip(leaf_blocks, got)))
                    break
            if exhausted:
                break
            if found is not None:
                family.append(found)
                used |= 1 << v
                for _, x in found[2]:
                    used |= 1 << x
        if exhausted:
            break
    return family, exhausted


def find_transversal_broom(b: Blockade, k: int, t: int, tau=None, eps=None,
                           max_nodes: int = 200_000) -> FinderOutcome:
    if k < 1 or t < 1:
        raise FinderPrecondition("broom needs k >= 1 and t >= 1")
    if b.k != k + t:
        raise FinderPrecondition(f"B({k},{t}) needs a blockade of length {k + t}, got {b.k}")
    card = bounds.regime_card("broom", k=k, t=t, tau=tau, eps=eps)
    tau = card.tau
    pattern = broom_pattern(k, t)
    tr = Tracer(card)
    rows = b.graph.rows

    J = build_covering_digraph(b, tau)
    z = len(J.arcs)
    zero = [i for i in range(J.k) if J.outdegree(i) == 0]
    # outdegree >= 1 everywhere is what coherence buys; without it we carry on best-effort
    tr.log("covering-digraph", "outdegree >= 1", min(J.outdegree(i) for i in range(J.k)), not zero,
           f"{z} arcs" + (f", block {zero[0]} has no out-arc" if zero else ""))
    for i in range(J.k):
        tr.at_least(f"core-floor[{i}]", J.floor(b, i), J.cores[i].bit_count())
    A = {i: J.cores[i] for i in range(J.k)}

    def emit(path_hosts, leaves):
        # path_hosts: (block, host) along the path, last one carries the leaves
        hosts = [h for _, h in path_hosts] + [h for _, h in leaves]
        blks = [bl for bl, _ in path_hosts] + [bl for bl, _ in leaves]
        w = Witness(tuple(hosts), tuple(blks), TRANSVERSAL)
        return tr.success(b, pattern, w)

    # (1) a block with t in-arcs
    heavy = [q for q in range(J.k) if J.indegree(q) >= t]
    tr.log("1:indegree", f"branch (1) iff >= {t}", max(J.indegree(q) for q in range(J.k)), True,
           f"block {heavy[0]}" if heavy else "")
    if heavy:
        q = heavy[0]
        leaf_blocks = J.in_nbrs(q)[:t]
        path_blocks = [q] + [j for j in range(J.k) if j != q and j not in leaf_blocks]
        got = _run_path(b, [(j, A[j]) for j in path_blocks], tr, "1:path")
        if got is None:
            return tr.outcome(None, pattern)
        pk = got[0][1]
        leaves = []
        for j in leaf_blocks:
            cand = J.covers[(j, q)] & rows[pk]
            if not cand:
                return tr.fail("1:leaves", 1, 0, f"X_{j}{q} misses the path end", pattern)
            leaves.append((j, lowest(cand)))
        tr.log("1:leaves", t, len(leaves), True)
        return emit(list(reversed(got)), leaves)

    # (2) independent blocks without shared out-neighbours
    want = 2 ** t + 1
    S = independent_blocks(J, want)
    if len(S) < want:
        return tr.fail("2:independent-blocks", want, len(S), pattern=pattern)
    tr.log("2:independent-blocks", want, len(S), True, f"blocks {S}")

    # (3) disjoint rainbow S_{t+1} copies, most common type
    family, exhausted = star_family(b, A, S, t, max_nodes)
    if exhausted:
        tr.log("3:star-family", "maximal", "budget exhausted", False, f"{len(family)} copies so far")
    if not family:
        return tr.fail("3:star-family", 1, 0, "no rainbow S_%d on the cores" % (t + 1), pattern)
    tr.log("3:star-family", 1, len(family), True)
    types = Counter((cb, tuple(j for j, _ in leaves)) for cb, _, leaves in family)
    best = max(sorted(types), key=lambda ty: types[ty])
    bucket = [f for f in family if (f[0], tuple(j for j, _ in f[2])) == best]
    tr.log("3:bucket", 1, len(bucket), True, f"type {best[0]}:{list(best[1])}")
    centre_block, leaf_type = best
    star_blocks = [centre_block, *leaf_type]
    dropped = max(leaf_type)

    if k == 2:
        # B(2, t) is S_{t+1}: one leaf becomes the path end
        cb, v, leaves = bucket[0]
        return emit([leaves[0], (cb, v)], list(leaves[1:]))

    def path_blocks_for(r):
        if r == centre_block:
            return [j for j in range(J.k) if j not in star_blocks or j == dropped]
        return [j for j in range(J.k) if j not in star_blocks]

    def star_in(block, copies):
        m = 0
        for cb, v, leaves in copies:
            if cb == block:
                m |= 1 << v
            for j, x in leaves:
                if j == block:
                    m |= 1 << x
        return m

    choice = None
    for n in range(1, len(bucket) + 1):
        pref = bucket[:n]
        for r in sorted(star_blocks):
            nF = _nbhd(rows, star_in(r, pref))
            for s in path_blocks_for(r):
                if 2 * (t + 1) * (nF & A[s]).bit_count() >= A[s].bit_count():
                    choice = (n, r, s)
                    break
            if choice:
                break
        if choice:
            break
    if choice is None:
        return tr.fail("3:neighbourhood", Fraction(1, 2 * t + 2), 0, "no (r, s) reached", pattern)
    n, r, s = choice
    F_copies = bucket[:n]
    Fr = star_in(r, F_copies)
    tr.log("3:neighbourhood", Threshold(Fraction(A[s].bit_count(), 2 * t + 2)),
           (_nbhd(rows, Fr) & A[s]).bit_count(), True, f"n={n}, r={r}, s={s}")
    tr.log("4:out-neighbour", f"{r}->{s}", "arc" if J.has_arc(r, s) else "no arc", J.has_arc(r, s))

    F = 0
    for cb, v, leaves in F_copies:
        F |= 1 << v
        for _, x in leaves:
            F |= 1 << x
    Fdrop = star_in(dropped, F_copies) if r == centre_block else 0
    Fp = F & ~Fdrop

    # (5) good vertices of A_s
    Cs = A[s] & _nbhd(rows, Fr) & ~_nbhd(rows, F & ~Fr) & ~F
    tr.at_least("5:good", Threshold(Fraction(A[s].bit_count(), 4 * t + 8)), Cs.bit_count())
    if not Cs:
        return tr.fail("5:good-nonempty", 1, 0, pattern=pattern)

    # (6) other path blocks, cleared of F'
    others = [j for j in path_blocks_for(r) if j != s]
    C = {}
    for j in others:
        C[j] = A[j] & ~_nbhd(rows, Fp) & ~Fp
        tr.at_least(f"6:C-floor[{j}]", Threshold(Fraction(A[j].bit_count(), 4 * t + 8)), C[j].bit_count())
        if not C[j]:
            return tr.fail(f"6:C-nonempty[{j}]", 1, 0, pattern=pattern)
    got = _run_path(b, [(s, Cs)] + [(j, C[j]) for j in others], tr, "6:path")
    if got is None:
        return tr.outcome(None, pattern)
    v = got[0][1]
    cand = Fp & Fr & rows[v]
    if not cand:
        return tr.fail("6:join", 1, 0, "path end has no neighbour in F'", pattern)
    u = lowest(cand)
    m = next(f for f in F_copies if f[1] == u or any(x == u for _, x in f[2]))
    cb, centre, leaves = m
    path = list(reversed(got))
    if r == centre_block:
        path.append((cb, centre))
        rest = [(j, x) for j, x in leaves if j != dropped]
    else:
        path.append((r, u))
        path.append((cb, centre))
        rest = [(j, x) for j, x in leaves if j != r]
    tr.log("6:join", 1, 1, True, f"u={u}, v={v}")
    return emit(path, rest)
