"""Rainbow stars via star-partitions.

A star-partition is a list of hubs, each with a set of leaf blocks, and a
working subset A_i of every block still in play.  Each leaf set covers its
hub's set and is anticomplete to everything belonging to other hubs (and to
the other leaves of its own hub).  Starting from K hubs with no leaves, each
round takes the hub with the fewest leaves, grows a dominating set inside it
until a third of some other hub's set is covered, and folds it in as a new
leaf of that hub.  The value sum 2^|I_s| never drops, so once a single hub
is left it has at least log2(K) leaves and a star can be read off.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .. import bounds
from ..graphcore import RAINBOW, Blockade, Witness, is_anticomplete, iter_bits, lowest, star_pattern
from .outcome import FinderOutcome, FinderPrecondition, Tracer


def _covers(rows, X: int, Y: int) -> bool:
    return all(rows[v] & X for v in iter_bits(Y))


@dataclass
class StarPartition:
    hubs: list[int]
    leafsets: dict[int, list[int]]
    sets: dict[int, int]
    value: int = 0
    linkage: Fraction = Fraction(0)

    def compute_value(self) -> int:
        return sum(2 ** len(self.leafsets[h]) for h in self.hubs)

    def compute_linkage(self, b: Blockade) -> Fraction:
        rows = b.graph.rows
        best = Fraction(0)
        for i in self.hubs:
            for j in self.hubs:
                if i == j:
                    continue
                Aj = self.sets[j]
                for v in iter_bits(self.sets[i]):
                    q = Fraction((rows[v] & Aj).bit_count(), b.size(j))
                    if q > best:
                        best = q
        return best

    def refresh(self, b: Blockade) -> None:
        self.value = self.compute_value()
        self.linkage = self.compute_linkage(b)

    def verify(self, b: Blockade) -> list[str]:
        """Re-check every structural property from scratch; returns the list of problems."""
        g, rows = b.graph, b.graph.rows
        bad = []
        seen = set(self.hubs)
        if len(seen) != len(self.hubs):
            bad.append("repeated hub")
        for h in self.hubs:
            for j in self.leafsets[h]:
                if j in seen:
                    bad.append(f"leaf {j} reused")
                seen.add(j)
        for i in seen:
            if not self.sets.get(i):
                bad.append(f"empty set {i}")
            elif self.sets[i] & ~b.masks[i]:
                bad.append(f"set {i} leaves its block")
        for h in self.hubs:
            own = self.leafsets[h]
            for j in own:
                if not _covers(rows, self.sets[j], self.sets[h]):
                    bad.append(f"leaf {j} does not cover hub {h}")
                for j2 in own:
                    if j2 != j and not is_anticomplete(g, self.sets[j], self.sets[j2]):
                        bad.append(f"leaves {j},{j2} adjacent")
                for h2 in self.hubs:
                    if h2 == h:
                        continue
                    if not is_anticomplete(g, self.sets[j], self.sets[h2]):
                        bad.append(f"leaf {j} adjacent to hub {h2}")
                    for j2 in self.leafsets[h2]:
                        if not is_anticomplete(g, self.sets[j], self.sets[j2]):
                            bad.append(f"leaf {j} adjacent to leaf {j2}")
        if self.value != self.compute_value():
            bad.append("stale value")
        if self.linkage != self.compute_linkage(b):
            bad.append("stale linkage")
        return bad


def initial_partition(b: Blockade) -> StarPartition:
    sp = StarPartition(list(range(b.k)), {i: [] for i in range(b.k)}, {i: b.masks[i] for i in range(b.k)})
    sp.refresh(b)
    return sp


def refine(b: Blockade, sp: StarPartition, ht: int | None = None):
    """One round with ``ht`` as the shrinking hub (default: fewest leaves, lowest index).

    Returns (new partition, info) or (None, failure info).
    """
    rows = b.graph.rows
    if ht is None:
        ht = min(sp.hubs, key=lambda h: (len(sp.leafsets[h]), h))
    others = [h for h in sp.hubs if h != ht]
    C = 0
    cov = {h: 0 for h in others}
    target = None
    rest = sp.sets[ht]
    while rest and target is None:
        v = lowest(rest)
        rest &= rest - 1
        C |= 1 << v
        for h in others:
            cov[h] |= sp.sets[h] & rows[v]
        for h in others:
            if 3 * cov[h].bit_count() >= sp.sets[h].bit_count():
                target = h
                break
    if target is None:
        return None, {"hub": ht, "reason": "no hub a third covered"}
    nC = 0
    for v in iter_bits(C):
        nC |= rows[v]
    sets = dict(sp.sets)
    sets[ht] = C
    sets[target] = sp.sets[target] & nC
    shrunk = {}
    for h in others:
        if h != target:
            sets[h] = sp.sets[h] & ~nC
            shrunk[h] = (sp.sets[h].bit_count(), sets[h].bit_count())
    for j in sp.leafsets[ht]:
        del sets[j]
    leafsets = {h: list(sp.leafsets[h]) for h in others}
    leafsets[target] = sorted(leafsets[target] + [ht])
    new = StarPartition(others, leafsets, sets)
    new.refresh(b)
    info = {"hub": ht, "target": target, "C": C.bit_count(), "shrunk": shrunk,
            "dropped": list(sp.leafsets[ht])}
    return new, info


class _Budget:
    def __init__(self, n):
        self.left = n


def _descend(b, sp, K, eps, rnd, tr, budget, check):
    """Depth-first over the choice of shrinking hub among those with fewest leaves.

    Returns the final one-hub partition or None; ``tr`` ends up holding the
    trace of the successful branch, or of the first branch explored.
    """
    t = len(sp.hubs)
    if t < 2:
        return sp
    fewest = min(len(sp.leafsets[h]) for h in sp.hubs)
    tied = [h for h in sp.hubs if len(sp.leafsets[h]) == fewest]
    mark = len(tr.stages)
    first_fail = None
    for ht in tied:
        if budget.left <= 0:
            break
        budget.left -= 1
        del tr.stages[mark:]
        lim = eps * Fraction(3) ** (K - t)
        tr.log(f"{rnd}:linkage", lim, sp.linkage, sp.linkage < lim, f"t={t}")
        nxt, info = refine(b, sp, ht)
        ok = nxt is not None
        if not ok:
            tr.log(f"{rnd}:cover-third", Fraction(1, 3), 0, False, f"hub {ht}")
        else:
            tg = info["target"]
            tr.log(f"{rnd}:cover-third", Fraction(1, 3),
                   Fraction(nxt.sets[tg].bit_count(), sp.sets[tg].bit_count()), True, f"hub {ht} -> {tg}")
            for h, (before, after) in sorted(info["shrunk"].items()):
                tr.log(f"{rnd}:shrink[{h}]", Fraction(before, 3), after, 3 * after >= before,
                       "set emptied" if after == 0 else "")
                if after == 0:
                    ok = False
                    break
        if ok:
            tr.log(f"{rnd}:value", K, nxt.value, nxt.value >= K)
            if check:
                bad = nxt.verify(b)
                if bad:
                    tr.log(f"{rnd}:partition-check", "consistent", "; ".join(bad[:3]), False)
                    ok = False
        if ok:
            got = _descend(b, nxt, K, eps, rnd + 1, tr, budget, check)
            if got is not None:
                return got
        if first_fail is None:
            first_fail = list(tr.stages[mark:])
    del tr.stages[mark:]
    tr.stages.extend(first_fail or [])
    return None


def find_rainbow_star(b: Blockade, k: int, eps=None, check: bool = False,
                      max_branches: int = 10_000) -> FinderOutcome:
    """Look for a rainbow S_k.

    When several hubs tie for fewest leaves the lowest index is tried first;
    if that branch empties a set the others are tried, up to ``max_branches``
    refinement rounds in total.  ``check`` re-verifies the partition after
    every round.
    """
    if k < 1:
        raise FinderPrecondition("star size must be at least 1")
    if b.k < k + 1:
        raise FinderPrecondition(f"need at least {k + 1} blocks for S_{k}")
    card = bounds.regime_card("star", k=k, eps=eps)
    eps = card.eps
    pattern = star_pattern(k)
    tr = Tracer(card)
    K = b.k
    sp = initial_partition(b)
    tr.log("start", K, sp.value, True, "K hubs, empty leaf sets")
    final = _descend(b, sp, K, eps, 1, tr, _Budget(max_branches), check)
    if final is None:
        return tr.outcome(None, pattern)
    hub = final.hubs[0]
    leaves = final.leafsets[hub]
    if len(leaves) < k:
        return tr.fail("read-off", k, len(leaves), "too few leaf blocks", pattern)
    tr.log("read-off", k, len(leaves), True)
    rows = b.graph.rows
    u = lowest(final.sets[hub])
    chosen = leaves[:k]
    hosts = [u]
    for j in chosen:
        cand = final.sets[j] & rows[u]
        if not cand:
            return tr.fail("leaf-pick", 1, 0, f"block {j}", pattern)
        hosts.append(lowest(cand))
    w = Witness(tuple(hosts), (hub, *chosen), RAINBOW)
    return tr.success(b, pattern, w)
