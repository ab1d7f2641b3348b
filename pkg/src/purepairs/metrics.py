"""Exact verifiers: local degree, (x,y)-cohesion, eps-coherence, and the
low-degree counting check for a pair of blocks.

Cohesion checking is hard in general, so every search runs against a node
budget and reports one of three outcomes: cohesive (``satisfied=True``,
``mode="exact"``), violated with a re-verified witness (``satisfied=False``),
or unknown (``satisfied=None``, ``mode="heuristic-only"``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import Threshold, ceil_frac, fmt_rational, frac_of, power_of
from .graphcore import Blockade, Graph, bits, is_anticomplete, iter_bits, lowest, mask_of

DEFAULT_BUDGET = 2_000_000

EXACT = "exact"
HEURISTIC = "heuristic-only"


class PreconditionError(ValueError):
    pass


class _Exhausted(Exception):
    pass


def local_degree(b: Blockade) -> int:
    if b.k <= 1:
        return 0
    rows = b.graph.rows
    best = 0
    for i, bi in enumerate(b.blocks):
        for j, mj in enumerate(b.masks):
            if i == j:
                continue
            for v in bi:
                c = (rows[v] & mj).bit_count()
                if c > best:
                    best = c
    return best


def local_degree_witness(b: Blockade) -> tuple[int, int, int] | None:
    """(v, j, count) attaining the local degree, lowest indices first."""
    if b.k <= 1:
        return None
    rows = b.graph.rows
    best = None
    for i, bi in enumerate(b.blocks):
        for v in bi:
            for j, mj in enumerate(b.masks):
                if i == j:
                    continue
                c = (rows[v] & mj).bit_count()
                if best is None or c > best[2]:
                    best = (v, j, c)
    return best


@dataclass
class CohesionReport:
    satisfied: Optional[bool]
    mode: str
    x: int
    y: int
    witness_pair: Optional[tuple[int, tuple[int, ...], int, tuple[int, ...]]] = None
    nodes: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        d = {
            "satisfied": self.satisfied,
            "mode": self.mode,
            "x": self.x,
            "y": self.y,
            "nodes": self.nodes,
        }
        if self.witness_pair is not None:
            i, X, j, Y = self.witness_pair
            d["witness"] = {"i": i, "X": list(X), "j": j, "Y": list(Y)}
        if self.note:
            d["note"] = self.note
        return d


class _Counter:
    __slots__ = ("left", "used")

    def __init__(self, budget: int):
        self.left = budget
        self.used = 0

    def tick(self):
        self.used += 1
        self.left -= 1
        if self.left < 0:
            raise _Exhausted


def _greedy_pair(rows, A: int, B: int, x: int, y: int):
    """Peel the vertex with most neighbours across until the pair is anticomplete."""
    X, Y = A, B
    while True:
        if X.bit_count() < x or Y.bit_count() < y:
            return None
        best_v, best_c = -1, 0
        if X.bit_count() > x:
            for v in iter_bits(X):
                c = (rows[v] & Y).bit_count()
                if c > best_c:
                    best_v, best_c = v, c
        if Y.bit_count() > y:
            for v in iter_bits(Y):
                c = (rows[v] & X).bit_count()
                if c > best_c:
                    best_v, best_c = v, c
        if best_c == 0:
            # nothing removable reduces edges; anticomplete only if no edges remain
            for v in iter_bits(X):
                if rows[v] & Y:
                    return None
            return X, Y
        if X >> best_v & 1:
            X &= ~(1 << best_v)
        else:
            Y &= ~(1 << best_v)


def _exact_pair(rows, A: int, B: int, x: int, y: int, ctr: _Counter):
    """Branch and bound for X in A, Y in B, |X| >= x, |Y| >= y, anticomplete.

    Returns (X, Y) for the first violation in ascending-branch order, or None.
    """
    nnA = {v: B & ~rows[v] for v in iter_bits(A)}
    nnB = {u: A & ~rows[u] for u in iter_bits(B)}

    def peel(P: int, Yc: int, need: int):
        while True:
            Y2 = 0
            for u in iter_bits(Yc):
                if (nnB[u] & P).bit_count() >= need:
                    Y2 |= 1 << u
            if Y2.bit_count() < y:
                return None
            P2 = 0
            for v in iter_bits(P):
                if (nnA[v] & Y2).bit_count() >= y:
                    P2 |= 1 << v
            if P2.bit_count() < need:
                return None
            if P2 == P and Y2 == Yc:
                return P, Yc
            P, Yc = P2, Y2

    def rec(X: int, P: int, Yc: int):
        ctr.tick()
        need = x - X.bit_count()
        if need <= 0:
            return (X, Yc) if Yc.bit_count() >= y else None
        core = peel(P, Yc, need)
        if core is None:
            return None
        P, Yc = core
        while P.bit_count() >= need:
            v = lowest(P)
            P &= ~(1 << v)
            hit = rec(X | (1 << v), P, Yc & nnA[v])
            if hit is not None:
                return hit
            ctr.tick()
            core = peel(P, Yc, need)
            if core is None:
                return None
            P, Yc = core
        return None

    return rec(0, A, B)


def _pair_search(g: Graph, A: int, B: int, x: int, y: int, ctr: _Counter, exact: bool = True):
    """Returns ("violated", X, Y) / ("ok",) / raises _Exhausted."""
    rows = g.rows
    hit = _greedy_pair(rows, A, B, x, y)
    if hit is not None:
        # a re-verified witness is definitive however it was found
        return ("violated", hit[0], hit[1], "greedy peeling")
    if not exact:
        raise _Exhausted
    # enumerate the side with the smaller requirement
    if y < x:
        r = _exact_pair(rows, B, A, y, x, ctr)
        if r is not None:
            return ("violated", r[1], r[0], "enumeration")
    else:
        r = _exact_pair(rows, A, B, x, y, ctr)
        if r is not None:
            return ("violated", r[0], r[1], "enumeration")
    return ("ok",)


def _search_pairs(b: Blockade, pairs, budget: int) -> CohesionReport:
    """``pairs``: sequence of (i, j, x, y) checked in order."""
    ctr = _Counter(budget)
    g = b.graph
    unknown = []
    for i, j, x, y in pairs:
        if x < 1 or y < 1:
            raise PreconditionError("cohesion thresholds must be at least 1")
        A, B = b.masks[i], b.masks[j]
        try:
            r = _pair_search(g, A, B, x, y, ctr, exact=not unknown)
        except _Exhausted:
            unknown.append((i, j))
            continue
        if r[0] == "violated":
            _, X, Y, how = r
            if not is_anticomplete(g, X, Y) or X.bit_count() < x or Y.bit_count() < y:
                raise AssertionError("internal error: cohesion witness failed re-verification")
            return CohesionReport(
                False, EXACT, x, y, (i, tuple(bits(X)), j, tuple(bits(Y))), ctr.used, f"found by {how}"
            )
    if unknown:
        i, j = unknown[0]
        return CohesionReport(
            None, HEURISTIC, pairs[0][2] if pairs else 0, pairs[0][3] if pairs else 0,
            None, ctr.used, f"budget exhausted at block pair ({i},{j})",
        )
    return CohesionReport(True, EXACT, pairs[0][2] if pairs else 0, pairs[0][3] if pairs else 0, None, ctr.used)


def check_cohesion(b: Blockade, x: int, y: int, budget: int = DEFAULT_BUDGET) -> CohesionReport:
    """Decide whether ``b`` is (x,y)-cohesive for integer thresholds ``x, y >= 1``."""
    x, y = int(x), int(y)
    if x < 1 or y < 1:
        raise PreconditionError("cohesion thresholds must be at least 1")
    pairs = []
    for i in range(b.k):
        for j in range(b.k):
            if i == j:
                continue
            if x == y and j < i:
                continue  # symmetric thresholds: (i,j) already covers (j,i)
            pairs.append((i, j, x, y))
    if not pairs:
        return CohesionReport(True, EXACT, x, y)
    return _search_pairs(b, pairs, budget)


def naive_cohesion(b: Blockade, x: int, y: int) -> bool:
    """Reference check by double subset enumeration; tiny blocks only."""
    from itertools import combinations

    g = b.graph
    for i in range(b.k):
        for j in range(b.k):
            if i == j:
                continue
            for X in combinations(b.blocks[i], x):
                for Y in combinations(b.blocks[j], y):
                    if is_anticomplete(g, mask_of(X), mask_of(Y)):
                        return False
    return True


@dataclass
class CoherenceReport:
    satisfied: Optional[bool]
    mode: str
    eps: Fraction
    degree_ok: bool
    degree_violation: Optional[dict] = None
    cohesion: Optional[CohesionReport] = None
    boundary: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "satisfied": self.satisfied,
            "mode": self.mode,
            "eps": fmt_rational(self.eps),
            "degree_ok": self.degree_ok,
        }
        if self.degree_violation:
            d["degree_violation"] = self.degree_violation
        if self.cohesion is not None:
            d["anticomplete"] = self.cohesion.to_dict()
        if self.boundary:
            d["boundary"] = self.boundary
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def degree_violation(b: Blockade, thr_of_block) -> Optional[dict]:
    """First (v, j) whose neighbour count in B_j is not below ``thr_of_block(j)``."""
    rows = b.graph.rows
    for i, bi in enumerate(b.blocks):
        for v in bi:
            for j, mj in enumerate(b.masks):
                if i == j:
                    continue
                c = (rows[v] & mj).bit_count()
                thr: Threshold = thr_of_block(j)
                if not thr.exceeds(c):
                    return {"v": v, "i": i, "j": j, "count": c, "required_below": str(thr)}
    return None


def check_coherence(b: Blockade, eps, budget: int = DEFAULT_BUDGET) -> CoherenceReport:
    """eps-coherence: every cross-block degree below eps|B_j| and no anticomplete
    X in B_i, Y in B_j with |X| >= eps|B_i|, |Y| >= eps|B_j|."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise PreconditionError("eps must lie in (0, 1]")
    boundary = [i for i in range(b.k) if (eps * b.size(i)).denominator == 1]
    dv = degree_violation(b, lambda j: frac_of(eps, b.size(j)))
    if dv is not None:
        return CoherenceReport(False, EXACT, eps, False, dv, None, boundary)
    pairs = []
    for i in range(b.k):
        for j in range(i + 1, b.k):
            pairs.append((i, j, ceil_frac(eps * b.size(i)), ceil_frac(eps * b.size(j))))
    if not pairs:
        return CoherenceReport(True, EXACT, eps, True, None, None, boundary)
    coh = _search_pairs(b, pairs, budget)
    return CoherenceReport(coh.satisfied, coh.mode if coh.satisfied is not False else EXACT,
                           eps, True, None, coh, boundary)


@dataclass
class PremiseReport:
    """Premises shared by the pair lemma and the counting theorem:
    local degree below eps*W and (eps*W, eps*W^c)-cohesion."""

    satisfied: Optional[bool]
    width: int
    local_degree: int
    degree_bound: Threshold
    x: int
    y: int
    cohesion: Optional[CohesionReport]

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "width": self.width,
            "local_degree": self.local_degree,
            "degree_bound": str(self.degree_bound),
            "x": self.x,
            "y": self.y,
            "cohesion": self.cohesion.to_dict() if self.cohesion else None,
        }


def check_degree_cohesion_premises(b: Blockade, eps, c, budget: int = DEFAULT_BUDGET) -> PremiseReport:
    eps, c = Fraction(eps), Fraction(c)
    W = b.width
    lam = local_degree(b)
    dthr = frac_of(eps, W)
    x = max(1, ceil_frac(eps * W))
    y = max(1, power_of(eps, W, c).ceil())
    if not dthr.exceeds(lam):
        return PremiseReport(False, W, lam, dthr, x, y, None)
    coh = check_cohesion(b, x, y, budget)
    return PremiseReport(coh.satisfied, W, lam, dthr, x, y, coh)


@dataclass
class ManyEdgesReport:
    count: int
    bound: Threshold
    holds: bool
    bound_exceeds_one: bool
    low_degree_cap: Threshold
    low_vertices: tuple[int, ...]
    premises: Optional[PremiseReport] = None

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "bound": self.bound.to_dict(),
            "holds": self.holds,
            "bound_exceeds_one": self.bound_exceeds_one,
            "low_degree_cap": str(self.low_degree_cap),
            "low_vertices": list(self.low_vertices),
            "premises": self.premises.to_dict() if self.premises else None,
        }


def check_manyedges_premise_conclusion(
    b: Blockade, eps, c, X, premises: Optional[PremiseReport] = None, verify_premises: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> ManyEdgesReport:
    """Count vertices of B_2 with at most W^(1-c)/2 neighbours in X and compare
    against eps*W^c (the conclusion demands strictly fewer)."""
    if b.k != 2:
        raise PreconditionError("needs a blockade of length 2")
    eps, c = Fraction(eps), Fraction(c)
    W = b.width
    Xm = X if isinstance(X, int) else mask_of(X)
    if Xm & ~b.masks[0]:
        raise PreconditionError("X must be a subset of the first block")
    if Fraction(Xm.bit_count()) < 2 * eps * W:
        raise PreconditionError(f"|X| = {Xm.bit_count()} is below 2*eps*W = {fmt_rational(2 * eps * W)}")
    if verify_premises and premises is None:
        premises = check_degree_cohesion_premises(b, eps, c, budget)
    cap = power_of(Fraction(1, 2), W, 1 - c)
    rows = b.graph.rows
    # "at most W^(1-c)/2 neighbours": count <= cap, i.e. not (cap < count)
    low = tuple(v for v in b.blocks[1] if not cap.lt((rows[v] & Xm).bit_count()))
    bound = power_of(eps, W, c)
    return ManyEdgesReport(
        count=len(low),
        bound=bound,
        holds=bound.exceeds(len(low)),
        bound_exceeds_one=bound.exceeds(1),
        low_degree_cap=cap,
        low_vertices=low,
        premises=premises,
    )


def largest_anticomplete_pair(b: Blockade):
    """Heuristic: large balanced anticomplete pair between two distinct blocks.

    For each ordered block pair, X grows one vertex at a time, always taking
    the vertex of B_i that removes fewest vertices from Y = B_j \\ N(X); the
    best min(|X|, |Y|) seen is kept.  Returns (size, i, X, j, Y) with X, Y
    as vertex tuples, or None when k < 2.  A lower bound only.
    """
    rows = b.graph.rows
    best = None
    for i in range(b.k):
        for j in range(b.k):
            if i == j:
                continue
            X, Y = 0, b.masks[j]
            left = b.masks[i]
            while left:
                v = min(iter_bits(left), key=lambda u: ((rows[u] & Y).bit_count(), u))
                X |= 1 << v
                left &= ~(1 << v)
                Y &= ~rows[v]
                size = min(X.bit_count(), Y.bit_count())
                if best is None or size > best[0]:
                    best = (size, i, tuple(iter_bits(X)), j, tuple(iter_bits(Y)))
                if not Y:
                    break
    return best
