"""tau-covering digraphs built by greedy augmentation.

Arcs live on block indices.  Each block i keeps a core A_i, and each arc (i, j)
keeps a cover set X_ij.  Adding an arc (i, j) takes the shortest ascending
prefix Y of A_i whose neighbourhood meets tau^(s+1)|B_j| vertices of A_j,
where s is the current arc count.  The cores are then cut down: A_j keeps
only what Y covers, and every other A_h (h != i, j) loses what Y touches.
The arc is kept only if every core still has at least tau^(s+1)|B_h|
vertices.  Scanning restarts after each accepted arc and stops at a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .. import bounds
from ..exact import Threshold, frac_of
from ..graphcore import Blockade, iter_bits, lowest


def _nbhd(rows, mask: int) -> int:
    out = 0
    for v in iter_bits(mask):
        out |= rows[v]
    return out & ~mask


@dataclass
class CoveringDigraph:
    k: int
    tau: Fraction
    cores: list[int]
    arcs: list[tuple[int, int]] = field(default_factory=list)
    covers: dict[tuple[int, int], int] = field(default_factory=dict)

    @classmethod
    def trivial(cls, b: Blockade, tau) -> "CoveringDigraph":
        return cls(b.k, Fraction(tau), list(b.masks))

    def has_arc(self, i: int, j: int) -> bool:
        return (i, j) in self.covers

    def outdegree(self, i: int) -> int:
        return sum(1 for a, _ in self.arcs if a == i)

    def indegree(self, j: int) -> int:
        return sum(1 for _, c in self.arcs if c == j)

    def out_nbrs(self, i: int) -> list[int]:
        return sorted(c for a, c in self.arcs if a == i)

    def in_nbrs(self, j: int) -> list[int]:
        return sorted(a for a, c in self.arcs if c == j)

    def floor(self, b: Blockade, i: int, arcs: int | None = None) -> Threshold:
        s = len(self.arcs) if arcs is None else arcs
        return frac_of(self.tau ** s, b.size(i))

    def verify(self, b: Blockade) -> list[str]:
        """Check the three invariant families exactly; returns the problems found."""
        rows = b.graph.rows
        bad = []
        for i in range(self.k):
            if self.cores[i] & ~b.masks[i]:
                bad.append(f"core {i} leaves its block")
            if not self.floor(b, i).le(self.cores[i].bit_count()):
                bad.append(f"core {i} below tau^{len(self.arcs)}|B_{i}|")
        if len(set(self.arcs)) != len(self.arcs) or set(self.arcs) != set(self.covers):
            bad.append("arc list and cover table disagree")
        for (i, j), X in self.covers.items():
            if i == j:
                bad.append(f"loop at {i}")
            if X & ~b.masks[i]:
                bad.append(f"X_{i}{j} leaves B_{i}")
            if any(not rows[v] & X for v in iter_bits(self.cores[j])):
                bad.append(f"X_{i}{j} does not cover A_{j}")
            nX = _nbhd(rows, X)
            for h in range(self.k):
                if h not in (i, j) and nX & self.cores[h]:
                    bad.append(f"X_{i}{j} touches A_{h}")
        items = sorted(self.covers.items())
        for (a, X) in items:
            nX = _nbhd(rows, X)
            for (c, Y) in items:
                (i, j), (i2, j2) = a, c
                if i != i2 and i != j2 and i2 != j and nX & Y:
                    bad.append(f"X_{i}{j} and X_{i2}{j2} adjacent")
        return bad

    def to_dict(self) -> dict:
        return {
            "tau": str(self.tau),
            "arcs": [list(a) for a in self.arcs],
            "cores": [list(iter_bits(m)) for m in self.cores],
            "covers": {f"{i}->{j}": list(iter_bits(X)) for (i, j), X in sorted(self.covers.items())},
        }


def try_arc(b: Blockade, J: CoveringDigraph, i: int, j: int):
    """Attempt to add (i, j).  Returns (Y, new cores) or None."""
    rows = b.graph.rows
    s = len(J.arcs)
    step = J.tau ** (s + 1)
    need = frac_of(step, b.size(j))
    Aj = J.cores[j]
    Y = 0
    hit = 0
    rest = J.cores[i]
    while rest:
        v = lowest(rest)
        rest &= rest - 1
        Y |= 1 << v
        hit |= rows[v] & Aj
        if need.le(hit.bit_count()):
            break
    else:
        return None
    nY = _nbhd(rows, Y)
    new = list(J.cores)
    for h in range(J.k):
        if h == j:
            new[h] = Aj & nY
        elif h != i:
            new[h] = J.cores[h] & ~nY
        if not frac_of(step, b.size(h)).le(new[h].bit_count()):
            return None
    return Y, new


def augment(b: Blockade, tau=None, start: CoveringDigraph | None = None,
            max_arcs: int | None = None) -> CoveringDigraph:
    """Grow ``start`` (default: no arcs, cores = blocks) until no arc can be added."""
    if start is None:
        tau = bounds.regime_card("covering", tau=tau).tau
        J = CoveringDigraph.trivial(b, tau)
    else:
        J = CoveringDigraph(start.k, start.tau, list(start.cores), list(start.arcs), dict(start.covers))
    cap = J.k * (J.k - 1) if max_arcs is None else max_arcs
    progress = True
    while progress and len(J.arcs) < cap:
        progress = False
        for i in range(J.k):
            for j in range(J.k):
                if i == j or J.has_arc(i, j):
                    continue
                got = try_arc(b, J, i, j)
                if got is None:
                    continue
                Y, J.cores = got
                J.arcs.append((i, j))
                J.covers[(i, j)] = Y
                progress = True
                break
            if progress:
                break
    return J


def build_covering_digraph(b: Blockade, tau=None) -> CoveringDigraph:
    return augment(b, tau)
