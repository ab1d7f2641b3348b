"""Graphs, blockades, patterns and witnesses.

Adjacency is stored row-wise as Python integers used as bitsets: bit ``u`` of
``rows[v]`` is set iff ``uv`` is an edge.  Vertex sets are passed around as
bitmasks as well; ``mask_of``/``iter_bits`` convert to and from sequences.
Everything here is immutable once constructed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

RAINBOW = "rainbow"
TRANSVERSAL = "transversal"
ORDERED = "ordered-transversal"
KINDS = (RAINBOW, TRANSVERSAL, ORDERED)


class BlockadeError(ValueError):
    """Malformed blockade: overlapping or empty blocks, or bad vertex ids."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> list[int]:
    return list(iter_bits(mask))


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def popcount(mask: int) -> int:
    return mask.bit_count()


class Graph:
    """Simple undirected graph on ``0..n-1``."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Sequence[int]):
        if len(rows) != n:
            raise ValueError("row count does not match n")
        full = (1 << n) - 1
        for v, r in enumerate(rows):
            if r >> v & 1:
                raise ValueError(f"self-loop at {v}")
            if r & ~full:
                raise ValueError(f"row {v} mentions a vertex >= n")
        for v, r in enumerate(rows):
            for u in iter_bits(r):
                if not rows[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency {v}-{u}")
        self.n = n
        self.rows = tuple(rows)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {u}-{v} out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def nbr(self, v: int) -> int:
        return self.rows[v]

    def nbhd(self, mask: int) -> int:
        """N(X): vertices outside ``mask`` with a neighbour in it."""
        out = 0
        for v in iter_bits(mask):
            out |= self.rows[v]
        return out & ~mask

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.rows[u] >> (u + 1) << (u + 1))]

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def induced_edges(self, vertices: Sequence[int]) -> set[frozenset]:
        return {
            frozenset((a, b))
            for a, b in itertools.combinations(vertices, 2)
            if self.adjacent(a, b)
        }

    def union(self, other: "Graph") -> "Graph":
        if other.n != self.n:
            raise ValueError("vertex counts differ")
        return Graph(self.n, [a | b for a, b in zip(self.rows, other.rows)])

    def max_degree(self) -> int:
        return max((r.bit_count() for r in self.rows), default=0)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges()})"


@dataclass(frozen=True)
class ValidationReport:
    length: int
    width: int
    sizes: tuple[int, ...]
    covered: int  # vertices lying in some block


def validate_blockade(graph: Graph, blocks: Sequence[Iterable[int]]) -> ValidationReport:
    """Check disjointness, nonemptiness and range; raise ``BlockadeError`` otherwise."""
    blocks = [list(b) for b in blocks]
    if not blocks:
        raise BlockadeError("a blockade needs at least one block")
    seen: dict[int, int] = {}
    for i, blk in enumerate(blocks):
        if not blk:
            raise BlockadeError(f"block {i} is empty")
        for v in blk:
            if not isinstance(v, int) or not 0 <= v < graph.n:
                raise BlockadeError(f"vertex {v!r} in block {i} out of range 0..{graph.n - 1}")
            if v in seen and seen[v] != i:
                raise BlockadeError(f"overlapping blocks: vertex {v} in blocks {seen[v]} and {i}")
            seen[v] = i
    sizes = tuple(len(set(b)) for b in blocks)
    return ValidationReport(len(blocks), min(sizes), sizes, len(seen))


class Blockade:
    """A graph together with an ordered sequence of disjoint nonempty blocks."""

    __slots__ = ("graph", "blocks", "masks", "_owner")

    def __init__(self, graph: Graph, blocks: Sequence[Iterable[int]]):
        validate_blockade(graph, blocks)
        self.graph = graph
        self.blocks = tuple(tuple(sorted(set(b))) for b in blocks)
        self.masks = tuple(mask_of(b) for b in self.blocks)
        owner = {}
        for i, b in enumerate(self.blocks):
            for v in b:
                owner[v] = i
        self._owner = owner

    @property
    def k(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def width(self) -> int:
        return min(len(b) for b in self.blocks)

    def size(self, i: int) -> int:
        return len(self.blocks[i])

    def block_of(self, v: int) -> int | None:
        return self._owner.get(v)

    def restrict(self, sets: Sequence[int]) -> "Blockade":
        """Same graph, blocks replaced by the given masks (in order)."""
        return Blockade(self.graph, [bits(m) for m in sets])

    def sub(self, indices: Sequence[int]) -> "Blockade":
        return Blockade(self.graph, [self.blocks[i] for i in indices])

    def __eq__(self, other):
        return isinstance(other, Blockade) and self.graph == other.graph and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.graph, self.blocks))

    def __repr__(self):
        return f"Blockade(k={self.k}, n={self.graph.n}, width={self.width})"


@dataclass(frozen=True)
class Pattern:
    """A pattern graph H.  When ``ordered``, vertex ``i`` must land in block ``i``."""

    graph: Graph
    ordered: bool = False
    name: str = ""

    @property
    def k(self) -> int:
        return self.graph.n

    def degree(self, v: int) -> int:
        return self.graph.degree(v)


def path_pattern(k: int, ordered: bool = False) -> Pattern:
    return Pattern(Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)]), ordered, f"P{k}")


def cycle_pattern(k: int, ordered: bool = False) -> Pattern:
    return Pattern(Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)]), ordered, f"C{k}")


def star_pattern(t: int, ordered: bool = False, centre_last: bool = False) -> Pattern:
    """S_t: a centre joined to t leaves.  Centre is vertex 0, or vertex t if ``centre_last``."""
    c = t if centre_last else 0
    leaves = [v for v in range(t + 1) if v != c]
    name = f"S{t}" + ("+" if centre_last else "")
    return Pattern(Graph.from_edges(t + 1, [(c, v) for v in leaves]), ordered, name)


def broom_pattern(k: int, t: int) -> Pattern:
    """B(k,t): path 0..k-1 with t leaves k..k+t-1 on vertex k-1."""
    edges = [(i, i + 1) for i in range(k - 1)] + [(k - 1, k + j) for j in range(t)]
    return Pattern(Graph.from_edges(k + t, edges), False, f"B({k},{t})")


def double_broom_pattern(k: int, s: int, t: int) -> Pattern:
    edges = [(i, i + 1) for i in range(k - 1)]
    edges += [(0, k + j) for j in range(s)]
    edges += [(k - 1, k + s + j) for j in range(t)]
    return Pattern(Graph.from_edges(k + s + t, edges), False, f"B({k},{s},{t})")


def pattern_from_edges(k: int, edges: Iterable[tuple[int, int]], ordered: bool = False) -> Pattern:
    return Pattern(Graph.from_edges(k, edges), ordered, "custom")


@dataclass(frozen=True)
class Witness:
    """An embedding of a pattern: ``assignment[p]`` is the host vertex of pattern vertex ``p``."""

    assignment: tuple[int, ...]
    blocks_used: tuple[int, ...]
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "assignment": list(self.assignment),
            "blocks_used": list(self.blocks_used),
        }


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def verify_witness(b: Blockade, p: Pattern, w: Witness) -> Verdict:
    """Check a witness against the actual adjacency of ``b.graph``.

    Reason codes: ``size``, ``range``, ``not-injective``, ``block-mismatch``,
    ``repeated-block``, ``not-transversal``, ``order``, ``missing-edge``,
    ``extra-edge``.
    """
    g = b.graph
    k = p.k
    a = w.assignment
    if len(a) != k or len(w.blocks_used) != k:
        return Verdict(False, "size")
    if any(not isinstance(v, int) or not 0 <= v < g.n for v in a):
        return Verdict(False, "range")
    if any(not 0 <= i < b.k for i in w.blocks_used):
        return Verdict(False, "range")
    if len(set(a)) != k:
        return Verdict(False, "not-injective")
    for v, i in zip(a, w.blocks_used):
        if b.block_of(v) != i:
            return Verdict(False, "block-mismatch")
    if len(set(w.blocks_used)) != k:
        return Verdict(False, "repeated-block")
    if w.kind in (TRANSVERSAL, ORDERED) and k != b.k:
        return Verdict(False, "not-transversal")
    if w.kind == ORDERED and tuple(w.blocks_used) != tuple(range(k)):
        return Verdict(False, "order")
    for x in range(k):
        for y in range(x + 1, k):
            want = p.graph.adjacent(x, y)
            have = g.adjacent(a[x], a[y])
            if want and not have:
                return Verdict(False, "missing-edge")
            if have and not want:
                return Verdict(False, "extra-edge")
    return Verdict(True)


def witness_from_hosts(b: Blockade, hosts: Sequence[int], kind: str) -> Witness:
    return Witness(tuple(hosts), tuple(b.block_of(v) for v in hosts), kind)


def is_anticomplete(g: Graph, X: int, Y: int) -> bool:
    """No edge between the vertex masks ``X`` and ``Y``."""
    for v in iter_bits(X):
        if g.rows[v] & Y:
            return False
    return True


def covers(g: Graph, X: int, Y: int) -> bool:
    """Every vertex of ``Y`` has a neighbour in ``X``."""
    return Y & ~g.nbhd(X) == 0 if not (X & Y) else all(g.rows[v] & X for v in iter_bits(Y))
