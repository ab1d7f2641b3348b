"""Plain-text blockade instances.

Format::

    # comments are ignored
    blockade k=<k> n=<n>
    block 0: 0 1 2
    block 1: 3 4
    edges:
    0 3
    1 4

Blocks are numbered from 0 and must appear in order.  Writing is canonical:
sorted block members and lexicographic ``u < v`` edge lines.
"""

from __future__ import annotations

import re
from pathlib import Path

from .graphcore import Blockade, BlockadeError, Graph

_HEADER = re.compile(r"^blockade\s+k=(\d+)\s+n=(\d+)$")
_BLOCK = re.compile(r"^block\s+(\d+)\s*:(.*)$")


class InstanceFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def read_instance(data: bytes | str) -> Blockade:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceFormatError(0, f"not UTF-8: {exc}") from None
    k = n = None
    blocks: list[list[int]] = []
    edges: list[tuple[int, int]] = []
    in_edges = False
    last = 0
    for lineno, raw in enumerate(data.split("\n"), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        last = lineno
        if k is None:
            m = _HEADER.match(line)
            if not m:
                raise InstanceFormatError(lineno, "expected 'blockade k=<k> n=<n>'")
            k, n = int(m.group(1)), int(m.group(2))
            continue
        if in_edges:
            parts = line.split()
            if len(parts) != 2:
                raise InstanceFormatError(lineno, "edge line must be 'u v'")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise InstanceFormatError(lineno, f"bad edge {line!r}") from None
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceFormatError(lineno, f"edge {u} {v} out of range for n={n}")
            if u == v:
                raise InstanceFormatError(lineno, f"self-loop at {u}")
            edges.append((u, v))
            continue
        if line == "edges:":
            if len(blocks) != k:
                raise InstanceFormatError(lineno, f"expected {k} blocks, found {len(blocks)}")
            in_edges = True
            continue
        m = _BLOCK.match(line)
        if not m:
            raise InstanceFormatError(lineno, f"unexpected line {line!r}")
        idx = int(m.group(1))
        if idx != len(blocks):
            raise InstanceFormatError(lineno, f"block {idx} out of order (expected {len(blocks)})")
        try:
            members = [int(tok) for tok in m.group(2).split()]
        except ValueError:
            raise InstanceFormatError(lineno, "non-integer vertex id") from None
        blocks.append(members)
    if k is None:
        raise InstanceFormatError(last, "missing header")
    if not in_edges:
        raise InstanceFormatError(last, "missing 'edges:' section")
    g = Graph.from_edges(n, edges)
    try:
        return Blockade(g, blocks)
    except BlockadeError as exc:
        raise InstanceFormatError(last, str(exc)) from None


def write_instance(b: Blockade) -> bytes:
    out = [f"blockade k={b.k} n={b.graph.n}"]
    for i, blk in enumerate(b.blocks):
        out.append(f"block {i}: " + " ".join(map(str, blk)) if blk else f"block {i}:")
    out.append("edges:")
    out.extend(f"{u} {v}" for u, v in b.graph.edges())
    return ("\n".join(out) + "\n").encode("utf-8")


def load(path) -> Blockade:
    return read_instance(Path(path).read_bytes())


def save(b: Blockade, path) -> None:
    Path(path).write_bytes(write_instance(b))
