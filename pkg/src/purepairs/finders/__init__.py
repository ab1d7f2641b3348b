"""Constructive finders; each returns a :class:`FinderOutcome`."""

from .broom import find_transversal_broom
from .covering import CoveringDigraph, augment, build_covering_digraph
from .cycles import find_transversal_c4, find_transversal_cycle
from .ordered import embed_ordered_tree, find_ordered_caterpillar
from .outcome import FinderOutcome, FinderPrecondition, Stage
from .path import find_transversal_path
from .star import StarPartition, find_rainbow_star

__all__ = [
    "CoveringDigraph",
    "FinderOutcome",
    "FinderPrecondition",
    "Stage",
    "StarPartition",
    "augment",
    "build_covering_digraph",
    "embed_ordered_tree",
    "find_ordered_caterpillar",
    "find_rainbow_star",
    "find_transversal_broom",
    "find_transversal_c4",
    "find_transversal_cycle",
    "find_transversal_path",
]
