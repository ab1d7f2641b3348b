import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from purepairs.graphcore import Blockade, Graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_blockade(sizes, edges):
    """Consecutive blocks of the given sizes over vertices 0..sum(sizes)-1."""
    blocks, v = [], 0
    for s in sizes:
        blocks.append(list(range(v, v + s)))
        v += s
    return Blockade(Graph.from_edges(v, edges), blocks)


def singleton_blockade(k, edges):
    return make_blockade([1] * k, edges)


@st.composite
def blockades(draw, min_k=1, max_k=4, min_w=1, max_w=4, equal=False, max_p=None):
    k = draw(st.integers(min_k, max_k))
    if equal:
        w = draw(st.integers(min_w, max_w))
        sizes = [w] * k
    else:
        sizes = [draw(st.integers(min_w, max_w)) for _ in range(k)]
    n = sum(sizes)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if max_p is None:
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    else:
        p = draw(st.floats(0, max_p))
        bits = draw(st.lists(st.floats(0, 1), min_size=len(pairs), max_size=len(pairs)))
        chosen = [e for e, r in zip(pairs, bits) if r < p]
    return make_blockade(sizes, chosen)


@pytest.fixture
def data_dir():
    from pathlib import Path
    return Path(__file__).parent / "data"


# one line per acceptance criterion, collected by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
