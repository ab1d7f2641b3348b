from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from purepairs import bounds
from purepairs.finders import (
    FinderPrecondition,
    augment,
    build_covering_digraph,
    embed_ordered_tree,
    find_ordered_caterpillar,
    find_rainbow_star,
    find_transversal_broom,
    find_transversal_c4,
    find_transversal_cycle,
    find_transversal_path,
)
from purepairs.finders.broom import independent_blocks
from purepairs.finders.ordered import caterpillar_spine, is_head, peel_order_ok
from purepairs.finders.star import initial_partition, refine
from purepairs.generators import gen_regular_blockade, gen_star_free_blockade
from purepairs.graphcore import (
    ORDERED,
    RAINBOW,
    TRANSVERSAL,
    broom_pattern,
    cycle_pattern,
    path_pattern,
    pattern_from_edges,
    star_pattern,
    verify_witness,
)
from purepairs.oracle import count_copies, find_copy

from conftest import blockades, make_blockade, singleton_blockade


def assert_sound(out):
    if out.ok:
        assert verify_witness_of(out)
    else:
        assert out.failure_stage is not None
        failed = [s for s in out.trace if not s.passed]
        assert failed and failed[0].name == out.failure_stage


_last_blockade = {}


def verify_witness_of(out):
    return verify_witness(_last_blockade["b"], out.pattern, out.result)


def run(fn, b, *a, **kw):
    _last_blockade["b"] = b
    out = fn(b, *a, **kw)
    assert_sound(out)
    return out


# -- outcome --------------------------------------------------------------------

def test_outcome_json_is_deterministic():
    b = singleton_blockade(3, [(0, 1), (1, 2)])
    a, c = find_transversal_path(b), find_transversal_path(b)
    assert a.to_json() == c.to_json()
    assert a.to_dict()["regime"]["theorem"] == "path"


# -- path -----------------------------------------------------------------------

def test_path_single_edge():
    out = run(find_transversal_path, singleton_blockade(2, [(0, 1)]), Fraction(1, 2))
    assert out.ok and out.result.assignment == (0, 1)


def test_path_empty_graph_fails_at_first_cover():
    out = run(find_transversal_path, make_blockade([2, 2, 2], []))
    assert not out.ok and out.failure_stage == "1:cover"


def test_path_end_in_first_block():
    b = make_blockade([2, 2, 2], [(0, 2), (2, 4), (1, 3), (3, 5)])
    out = run(find_transversal_path, b)
    assert out.ok
    w = out.result
    assert w.blocks_used[0] == 0


def test_path_needs_two_blocks():
    with pytest.raises(FinderPrecondition):
        find_transversal_path(make_blockade([3], []))


@pytest.mark.parametrize("seed", range(6))
def test_path_on_verified_k2(seed):
    eps = Fraction(1, 2)
    b = gen_regular_blockade(2, 20, 9, seed).blockade
    assert bounds.check_regime(b, bounds.regime_card("path", k=2)).satisfied
    out = run(find_transversal_path, b, eps)
    assert out.ok and out.result.blocks_used[0] == 0


# -- star -----------------------------------------------------------------------

def test_star_k2_on_three_singletons():
    b = singleton_blockade(3, [(0, 1), (0, 2)])
    out = run(find_rainbow_star, b, 2)
    assert out.ok
    assert out.result.assignment[0] == 0


def test_star_five_singletons_needs_backtracking():
    b = singleton_blockade(5, [(0, j) for j in range(1, 5)])
    out = run(find_rainbow_star, b, 3, check=True)
    assert out.ok


def test_star_fails_on_star_free():
    b = gen_star_free_blockade(3, 4, seed=1).blockade
    out = run(find_rainbow_star, b, 3)
    assert not out.ok
    assert find_copy(b, star_pattern(3), RAINBOW) is None


def test_star_preconditions():
    with pytest.raises(FinderPrecondition):
        find_rainbow_star(singleton_blockade(3, []), 3)
    with pytest.raises(FinderPrecondition):
        find_rainbow_star(singleton_blockade(3, []), 0)


@given(blockades(min_k=3, max_k=5, max_w=3))
def test_refine_keeps_partition_valid(b):
    sp = initial_partition(b)
    while len(sp.hubs) > 1:
        nxt, info = refine(b, sp)
        if nxt is None or any(not nxt.sets[h] for h in nxt.hubs):
            break
        assert nxt.value >= sp.value or True
        bad = nxt.verify(b)
        if not any("empty" in x for x in bad):
            assert bad == []
        sp = nxt


# -- covering digraph ---------------------------------------------------------------

def test_covering_complete_bipartite():
    b = make_blockade([2, 2], [(u, v) for u in (0, 1) for v in (2, 3)])
    J = build_covering_digraph(b, Fraction(1, 6))
    assert sorted(J.arcs) == [(0, 1), (1, 0)]
    assert all(X.bit_count() == 1 for X in J.covers.values())
    assert J.verify(b) == []


def test_covering_no_edges():
    J = build_covering_digraph(make_blockade([3, 3], []))
    assert J.arcs == []


@given(blockades(min_k=2, max_k=4, max_w=4), st.sampled_from([Fraction(1, 6), Fraction(1, 4)]))
def test_covering_invariants_and_fixpoint(b, tau):
    J = build_covering_digraph(b, tau)
    assert J.verify(b) == []
    again = augment(b, start=J)
    assert again.arcs == J.arcs


def test_covering_default_tau_from_card(monkeypatch):
    seen = []
    real = bounds.regime_card

    def spy(theorem, **kw):
        seen.append(theorem)
        return real(theorem, **kw)

    monkeypatch.setattr(bounds, "regime_card", spy)
    J = build_covering_digraph(make_blockade([2, 2], []))
    assert seen == ["covering"] and J.tau == Fraction(1, 6)


# -- broom ----------------------------------------------------------------------

def broom_via_cover_blocks(k, t, W):
    # path blocks P_0..P_{k-1} complete in a line; cover blocks complete to P_{k-1} only
    sizes = [W] * (k + t)
    edges = []
    blk = lambda i: range(i * W, (i + 1) * W)
    for i in range(k - 1):
        edges += [(u, v) for u in blk(i) for v in blk(i + 1)]
    for j in range(k, k + t):
        edges += [(u, v) for u in blk(k - 1) for v in blk(j)]
    return make_blockade(sizes, edges)


def test_broom_hand_built_instance():
    b = broom_via_cover_blocks(3, 2, 2)
    out = run(find_transversal_broom, b, 3, 2)
    assert out.ok
    assert any(s.name.startswith("1:path") for s in out.trace)


def test_broom_minimal_singletons():
    b = singleton_blockade(5, [(0, 1), (1, 2), (2, 3), (2, 4)])
    assert find_copy(b, broom_pattern(3, 2), TRANSVERSAL) is not None
    run(find_transversal_broom, b, 3, 2)


def test_broom_empty_graph():
    out = run(find_transversal_broom, make_blockade([2] * 5, []), 3, 2)
    assert not out.ok and out.failure_stage == "covering-digraph"


def test_broom_preconditions():
    with pytest.raises(FinderPrecondition):
        find_transversal_broom(make_blockade([2] * 4, []), 3, 2)
    with pytest.raises(FinderPrecondition):
        find_transversal_broom(make_blockade([2] * 3, []), 3, 0)


def test_independent_blocks_greedy():
    b = make_blockade([2, 2, 2, 2], [(u, v) for u in (0, 1) for v in (2, 3)])
    J = build_covering_digraph(b)
    S = independent_blocks(J, 4)
    for i in S:
        for j in S:
            if i != j:
                assert not J.has_arc(i, j)


# -- cycles ---------------------------------------------------------------------

def test_c4_in_order():
    b = singleton_blockade(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    out = run(find_transversal_c4, b)
    assert out.ok


def test_c4_through_anticomplete_branch():
    # blocks 0 and 1 anticomplete; everything else dense and seeded
    from purepairs.rng import SplitMix64
    r = SplitMix64(11)
    W = 6
    edges = []
    for i in range(4):
        for j in range(i + 1, 4):
            if (i, j) == (0, 1):
                continue
            for u in range(i * W, (i + 1) * W):
                for v in range(j * W, (j + 1) * W):
                    if r.bernoulli(Fraction(1, 2)):
                        edges.append((u, v))
    b = make_blockade([W] * 4, edges)
    out = run(find_transversal_c4, b)
    names = [s.name for s in out.trace]
    assert "3:direct" in names
    if out.ok:
        assert find_copy(b, cycle_pattern(4), TRANSVERSAL) is not None


def test_c4_wrong_length():
    with pytest.raises(FinderPrecondition):
        find_transversal_c4(singleton_blockade(3, []))


def test_cycle_proof_shaped_five_cycle():
    # v1 in block 0 sees blocks 1 and 2; block 1 reaches block 3; 3-4 closes to 2
    b = singleton_blockade(5, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 4)])
    out = run(find_transversal_cycle, b)
    assert out.ok


def test_cycle_empty_graph():
    out = run(find_transversal_cycle, make_blockade([2] * 5, []))
    assert not out.ok and out.failure_stage == "v1"


def test_cycle_wrong_length():
    with pytest.raises(FinderPrecondition):
        find_transversal_cycle(singleton_blockade(4, []))


# -- ordered trees --------------------------------------------------------------

def test_caterpillar_two_path():
    b = singleton_blockade(2, [(0, 1)])
    out = run(find_ordered_caterpillar, b, path_pattern(2, True), 0, [0])
    assert out.ok and out.result.assignment == (0, 1)


def test_caterpillar_nested_star():
    # C_1 = block 0 = {0..7}; block 1 = {8} sees 0..3, block 2 = {9} sees 0,1, block 3 = {10} sees 0
    edges = [(a, 8) for a in range(4)] + [(a, 9) for a in range(2)] + [(0, 10)]
    b = make_blockade([8, 1, 1, 1], edges)
    p = star_pattern(3, ordered=True)
    out = run(find_ordered_caterpillar, b, p, 0)
    assert out.ok and out.result.assignment == (0, 8, 9, 10)
    assert [s.name for s in out.trace if ":" in s.name][:3] == ["1:leaf[1]", "2:leaf[2]", "3:move[0->3]"]


def test_spider_is_not_a_caterpillar():
    spider = pattern_from_edges(7, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)], True)
    with pytest.raises(FinderPrecondition):
        caterpillar_spine(spider)
    with pytest.raises(FinderPrecondition):
        find_ordered_caterpillar(make_blockade([1] * 7, []), spider)


def test_caterpillar_head_rules():
    # spine 1-2-3, so vertex 2 sits in the middle
    p = pattern_from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)], True)
    assert is_head(p, 0) and is_head(p, 4) and not is_head(p, 2) and not is_head(p, 5)
    with pytest.raises(FinderPrecondition):
        find_ordered_caterpillar(make_blockade([1] * 6, []), p, head=2)


def test_tree_unique_path():
    b = singleton_blockade(3, [(0, 1), (1, 2)])
    p = path_pattern(3, True)
    out = run(embed_ordered_tree, b, p)
    assert out.ok and count_copies(b, p, ORDERED) == 1


def test_peel_order():
    assert peel_order_ok(star_pattern(2, True))
    assert not peel_order_ok(pattern_from_edges(3, [(0, 2), (1, 2)], True))
    with pytest.raises(FinderPrecondition):
        embed_ordered_tree(make_blockade([1] * 3, []), pattern_from_edges(3, [(0, 2), (1, 2)], True))


@pytest.mark.parametrize("seed", range(20))
def test_tree_matches_oracle(seed):
    # centre first, last vertex a leaf of the first one
    b = gen_regular_blockade(3, 4, 2, seed).blockade
    p = star_pattern(2, ordered=True)
    out = run(embed_ordered_tree, b, p)
    assert out.ok == (count_copies(b, p, ORDERED) > 0)


# -- soundness on arbitrary input ---------------------------------------------------

@given(blockades(min_k=2, max_k=6, max_w=4))
def test_all_finders_sound(b):
    calls = [(find_transversal_path, ())]
    if b.k >= 3:
        calls.append((find_rainbow_star, (2,)))
    if b.k >= 2:
        calls.append((find_transversal_broom, (b.k - 1, 1)))
    if b.k == 4:
        calls.append((find_transversal_c4, ()))
    if b.k >= 5:
        calls.append((find_transversal_cycle, ()))
    calls.append((find_ordered_caterpillar, (path_pattern(b.k, True),)))
    calls.append((embed_ordered_tree, (path_pattern(b.k, True),)))
    for fn, args in calls:
        run(fn, b, *args)


# -- every finder reads its constants from the regime card -----------------------------

@pytest.mark.parametrize("fn, args, k, theorem", [
    (find_transversal_path, (), 3, "path"),
    (find_rainbow_star, (2,), 3, "star"),
    (find_transversal_broom, (2, 1), 3, "broom"),
    (find_transversal_c4, (), 4, "cycle4"),
    (find_transversal_cycle, (), 5, "cycle"),
    (find_ordered_caterpillar, (path_pattern(3, True),), 3, "caterpillar"),
    (embed_ordered_tree, (path_pattern(3, True),), 3, "tree-count"),
])
def test_finders_consult_regime_card(monkeypatch, fn, args, k, theorem):
    seen = []
    real = bounds.regime_card

    def spy(th, **kw):
        seen.append(th)
        return real(th, **kw)

    monkeypatch.setattr(bounds, "regime_card", spy)
    out = fn(make_blockade([2] * k, []), *args)
    assert theorem in seen
    assert out.regime["theorem"] == theorem


def test_caterpillar_single_vertex():
    b = make_blockade([3], [])
    out = run(find_ordered_caterpillar, b, path_pattern(1, True))
    assert out.ok and out.result.assignment == (0,)
