from fractions import Fraction

import pytest

from purepairs.generators import (
    SAMPLED,
    VERIFIED,
    GenerationFailed,
    GenSpec,
    ParameterError,
    gen_double_broom_counterexample,
    gen_ordered_star_counterexample,
    gen_regular_blockade,
    gen_sparse_cohesive_bipartite,
    gen_star_free_blockade,
    generate,
    integral_size,
    lemma_constants,
    ordered_star_exponent,
)
from purepairs.graphcore import ORDERED, RAINBOW, TRANSVERSAL, double_broom_pattern, star_pattern
from purepairs.instance import read_instance
from purepairs.metrics import check_cohesion
from purepairs.oracle import find_copy


def test_lemma_constants():
    assert lemma_constants(Fraction(1, 2)) == (12, 67)
    assert lemma_constants(1) == (3, 18)
    assert lemma_constants(Fraction(1, 4)) == (45, 247)
    with pytest.raises(ParameterError):
        lemma_constants(0)
    with pytest.raises(ParameterError):
        lemma_constants(Fraction(3, 2))


def test_random_bipartite_audit():
    g = gen_sparse_cohesive_bipartite(12, Fraction(1, 2), 7)
    lem = g.audit["lemma"]
    assert lem["cohesion_status"] == VERIFIED
    assert lem["max_degree"] < lem["d"]
    b = g.blockade
    assert b.k == 2 and b.size(0) == b.size(1) == 12
    # the audit is re-checkable from the instance alone
    assert check_cohesion(b, 6, 6).satisfied is True
    assert b.graph.max_degree() == lem["max_degree"]


def test_random_bipartite_eps_one_has_edges():
    g = gen_sparse_cohesive_bipartite(8, 1, 3)
    assert g.blockade.graph.num_edges() >= 1


def test_random_bipartite_too_small():
    with pytest.raises(ParameterError):
        gen_sparse_cohesive_bipartite(1, 1, 0)


def test_random_bipartite_budget_zero_is_only_sampled():
    g = gen_sparse_cohesive_bipartite(20, Fraction(1, 2), 0, budget=0)
    assert g.audit["lemma"]["cohesion_status"] == SAMPLED


def test_random_bipartite_failure_keeps_best(monkeypatch):
    from purepairs import generators
    from purepairs.metrics import CohesionReport, EXACT

    def always_violated(b, x, y, budget=0):
        return CohesionReport(False, EXACT, x, y, None, 0, "forced")

    monkeypatch.setattr(generators, "check_cohesion", always_violated)
    with pytest.raises(GenerationFailed) as ei:
        gen_sparse_cohesive_bipartite(10, Fraction(1, 2), 0, max_attempts=3)
    best = ei.value.best
    assert best is not None and best.blockade.k == 2
    assert best.audit["lemma"]["attempts_exhausted"] is True


def test_random_bipartite_needs_an_attempt():
    with pytest.raises(ParameterError):
        gen_sparse_cohesive_bipartite(10, 1, 0, max_attempts=0)


@pytest.mark.parametrize("make", [
    lambda s: gen_sparse_cohesive_bipartite(10, Fraction(1, 2), s),
    lambda s: gen_regular_blockade(3, 8, 2, s),
    lambda s: gen_star_free_blockade(3, 6, seed=s),
    lambda s: gen_double_broom_counterexample(1, 6, seed=s),
    lambda s: gen_ordered_star_counterexample(3, Fraction(1, 2), Fraction(1, 2), 8, s, integral=False),
])
def test_byte_identical_reruns(make):
    a, b = make(5), make(5)
    assert a.instance_bytes() == b.instance_bytes()
    assert a.audit_json() == b.audit_json()
    c = make(6)
    assert read_instance(c.instance_bytes().decode()).k == a.blockade.k


def test_regular_degrees():
    g = gen_regular_blockade(3, 10, 3, 1)
    b = g.blockade
    for v in range(b.graph.n):
        for j in range(b.k):
            if j != b.block_of(v):
                assert (b.graph.rows[v] & b.masks[j]).bit_count() <= 3


def test_star_free_two_blocks():
    g = gen_star_free_blockade(2, 10, seed=0)
    assert g.blockade.k == 2
    assert g.blockade.width == 10


@pytest.mark.parametrize("seed", range(3))
def test_star_free_has_no_rainbow_star(seed):
    g = gen_star_free_blockade(3, 8, seed=seed)
    assert find_copy(g.blockade, star_pattern(3), RAINBOW) is None
    assert g.audit["coherence"]["status"] in (VERIFIED, SAMPLED, "violated")


def test_double_broom_audit_consistency():
    g = gen_double_broom_counterexample(1, 10, seed=0)
    cons = g.audit["consistency"]
    assert all(cons.values())
    deg = g.audit["degrees"]
    assert deg["J+L"] <= deg["J"] + deg["L"]
    assert g.audit["rainbow_scope"] == "full blockade"


@pytest.mark.parametrize("W", [2, 3, 4])
def test_double_broom_absent(W):
    g = gen_double_broom_counterexample(1, W, seed=W)
    b = g.blockade
    assert b.k == 7
    assert find_copy(b, double_broom_pattern(1, 3, 3), TRANSVERSAL) is None


def test_ordered_star_exponent_and_integral_size():
    d = ordered_star_exponent(3, Fraction(1, 2))
    assert 0 < d < 1
    with pytest.raises(ParameterError):
        integral_size(3, Fraction(1, 2), d, Fraction(1, 2), 8, 4096)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_ordered_star_absent(n):
    g = gen_ordered_star_counterexample(3, Fraction(1, 2), Fraction(1, 2), n, 0, integral=False)
    assert g.audit["closure_log"]["status"] == VERIFIED
    assert g.audit["closure_log"]["unwitnessed"] == []
    b = g.blockade
    assert b.k == 4
    p = star_pattern(3, ordered=True, centre_last=True)
    assert find_copy(b, p, ORDERED) is None


def test_ordered_star_integral_refuses_small_n():
    with pytest.raises(ParameterError):
        gen_ordered_star_counterexample(3, Fraction(1, 2), Fraction(1, 2), 8, 0)


def test_genspec_round_trip():
    s = GenSpec("star-free", 4, {"k": "3", "W": "8", "eps": "1"})
    assert s.params == {"k": 3, "W": 8, "eps": Fraction(1)}
    again = GenSpec.from_text(s.to_text())
    assert again == s
    a, b = generate(s), generate(again)
    assert a.instance_bytes() == b.instance_bytes()
    assert a.audit["spec"] == {"W": "8", "eps": "1", "k": "3"}


def test_genspec_bool_and_fraction():
    s = GenSpec("ordered-star", 1, {"t": 3, "c": "1/2", "eps": "1/2", "n": 8, "integral": "no"})
    assert s.params["eps"] == Fraction(1, 2) and s.params["integral"] is False
    assert "integral = false" in s.to_text()


@pytest.mark.parametrize("kind, params", [
    ("nope", {}),
    ("regular", {"q": 1}),
    ("ordered-star", {"integral": "maybe"}),
    ("ordered-star", {"eps": "0.5"}),
    ("regular", {"k": "three"}),
])
def test_genspec_rejects(kind, params):
    with pytest.raises(ParameterError):
        GenSpec(kind, 0, params)


@pytest.mark.parametrize("text", ["", "[other]\nkind=regular\n", "[generator]\nkind=regular\n", "not ini"])
def test_genspec_bad_text(text):
    with pytest.raises(ParameterError):
        GenSpec.from_text(text)
