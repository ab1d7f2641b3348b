"""Acceptance suite: one test per criterion, each reporting a single PASS/FAIL/VACUOUS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""

import time
from collections import Counter
from fractions import Fraction

import pytest

from purepairs import bounds, finders
from purepairs.cli import main
from purepairs.exact import ceil_frac, fmt_rational, power_of
from purepairs.finders import covering
from purepairs.generators import (
    GenSpec,
    gen_ordered_star_counterexample,
    gen_regular_blockade,
    gen_star_free_blockade,
)
from purepairs.graphcore import (
    ORDERED,
    RAINBOW,
    TRANSVERSAL,
    Blockade,
    Graph,
    Pattern,
    path_pattern,
    star_pattern,
    verify_witness,
)
from purepairs.metrics import check_coherence, check_degree_cohesion_premises, check_manyedges_premise_conclusion
from purepairs.oracle import BudgetExceeded, count_copies, count_copies_naive, find_copy
from purepairs.rng import SplitMix64

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


def report(num, status, detail, seconds):
    line = f"criterion {num} {status}: {detail} [{seconds:.1f}s]"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)


def random_blockade(r, k, sizes, p):
    n = sum(sizes)
    rows = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if r.bernoulli(p):
                rows[u] |= 1 << v
                rows[v] |= 1 << u
    blocks, v = [], 0
    for s in sizes:
        blocks.append(list(range(v, v + s)))
        v += s
    return Blockade(Graph(n, rows), blocks)


DENSITIES = [Fraction(0), Fraction(1, 20), Fraction(1, 5), Fraction(1, 2), Fraction(9, 10), Fraction(1)]


def fuzz_instance(r):
    """Random or adversarial blockade with k <= 6 and width <= 30."""
    k = 1 + r.randbelow(6)
    W = 1 + r.randbelow(30)
    family = r.randbelow(4)
    if family == 0 and k >= 2:
        return gen_regular_blockade(k, W, r.randbelow(W + 1), r.next_u64()).blockade
    if family == 1:
        # one dense pair, everything else empty
        b = random_blockade(r, k, [W] * k, Fraction(0))
        rows = list(b.graph.rows)
        if k >= 2:
            i, j = r.sample(range(k), 2)
            for u in b.blocks[i]:
                for v in b.blocks[j]:
                    if r.bernoulli(Fraction(3, 4)):
                        rows[u] |= 1 << v
                        rows[v] |= 1 << u
        return Blockade(Graph(b.graph.n, rows), [list(x) for x in b.blocks])
    sizes = [W + r.randbelow(3) for _ in range(k)]
    return random_blockade(r, k, sizes, r.choice(DENSITIES))


def random_ordered_tree(r, k):
    # each vertex after the first attaches to an earlier one, so the leaf-last peel works
    edges = [(r.randbelow(i), i) for i in range(1, k)]
    return Pattern(Graph.from_edges(k, edges), True, "tree")


def random_caterpillar(r, k):
    spine = 1 + r.randbelow(k)
    edges = [(i, i + 1) for i in range(spine - 1)]
    edges += [(r.randbelow(spine), v) for v in range(spine, k)]
    perm = r.permutation(k)
    edges = [(perm[u], perm[v]) for u, v in edges]
    p = Pattern(Graph.from_edges(k, edges), True, "caterpillar")
    heads = [v for v in range(k) if finders.ordered.is_head(p, v)]
    return p, r.choice(heads)


def finder_calls(r, b):
    k = b.k
    calls = []
    if k >= 2:
        calls.append(("path", lambda: finders.find_transversal_path(b)))
        K = 1 + r.randbelow(k - 1)
        calls.append(("star", lambda: finders.find_rainbow_star(b, K)))
        t = 1 + r.randbelow(k - 1)
        calls.append(("broom", lambda: finders.find_transversal_broom(b, k - t, t)))
        J = lambda: covering.build_covering_digraph(b, r.choice([Fraction(1, 6), Fraction(1, 4)]))
        calls.append(("covering", J))
    if k == 4:
        calls.append(("c4", lambda: finders.find_transversal_c4(b)))
    if k >= 5:
        calls.append(("cycle", lambda: finders.find_transversal_cycle(b)))
    tree = random_ordered_tree(r, k)
    calls.append(("tree", lambda: finders.embed_ordered_tree(b, tree)))
    cat, head = random_caterpillar(r, k)
    calls.append(("caterpillar", lambda: finders.find_ordered_caterpillar(b, cat, head)))
    return calls


# 1 ----------------------------------------------------------------------------------

def test_criterion_1_soundness_fuzz():
    t0 = time.perf_counter()
    r = SplitMix64(20261015)
    target = 10_000
    runs, bad, errors, found = 0, [], [], Counter()
    while runs < target:
        b = fuzz_instance(r)
        for name, call in finder_calls(r, b):
            if runs >= target:
                break
            runs += 1
            try:
                out = call()
            except Exception as exc:  # noqa: BLE001 - counted, not raised
                errors.append(f"{name}: {type(exc).__name__}: {exc}")
                continue
            if name == "covering":
                if out.verify(b):
                    bad.append(name)
                continue
            if out.ok:
                found[name] += 1
                if not verify_witness(b, out.pattern, out.result).ok:
                    bad.append(name)
    dt = time.perf_counter() - t0
    ok = not bad and not errors and dt < 300
    report(1, "PASS" if ok else "FAIL",
           f"{runs} invocations, {sum(found.values())} witnesses all verified, "
           f"{len(bad)} unsound, {len(errors)} exceptions", dt)
    assert not errors, errors[:5]
    assert not bad
    assert dt < 300


# 2 ----------------------------------------------------------------------------------

def test_criterion_2_path_theorem():
    t0 = time.perf_counter()
    grid = [(k, W) for k in (2, 3, 4, 5) for W in range(20, 61, 5)]
    jobs = [(k, W, s) for s in range(14) for k, W in grid][:500]
    verified, failures = Counter(), []
    status = Counter()
    for k, W, seed in jobs:
        eps = Fraction(1, 2 * k - 2)
        d = max(0, ceil_frac(eps * W) - 1)
        b = gen_regular_blockade(k, W, d, seed).blockade
        rep = check_coherence(b, eps, 100_000)
        status[(k, rep.satisfied)] += 1
        if rep.satisfied is not True:
            continue
        verified[k] += 1
        out = finders.find_transversal_path(b, eps)
        ok = out.ok and verify_witness(b, out.pattern, out.result).ok and out.result.blocks_used[0] == 0
        if not ok:
            failures.append((k, W, seed, out.failure_stage))
    dt = time.perf_counter() - t0
    n_ver = sum(verified.values())
    cover = ", ".join(
        f"k={k}: {status[(k, True)]} verified/{status[(k, False)]} violated/{status[(k, None)]} undetermined"
        for k in (2, 3, 4, 5))
    ok = not failures and n_ver > 0 and dt < 600
    report(2, "PASS" if ok else "FAIL",
           f"{len(jobs)} instances, {n_ver} premise-verified, {n_ver - len(failures)} succeeded ({cover})", dt)
    assert n_ver > 0
    assert not failures, failures[:5]
    assert dt < 600


# 3 ----------------------------------------------------------------------------------

def premises_impossible(k, c, W):
    """Exact proof that no blockade of width W satisfies the counting premises.

    Local degree below eps W allows at most D = ceil(eps W) - 1 neighbours, so
    any x-set X of block i sees at most x D vertices of block j and leaves at
    least W - x D unseen.  When that is at least y, (x, y)-cohesion fails.
    """
    card = bounds.regime_card("tree-count", k=k, c=c)
    x = max(1, ceil_frac(card.eps * W))
    y = max(1, power_of(card.eps, W, c).ceil())
    D = ceil_frac(card.eps * W) - 1
    return x <= W and W - x * D >= y


def test_criterion_3_counting_bound():
    t0 = time.perf_counter()
    grid = [(k, c, W) for k in (2, 3, 4) for c in sorted({Fraction(1, k - 1), Fraction(1, k)})
            for W in range(4, 13)]
    impossible = all(premises_impossible(k, c, W) for k, c, W in grid)
    verified, violations = 0, []
    for i in range(100):
        k, c, W = grid[i % len(grid)]
        card = bounds.regime_card("tree-count", k=k, c=c)
        d = max(0, ceil_frac(card.eps * W) - 1)
        b = gen_regular_blockade(k, W, d, i).blockade
        if bounds.check_regime(b, card).satisfied is not True:
            continue
        verified += 1
        floor = card.thresholds(W)["count_floor"].ceil()
        n = count_copies(b, path_pattern(k, True), ORDERED)
        if n < floor:
            violations.append((k, c, W, i, n, floor))

    dt = time.perf_counter() - t0
    if verified == 0 and impossible:
        status = "VACUOUS"
        detail = (f"100 instances, 0 premise-verified; the premises are provably unsatisfiable at all "
                  f"{len(grid)} grid points (k, c, W <= 12), so the bound is never exercised")
    else:
        status = "PASS" if not violations else "FAIL"
        detail = f"100 instances, {verified} premise-verified, {len(violations)} below the floor"
    report(3, status, detail, dt)
    assert not violations
    assert verified > 0 or impossible


# 4 ----------------------------------------------------------------------------------

def test_criterion_4_counterexamples():
    t0 = time.perf_counter()
    star_hits, ord_hits, undecided = [], [], 0
    for seed in range(50):
        b = gen_star_free_blockade(3, 8, seed=seed).blockade
        try:
            if find_copy(b, star_pattern(3), RAINBOW, budget=5_000_000) is not None:
                star_hits.append(seed)
        except BudgetExceeded:
            undecided += 1
    p = star_pattern(3, ordered=True, centre_last=True)
    n_ord = 0
    for n in range(4, 9):
        for seed in range(10):
            b = gen_ordered_star_counterexample(3, Fraction(1, 2), Fraction(1, 2), n, seed, integral=False).blockade
            n_ord += 1
            try:
                if find_copy(b, p, ORDERED, budget=5_000_000) is not None:
                    ord_hits.append((n, seed))
            except BudgetExceeded:
                undecided += 1
    dt = time.perf_counter() - t0
    ok = not star_hits and not ord_hits and not undecided and dt < 300
    report(4, "PASS" if ok else "FAIL",
           f"rainbow S_3: 50 instances, {len(star_hits)} found; ordered S_3^+: {n_ord} instances "
           f"(n=4..8), {len(ord_hits)} found; {undecided} undecided", dt)
    assert not star_hits and not ord_hits and not undecided
    assert dt < 300


# 5 ----------------------------------------------------------------------------------

def test_criterion_5_covering_invariants():
    t0 = time.perf_counter()
    r = SplitMix64(5)
    bad, not_fixed, arcs = [], [], Counter()
    for i in range(200):
        k = 2 + r.randbelow(5)
        W = 1 + r.randbelow(40)
        tau = (Fraction(1, 6), Fraction(1, 4))[i % 2]
        if i % 3 == 0:
            b = gen_regular_blockade(k, W, r.randbelow(W + 1), i).blockade
        else:
            b = random_blockade(r, k, [W] * k, r.choice(DENSITIES))
        J = covering.build_covering_digraph(b, tau)
        if J.verify(b):
            bad.append(i)
        if covering.augment(b, start=J).arcs != J.arcs:
            not_fixed.append(i)
        arcs[len(J.arcs) > 0] += 1
    dt = time.perf_counter() - t0
    ok = not bad and not not_fixed and dt < 300
    report(5, "PASS" if ok else "FAIL",
           f"200 builds ({arcs[True]} with arcs), {len(bad)} invariant failures, {len(not_fixed)} not at a fixpoint", dt)
    assert not bad and not not_fixed
    assert dt < 300


# 6 ----------------------------------------------------------------------------------

def adversarial_X(b, eps, c, size):
    """Greedy: grow X inside block 0 keeping as many low-degree vertices in block 1 as possible."""
    rows = b.graph.rows
    cap = power_of(Fraction(1, 2), b.width, 1 - c)
    X = 0
    pool = list(b.blocks[0])
    while X.bit_count() < size:
        best = max(pool, key=lambda u: (sum(1 for v in b.blocks[1]
                                            if not cap.lt((rows[v] & (X | 1 << u)).bit_count())), -u))
        X |= 1 << best
        pool.remove(best)
    return X


def test_criterion_6_many_edges_count():
    t0 = time.perf_counter()
    r = SplitMix64(6)
    grid = [(eps, c, W) for eps in (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))
            for c in (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1))
            for W in range(8, 17)]
    verified, checks, violations, tries = 0, 0, [], 0
    per_eps = Counter()
    while verified < 1000 and tries < 40_000:
        eps, c, W = grid[tries % len(grid)]
        seed = tries
        tries += 1
        d = max(0, ceil_frac(eps * W) - 1)
        b = gen_regular_blockade(2, W, d, seed).blockade
        prem = check_degree_cohesion_premises(b, eps, c, 200_000)
        if prem.satisfied is not True:
            continue
        verified += 1
        per_eps[fmt_rational(eps)] += 1
        size = ceil_frac(2 * eps * W)
        Xs = [sum(1 << v for v in r.sample(b.blocks[0], size)) for _ in range(3)]
        Xs.append(adversarial_X(b, eps, c, size))
        for X in Xs:
            checks += 1
            rep = check_manyedges_premise_conclusion(b, eps, c, X, premises=prem)
            if not rep.holds:
                violations.append((fmt_rational(eps), fmt_rational(c), W, seed, rep.count))
    dt = time.perf_counter() - t0
    ok = verified >= 1000 and not violations and dt < 600
    report(6, "PASS" if ok else "FAIL",
           f"{verified} premise-verified instances from {tries} samples "
           f"(by eps: {dict(sorted(per_eps.items()))}), {checks} sets X checked, {len(violations)} violations", dt)
    assert verified >= 1000
    assert not violations, violations[:5]
    assert dt < 600


# 7 ----------------------------------------------------------------------------------

def random_pattern(r, k, ordered):
    edges = [(u, v) for u in range(k) for v in range(u + 1, k) if r.bernoulli(Fraction(1, 2))]
    return Pattern(Graph.from_edges(k, edges), ordered, "random")


def test_criterion_7_oracle_equivalence():
    t0 = time.perf_counter()
    r = SplitMix64(7)
    mismatches, compared, nonzero = [], 0, 0
    for i in range(50):
        k = 1 + r.randbelow(4)
        sizes = [1 + r.randbelow(6) for _ in range(k)]
        b = random_blockade(r, k, sizes, r.choice(DENSITIES[1:5]))
        cases = [(ORDERED, random_pattern(r, k, True)), (TRANSVERSAL, random_pattern(r, k, False)),
                 (RAINBOW, random_pattern(r, 1 + r.randbelow(k), False))]
        for kind, p in cases:
            a, n = count_copies(b, p, kind), count_copies_naive(b, p, kind)
            compared += 1
            nonzero += a > 0
            if a != n:
                mismatches.append((i, kind, a, n))
    dt = time.perf_counter() - t0
    ok = not mismatches and dt < 120
    report(7, "PASS" if ok else "FAIL",
           f"50 instances, {compared} counts compared ({nonzero} non-zero), {len(mismatches)} mismatches", dt)
    assert not mismatches
    assert dt < 120


# 8 ----------------------------------------------------------------------------------

def test_criterion_8_binomial_estimate():
    t0 = time.perf_counter()
    fails = [(n, k) for n in range(1, 61) for k in range(1, n + 1) if not bounds.binom_upper(n, k).holds]
    dt = time.perf_counter() - t0
    pairs = 60 * 61 // 2
    ok = not fails and dt < 1
    report(8, "PASS" if ok else "FAIL", f"{pairs} pairs 1 <= k <= n <= 60, {len(fails)} failures", dt)
    assert not fails
    assert dt < 1


# 9 ----------------------------------------------------------------------------------

GEN_SPECS = [
    GenSpec("random-bipartite", 3, {"n": 12, "eps": "1/2"}),
    GenSpec("regular", 3, {"k": 4, "W": 10, "d": 2}),
    GenSpec("star-free", 3, {"k": 3, "W": 8}),
    GenSpec("double-broom", 3, {"k": 1, "W": 6}),
    GenSpec("ordered-star", 3, {"t": 3, "c": "1/2", "eps": "1/2", "n": 8, "integral": False}),
]


def _finder_outputs(b):
    r = SplitMix64(9)
    return [call().to_json() if name != "covering" else repr(call().arcs) for name, call in finder_calls(r, b)]


def test_criterion_9_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    diffs = []
    for spec in GEN_SPECS:
        a, b = spec.run(), GenSpec.from_text(spec.to_text()).run()
        if a.instance_bytes() != b.instance_bytes() or a.audit_json() != b.audit_json():
            diffs.append(f"gen {spec.kind}")
    r = SplitMix64(99)
    for i in range(20):
        inst = fuzz_instance(r)
        if _finder_outputs(inst) != _finder_outputs(inst):
            diffs.append(f"finders on instance {i}")
    csvs = []
    for jobs in ("1", "1", "2"):
        out = tmp_path / f"s{len(csvs)}.csv"
        main(["sweep", "--k", "2,3", "--W", "6,10", "--eps", "1/2", "--seeds", "3", "--jobs", jobs, "-o", str(out)])
        csvs.append(out.read_bytes())
    capsys.readouterr()
    if len(set(csvs)) != 1:
        diffs.append("sweep csv")
    dt = time.perf_counter() - t0
    ok = not diffs and dt < 120
    report(9, "PASS" if ok else "FAIL",
           f"{len(GEN_SPECS)} generators, 20 instances x all finders, sweep CSV (serial and 2 jobs): "
           f"{len(diffs)} differences", dt)
    assert not diffs, diffs
    assert dt < 120


# 10 ---------------------------------------------------------------------------------

CARD_VALUES = [
    ("path", {"k": 4}, Fraction(1, 6)),
    ("star", {"k": 3}, Fraction(1, 3 ** 5)),
    ("cycle4", {}, Fraction(1, 4)),
    ("cycle", {"k": 5}, Fraction(1, 15)),
    ("tree-count", {"k": 3}, Fraction(1, 4 ** 2)),
    ("caterpillar", {"d": 2, "k": 4}, Fraction(1, 4 ** 2) / 4),
]


def test_criterion_10_regime_cards():
    t0 = time.perf_counter()
    wrong = [(th, kw, bounds.regime_card(th, **kw).eps) for th, kw, want in CARD_VALUES
             if bounds.regime_card(th, **kw).eps != want]
    dt = time.perf_counter() - t0
    report(10, "PASS" if not wrong else "FAIL",
           f"{len(CARD_VALUES)} spot values, {len(wrong)} mismatches", dt)
    assert not wrong, wrong
