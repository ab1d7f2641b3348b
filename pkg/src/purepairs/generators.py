"""Seeded constructions: sparse cohesive bipartite graphs and the counterexample blockades.

Every generator is a pure function of its parameters and a 64-bit seed (all
randomness comes from :class:`SplitMix64`).  Each returns a
:class:`Generated` holding the blockade and an audit document that says, for
each premise, whether it was verified exactly, only sampled (the exact
search ran out of budget), or not checked at this scale.
"""

from __future__ import annotations

import configparser
import decimal
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional

from .exact import Threshold, ceil_frac, fmt_rational, iroot_ceil, parse_rational
from .graphcore import Blockade, Graph, iter_bits
from .instance import write_instance
from .metrics import DEFAULT_BUDGET, EXACT, check_coherence, check_cohesion, local_degree
from .rng import SplitMix64

VERIFIED = "verified"
SAMPLED = "sampled"
VIOLATED = "violated"
UNCHECKED = "unchecked"


class ParameterError(ValueError):
    pass


class GenerationFailed(RuntimeError):
    """Rejection sampling ran out of attempts; ``best`` is the closest candidate."""

    def __init__(self, msg: str, best: "Generated | None" = None):
        super().__init__(msg)
        self.best = best


@dataclass
class Generated:
    blockade: Blockade
    audit: dict
    spec: Optional["GenSpec"] = None

    def instance_bytes(self) -> bytes:
        return write_instance(self.blockade)

    def audit_json(self) -> str:
        return json.dumps(self.audit, sort_keys=True, indent=1) + "\n"


# -- constants of the sparse random lemma ----------------------------------------

_CTX = decimal.Context(prec=60)


def _ln(q: Fraction) -> decimal.Decimal:
    return _CTX.ln(_CTX.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator)))


def lemma_constants(eps) -> tuple[int, int]:
    """Integers (c, d) with c > 4 ln2 / eps^2 and 2 ln2 < d ln(d / (2ce)), both least possible."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ParameterError("eps must lie in (0, 1]")
    ln2 = _ln(Fraction(2))
    bound = _CTX.divide(4 * ln2, _CTX.divide(decimal.Decimal(eps.numerator ** 2), decimal.Decimal(eps.denominator ** 2)))
    c = int(bound.to_integral_value(rounding=decimal.ROUND_FLOOR)) + 1
    e = _CTX.exp(decimal.Decimal(1))
    d = int((2 * c * e).to_integral_value(rounding=decimal.ROUND_FLOOR)) + 1
    while not 2 * ln2 < d * _CTX.ln(decimal.Decimal(d) / (2 * c * e)):
        d += 1
    return c, d


def _bipartite_sample(rng: SplitMix64, na: int, nb: int, p: Fraction) -> list[int]:
    """Rows over B indices (bitmask per A vertex), each pair independently with probability p."""
    rows = []
    for _ in range(na):
        r = 0
        for j in range(nb):
            if rng.bernoulli(p):
                r |= 1 << j
        rows.append(r)
    return rows


def _lemma_bipartite(n: int, eps, rng: SplitMix64, max_attempts: int, budget: int):
    """Sample the sparse cohesive bipartite graph on A = 0..n-1, B = n..2n-1.

    Returns (edges, audit, ok) where ``ok`` is False when every attempt was
    rejected; the edges are then those of the best candidate.
    """
    eps = Fraction(eps)
    if max_attempts < 1:
        raise ParameterError("max_attempts must be at least 1")
    c, d = lemma_constants(eps)
    p = min(Fraction(1), Fraction(c, n))
    x = ceil_frac(eps * n)
    best = None
    for attempt in range(1, max_attempts + 1):
        a_rows = _bipartite_sample(rng, 2 * n, 2 * n, p)
        b_deg = [0] * (2 * n)
        for r in a_rows:
            for j in iter_bits(r):
                b_deg[j] += 1
        a_deg = [r.bit_count() for r in a_rows]
        # delete the n largest degrees on each side; ties delete the lower id first
        keep_a = sorted(sorted(range(2 * n), key=lambda v: (-a_deg[v], v))[n:])
        keep_b = sorted(sorted(range(2 * n), key=lambda v: (-b_deg[v], v))[n:])
        bpos = {v: i for i, v in enumerate(keep_b)}
        edges = []
        for i, u in enumerate(keep_a):
            for j in iter_bits(a_rows[u]):
                if j in bpos:
                    edges.append((i, n + bpos[j]))
        g = Graph.from_edges(2 * n, edges)
        blk = Blockade(g, [list(range(n)), list(range(n, 2 * n))])
        maxdeg = g.max_degree()
        rep = check_cohesion(blk, x, x, budget)
        if rep.satisfied is False:
            status = VIOLATED
        elif rep.mode == EXACT:
            status = VERIFIED
        else:
            status = SAMPLED
        audit = {
            "n": n, "eps": fmt_rational(eps), "c": c, "d": d, "p": fmt_rational(p),
            "attempt": attempt, "max_degree": maxdeg, "degree_below_d": maxdeg < d,
            "cohesion": rep.to_dict(), "cohesion_status": status,
        }
        score = (status != VIOLATED, maxdeg < d)
        if best is None or score > best[0]:
            best = (score, edges, audit)
        if status != VIOLATED and maxdeg < d:
            return edges, audit, True
    _, edges, audit = best
    audit = dict(audit, attempts_exhausted=True)
    return edges, audit, False


def gen_sparse_cohesive_bipartite(n: int, eps, seed: int, max_attempts: int = 20,
                                  budget: int = DEFAULT_BUDGET) -> Generated:
    """Bipartite blockade (A, B), |A| = |B| = n, max degree below d and no anticomplete eps n pair.

    Raises :class:`GenerationFailed` (with the best candidate attached) when
    every attempt is rejected by the audit.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    eps = Fraction(eps)
    lemma_constants(eps)
    rng = SplitMix64(seed)
    edges, audit, ok = _lemma_bipartite(n, eps, rng, max_attempts, budget)
    b = Blockade(Graph.from_edges(2 * n, edges), [list(range(n)), list(range(n, 2 * n))])
    out = Generated(b, {"construction": "random-bipartite", "seed": seed, "lemma": audit})
    if not ok:
        raise GenerationFailed(f"no accepted sample in {max_attempts} attempts", out)
    return out


def gen_regular_blockade(k: int, W: int, d: int, seed: int) -> Generated:
    """k blocks of size W; each pair of blocks carries the union of d random perfect matchings.

    Local degree is at most d by construction.  Useful as a sparse family
    on which coherence can be checked exactly.
    """
    if k < 1 or W < 1 or d < 0:
        raise ParameterError("need k >= 1, W >= 1, d >= 0")
    rng = SplitMix64(seed)
    edges = set()
    for i in range(k):
        for j in range(i + 1, k):
            for _ in range(d):
                perm = rng.permutation(W)
                for a, b2 in enumerate(perm):
                    edges.add((i * W + a, j * W + b2))
    g = Graph.from_edges(k * W, sorted(edges))
    b = Blockade(g, [list(range(i * W, (i + 1) * W)) for i in range(k)])
    return Generated(b, {"construction": "regular", "seed": seed, "k": k, "W": W, "d": d,
                         "local_degree": local_degree(b)})


def _coherence_audit(b: Blockade, eps, budget: int) -> dict:
    rep = check_coherence(b, eps, budget)
    if rep.satisfied is None:
        status = SAMPLED
    else:
        status = VERIFIED if rep.satisfied else VIOLATED
    return {"status": status, "report": rep.to_dict()}


# -- no rainbow S_k ---------------------------------------------------------------

def gen_star_free_blockade(k: int, W: int, eps=1, seed: int = 0, p: int = 0, host: Graph | None = None,
                           max_attempts: int = 5, budget: int = 200_000) -> Generated:
    """Blockade of length 2^(k-1) and width W with no rainbow S_k.

    The vertex set 0..2^(k-1)W-1 is halved; a sparse cohesive bipartite
    graph J joins the halves, each half gets the edges of ``host`` inside
    it plus every pair with a common (host + J)-neighbour on the other side,
    and the construction recurses with k-1.  A centre in one half then sees
    a clique on the other side, so a star can use only one vertex there.
    """
    if k < 2:
        raise ParameterError("k must be at least 2")
    if W < 1:
        raise ParameterError("W must be at least 1")
    eps = Fraction(eps)
    N = 2 ** (k - 1) * W
    if host is None:
        host = Graph.empty(N)
    if host.n != N:
        raise ParameterError(f"host graph must have {N} vertices")
    if host.max_degree() > p:
        raise ParameterError(f"host graph has degree {host.max_degree()} > p={p}")
    rng = SplitMix64(seed)
    levels: list[dict] = []
    flags: list[str] = []

    def build(verts: list[int], kk: int, hrows: dict[int, int]):
        half = len(verts) // 2
        V1, V2 = verts[:half], verts[half:]
        e_l = Fraction(1, 2 ** (kk - 2)) * eps
        edges, audit, ok = _lemma_bipartite(half, e_l, rng.spawn(), max_attempts, budget)
        if not ok:
            flags.append(f"level k={kk}: bipartite lemma audit rejected every sample")
        J = {v: 0 for v in verts}
        for a, bb in edges:
            u, w = V1[a], V2[bb - half]
            J[u] |= 1 << w
            J[w] |= 1 << u
        G = {v: hrows[v] | J[v] for v in verts}
        rec = {"k": kk, "vertices": len(verts), "lemma": audit}
        if kk == 2:
            levels.append(rec)
            return G, [V1, V2]
        out_blocks = []
        for side, other in ((V1, V2), (V2, V1)):
            smask = sum(1 << v for v in side)
            hi = {v: hrows[v] & smask for v in side}
            for w in other:
                nb = G[w] & smask
                for u in iter_bits(nb):
                    hi[u] |= nb & ~(1 << u)
            rec.setdefault("half_degrees", []).append(max(m.bit_count() for m in hi.values()))
            Gi, bi = build(side, kk - 1, hi)
            for v in side:
                G[v] |= Gi[v]
            out_blocks += bi
        levels.append(rec)
        return G, out_blocks

    G, blocks = build(list(range(N)), k, {v: host.rows[v] for v in range(N)})
    edges = [(u, v) for u in range(N) for v in iter_bits(G[u]) if u < v]
    b = Blockade(Graph.from_edges(N, edges), blocks)
    audit = {
        "construction": "star-free", "seed": seed, "k": k, "W": W, "eps": fmt_rational(eps), "p": p,
        "levels": sorted(levels, key=lambda r: -r["k"]),
        "local_degree": local_degree(b),
        "coherence": _coherence_audit(b, eps, budget),
        "claim": f"no rainbow S_{k}",
        "claim_status": UNCHECKED,
        "flags": flags,
    }
    return Generated(b, audit)


# -- no transversal B(k,3,3) -------------------------------------------------------

def gen_double_broom_counterexample(k: int, W: int, eps=1, seed: int = 0, max_attempts: int = 5,
                                    budget: int = 200_000) -> Generated:
    """Three-layer blockade of length k+6 with no rainbow double broom B(k,3,3).

    J joins every pair of blocks by a sparse cohesive bipartite graph.  On
    V1 (the last three blocks) L joins the ends of every rainbow J-path of
    length one or two whose middle vertex lies in V2 (the first k+3 blocks).
    On V2, R joins the ends of every rainbow (J+L)-path whose interior lies
    in V1.  Rainbow is taken with respect to the whole blockade.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if W < 2:
        raise ParameterError("W must be at least 2")
    eps = Fraction(eps)
    K = k + 6
    N = K * W
    rng = SplitMix64(seed)
    blk = [v // W for v in range(N)]
    v1 = sum(1 << v for v in range((k + 3) * W, N))
    v2 = (1 << ((k + 3) * W)) - 1
    J = [0] * N
    lemma = {}
    flags = []
    for i in range(K):
        for j in range(i + 1, K):
            edges, audit, ok = _lemma_bipartite(W, eps, rng.spawn(), max_attempts, budget)
            if not ok:
                flags.append(f"J[{i},{j}]: bipartite lemma audit rejected every sample")
            lemma[f"{i},{j}"] = audit
            for a, bb in edges:
                u, w = i * W + a, j * W + bb - W
                J[u] |= 1 << w
                J[w] |= 1 << u
    d = lemma["0,1"]["d"]

    L = [0] * N
    for u in iter_bits(v1):
        L[u] |= J[u] & v1
        for w in iter_bits(J[u] & v2):
            for v in iter_bits(J[w] & v1):
                if v != u and len({blk[u], blk[w], blk[v]}) == 3:
                    L[u] |= 1 << v
    JL = [J[v] | L[v] for v in range(N)]

    R = [0] * N

    def walk(start: int, cur: int, used: set[int]):
        for x in iter_bits(JL[cur]):
            if blk[x] in used:
                continue
            if v2 >> x & 1:
                if x != start:
                    R[start] |= 1 << x
            else:
                walk(start, x, used | {blk[x]})

    for u in iter_bits(v2):
        walk(u, u, {blk[u]})

    edges = set()
    for u in range(N):
        for v in iter_bits(JL[u] | R[u]):
            if u < v:
                edges.add((u, v))
    g = Graph.from_edges(N, sorted(edges))
    b = Blockade(g, [list(range(i * W, (i + 1) * W)) for i in range(K)])

    def maxdeg(rows):
        return max(r.bit_count() for r in rows)

    dj, dl, dr, djl = maxdeg(J), maxdeg(L), maxdeg(R), maxdeg(JL)
    jl_bound = (k + 3) * d + 2 * d + 3 * (k + 3) * d * d
    l_bound = 2 * d + 3 * (k + 3) * d * d
    audit = {
        "construction": "double-broom", "seed": seed, "k": k, "W": W, "eps": fmt_rational(eps), "d": d,
        "lemma": lemma,
        "degrees": {"J": dj, "L": dl, "R": dr, "J+L": djl},
        "bounds": {
            "J": d - 1, "L": l_bound, "J+L": jl_bound, "R": jl_bound ** 4,
            "local": jl_bound ** 4 + d + 3 * (k + 3) * d * d,
        },
        "consistency": {
            "R_le_JL_pow4": dr <= djl ** 4,
            "R_le_path_count": dr <= sum(djl ** e for e in range(1, 5)),
            "J_below_d": dj < (K - 1) * d,
            "L_within_bound": dl <= l_bound,
        },
        "local_degree": local_degree(b),
        "in_regime": jl_bound ** 4 + d + 3 * (k + 3) * d * d < eps * W,
        "coherence": _coherence_audit(b, eps, budget),
        "rainbow_scope": "full blockade",
        "flags": flags,
    }
    return Generated(b, audit)


# -- no ordered S_t^+ with the centre last ----------------------------------------

def ordered_star_exponent(t: int, c) -> Fraction:
    """Midpoint of the admissible interval for the intermediate exponent d."""
    c = Fraction(c)
    lo = Fraction(1, t)
    hi = min(c, lo + (c - lo) / (t - 1), Fraction(2, t))
    return (lo + hi) / 2


def _is_int_power(n: int, e: Fraction) -> bool:
    return Threshold(Fraction(1), n, e).is_integral()


def integral_size(t: int, c, d, eps, n: int, max_n: int) -> int:
    """Least N = m^L >= n (L the lcm of the exponent denominators) making every required power integral."""
    exps = [Fraction(c), Fraction(d), Fraction(1, t), 1 - Fraction(d)]
    L = lcm(*(e.denominator for e in exps))
    eps = Fraction(eps)
    m = 2
    while True:
        N = m ** L
        if N > max_n:
            raise ParameterError(f"no admissible n in [{n}, {max_n}] (sizes are powers m^{L})")
        if N >= n and (eps * N).denominator == 1 and all(_is_int_power(N, e) for e in exps):
            nd = Threshold(Fraction(1), N, Fraction(d)).ceil()
            if (eps * nd).denominator == 1:
                return N
        m += 1


def gen_ordered_star_counterexample(t: int, c, eps, n: int, seed: int, integral: bool = True,
                                    max_n: int = 4096, budget: int = 200_000) -> Generated:
    """Blockade (B_1, ..., B_{t+1}) with no ordered transversal S_t^+ centred in B_{t+1}.

    An auxiliary set B_0 carries the structure: every vertex of B_{t+1}
    picks t-1 neighbours in B_0, every vertex of B_0 picks n^(1-d)
    neighbours in each B_i, and B_1..B_t are pairwise joined by sparse
    random bipartite graphs.  Any two vertices in distinct blocks with a
    common B_0-neighbour are then joined and B_0 is removed.  The leaves of a
    star centred in B_{t+1} come through at most t-1 vertices of B_0, so two
    of them are adjacent.

    With ``integral`` the size is raised to the least power making every
    exponent integral (ParameterError past ``max_n``); otherwise sizes are
    rounded up and the audit says so.
    """
    if t < 3:
        raise ParameterError("t must be at least 3")
    c, eps = Fraction(c), Fraction(eps)
    if not Fraction(1, t) < c <= 1:
        raise ParameterError("c must lie in (1/t, 1]")
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")
    if n < 2:
        raise ParameterError("n must be at least 2")
    d = ordered_star_exponent(t, c)
    flags = []
    if integral:
        n = integral_size(t, c, d, eps, n, max_n)
    else:
        flags.append("sizes rounded up: n^(2/t), n^(1-d), n^c need not be integers")
    m0 = iroot_ceil(n, Fraction(2, t))
    picks = iroot_ceil(n, 1 - d)
    nc = iroot_ceil(n, c)
    p3 = min(Fraction(1), Fraction(2) / (eps * eps * nc))
    rng = SplitMix64(seed)
    r1, r2, r3 = rng.spawn(), rng.spawn(), rng.spawn()

    # output vertices: block i (0-based, i = 0..t) is i*n .. (i+1)*n-1; B_0 is separate
    top = t * n
    up = [0] * n                   # B_{t+1} vertex -> mask over B_0
    for v in range(n):
        for _ in range(t - 1):
            up[v] |= 1 << r1.randbelow(m0)
    down = [[0] * t for _ in range(m0)]   # B_0 vertex -> per block mask over block vertices
    for w in range(m0):
        for i in range(t):
            for _ in range(picks):
                down[w][i] |= 1 << r2.randbelow(n)
    edges = set()
    for i in range(t):
        for j in range(i + 1, t):
            rows = _bipartite_sample(r3, n, n, p3)
            for a, r in enumerate(rows):
                for bb in iter_bits(r):
                    edges.add((i * n + a, j * n + bb))

    # common-neighbour closure through B_0, with one witness per added edge
    nbrs0: list[list[int]] = [[] for _ in range((t + 1) * n)]
    for w in range(m0):
        for i in range(t):
            for a in iter_bits(down[w][i]):
                nbrs0[i * n + a].append(w)
    for v in range(n):
        for w in iter_bits(up[v]):
            nbrs0[top + v].append(w)
    members: list[list[int]] = [[] for _ in range(m0)]
    for x, ws in enumerate(nbrs0):
        for w in sorted(set(ws)):
            members[w].append(x)
    witness: dict[tuple[int, int], int] = {}
    for w in range(m0):
        ms = members[w]
        for a_i, x in enumerate(ms):
            for y in ms[a_i + 1:]:
                if x // n != y // n:
                    e = (x, y)
                    edges.add(e)
                    witness.setdefault(e, w)
    N = (t + 1) * n
    g = Graph.from_edges(N, sorted(edges))
    b = Blockade(g, [list(range(i * n, (i + 1) * n)) for i in range(t + 1)])

    # re-verify: every edge at B_{t+1} has a recorded common B_0 neighbour
    bad = []
    for u in range(top, N):
        for x in iter_bits(g.rows[u]):
            e = (min(u, x), max(u, x))
            w = witness.get(e)
            i = x // n
            if w is None or not (up[u - top] >> w & 1) or not (down[w][i] >> (x - i * n) & 1):
                bad.append(list(e))
    cap_ok = all(m.bit_count() <= t - 1 for m in up)
    x = ceil_frac(eps * n)
    y = Threshold(eps, n, c).ceil()
    coh = check_cohesion(b, max(1, x), max(1, y), budget)
    ld = local_degree(b)
    audit = {
        "construction": "ordered-star", "seed": seed, "t": t, "c": fmt_rational(c), "d": fmt_rational(d),
        "eps": fmt_rational(eps), "n": n, "integral": integral, "B0_size": m0, "picks_per_block": picks,
        "p_sparse": fmt_rational(p3),
        "degree_cap_B_top": {"status": VERIFIED if cap_ok else VIOLATED, "cap": t - 1},
        "closure_log": {
            "status": VERIFIED if not bad else VIOLATED,
            "edges_at_top": sum(g.rows[u].bit_count() for u in range(top, N)),
            "unwitnessed": bad,
            "witnesses": [[u, v, w] for (u, v), w in sorted(witness.items()) if v >= top],
        },
        "local_degree": {"value": ld, "below_eps_W": Fraction(ld) < eps * n},
        "cohesion": {"x": x, "y": y, "report": coh.to_dict(),
                     "status": VIOLATED if coh.satisfied is False else (VERIFIED if coh.mode == EXACT else SAMPLED)},
        "claim": f"no ordered transversal S_{t}^+ with centre in block {t}",
        "claim_status": UNCHECKED,
        "flags": flags,
    }
    return Generated(b, audit)


# -- serializable generator specs ------------------------------------------------

_SCHEMA = {
    "random-bipartite": {"n": int, "eps": Fraction, "max_attempts": int},
    "regular": {"k": int, "W": int, "d": int},
    "star-free": {"k": int, "W": int, "eps": Fraction, "p": int, "max_attempts": int},
    "double-broom": {"k": int, "W": int, "eps": Fraction, "max_attempts": int},
    "ordered-star": {"t": int, "c": Fraction, "eps": Fraction, "n": int, "integral": bool, "max_n": int},
}

_FUNCS = {
    "random-bipartite": gen_sparse_cohesive_bipartite,
    "regular": gen_regular_blockade,
    "star-free": gen_star_free_blockade,
    "double-broom": gen_double_broom_counterexample,
    "ordered-star": gen_ordered_star_counterexample,
}

KINDS = tuple(_SCHEMA)


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {s!r}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return fmt_rational(v)
    return str(v)


@dataclass
class GenSpec:
    kind: str
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _SCHEMA:
            raise ParameterError(f"unknown construction {self.kind!r}")
        schema = _SCHEMA[self.kind]
        clean = {}
        for key, val in self.params.items():
            if key not in schema:
                raise ParameterError(f"{self.kind} takes no parameter {key!r}")
            typ = schema[key]
            if isinstance(val, str):
                try:
                    if typ is Fraction:
                        val = parse_rational(val)
                    elif typ is bool:
                        val = _parse_bool(val)
                    else:
                        val = int(val)
                except ValueError as exc:
                    raise ParameterError(f"{key}: {exc}") from None
            elif typ is Fraction:
                val = Fraction(val)
            clean[key] = val
        self.params = clean
        self.seed = int(self.seed)

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        sec = {"kind": self.kind, "seed": str(self.seed)}
        for key in sorted(self.params):
            sec[key] = _fmt(self.params[key])
        cp["generator"] = sec
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "GenSpec":
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            cp.read_string(text)
            sec = dict(cp["generator"])
        except (configparser.Error, KeyError) as exc:
            raise ParameterError(f"bad generator config: {exc}") from None
        kind = sec.pop("kind", None)
        seed = sec.pop("seed", None)
        if kind is None or seed is None:
            raise ParameterError("generator config needs kind and seed")
        return cls(kind, int(seed), sec)

    def run(self) -> Generated:
        out = _FUNCS[self.kind](seed=self.seed, **self.params)
        out.spec = self
        out.audit["spec"] = {k: _fmt(v) for k, v in sorted(self.params.items())}
        return out


def generate(spec: GenSpec) -> Generated:
    return spec.run()
