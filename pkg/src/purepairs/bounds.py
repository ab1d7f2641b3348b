"""Theorem constants, per-step thresholds and the binomial estimate.

Every finder obtains its epsilon, exponent and thresholds from a
:class:`RegimeCard`, so the constants live in exactly one place.

Card ids:

========== ==========================================================
path       transversal path, eps <= 1/(2k-2) with eps-coherence
star       rainbow S_k among K = 2^(k-1)+1 blocks, eps <= 3^-K
covering   tau-covering digraph augmentation
broom      transversal B(k,t), tau = 1/6, eps = tau^((k+t)^2) 3^-k
cycle4     transversal C_4, eps = 1/4, exponent 1/3
cycle      transversal C_k (k >= 5), eps = 1/(3k), exponent 1/2
tree-count ordered transversal trees, eps = 4^(1-k), count floor
caterpillar ordered caterpillars, eps = 4^-d / k, exponent 1/d
pair-lemma low-degree counting for a pair of blocks (eps, c given)
========== ==========================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional

from .exact import Threshold, fmt_rational, frac_of, power_of
from .graphcore import Blockade
from . import metrics

# e lies in [E_LOWER, E_UPPER]: the series to 1/10! and a bound on its tail
E_LOWER = sum(Fraction(1, factorial(i)) for i in range(11))
E_UPPER = E_LOWER + Fraction(1, factorial(10) * 10)

THEOREMS = ("path", "star", "covering", "broom", "cycle4", "cycle", "tree-count", "caterpillar", "pair-lemma")


class UnknownTheorem(KeyError):
    pass


@dataclass(frozen=True)
class BinomBound:
    n: int
    k: int
    exact: int
    bound: Fraction
    holds: bool


def binom_upper(n: int, k: int) -> BinomBound:
    """C(n,k) against (e n / k)^k, with e replaced by a certified rational upper bound."""
    if k < 1 or n < k:
        raise ValueError(f"need n >= k >= 1, got n={n}, k={k}")
    exact = comb(n, k)
    bound = (E_UPPER * n / k) ** k
    return BinomBound(n, k, exact, bound, exact <= bound)


@dataclass
class RegimeCard:
    theorem: str
    eps: Fraction
    c: Optional[Fraction] = None
    params: dict = field(default_factory=dict)
    eps_max: Optional[Fraction] = None
    factored: str = ""
    tau: Optional[Fraction] = None

    @property
    def in_regime(self) -> bool:
        return self.eps_max is None or self.eps <= self.eps_max

    @property
    def premise(self) -> str:
        """``coherence`` or ``degree-cohesion`` (local degree + (eps W, eps W^c)-cohesion)."""
        return "degree-cohesion" if self.c is not None else "coherence"

    def width_floor(self) -> Optional[int]:
        """Least W with eps * W^c > 1 (needed for the cohesion premise to be satisfiable)."""
        if self.c is None or self.c <= 0:
            return None
        lo, hi = 0, 1
        while not power_of(self.eps, hi, self.c).exceeds(1):
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if power_of(self.eps, mid, self.c).exceeds(1):
                hi = mid
            else:
                lo = mid
        return hi

    # threshold helpers; finders call these instead of building constants themselves
    def frac(self, size: int, scale=1) -> Threshold:
        return frac_of(self.eps * Fraction(scale), size)

    def root(self, W: int, exp, coef=1) -> Threshold:
        return power_of(Fraction(coef), W, Fraction(exp))

    def eps_root(self, W: int) -> Threshold:
        """eps * W^c."""
        return power_of(self.eps, W, self.c)

    def half_co_root(self, W: int) -> Threshold:
        """W^(1-c) / 2."""
        return power_of(Fraction(1, 2), W, 1 - self.c)

    def thresholds(self, W: int) -> dict[str, Threshold]:
        out = {"degree": frac_of(self.eps, W)}
        if self.c is not None:
            out["eps_W_c"] = self.eps_root(W)
            out["half_W_1mc"] = self.half_co_root(W)
        if self.theorem == "tree-count":
            k = self.params["k"]
            out["count_floor"] = power_of(Fraction(1, 4 ** (k - 1)), W, k - (k - 1) * self.c)
        return out

    def to_dict(self, W: Optional[int] = None) -> dict:
        d = {
            "theorem": self.theorem,
            "eps": self.factored or fmt_rational(self.eps),
            "params": {k: (fmt_rational(v) if isinstance(v, Fraction) else v) for k, v in sorted(self.params.items())},
            "in_regime": self.in_regime,
        }
        if self.c is not None:
            d["c"] = fmt_rational(self.c)
            d["width_floor"] = self.width_floor()
        if self.tau is not None:
            d["tau"] = fmt_rational(self.tau)
        if self.eps_max is not None:
            d["eps_max"] = fmt_rational(self.eps_max)
        if W is not None:
            d["W"] = W
            d["thresholds"] = {k: v.to_dict() for k, v in self.thresholds(W).items()}
        return d


def _need(params, *names):
    for n in names:
        if params.get(n) is None:
            raise ValueError(f"parameter {n!r} is required")


def regime_card(theorem: str, k: int | None = None, t: int | None = None, d: int | None = None,
                c=None, eps=None, tau=None) -> RegimeCard:
    """Constants for ``theorem``; ``eps`` overrides the default (recorded as off-regime if larger)."""
    p = {"k": k, "t": t, "d": d}
    if theorem == "path":
        _need(p, "k")
        if k < 2:
            raise ValueError("path card needs k >= 2")
        emax = Fraction(1, 2 * k - 2)
        return RegimeCard("path", Fraction(eps) if eps is not None else emax, None, {"k": k}, emax)
    if theorem == "star":
        _need(p, "k")
        K = 2 ** (k - 1) + 1
        emax = Fraction(1, 3 ** K)
        return RegimeCard("star", Fraction(eps) if eps is not None else emax, None, {"k": k, "K": K}, emax,
                          f"3^-{K}" if eps is None else "")
    if theorem == "covering":
        tau = Fraction(tau) if tau is not None else Fraction(1, 6)
        if not 0 < tau < Fraction(1, 2):
            raise ValueError("tau must lie in (0, 1/2)")
        return RegimeCard("covering", Fraction(1) - 2 * tau, None, {}, None, "", tau)
    if theorem == "broom":
        _need(p, "k", "t")
        tau = Fraction(tau) if tau is not None else Fraction(1, 6)
        emax = tau ** ((k + t) ** 2) / 3 ** k
        fact = f"({fmt_rational(tau)})^{(k + t) ** 2} * 3^-{k}"
        return RegimeCard("broom", Fraction(eps) if eps is not None else emax, None,
                          {"k": k, "t": t}, emax, fact if eps is None else "", tau)
    if theorem == "cycle4":
        return RegimeCard("cycle4", Fraction(eps) if eps is not None else Fraction(1, 4),
                          Fraction(c) if c is not None else Fraction(1, 3), {"k": 4})
    if theorem == "cycle":
        _need(p, "k")
        if k < 5:
            raise ValueError("cycle card needs k >= 5")
        return RegimeCard("cycle", Fraction(eps) if eps is not None else Fraction(1, 3 * k),
                          Fraction(c) if c is not None else Fraction(1, 2), {"k": k})
    if theorem == "tree-count":
        _need(p, "k")
        if c is None:
            c = Fraction(1, k - 1) if k >= 2 else Fraction(1)
        c = Fraction(c)
        if c <= 0 or (k - 1) * c > 1:
            raise ValueError("tree-count needs c > 0 and (k-1)c <= 1")
        return RegimeCard("tree-count", Fraction(eps) if eps is not None else Fraction(1, 4 ** (k - 1)),
                          c, {"k": k})
    if theorem == "caterpillar":
        _need(p, "k", "d")
        return RegimeCard("caterpillar", Fraction(eps) if eps is not None else Fraction(1, 4 ** d * k),
                          Fraction(1, d) if c is None else Fraction(c), {"k": k, "d": d})
    if theorem == "pair-lemma":
        if eps is None or c is None:
            raise ValueError("pair-lemma needs eps and c")
        return RegimeCard("pair-lemma", Fraction(eps), Fraction(c), {}, Fraction(1, 2))
    raise UnknownTheorem(theorem)


@dataclass
class RegimeVerdict:
    satisfied: Optional[bool]
    mode: str
    card: str
    local_degree: int
    offending: Optional[dict] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "mode": self.mode,
            "card": self.card,
            "local_degree": self.local_degree,
            "offending": self.offending,
            "detail": self.detail,
        }


def check_regime(b: Blockade, card: RegimeCard, budget: int = metrics.DEFAULT_BUDGET) -> RegimeVerdict:
    lam = metrics.local_degree(b)
    if card.premise == "degree-cohesion":
        W = b.width
        off = metrics.degree_violation(b, lambda j: frac_of(card.eps, W))
        if off is not None:
            return RegimeVerdict(False, metrics.EXACT, card.theorem, lam, off)
        rep = metrics.check_degree_cohesion_premises(b, card.eps, card.c, budget)
        mode = metrics.EXACT if rep.satisfied is not None else metrics.HEURISTIC
        return RegimeVerdict(rep.satisfied, mode, card.theorem, lam, None, rep.to_dict())
    eps = card.eps
    if card.theorem == "covering":
        # the outdegree premise asks for (1-2 tau) tau^z coherence; z = 0 is the weakest form
        eps = (1 - 2 * card.tau)
    rep = metrics.check_coherence(b, eps, budget)
    return RegimeVerdict(rep.satisfied, rep.mode, card.theorem, lam, rep.degree_violation, rep.to_dict())
