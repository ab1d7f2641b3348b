"""Exact threshold arithmetic.

Every quantitative comparison in the package goes through this module.  A
threshold has the shape ``coef * base ** exp`` with ``coef`` and ``exp``
rational and ``base`` a nonnegative integer (usually the width ``W`` of a
blockade).  Counts are integers, so ``t >= value`` is decided by raising both
sides to the denominator of ``exp`` and comparing integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Union

Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.  Decimals are rejected on purpose."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL_RE.match(str(text))
    if not m:
        raise ValueError(f"not a rational of the form p/q: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def fmt_rational(q: Number) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def ceil_frac(q: Number) -> int:
    q = Fraction(q)
    return -((-q.numerator) // q.denominator)


def floor_frac(q: Number) -> int:
    q = Fraction(q)
    return q.numerator // q.denominator


def lcm_denominators(*qs: Number) -> int:
    out = 1
    for q in qs:
        out = lcm(out, Fraction(q).denominator)
    return out


@dataclass(frozen=True)
class Threshold:
    """The real number ``coef * base ** exp``, compared exactly against counts."""

    coef: Fraction
    base: int = 1
    exp: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        object.__setattr__(self, "exp", Fraction(self.exp))
        if self.coef < 0:
            raise ValueError("negative threshold coefficient")
        if self.base < 0:
            raise ValueError("negative base")
        if self.base == 0 and self.exp <= 0:
            raise ValueError("0 ** nonpositive exponent")

    # value <= t  iff  (t / coef) ** q >= base ** p   (q = denominator of exp)
    def _cmp(self, t: Number) -> int:
        """Sign of ``t - value``."""
        t = Fraction(t)
        if self.coef == 0 or self.base == 0:
            return (t > 0) - (t < 0)
        if t <= 0:
            return -1
        p, q = self.exp.numerator, self.exp.denominator
        lhs = (t / self.coef) ** q
        rhs = Fraction(self.base) ** p
        return (lhs > rhs) - (lhs < rhs)

    def le(self, t: Number) -> bool:
        """``value <= t``: a count t reaches the threshold."""
        return self._cmp(t) >= 0

    def lt(self, t: Number) -> bool:
        """``value < t``."""
        return self._cmp(t) > 0

    def exceeds(self, t: Number) -> bool:
        """``t < value``: a count t stays below the threshold."""
        return self._cmp(t) < 0

    def equals(self, t: Number) -> bool:
        return self._cmp(t) == 0

    def ceil(self) -> int:
        """Smallest integer ``m`` with ``m >= value``."""
        if self.le(0):
            return 0
        hi = 1
        while not self.le(hi):
            hi *= 2
        lo = hi // 2  # value > lo
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.le(mid):
                hi = mid
            else:
                lo = mid
        return hi

    def is_integral(self) -> bool:
        return self.equals(self.ceil())

    def scaled(self, factor: Number) -> "Threshold":
        return Threshold(self.coef * Fraction(factor), self.base, self.exp)

    def approx(self) -> float:
        if self.coef == 0 or self.base == 0:
            return 0.0
        return float(self.coef) * float(self.base) ** float(self.exp)

    def __str__(self) -> str:
        c = fmt_rational(self.coef)
        if self.exp == 0:
            return c
        e = fmt_rational(self.exp)
        return f"{c}*{self.base}^({e})"

    def to_dict(self) -> dict:
        return {
            "expr": str(self),
            "coef": fmt_rational(self.coef),
            "base": self.base,
            "exp": fmt_rational(self.exp),
            "ceil": self.ceil(),
            "integral": self.is_integral(),
        }


def frac_of(eps: Number, size: int) -> Threshold:
    """``eps * size`` as a threshold."""
    return Threshold(Fraction(eps) * size)


def power_of(coef: Number, base: int, exp: Number) -> Threshold:
    return Threshold(Fraction(coef), base, Fraction(exp))


def at_least(t: int, thr: Threshold) -> bool:
    return thr.le(t)


def fewer_than(t: int, thr: Threshold) -> bool:
    return thr.exceeds(t)


def iroot_ceil(n: int, exp: Number) -> int:
    """Ceiling of ``n ** exp`` for rational ``exp``."""
    return Threshold(Fraction(1), n, Fraction(exp)).ceil()
