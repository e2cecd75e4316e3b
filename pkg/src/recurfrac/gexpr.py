"""Laurent polynomials in gamma with rational coefficients.

Exponents such as ``gamma``, ``gamma/2`` or ``4/gamma`` appear in the rate
and dimension families. Keeping them symbolic lets the series classifiers
decide critical cases exactly: the sign of ``c0 + c1*gamma`` reduces to the
integer comparison L**q vs (1/rho)**p, since gamma > p/q iff L**q > rho**-p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import mpmath

from .errors import CriticalComparison

if TYPE_CHECKING:
    from .ifs import IFSConfig

_EXACT_LIMIT = 4096  # max numerator/denominator size for the integer power test
_NUM_PREC = 256
_NUM_MARGIN = mpmath.mpf(2) ** -200


@dataclass(frozen=True)
class GammaExpr:
    terms: tuple[tuple[int, Fraction], ...]  # sorted (power, coef), coef != 0

    @classmethod
    def of(cls, mapping: dict[int, Fraction]) -> "GammaExpr":
        return cls(tuple(sorted((k, Fraction(v)) for k, v in mapping.items() if v != 0)))

    @classmethod
    def const(cls, c) -> "GammaExpr":
        return cls.of({0: Fraction(c)})

    @classmethod
    def gamma(cls, coef=1, power: int = 1) -> "GammaExpr":
        return cls.of({power: Fraction(coef)})

    @classmethod
    def lift(cls, x) -> "GammaExpr":
        if isinstance(x, GammaExpr):
            return x
        if isinstance(x, str):
            return parse(x)
        return cls.const(Fraction(x))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def __add__(self, other) -> "GammaExpr":
        d = self.as_dict()
        for k, v in GammaExpr.lift(other).terms:
            d[k] = d.get(k, 0) + v
        return GammaExpr.of(d)

    __radd__ = __add__

    def __neg__(self) -> "GammaExpr":
        return GammaExpr(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other) -> "GammaExpr":
        return self + (-GammaExpr.lift(other))

    def __rsub__(self, other) -> "GammaExpr":
        return GammaExpr.lift(other) - self

    def __mul__(self, other) -> "GammaExpr":
        other = GammaExpr.lift(other)
        d: dict[int, Fraction] = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                d[k1 + k2] = d.get(k1 + k2, 0) + v1 * v2
        return GammaExpr.of(d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GammaExpr":
        other = GammaExpr.lift(other)
        if len(other.terms) != 1:
            raise ValueError("can only divide by a monomial")
        (k, v), = other.terms
        return GammaExpr(tuple((k1 - k, v1 / v) for k1, v1 in self.terms))

    def __rtruediv__(self, other) -> "GammaExpr":
        return GammaExpr.lift(other) / self

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_rational(self) -> bool:
        return all(k == 0 for k, _ in self.terms)

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} depends on gamma")
        return self.as_dict().get(0, Fraction(0))

    def mp(self, config: "IFSConfig | None" = None) -> mpmath.mpf:
        total = mpmath.mpf(0)
        for k, v in self.terms:
            term = mpmath.mpf(v.numerator) / v.denominator
            if k:
                if config is None:
                    raise ValueError(f"{self} needs a configuration to evaluate gamma")
                term *= config.gamma_mp ** k
            total += term
        return total

    def __float__(self) -> float:
        return float(self.mp())

    def value(self, config: "IFSConfig | None" = None) -> float:
        return float(self.mp(config))

    def sign(self, config: "IFSConfig") -> int:
        """Exact sign where the structure allows it, else 256-bit numerics.

        Raises CriticalComparison when the numeric value is within 2**-200 of 0.
        """
        d = self.as_dict()
        if not d:
            return 0
        powers = set(d)
        if powers <= {0, 1} or powers <= {0, -1}:
            if -1 in powers:  # multiply through by gamma > 0
                d = {k + 1: v for k, v in d.items()}
            c0, c1 = d.get(0, Fraction(0)), d.get(1, Fraction(0))
            if c1 == 0:
                return (c0 > 0) - (c0 < 0)
            s = compare_gamma(config, -c0 / c1)
            if s is not None:
                return s if c1 > 0 else -s
        if len(powers) == 1:
            (v,) = d.values()
            return (v > 0) - (v < 0)
        with mpmath.workprec(_NUM_PREC):
            g = mpmath.log(config.L) / -mpmath.log(mpmath.mpf(config.rho.numerator) / config.rho.denominator)
            val = sum(mpmath.mpf(v.numerator) / v.denominator * g ** k for k, v in d.items())
            if abs(val) < _NUM_MARGIN:
                raise CriticalComparison(f"sign of {self} undecidable at {_NUM_PREC} bits")
            return 1 if val > 0 else -1

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms:
            if k == 0:
                parts.append(str(v))
            elif k == 1:
                parts.append("gamma" if v == 1 else f"{v}*gamma")
            elif k == -1:
                parts.append(f"{v}/gamma")
            else:
                parts.append(f"{v}*gamma^{k}")
        return " + ".join(parts)

    def to_json(self) -> str:
        return str(self)


def compare_gamma(config: "IFSConfig", q: Fraction) -> int | None:
    """sign(gamma - q) by exact integer arithmetic, or None if q is too large to test."""
    if q <= 0:
        return 1
    p, r = q.numerator, q.denominator
    if p > _EXACT_LIMIT or r > _EXACT_LIMIT:
        return None
    # gamma > p/r  <=>  r log L > p log(1/rho)  <=>  L^r * u^p > v^p  with rho = u/v
    u, v = config.rho.numerator, config.rho.denominator
    lhs, rhs = config.L ** r * u ** p, v ** p
    return (lhs > rhs) - (lhs < rhs)


_TERM = re.compile(
    r"^(?:(?P<coef>\d+(?:/\d+)?(?:\.\d+)?)\*?)?(?:(?P<g>gamma)(?:\^(?P<pow>\d+))?)?(?:/(?P<div>gamma|\d+(?:\.\d+)?))?$"
)


def parse(text: str) -> GammaExpr:
    """Parse sums of terms like ``1/2``, ``gamma``, ``3*gamma``, ``gamma/2``, ``4/gamma``."""
    text = re.sub(r"\s+", "", str(text)).replace("γ", "gamma").replace("−", "-")
    if not text:
        raise ValueError("empty expression")
    total = GammaExpr.of({})
    for sign, piece in re.findall(r"([+-]?)([^+-]+)", text):
        m = _TERM.match(piece)
        if not m or not (m.group("coef") or m.group("g")):
            raise ValueError(f"cannot parse gamma expression {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        power = int(m.group("pow") or 1) if m.group("g") else 0
        div = m.group("div")
        if div == "gamma":
            power -= 1
        elif div:
            coef /= Fraction(div)
        total = total + GammaExpr.of({power: -coef if sign == "-" else coef})
    return total


GAMMA = GammaExpr.gamma()
