"""Homogeneous linear IFS on [0, 1]: configuration, cylinders and word arithmetic.

All geometry is exact (``fractions.Fraction``). Only the similarity dimension
gamma is irrational; it is carried as a float (53 bits) and, on request, as an
mpmath value at ``GAMMA_PREC`` bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import mpmath

from .errors import BadRatio, EmptyWord, NotSorted, SeparationViolated, SymbolOutOfRange

GAMMA_PREC = 113  # bits used for the high-precision gamma

Word = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and decimal or ``p/q`` strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact input; pass a string")
    return Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)


@dataclass(frozen=True, order=True)
class Interval:
    """Closed interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def meets(self, other: "Interval") -> bool:
        # closed convention: a shared endpoint counts as intersection
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def scaled(self, factor) -> "Interval":
        """Same center, radius multiplied by ``factor``."""
        r = self.width / 2 * factor
        return Interval(self.center - r, self.center + r)

    def to_json(self) -> list[str]:
        return [str(self.lo), str(self.hi)]


UNIT = Interval(Fraction(0), Fraction(1))


def ball(center, radius) -> Interval:
    center, radius = as_fraction(center), as_fraction(radius)
    return Interval(center - radius, center + radius)


@dataclass(frozen=True)
class IFSConfig:
    """The system {x -> rho*x + a_j}. Build through :func:`validate_config`."""

    rho: Fraction
    L: int
    translations: tuple[Fraction, ...]
    gamma: float = field(compare=False)

    @cached_property
    def gamma_mp(self) -> mpmath.mpf:
        with mpmath.workprec(GAMMA_PREC):
            return mpmath.log(self.L) / -mpmath.log(mpmath.mpf(self.rho.numerator) / self.rho.denominator)

    @cached_property
    def first_level(self) -> tuple[Interval, ...]:
        return tuple(Interval(a, a + self.rho) for a in self.translations)

    @property
    def c1(self) -> Fraction:
        """Lower Ahlfors constant valid for centres in K and r <= 1."""
        return Fraction(1, self.L)

    @property
    def c2(self) -> Fraction:
        """Upper Ahlfors constant."""
        return 2 / self.rho + 1

    @property
    def clamp_level(self) -> Fraction:
        return (1 - self.rho) / 4

    def to_json(self) -> dict:
        return {"rho": str(self.rho), "L": self.L, "translations": [str(a) for a in self.translations]}

    def __repr__(self) -> str:
        tr = ", ".join(str(a) for a in self.translations)
        return f"IFSConfig(rho={self.rho}, L={self.L}, translations=({tr}))"


def validate_config(rho, L: int, translations: Sequence) -> IFSConfig:
    rho = as_fraction(rho)
    a = tuple(as_fraction(t) for t in translations)
    if not 0 < rho < 1:
        raise BadRatio(f"rho={rho} not in (0, 1)")
    if L < 2 or len(a) != L:
        raise ValueError(f"need L >= 2 translations, got L={L} and {len(a)} values")
    if any(a[j + 1] <= a[j] for j in range(L - 1)):
        raise NotSorted(f"translations must be strictly increasing: {[str(t) for t in a]}")
    if a[0] < 0 or a[-1] > 1 - rho:
        raise SeparationViolated("first-level intervals leave [0, 1]")
    for j in range(L - 1):
        if a[j + 1] - a[j] <= rho:
            raise SeparationViolated(f"first-level intervals {j + 1} and {j + 2} intersect or touch")
    # implied by the checks above, kept as a guard
    if rho * L >= 1:
        raise BadRatio(f"rho={rho} not below 1/L")
    gamma = float(mpmath.log(L) / -mpmath.log(mpmath.mpf(rho.numerator) / rho.denominator))
    return IFSConfig(rho=rho, L=L, translations=a, gamma=gamma)


def gamma_dim(config: IFSConfig) -> float:
    """log L / -log rho, correctly rounded to double precision."""
    return float(config.gamma_mp)


def config_from_json(doc: dict | str) -> IFSConfig:
    if isinstance(doc, str):
        doc = json.loads(doc)
    return validate_config(doc["rho"], int(doc["L"]), doc["translations"])


def load_config(path: str | Path) -> IFSConfig:
    return config_from_json(Path(path).read_text())


MIDDLE_THIRD = validate_config(Fraction(1, 3), 2, (0, Fraction(2, 3)))
THREE_FIFTHS = validate_config(Fraction(1, 5), 3, (0, Fraction(2, 5), Fraction(4, 5)))


def check_word(config: IFSConfig, word: Iterable[int]) -> Word:
    w = tuple(int(s) for s in word)
    for s in w:
        if not 1 <= s <= config.L:
            raise SymbolOutOfRange(f"symbol {s} outside 1..{config.L}")
    return w


def word_value(config: IFSConfig, word: Iterable[int]) -> Fraction:
    """[w] = sum_i a_{w_i} rho^(i-1); the left end of the cylinder I(w)."""
    w = check_word(config, word)
    total, scale = Fraction(0), Fraction(1)
    for s in w:
        total += config.translations[s - 1] * scale
        scale *= config.rho
    return total


def cylinder_interval(config: IFSConfig, word: Iterable[int]) -> Interval:
    w = check_word(config, word)
    left = word_value(config, w)
    return Interval(left, left + config.rho ** len(w))


def periodic_point(config: IFSConfig, word: Iterable[int]) -> Fraction:
    """The fixed point pi(w^inf) = [w] / (1 - rho^n)."""
    w = check_word(config, word)
    if not w:
        raise EmptyWord("periodic point of the empty word")
    return word_value(config, w) / (1 - config.rho ** len(w))


def all_words(config: IFSConfig, n: int):
    """Lexicographic iterator over the L^n words of length n."""
    from itertools import product

    return product(range(1, config.L + 1), repeat=n)
