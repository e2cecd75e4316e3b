"""Codings of points of K, the coding map pi, the induced shift T and return distances."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

from .errors import DepthExhausted, EmptyPeriod, GapPoint
from .ifs import IFSConfig, Interval, Word, as_fraction, check_word, cylinder_interval, word_value


@dataclass(frozen=True)
class CodedPoint:
    """A point of K given by an eventually periodic coding (``exact``) or a finite prefix.

    For exact points ``value`` is a Fraction; for truncated points it is the
    enclosing cylinder interval of width rho**depth.
    """

    kind: Literal["exact", "truncated"]
    preperiod: Word
    period: Word
    value: Fraction | Interval

    @property
    def depth(self) -> int | None:
        return len(self.preperiod) if self.kind == "truncated" else None

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def digits(self, n: int) -> Word:
        """First n symbols of the coding."""
        if self.kind == "truncated":
            if n > len(self.preperiod):
                raise DepthExhausted(f"only {len(self.preperiod)} digits known")
            return self.preperiod[:n]
        out = list(self.preperiod[:n])
        while len(out) < n:
            out.extend(self.period[: n - len(out)])
        return tuple(out)

    def to_json(self) -> dict:
        if self.kind == "exact":
            return {"preperiod": list(self.preperiod), "period": list(self.period)}
        return {"prefix": list(self.preperiod)}


def pi_eval(config: IFSConfig, preperiod: Iterable[int], period: Iterable[int]) -> CodedPoint:
    u = check_word(config, preperiod)
    v = check_word(config, period)
    if not v:
        raise EmptyPeriod("exact points need a nonempty period")
    fixed = word_value(config, v) / (1 - config.rho ** len(v))
    x = word_value(config, u) + config.rho ** len(u) * fixed
    return CodedPoint("exact", u, v, x)


def truncated_point(config: IFSConfig, prefix: Iterable[int]) -> CodedPoint:
    w = check_word(config, prefix)
    return CodedPoint("truncated", w, (), cylinder_interval(config, w))


def coding_from_json(config: IFSConfig, doc: dict) -> CodedPoint:
    if "prefix" in doc:
        return truncated_point(config, doc["prefix"])
    return pi_eval(config, doc.get("preperiod", []), doc["period"])


def encode_point(config: IFSConfig, x, depth: int) -> Word:
    """The word w of length ``depth`` with x in I(w).

    Under strong separation the first-level intervals are disjoint closed
    intervals, so each level has at most one candidate and no tie-breaking is
    ever needed. Raises GapPoint when x is not in K.
    """
    x = as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} outside [0, 1]")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rho, out = config.rho, []
    for level in range(1, depth + 1):
        for j, a in enumerate(config.translations, start=1):
            if a <= x <= a + rho:
                out.append(j)
                x = (x - a) / rho
                break
        else:
            raise GapPoint(level, x)
    return tuple(out)


def apply_shift(config: IFSConfig, p: CodedPoint, n: int) -> CodedPoint:
    """T^n p, i.e. the coding shifted left by n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if p.kind == "truncated":
        if n >= len(p.preperiod):
            raise DepthExhausted(f"shift by {n} needs more than {len(p.preperiod)} digits")
        return truncated_point(config, p.preperiod[n:])
    u, v = p.preperiod, p.period
    if n <= len(u):
        return pi_eval(config, u[n:], v)
    k = (n - len(u)) % len(v)
    return pi_eval(config, (), v[k:] + v[:k])


@dataclass(frozen=True)
class DistanceEstimate:
    """|T^n x - x| known to lie in [value - error, value + error]."""

    value: Fraction
    error: Fraction

    @property
    def lo(self) -> Fraction:
        return self.value - self.error

    @property
    def hi(self) -> Fraction:
        return self.value + self.error

    @property
    def exact(self) -> bool:
        return self.error == 0

    def below(self, threshold) -> bool | None:
        """Three-valued test of distance < threshold (None when undecided)."""
        if self.hi < threshold:
            return True
        if self.lo >= threshold:
            return False
        return None


def _abs_enclosure(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return Fraction(0), max(-lo, hi)


def recurrence_distance(config: IFSConfig, p: CodedPoint, n: int) -> DistanceEstimate:
    if n < 1:
        raise ValueError("n must be >= 1")
    q = apply_shift(config, p, n)
    if p.kind == "exact":
        return DistanceEstimate(abs(q.value - p.value), Fraction(0))
    x, y = p.value, q.value
    lo, hi = _abs_enclosure(y.lo - x.hi, y.hi - x.lo)
    return DistanceEstimate((lo + hi) / 2, (hi - lo) / 2)


def nearest_integer_distance(y: Fraction) -> Fraction:
    """||y||: distance from y to the nearest integer."""
    f = y - (y.numerator // y.denominator)
    return min(f, 1 - f)
