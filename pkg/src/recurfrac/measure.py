"""The natural self-similar measure mu of intervals and balls, with certified error.

mu(I) is computed from the self-similarity mu = (1/L) sum_j phi_j mu. For a
closed interval [lo, hi] at most two branches per level are cut partially
(the ones holding lo and hi); every other branch is either fully covered or
missed. We therefore evaluate mu([lo, hi]) = F(hi) - F(lo) with
F(x) = mu([0, x]) (mu has no atoms), following one branch per endpoint.

The endpoint orbit x -> (x - a_j) / rho of a rational is eventually periodic
or falls into a gap. A repeated state is solved exactly; a branch still open
after ``max_depth`` levels contributes its weight to the error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import BadRange, NonpositiveRadius
from .ifs import IFSConfig, Interval, as_fraction

DEFAULT_DEPTH = 40


@dataclass(frozen=True)
class MeasureEstimate:
    """A mu-value with |value - true| <= error."""

    value: Fraction
    error: Fraction = Fraction(0)

    @property
    def exact(self) -> bool:
        return self.error == 0

    @property
    def lo(self) -> Fraction:
        return self.value - self.error

    @property
    def hi(self) -> Fraction:
        return self.value + self.error

    def __add__(self, other: "MeasureEstimate") -> "MeasureEstimate":
        return MeasureEstimate(self.value + other.value, self.error + other.error)

    def __sub__(self, other: "MeasureEstimate") -> "MeasureEstimate":
        return MeasureEstimate(self.value - other.value, self.error + other.error)

    def to_json(self) -> dict:
        return {"value": str(self.value), "error": str(self.error), "exact": self.exact,
                "approx": float(self.value)}


ZERO = MeasureEstimate(Fraction(0))
ONE = MeasureEstimate(Fraction(1))


def cdf(config: IFSConfig, x, max_depth: int = DEFAULT_DEPTH, detect_cycles: bool = True) -> MeasureEstimate:
    """F(x) = mu([0, x])."""
    x = as_fraction(x)
    L = config.L
    u, v, den, nums = _integer_form(config)
    # x = p/q; after k steps F(x0) = (s + F(x)) / L**k with integer s
    p, q = x.numerator, x.denominator
    s, k = 0, 0
    seen: dict[tuple[int, int], tuple[int, int]] = {}
    while True:
        if p <= 0:
            # mu({0}) = 0 even when 0 is in K
            return MeasureEstimate(Fraction(s, L ** k))
        if p >= q:
            return MeasureEstimate(Fraction(s + 1, L ** k))
        if detect_cycles:
            key = (p, q)
            if key in seen:
                # s0 + F/1 over L**k0 equals s + F over L**k: solve for F at the repeated state
                s0, k0 = seen[key]
                d = k - k0
                fx = Fraction(s - s0 * L ** d, L ** d - 1)
                return MeasureEstimate((s0 + fx) / L ** k0)
            seen[key] = (s, k)
        if k >= max_depth:
            break
        pd = p * den
        for j, a in enumerate(nums):
            if pd < a * q:
                # in the gap before piece j
                return MeasureEstimate(Fraction(s * L + j, L ** (k + 1)))
            # x <= a + rho  <=>  p*den*v <= (a*v + u*den) * q
            if pd * v <= (a * v + u * den) * q:
                s = s * L + j
                k += 1
                p, q = (pd - a * q) * v, q * den * u
                g = math.gcd(p, q)
                p, q = p // g, q // g
                break
        else:
            return MeasureEstimate(Fraction(s + 1, L ** k))
    # unresolved: true value in [s, s + 1] / L**k
    w = Fraction(1, L ** k)
    return MeasureEstimate(s * w + w / 2, w / 2)


@functools.lru_cache(maxsize=64)
def _integer_form(config: IFSConfig) -> tuple[int, int, int, tuple[int, ...]]:
    """rho = u/v and a_j = nums[j]/den over a common denominator."""
    den = math.lcm(*(a.denominator for a in config.translations))
    nums = tuple(int(a * den) for a in config.translations)
    return config.rho.numerator, config.rho.denominator, den, nums


def mu_interval(config: IFSConfig, iv: Interval, max_depth: int = DEFAULT_DEPTH,
                detect_cycles: bool = True) -> MeasureEstimate:
    """mu of a closed interval, clipped to [0, 1]. Error <= 2 * L**-max_depth."""
    lo, hi = max(iv.lo, Fraction(0)), min(iv.hi, Fraction(1))
    if lo >= hi:
        return ZERO
    if lo == 0 and hi == 1:
        return ONE
    return cdf(config, hi, max_depth, detect_cycles) - cdf(config, lo, max_depth, detect_cycles)


def mu_ball(config: IFSConfig, center, radius, max_depth: int = DEFAULT_DEPTH) -> MeasureEstimate:
    center, radius = as_fraction(center), as_fraction(radius)
    if radius <= 0:
        raise NonpositiveRadius(f"radius {radius} must be positive")
    return mu_interval(config, Interval(center - radius, center + radius), max_depth)


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    """Sorted disjoint components of a union of closed intervals."""
    items = sorted(intervals)
    out: list[Interval] = []
    for iv in items:
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return out


def mu_intervals(config: IFSConfig, intervals: Iterable[Interval], max_depth: int = DEFAULT_DEPTH) -> MeasureEstimate:
    """mu of a finite union; components are merged first, then measured."""
    total = ZERO
    for comp in merge_intervals(intervals):
        total = total + mu_interval(config, comp, max_depth)
    return total


# -- Ahlfors regularity scan ---------------------------------------------------


@dataclass
class AhlforsReport:
    samples: int
    min_ratio: float
    max_ratio: float
    bound_lo: float
    bound_hi: float
    seed: int
    r_min: float
    r_max: float
    rows: list[tuple[str, str, str, float]]  # (x, r, mu, ratio)

    @property
    def ok(self) -> bool:
        return self.samples == 0 or (self.bound_lo - 1e-9 <= self.min_ratio and self.max_ratio <= self.bound_hi + 1e-9)

    def to_json(self) -> str:
        doc = asdict(self)
        doc.pop("rows")
        doc["ok"] = self.ok
        return json.dumps(doc, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "r", "mu", "ratio"])
        for x, r, mu, ratio in self.rows:
            w.writerow([x, r, mu, repr(ratio)])
        return buf.getvalue()


def sample_k_point(config: IFSConfig, digits: Iterable[int]) -> Fraction:
    """pi(w 1 1 1 ...): an exact point of K with prefix w."""
    rho = config.rho
    x, scale = Fraction(0), Fraction(1)
    for s in digits:
        x += config.translations[int(s) - 1] * scale
        scale *= rho
    return x + scale * config.translations[0] / (1 - rho)


def ahlfors_scan(config: IFSConfig, n_samples: int, r_min: float, r_max: float, seed: int,
                 digits: int = 48, max_depth: int = DEFAULT_DEPTH) -> AhlforsReport:
    """Sample x ~ mu and log-uniform r, and record mu(B(x, r)) / r**gamma.

    Ratios are compared with the derived constants c1 = 1/L, c2 = 2/rho + 1,
    taking the certified measure error into account (lower ratio uses
    value - error, upper uses value + error).
    """
    if not 0 < r_min < r_max <= 0.25:
        raise BadRange(f"need 0 < r_min < r_max <= 1/4, got {r_min}, {r_max}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    gamma = config.gamma
    lo_ratio, hi_ratio = math.inf, -math.inf
    rows = []
    log_lo, log_hi = math.log(r_min), math.log(r_max)
    for _ in range(n_samples):
        word = rng.integers(1, config.L + 1, size=digits)
        x = sample_k_point(config, word)
        r = Fraction(math.exp(rng.uniform(log_lo, log_hi)))
        m = mu_ball(config, x, r, max_depth)
        rg = float(r) ** gamma
        lo_ratio = min(lo_ratio, float(m.lo) / rg)
        hi_ratio = max(hi_ratio, float(m.hi) / rg)
        rows.append((str(x), repr(float(r)), str(m.value), float(m.value) / rg))
    return AhlforsReport(n_samples, lo_ratio, hi_ratio, float(config.c1), float(config.c2), seed,
                         r_min, r_max, rows)
