"""Recurrence windows J(w), level sets A_n(B), their exact measures, and quasi-independence.

For x in the cylinder I(w), |w| = n, we have x = [w] + rho**n T^n x, so the
condition |T^n x - x| < phi(n) cuts out the window

    J(w) = I(w) ∩ [c - h, c + h],  c = [w]/(1 - rho**n),  h = rho**n phi(n)/(1 - rho**n).

Windows are closed here; the boundary is finite per level and mu-null.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .asymptotics import RateFunction
from .errors import EmptyBall, EmptyWord, LevelTooLarge, NonpositiveRate
from .ifs import IFSConfig, Interval, Word, as_fraction, check_word, word_value
from .measure import DEFAULT_DEPTH, ZERO, MeasureEstimate, merge_intervals, mu_interval, mu_intervals

DEFAULT_CAP = 2 ** 20


@dataclass(frozen=True)
class JDescriptor:
    word: Word
    center: Fraction
    half_width: Fraction
    interval: Interval


def _window(config: IFSConfig, left: Fraction, n: int, phi_n: Fraction) -> tuple[Fraction, Fraction, Interval]:
    rn = config.rho ** n
    center = left / (1 - rn)
    half = rn * phi_n / (1 - rn)
    return center, half, Interval(max(left, center - half), min(left + rn, center + half))


def j_interval(config: IFSConfig, word: Iterable[int], phi_n) -> JDescriptor:
    w = check_word(config, word)
    if not w:
        raise EmptyWord("J is defined for nonempty words")
    phi_n = as_fraction(phi_n)
    if phi_n <= 0:
        raise NonpositiveRate("phi(n) must be positive")
    c, h, iv = _window(config, word_value(config, w), len(w), phi_n)
    return JDescriptor(w, c, h, iv)


def iter_windows(config: IFSConfig, n: int, phi_n, region: Interval | None = None,
                 cap: int = DEFAULT_CAP) -> Iterator[JDescriptor]:
    """All level-n windows in left-to-right order, skipping cylinders that miss ``region``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if config.L ** n > cap:
        raise LevelTooLarge(f"L^n = {config.L ** n} exceeds the cap {cap}")
    phi_n = as_fraction(phi_n)
    if phi_n <= 0:
        raise NonpositiveRate("phi(n) must be positive")
    rho, L = config.rho, config.L
    steps = [[a * rho ** k for a in config.translations] for k in range(n)]
    widths = [rho ** (k + 1) for k in range(n)]
    stack: list[tuple[Fraction, tuple[int, ...]]] = [(Fraction(0), ())]
    while stack:
        left, word = stack.pop()
        k = len(word)
        if k == n:
            c, h, iv = _window(config, left, n, phi_n)
            yield JDescriptor(word, c, h, iv)
            continue
        w = widths[k]
        # push in reverse so the leftmost child pops first
        for j in range(L, 0, -1):
            child = left + steps[k][j - 1]
            if region is not None and (child > region.hi or child + w < region.lo):
                continue
            stack.append((child, word + (j,)))


@dataclass
class LevelSet:
    """A_n(region): sorted, pairwise disjoint windows clipped to the region."""

    n: int
    intervals: list[Interval]
    region: Interval | None = None
    count: int = 0  # number of words whose window meets the region

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "region": self.region.to_json() if self.region else None,
            "intervals": [iv.to_json() for iv in self.intervals],
        }


def enumerate_level(config: IFSConfig, n: int, phi_n, region: Interval | None = None,
                    cap: int = DEFAULT_CAP) -> LevelSet:
    out: list[Interval] = []
    for jd in iter_windows(config, n, phi_n, region, cap):
        iv = jd.interval if region is None else jd.interval.intersect(region)
        if iv is not None:
            out.append(iv)
    return LevelSet(n, out, region, len(out))


def mu_union(config: IFSConfig, sets: Sequence[LevelSet], max_depth: int = DEFAULT_DEPTH) -> MeasureEstimate:
    if not sets:
        raise ValueError("mu_union needs at least one level set")
    return mu_intervals(config, (iv for s in sets for iv in s.intervals), max_depth)


def intersect_lists(a: Sequence[Interval], b: Sequence[Interval]) -> list[Interval]:
    """Pairwise intersections of two sorted disjoint interval lists (two-pointer sweep)."""
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        lo = max(a[i].lo, b[j].lo)
        hi = min(a[i].hi, b[j].hi)
        if lo <= hi:
            out.append(Interval(lo, hi))
        if a[i].hi < b[j].hi:
            i += 1
        else:
            j += 1
    return out


def subtract_lists(a: Sequence[Interval], b: Sequence[Interval]) -> list[Interval]:
    """Closure of a minus b, both sorted and disjoint."""
    out = []
    j = 0
    for iv in a:
        lo = iv.lo
        while j < len(b) and b[j].hi < lo:
            j += 1
        k = j
        while k < len(b) and b[k].lo <= iv.hi:
            if b[k].lo > lo:
                out.append(Interval(lo, b[k].lo))
            lo = max(lo, b[k].hi)
            k += 1
        if lo < iv.hi:
            out.append(Interval(lo, iv.hi))
    return out


# -- per-level table ---------------------------------------------------------------------


@dataclass
class LevelRow:
    n: int
    count: int
    mu: MeasureEstimate
    cumulative: MeasureEstimate


def level_table(config: IFSConfig, phi: RateFunction, k: int, N: int, region: Interval | None = None,
                max_depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP) -> list[LevelRow]:
    """Rows (n, count, mu(A_n), mu(union_{k<=j<=n} A_j)) for n = k..N."""
    rows = []
    union: list[Interval] = []
    cumulative = ZERO
    for n in range(k, N + 1):
        level = enumerate_level(config, n, phi.exact(config, n), region, cap)
        mu_n = mu_intervals(config, level.intervals, max_depth)
        cumulative = cumulative + mu_intervals(config, subtract_lists(level.intervals, union), max_depth)
        union = merge_intervals(union + level.intervals)
        rows.append(LevelRow(n, level.count, mu_n, cumulative))
    return rows


def rows_to_csv(rows: Iterable[LevelRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "count", "mu_An", "mu_An_err", "cumulative", "cumulative_err"])
    for r in rows:
        w.writerow([r.n, r.count, repr(float(r.mu.value)), repr(float(r.mu.error)),
                    repr(float(r.cumulative.value)), repr(float(r.cumulative.error))])
    return buf.getvalue()


# -- quasi-independence -------------------------------------------------------------------


@dataclass
class QuasiIndepReport:
    N: int
    ball: Interval
    mu_ball: MeasureEstimate
    sum_single: MeasureEstimate
    sum_pairs: MeasureEstimate
    union: MeasureEstimate
    singles: list[MeasureEstimate] = field(repr=False)

    @property
    def ratio(self) -> float:
        """sum_pairs * mu(B) / sum_single**2; infinite while every A_n(B) is null."""
        if self.sum_single.value == 0:
            return math.inf
        return float(self.sum_pairs.value * self.mu_ball.value / self.sum_single.value ** 2)

    @property
    def pz_lower(self) -> float:
        """(sum mu(A_n))**2 / sum mu(A_m ∩ A_n): a lower bound for mu(union A_n)."""
        if self.sum_pairs.value == 0:
            return 0.0
        return float(self.sum_single.value ** 2 / self.sum_pairs.value)

    @property
    def pz_error(self) -> float:
        lo2 = self.sum_pairs.lo
        if self.sum_pairs.value == 0:
            return 0.0
        if lo2 <= 0:
            return math.inf
        return float(self.sum_single.hi ** 2 / lo2) - self.pz_lower

    @property
    def pz_consistent(self) -> bool:
        return self.pz_lower <= float(self.union.value) + float(self.union.error) + self.pz_error

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "ball": self.ball.to_json(),
            "mu_ball": self.mu_ball.to_json(),
            "sum_single": self.sum_single.to_json(),
            "sum_pairs": self.sum_pairs.to_json(),
            "union": self.union.to_json(),
            "ratio": self.ratio if math.isfinite(self.ratio) else None,
            "pz_lower": self.pz_lower,
            "pz_consistent": self.pz_consistent,
        }


def quasi_independence(config: IFSConfig, ball: Interval, phi: RateFunction, N: int,
                       max_depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP) -> QuasiIndepReport:
    mu_b = mu_interval(config, ball, max_depth)
    if mu_b.lo <= 0:
        raise EmptyBall(f"mu({ball.to_json()}) is not certified positive")
    levels = [enumerate_level(config, n, phi.exact(config, n), ball, cap) for n in range(1, N + 1)]
    singles = [mu_intervals(config, lv.intervals, max_depth) for lv in levels]
    sum_single = ZERO
    for s in singles:
        sum_single = sum_single + s
    cross = ZERO
    for i in range(N):
        for j in range(i + 1, N):
            cross = cross + mu_intervals(config, intersect_lists(levels[i].intervals, levels[j].intervals), max_depth)
    sum_pairs = sum_single + MeasureEstimate(2 * cross.value, 2 * cross.error)
    union = mu_union(config, levels, max_depth)
    return QuasiIndepReport(N, ball, mu_b, sum_single, sum_pairs, union, singles)


# -- proof-step diagnostics -----------------------------------------------------------------


def case_one_applies(config: IFSConfig, m: int, n: int, phi_m) -> bool:
    """rho**n >= 2 rho**m phi(m) / (1 - rho**m)."""
    rm = config.rho ** m
    return config.rho ** n >= 2 * rm * as_fraction(phi_m) / (1 - rm)


def max_descendant_hits(config: IFSConfig, m: int, n: int, phi_m, phi_n) -> int:
    """Largest number of level-n windows with prefix w that meet J(w), over all |w| = m."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    phi_m, phi_n = as_fraction(phi_m), as_fraction(phi_n)
    scale = config.rho ** m
    tails = [word_value(config, t.word) for t in iter_windows(config, n - m, Fraction(1))]
    best = 0
    for jm in iter_windows(config, m, phi_m):
        left = word_value(config, jm.word)
        hits = 0
        for tail in tails:
            child_left = left + scale * tail
            _, _, jn = _window(config, child_left, n, phi_n)
            if jn.meets(jm.interval):
                hits += 1
        best = max(best, hits)
    return best


def neighbourhood_count(config: IFSConfig, m: int, region: Interval) -> int:
    """Number of level-m cylinders meeting the region."""
    return sum(1 for _ in iter_windows(config, m, Fraction(1), region))
