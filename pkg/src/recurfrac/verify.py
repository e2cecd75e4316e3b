"""Invariant checks over a configuration, shared by the ``verify`` subcommand and the tests.

Each check returns a :class:`CheckResult`; ``run_all`` collects them into a report.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .asymptotics import Clamped, Constant, Geometric, Power, RateFunction
from .coding import apply_shift, encode_point, pi_eval
from .gexpr import GAMMA
from .ifs import IFSConfig, Interval, UNIT, all_words, cylinder_interval, word_value
from .measure import ahlfors_scan, mu_interval, mu_intervals
from .recurrence import (
    case_one_applies,
    enumerate_level,
    iter_windows,
    j_interval,
    max_descendant_hits,
    quasi_independence,
)


@dataclass
class CheckResult:
    name: str
    ok: bool
    cases: int
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "cases": self.cases, "failures": self.failures[:10]}


def _result(name: str, cases: int, failures: list) -> CheckResult:
    return CheckResult(name, not failures, cases, failures)


def codings(config: IFSConfig, max_len: int):
    """All (preperiod, period) with a nonempty period and total length <= max_len."""
    symbols = range(1, config.L + 1)
    for total in range(1, max_len + 1):
        for plen in range(1, total + 1):
            for u in itertools.product(symbols, repeat=total - plen):
                for v in itertools.product(symbols, repeat=plen):
                    yield u, v


def check_round_trips(config: IFSConfig, max_len: int = 6, contraction_n: int = 8) -> CheckResult:
    """pi/encode agree, T^|period| fixes pi(v^inf), and x = [w|n] + rho^n T^n x."""
    failures, cases = [], 0
    for u, v in codings(config, max_len):
        p = pi_eval(config, u, v)
        depth = len(u) + 2 * len(v) + 2
        cases += 1
        if encode_point(config, p.value, depth) != p.digits(depth):
            failures.append({"check": "encode", "u": u, "v": v})
        if not u and apply_shift(config, p, len(v)).value != p.value:
            failures.append({"check": "periodic", "v": v})
        for n in range(1, contraction_n + 1):
            w = p.digits(n)
            if p.value != word_value(config, w) + config.rho ** n * apply_shift(config, p, n).value:
                failures.append({"check": "contraction", "u": u, "v": v, "n": n})
    return _result("round_trips", cases, failures)


def j_window_rate(config: IFSConfig) -> Fraction:
    return min(Fraction(1, 10), config.clamp_level)


def check_j_window_law(config: IFSConfig, max_n: int = 10, phi_n: Fraction | None = None) -> CheckResult:
    """rho^n phi <= |J| <= rho^(n-1) phi, exhaustively over all words of length <= max_n."""
    phi_n = j_window_rate(config) if phi_n is None else phi_n
    failures, cases = [], 0
    for n in range(1, max_n + 1):
        lo, hi = config.rho ** n * phi_n, config.rho ** (n - 1) * phi_n
        for jd in iter_windows(config, n, phi_n):
            cases += 1
            width = jd.interval.width
            if not (lo <= width <= hi) or jd.center not in cylinder_interval(config, jd.word):
                failures.append({"word": jd.word, "width": str(width)})
    return _result("j_window_law", cases, failures)


def brute_force_measure(config: IFSConfig, iv: Interval, level: int) -> tuple[Fraction, Fraction]:
    """Bounds on mu(iv) by counting level-``level`` cylinders inside / meeting it."""
    lo = hi = Fraction(0)
    stack = [(Fraction(0), 0)]
    while stack:
        left, k = stack.pop()
        cyl = Interval(left, left + config.rho ** k)
        if not cyl.meets(iv):
            continue
        mass = Fraction(1, config.L ** k)
        if iv.contains_interval(cyl):
            lo += mass
            hi += mass
        elif k == level:
            hi += mass
        else:
            step = config.rho ** k
            stack.extend((left + a * step, k + 1) for a in config.translations)
    return lo, hi


def random_rational_interval(rng: random.Random, denom: int = 10 ** 6) -> Interval:
    a, b = sorted(Fraction(rng.randrange(denom + 1), denom) for _ in range(2))
    return Interval(a, b)


def check_measure_oracle(config: IFSConfig, count: int = 500, depth: int = 14, level: int = 12,
                         seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    failures = []
    for _ in range(count):
        iv = random_rational_interval(rng)
        m = mu_interval(config, iv, depth)
        lo, hi = brute_force_measure(config, iv, level)
        # the two certified ranges must overlap
        if m.hi < lo or m.lo > hi:
            failures.append({"interval": iv.to_json(), "mu": str(m.value), "brute": [str(lo), str(hi)]})
    return _result("measure_oracle", count, failures)


def check_ahlfors(config: IFSConfig, samples: int = 500, seed: int = 0) -> CheckResult:
    rep = ahlfors_scan(config, samples, 1e-6, 0.25, seed)
    failures = [] if rep.ok else [{"min_ratio": rep.min_ratio, "max_ratio": rep.max_ratio}]
    return _result("ahlfors", samples, failures)


def check_level_lower_bound(config: IFSConfig, phi: RateFunction | None = None, max_n: int = 10) -> CheckResult:
    """mu(A_n([0,1])) >= phi(n)^gamma / L."""
    phi = phi or Clamped(Power(1, GAMMA))
    failures = []
    for n in range(1, max_n + 1):
        phi_n = phi.exact(config, n)
        m = mu_intervals(config, enumerate_level(config, n, phi_n).intervals)
        bound = float(phi_n) ** config.gamma / config.L
        if float(m.hi) < bound * (1 - 1e-12):
            failures.append({"n": n, "mu": float(m.value), "bound": bound})
    return _result("level_lower_bound", max_n, failures)


def check_count_bound(config: IFSConfig, phi: RateFunction | None = None, max_m: int = 8) -> CheckResult:
    """N(m, B) <= (2/rho + 1) mu(2B) L^m whenever rho^m < radius(B)."""
    phi = phi or Clamped(Power(1, GAMMA))
    balls = [UNIT] + [cylinder_interval(config, w) for w in ((1,), (config.L, 1), (1, config.L, 1))]
    failures, cases = [], 0
    for B in balls:
        radius = B.width / 2
        double = Interval(B.center - 2 * radius, B.center + 2 * radius)
        mu2 = mu_interval(config, double)
        for m in range(1, max_m + 1):
            if config.rho ** m >= radius:
                continue
            cases += 1
            count = enumerate_level(config, m, phi.exact(config, m), B).count
            if count > config.c2 * mu2.hi * config.L ** m:
                failures.append({"ball": B.to_json(), "m": m, "count": count})
    return _result("count_bound", cases, failures)


def check_case_split(config: IFSConfig, phis: list[RateFunction] | None = None, max_n: int = 10) -> CheckResult:
    """In case (i) a level-m window meets at most 2 level-n windows below it."""
    if phis is None:
        phis = [Constant(j_window_rate(config)), Clamped(Power(1, GAMMA)), Geometric(1)]
    failures, cases = [], 0
    for phi in phis:
        for m in range(1, max_n):
            for n in range(m + 1, max_n + 1):
                if config.L ** n > 2 ** 16 or not case_one_applies(config, m, n, phi.exact(config, m)):
                    continue
                cases += 1
                hits = max_descendant_hits(config, m, n, phi.exact(config, m), phi.exact(config, n))
                if hits > 2:
                    failures.append({"phi": phi.to_json(), "m": m, "n": n, "hits": hits})
    return _result("case_split", cases, failures)


def check_paley_zygmund(config: IFSConfig, phi: RateFunction | None = None, N: int = 8) -> CheckResult:
    phi = phi or Clamped(Power(1, GAMMA))
    failures, cases = [], 0
    for B in (UNIT, cylinder_interval(config, (1,)), cylinder_interval(config, (config.L, 1))):
        cases += 1
        rep = quasi_independence(config, B, phi, N)
        if not rep.pz_consistent or not rep.ratio > 0:
            failures.append({"ball": B.to_json(), "pz_lower": rep.pz_lower, "union": float(rep.union.value)})
    return _result("paley_zygmund", cases, failures)


def check_j_examples(config: IFSConfig) -> CheckResult:
    """Every window is centred at the periodic point of its word."""
    failures, cases = [], 0
    for n in range(1, 5):
        for w in all_words(config, n):
            cases += 1
            jd = j_interval(config, w, j_window_rate(config))
            if jd.center * (1 - config.rho ** n) != word_value(config, w):
                failures.append({"word": w})
    return _result("j_centres", cases, failures)


QUICK: dict[str, Callable[[IFSConfig], CheckResult]] = {
    "round_trips": lambda c: check_round_trips(c, 4, 6),
    "j_window_law": lambda c: check_j_window_law(c, 8),
    "j_centres": check_j_examples,
    "measure_oracle": lambda c: check_measure_oracle(c, 100, 14, 10),
    "ahlfors": lambda c: check_ahlfors(c, 200),
    "level_lower_bound": lambda c: check_level_lower_bound(c, max_n=8),
    "count_bound": lambda c: check_count_bound(c, max_m=7),
    "case_split": lambda c: check_case_split(c, max_n=8),
    "paley_zygmund": lambda c: check_paley_zygmund(c, N=6),
}


def run_all(config: IFSConfig, checks: dict[str, Callable[[IFSConfig], CheckResult]] | None = None) -> dict:
    results = [fn(config) for fn in (checks or QUICK).values()]
    return {"ok": all(r.ok for r in results), "checks": [r.to_json() for r in results]}
