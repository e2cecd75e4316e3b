"""Monte Carlo orbit experiments and the covering-exponent dimension estimate.

Sampling: x ~ mu is realised by i.i.d. uniform digits. Sample i draws its
digits from its own Philox stream, keyed by (seed, i), so results do not
depend on how samples are batched, and the first D digits are the same
whatever total depth is requested.

Distances: for a D-digit prefix, let y_k be the float value of digits k..D-1
(backward Horner, y_k = a[d_k] + rho * y_{k+1}). Then x lies in
[y_0, y_0 + rho**D] and T^n x in [y_n, y_n + rho**(D-n)], which encloses
T^n x - x. A fixed slack covers float rounding. Tests that the enclosure
cannot decide are redone exactly with 64 extra digits, and count as misses
if still open.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import __version__
from .asymptotics import PREC, RateFunction
from .coding import CodedPoint, recurrence_distance, truncated_point
from .errors import NoRoot, NonpositiveRate
from .ifs import IFSConfig

EXTRA_DIGITS = 64  # orbit depth beyond the horizon
ESCALATE_DIGITS = 64
FLOAT_SLACK = 2.0 ** -40
BISECT_TOL = 1e-6


# -- provenance and RNG -------------------------------------------------------------


def rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def rng_name() -> str:
    return f"numpy.random.Philox (numpy {np.__version__})"


def config_hash(config: IFSConfig) -> str:
    blob = json.dumps(config.to_json(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def provenance(config: IFSConfig, seed: int | None = None, **params) -> dict:
    doc = {"config_hash": config_hash(config), "version": __version__, "params": params}
    if seed is not None:
        doc["seed"] = seed
        doc["rng"] = rng_name()
    return doc


def dumps(doc) -> str:
    """Canonical JSON used for every artifact, so equal inputs give equal bytes."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class ExperimentConfig:
    ifs: IFSConfig
    seed: int
    N: int
    samples: int
    k: int = 1
    phi: str | None = None
    alpha: str | None = None
    depth: int | None = None
    escalate: int = ESCALATE_DIGITS

    def __post_init__(self):
        if self.N < 1 or self.samples < 1 or not 1 <= self.k <= self.N:
            raise ValueError("need N >= 1, samples >= 1 and 1 <= k <= N")
        if self.depth is not None and self.depth < self.N + 1:
            raise ValueError("orbit depth must exceed the horizon N")

    @property
    def orbit_depth(self) -> int:
        return self.depth if self.depth is not None else self.N + EXTRA_DIGITS


# -- sampling -----------------------------------------------------------------------


def sample_digits(config: IFSConfig, seed: int, depth: int, index: int = 0) -> np.ndarray:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return rng_for(seed, index).integers(1, config.L + 1, size=depth, dtype=np.int64)


def sample_point(config: IFSConfig, seed: int, depth: int, index: int = 0) -> CodedPoint:
    """A mu-random point, known through its first ``depth`` digits."""
    return truncated_point(config, (int(d) for d in sample_digits(config, seed, depth, index)))


def _digit_matrix(config: IFSConfig, seed: int, depth: int, samples: int) -> np.ndarray:
    return np.stack([sample_digits(config, seed, depth, i) for i in range(samples)])


def _suffix_values(config: IFSConfig, digits: np.ndarray) -> np.ndarray:
    """Y[:, k] = float value of digits k.. (Horner from the right); Y[:, D] = 0."""
    a = np.array([float(t) for t in config.translations])[digits - 1]
    rho = float(config.rho)
    S, D = digits.shape
    Y = np.zeros((S, D + 1))
    for k in range(D - 1, -1, -1):
        Y[:, k] = a[:, k] + rho * Y[:, k + 1]
    return Y


def distance_enclosures(config: IFSConfig, digits: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Certified [lo, hi] for |T^n x - x|, n = 1..N, as arrays of shape (samples, N)."""
    S, D = digits.shape
    if D <= N:
        raise ValueError("need more digits than the horizon")
    Y = _suffix_values(config, digits)
    rho = float(config.rho)
    n = np.arange(1, N + 1)
    diff = Y[:, 1:N + 1] - Y[:, [0]]
    # x in [y0, y0 + rho^D], T^n x in [yn, yn + rho^(D-n)]
    lo = diff - rho ** D - FLOAT_SLACK
    hi = diff + rho ** (D - n) + FLOAT_SLACK
    dlo = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
    dhi = np.maximum(np.abs(lo), np.abs(hi))
    return dlo, dhi


def _thresholds(config: IFSConfig, phi: RateFunction, N: int) -> np.ndarray:
    return np.array([phi(config, n) for n in range(1, N + 1)])


# -- recurrent fraction -------------------------------------------------------------------


@dataclass
class RecurrenceResult:
    samples: int
    k: int
    N: int
    hits: int  # samples with at least one decided hit in [k, N]
    per_n: list[int]  # decided hits at each n = k..N
    undecided: int  # tests still open after escalation (counted as misses)
    escalated: int
    tests: int
    provenance: dict = field(default_factory=dict)

    @property
    def fraction(self) -> float:
        return self.hits / self.samples

    @property
    def undecided_rate(self) -> float:
        return self.undecided / self.tests if self.tests else 0.0

    def to_json(self) -> dict:
        return {
            "samples": self.samples, "k": self.k, "N": self.N, "hits": self.hits,
            "fraction": self.fraction, "per_n": self.per_n, "undecided": self.undecided,
            "escalated": self.escalated, "tests": self.tests, "provenance": self.provenance,
        }

    def to_csv(self) -> str:
        lines = ["n,hits"] + [f"{n},{h}" for n, h in zip(range(self.k, self.N + 1), self.per_n)]
        return "\n".join(lines) + "\n"


def _exact_hit(config: IFSConfig, digits: Sequence[int], n: int, phi_n: Fraction) -> bool | None:
    return recurrence_distance(config, truncated_point(config, digits), n).below(phi_n)


def recurrent_fraction(config: IFSConfig, phi: RateFunction, N: int, k: int, samples: int, seed: int,
                       depth: int | None = None, escalate: int = ESCALATE_DIGITS) -> RecurrenceResult:
    """Fraction of mu-samples with |T^n x - x| < phi(n) for some n in [k, N]."""
    ec = ExperimentConfig(config, seed, N, samples, k, depth=depth, escalate=escalate)
    D = ec.orbit_depth
    digits = _digit_matrix(config, seed, D, samples)
    dlo, dhi = distance_enclosures(config, digits, N)
    thr = _thresholds(config, phi, N)
    cols = slice(k - 1, N)
    # float thresholds carry relative error ~1e-16; widen the undecided band accordingly
    tol = thr * 1e-12
    hit = dhi[:, cols] < thr[cols] - tol[cols]
    miss = dlo[:, cols] >= thr[cols] + tol[cols]
    open_ = ~(hit | miss)
    escalated = int(open_.sum())
    undecided = 0
    for i, j in zip(*np.nonzero(open_)):
        n = k + int(j)
        more = sample_digits(config, seed, D + escalate, int(i))
        verdict = _exact_hit(config, [int(d) for d in more], n, phi.exact(config, n))
        if verdict is None:
            undecided += 1
        elif verdict:
            hit[i, j] = True
    per_n = [int(c) for c in hit.sum(axis=0)]
    hits = int(hit.any(axis=1).sum())
    prov = provenance(config, seed, experiment="recurrent_fraction", phi=phi.to_json(), N=N, k=k,
                      samples=samples, depth=D, escalate=escalate)
    return RecurrenceResult(samples, k, N, hits, per_n, undecided, escalated, samples * (N - k + 1), prov)


# -- liminf statistic ------------------------------------------------------------------------


@dataclass
class LiminfResult:
    alpha: float
    N: int
    lo: np.ndarray  # certified lower bound of min_{n<=N} n^(1/alpha) |T^n x - x|, per sample
    hi: np.ndarray  # certified upper bound
    provenance: dict = field(default_factory=dict)

    def quantile(self, q: float, side: str = "mid") -> float:
        arr = {"lo": self.lo, "hi": self.hi, "mid": (self.lo + self.hi) / 2}[side]
        return float(np.quantile(arr, q, method="inverted_cdf"))

    def summary(self) -> dict:
        qs = (0.1, 0.25, 0.5, 0.75, 0.9)
        return {f"q{int(q * 100)}": [self.quantile(q, "lo"), self.quantile(q, "hi")] for q in qs}

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "N": self.N, "samples": int(self.lo.size), "summary": self.summary(),
                "provenance": self.provenance}

    def to_csv(self) -> str:
        lines = ["sample,lo,hi"] + [f"{i},{a!r},{b!r}" for i, (a, b) in enumerate(zip(self.lo.tolist(), self.hi.tolist()))]
        return "\n".join(lines) + "\n"


def liminf_statistic(config: IFSConfig, alpha, N: int, samples: int, seed: int,
                     depth: int | None = None) -> LiminfResult:
    """Per-sample enclosures of min_{n<=N} n**(1/alpha) |T^n x - x|."""
    a = float(alpha.value(config)) if hasattr(alpha, "value") else float(alpha)
    if not a > 0:
        raise NonpositiveRate("alpha must be positive")
    D = depth if depth is not None else N + EXTRA_DIGITS
    digits = _digit_matrix(config, seed, D, samples)
    dlo, dhi = distance_enclosures(config, digits, N)
    w = np.arange(1, N + 1, dtype=float) ** (1.0 / a)
    # weights are rounded floats; nudge the bounds outward by a relative 1e-12
    lo = (dlo * w).min(axis=1) * (1 - 1e-12)
    hi = (dhi * w).min(axis=1) * (1 + 1e-12)
    prov = provenance(config, seed, experiment="liminf_statistic", alpha=str(alpha), N=N,
                      samples=samples, depth=D)
    return LiminfResult(a, N, lo, hi, prov)


def liminf_exact(config: IFSConfig, point: CodedPoint, alpha, N: int) -> Fraction | float:
    """The statistic for an exactly coded (eventually periodic) point."""
    if not point.is_exact:
        raise ValueError("liminf_exact needs an exact point")
    a = float(alpha.value(config)) if hasattr(alpha, "value") else float(alpha)
    best = math.inf
    for n in range(1, N + 1):
        d = recurrence_distance(config, point, n).value
        if d == 0:
            return Fraction(0)
        best = min(best, n ** (1.0 / a) * float(d))
    return best


# -- covering exponent -------------------------------------------------------------------------


def _log_terms(config: IFSConfig, phi: RateFunction, k: int, N: int) -> list[tuple[mpmath.mpf, mpmath.mpf]]:
    """(n log L, log min(rho^(n-1) phi(n), rho^n)) for n = k..N."""
    logL = mpmath.log(config.L)
    logr = mpmath.log(mpmath.mpf(config.rho.numerator) / config.rho.denominator)
    out = []
    for n in range(k, N + 1):
        size = min((n - 1) * logr + mpmath.log(phi.mp(config, n)), n * logr)
        out.append((n * logL, size))
    return out


def cover_log_sum(config: IFSConfig, phi: RateFunction, k: int, N: int, s: float) -> float:
    """log of sum_{n=k}^N L^n min(rho^(n-1) phi(n), rho^n)^s."""
    with mpmath.workprec(PREC):
        terms = [a + s * b for a, b in _log_terms(config, phi, k, N)]
        m = max(terms)
        return float(m + mpmath.log(mpmath.fsum(mpmath.exp(t - m) for t in terms)))


def covering_exponent(config: IFSConfig, phi: RateFunction, k: int, N: int, tol: float = BISECT_TOL) -> float:
    """The s in [0, 1] at which the natural level-n covers have total s-cost 1.

    The cost depends only on n (every window at level n has the same size bound),
    so no enumeration or word sampling is needed.
    """
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    with mpmath.workprec(PREC):
        pairs = _log_terms(config, phi, k, N)

        def g(s):
            terms = [a + s * b for a, b in pairs]
            m = max(terms)
            return m + mpmath.log(mpmath.fsum(mpmath.exp(t - m) for t in terms))

        if g(0) < 0:
            raise NoRoot("cover sum is below 1 already at s = 0")
        if g(1) > 0:
            raise NoRoot("cover sum exceeds 1 at s = 1")
        lo, hi = 0.0, 1.0
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if g(mid) > 0:
                lo = mid
            else:
                hi = mid
    return (lo + hi) / 2


def covering_curve(config: IFSConfig, phi: RateFunction, k: int, N: int, points: int = 101) -> list[tuple[float, float]]:
    return [(s, cover_log_sum(config, phi, k, N, s)) for s in np.linspace(0.0, 1.0, points).tolist()]


def write_curve_svg(path, curve, root: float | None = None, formula: float | None = None, title: str = "") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "recurfrac"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([s for s, _ in curve], [v for _, v in curve], lw=1.5)
    ax.axhline(0.0, color="grey", lw=0.8)
    if root is not None:
        ax.axvline(root, color="C1", ls="--", lw=1, label=f"root {root:.4f}")
    if formula is not None:
        ax.axvline(formula, color="C2", ls=":", lw=1, label=f"formula {formula:.4f}")
    ax.set_xlabel("s")
    ax.set_ylabel("log cover sum")
    if title:
        ax.set_title(title)
    if root is not None or formula is not None:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# -- pilot oracles ----------------------------------------------------------------------------------


def _binom_tails(m: int, q: float) -> list[float]:
    """tails[j] = P(Bin(m, q) >= j) for j = 0..m+1."""
    logpmf = [math.lgamma(m + 1) - math.lgamma(i + 1) - math.lgamma(m - i + 1)
              + i * math.log(q) + (m - i) * math.log1p(-q) for i in range(m + 1)]
    tails = [0.0] * (m + 2)
    for i in range(m, -1, -1):
        tails[i] = tails[i + 1] + math.exp(logpmf[i])
    return tails


def quantile_bound(values, q: float, delta: float, side: str) -> tuple[float, int]:
    """Distribution-free confidence bound for the population q-quantile.

    ``side="lower"``: the largest order statistic X_(j) with P(X_(j) <= xi_q) >= 1 - delta.
    ``side="upper"``: the smallest X_(j) with P(X_(j) >= xi_q) >= 1 - delta.
    Returns (value, j) with j 1-based.
    """
    xs = sorted(float(v) for v in values)
    m = len(xs)
    tails = _binom_tails(m, q)
    if side == "lower":
        # P(X_(j) <= xi_q) = P(Bin(m, q) >= j)
        j = max((j for j in range(1, m + 1) if tails[j] >= 1 - delta), default=None)
    elif side == "upper":
        # P(X_(j) >= xi_q) = P(Bin(m, q) <= j - 1)
        j = min((j for j in range(1, m + 1) if 1 - tails[j] >= 1 - delta), default=None)
    else:
        raise ValueError("side must be 'lower' or 'upper'")
    if j is None:
        raise ValueError(f"{m} samples are too few for confidence {1 - delta}")
    return xs[j - 1], j


def pilot_thresholds(config: IFSConfig, seed: int, samples: int = 1000, delta: float = 1e-3) -> dict:
    """Thresholds for the liminf experiment, from an independent pilot run at N = 100.

    alpha = gamma: a lower confidence bound on the median at N = 100. A later
    median at N = 1000 below it shows the statistic keeps shrinking.
    alpha = gamma/2: a lower confidence bound on the 10th percentile at N = 100.
    A later 10th percentile at N = 1000 above it shows the lower tail does not
    drift towards 0.
    """
    from .gexpr import GAMMA

    crit = liminf_statistic(config, GAMMA, 100, samples, seed)
    sub = liminf_statistic(config, GAMMA / 2, 100, samples, seed)
    med, j_med = quantile_bound(crit.lo, 0.5, delta, "lower")
    p10, j_p10 = quantile_bound(sub.lo, 0.1, delta, "lower")
    return {
        "alpha_gamma_median": {"threshold": med, "order_statistic": j_med, "quantile": 0.5, "N": 100},
        "alpha_half_gamma_p10": {"threshold": p10, "order_statistic": j_p10, "quantile": 0.1, "N": 100},
        "delta": delta,
        "provenance": provenance(config, seed, experiment="liminf_pilot", samples=samples),
    }


def pilot_fraction_oracle(config: IFSConfig, phi: RateFunction, N_exact: int = 14,
                          threshold: float = 0.5, mc_samples: int = 10 ** 4) -> dict:
    """Validate a Monte Carlo threshold against exact measures.

    The expected recurrent fraction over n <= N is at least mu(union_{n<=N_exact} A_n),
    computed exactly. The threshold is accepted when it sits at least five
    binomial standard deviations below that bound.
    """
    from .recurrence import level_table

    rows = level_table(config, phi, 1, N_exact)
    union = rows[-1].cumulative
    sigma = math.sqrt(0.25 / mc_samples)
    return {
        "threshold": threshold,
        "union_lower": float(union.lo),
        "sum_mu_An": float(sum(r.mu.value for r in rows)),
        "N_exact": N_exact,
        "sigma": sigma,
        "validated": float(union.lo) - 5 * sigma > threshold,
        "provenance": provenance(config, experiment="fraction_pilot", phi=phi.to_json(), mc_samples=mc_samples),
    }
