import math
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from recurfrac.asymptotics import Clamped, Constant, Geometric, Power, dim_formula
from recurfrac.coding import pi_eval, recurrence_distance, truncated_point
from recurfrac.errors import NoRoot, NonpositiveRate
from recurfrac.experiments import (
    ExperimentConfig,
    _digit_matrix,
    cover_log_sum,
    covering_exponent,
    distance_enclosures,
    dumps,
    liminf_exact,
    liminf_statistic,
    provenance,
    quantile_bound,
    recurrent_fraction,
    sample_digits,
    sample_point,
)
from recurfrac.gexpr import GAMMA
from recurfrac.ifs import cylinder_interval

PSI = Clamped(Power(1, GAMMA))


def test_prefix_frequencies(mt):
    draws = 10 ** 5
    digits = np.random.Generator(np.random.Philox(5)).integers(1, 3, size=(draws, 3))
    counts = Counter(map(tuple, digits.tolist()))
    assert len(counts) == 8
    sigma = math.sqrt(draws * (1 / 8) * (7 / 8))
    assert all(abs(c - draws / 8) < 3 * sigma for c in counts.values())


def test_sampler_prefix_frequencies(mt):
    # the production sampler, 2 * 10^4 independent streams
    draws = 20_000
    counts = Counter(tuple(sample_digits(mt, 11, 3, i).tolist()) for i in range(draws))
    sigma = math.sqrt(draws * (1 / 8) * (7 / 8))
    assert len(counts) == 8 and all(abs(c - draws / 8) < 4 * sigma for c in counts.values())


def test_sample_point_depth_one(config):
    p = sample_point(config, 3, 1)
    assert p.depth == 1
    cyl = cylinder_interval(config, p.digits(1))
    assert cyl.width == config.rho


def test_sample_point_deterministic(config):
    a = sample_digits(config, 42, 50, 7)
    assert np.array_equal(a, sample_digits(config, 42, 50, 7))
    # deeper requests extend the same stream
    assert np.array_equal(a, sample_digits(config, 42, 80, 7)[:50])
    assert not np.array_equal(a, sample_digits(config, 43, 50, 7))
    with pytest.raises(ValueError):
        sample_digits(config, 0, 0)


def test_experiment_config_validation(mt):
    ExperimentConfig(mt, 1, 10, 5)
    with pytest.raises(ValueError):
        ExperimentConfig(mt, 1, 10, 5, k=11)
    with pytest.raises(ValueError):
        ExperimentConfig(mt, 1, 10, 5, depth=10)
    assert ExperimentConfig(mt, 1, 10, 5).orbit_depth == 74


@settings(max_examples=20)
@given(st.integers(0, 2 ** 32), st.integers(1, 30))
def test_enclosures_contain_exact_distance(seed, N):
    from recurfrac.ifs import MIDDLE_THIRD as mt

    digits = _digit_matrix(mt, seed, N + 20, 4)
    dlo, dhi = distance_enclosures(mt, digits, N)
    for i in range(4):
        p = truncated_point(mt, [int(d) for d in digits[i]])
        for n in (1, N // 2 + 1, N):
            d = recurrence_distance(mt, p, n)
            assert dlo[i, n - 1] <= float(d.lo) and float(d.hi) <= dhi[i, n - 1]


def test_fraction_always_true(config):
    res = recurrent_fraction(config, Constant(2), 20, 1, 300, seed=1)
    assert res.fraction == 1 and res.undecided == 0


def test_fraction_geometric_small(mt):
    res = recurrent_fraction(mt, Geometric(1), 16, 10, 10 ** 4, seed=21)
    assert res.fraction <= 0.05
    assert res.undecided_rate < 0.01


def test_fraction_monotone(mt):
    fr = [recurrent_fraction(mt, PSI, N, 1, 2000, seed=5).fraction for N in (5, 20, 60)]
    assert fr == sorted(fr)
    fk = [recurrent_fraction(mt, PSI, 60, k, 2000, seed=5).fraction for k in (1, 5, 20)]
    assert fk == sorted(fk, reverse=True)


def test_fraction_reproducible(mt):
    a = recurrent_fraction(mt, PSI, 50, 1, 500, seed=9)
    b = recurrent_fraction(mt, PSI, 50, 1, 500, seed=9)
    assert dumps(a.to_json()) == dumps(b.to_json()) and a.to_csv() == b.to_csv()
    assert a.to_csv().startswith("n,hits\n1,")


def test_escalation_decides_open_tests(mt):
    # with a 24-digit orbit the float enclosures are too coarse near n = N, so tests escalate
    res = recurrent_fraction(mt, Geometric(1), 22, 18, 2000, seed=4, depth=24)
    assert res.escalated > 0
    assert res.undecided <= res.escalated


def test_liminf_periodic_point_is_zero(mt):
    p = pi_eval(mt, (), (1, 2))
    assert liminf_exact(mt, p, GAMMA, 5) == 0
    assert liminf_exact(mt, p, GAMMA / 2, 2) == 0


def test_liminf_enclosure_and_monotone(mt):
    small = liminf_statistic(mt, GAMMA, 50, 400, seed=13)
    large = liminf_statistic(mt, GAMMA, 200, 400, seed=13)
    assert np.all(small.lo <= small.hi)
    # the minimum over a longer horizon is pointwise no larger
    assert np.all(large.lo <= small.hi)
    assert large.quantile(0.5, "lo") <= small.quantile(0.5, "hi")
    assert set(small.summary()) == {"q10", "q25", "q50", "q75", "q90"}


def test_liminf_rejects_bad_alpha(mt):
    with pytest.raises(NonpositiveRate):
        liminf_statistic(mt, 0, 10, 5, 0)


def test_covering_single_level_closed_form(mt):
    for b in (F(1, 2), F(1), F(2)):
        for n in (5, 12, 30):
            size = min(mt.rho ** (n - 1) * Geometric(b).exact(mt, n), mt.rho ** n)
            s = n * math.log(2) / -math.log(float(size))
            assert covering_exponent(mt, Geometric(b), n, n) == pytest.approx(s, abs=2e-6)


def test_cover_sum_decreasing(mt):
    vals = [cover_log_sum(mt, Geometric(1), 10, 60, s) for s in np.linspace(0, 1, 11)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_covering_no_root(mt):
    # every term is L^n >= 1 at s = 0, so only the s = 1 end can fail: a thick system whose
    # first-level covers already have total length above 1
    from recurfrac.ifs import validate_config

    thick = validate_config(F(9, 20), 2, (0, F(11, 20)))
    with pytest.raises(NoRoot):
        covering_exponent(thick, Constant(1), 1, 30)
    with pytest.raises(ValueError):
        covering_exponent(mt, Geometric(1), 5, 4)


@pytest.mark.xfail(strict=True, reason="the k=10 finite cover overshoots the limiting dimension; see README")
def test_covering_geometric_example(mt):
    assert abs(covering_exponent(mt, Geometric(1), 10, 60) - dim_formula(mt, 1)) < 0.05


@pytest.mark.xfail(strict=True, reason="the k=10 finite cover overshoots the limiting dimension; see README")
def test_covering_constant_example(mt):
    assert abs(covering_exponent(mt, Constant(mt.clamp_level), 10, 60) - mt.gamma) < 0.05


def test_covering_orders_by_b(mt):
    est = [covering_exponent(mt, Geometric(b), 10, 60) for b in (F(1, 2), F(1), F(2))]
    assert est == sorted(est, reverse=True)
    assert all(e > dim_formula(mt, b) for e, b in zip(est, (0.5, 1, 2)))


def test_quantile_bound():
    xs = list(range(1, 1001))
    v, j = quantile_bound(xs, 0.5, 1e-3, "lower")
    assert v == j and 430 < j < 500
    u, k = quantile_bound(xs, 0.5, 1e-3, "upper")
    assert 500 < k < 570
    with pytest.raises(ValueError):
        quantile_bound([1, 2, 3], 0.5, 1e-3, "lower")


def test_quantile_bound_coverage():
    # the lower bound on a uniform median falls below 1/2 nearly always
    rng = np.random.default_rng(0)
    misses = sum(quantile_bound(rng.random(200), 0.5, 0.05, "lower")[0] > 0.5 for _ in range(400))
    assert misses <= 40


def test_provenance(mt, config):
    p = provenance(mt, 3, N=10)
    assert p == provenance(mt, 3, N=10)
    assert "rng" in p and p["params"] == {"N": 10}
    assert "seed" not in provenance(mt)
    assert provenance(mt)["config_hash"] != provenance(config)["config_hash"] or config == mt
