import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from recurfrac.errors import BadRange, NonpositiveRadius
from recurfrac.ifs import UNIT, Interval, all_words, cylinder_interval
from recurfrac.measure import ahlfors_scan, cdf, merge_intervals, mu_ball, mu_interval, mu_intervals
from recurfrac.verify import brute_force_measure, check_measure_oracle

from strategies import config_and_word, configs, unit_rationals


def test_first_cylinder_is_half(mt):
    for depth in (1, 5, 40):
        m = mu_interval(mt, Interval(F(0), F(1, 3)), depth)
        assert m.value == F(1, 2) and m.exact


def test_gap_absorbs_overhang(mt):
    m = mu_interval(mt, Interval(F(0), F(1, 2)), 1)
    assert m.value == F(1, 2) and m.exact


@pytest.mark.parametrize("depth", [4, 10])
def test_short_interval(mt, depth):
    m = mu_interval(mt, Interval(F(0), F(1, 20)), depth)
    assert abs(m.value - F(1, 8)) <= m.error <= 2 * F(1, 2 ** depth)


def test_without_cycle_detection_the_error_is_bounded(mt):
    # 1/4 has the purely periodic coding (12)^inf, so plain recursion never resolves it
    m = mu_interval(mt, Interval(F(0), F(1, 4)), 12, detect_cycles=False)
    assert not m.exact
    assert m.error <= 2 * F(1, 2 ** 12)
    assert m.lo <= F(1, 3) <= m.hi
    assert cdf(mt, F(1, 4)).value == F(1, 3)


def test_balls(mt):
    m = mu_ball(mt, 0, F(1, 3))
    assert m.value == F(1, 2)
    assert float(m.value) / (1 / 3) ** mt.gamma == pytest.approx(1, abs=1e-12)
    assert mu_ball(mt, F(1, 2), 2).value == 1
    assert mu_ball(mt, F(1, 4), F(1, 36)).value == F(1, 8)


def test_nonpositive_radius(mt):
    with pytest.raises(NonpositiveRadius):
        mu_ball(mt, F(1, 2), 0)


def test_normalisation(config):
    assert mu_interval(config, UNIT, 1).value == 1


@pytest.mark.parametrize("n", range(0, 9))
def test_cylinder_law(config, n):
    for w in all_words(config, n):
        m = mu_interval(config, cylinder_interval(config, w))
        assert m.exact and m.value == F(1, config.L ** n)


@given(config_and_word(min_size=1, max_size=10))
def test_cylinder_scaling_ratio_is_one(cw):
    c, w = cw
    iv = cylinder_interval(c, w)
    assert float(mu_interval(c, iv).value) / float(iv.width) ** c.gamma == pytest.approx(1, rel=1e-12)


@given(configs, unit_rationals(), unit_rationals(), unit_rationals())
def test_additivity(c, a, b, d):
    x, y, z = sorted((a, b, d))
    left, right, whole = mu_interval(c, Interval(x, y)), mu_interval(c, Interval(y, z)), mu_interval(c, Interval(x, z))
    assert abs(whole.value - left.value - right.value) <= whole.error + left.error + right.error


@given(configs, unit_rationals(), unit_rationals(), unit_rationals(), unit_rationals())
def test_monotone(c, a, b, d, e):
    x0, x1, x2, x3 = sorted((a, b, d, e))
    inner, outer = mu_interval(c, Interval(x1, x2)), mu_interval(c, Interval(x0, x3))
    assert inner.lo <= outer.hi


@given(configs, unit_rationals(10 ** 4), unit_rationals(10 ** 4))
def test_agrees_with_cylinder_count(c, a, b):
    iv = Interval(min(a, b), max(a, b))
    m = mu_interval(c, iv, 14)
    lo, hi = brute_force_measure(c, iv, 10)
    assert lo - m.error <= m.value <= hi + m.error


def test_oracle_batch(config):
    assert check_measure_oracle(config, count=100, level=10).ok


def test_merge_and_union(mt):
    ivs = [Interval(F(0), F(1, 20)), Interval(F(19, 20), F(1)), Interval(F(0), F(1, 20))]
    assert merge_intervals(ivs) == [Interval(F(0), F(1, 20)), Interval(F(19, 20), F(1))]
    assert mu_intervals(mt, ivs).value == F(1, 4)


def test_ahlfors_scan_within_constants(config):
    rep = ahlfors_scan(config, 300, 1e-6, 0.25, seed=11)
    assert rep.ok
    assert rep.bound_lo == 1 / config.L and rep.bound_hi == float(2 / config.rho + 1)
    assert rep.bound_lo <= rep.min_ratio <= rep.max_ratio <= rep.bound_hi


def test_ahlfors_scan_is_deterministic(mt):
    a, b = ahlfors_scan(mt, 50, 1e-4, 0.1, seed=5), ahlfors_scan(mt, 50, 1e-4, 0.1, seed=5)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "x,r,mu,ratio"


def test_empty_scan(mt):
    rep = ahlfors_scan(mt, 0, 1e-3, 0.1, seed=0)
    assert rep.samples == 0 and rep.ok


@pytest.mark.parametrize("lo, hi", [(0, 0.1), (0.2, 0.1), (1e-3, 0.5)])
def test_scan_range_checked(mt, lo, hi):
    with pytest.raises(BadRange):
        ahlfors_scan(mt, 1, lo, hi, seed=0)
