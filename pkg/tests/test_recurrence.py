from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from recurfrac.asymptotics import Clamped, Constant, Geometric, Power
from recurfrac.errors import EmptyBall, EmptyWord, LevelTooLarge, NonpositiveRate
from recurfrac.gexpr import GAMMA
from recurfrac.ifs import UNIT, Interval, cylinder_interval
from recurfrac.measure import merge_intervals, mu_intervals
from recurfrac.recurrence import (
    case_one_applies,
    enumerate_level,
    intersect_lists,
    iter_windows,
    j_interval,
    level_table,
    mu_union,
    quasi_independence,
    rows_to_csv,
    subtract_lists,
)
from recurfrac.verify import (
    check_case_split,
    check_count_bound,
    check_j_window_law,
    check_level_lower_bound,
    check_paley_zygmund,
)

from strategies import config_and_word

TENTH = F(1, 10)
PSI = Clamped(Power(1, GAMMA))


def test_j_interval_examples(mt):
    jd = j_interval(mt, (1,), TENTH)
    assert (jd.center, jd.half_width) == (0, F(1, 20))
    assert jd.interval == Interval(0, F(1, 20))
    assert F(1, 30) <= jd.interval.width <= TENTH
    assert j_interval(mt, (2,), TENTH).interval == Interval(F(19, 20), 1)
    jd = j_interval(mt, (1, 2), TENTH)
    assert (jd.center, jd.half_width) == (F(1, 4), F(1, 80))
    assert jd.interval == Interval(F(1, 4) - F(1, 80), F(1, 4) + F(1, 80))
    cyl = cylinder_interval(mt, (1, 2))
    assert cyl.lo < jd.interval.lo and jd.interval.hi < cyl.hi


def test_j_interval_errors(mt):
    with pytest.raises(EmptyWord):
        j_interval(mt, (), TENTH)
    with pytest.raises(NonpositiveRate):
        j_interval(mt, (1,), 0)


@given(config_and_word(1, 7), st.fractions(min_value=F(1, 10**6), max_value=2, max_denominator=10**6))
def test_window_contains_centre(cw, phi):
    c, w = cw
    jd = j_interval(c, w, phi)
    assert jd.center in jd.interval
    assert cylinder_interval(c, w).contains_interval(jd.interval)
    if phi <= c.clamp_level:
        n = len(w)
        assert c.rho ** n * phi <= jd.interval.width <= c.rho ** (n - 1) * phi


def test_enumerate_level_examples(mt, config):
    lv = enumerate_level(mt, 1, TENTH)
    assert lv.intervals == [Interval(0, F(1, 20)), Interval(F(19, 20), 1)] and lv.count == 2
    lv = enumerate_level(mt, 1, TENTH, Interval(0, F(1, 3)))
    assert lv.intervals == [Interval(0, F(1, 20))] and lv.count == 1
    lv = enumerate_level(config, 3, TENTH, Interval(2, 3))
    assert lv.intervals == [] and lv.count == 0


def test_enumeration_is_sorted_and_complete(config):
    for n in range(1, 6):
        ws = [jd.word for jd in iter_windows(config, n, TENTH)]
        assert len(ws) == config.L ** n
        ivs = enumerate_level(config, n, TENTH).intervals
        assert ivs == sorted(ivs) == merge_intervals(ivs)


def test_region_pruning_matches_filter(config):
    region = cylinder_interval(config, (1, config.L))
    full = enumerate_level(config, 6, TENTH)
    clipped = [iv.intersect(region) for iv in full.intervals]
    assert enumerate_level(config, 6, TENTH, region).intervals == [iv for iv in clipped if iv is not None]


def test_level_too_large(mt):
    with pytest.raises(LevelTooLarge):
        enumerate_level(mt, 21, TENTH)
    with pytest.raises(LevelTooLarge):
        enumerate_level(mt, 7, TENTH, cap=100)


def test_mu_union_examples(mt):
    lv = enumerate_level(mt, 1, TENTH)
    assert mu_union(mt, [lv]).value == F(1, 4)
    assert mu_union(mt, [lv, lv]) == mu_union(mt, [lv])
    from recurfrac.recurrence import LevelSet
    assert mu_union(mt, [LevelSet(1, [UNIT])]).value == 1
    with pytest.raises(ValueError):
        mu_union(mt, [])


interval_lists = st.lists(
    st.tuples(st.fractions(0, 1, max_denominator=60), st.fractions(0, 1, max_denominator=60)), max_size=6
).map(lambda ps: merge_intervals(Interval(min(a, b), max(a, b)) for a, b in ps if a != b))


@given(interval_lists, interval_lists)
def test_list_algebra(a, b):
    both = intersect_lists(a, b)
    rest = subtract_lists(a, b)
    pts = [F(i, 240) for i in range(241)]
    for x in pts:
        in_a, in_b = any(x in iv for iv in a), any(x in iv for iv in b)
        if in_a and in_b:
            assert any(x in iv for iv in both)
        if any(x in iv for iv in both):
            assert in_a and in_b
        if in_a and not in_b:
            assert any(x in iv for iv in rest)
        if any(lo < x < hi for lo, hi in ((iv.lo, iv.hi) for iv in rest)):
            assert in_a and not in_b


def test_inclusion_exclusion(mt):
    a = enumerate_level(mt, 3, F(1, 6)).intervals
    b = enumerate_level(mt, 5, F(1, 6)).intervals
    lhs = mu_intervals(mt, a + b).value
    rhs = mu_intervals(mt, a).value + mu_intervals(mt, b).value - mu_intervals(mt, intersect_lists(a, b)).value
    assert lhs == rhs


def test_level_table_cumulative(mt):
    rows = level_table(mt, PSI, 1, 6)
    levels = [enumerate_level(mt, n, PSI.exact(mt, n)) for n in range(1, 7)]
    for i, r in enumerate(rows):
        assert r.cumulative.value == mu_union(mt, levels[: i + 1]).value
        assert r.count == 2 ** r.n
    assert all(a.cumulative.value <= b.cumulative.value for a, b in zip(rows, rows[1:]))
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == "n,count,mu_An,mu_An_err,cumulative,cumulative_err"
    assert len(text.splitlines()) == 7


def test_quasi_independence_single_level(mt):
    rep = quasi_independence(mt, UNIT, Constant(TENTH), 1)
    assert rep.sum_pairs == rep.sum_single
    assert rep.ratio == 4
    assert rep.pz_lower == float(rep.union.value) == 0.25


def test_quasi_independence_n10(mt):
    rep = quasi_independence(mt, UNIT, Clamped(Power(1, GAMMA)), 10)
    assert 0 < rep.ratio <= 20
    assert rep.pz_consistent
    doc = rep.to_json()
    assert doc["N"] == 10 and doc["ratio"] == rep.ratio


def test_quasi_independence_null_levels(mt):
    # no level-1 window meets I(2, 1)
    rep = quasi_independence(mt, cylinder_interval(mt, (2, 1)), PSI, 1)
    assert rep.to_json()["ratio"] is None and rep.pz_lower == 0


def test_empty_ball(mt):
    with pytest.raises(EmptyBall):
        quasi_independence(mt, Interval(F(2, 5), F(3, 5)), PSI, 3)


def test_length_bounds_exhaustive(config):
    assert check_j_window_law(config, 8).ok


def test_level_lower_bound(config):
    # 3**12 windows of exact measure take over a minute, so the 3-map system stops at 10
    r = check_level_lower_bound(config, max_n=12 if config.L == 2 else 10)
    assert r.ok, r.failures


def test_count_bound(config):
    r = check_count_bound(config, max_m=8)
    assert r.ok and r.cases > 0, r.failures


def test_case_split(mt):
    r = check_case_split(mt, max_n=10)
    assert r.ok and r.cases > 0, r.failures


def test_case_split_three_symbols():
    from recurfrac.ifs import THREE_FIFTHS

    r = check_case_split(THREE_FIFTHS, max_n=8)
    assert r.ok and r.cases > 0, r.failures


def test_case_one_condition(mt):
    assert case_one_applies(mt, 1, 2, F(1, 100))
    assert not case_one_applies(mt, 1, 2, F(1, 4))


def test_paley_zygmund(config):
    r = check_paley_zygmund(config, N=6)
    assert r.ok, r.failures


def test_geometric_levels_shrink(mt):
    rows = level_table(mt, Geometric(1), 1, 8)
    assert all(b.mu.value < a.mu.value for a, b in zip(rows, rows[1:]))
