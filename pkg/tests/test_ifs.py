import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from recurfrac.errors import BadRatio, EmptyWord, NotSorted, SeparationViolated, SymbolOutOfRange
from recurfrac.ifs import (
    MIDDLE_THIRD,
    Interval,
    all_words,
    as_fraction,
    config_from_json,
    cylinder_interval,
    gamma_dim,
    periodic_point,
    validate_config,
    word_value,
)

from strategies import config_and_word


def test_middle_third_is_valid():
    c = validate_config(F(1, 3), 2, (0, F(2, 3)))
    assert c == MIDDLE_THIRD
    assert c.translations == (F(0), F(2, 3))


def test_touching_first_level_intervals_rejected():
    with pytest.raises(SeparationViolated):
        validate_config(F(1, 2), 2, (0, F(1, 2)))


def test_uneven_gaps_accepted():
    c = validate_config(F(1, 4), 3, (0, F(3, 10), F(3, 4)))
    assert c.L == 3


@pytest.mark.parametrize("rho", [0, 1, F(3, 2), -F(1, 3)])
def test_ratio_outside_unit_interval(rho):
    with pytest.raises(BadRatio):
        validate_config(rho, 2, (0, F(2, 3)))


def test_unsorted_translations():
    with pytest.raises(NotSorted):
        validate_config(F(1, 5), 3, (0, F(4, 5), F(2, 5)))


def test_translation_past_right_end():
    with pytest.raises(SeparationViolated):
        validate_config(F(1, 3), 2, (0, F(3, 4)))


def test_wrong_translation_count():
    with pytest.raises(ValueError):
        validate_config(F(1, 3), 3, (0, F(2, 3)))


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_fraction(0.1)
    assert as_fraction("0.25") == F(1, 4)
    assert as_fraction("2/6") == F(1, 3)


def test_config_json_round_trip():
    doc = {"rho": "1/3", "L": 2, "translations": ["0", "2/3"]}
    c = config_from_json(doc)
    assert c == MIDDLE_THIRD
    assert config_from_json(c.to_json()) == c


@pytest.mark.parametrize(
    "rho, L, expected",
    [(F(1, 3), 2, math.log(2) / math.log(3)), (F(1, 4), 2, 0.5), (F(1, 5), 3, math.log(3) / math.log(5))],
)
def test_gamma_values(rho, L, expected):
    a = [F(j, L) for j in range(L)]
    c = validate_config(rho, L, a)
    assert gamma_dim(c) == pytest.approx(expected, rel=1e-15)
    assert L * float(rho) ** gamma_dim(c) == pytest.approx(1, rel=1e-12)


def test_gamma_of_quarter_is_exactly_half():
    c = validate_config(F(1, 4), 2, (0, F(3, 4)))
    assert gamma_dim(c) == 0.5


def test_middle_third_gamma_digits():
    assert f"{gamma_dim(MIDDLE_THIRD):.16f}".startswith("0.630929753571457")


@pytest.mark.parametrize("word, value", [((2,), F(2, 3)), ((1, 2), F(2, 9)), ((2, 1), F(2, 3)), ((), F(0))])
def test_word_values(mt, word, value):
    assert word_value(mt, word) == value


def test_symbol_out_of_range(mt):
    with pytest.raises(SymbolOutOfRange):
        word_value(mt, (1, 3))
    with pytest.raises(SymbolOutOfRange):
        cylinder_interval(mt, (0,))


@pytest.mark.parametrize(
    "word, lo, hi", [((1,), F(0), F(1, 3)), ((1, 2), F(2, 9), F(1, 3)), ((), F(0), F(1))]
)
def test_cylinders(mt, word, lo, hi):
    assert cylinder_interval(mt, word) == Interval(lo, hi)


@pytest.mark.parametrize("word, x", [((1,), F(0)), ((1, 2), F(1, 4)), ((2,), F(1))])
def test_periodic_points(mt, word, x):
    assert periodic_point(mt, word) == x


def test_periodic_point_needs_a_word(mt):
    with pytest.raises(EmptyWord):
        periodic_point(mt, ())


@given(config_and_word())
def test_cylinder_width_is_exact_power(cw):
    c, w = cw
    assert cylinder_interval(c, w).width == c.rho ** len(w)


@given(config_and_word(), st.data())
def test_extensions_nest(cw, data):
    c, w = cw
    ext = data.draw(st.lists(st.integers(1, c.L), max_size=4).map(tuple))
    assert cylinder_interval(c, w).contains_interval(cylinder_interval(c, w + ext))


@given(config_and_word(min_size=1))
def test_periodic_point_in_its_cylinder(cw):
    c, w = cw
    assert periodic_point(c, w) in cylinder_interval(c, w)


@pytest.mark.parametrize("n", range(1, 7))
def test_same_length_cylinders_disjoint(config, n):
    cyls = sorted(cylinder_interval(config, w) for w in all_words(config, n))
    assert all(a.hi < b.lo for a, b in zip(cyls, cyls[1:]))


def test_periodic_points_exhaustive(mt):
    for n in range(1, 9):
        for w in all_words(mt, n):
            assert periodic_point(mt, w) in cylinder_interval(mt, w)


def test_interval_ops():
    a, b = Interval(F(0), F(1, 2)), Interval(F(1, 2), F(1))
    assert a.meets(b)
    assert a.intersect(b) == Interval(F(1, 2), F(1, 2))
    assert Interval(F(0), F(1, 4)).intersect(b) is None
    with pytest.raises(ValueError):
        Interval(F(1), F(0))
