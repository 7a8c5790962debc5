from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tangent_cylinders.bounds import (
    bounds_table,
    component_bound_general,
    component_bound_unit,
    milnor_thom_bound,
    parallel_family_bound,
    parameter_count_prediction,
    theorem_bound_general,
    theorem_bound_unit,
    three_sign_bound,
)


def brute_force_prediction(d, limit=1000):
    ok = [n for n in range(1, limit) if (2 * d - 2) * n >= comb(n, 2) + comb(d + 1, 2)]
    return max(ok)


@pytest.mark.parametrize("D, k, expected", [(1, 5, 1), (4, 3, 196), (4, 4, 1372)])
def test_milnor_thom(D, k, expected):
    assert milnor_thom_bound(D, k) == expected


@pytest.mark.parametrize("D, k, expected", [(4, 5, 48020), (1, 1, 5), (2, 2, 30)])
def test_three_sign(D, k, expected):
    assert three_sign_bound(D, k) == expected


@pytest.mark.parametrize("fn", [milnor_thom_bound, three_sign_bound])
@pytest.mark.parametrize("D, k", [(0, 3), (4, 0), (-1, 2)])
def test_nonpositive_inputs_rejected(fn, D, k):
    with pytest.raises(ValueError):
        fn(D, k)


def test_dimension_three_values():
    assert component_bound_unit(3) == 1372
    assert component_bound_general(3) == 48020
    assert theorem_bound_unit(3) == 4116
    assert theorem_bound_general(3) == 192080
    assert theorem_bound_unit(4) == 268912


@pytest.mark.parametrize(
    "fn", [component_bound_unit, component_bound_general, theorem_bound_unit, theorem_bound_general, parameter_count_prediction]
)
def test_dimension_below_two_rejected(fn):
    with pytest.raises(ValueError):
        fn(1)


@pytest.mark.parametrize("d", range(2, 51))
def test_identities(d):
    assert component_bound_unit(d) == milnor_thom_bound(4, 2 * d - 2)
    assert component_bound_general(d) == three_sign_bound(4, 2 * d - 1)
    assert theorem_bound_unit(d) == d * component_bound_unit(d)
    assert theorem_bound_general(d) == (d + 1) * component_bound_general(d)


@pytest.mark.parametrize("d, expected", [(2, 3), (3, 7), (4, 11)])
def test_parameter_count_prediction(d, expected):
    assert parameter_count_prediction(d) == expected
    assert brute_force_prediction(d) == expected


@given(st.integers(2, 300))
def test_parameter_count_is_sharp(d):
    n = parameter_count_prediction(d)
    lhs = lambda m: (2 * d - 2) * m - comb(m, 2) - comb(d + 1, 2)
    assert lhs(n) >= 0 > lhs(n + 1)


@pytest.mark.parametrize("d, unit, expected", [(3, True, 3), (3, False, 4), (10, True, 10)])
def test_parallel_family(d, unit, expected):
    assert parallel_family_bound(d, unit) == expected


def test_big_dimension_exact():
    d = 10_000
    assert theorem_bound_unit(d) == 4 * d * 7 ** (2 * d - 3)
    assert theorem_bound_unit(d) % 7 == 0


def test_table_d3():
    t = bounds_table(3)
    assert (
        t.component_bound_unit,
        t.component_bound_general,
        t.theorem_bound_unit,
        t.theorem_bound_general,
        t.parameter_count_prediction,
        t.parallel_family_unit,
        t.parallel_family_general,
    ) == (1372, 48020, 4116, 192080, 7, 3, 4)
