import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conemetric.divisor import (Divisor, ReducibilityClass, classify_reducibility, cone_cosines,
                                irreducible_exists, mobius_to_standard, parse_order,
                                trace_condition_value)
from conemetric.errors import InvalidDivisor, TwoIntegers


def test_parse_rationals_and_decimals():
    d = Divisor.parse("-1/2, 0.25, 3")
    assert d.beta == (-0.5, 0.25, 3.0)
    assert d.exact == (Fraction(-1, 2), Fraction(1, 4), Fraction(3))
    assert parse_order("0.1")[1] == Fraction(1, 10)


@pytest.mark.parametrize("text", ["1,2", "-1,0,0", "a,b,c", "1,2,3,4", "-2,0.5,0.5"])
def test_parse_rejects(text):
    with pytest.raises((InvalidDivisor, ValueError)):
        Divisor.parse(text)


def test_classes():
    assert classify_reducibility(Divisor.parse("-1/2,-1/2,-1/2")) is ReducibilityClass.IRREDUCIBLE
    assert classify_reducibility(Divisor.parse("0.5,2,0.5")) is ReducibilityClass.H1_REDUCIBLE
    assert classify_reducibility(Divisor.parse("1,1,2")) is ReducibilityClass.H3_REDUCIBLE
    with pytest.raises(TwoIntegers):
        classify_reducibility(Divisor.parse("1,2,0.5"))


def test_exact_integrality_beats_tolerance():
    # 1 + 1e-12 written out is not an integer, though it is within INTEGER_TOL
    d = Divisor.parse("1.000000000001,0.5,0.5")
    assert d.integer_indices() == ()


def test_trace_value_anchors():
    assert trace_condition_value(Divisor.parse("-1/2,-1/2,-1/2")) == pytest.approx(0.0, abs=1e-15)
    # integral orders use exact cosines, so any H3 divisor sits at L = 1
    assert trace_condition_value(Divisor.parse("1,1,2")) == 1.0
    ex = irreducible_exists(Divisor.parse("0.3,0.6,0.4"))
    assert ex.exists and ex.margin > 0


@given(st.tuples(*[st.floats(-0.99, 3.0) for _ in range(3)]))
def test_trace_value_is_symmetric(b):
    d = Divisor(b)
    L = trace_condition_value(d)
    for perm in [(1, 0, 2), (2, 1, 0), (1, 2, 0)]:
        assert trace_condition_value(d.permuted(perm)) == pytest.approx(L, abs=1e-12)
    c = cone_cosines(d)
    assert all(abs(x) <= 1 for x in c)


def test_mobius_to_standard_sends_points():
    p = (2 + 1j, -1.0, 0.5j)
    m = mobius_to_standard(*p)
    f = lambda z: (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])
    assert abs(f(p[0])) < 1e-12
    assert abs(f(p[1]) - 1) < 1e-12
    assert abs(m[1, 0] * p[2] + m[1, 1]) < 1e-12
    assert abs(np.linalg.det(m) - 1) < 1e-12
    m = mobius_to_standard(3.0, 5.0, math.inf)
    assert abs((m[0, 0] * 5 + m[0, 1]) / (m[1, 0] * 5 + m[1, 1]) - 1) < 1e-12
