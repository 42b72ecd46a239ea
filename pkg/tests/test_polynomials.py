"""MultiPoly arithmetic, Laurent support, calculus and display."""

from fractions import Fraction as F

import pytest

from virasoro.polynomials import MultiPoly, poly_ring


def test_basic_arithmetic():
    x = MultiPoly.var("x")
    y = MultiPoly.var("y")
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert (p - p).is_zero()
    assert (x + 1) ** 3 == x**3 + 3 * x**2 + 3 * x + 1


def test_rational_coefficients_normalize():
    x = MultiPoly.var("x")
    p = x * F(2, 4) + x * F(1, 2)
    assert p.terms == {(1,): 1}  # normalized to int


def test_laurent_variables():
    z = MultiPoly.var("z", laurent=True)
    p = MultiPoly(("z",), {(-2,): 3, (1,): 1}, ("z",))
    assert p.diff("z").terms == {(-3,): -6, (0,): 1}
    with pytest.raises(ValueError):
        MultiPoly(("x",), {(-1,): 1})
    del z


def test_diff_and_subs():
    g = poly_ring(("a", "b"))
    p = g["a"] ** 2 * g["b"] + g["b"] * 3
    assert p.diff("a") == g["a"] * g["b"] * 2
    assert p.subs({"a": 2, "b": F(1, 3)}) == MultiPoly.constant(F(4, 3) + 1)
    q = p.subs({"a": g["b"]})
    assert q == g["b"] ** 3 + g["b"] * 3


def test_subs_negative_power():
    p = MultiPoly(("z",), {(-2,): 1}, ("z",))
    assert p.subs({"z": F(1, 2)}) == MultiPoly.constant(4)
    with pytest.raises(ZeroDivisionError):
        p.subs({"z": 0})


def test_coefficient_extraction():
    g = poly_ring(("x", "y"))
    p = g["x"] ** 2 * g["y"] + g["x"] * 2 + 5
    cx2 = p.coefficient_of("x", 2)
    assert cx2 == MultiPoly.var("y")
    assert p.coefficient_of("x", 0) == MultiPoly.constant(5)


def test_canonical_is_sorted_and_stable():
    g = poly_ring(("a2", "a3"))
    p = g["a3"] * 2 - g["a2"] ** 2
    assert p.canonical() == "2*a3 + -1*a2^2"


def test_alignment_across_variable_sets():
    a = MultiPoly.var("a10")
    b = MultiPoly.var("a2")
    p = a + b
    # numeric-aware variable ordering: a2 before a10
    assert p.vars == ("a2", "a10")


def test_eval_numeric():
    g = poly_ring(("x", "y"))
    p = g["x"] ** 2 + g["y"] * F(1, 2)
    assert p.eval_numeric({"x": 3.0, "y": 2.0}) == pytest.approx(10.0)
