from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from vfgen.algebra import DimensionError, Polynomial
from vfgen.parse import parse_field
from vfgen.vectorfield import (VectorField, ad_iter, apply_to_poly, lie_bracket,
                               standard_generators)
from strategies import fields, polynomials, small_rationals
from vectorfield_oracle import bracket_by_terms

F = parse_field


def test_generators_n2():
    U, V = standard_generators(2)
    assert U == VectorField.basis((0, 0), 2)
    assert V == VectorField.basis((0, 8), 1) + VectorField.basis((4, 4), 2)


def test_generators_n3():
    _, V = standard_generators(3)
    expected = (VectorField.basis((0, 0, 12), 2)
                + VectorField.basis((0, 8, 8), 1)
                + VectorField.basis((4, 4, 4), 3))
    assert V == expected


def test_generators_n1():
    U, V = standard_generators(1)
    assert U == VectorField.basis((0,), 1)
    assert V == VectorField.basis((4,), 1)


def test_generators_reject_n0():
    with pytest.raises(ValueError):
        standard_generators(0)


def test_bracket_cube_identity():
    # [z1^3 d2, z2 d1] = z1^3 d1 - 3 z1^2 z2 d2
    got = lie_bracket(F("z1^3 d2", 2), F("z2 d1", 2))
    assert got == VectorField.basis((3, 0), 1) + VectorField.basis((2, 1), 2, -3)


def test_bracket_linear_identity():
    assert lie_bracket(F("z1 d3", 3), F("z3 d2", 3)) == F("z1 d2", 3)


def test_bracket_diagonal_power():
    # (2 - s) z^(s+1) with s = 3
    assert lie_bracket(F("z1^3 d1", 1), F("z1^2 d1", 1)) == F("-1 z1^4 d1", 1)


def test_bracket_self_is_zero():
    _, V = standard_generators(3)
    assert lie_bracket(V, V).is_zero()


def test_bracket_dimension_mismatch():
    with pytest.raises(DimensionError):
        lie_bracket(VectorField.zero(2), VectorField.zero(3))


def test_apply_to_poly():
    U, V = standard_generators(2)
    z2 = Polynomial.var(2, 2)
    assert apply_to_poly(V, z2) == Polynomial.monomial((4, 4))
    assert apply_to_poly(U, z2) == Polynomial.constant(2, 1)
    assert apply_to_poly(V, Polynomial.constant(2, 7)).is_zero()
    with pytest.raises(DimensionError):
        apply_to_poly(V, Polynomial.var(3, 1))


def test_ad_iter_step1_n2():
    U, V = standard_generators(2)
    manual = V
    for _ in range(5):
        manual = lie_bracket(U, manual)
    assert ad_iter(U, V, 5) == manual == VectorField.basis((0, 3), 1, 6720)
    assert ad_iter(U, V, 0) == V


def test_ad_iter_d1_n2():
    _, V = standard_generators(2)
    d1 = VectorField.partial_field(2, 1)
    assert ad_iter(d1, V, 1) == VectorField.basis((3, 4), 2, 4)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_degree_kill(n):
    _, V = standard_generators(n)
    for k in range(1, n + 1):
        dk = VectorField.partial_field(n, k)
        if k >= 2:
            got = ad_iter(dk, V, 4 * k - 3)
            exps = tuple(4 * k if v > k else (3 if v == k else 0) for v in range(1, n + 1))
            want = VectorField.basis(exps, k - 1, Fraction(factorial(4 * k), 6))
        else:
            got = ad_iter(dk, V, 1)
            want = VectorField.basis((3,) + (4,) * (n - 1), n, 4)
        assert got.support() == [want.support()[0]]
        assert got == want


def _triple(n):
    return st.tuples(st.just(n), fields(n), fields(n), fields(n))


field_triples = st.integers(1, 4).flatmap(_triple)


@settings(max_examples=200, deadline=None)
@given(field_triples)
def test_antisymmetry_and_oracle(data):
    _, X, Y, _ = data
    b = lie_bracket(X, Y)
    assert b == -lie_bracket(Y, X)
    assert b == bracket_by_terms(X, Y)


@settings(max_examples=200, deadline=None)
@given(field_triples)
def test_jacobi(data):
    _, X, Y, Z = data
    total = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
             + lie_bracket(Z, lie_bracket(X, Y)))
    assert total.is_zero()


@settings(max_examples=200, deadline=None)
@given(field_triples, small_rationals, small_rationals)
def test_bilinearity(data, a, b):
    _, X, Y, Z = data
    assert lie_bracket(X * a + Y * b, Z) == lie_bracket(X, Z) * a + lie_bracket(Y, Z) * b


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(fields(n), fields(n), polynomials(n))))
def test_operator_consistency(data):
    X, Y, f = data
    lhs = apply_to_poly(lie_bracket(X, Y), f)
    assert lhs == X(Y(f)) - Y(X(f))
