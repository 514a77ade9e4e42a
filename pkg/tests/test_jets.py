import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pqc.heisenberg import LISTING
from pqc.jets import (
    GradientData,
    Polynomial,
    ScalarField,
    UnknownCoordinate,
    UnknownField,
    coordinate_names,
    derive_along,
    gradient_data,
    gradient_data_derivative,
    parse_monomial,
    third_order,
)

T1, X1 = LISTING["T"], LISTING["X"]


def var(n, name):
    return ScalarField.from_terms(n, [(1.0, name)]).poly


def test_coordinate_names():
    assert coordinate_names(1) == ["t1", "x1", "y1", "z1", "x", "y", "z"]
    assert len(coordinate_names(2)) == 11


def test_parse_monomial():
    assert parse_monomial("t1^2*x2*y", 2) == (2, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0)
    assert parse_monomial("1", 1) == (0,) * 7
    with pytest.raises(UnknownCoordinate):
        parse_monomial("t3", 1)
    with pytest.raises(UnknownCoordinate):
        parse_monomial("q1", 1)


def test_derive_coordinate_dual():
    assert derive_along(var(1, "t1"), T1) == Polynomial.constant(7, 1.0)


def test_derive_x_along_T():
    assert derive_along(var(1, "x"), T1) == var(1, "x1") * 2.0


def test_unknown_field():
    with pytest.raises(UnknownField):
        derive_along(var(1, "x"), 7)
    with pytest.raises(UnknownField):
        derive_along(var(1, "x"), "xi4")


def test_reeb_fields():
    assert derive_along(var(1, "y"), "xi1") == Polynomial.constant(7, 2.0)
    assert derive_along(var(1, "z"), "xi2") == Polynomial.constant(7, 2.0)
    assert derive_along(var(1, "x"), "xi3") == Polynomial.constant(7, 2.0)


monomials = st.lists(
    st.tuples(st.floats(-3, 3, allow_nan=False), st.lists(st.integers(0, 2), min_size=7, max_size=7)),
    min_size=1, max_size=6,
)


@given(monomials)
def test_commutator_T_X_is_minus_4_dx(terms):
    # [X_1, T_1] = 2 xi_3 = 4 d_x, so T_1 X_1 f - X_1 T_1 f = -4 df/dx
    f = Polynomial.from_terms(7, terms)
    lhs = derive_along(derive_along(f, X1), T1) - derive_along(derive_along(f, T1), X1)
    diff = lhs - f.diff(4) * -4.0
    assert all(abs(c) < 1e-9 * (1 + max(abs(v) for v in f.terms.values())) for c in diff.terms.values())


@given(monomials, st.lists(st.floats(-1, 1), min_size=7, max_size=7))
def test_frame_derivative_matches_directional_difference(terms, u):
    # oracle: central difference along the field's coordinate vector
    from pqc.heisenberg import frame_fields_at

    f = Polynomial.from_terms(7, terms)
    u = np.array(u)
    F = frame_fields_at(u)
    for a in range(7):
        eps = 1e-5
        fd = (f(u + eps * F[a]) - f(u - eps * F[a])) / (2 * eps)
        assert abs(derive_along(f, a)(u) - fd) < 1e-6 * (1 + abs(fd))


def test_gradient_data_worked_example():
    h = ScalarField.from_terms(1, [(1, "1"), (1, "t1^2")])
    jd = gradient_data(h, np.zeros(7))
    assert np.all(jd.dh == 0) and np.all(jd.dxi == 0)
    assert jd.hess[T1, T1] == 2
    assert jd.laplacian == 2 and jd.grad_norm2 == 0


def test_constant_factor():
    h = ScalarField.from_terms(2, [(5, "1")])
    jd = gradient_data(h, np.random.default_rng(0).uniform(-1, 1, 11))
    assert jd.value == 5
    assert not jd.dh.any() and not jd.dxi.any() and not jd.hess.any() and jd.laplacian == 0


def test_third_order():
    h = ScalarField.from_terms(1, [(1, "t1^3")])
    assert third_order(h, np.zeros(7), 0, 0, 0) == 6
    lin = ScalarField.from_terms(1, [(1, "t1"), (2, "x"), (-1, "y1")])
    u = np.random.default_rng(1).uniform(-1, 1, 7)
    assert third_order(lin, u, 1, 2, 3) == 0


def test_gradient_data_derivative_is_frame_derivative():
    h = ScalarField.from_terms(1, [(1, "t1^2*x1"), (0.5, "y1*z"), (1, "x^2")])
    u = np.random.default_rng(2).uniform(-1, 1, 7)
    from pqc.conformal import flow_point

    for a in range(4):
        d = gradient_data_derivative(h, u, a)
        eps = 1e-5
        hi, lo = gradient_data(h, flow_point(u, a, eps, 1)), gradient_data(h, flow_point(u, a, -eps, 1))
        assert np.allclose(d.hess, (hi.hess - lo.hess) / (2 * eps), atol=1e-6)
        assert np.allclose(d.dh, (hi.dh - lo.dh) / (2 * eps), atol=1e-6)


def test_grad_uses_signed_metric():
    h = ScalarField.from_terms(1, [(1, "t1"), (1, "y1")])
    jd = gradient_data(h, np.zeros(7))
    assert isinstance(jd, GradientData)
    assert np.isclose(jd.grad @ jd.frame.g @ jd.grad, jd.grad_norm2)
