import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pqc import paraquat as pq
from pqc.paraquat import ONE, R1, R2, R3, ParaQuaternion, ZeroNorm

coef = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
pqs = st.builds(ParaQuaternion, coef, coef, coef, coef)


def close(a, b, tol=1e-9):
    return max(abs(x) for x in a - b) <= tol * (1 + max(abs(x) for x in a) + max(abs(x) for x in b))


def test_unit_products_table():
    assert R1 * R1 == ONE and R2 * R2 == ONE and R3 * R3 == -ONE
    assert R1 * R2 == R3 and R2 * R1 == -R3
    assert R2 * R3 == -R1 and R3 * R2 == R1
    assert R3 * R1 == -R2 and R1 * R3 == R2


def test_norm_signature():
    p = ParaQuaternion(1.0, 2.0, 3.0, 4.0)
    assert p.norm2() == 1 + 4 - 9 - 16


@given(pqs, pqs)
def test_norm_multiplicative(p, q):
    scale = (p.as_array() @ p.as_array()) * (q.as_array() @ q.as_array())
    assert abs((p * q).norm2() - p.norm2() * q.norm2()) <= 1e-12 * (1 + scale)


@given(pqs, pqs, pqs)
def test_associative(p, q, r):
    assert close((p * q) * r, p * (q * r))


@given(pqs, pqs)
def test_conjugation_reverses_products(p, q):
    assert close((p * q).conj(), q.conj() * p.conj())


@given(pqs)
def test_p_times_conj_is_norm(p):
    assert close(p * p.conj(), ParaQuaternion(p.norm2()))
    assert p.re() == p.t and p.im().t == 0


@given(pqs)
def test_inverse(p):
    if abs(p.norm2()) < 1e-3:
        return
    assert close(p * p.inv(), ONE, 1e-9)
    assert close(p.inv() * p, ONE, 1e-9)


def test_zero_divisor_inverse_raises():
    null = ParaQuaternion(1.0, 0.0, 1.0, 0.0)  # 1 + r1, norm2 = 0
    assert null.norm2() == 0
    with pytest.raises(ZeroNorm):
        null.inv()
    with pytest.raises(ZeroNorm):
        pq.inv(ParaQuaternion())


@given(pqs, pqs)
def test_left_and_right_matrices(p, q):
    assert np.allclose(pq.left_matrix(p) @ q.as_array(), (p * q).as_array(), atol=1e-9)
    assert np.allclose(pq.right_matrix(q) @ p.as_array(), (p * q).as_array(), atol=1e-9)


def test_module_functions_agree_with_methods():
    p, q = ParaQuaternion(1, 2, -1, 0.5), ParaQuaternion(-0.3, 0.1, 2, 1)
    assert pq.mul(p, q) == p * q
    assert pq.conj(p) == p.conj()
    assert pq.norm2(p) == p.norm2()
    assert pq.re(p) == p.re() and pq.im(p) == p.im()
