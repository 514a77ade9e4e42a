import numpy as np
import pytest

from pqc.cayley import (
    NotTangent,
    OnSingularLocus,
    SpherePoint,
    TangentVector,
    cayley_differential,
    cayley_forward,
    cayley_inverse,
    eta_sphere_at,
    sample_sphere_point,
    sample_tangent,
    verify_cayley_identity,
)
from pqc.paraquat import ONE, R1, R3, ParaQuaternion, ZeroNorm


def flat(q, p):
    return np.concatenate([x.as_array() for x in (*q, p)])


@pytest.mark.parametrize("n", [1, 2])
def test_identity_on_random_points(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        pt = sample_sphere_point(rng, n)
        assert abs(pt.constraint()) < 1e-12
        v = sample_tangent(rng, pt)
        res, scale = verify_cayley_identity(pt, v)
        assert res < 1e-8 * scale


def test_base_point():
    pt = SpherePoint.base(1)
    v = TangentVector((ParaQuaternion(),), R3)
    assert eta_sphere_at(pt, v) == -2.0 * R3
    q, p = cayley_forward(pt)
    assert all(x == ParaQuaternion() for x in q) and p == ParaQuaternion()
    res, _ = verify_cayley_identity(pt, v)
    assert res < 1e-15


@pytest.mark.parametrize("n", [1, 2])
def test_round_trip(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(20):
        pt = sample_sphere_point(rng, n)
        back = cayley_inverse(*cayley_forward(pt))
        assert np.allclose(flat(back.q, back.p), flat(pt.q, pt.p), atol=1e-10)


def test_image_hypersurface():
    rng = np.random.default_rng(3)
    for _ in range(10):
        q, p = cayley_forward(sample_sphere_point(rng, 2))
        assert abs(p.re() + sum(x.norm2() for x in q)) < 1e-10


def test_singular_locus():
    with pytest.raises(OnSingularLocus):
        cayley_forward(SpherePoint((ParaQuaternion(),), ONE))
    # p - 1 null but nonzero
    a = 0.3
    pt = SpherePoint((ParaQuaternion(),), ONE + a * (ONE + R1))
    with pytest.raises(ZeroNorm):
        cayley_forward(pt)


def test_near_singular_is_admissible():
    e = 1e-3
    pt = SpherePoint((e * ONE,), ONE + e * R1)
    assert abs(pt.constraint()) < 1e-15
    cayley_forward(pt)
    v = sample_tangent(np.random.default_rng(0), pt)
    res, scale = verify_cayley_identity(pt, v)
    assert res < 1e-8 * scale


def test_not_tangent():
    pt = SpherePoint.base(1)
    with pytest.raises(NotTangent):
        eta_sphere_at(pt, TangentVector((ParaQuaternion(),), ONE))


def test_differential_matches_difference_quotient():
    rng = np.random.default_rng(4)
    pt = sample_sphere_point(rng, 2)
    v = sample_tangent(rng, pt)
    dq, dp = cayley_differential(pt, v)
    e = 1e-6

    def shifted(s):
        return SpherePoint(tuple(q + s * d for q, d in zip(pt.q, v.dq)), pt.p + s * v.dp)

    plus, minus = cayley_forward(shifted(e)), cayley_forward(shifted(-e))
    fd = (flat(*plus) - flat(*minus)) / (2 * e)
    assert np.allclose(flat(dq, dp), fd, atol=1e-6)


def test_linearity():
    rng = np.random.default_rng(5)
    pt = sample_sphere_point(rng, 1)
    v, w = sample_tangent(rng, pt), sample_tangent(rng, pt)
    vw = TangentVector(tuple(a + 2.0 * b for a, b in zip(v.dq, w.dq)), v.dp + 2.0 * w.dp)
    lhs = eta_sphere_at(pt, vw)
    assert lhs.isclose(eta_sphere_at(pt, v) + 2.0 * eta_sphere_at(pt, w))
    d_vw = flat(*cayley_differential(pt, vw))
    assert np.allclose(d_vw, flat(*cayley_differential(pt, v)) + 2.0 * flat(*cayley_differential(pt, w)))
    assert np.allclose(flat(*cayley_differential(pt, v.scaled(3.0))), 3.0 * flat(*cayley_differential(pt, v)))
