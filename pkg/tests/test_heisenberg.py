import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pqc.heisenberg import (
    FlatStructure,
    ModelPoint,
    bracket,
    contact_forms_at,
    frame_connection_curvature,
    frame_fields,
    frame_fields_at,
    group_mul,
    model_verify,
)
from pqc.jets import frame_field_table

coords = st.lists(st.floats(-2, 2, allow_nan=False), min_size=7, max_size=7)


@pytest.mark.parametrize("n", [1, 2])
def test_model_residuals_vanish(n):
    res = model_verify(n, points=3, seed=n)
    assert max(res.values()) < 1e-12, res


@given(coords, coords, coords)
def test_group_law_associative(a, b, c):
    A, B, C = (ModelPoint.from_array(np.array(v)) for v in (a, b, c))
    lhs = group_mul(group_mul(A, B), C).as_array()
    rhs = group_mul(A, group_mul(B, C)).as_array()
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_origin_is_identity():
    u = np.random.default_rng(0).uniform(-1, 1, 11)
    p = ModelPoint.from_array(u)
    assert np.allclose(group_mul(ModelPoint.origin(2), p).as_array(), u)


@given(coords)
def test_frame_is_left_invariant(u):
    # the differential of left translation maps the frame at 0 to the frame at u
    u = np.array(u)
    F0 = frame_fields_at(np.zeros(7))
    eps = 1e-6
    for a in range(7):
        plus = group_mul(ModelPoint.from_array(u), ModelPoint.from_array(eps * F0[a])).as_array()
        minus = group_mul(ModelPoint.from_array(u), ModelPoint.from_array(-eps * F0[a])).as_array()
        assert np.allclose((plus - minus) / (2 * eps), frame_fields_at(u)[a], atol=1e-6)


def test_contact_forms_match_real_coordinates():
    # Theta_3 = dx/2 - x1 dt1 + t1 dx1 - z1 dy1 + y1 dz1 and cyclic
    t1, x1, y1, z1 = 0.3, -0.7, 0.2, 1.1
    th = contact_forms_at(np.array([t1, x1, y1, z1, 0.5, 0.1, -0.2]))
    assert np.allclose(th[2], [-x1, t1, -z1, y1, 0.5, 0, 0])
    assert np.allclose(th[0], [-y1, -z1, t1, x1, 0, 0.5, 0])
    assert np.allclose(th[1], [-z1, y1, -x1, t1, 0, 0, 0.5])


def test_sign_flipped_frame_is_rejected():
    # X_1 with the signs of its vertical part flipped:
    # d_x1 + 2 t1 d_x - 2 z1 d_y + 2 y1 d_z
    table = list(frame_field_table(1))
    table[3] = ((1, 1.0, None), (4, 2.0, 0), (5, -2.0, 3), (6, 2.0, 2))
    res = model_verify(1, points=2, table=tuple(table))
    assert res["[X,Y]_V = 2 sum eps_s omega_s(X,Y) xi_s"] > 1.0


def test_reeb_fields_central():
    fields = frame_fields(1)
    u = np.random.default_rng(1).uniform(-1, 1, 7)
    for s in range(4, 7):
        for a in range(7):
            assert np.allclose(bracket(fields[s], fields[a]).at(u), 0)


def test_flat_connection_curvature_vanishes():
    u = np.random.default_rng(2).uniform(-1, 1, 11)
    assert np.max(np.abs(frame_connection_curvature(u))) < 1e-12


def test_torsion_horizontal_matches_brackets():
    st_ = FlatStructure.build(1)
    fields = frame_fields(1)
    u = np.zeros(7)
    xi = frame_fields_at(u)[4:]
    T = st_.torsion_horizontal()
    for a in range(4):
        for b in range(4):
            br = bracket(fields[a], fields[b]).at(u)
            # T(X, Y) = -[X, Y] for the frame-parallel connection
            assert np.allclose(-br, np.einsum("s,sk->k", T[:, a, b], xi))
