import numpy as np
import pytest
from conftest import factor, sample_points

from pqc.conformal import (
    DEFAULT_PAIRING,
    NonpositiveFactor,
    StencilOutOfDomain,
    calibrate_pairing,
    check_stencil,
    curvature_bar_closed_form,
    curvature_bar_direct,
    deform,
    derivative_data,
    reeb_connection_from_axioms,
    s_horizontal,
    scal_bar,
    verify_deformation_laws,
)
from pqc.invariants import ricci_traces
from pqc.jets import ScalarField
from pqc.tensor_core import EPS


def koszul_oracle(d):
    """Solve metric compatibility plus prescribed horizontal torsion for g(S_X Y, Z).

    S is the difference between the deformed connection and the flat one.
    Compatibility with g/2h gives A[x,y,z] + A[x,z,y] = -dh(x) g(y,z)/h, and
    the torsion 2 sum eps_s omega_bar_s xi_bar_s of the deformed structure,
    compared with the flat one, fixes the antisymmetrization in (x, y).
    """
    jd = d.jets
    fr = jd.frame
    N = fr.dim
    h, dh = jd.value, jd.dh
    P = -np.einsum("x,yz->xyz", dh, fr.g) / h
    Q = sum(EPS[s] * np.einsum("xy,z->xyz", fr.omega[s], jd.dh_I(s)) for s in range(3)) / h
    rows, rhs = [], []
    idx = lambda x, y, z: (x * N + y) * N + z
    for x in range(N):
        for y in range(N):
            for z in range(N):
                r = np.zeros(N**3)
                r[idx(x, y, z)] += 1
                r[idx(x, z, y)] += 1
                rows.append(r)
                rhs.append(P[x, y, z])
                r = np.zeros(N**3)
                r[idx(x, y, z)] += 1
                r[idx(y, x, z)] -= 1
                rows.append(r)
                rhs.append(Q[x, y, z])
    return np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0].reshape(N, N, N)


def test_horizontal_connection_matches_koszul(deformation_case):
    h, pts = deformation_case
    d = deform(h, pts[0])
    A = koszul_oracle(d)
    assert np.max(np.abs(A - d.s_h)) < 1e-10 * (1 + np.max(np.abs(A)))
    assert s_horizontal(d, 0, 1, 2) == d.s_h[0, 1, 2]


def test_vertical_connection_matches_axioms(deformation_case):
    h, pts = deformation_case
    d = deform(h, pts[0])
    Gam, _ = reeb_connection_from_axioms(d.jets)
    for s in range(3):
        low = Gam[s].T @ d.frame.g
        assert np.max(np.abs(low - d.s_v[s])) < 1e-10 * (1 + np.max(np.abs(low)))


def test_nonpositive_factor():
    h = ScalarField.from_terms(1, [(-1, "1"), (1, "t1^2")])
    with pytest.raises(NonpositiveFactor):
        deform(h, np.zeros(7))


def test_stencil_out_of_domain():
    # h = t1 is barely positive at t1 = 1e-4; the stencil crosses zero
    h = ScalarField.from_terms(1, [(1, "t1")])
    u = np.zeros(7)
    u[0] = 1e-4
    deform(h, u)
    with pytest.raises(StencilOutOfDomain):
        check_stencil(h, u)
    assert issubclass(StencilOutOfDomain, NonpositiveFactor)


def test_calibration_selects_gbar(deformation_case):
    h, pts = deformation_case
    d = deform(h, pts[0])
    best, errs = calibrate_pairing(d)
    assert best == DEFAULT_PAIRING == "gbar"
    assert errs["gbar"] < 1e-6 < errs["g"]


def test_closed_form_vs_direct(deformation_case):
    h, pts = deformation_case
    for u in pts:
        d = deform(h, u)
        direct = curvature_bar_direct(d)
        closed = curvature_bar_closed_form(d)
        assert np.max(np.abs(closed - direct)) < 1e-6 * np.max(np.abs(direct))


def test_scal_bar_worked_example():
    h = ScalarField.from_terms(1, [(1, "1"), (1, "t1^2")])
    d = deform(h, np.zeros(7))
    assert abs(scal_bar(d) - 48.0) < 1e-8
    pack = ricci_traces(curvature_bar_closed_form(d), d.bar_frame)
    assert abs(pack.Scal - 48.0) < 1e-8


def test_constant_factor_is_flat():
    h = ScalarField.from_terms(2, [(1.5, "1")])
    d = deform(h, np.full(11, 0.3))
    assert not np.any(curvature_bar_closed_form(d))
    assert scal_bar(d) == 0
    tau, mu = d.tau_mu
    assert not tau.any() and not mu.any()


def test_deformation_laws(deformation_case):
    h, pts = deformation_case
    for u in pts:
        d = deform(h, u)
        res = verify_deformation_laws(d, curvature_bar_closed_form(d))
        bad = [r.as_dict() for r in res if not r.passed]
        assert not bad, bad
        names = {r.identity for r in res}
        assert ("mu_vanishes_n1" in names) == (h.n == 1)


def test_derivative_pipelines_agree():
    h = factor(2, 1)
    d = deform(h, sample_points(h, 1, seed=5)[0])
    a, b = derivative_data(d, "jets"), derivative_data(d, "stencil")
    for x, y in ((a.dtau, b.dtau), (a.dmu, b.dmu), (a.dscal, b.dscal)):
        assert np.max(np.abs(x - y)) < 1e-8 * (1 + np.max(np.abs(x)))
    with pytest.raises(ValueError):
        derivative_data(d, "bogus")
