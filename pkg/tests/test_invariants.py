import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pqc.conformal import (
    curvature_bar_closed_form,
    deform,
    derivative_data,
    torsion_forms_bar,
)
from pqc.invariants import (
    InconsistentTorsion,
    MissingJets,
    conformal_curvature,
    flatness_verdict,
    make_residual,
    pwr_tensor_alt,
    ricci_traces,
    torsion_forms,
    torsion_split,
    verify_pwr_properties,
    verify_structure_identities,
)
from pqc.tensor_core import (
    build_adapted_frame,
    casimir_project,
    first_pair_project,
    kulkarni_nomizu,
    trace_free,
)

seeds = st.integers(0, 2**32 - 1)


def random_torsion(n, seed):
    fr = build_adapted_frame(n)
    rng = np.random.default_rng(seed)
    N = 4 * n
    S = rng.normal(size=(N, N))
    tau = casimir_project(S + S.T, fr)[1]
    S = rng.normal(size=(N, N))
    mu = trace_free(casimir_project(S + S.T, fr)[0], fr)
    return fr, tau, mu


def random_curvature(fr, rng):
    N = fr.dim
    R = rng.normal(size=(N, N, N, N))
    R = R - R.transpose(1, 0, 2, 3)
    return R - R.transpose(0, 1, 3, 2)


@given(st.sampled_from([1, 2]), seeds)
def test_torsion_round_trip(n, seed):
    fr, tau, mu = random_torsion(n, seed)
    split = torsion_split(torsion_forms(tau, mu, fr), fr)
    assert np.allclose(split.tau, tau, atol=1e-12)
    assert np.allclose(split.mu, mu, atol=1e-12)


def test_zero_torsion():
    fr = build_adapted_frame(2)
    split = torsion_split(np.zeros((3, 8, 8)), fr)
    assert not split.tau.any() and not split.mu.any()


def test_inconsistent_torsion():
    fr = build_adapted_frame(1)
    forms = np.random.default_rng(0).normal(size=(3, 4, 4))
    with pytest.raises(InconsistentTorsion):
        torsion_split(forms, fr)


def test_zero_curvature_traces():
    pack = ricci_traces(np.zeros((8, 8, 8, 8)), build_adapted_frame(2))
    assert pack.Scal == 0 and not pack.Ric.any() and not pack.rho.any() and not pack.zeta.any()


@pytest.mark.parametrize("n", [1, 2])
def test_ricci_trace_loop_oracle(n):
    fr = build_adapted_frame(n)
    N = fr.dim
    for R in (kulkarni_nomizu(fr.g, fr.g), random_curvature(fr, np.random.default_rng(n))):
        Ric = np.zeros((N, N))
        for x in range(N):
            for y in range(N):
                for a in range(N):
                    # adapted frame: g is diagonal with entries +-1
                    Ric[x, y] += R[a, x, y, a] / fr.g[a, a]
        assert np.allclose(ricci_traces(R, fr).Ric, Ric, atol=1e-12)
    gg = ricci_traces(kulkarni_nomizu(fr.g, fr.g), fr)
    assert np.allclose(gg.Ric, -2 * (N - 1) * fr.g)


@pytest.mark.parametrize("n", [1, 2])
def test_pwr_assemblies_agree_on_synthetic_data(n):
    fr, tau, mu = random_torsion(n, 7)
    pack = ricci_traces(random_curvature(fr, np.random.default_rng(3)), fr)
    split = torsion_split(torsion_forms(tau, mu, fr), fr)
    res = verify_pwr_properties(pack, split, fr, geometric=False)
    assert [r.identity for r in res] == ["pwr_two_forms", "pwr_projectors"]
    assert all(r.passed for r in res), [r.as_dict() for r in res]
    cc = conformal_curvature(pack, split, fr)
    assert np.allclose(cc.PWR, pwr_tensor_alt(pack.R, tau, mu, pack.Scal, fr))


def test_projector_completeness():
    fr = build_adapted_frame(2)
    R = random_curvature(fr, np.random.default_rng(4))
    w, m1 = first_pair_project(R, fr)
    assert np.allclose(w + m1, R)
    w2, m2 = first_pair_project(w, fr)
    assert np.allclose(w2, w) and np.allclose(m2, 0, atol=1e-12)


def test_random_curvature_is_not_flat():
    fr = build_adapted_frame(1)
    R = random_curvature(fr, np.random.default_rng(5))
    flat, size = flatness_verdict(first_pair_project(R, fr)[0], R)
    assert not flat and size > 0


def test_missing_jets():
    fr = build_adapted_frame(1)
    pack = ricci_traces(np.zeros((4, 4, 4, 4)), fr)
    split = torsion_split(np.zeros((3, 4, 4)), fr)
    with pytest.raises(MissingJets):
        verify_structure_identities(pack, split, None, fr)


def test_residual_record():
    r = make_residual("x", "tag", [np.ones(3), -np.ones(3)], 1e-12)
    assert r.passed and r.max_residual == 0
    r = make_residual("x", "tag", [np.array([1.0]), np.array([-0.5])], 1e-3)
    assert not r.passed and r.scale == 1.0 and r.relative == 0.5
    assert set(r.as_dict()) >= {"identity", "tag", "max_residual", "scale", "pass"}


def test_deformed_identity_suite(deformation_case):
    h, pts = deformation_case
    for u in pts:
        d = deform(h, u)
        fr = d.bar_frame
        R = curvature_bar_closed_form(d)
        pack = ricci_traces(R, fr)
        split = torsion_split(torsion_forms_bar(d), fr)
        res = verify_pwr_properties(pack, split, fr)
        for pipeline in ("jets", "stencil"):
            res += verify_structure_identities(pack, split, derivative_data(d, pipeline), fr)
        bad = [r.as_dict() for r in res if not r.passed]
        assert not bad, bad
        cc = conformal_curvature(pack, split, fr)
        assert flatness_verdict(cc.W, R)[0]
