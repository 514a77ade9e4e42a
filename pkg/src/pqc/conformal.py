"""Conformal deformations ``eta_bar = eta / (2h)`` of the flat model.

All deformed quantities are expressed in the ORIGINAL left-invariant frame;
the deformed metric is carried explicitly as ``g / (2h)``.  Formula-level
functions take a :class:`~pqc.jets.GradientData` and are written so that
they also work for complex-valued jets (complex-step differentiation).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from pqc.heisenberg import ModelPoint, group_mul
from pqc.invariants import DerivativeData, make_residual, ricci_traces, torsion_forms
from pqc.jets import (
    ADAPTED_TO_COMPONENT,
    GradientData,
    ScalarField,
    gradient_data,
    gradient_data_derivative,
)
from pqc.tensor_core import (
    CYCLIC,
    EPS,
    PqcFrame,
    apply_both,
    apply_first,
    apply_second,
    casimir_project,
    kulkarni_nomizu,
    signed_trace,
    signed_trace_pair,
)

__all__ = [
    "DEFAULT_PAIRING",
    "PAIRINGS",
    "DeformationData",
    "NonpositiveFactor",
    "StencilOutOfDomain",
    "calibrate_pairing",
    "check_stencil",
    "curvature_bar_closed_form",
    "curvature_bar_direct",
    "deform",
    "deformed_torsion",
    "derivative_data",
    "flow_point",
    "m_tensor",
    "reeb_connection_from_axioms",
    "s_horizontal",
    "s_vertical",
    "scal_bar",
    "torsion_forms_bar",
    "verify_deformation_laws",
]


class NonpositiveFactor(ValueError):
    """The conformal factor is not positive where it is evaluated."""


class StencilOutOfDomain(NonpositiveFactor):
    """A finite-difference stencil point has ``h <= 0``."""


def _check_positive(jd: GradientData):
    if not np.real(jd.value) > 0:
        raise NonpositiveFactor(f"h = {jd.value!r} is not positive")


# -- formula layer (GradientData -> arrays) ---------------------------------

def s_horizontal_tensor(jd: GradientData) -> np.ndarray:
    """``A[x, y, z] = g(S_X Y, Z)`` for the horizontal part of ``S``."""
    fr = jd.frame
    g, om = fr.g, fr.omega
    h, dh = jd.value, jd.dh
    dhI = np.stack([jd.dh_I(s) for s in range(3)])  # dhI[s, b] = dh(I_s e_b)
    t = (
        np.einsum("x,yz->xyz", dh, g)
        + np.einsum("s,sx,syz->xyz", EPS, dhI, om)
        + np.einsum("y,zx->xyz", dh, g)
        - np.einsum("s,sy,szx->xyz", EPS, dhI, om)
        - np.einsum("z,xy->xyz", dh, g)
        - np.einsum("s,sz,sxy->xyz", EPS, dhI, om)
    )
    return -t / (2.0 * h)


def s_vertical_tensor(jd: GradientData) -> np.ndarray:
    """``B[i, x, y] = g(S_{xi_bar_i} X, Y)``."""
    fr = jd.frame
    n = fr.n
    I, om = fr.I, fr.omega
    h, dh, H = jd.value, jd.dh, jd.hess
    dhI = [jd.dh_I(s) for s in range(3)]
    lap, gn2 = jd.laplacian, jd.grad_norm2
    out = []
    for i in range(3):
        j, k = next(c for c in CYCLIC if c[0] == i)[1:]
        e = EPS[i]
        t1 = 0.25 * (
            apply_second(H, I[i]) - apply_first(H, I[i])
            - e * apply_both(H, I[j], I[k]) + e * apply_both(H, I[k], I[j])
        )
        t2 = (
            e * np.outer(dhI[k], dhI[j]) - e * np.outer(dhI[j], dhI[k])
            - np.outer(dhI[i], dh) + np.outer(dh, dhI[i])
        ) / (2.0 * h)
        t3 = (-lap + 2.0 * gn2 / h) / (4.0 * n) * om[i] + e * jd.dxi[k] * om[j] - e * jd.dxi[j] * om[k]
        out.append(t1 + t2 + t3)
    return np.stack(out)


def hessian_sym_minus(jd: GradientData) -> np.ndarray:
    """``[hess h]_{[sym][-1]}`` (explicit form)."""
    fr = jd.frame
    H = jd.hess
    acc = 3.0 * H
    for s in range(3):
        acc = acc + EPS[s] * apply_both(H, fr.I[s]) - 4.0 * EPS[s] * jd.dxi[s] * fr.omega[s]
    return acc / 4.0


def hessian_three_zero(jd: GradientData) -> np.ndarray:
    """``[hess h - 2 h^-1 dh (x) dh]_{[3][0]}`` (explicit form)."""
    fr = jd.frame
    H, dh, h = jd.hess, jd.dh, jd.value
    acc = H.copy()
    dd = np.outer(dh, dh)
    for s in range(3):
        acc = acc - EPS[s] * apply_both(H, fr.I[s])
        dhI = jd.dh_I(s)
        dd = dd - EPS[s] * np.outer(dhI, dhI)
    acc = (acc - 2.0 / h * dd) / 4.0
    return acc - (jd.laplacian - 2.0 / h * jd.grad_norm2) / (4.0 * fr.n) * fr.g


def tau_mu_bar(jd: GradientData) -> tuple[np.ndarray, np.ndarray]:
    h = jd.value
    return hessian_sym_minus(jd) / h, hessian_three_zero(jd) / (2.0 * h)


def m_tensor_of(jd: GradientData) -> np.ndarray:
    fr = jd.frame
    h, dh = jd.value, jd.dh
    dd = np.outer(dh, dh)
    for s in range(3):
        dhI = jd.dh_I(s)
        dd = dd - EPS[s] * np.outer(dhI, dhI)
    return (jd.hess - (dd + 0.5 * fr.g * jd.grad_norm2) / (2.0 * h)) / (2.0 * h)


def scal_bar_of(jd: GradientData, scal: float = 0.0):
    n = jd.frame.n
    h = jd.value
    return 2.0 * h * scal - 8.0 * (n + 2) ** 2 / h * jd.grad_norm2 + 8.0 * (n + 2) * jd.laplacian


def connection_coefficients(jd: GradientData) -> tuple[np.ndarray, np.ndarray]:
    """Frame components of the deformed connection on horizontal fields.

    Returns ``(G, X)`` with ``G[x, y, :]`` the components of
    ``nabla_bar_{e_x} e_y = S_{e_x} e_y`` and ``X[s, z, :]`` those of
    ``nabla_bar_{xi_s} e_z = (2h)^-1 (S_{xi_bar_s} - S_{I_s grad h}) e_z``.
    """
    fr = jd.frame
    G = s_horizontal_tensor(jd) @ fr.ginv
    Gv = s_vertical_tensor(jd) @ fr.ginv
    grad = jd.grad
    Xs = np.stack([
        (Gv[s] - np.einsum("c,czd->zd", fr.I[s] @ grad, G)) / (2.0 * jd.value) for s in range(3)
    ])
    return G, Xs


def closed_form_kernel(jd: GradientData) -> np.ndarray:
    """Right-hand side of the curvature transformation law for a flat base, in terms of M."""
    fr = jd.frame
    n = fr.n
    g, I, om = fr.g, fr.I, fr.omega
    M = m_tensor_of(jd)
    trM = signed_trace(M, fr)
    Ms = [signed_trace_pair(M, fr, s) for s in range(3)]
    K = -kulkarni_nomizu(g, M)
    for s in range(3):
        IsM = -apply_second(M, I[s])
        K = K + EPS[s] * kulkarni_nomizu(om[s], IsM)
    for i, j, k in CYCLIC:
        e = EPS[i]
        bracket = (
            apply_second(M, I[i]) - apply_first(M, I[i])
            - e * apply_both(M, I[j], I[k]) + e * apply_both(M, I[k], I[j])
        )
        K = K - 0.5 * e * np.einsum("xy,zv->xyzv", om[i], bracket)
    K = K - np.einsum("zv,xy->xyzv", g, M - M.T)
    for s in range(3):
        MI = apply_second(M, I[s])  # M(X, I_s Y)
        K = K - EPS[s] * np.einsum("zv,xy->xyzv", om[s], MI - MI.T)
    for s in range(3):
        K = K + trM / (2.0 * n) * EPS[s] * np.einsum("xy,zv->xyzv", om[s], om[s])
    for i, j, k in CYCLIC:
        K = K + Ms[i] / (2.0 * n) * (
            np.einsum("xy,zv->xyzv", om[j], om[k]) - np.einsum("xy,zv->xyzv", om[k], om[j])
        )
    return K


def flow_point(u, a: int, s: float, n: int) -> np.ndarray:
    """``u o (s v_a, 0)``: the time-``s`` flow of the left-invariant field ``e_a``."""
    v = np.zeros(4 * n + 3)
    v[4 * (a // 4) + ADAPTED_TO_COMPONENT[a % 4]] = s
    return group_mul(ModelPoint.from_array(u), ModelPoint.from_array(v)).as_array()


# -- first-principles construction of the vertical connection ----------------

def _sp_projection(A: np.ndarray, fr: PqcFrame) -> np.ndarray:
    """Projection of an endomorphism onto sp(n, R) + sp(1, R)."""
    N = fr.dim
    skew = 0.5 * (A - fr.ginv @ A.T @ fr.g)
    comm = skew
    for s in range(3):
        comm = 0.5 * (comm + EPS[s] * fr.I[s] @ comm @ fr.I[s])
    sp1 = sum(np.trace(skew @ fr.I[s]) / (N * EPS[s]) * fr.I[s] for s in range(3))
    return comm + sp1


def reeb_brackets(jd: GradientData) -> np.ndarray:
    """``A[s][:, b]``: horizontal part (along the new Reeb fields) of ``[xi_bar_s, e_b]``.

    Uses ``xi_bar_s = 2h xi_s + I_s grad h``, the central Reeb fields of the
    flat model and ``xi_s = (xi_bar_s - I_s grad h) / 2h``.
    """
    fr = jd.frame
    h, dh, H = jd.value, jd.dh, jd.hess
    f = [fr.I[s] @ jd.grad for s in range(3)]
    out = []
    for s in range(3):
        A = np.outer(f[s], dh) / h
        for t in range(3):
            A = A - EPS[t] / h * np.outer(f[t], f[s] @ fr.omega[t])
        A = A - fr.I[s] @ fr.ginv @ H.T
        out.append(A)
    return np.stack(out)


def reeb_connection_from_axioms(jd: GradientData) -> tuple[np.ndarray, np.ndarray]:
    """Deformed connection along ``xi_bar_s`` and the torsion endomorphisms.

    The connection matrix is fixed by metric compatibility (its g-symmetric
    part is ``-dh(xi_s) Id``) and by the torsion ``T(xi_bar, .)|H`` being
    orthogonal to sp(n) + sp(1).  Returns ``(Gamma, T)``, endomorphism
    arrays of shape (3, N, N).
    """
    fr = jd.frame
    A = reeb_brackets(jd)
    eye = np.eye(fr.dim)
    Gam = np.stack([-jd.dxi[s] * eye + _sp_projection(A[s], fr) for s in range(3)])
    return Gam, Gam - A


# -- deformation data ---------------------------------------------------------

@dataclass(frozen=True)
class DeformationData:
    """Deformed structure ``eta / 2h`` of the flat model at one point."""

    h: ScalarField
    point: np.ndarray
    jets: GradientData

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def frame(self) -> PqcFrame:
        return self.jets.frame

    @cached_property
    def bar_frame(self) -> PqcFrame:
        """The deformed metric ``g / 2h`` with unchanged endomorphisms."""
        return self.frame.rescaled(1.0 / (2.0 * self.jets.value))

    @property
    def value(self) -> float:
        return float(self.jets.value)

    @cached_property
    def xi_bar(self) -> np.ndarray:
        """Coordinate components of ``xi_bar_s = 2h xi_s + I_s grad h``, shape (3, 4n+3)."""
        from pqc.heisenberg import frame_fields_at

        F = frame_fields_at(self.point)
        N = 4 * self.n
        return np.stack([
            2.0 * self.value * F[N + s] + (self.frame.I[s] @ self.jets.grad) @ F[:N] for s in range(3)
        ])

    @cached_property
    def s_h(self) -> np.ndarray:
        return s_horizontal_tensor(self.jets)

    @cached_property
    def s_v(self) -> np.ndarray:
        return s_vertical_tensor(self.jets)

    @cached_property
    def tau_mu(self) -> tuple[np.ndarray, np.ndarray]:
        return tau_mu_bar(self.jets)

    @cached_property
    def m(self) -> np.ndarray:
        return m_tensor_of(self.jets)

    @cached_property
    def scal(self) -> float:
        return float(scal_bar_of(self.jets))


def deform(h: ScalarField, point) -> DeformationData:
    """Deformation data of ``eta / 2h`` at ``point``; requires ``h(point) > 0``."""
    if isinstance(point, ModelPoint):
        point = point.as_array()
    point = np.asarray(point, dtype=float)
    jd = gradient_data(h, point)
    _check_positive(jd)
    return DeformationData(h, point, jd)


def s_horizontal(d: DeformationData, x: int, y: int, z: int) -> float:
    """``g(S_X Y, Z)`` for frame indices."""
    return float(d.s_h[x, y, z])


def s_vertical(d: DeformationData, i: int, x: int, y: int) -> float:
    """``g(S_{xi_bar_i} X, Y)``; ``i`` is 0-based."""
    return float(d.s_v[i, x, y])


def deformed_torsion(d: DeformationData) -> tuple[np.ndarray, np.ndarray]:
    """``(tau_bar, mu_bar)`` of a deformation of the flat model."""
    return d.tau_mu


def torsion_forms_bar(d: DeformationData) -> np.ndarray:
    """``T_bar(xi_bar_s, X, Y) = g_bar(T_bar_{xi_bar_s} X, Y)`` from the connection axioms."""
    _, T = reeb_connection_from_axioms(d.jets)
    gbar = d.bar_frame.g
    return np.stack([T[s].T @ gbar for s in range(3)])


def m_tensor(d: DeformationData) -> np.ndarray:
    return d.m


def scal_bar(d: DeformationData) -> float:
    """Deformed pqc scalar curvature from the sub-hyperbolic Yamabe law (flat base)."""
    return d.scal


#: pairing conventions for the (0,4) deformed curvature in the closed form:
#: "gbar" reads the left side as 2h*gbar(Rbar(X,Y)Z,V) (= g(Rbar(X,Y)Z,V)),
#: "g" reads it literally as 2h*g(Rbar(X,Y)Z,V).
PAIRINGS = {"gbar": 1, "g": 2}
DEFAULT_PAIRING = "gbar"


def curvature_bar_closed_form(d: DeformationData, pairing: str = DEFAULT_PAIRING) -> np.ndarray:
    """``gbar(Rbar(X,Y)Z, V)`` assembled from the M-tensor (flat base, R = 0)."""
    power = PAIRINGS[pairing]
    return closed_form_kernel(d.jets) / (2.0 * d.value) ** power


def _stencil_derivative(fun, u, a, n, step, h: ScalarField):
    def D(st):
        vals = {}
        for k in (-2, -1, 1, 2):
            up = flow_point(u, a, k * st, n)
            if not h(up) > 0:
                raise StencilOutOfDomain(f"h <= 0 at stencil point {up}")
            vals[k] = fun(up)
        return (-vals[2] + 8.0 * vals[1] - 8.0 * vals[-1] + vals[-2]) / (12.0 * st)

    # one Richardson level on the fourth-order central difference
    return (16.0 * D(step / 2.0) - D(step)) / 15.0


def check_stencil(h: ScalarField, point, step: float = 1e-3) -> None:
    """Raise :class:`StencilOutOfDomain` if a finite-difference stencil point has ``h <= 0``."""
    u = np.asarray(point, dtype=float)
    n = h.n
    st = step * max(1.0, float(np.max(np.abs(u))))
    for a in range(4 * n):
        for k in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0):
            up = flow_point(u, a, k * st, n)
            if not h(up) > 0:
                raise StencilOutOfDomain(f"h <= 0 at stencil point {up}")


def curvature_bar_direct(d: DeformationData, step: float = 1e-3) -> np.ndarray:
    """Deformed horizontal curvature from the connection, by finite differences.

    ``Rbar(X,Y)Z = X(S_Y Z) - Y(S_X Z) + S_X S_Y Z - S_Y S_X Z - nabla_bar_[X,Y] Z``
    on frame fields, with ``[X, Y] = 2 sum eps_s omega_s(X, Y) xi_s``; the
    frame derivatives of the coefficients are central differences along the
    flows of the frame fields.  Lowered with ``gbar``.
    """
    n, N = d.n, 4 * d.n
    u = d.point
    st = step * max(1.0, float(np.max(np.abs(u))))
    G, Xs = connection_coefficients(d.jets)

    def coeffs(up):
        return connection_coefficients(gradient_data(d.h, up))[0]

    dG = np.stack([_stencil_derivative(coeffs, u, a, n, st, d.h) for a in range(N)])
    Rup = dG - dG.transpose(1, 0, 2, 3)
    Rup = Rup + np.einsum("yzd,xde->xyze", G, G) - np.einsum("xzd,yde->xyze", G, G)
    for s in range(3):
        Rup = Rup - 2.0 * EPS[s] * np.einsum("xy,ze->xyze", d.frame.omega[s], Xs[s])
    return np.einsum("xyzd,dv->xyzv", Rup, d.bar_frame.g)


def calibrate_pairing(d: DeformationData, direct: np.ndarray | None = None) -> tuple[str, dict[str, float]]:
    """Pick the pairing convention that matches the direct curvature at one sample."""
    direct = curvature_bar_direct(d) if direct is None else direct
    scale = max(float(np.max(np.abs(direct))), 1e-300)
    errs = {p: float(np.max(np.abs(curvature_bar_closed_form(d, p) - direct))) / scale for p in PAIRINGS}
    return min(errs, key=errs.get), errs


# -- derivative data for the divergence identity -------------------------------

_CSTEP = 1e-30


def _torsion_scal(jd: GradientData):
    tau, mu = tau_mu_bar(jd)
    return tau, mu, scal_bar_of(jd)


def derivative_data(d: DeformationData, pipeline: str = "jets", step: float = 1e-3) -> DerivativeData:
    """Frame derivatives of ``tau_bar``, ``mu_bar`` and ``Scal_bar`` at the sample.

    ``pipeline="jets"`` differentiates the closed forms exactly with a
    complex step driven by the third-order jets of ``h``; ``"stencil"``
    re-evaluates them along the flows of the frame fields and takes central
    differences.
    """
    n, N = d.n, 4 * d.n
    dtau, dmu, dscal = [], [], []
    for a in range(N):
        if pipeline == "jets":
            jd = d.jets.perturbed(gradient_data_derivative(d.h, d.point, a), 1j * _CSTEP)
            t, m, s = _torsion_scal(jd)
            t, m, s = t.imag / _CSTEP, m.imag / _CSTEP, s.imag / _CSTEP
        elif pipeline == "stencil":
            st = step * max(1.0, float(np.max(np.abs(d.point))))

            def pack(up):
                return np.concatenate([x.ravel() for x in map(np.atleast_1d, _torsion_scal(gradient_data(d.h, up)))])

            flat = _stencil_derivative(pack, d.point, a, n, st, d.h)
            t, m, s = flat[: N * N].reshape(N, N), flat[N * N: 2 * N * N].reshape(N, N), flat[-1]
        else:
            raise ValueError(f"unknown pipeline {pipeline!r}")
        dtau.append(t)
        dmu.append(m)
        dscal.append(s)
    G, _ = connection_coefficients(d.jets)
    return DerivativeData(np.stack(dtau), np.stack(dmu), np.array(dscal, dtype=float), G)


def verify_deformation_laws(d: DeformationData, R: np.ndarray, tol: float = 1e-10, scal_tol: float = 1e-8) -> list:
    """Trace laws of the deformation against the curvature ``R = gbar(Rbar(X,Y)Z,V)``.

    Covers the traces of M, the Ricci and scalar transformation laws, the
    Yamabe law against the traced curvature, consistency of the closed-form
    torsion with the connection axioms and, for n = 1, vanishing of mu.
    """
    n = d.n
    jd, fr, bar = d.jets, d.frame, d.bar_frame
    h = d.value
    M = d.m
    trM = signed_trace(M, fr)
    out = [make_residual("trace_M", "qcw6", [trM, -(jd.laplacian - (n + 2) / h * jd.grad_norm2) / (2.0 * h)], tol)]
    Ms = np.array([signed_trace_pair(M, fr, s) for s in range(3)])
    out.append(make_residual("traces_M_s", "qcw6", [Ms, 2.0 * n / h * jd.dxi], tol))
    pack = ricci_traces(R, bar)
    Msym = 0.5 * (M + M.T)
    M3 = casimir_project(Msym, fr)[0]
    out.append(make_residual(
        "ricci_law", "qcwric",
        [pack.Ric, -4.0 * (n + 1) * Msym, -6.0 * M3, -(2 * n + 3) / (2.0 * n) * trM * fr.g], tol,
    ))
    out.append(make_residual("scal_law", "qcwric", [pack.Scal / (2.0 * h), -8.0 * (n + 2) * trM], tol))
    out.append(make_residual("yamabe_vs_trace", "pyam", [d.scal, -pack.Scal], scal_tol))
    tau, mu = d.tau_mu
    T = torsion_forms_bar(d)
    out.append(make_residual("torsion_closed_form", "defor", [T, -torsion_forms(tau, mu, bar)], tol))
    if n == 1:
        out.append(make_residual("mu_vanishes_n1", "propmu", [mu], tol, max(float(np.max(np.abs(tau))), 1e-300)))
    return out
