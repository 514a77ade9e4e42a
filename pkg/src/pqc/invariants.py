"""Ricci-type traces, the L-tensor, PWR and W^pqc, plus the identity suite.

All tensors live on the horizontal space in the frame of a :class:`PqcFrame`;
(0,4) tensors are stored as ``R[x, y, z, v] = R(e_x, e_y, e_z, e_v)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pqc.tensor_core import (
    CYCLIC,
    EPS,
    PqcFrame,
    apply_both,
    apply_first,
    apply_second,
    casimir_project,
    first_pair_project,
    kulkarni_nomizu,
    signed_trace,
    trace_free,
)

__all__ = [
    "ConformalCurvature",
    "CurvaturePack",
    "DerivativeData",
    "InconsistentTorsion",
    "MissingJets",
    "Residual",
    "TorsionSplit",
    "conformal_curvature",
    "flatness_verdict",
    "l_tensor",
    "make_residual",
    "pwr_tensor",
    "pwr_tensor_alt",
    "ricci_traces",
    "torsion_forms",
    "torsion_split",
    "verify_pwr_properties",
    "verify_structure_identities",
    "wpqc_explicit",
    "wpqc_tensor",
]


class InconsistentTorsion(ValueError):
    """The three candidates for mu extracted from the torsion disagree."""


class MissingJets(ValueError):
    """Derivative data needed by the divergence identity was not supplied."""


@dataclass(frozen=True)
class Residual:
    """One checked identity: ``max|lhs - rhs|`` against the size of its summands."""

    identity: str
    tag: str
    max_residual: float
    scale: float
    tol: float

    @property
    def relative(self) -> float:
        return self.max_residual / self.scale if self.scale > 0 else self.max_residual

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol * self.scale or self.max_residual == 0.0)

    def as_dict(self) -> dict:
        return {
            "identity": self.identity,
            "tag": self.tag,
            "max_residual": self.max_residual,
            "scale": self.scale,
            "pass": self.passed,
        }


def make_residual(identity: str, tag: str, terms, tol: float, scale: float | None = None) -> Residual:
    """Record for ``sum(terms) == 0``; the scale defaults to the largest summand."""
    terms = [np.asarray(t) for t in terms]
    total = sum(terms)
    if scale is None:
        scale = max(_maxabs(t) for t in terms)
    return Residual(identity, tag, float(np.max(np.abs(total))), scale, tol)


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


# -- data types ---------------------------------------------------------------

@dataclass(frozen=True)
class CurvaturePack:
    R: np.ndarray
    Ric: np.ndarray
    Scal: float
    rho: np.ndarray
    varrho: np.ndarray
    zeta: np.ndarray


@dataclass(frozen=True)
class TorsionSplit:
    tau: np.ndarray
    mu: np.ndarray
    forms: np.ndarray
    mu_spread: float = 0.0
    tau_asymmetry: float = 0.0


@dataclass(frozen=True)
class ConformalCurvature:
    L: np.ndarray
    L0: np.ndarray
    PWR: np.ndarray
    W: np.ndarray
    L_discrepancy: float = 0.0


@dataclass(frozen=True)
class DerivativeData:
    """Frame derivatives needed by the divergence identity.

    ``dtau[a, b, c] = e_a(tau(e_b, e_c))`` (likewise ``dmu``),
    ``dscal[a] = e_a(Scal)`` and ``G[x, y, d]`` the components of
    ``nabla_{e_x} e_y``.
    """

    dtau: np.ndarray
    dmu: np.ndarray
    dscal: np.ndarray
    G: np.ndarray


# -- torsion ------------------------------------------------------------------

def torsion_forms(tau: np.ndarray, mu: np.ndarray, frame: PqcFrame) -> np.ndarray:
    """``T(xi_s, X, Y) = -1/4 [tau(I_s X, Y) + tau(X, I_s Y)] + mu(I_s X, Y)``."""
    return np.stack([
        -0.25 * (apply_first(tau, I) + apply_second(tau, I)) + apply_first(mu, I) for I in frame.I
    ])


def torsion_split(forms: np.ndarray, frame: PqcFrame, tol: float = 1e-8) -> TorsionSplit:
    """Recover ``(tau, mu)`` from the torsion forms ``T(xi_s, ., .)``."""
    forms = np.asarray(forms)
    sym = 0.5 * (forms + forms.transpose(0, 2, 1))
    skew = forms - sym
    tau = -sum(EPS[s] * apply_first(sym[s], frame.I[s]) for s in range(3))
    tau_sym = 0.5 * (tau + tau.T)
    cands = np.stack([EPS[s] * apply_first(skew[s], frame.I[s]) for s in range(3)])
    mu = cands.mean(axis=0)
    spread = float(np.max(np.abs(cands - mu)))
    scale = max(1.0, float(np.max(np.abs(forms))))
    if spread > tol * scale:
        raise InconsistentTorsion(f"mu candidates spread {spread:.3e}")
    return TorsionSplit(tau_sym, 0.5 * (mu + mu.T), forms, spread, float(np.max(np.abs(tau - tau_sym))))


# -- traces -------------------------------------------------------------------

def ricci_traces(R: np.ndarray, frame: PqcFrame) -> CurvaturePack:
    gi = frame.ginv
    N = frame.dim
    Ric = np.einsum("ab,axyb->xy", gi, R)
    Scal = float(signed_trace(Ric, frame))
    rho = np.stack([np.einsum("ab,xyac,cb->xy", gi, R, I) for I in frame.I]) / N
    varrho = np.stack([np.einsum("ab,acxy,cb->xy", gi, R, I) for I in frame.I]) / N
    zeta = np.stack([np.einsum("ab,axyc,cb->xy", gi, R, I) for I in frame.I]) / N
    return CurvaturePack(R, Ric, Scal, rho, varrho, zeta)


# -- L, PWR, W ----------------------------------------------------------------

def l_tensor(pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame) -> tuple[np.ndarray, np.ndarray, float]:
    """``(L, L0, discrepancy)``; the discrepancy compares with the Ricci route."""
    n = frame.n
    shift = pack.Scal / (32.0 * n * (n + 2)) * frame.g
    L0 = 0.5 * split.tau + split.mu
    ric3, ricm1 = casimir_project(pack.Ric, frame)
    L0_ric = ricm1 / (4.0 * (n + 1)) + trace_free(ric3, frame) / (2.0 * (2 * n + 5))
    return L0 + shift, L0, float(np.max(np.abs(L0_ric - L0)))


def _I_form(L: np.ndarray, I: np.ndarray) -> np.ndarray:
    """``(I L)(X, Y) = -L(X, I Y)``."""
    return -apply_second(L, I)


def _cyclic_bracket(L: np.ndarray, frame: PqcFrame, i: int) -> np.ndarray:
    """``L(Z, I_i V) - L(I_i Z, V) - eps_i L(I_j Z, I_k V) + eps_i L(I_k Z, I_j V)``."""
    _, j, k = CYCLIC[i]
    I = frame.I
    return (
        apply_second(L, I[i]) - apply_first(L, I[i])
        - EPS[i] * apply_both(L, I[j], I[k]) + EPS[i] * apply_both(L, I[k], I[j])
    )


def pwr_tensor(pack: CurvaturePack, L: np.ndarray, frame: PqcFrame) -> np.ndarray:
    n = frame.n
    om = frame.omega
    trL = signed_trace(L, frame)
    P = pack.R + kulkarni_nomizu(frame.g, L)
    for s in range(3):
        I = frame.I[s]
        P = P - EPS[s] * kulkarni_nomizu(om[s], _I_form(L, I))
        P = P + 0.5 * EPS[s] * np.einsum("xy,zv->xyzv", om[s], _cyclic_bracket(L, frame, s))
        P = P + EPS[s] * np.einsum("zv,xy->xyzv", om[s], apply_second(L, I) - apply_first(L, I))
        P = P - trL / (2.0 * n) * EPS[s] * np.einsum("xy,zv->xyzv", om[s], om[s])
    return P


def pwr_tensor_alt(R: np.ndarray, tau: np.ndarray, mu: np.ndarray, scal: float, frame: PqcFrame) -> np.ndarray:
    """PWR assembled from ``(R, tau, mu, Scal)`` directly."""
    n = frame.n
    om = frame.omega
    L0 = 0.5 * tau + mu
    P = R + kulkarni_nomizu(frame.g, L0)
    c = scal / (32.0 * n * (n + 2))
    P = P + c * kulkarni_nomizu(frame.g, frame.g)
    for s in range(3):
        I = frame.I[s]
        P = P - EPS[s] * kulkarni_nomizu(om[s], _I_form(L0, I))
        first = apply_second(tau, I) - apply_first(tau, I)
        second = apply_second(tau, I) - apply_first(tau, I) + 4.0 * apply_second(mu, I)
        P = P + 0.5 * EPS[s] * (
            np.einsum("xy,zv->xyzv", om[s], first) + np.einsum("zv,xy->xyzv", om[s], second)
        )
        P = P - c * EPS[s] * (
            kulkarni_nomizu(om[s], om[s]) + 4.0 * np.einsum("xy,zv->xyzv", om[s], om[s])
        )
    return P


def wpqc_tensor(PWR: np.ndarray, frame: PqcFrame) -> np.ndarray:
    return first_pair_project(PWR, frame)[0]


def wpqc_terms(pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame) -> list[np.ndarray]:
    """Summands of the explicit W^pqc formula in terms of R, tau, mu and Scal."""
    n = frame.n
    om = frame.omega
    tau, mu = split.tau, split.mu
    terms = [first_pair_project(pack.R, frame)[0]]
    c = pack.Scal / (32.0 * n * (n + 2))
    terms.append(c * kulkarni_nomizu(frame.g, frame.g))
    terms.append(kulkarni_nomizu(frame.g, mu))
    for s in range(3):
        I = frame.I[s]
        terms.append(0.5 * EPS[s] * np.einsum("zv,xy->xyzv", om[s], apply_second(tau, I) - apply_first(tau, I)))
        terms.append(-c * EPS[s] * kulkarni_nomizu(om[s], om[s]))
        terms.append(-EPS[s] * kulkarni_nomizu(om[s], _I_form(mu, I)))
    return terms


def wpqc_explicit(pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame) -> np.ndarray:
    return sum(wpqc_terms(pack, split, frame))


def conformal_curvature(pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame) -> ConformalCurvature:
    L, L0, disc = l_tensor(pack, split, frame)
    P = pwr_tensor(pack, L, frame)
    return ConformalCurvature(L, L0, P, wpqc_tensor(P, frame), disc)


# -- identity suite -----------------------------------------------------------

def _ricis_terms(L: np.ndarray, frame: PqcFrame):
    """Ricci-type traces predicted from L alone: ``(Ric, rho, varrho, zeta)``."""
    n = frame.n
    I, om = frame.I, frame.omega
    trL = signed_trace(L, frame)
    Ric = (2 * n + 3) / (2.0 * n) * trL * frame.g + (8 * n + 11) / 2.0 * L
    Ric = Ric - 1.5 * sum(EPS[s] * apply_both(L, I[s]) for s in range(3))
    rho, varrho, zeta = [], [], []
    for i, j, k in CYCLIC:
        LiY, LIiX = apply_second(L, I[i]), apply_first(L, I[i])
        kj, jk = apply_both(L, I[k], I[j]), apply_both(L, I[j], I[k])
        rho.append(LiY - LIiX - trL / (2.0 * n) * om[i])
        varrho.append(-trL / n * om[i] - (n + 2) / (2.0 * n) * (LIiX - LiY - EPS[i] * kj + EPS[i] * jk))
        zeta.append(
            (2 * n - 1) / (8.0 * n * n) * trL * om[i]
            + 3.0 / (8 * n) * LIiX - (8 * n + 3) / (8.0 * n) * LiY - EPS[i] / (8.0 * n) * (kj - jk)
        )
    return Ric, np.stack(rho), np.stack(varrho), np.stack(zeta)


def _comp1_rhs(split: TorsionSplit, scal: float, frame: PqcFrame) -> list[np.ndarray]:
    n = frame.n
    g, om, I = frame.g, frame.omega, frame.I
    tau, mu = split.tau, split.mu
    e = np.einsum
    terms = [
        2.0 * (e("yz,xv->xyzv", g, tau) + e("xv,zy->xyzv", g, tau)),
        -2.0 * (e("zx,yv->xyzv", g, tau) + e("vy,zx->xyzv", g, tau)),
    ]
    for s in range(3):
        tI = apply_second(tau, I[s])  # tau(A, I_s B)
        Itau = apply_first(tau, I[s])
        muI = apply_first(mu, I[s])
        terms.append(2.0 * EPS[s] * (e("yz,xv->xyzv", om[s], tI) + e("xv,yz->xyzv", om[s], tI)))
        terms.append(-2.0 * EPS[s] * (e("xz,yv->xyzv", om[s], tI) + e("yv,xz->xyzv", om[s], tI)))
        terms.append(-2.0 * EPS[s] * (e("xy,zv->xyzv", om[s], tI - Itau) - 4.0 * e("zv,xy->xyzv", om[s], muI)))
        terms.append(scal / (2.0 * n * (n + 2)) * EPS[s] * e("xy,zv->xyzv", om[s], om[s]))
    return terms


def verify_pwr_properties(
    pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame, tol: float = 1e-7, geometric: bool = True
) -> list[Residual]:
    """Residuals of the PWR properties and of the trace formulas in terms of L.

    With ``geometric=False`` only the algebraic checks (the two assemblies of
    PWR and the projector split) are run; trace-freeness, the vanishing
    [-1]-part and the explicit W^pqc formula hold only for curvature coming
    from an actual pqc structure.
    """
    cc = conformal_curvature(pack, split, frame)
    R_scale = _maxabs(pack.R)
    alt = pwr_tensor_alt(pack.R, split.tau, split.mu, pack.Scal, frame)
    w, m1 = first_pair_project(cc.PWR, frame)
    out = [
        make_residual("pwr_two_forms", "qcwdef1", [cc.PWR, -alt], tol, max(R_scale, _maxabs(cc.L))),
        make_residual("pwr_projectors", "qccm", [w, m1, -cc.PWR], tol),
    ]
    if not geometric:
        return out
    tr = ricci_traces(cc.PWR, frame)
    for name, arr, ref in (
        ("ric", tr.Ric, pack.Ric), ("rho", tr.rho, pack.rho),
        ("varrho", tr.varrho, pack.varrho), ("zeta", tr.zeta, pack.zeta),
    ):
        out.append(make_residual(f"pwr_{name}_free", "trfree", [arr], tol, _maxabs(ref)))
    out.append(make_residual("pwr_minus_one", "main0", [m1], tol, R_scale))
    Ric, rho, varrho, zeta = _ricis_terms(cc.L, frame)
    for name, pred, got in (
        ("ricis_ric", Ric, pack.Ric), ("ricis_rho", rho, pack.rho),
        ("ricis_varrho", varrho, pack.varrho), ("ricis_zeta", zeta, pack.zeta),
    ):
        out.append(make_residual(name, "ricis", [got, -pred], tol))
    lhs = 4.0 * first_pair_project(pack.R, frame)[1]
    out.append(make_residual("comp1", "comp1", [lhs] + [-t for t in _comp1_rhs(split, pack.Scal, frame)], 10 * tol))
    terms = wpqc_terms(pack, split, frame)
    out.append(make_residual("wpqc_explicit", "qccm", terms, tol))
    out.append(make_residual("wpqc_agree", "qccm", [cc.W, -sum(terms)], tol, max(_maxabs(t) for t in terms)))
    out.append(make_residual("l_routes", "lll", [cc.L_discrepancy], tol, _maxabs(cc.L0)))
    n = frame.n
    trL = signed_trace(cc.L, frame)
    out.append(make_residual("l_trace", "lll", [trL, -pack.Scal / (8.0 * (n + 2))], tol))
    return out


def _ricci_family(pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame, tol: float) -> list[Residual]:
    n = frame.n
    g, I = frame.g, frame.I
    tau, mu, S = split.tau, split.mu, pack.Scal
    c = S / (8.0 * n * (n + 2))
    out = [make_residual(
        "ricci", "ricci", [pack.Ric, -S / (4.0 * n) * g, -(2 * n + 2) * tau, -(4 * n + 10) * mu], tol
    )]
    for s in range(3):
        e = EPS[s]
        tII = apply_both(tau, I[s])
        out.append(make_residual(
            f"ricciformf_{s + 1}", "ricciformf",
            [apply_second(pack.rho[s], I[s]), -e * c * g, -0.5 * (e * tau - tII), -2.0 * e * mu], tol,
        ))
        out.append(make_residual(
            f"riccitau_{s + 1}", "riccitau",
            [apply_second(pack.varrho[s], I[s]), -e * c * g, -(n + 2) / (2.0 * n) * (e * tau - tII)], tol,
        ))
        out.append(make_residual(
            f"riccizeta_{s + 1}", "riccizeta",
            [
                e * apply_second(pack.zeta[s], I[s]), S / (16.0 * n * (n + 2)) * g,
                (2 * n + 1) / (4.0 * n) * tau, -e / (4.0 * n) * tII, (2 * n + 1) / (2.0 * n) * mu,
            ],
            tol,
        ))
    return out


def _zamiana_terms(pack: CurvaturePack, split: TorsionSplit, frame: PqcFrame) -> list[np.ndarray]:
    om, I = frame.omega, frame.I
    tau, mu = split.tau, split.mu
    e = np.einsum
    terms = [pack.R, -pack.R.transpose(2, 3, 0, 1)]
    for s in range(3):
        muI = apply_first(mu, I[s])
        sym = apply_first(tau, I[s]) + apply_second(tau, I[s])  # tau(I_s A, B) + tau(A, I_s B)
        terms.append(2.0 * EPS[s] * (e("xy,zv->xyzv", om[s], muI) - e("zv,xy->xyzv", om[s], muI)))
        terms.append(-0.5 * EPS[s] * (e("yz,xv->xyzv", om[s], sym) + e("xv,zy->xyzv", om[s], sym)))
        terms.append(0.5 * EPS[s] * (e("xz,yv->xyzv", om[s], sym) + e("yv,zx->xyzv", om[s], sym)))
    return terms


def _rjr_terms(pack: CurvaturePack, frame: PqcFrame, i: int) -> list[np.ndarray]:
    _, j, k = CYCLIC[i]
    I, om = frame.I, frame.omega
    R = pack.R
    return [
        EPS[i] * np.einsum("abcd,cz,dv->abzv", R, I[i], I[i]),
        R,
        2.0 * EPS[j] * np.einsum("ab,zv->abzv", pack.rho[j], om[j]),
        2.0 * EPS[k] * np.einsum("ab,zv->abzv", pack.rho[k], om[k]),
    ]


def covariant_derivative(dT: np.ndarray, T: np.ndarray, G: np.ndarray) -> np.ndarray:
    """``(nabla_{e_a} T)(e_b, e_c)`` from ``e_a(T_bc)`` and the connection components."""
    return dT - np.einsum("abd,dc->abc", G, T) - np.einsum("acd,bd->abc", G, T)


def divergence_terms(split: TorsionSplit, deriv: DerivativeData, frame: PqcFrame) -> list[np.ndarray]:
    """The three summands of the divergence identity, as covectors."""
    n = frame.n
    div_tau, div_mu = _divergences(split, deriv, frame)
    return [
        (n - 1) * div_tau,
        2.0 * (n + 2) * div_mu,
        -(n - 1) * (2 * n + 1) / (8.0 * n * (n + 2)) * deriv.dscal,
    ]


def _divergences(split: TorsionSplit, deriv: DerivativeData, frame: PqcFrame):
    gi = frame.ginv
    ntau = covariant_derivative(deriv.dtau, split.tau, deriv.G)
    nmu = covariant_derivative(deriv.dmu, split.mu, deriv.G)
    return np.einsum("ab,abx->x", gi, ntau), np.einsum("ab,abx->x", gi, nmu)


def verify_structure_identities(
    pack: CurvaturePack,
    split: TorsionSplit,
    derivatives: DerivativeData | None,
    frame: PqcFrame,
    tol: float = 1e-7,
    div_tol: float = 1e-6,
) -> list[Residual]:
    """Pair-swap, sp(1)-part, divergence and torsion-Ricci identities."""
    if derivatives is None:
        raise MissingJets("the divergence identity needs third-order jets")
    out = [make_residual("zamiana", "zamiana", _zamiana_terms(pack, split, frame), tol)]
    out += [make_residual(f"rjr_{i + 1}", "rjr", _rjr_terms(pack, frame, i), tol) for i in range(3)]
    # for n = 1 every coefficient but the mu one vanishes, so the scale also
    # counts the unweighted divergences
    n = frame.n
    raw = list(_divergences(split, derivatives, frame)) + [derivatives.dscal / (8.0 * n * (n + 2))]
    terms = divergence_terms(split, derivatives, frame)
    out.append(make_residual("div", "div", terms, div_tol, max(_maxabs(t) for t in terms + raw)))
    out += _ricci_family(pack, split, frame, tol)
    return out


def flatness_verdict(W: np.ndarray, R: np.ndarray, tol: float = 1e-7) -> tuple[bool, float]:
    """``(max|W| < tol * max(1, max|R|), max|W|)``."""
    size = _maxabs(W)
    return size < tol * max(1.0, _maxabs(R)), size
