"""The flat model: the paraquaternionic Heisenberg group ``G(pH)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pqc import paraquat as pq
from pqc.jets import Polynomial, frame_field_table
from pqc.tensor_core import CYCLIC, EPS, PqcFrame, build_adapted_frame

__all__ = [
    "LISTING",
    "FlatStructure",
    "ModelPoint",
    "VectorField",
    "bracket",
    "contact_forms",
    "contact_forms_at",
    "exterior_derivative",
    "frame_connection_curvature",
    "frame_fields",
    "frame_fields_at",
    "group_mul",
    "model_verify",
]

#: the T_a, X_a, Y_a, Z_a listing of a quadruple as adapted indices:
#: T = e, X = I3 e, Y = I1 e, Z = I2 e
LISTING = {"T": 0, "X": 3, "Y": 1, "Z": 2}


@dataclass(frozen=True)
class ModelPoint:
    """Point ``(q, w)`` of ``pH^n x Im(pH)``."""

    q: tuple[pq.ParaQuaternion, ...]
    w: pq.ParaQuaternion

    @property
    def n(self) -> int:
        return len(self.q)

    @classmethod
    def origin(cls, n: int) -> ModelPoint:
        return cls(tuple(pq.ParaQuaternion() for _ in range(n)), pq.ParaQuaternion())

    @classmethod
    def from_array(cls, u) -> ModelPoint:
        u = np.asarray(u, dtype=float)
        n = (len(u) - 3) // 4
        q = tuple(pq.ParaQuaternion(*u[4 * a: 4 * a + 4]) for a in range(n))
        return cls(q, pq.ParaQuaternion(0.0, *u[4 * n:]))

    def as_array(self) -> np.ndarray:
        parts = [np.array(list(qa), dtype=float) for qa in self.q]
        return np.concatenate(parts + [np.array([self.w.x, self.w.y, self.w.z], dtype=float)])


def group_mul(p0: ModelPoint, p: ModelPoint) -> ModelPoint:
    """``(q0, w0) o (q, w) = (q0 + q, w0 + w + 2 Im(q0 conj(q)))``."""
    if p0.n != p.n:
        raise ValueError("points of different dimension")
    q = tuple(a + b for a, b in zip(p0.q, p.q))
    corr = pq.ParaQuaternion()
    for a, b in zip(p0.q, p.q):
        corr = corr + pq.im(a * pq.conj(b))
    return ModelPoint(q, p0.w + p.w + 2.0 * corr)


class VectorField:
    """Vector field with polynomial coefficients in the coordinate basis."""

    def __init__(self, coeffs: list[Polynomial]):
        self.coeffs = coeffs

    @property
    def nvars(self) -> int:
        return len(self.coeffs)

    def at(self, point) -> np.ndarray:
        return np.array([c(point) for c in self.coeffs], dtype=float)

    def apply(self, f: Polynomial) -> Polynomial:
        out = Polynomial(f.nvars)
        for j, c in enumerate(self.coeffs):
            if not c.is_zero():
                out = out + c * f.diff(j)
        return out

    def __add__(self, other):
        return VectorField([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, c):
        return VectorField([a * c for a in self.coeffs])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def bracket(A: VectorField, B: VectorField) -> VectorField:
    return VectorField([A.apply(b) - B.apply(a) for a, b in zip(A.coeffs, B.coeffs)])


def frame_fields(n: int, table=None) -> list[VectorField]:
    """Adapted horizontal frame (4n fields) followed by xi1, xi2, xi3."""
    table = table or frame_field_table(n)
    nv = 4 * n + 3
    out = []
    for terms in table:
        coeffs = [Polynomial(nv) for _ in range(nv)]
        for target, c, source in terms:
            term = Polynomial.constant(nv, c)
            if source is not None:
                term = term * Polynomial.variable(nv, source)
            coeffs[target] = coeffs[target] + term
        out.append(VectorField(coeffs))
    return out


def frame_fields_at(pt, table=None) -> np.ndarray:
    """Rows are the coordinate components of the frame fields at ``pt``."""
    u = pt.as_array() if isinstance(pt, ModelPoint) else np.asarray(pt, dtype=float)
    n = (len(u) - 3) // 4
    table = table or frame_field_table(n)
    F = np.zeros((len(table), len(u)))
    for a, terms in enumerate(table):
        for target, c, source in terms:
            F[a, target] += c if source is None else c * u[source]
    return F


def contact_forms(n: int) -> list[list[Polynomial]]:
    """Coordinate components of Theta_1, Theta_2, Theta_3.

    Built from ``Theta = (1/2)(dw - q.dconj(q) + dq.conj(q))`` summed over
    the quaternionic coordinates.
    """
    nv = 4 * n + 3
    basis = [pq.ONE, pq.R3, pq.R1, pq.R2]
    # imaginary component (r3, r1, r2) -> offset; Theta_s for s=1,2,3 read off r1, r2, r3
    forms = [[Polynomial(nv) for _ in range(nv)] for _ in range(3)]
    comp_of_s = (2, 3, 1)
    for s in range(3):
        forms[s][4 * n + (comp_of_s[s] - 1)] = Polynomial.constant(nv, 0.5)
    for a in range(n):
        for j in range(4):  # differential d q_a[j]
            for m in range(4):  # coordinate q_a[m]
                term = pq.mul(basis[j], pq.conj(basis[m])) - pq.mul(basis[m], pq.conj(basis[j]))
                vals = (term.t, term.x, term.y, term.z)
                for s in range(3):
                    c = 0.5 * vals[comp_of_s[s]]
                    if c:
                        forms[s][4 * a + j] = forms[s][4 * a + j] + Polynomial.variable(nv, 4 * a + m) * c
    return forms


def contact_forms_at(pt) -> np.ndarray:
    """Array of shape (3, 4n+3): covector components of Theta_1, Theta_2, Theta_3."""
    u = pt.as_array() if isinstance(pt, ModelPoint) else np.asarray(pt, dtype=float)
    n = (len(u) - 3) // 4
    return np.array([[c(u) for c in form] for form in contact_forms(n)], dtype=float)


def exterior_derivative(form: list[Polynomial]) -> list[list[Polynomial]]:
    """``(d theta)[i][j] = d_i theta_j - d_j theta_i``."""
    nv = len(form)
    return [[form[j].diff(i) - form[i].diff(j) for j in range(nv)] for i in range(nv)]


@dataclass(frozen=True)
class FlatStructure:
    """Left-invariant pqc structure on ``G(pH)``; frame constant, connection zero."""

    n: int
    frame: PqcFrame

    @classmethod
    def build(cls, n: int) -> FlatStructure:
        return cls(n, build_adapted_frame(n))

    def torsion_horizontal(self) -> np.ndarray:
        """``T(X, Y) = -2 sum eps_s omega_s(X, Y) xi_s`` as array (s, X, Y)."""
        return -2.0 * EPS[:, None, None] * self.frame.omega


def _two_form_at(dform, u) -> np.ndarray:
    return np.array([[c(u) for c in row] for row in dform], dtype=float)


def model_verify(n: int, points: int = 5, seed: int = 0, table=None) -> dict[str, float]:
    """Residuals of the structure equations of the flat model.

    ``table`` replaces the frame-field coefficient table (used for mutation
    tests).  Failures are reported as large residuals, never raised.
    """
    N = 4 * n
    frame = build_adapted_frame(n)
    fields = frame_fields(n, table)
    forms = contact_forms(n)
    dforms = [exterior_derivative(f) for f in forms]
    rng = np.random.default_rng(seed)
    pts = [np.zeros(N + 3)] + [rng.uniform(-1, 1, N + 3) for _ in range(points)]

    res: dict[str, float] = {}

    def bump(key, val):
        res[key] = max(res.get(key, 0.0), float(val))

    brackets = {}
    for a in range(N + 3):
        for b in range(a + 1, N + 3):
            brackets[a, b] = bracket(fields[a], fields[b])

    def br(a, b, u):
        if a == b:
            return np.zeros(N + 3)
        return brackets[a, b].at(u) if a < b else -brackets[b, a].at(u)

    for u in pts:
        F = np.array([f.at(u) for f in fields])
        Th = np.array([[c(u) for c in form] for form in forms])
        dTh = [_two_form_at(df, u) for df in dforms]
        xi = F[N:]
        # horizontality and Reeb normalisation
        bump("Theta_s(H) = 0", np.max(np.abs(Th @ F[:N].T)))
        bump("eta_s(xi_t) = delta_st", np.max(np.abs(Th @ xi.T - np.eye(3))))
        # (xi_s _| d eta_s)|H = 0 and (xi_j _| d eta_i)|H = eps_k (xi_i _| d eta_j)|H
        bump("(xi_s _| d eta_s)|H = 0", max(np.max(np.abs(xi[s] @ dTh[s] @ F[:N].T)) for s in range(3)))
        r = 0.0
        for i, j, k in CYCLIC:
            lhs = xi[j] @ dTh[i] @ F[:N].T
            rhs = EPS[k] * (xi[i] @ dTh[j] @ F[:N].T)
            r = max(r, np.max(np.abs(lhs - rhs)))
        bump("(xi_j _| d eta_i)|H = eps_k (xi_i _| d eta_j)|H", r)
        # compatibility -2 eps_s g(I_s X, Y) = d eta_s(X, Y)
        r = 0.0
        for s in range(3):
            lhs = -2.0 * EPS[s] * frame.omega[s]
            rhs = F[:N] @ dTh[s] @ F[:N].T
            r = max(r, np.max(np.abs(lhs - rhs)))
        bump("-2 eps_s g(I_s X, Y) = d eta_s(X, Y)", r)
        # [X, Y] = 2 sum eps_s omega_s(X, Y) xi_s for every horizontal pair
        r = 0.0
        for a in range(N):
            for b in range(N):
                expect = sum(2.0 * EPS[s] * frame.omega[s, a, b] * xi[s] for s in range(3))
                r = max(r, np.max(np.abs(br(a, b, u) - expect)))
        bump("[X,Y]_V = 2 sum eps_s omega_s(X,Y) xi_s", r)
        # xi_s central: [xi_s, X] = 0 (flat connection => torsion endomorphisms vanish)
        r = 0.0
        for s in range(3):
            for b in range(N + 3):
                r = max(r, np.max(np.abs(br(N + s, b, u))))
        bump("[xi_s, .] = 0 (tau = mu = 0)", r)
        # commutator tables of the quadruples
        r1 = r2 = 0.0
        for a in range(n):
            T = 4 * a
            # frame labels X = J3 T, Y = -J1 T, Z = -J2 T
            J_T = {0: (-1.0, 4 * a + LISTING["Y"]), 1: (-1.0, 4 * a + LISTING["Z"]), 2: (1.0, 4 * a + LISTING["X"])}
            for i in range(3):
                sign, idx = J_T[i]
                r1 = max(r1, np.max(np.abs(sign * br(idx, T, u) + 2.0 * EPS[i] * xi[i])))
            # I_s T = e_{4a+s+1}
            for i, j, k in CYCLIC:
                r2 = max(r2, np.max(np.abs(br(T + i + 1, T + j + 1, u) - 2.0 * EPS[k] * xi[k])))
        bump("[J_iT_a,T_a] = -2eps_i xi_i", r1)
        bump("[I_iT_a,I_jT_a] = 2eps_k xi_k", r2)
    # structure equations, constant 2-forms
    nv = N + 3
    expect = np.zeros((3, nv, nv))
    pairs = {0: ((0, 2), (1, 3)), 1: ((0, 3), (2, 1)), 2: ((0, 1), (2, 3))}  # s -> wedge pairs within a quadruple
    for s, wedges in pairs.items():
        for a in range(n):
            for i, j in wedges:
                expect[s, 4 * a + i, 4 * a + j] += 2.0
                expect[s, 4 * a + j, 4 * a + i] -= 2.0
    r = 0.0
    for u in pts:
        for s in range(3):
            r = max(r, np.max(np.abs(_two_form_at(dforms[s], u) - expect[s])))
    res["structure equations d Theta_s"] = float(r)
    res["flat curvature R|H = 0"] = max(
        float(np.max(np.abs(frame_connection_curvature(u, table)))) for u in pts
    )
    return res


def frame_connection_curvature(u, table=None) -> np.ndarray:
    """Coordinate curvature ``R[i, j]`` of the connection making every frame field parallel.

    The connection matrices are ``A_i = F d_i(F^{-1})`` with ``F`` the frame
    (columns = fields).  Both the coframe and ``A_i`` are affine in the
    coordinates, so unit central differences differentiate them exactly.
    """
    u = np.asarray(u, dtype=float)
    m = len(u)
    eye = np.eye(m)

    def coframe(v):
        return np.linalg.inv(frame_fields_at(v, table).T)

    def conn(v):
        F = frame_fields_at(v, table).T
        return np.stack([F @ (coframe(v + eye[i]) - coframe(v - eye[i])) / 2.0 for i in range(m)])

    A = conn(u)
    dA = np.stack([(conn(u + eye[i]) - conn(u - eye[i])) / 2.0 for i in range(m)])
    # R(d_i, d_j) = d_i A_j - d_j A_i + [A_i, A_j]
    return (
        dA - dA.transpose(1, 0, 2, 3)
        + np.einsum("ikl,jlm->ijkm", A, A) - np.einsum("jkl,ilm->ijkm", A, A)
    )
