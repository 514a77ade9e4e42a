"""Dense multilinear algebra on the horizontal space of a pqc structure.

Index conventions used throughout the package:

* the horizontal frame has ``N = 4n`` vectors, grouped in quadruples
  ``(e, I1 e, I2 e, I3 e)``; frame vector ``4a + k`` is the k-th member of
  quadruple ``a``;
* an endomorphism ``A`` is a matrix acting on column vectors, so
  ``A[c, b]`` is the c-th component of ``A e_b``;
* a bilinear form ``T`` is stored as ``T[b, c] = T(e_b, e_c)``; all tensor
  slots are covariant;
* ``omega_s(X, Y) = g(I_s X, Y)`` and, for a (0,2) tensor ``L``,
  ``(I_s L)(X, Y) = -L(X, I_s Y)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CYCLIC",
    "EPS",
    "PqcFrame",
    "SingularMetric",
    "apply_both",
    "apply_first",
    "apply_second",
    "build_adapted_frame",
    "casimir",
    "casimir_project",
    "first_pair_project",
    "four_part_split",
    "kulkarni_nomizu",
    "signed_trace",
    "signed_trace_pair",
    "structure_residuals",
    "trace_free",
]

#: sign constants (eps_1, eps_2, eps_3); index s-1
EPS = np.array([1.0, 1.0, -1.0])
#: cyclic permutations (i, j, k) of (0, 1, 2)
CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class SingularMetric(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class PqcFrame:
    """Pointwise linear data of a pqc structure in a fixed horizontal frame.

    ``I`` has shape (3, N, N); ``omega`` is derived as ``g(I_s ., .)``.
    The metric need not be orthonormal in the frame (deformed metrics are
    carried as ``g / 2h`` in the original frame).
    """

    n: int
    g: np.ndarray
    I: np.ndarray
    omega: np.ndarray = field(init=False)
    ginv: np.ndarray = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.g)
        I = np.asarray(self.I)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "I", I)
        # omega_s[b, c] = g(I_s e_b, e_c) = sum_d I_s[d, b] g[d, c]
        object.__setattr__(self, "omega", np.einsum("sdb,dc->sbc", I, g))
        try:
            ginv = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise SingularMetric(str(exc)) from exc
        if not np.all(np.isfinite(ginv)):
            raise SingularMetric("metric inverse is not finite")
        object.__setattr__(self, "ginv", ginv)

    @property
    def dim(self) -> int:
        return 4 * self.n

    def rescaled(self, factor) -> PqcFrame:
        """Same endomorphisms, metric multiplied by ``factor``."""
        return PqcFrame(self.n, self.g * factor, self.I)

    def to_form(self, A: np.ndarray) -> np.ndarray:
        """Bilinear form ``(X, Y) -> g(A X, Y)`` of an endomorphism."""
        return A.T @ self.g

    def to_endo(self, T: np.ndarray) -> np.ndarray:
        """Endomorphism ``A`` with ``T(X, Y) = g(A X, Y)``."""
        return self.ginv @ T.T


# quadruple block of I_1, I_2, I_3 on (e, I1 e, I2 e, I3 e)
_BLOCKS = np.zeros((3, 4, 4))
for _s, _images in enumerate((
    # I_1: e->I1e, I1e->e, I2e->I3e, I3e->I2e
    ((1, 1), (0, 1), (3, 1), (2, 1)),
    # I_2: e->I2e, I1e->-I3e, I2e->e, I3e->-I1e
    ((2, 1), (3, -1), (0, 1), (1, -1)),
    # I_3: e->I3e, I1e->-I2e, I2e->I1e, I3e->-e
    ((3, 1), (2, -1), (1, 1), (0, -1)),
)):
    for _b, (_c, _sign) in enumerate(_images):
        _BLOCKS[_s, _c, _b] = _sign


def build_adapted_frame(n: int) -> PqcFrame:
    """Constant model of a pqc structure in an adapted orthonormal frame.

    Per quadruple the metric is ``diag(+1, -1, -1, +1)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eye = np.eye(n)
    g = np.kron(eye, np.diag([1.0, -1.0, -1.0, 1.0]))
    I = np.stack([np.kron(eye, _BLOCKS[s]) for s in range(3)])
    return PqcFrame(n, g, I)


def apply_first(T: np.ndarray, A: np.ndarray) -> np.ndarray:
    """``T(A X, Y)`` for a form ``T`` and endomorphism ``A``."""
    return A.T @ T


def apply_second(T: np.ndarray, A: np.ndarray) -> np.ndarray:
    """``T(X, A Y)``."""
    return T @ A


def apply_both(T: np.ndarray, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
    """``T(A X, B Y)``; ``B`` defaults to ``A``."""
    B = A if B is None else B
    return A.T @ T @ B


def signed_trace(T: np.ndarray, frame: PqcFrame):
    """Metric contraction ``g^{ab} T_{ab}`` (the signed frame sum)."""
    return np.einsum("ab,ab->", frame.ginv, T)


def signed_trace_pair(T: np.ndarray, frame: PqcFrame, s: int):
    """``g^{ab} T(e_a, I_s e_b)`` for s in {0, 1, 2}."""
    return np.einsum("ab,ab->", frame.ginv, T @ frame.I[s])


def kulkarni_nomizu(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(A o B)(X,Y,Z,V) = A(X,Z)B(Y,V) + A(Y,V)B(X,Z) - A(Y,Z)B(X,V) - A(X,V)B(Y,Z)."""
    return (
        np.einsum("xz,yv->xyzv", A, B)
        + np.einsum("yv,xz->xyzv", A, B)
        - np.einsum("yz,xv->xyzv", A, B)
        - np.einsum("xv,yz->xyzv", A, B)
    )


def casimir(T: np.ndarray, frame: PqcFrame) -> np.ndarray:
    """dagger T = -T(I1., I1.) - T(I2., I2.) + T(I3., I3.)."""
    out = np.zeros_like(T)
    for s in range(3):
        out = out - EPS[s] * apply_both(T, frame.I[s])
    return out


def casimir_project(T: np.ndarray, frame: PqcFrame) -> tuple[np.ndarray, np.ndarray]:
    """Split into the eigenvalue-3 and eigenvalue-(-1) parts of the Casimir operator."""
    d = casimir(T, frame)
    return (T + d) / 4.0, (3.0 * T - d) / 4.0


def trace_free(T: np.ndarray, frame: PqcFrame) -> np.ndarray:
    return T - signed_trace(T, frame) / frame.dim * frame.g


def first_pair_project(R: np.ndarray, frame: PqcFrame) -> tuple[np.ndarray, np.ndarray]:
    """[3] and [-1] parts of a (0,4) tensor with respect to its first two slots."""
    acc = np.zeros_like(R)
    for s in range(3):
        I = frame.I[s]
        acc = acc + EPS[s] * np.einsum("ax,by,abzv->xyzv", I, I, R)
    return (R - acc) / 4.0, (3.0 * R + acc) / 4.0


def four_part_split(P: np.ndarray, frame: PqcFrame) -> dict[str, np.ndarray]:
    """Decompose a (0,2) tensor by commuting/anticommuting with I_1, I_2, I_3.

    Keys are sign patterns such as ``"+--"`` (commutes with I_1,
    anticommutes with I_2 and I_3).  All eight patterns are returned; the
    four whose sign product is -1 vanish identically.
    """
    A = frame.to_endo(P)

    def part(E, s, sign):
        Is = frame.I[s]
        # I_s^{-1} = eps_s I_s
        return 0.5 * (E + sign * EPS[s] * Is @ E @ Is)

    out = {}
    for s1 in "+-":
        for s2 in "+-":
            for s3 in "+-":
                E = A
                for s, sign in enumerate((s1, s2, s3)):
                    E = part(E, s, 1.0 if sign == "+" else -1.0)
                out[s1 + s2 + s3] = frame.to_form(E)
    return out


def structure_residuals(frame: PqcFrame) -> dict[str, float]:
    """Max residuals of the pqc algebraic relations for ``frame``."""
    I, g = frame.I, frame.g
    eye = np.eye(frame.dim)
    res = {}
    res["I_s^2 = eps_s"] = max(float(np.max(np.abs(I[s] @ I[s] - EPS[s] * eye))) for s in range(3))
    r = 0.0
    for i, j, k in CYCLIC:
        r = max(r, float(np.max(np.abs(I[i] @ I[j] + EPS[k] * I[k]))))
        r = max(r, float(np.max(np.abs(I[j] @ I[i] - EPS[k] * I[k]))))
    res["I_i I_j = -I_j I_i = -eps_k I_k"] = r
    res["g(I_s., I_s.) = -eps_s g"] = max(
        float(np.max(np.abs(apply_both(g, I[s]) + EPS[s] * g))) for s in range(3)
    )
    res["omega_s antisymmetric"] = max(
        float(np.max(np.abs(frame.omega[s] + frame.omega[s].T))) for s in range(3)
    )
    return res
