"""Split-quaternion (paraquaternion) arithmetic.

An element is stored as ``p = t + r3*x + r1*y + r2*z`` with
``r1**2 = r2**2 = 1``, ``r3**2 = -1`` and ``r1*r2 = -r2*r1 = r3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real

import numpy as np

__all__ = ["ONE", "R1", "R2", "R3", "ParaQuaternion", "ZeroNorm", "conj", "im", "inv", "mul", "norm2", "re"]


class ZeroNorm(ArithmeticError):
    """Raised when inverting an element of (numerically) zero norm."""


# Products of the basis (1, r3, r1, r2), indexed in that order:
# _TABLE[i][j] = (sign, k) meaning e_i * e_j = sign * e_k.
_TABLE = (
    ((1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 1), (-1, 0), (-1, 3), (1, 2)),   # r3*r3=-1, r3*r1=-r2, r3*r2=r1
    ((1, 2), (1, 3), (1, 0), (1, 1)),     # r1*r3=r2, r1*r1=1, r1*r2=r3
    ((1, 3), (-1, 2), (-1, 1), (1, 0)),   # r2*r3=-r1, r2*r1=-r3, r2*r2=1
)


@dataclass(frozen=True)
class ParaQuaternion:
    """Paraquaternion ``t + r3*x + r1*y + r2*z``."""

    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> ParaQuaternion:
        t, x, y, z = a
        return cls(t, x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    def __iter__(self):
        return iter((self.t, self.x, self.y, self.z))

    def __add__(self, other):
        if isinstance(other, Real):
            other = ParaQuaternion(float(other))
        if not isinstance(other, ParaQuaternion):
            return NotImplemented
        return ParaQuaternion(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __neg__(self):
        return ParaQuaternion(-self.t, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        if isinstance(other, Real):
            other = ParaQuaternion(float(other))
        if not isinstance(other, ParaQuaternion):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ParaQuaternion):
            return mul(self, other)
        if isinstance(other, Real):
            return ParaQuaternion(self.t * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Real):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return ParaQuaternion(self.t / other, self.x / other, self.y / other, self.z / other)
        if isinstance(other, ParaQuaternion):
            return self * inv(other)
        return NotImplemented

    def conj(self) -> ParaQuaternion:
        return conj(self)

    def norm2(self) -> float:
        return norm2(self)

    def re(self) -> float:
        return self.t

    def im(self) -> ParaQuaternion:
        return im(self)

    def inv(self, threshold: float | None = None) -> ParaQuaternion:
        return inv(self, threshold)

    def isclose(self, other: ParaQuaternion, tol: float = 1e-12) -> bool:
        return float(np.max(np.abs(self.as_array() - ParaQuaternion(*other).as_array()))) <= tol


ONE = ParaQuaternion(1.0)
R3 = ParaQuaternion(0.0, 1.0)
R1 = ParaQuaternion(0.0, 0.0, 1.0)
R2 = ParaQuaternion(0.0, 0.0, 0.0, 1.0)


def mul(p: ParaQuaternion, q: ParaQuaternion) -> ParaQuaternion:
    a = (p.t, p.x, p.y, p.z)
    b = (q.t, q.x, q.y, q.z)
    out = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        if a[i] == 0:
            continue
        for j in range(4):
            sign, k = _TABLE[i][j]
            out[k] += sign * a[i] * b[j]
    return ParaQuaternion(*out)


def conj(p: ParaQuaternion) -> ParaQuaternion:
    return ParaQuaternion(p.t, -p.x, -p.y, -p.z)


def norm2(p: ParaQuaternion) -> float:
    """Neutral quadratic form ``t^2 + x^2 - y^2 - z^2``; can be negative."""
    return p.t * p.t + p.x * p.x - p.y * p.y - p.z * p.z


def re(p: ParaQuaternion) -> float:
    return p.t


def im(p: ParaQuaternion) -> ParaQuaternion:
    return ParaQuaternion(0.0, p.x, p.y, p.z)


def inv(p: ParaQuaternion, threshold: float | None = None) -> ParaQuaternion:
    """Inverse ``conj(p) / norm2(p)``.

    The default zero-norm threshold is ``1e-12 * (1 + max|coefficient|)``;
    elements at or below it are zero divisors and raise :class:`ZeroNorm`.
    """
    n2 = norm2(p)
    if threshold is None:
        threshold = 1e-12 * (1.0 + max(abs(p.t), abs(p.x), abs(p.y), abs(p.z)))
    if abs(n2) <= threshold:
        raise ZeroNorm(f"paraquaternion {p} has norm2 {n2!r}")
    return conj(p) / n2


def left_matrix(p: ParaQuaternion) -> np.ndarray:
    """Real 4x4 matrix of ``q -> p*q`` on (t, x, y, z) coefficients."""
    m = np.zeros((4, 4))
    a = (p.t, p.x, p.y, p.z)
    for i in range(4):
        for j in range(4):
            sign, k = _TABLE[i][j]
            m[k, j] += sign * a[i]
    return m


def right_matrix(p: ParaQuaternion) -> np.ndarray:
    """Real 4x4 matrix of ``q -> q*p`` on (t, x, y, z) coefficients."""
    m = np.zeros((4, 4))
    b = (p.t, p.x, p.y, p.z)
    for i in range(4):
        for j in range(4):
            sign, k = _TABLE[i][j]
            m[k, i] += sign * b[j]
    return m
