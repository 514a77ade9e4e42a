"""The para 3-Sasakian pseudo-sphere, its contact form and the Cayley transform.

Points of pH^n x pH are stored as ``(q, p)`` with ``q`` a tuple of
:class:`ParaQuaternion`.  The transform sends the pseudo-sphere minus
``{norm2(p - 1) = 0}`` onto the hypersurface ``Re(p') = -|q'|^2``, which is
identified with the Heisenberg group through ``w' = Im(p')``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pqc.paraquat import ONE, ParaQuaternion, ZeroNorm

__all__ = [
    "NotTangent",
    "OnSingularLocus",
    "SpherePoint",
    "TangentVector",
    "cayley_differential",
    "cayley_forward",
    "cayley_inverse",
    "eta_sphere_at",
    "sample_sphere_point",
    "sample_tangent",
    "theta_heisenberg_at",
    "verify_cayley_identity",
]

SINGULAR_TOL = 1e-10


class OnSingularLocus(ZeroNorm):
    """``norm2(p - 1)`` vanishes, so the transform is undefined."""


class NotTangent(ValueError):
    """The vector violates the linearized sphere constraint."""


def _pq_tuple(q) -> tuple[ParaQuaternion, ...]:
    return tuple(x if isinstance(x, ParaQuaternion) else ParaQuaternion.from_array(x) for x in q)


def _inner(a: ParaQuaternion, b: ParaQuaternion) -> float:
    """Split inner product ``Re(conj(a) b)``."""
    return (a.conj() * b).re()


@dataclass(frozen=True)
class SpherePoint:
    q: tuple[ParaQuaternion, ...]
    p: ParaQuaternion

    def __post_init__(self):
        object.__setattr__(self, "q", _pq_tuple(self.q))

    @property
    def n(self) -> int:
        return len(self.q)

    def constraint(self) -> float:
        """``sum norm2(q_a) + norm2(p) - 1``."""
        return sum(x.norm2() for x in self.q) + self.p.norm2() - 1.0

    @classmethod
    def base(cls, n: int) -> SpherePoint:
        return cls(tuple(ParaQuaternion() for _ in range(n)), -ONE)


@dataclass(frozen=True)
class TangentVector:
    dq: tuple[ParaQuaternion, ...]
    dp: ParaQuaternion

    def __post_init__(self):
        object.__setattr__(self, "dq", _pq_tuple(self.dq))

    def scaled(self, c: float) -> TangentVector:
        return TangentVector(tuple(c * x for x in self.dq), c * self.dp)

    def constraint(self, pt: SpherePoint) -> float:
        """``Re(sum conj(q_a) dq_a + conj(p) dp)``."""
        return sum(_inner(a, b) for a, b in zip(pt.q, self.dq)) + _inner(pt.p, self.dp)


def sample_sphere_point(rng: np.random.Generator, n: int, box: float = 1.0, max_tries: int = 1000) -> SpherePoint:
    """Rejection sampler onto the positive sheet ``sum norm2 = 1``."""
    for _ in range(max_tries):
        raw = rng.uniform(-box, box, size=(n + 1, 4))
        pq = [ParaQuaternion.from_array(r) for r in raw]
        s = sum(x.norm2() for x in pq)
        if abs(s) < 0.1 or s < 0:
            continue
        pq = [x * (1.0 / np.sqrt(s)) for x in pq]
        pt = SpherePoint(tuple(pq[:n]), pq[n])
        if abs((pt.p - ONE).norm2()) > 1e-3:
            return pt
    raise RuntimeError("sphere sampler exhausted")


def sample_tangent(rng: np.random.Generator, pt: SpherePoint) -> TangentVector:
    """Random vector projected onto the tangent space (the position has unit square norm)."""
    raw = TangentVector(
        tuple(ParaQuaternion.from_array(rng.normal(size=4)) for _ in range(pt.n)),
        ParaQuaternion.from_array(rng.normal(size=4)),
    )
    c = raw.constraint(pt) / (1.0 + pt.constraint())
    return TangentVector(tuple(d - c * q for d, q in zip(raw.dq, pt.q)), raw.dp - c * pt.p)


def _check_tangent(pt: SpherePoint, v: TangentVector, tol: float = 1e-9):
    scale = 1.0 + max(abs(x) for d in (*v.dq, v.dp) for x in d)
    if abs(v.constraint(pt)) > tol * scale:
        raise NotTangent(f"linearized constraint residual {v.constraint(pt):.3e}")


def _inv_pm1(p: ParaQuaternion) -> tuple[ParaQuaternion, float]:
    w = p - ONE
    N = w.norm2()
    if abs(N) <= SINGULAR_TOL * (1.0 + max(abs(x) for x in p)):
        raise OnSingularLocus(f"norm2(p - 1) = {N:.3e}")
    return w.conj() * (1.0 / N), N


def cayley_forward(pt: SpherePoint) -> tuple[tuple[ParaQuaternion, ...], ParaQuaternion]:
    """``q' = (p-1)^{-1} q``, ``p' = (p-1)^{-1}(p+1)``."""
    u, _ = _inv_pm1(pt.p)
    return tuple(u * x for x in pt.q), u * (pt.p + ONE)


def cayley_inverse(q_prime, p_prime: ParaQuaternion) -> SpherePoint:
    """``q = 2(p'-1)^{-1} q'``, ``p = (p'-1)^{-1}(p'+1)``."""
    u, _ = _inv_pm1(p_prime)
    return SpherePoint(tuple(2.0 * (u * x) for x in _pq_tuple(q_prime)), u * (p_prime + ONE))


def cayley_differential(pt: SpherePoint, v: TangentVector):
    """Exact ``dC(v)``, differentiating ``(p-1)^{-1} = conj(w)/norm2(w)`` by the quotient rule."""
    w = pt.p - ONE
    u, N = _inv_pm1(pt.p)
    dN = 2.0 * _inner(w, v.dp)
    du = v.dp.conj() * (1.0 / N) - w.conj() * (dN / N**2)
    dq_prime = tuple(du * q + u * dq for q, dq in zip(pt.q, v.dq))
    dp_prime = du * (pt.p + ONE) + u * v.dp
    return dq_prime, dp_prime


def eta_sphere_at(pt: SpherePoint, v: TangentVector) -> ParaQuaternion:
    """``dq.conj(q) + dp.conj(p) - q.conj(dq) - p.conj(dp)`` evaluated on ``v``."""
    _check_tangent(pt, v)
    out = v.dp * pt.p.conj() - pt.p * v.dp.conj()
    for q, dq in zip(pt.q, v.dq):
        out = out + dq * q.conj() - q * dq.conj()
    return out


def theta_heisenberg_at(q_prime, dq_prime, dp_prime: ParaQuaternion) -> ParaQuaternion:
    """``1/2 (dw - q dq-bar + dq q-bar)`` with ``w = Im(p')`` on the embedded group."""
    out = 0.5 * dp_prime.im()
    for q, dq in zip(q_prime, dq_prime):
        out = out + 0.5 * (dq * q.conj() - q * dq.conj())
    return out


def verify_cayley_identity(pt: SpherePoint, v: TangentVector) -> tuple[float, float]:
    """Residual of ``2 norm2(p-1)^2 C*Theta(v) = (conj(p)-1) eta(v) (p-1)``.

    Returns ``(residual, scale)``, the max-coefficient size of the
    difference and of the larger side.
    """
    eta = eta_sphere_at(pt, v)
    q_prime, _ = cayley_forward(pt)
    dq_prime, dp_prime = cayley_differential(pt, v)
    N = (pt.p - ONE).norm2()
    lhs = 2.0 * N**2 * theta_heisenberg_at(q_prime, dq_prime, dp_prime)
    rhs = (pt.p.conj() - ONE) * eta * (pt.p - ONE)
    size = max(max(abs(x) for x in lhs), max(abs(x) for x in rhs))
    return max(abs(x) for x in lhs - rhs), size
