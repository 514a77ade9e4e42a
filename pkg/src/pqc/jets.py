"""Exact polynomial scalar fields on the Heisenberg chart and their frame jets.

Coordinates of ``G(pH) = pH^n x Im(pH)`` are ordered

    t1, x1, y1, z1, ..., tn, xn, yn, zn, x, y, z

where ``(t^a, x^a, y^a, z^a)`` are the coefficients of ``q_a`` on
``(1, r3, r1, r2)`` and ``(x, y, z)`` those of the imaginary coordinate
on ``(r3, r1, r2)``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cache

import numpy as np

from pqc import paraquat as pq
from pqc.tensor_core import PqcFrame, build_adapted_frame

__all__ = [
    "ADAPTED_TO_COMPONENT",
    "GradientData",
    "Polynomial",
    "ScalarField",
    "UnknownCoordinate",
    "UnknownField",
    "coordinate_names",
    "derive_along",
    "frame_field_table",
    "gradient_data",
    "parse_monomial",
    "reeb_field_index",
    "third_order",
]


class UnknownField(KeyError):
    pass


class UnknownCoordinate(ValueError):
    pass


#: adapted frame member k (e, I1 e, I2 e, I3 e) -> pH basis component of the
#: generating vector: e ~ 1, I1 e ~ r1, I2 e ~ r2, I3 e ~ r3 (components 0,2,3,1)
ADAPTED_TO_COMPONENT = (0, 2, 3, 1)
#: Reeb field s (0-based) -> vertical coordinate offset: xi1 = 2 d/dy, xi2 = 2 d/dz, xi3 = 2 d/dx
_REEB_OFFSET = (1, 2, 0)


def coordinate_names(n: int) -> list[str]:
    names = []
    for a in range(1, n + 1):
        names += [f"t{a}", f"x{a}", f"y{a}", f"z{a}"]
    return names + ["x", "y", "z"]


class Polynomial:
    """Sparse multivariate polynomial: ``{exponent tuple: coefficient}``."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], float] | None = None):
        self.nvars = nvars
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def constant(cls, nvars: int, c: float) -> Polynomial:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> Polynomial:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def from_terms(cls, nvars: int, pairs: Iterable[tuple[float, Sequence[int]]]) -> Polynomial:
        acc: dict[tuple[int, ...], float] = defaultdict(float)
        for coef, exps in pairs:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            acc[exps] += coef
        return cls(nvars, dict(acc))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {k: v * other for k, v in self.terms.items()})
        out: dict[tuple[int, ...], float] = defaultdict(float)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[tuple(a + b for a, b in zip(k1, k2))] += v1 * v2
        return Polynomial(self.nvars, dict(out))

    __rmul__ = __mul__

    def diff(self, i: int) -> Polynomial:
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = v * k[i]
        return Polynomial(self.nvars, out)

    def __call__(self, point):
        point = np.asarray(point)
        total = 0.0
        for k, v in self.terms.items():
            m = v
            for x, e in zip(point, k):
                if e:
                    m = m * x**e
            total = total + m
        return total

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.terms!r})"


_MONO = re.compile(r"^([txyz])(\d*)(?:\^(\d+))?$")


def parse_monomial(text: str, n: int) -> tuple[int, ...]:
    """Exponent vector of a monomial written like ``"t1^2*x2*y"``; ``"1"`` is the unit."""
    names = coordinate_names(n)
    exps = [0] * len(names)
    text = text.strip()
    if text in ("", "1"):
        return tuple(exps)
    for factor in text.split("*"):
        m = _MONO.match(factor.strip())
        if not m:
            raise UnknownCoordinate(f"cannot parse factor {factor!r}")
        name = m.group(1) + m.group(2)
        if name not in names:
            raise UnknownCoordinate(f"coordinate {name!r} does not exist for n={n}")
        exps[names.index(name)] += int(m.group(3) or 1)
    return tuple(exps)


@cache
def frame_field_table(n: int) -> tuple[tuple[tuple[int, float, int | None], ...], ...]:
    """Coordinate-basis coefficients of the left-invariant fields.

    Entry ``f`` (0 <= f < 4n adapted horizontal frame, then xi1, xi2, xi3)
    is a tuple of ``(target_coordinate, constant, source_coordinate)``
    meaning the field has the term ``constant * u[source] * d/du[target]``
    (``source`` None for a constant coefficient).

    Horizontal fields are the generators ``d/ds (q, w) o (s v, 0)`` of right
    translation, i.e. ``d_v + 2 Im(q_a conj(v))`` on the imaginary part.
    """
    N = 4 * n
    basis = [pq.ONE, pq.R3, pq.R1, pq.R2]
    fields = []
    for a in range(n):
        for k in range(4):
            comp = ADAPTED_TO_COMPONENT[k]
            v = basis[comp]
            terms = [(4 * a + comp, 1.0, None)]
            for m in range(4):
                w = pq.im(pq.mul(basis[m], pq.conj(v)))
                for off, c in enumerate((w.x, w.y, w.z)):
                    if c:
                        terms.append((N + off, 2.0 * c, 4 * a + m))
            fields.append(tuple(terms))
    for s in range(3):
        fields.append(((N + _REEB_OFFSET[s], 2.0, None),))
    return tuple(fields)


def reeb_field_index(n: int, s: int) -> int:
    """Field id of xi_{s+1}."""
    return 4 * n + s


def _field_id(n: int, field_id) -> int:
    if isinstance(field_id, str):
        m = re.fullmatch(r"xi([123])", field_id)
        if not m:
            raise UnknownField(field_id)
        return 4 * n + int(m.group(1)) - 1
    if isinstance(field_id, (int, np.integer)) and 0 <= field_id < 4 * n + 3:
        return int(field_id)
    raise UnknownField(field_id)


class ScalarField:
    """Polynomial function on ``G(pH)`` with memoised frame derivatives."""

    def __init__(self, n: int, poly: Polynomial):
        if poly.nvars != 4 * n + 3:
            raise ValueError("polynomial has the wrong number of variables")
        self.n = n
        self.poly = poly
        self._cache: dict[tuple[int, ...], Polynomial] = {(): poly}

    @classmethod
    def from_terms(cls, n: int, pairs) -> ScalarField:
        """``pairs`` are ``(coefficient, exponents)`` with exponents an int vector or monomial string."""
        conv = []
        for coef, exps in pairs:
            if isinstance(exps, str):
                exps = parse_monomial(exps, n)
            conv.append((float(coef), exps))
        return cls(n, Polynomial.from_terms(4 * n + 3, conv))

    def __call__(self, point):
        return self.poly(point)

    def jet(self, seq: Sequence[int]) -> Polynomial:
        """Polynomial ``F1(F2(...Fm(f)))`` for field ids ``seq = (F1, ..., Fm)``."""
        seq = tuple(_field_id(self.n, f) for f in seq)
        if seq not in self._cache:
            inner = self.jet(seq[1:])
            self._cache[seq] = derive_along(inner, seq[0], self.n)
        return self._cache[seq]


def derive_along(f, field_id, n: int | None = None):
    """Apply a frame field (adapted index or ``"xi1".."xi3"``) to a polynomial."""
    if isinstance(f, ScalarField):
        return ScalarField(f.n, derive_along(f.poly, field_id, f.n))
    nv = f.nvars
    if n is None:
        n = (nv - 3) // 4
    fid = _field_id(n, field_id)
    out = Polynomial(nv)
    for target, c, source in frame_field_table(n)[fid]:
        d = f.diff(target)
        if d.is_zero():
            continue
        term = d * c
        if source is not None:
            term = term * Polynomial.variable(nv, source)
        out = out + term
    return out


@dataclass(frozen=True)
class GradientData:
    """First and second order jets of ``h`` at a point, in the flat frame.

    ``hess[a, b] = e_a(e_b h)``, which is the horizontal Hessian of the flat
    (frame-parallel) connection.
    """

    frame: PqcFrame
    value: complex | float
    dh: np.ndarray
    dxi: np.ndarray
    hess: np.ndarray

    @property
    def grad(self) -> np.ndarray:
        """Frame components of the horizontal gradient ``g(grad h, X) = dh(X)``."""
        return self.frame.ginv @ self.dh

    @property
    def grad_norm2(self):
        return self.dh @ self.frame.ginv @ self.dh

    @property
    def laplacian(self):
        return np.einsum("ab,ab->", self.frame.ginv, self.hess)

    def dh_I(self, s: int) -> np.ndarray:
        """Vector ``b -> dh(I_s e_b)``."""
        return self.frame.I[s].T @ self.dh

    def perturbed(self, other: GradientData, step) -> GradientData:
        return GradientData(
            self.frame,
            self.value + step * other.value,
            self.dh + step * other.dh,
            self.dxi + step * other.dxi,
            self.hess + step * other.hess,
        )


def gradient_data(h: ScalarField, point, frame: PqcFrame | None = None) -> GradientData:
    n = h.n
    N = 4 * n
    frame = frame or build_adapted_frame(n)
    point = np.asarray(point, dtype=float)
    dh = np.array([h.jet((a,))(point) for a in range(N)])
    dxi = np.array([h.jet((N + s,))(point) for s in range(3)])
    hess = np.array([[h.jet((a, b))(point) for b in range(N)] for a in range(N)])
    return GradientData(frame, h(point), dh, dxi, hess)


def gradient_data_derivative(h: ScalarField, point, a: int, frame: PqcFrame | None = None) -> GradientData:
    """Derivative of every entry of :func:`gradient_data` along the frame field ``a``."""
    n = h.n
    N = 4 * n
    frame = frame or build_adapted_frame(n)
    point = np.asarray(point, dtype=float)
    dh = np.array([h.jet((a, b))(point) for b in range(N)])
    dxi = np.array([h.jet((a, N + s))(point) for s in range(3)])
    hess = np.array([[h.jet((a, b, c))(point) for c in range(N)] for b in range(N)])
    return GradientData(frame, h.jet((a,))(point), dh, dxi, hess)


def third_order(h: ScalarField, point, a, b, c) -> float:
    """Exact ``e_a(e_b(e_c h))`` at ``point``."""
    return h.jet((a, b, c))(np.asarray(point, dtype=float))
