"""Möbius transformations of the upper half-plane and the unit disk.

A :class:`MoebiusMap` is a 2x2 matrix of determinant one taken up to sign,
i.e. an element of PSL(2, R).  Entries are either Python ``int`` (exact mode,
used by the built-in arithmetic groups) or ``float``.  Every constructor
canonicalises the sign so that the first nonzero entry of ``(a, b, c, d)`` is
positive, which makes equality and hashing sign-insensitive.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from numbers import Integral

import numpy as np

DET_TOL = 1e-12
PARABOLIC_TOL = 1e-12


class Kind(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def _is_exact(*xs) -> bool:
    return all(isinstance(x, Integral) and not isinstance(x, bool) for x in xs)


def _canonical_sign(a, b, c, d):
    for v in (a, b, c, d):
        if v != 0:
            if v < 0:
                return -a, -b, -c, -d
            return a, b, c, d
    raise ValueError("zero matrix is not a Möbius map")


@dataclass(frozen=True)
class MoebiusMap:
    """Element of PSL(2, R) stored as a sign-canonical 2x2 matrix.

    Use :meth:`MoebiusMap.of` (or :func:`mobius`) to build one; the raw
    dataclass constructor does not normalise.
    """

    a: float | int
    b: float | int
    c: float | int
    d: float | int

    @classmethod
    def of(cls, a, b, c, d, *, check: bool = True) -> "MoebiusMap":
        if _is_exact(a, b, c, d):
            a, b, c, d = int(a), int(b), int(c), int(d)
            if check and a * d - b * c != 1:
                raise ValueError(f"determinant {a * d - b * c} != 1")
        else:
            a, b, c, d = float(a), float(b), float(c), float(d)
            if check:
                det = a * d - b * c
                scale = max(1.0, abs(a * d), abs(b * c))
                if abs(det - 1.0) > DET_TOL * scale:
                    raise ValueError(f"determinant {det!r} != 1")
        return cls(*_canonical_sign(a, b, c, d))

    @classmethod
    def from_array(cls, arr) -> "MoebiusMap":
        arr = np.asarray(arr)
        return cls.of(arr[0, 0].item(), arr[0, 1].item(), arr[1, 0].item(), arr[1, 1].item())

    @property
    def exact(self) -> bool:
        return _is_exact(self.a, self.b, self.c, self.d)

    @property
    def trace(self):
        return self.a + self.d

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def to_float(self) -> "MoebiusMap":
        return MoebiusMap(float(self.a), float(self.b), float(self.c), float(self.d))

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(*_canonical_sign(self.d, -self.b, -self.c, self.a))

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def __call__(self, z):
        return act(self, z)

    def __pow__(self, n: int) -> "MoebiusMap":
        if n < 0:
            return self.inverse() ** (-n)
        result = identity(exact=self.exact)
        base = self
        while n:
            if n & 1:
                result = compose(result, base)
            base = compose(base, base)
            n >>= 1
        return result

    def is_identity(self, tol: float = 1e-12) -> bool:
        if self.exact:
            return self.entries() == (1, 0, 0, 1)
        return (abs(self.a - 1) <= tol and abs(self.b) <= tol
                and abs(self.c) <= tol and abs(self.d - 1) <= tol)

    def isclose(self, other: "MoebiusMap", tol: float = 1e-10) -> bool:
        """Sign-insensitive approximate equality."""
        x = np.array(self.entries(), dtype=float)
        y = np.array(other.entries(), dtype=float)
        return bool(min(np.max(np.abs(x - y)), np.max(np.abs(x + y))) <= tol)


def mobius(a, b, c, d) -> MoebiusMap:
    return MoebiusMap.of(a, b, c, d)


def identity(exact: bool = True) -> MoebiusMap:
    return MoebiusMap(1, 0, 0, 1) if exact else MoebiusMap(1.0, 0.0, 0.0, 1.0)


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """Matrix product ``m1 @ m2`` (apply ``m2`` first), sign-canonicalised."""
    a = m1.a * m2.a + m1.b * m2.c
    b = m1.a * m2.b + m1.b * m2.d
    c = m1.c * m2.a + m1.d * m2.c
    d = m1.c * m2.b + m1.d * m2.d
    return MoebiusMap(*_canonical_sign(a, b, c, d))


def sl2_product(*maps: MoebiusMap) -> tuple:
    """Plain matrix product of the stored representatives, without sign canonicalisation.

    Useful when an SL(2) trace (rather than the PSL(2) trace up to sign) is wanted.
    """
    a, b, c, d = 1, 0, 0, 1
    for m in maps:
        a, b, c, d = (a * m.a + b * m.c, a * m.b + b * m.d,
                      c * m.a + d * m.c, c * m.b + d * m.d)
    return a, b, c, d


def conjugate(sigma: MoebiusMap, m: MoebiusMap) -> MoebiusMap:
    """Return ``sigma m sigma^-1``."""
    return compose(compose(sigma, m), sigma.inverse())


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class HyperbolicPoint:
    """A point of the hyperbolic plane in the half-plane (``"H"``) or disk (``"D"``) model.

    The disk model is the Cayley image of the half-plane with base point
    ``i``, u = (z - i) / (z + i).
    """

    value: complex
    model: str = "H"

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if self.model == "H":
            if not v.imag > 0:
                raise ValueError(f"{v} is not in the upper half-plane")
        elif self.model == "D":
            if not abs(v) < 1:
                raise ValueError(f"{v} is not in the unit disk")
        else:
            raise ValueError(f"unknown model {self.model!r}")

    def to_half_plane(self) -> "HyperbolicPoint":
        if self.model == "H":
            return self
        u = self.value
        return HyperbolicPoint(1j * (1 + u) / (1 - u), "H")

    def to_disk(self) -> "HyperbolicPoint":
        if self.model == "D":
            return self
        z = self.value
        return HyperbolicPoint((z - 1j) / (z + 1j), "D")

    @property
    def z(self) -> complex:
        return self.to_half_plane().value


def as_half_plane(p) -> complex:
    """Coerce a :class:`HyperbolicPoint` or complex number to a half-plane coordinate."""
    if isinstance(p, HyperbolicPoint):
        return p.z
    z = complex(p)
    if not z.imag > 0:
        raise ValueError(f"{z} is not in the upper half-plane")
    return z


def act(m: MoebiusMap, p):
    """Apply ``m`` to a point.

    Accepts a complex number in the upper half-plane or a
    :class:`HyperbolicPoint`; the result has the same type and model.
    """
    if isinstance(p, HyperbolicPoint):
        w = act(m, p.z)
        out = HyperbolicPoint(w, "H")
        return out.to_disk() if p.model == "D" else out
    z = complex(p)
    if not (z.imag > 0 and math.isfinite(z.imag) and math.isfinite(z.real)):
        raise ValueError(f"{z} is not an interior point of the upper half-plane")
    den = m.c * z + m.d
    if den == 0:
        raise ValueError("point is the pole of the map")
    w = (m.a * z + m.b) / den
    # (az+b)/(cz+d) has Im = y / |cz+d|^2; use it to keep Im > 0 without cancellation
    return complex(w.real, z.imag / abs(den) ** 2)


# ---------------------------------------------------------- classification


def classify(m: MoebiusMap, tol: float = PARABOLIC_TOL) -> Kind:
    if m.exact:
        if m.is_identity():
            return Kind.IDENTITY
        t = abs(m.trace)
        if t < 2:
            return Kind.ELLIPTIC
        return Kind.PARABOLIC if t == 2 else Kind.HYPERBOLIC
    if m.is_identity(tol):
        return Kind.IDENTITY
    t = abs(m.trace)
    if abs(t - 2) <= tol:
        return Kind.PARABOLIC
    return Kind.ELLIPTIC if t < 2 else Kind.HYPERBOLIC


def elliptic_order(m: MoebiusMap, max_order: int = 10_000, tol: float = 1e-9) -> int | None:
    """Order of an elliptic element in PSL(2,R), or ``None`` if not of finite order <= max_order.

    An elliptic element with |tr| = 2 cos(theta), 0 < theta < pi/2, rotates by
    2 theta about its fixed point, so its order is the denominator of theta/pi.
    """
    if classify(m) is not Kind.ELLIPTIC:
        raise ValueError("not elliptic")
    theta = math.acos(min(1.0, abs(float(m.trace)) / 2))
    x = theta / math.pi
    for q in range(2, max_order + 1):
        if abs(x * q - round(x * q)) < tol * q:
            return q
    return None


NORM_CONVENTIONS = ("trace", "geodesic")


def norm_from_trace(t, convention: str = "trace") -> float:
    """Norm of a hyperbolic element from its trace.

    ``"trace"`` solves N + 1/N = |tr|.  ``"geodesic"`` solves
    N^(1/2) + N^(-1/2) = |tr|, so that log N is the translation length.
    """
    t = abs(float(t))
    if not t > 2:
        raise ValueError(f"|trace| = {t} is not hyperbolic")
    # larger root of x^2 - t x + 1, written to avoid cancellation
    root = (t + math.sqrt((t - 2) * (t + 2))) / 2
    if convention == "trace":
        return root
    if convention == "geodesic":
        return root * root
    raise ValueError(f"unknown norm convention {convention!r}")


def norm_and_length(m: MoebiusMap, convention: str = "trace") -> tuple[float, float]:
    """Return ``(N, log N)`` for a hyperbolic map."""
    if classify(m) is not Kind.HYPERBOLIC:
        raise ValueError("norm is defined only for hyperbolic elements")
    n = norm_from_trace(m.trace, convention)
    return n, math.log(n)


def fixpoint_elliptic(m: MoebiusMap) -> HyperbolicPoint:
    """Interior fixed point, the root of c z^2 + (d - a) z - b = 0 with Im z > 0."""
    if classify(m) is not Kind.ELLIPTIC:
        raise ValueError("not elliptic")
    a, b, c, d = (float(x) for x in m.entries())
    disc = (d - a) ** 2 + 4 * b * c
    sq = cmath.sqrt(disc)
    z = (a - d + sq) / (2 * c)
    if z.imag <= 0:
        z = (a - d - sq) / (2 * c)
    return HyperbolicPoint(z, "H")


def translation_length(m: MoebiusMap) -> float:
    """Hyperbolic translation length 2 arccosh(|tr|/2)."""
    return 2 * math.acosh(abs(float(m.trace)) / 2)


# ------------------------------------------------------------------ disk


class CayleyMap:
    """The map u = (z - z0) / (z - conj(z0)) from the half-plane to the disk."""

    def __init__(self, z0):
        self.z0 = as_half_plane(z0)
        # matrix of the map as a complex Möbius transformation
        self.matrix = np.array([[1, -self.z0], [1, -self.z0.conjugate()]], dtype=complex)
        self.inverse_matrix = np.linalg.inv(self.matrix)

    def __call__(self, z) -> complex:
        z = as_half_plane(z)
        return (z - self.z0) / (z - self.z0.conjugate())

    def inverse(self, u: complex) -> complex:
        (a, b), (c, d) = self.inverse_matrix
        return (a * u + b) / (c * u + d)

    def conjugate(self, m: MoebiusMap) -> np.ndarray:
        """Complex matrix of ``C m C^-1``, the action of ``m`` in the disk coordinate."""
        return self.matrix @ m.as_array() @ self.inverse_matrix

    def rotation_multiplier(self, m: MoebiusMap) -> complex:
        """For ``m`` fixing ``z0``, the unit complex number lambda with u -> lambda u."""
        g = self.conjugate(m)
        if abs(g[0, 1]) > 1e-9 * np.abs(g).max() or abs(g[1, 0]) > 1e-9 * np.abs(g).max():
            raise ValueError("map does not fix the base point")
        return complex(g[0, 0] / g[1, 1])


def cayley_to_disk(z0=1j) -> CayleyMap:
    return CayleyMap(z0)


# -------------------------------------------------------------- distance


def hyperbolic_distance(p, q) -> float:
    """Hyperbolic distance, cosh d = 1 + |z - w|^2 / (2 Im z Im w)."""
    z, w = as_half_plane(p), as_half_plane(q)
    # 2 asinh form is accurate for small distances
    return 2 * math.asinh(abs(z - w) / (2 * math.sqrt(z.imag * w.imag)))


def cosh_distance(p, q) -> float:
    z, w = as_half_plane(p), as_half_plane(q)
    return 1 + abs(z - w) ** 2 / (2 * z.imag * w.imag)


def displacement_cosh(m: MoebiusMap, p) -> float:
    """cosh d(p, m p) from the matrix alone.

    With h the affine map sending i to p, cosh d(p, m p) = |h^-1 m h|_F^2 / 2.
    """
    z = as_half_plane(p)
    x, y = z.real, z.imag
    r = math.sqrt(y)
    h = np.array([[r, x / r], [0.0, 1 / r]])
    hinv = np.array([[1 / r, -x / r], [0.0, r]])
    n = hinv @ m.as_array() @ h
    return float(np.sum(n * n) / 2)
