"""Local analysis at a cone point of order m in the disk model.

Near the fixed point a Beltrami differential has the form

    mu(u) = ((1 - |u|^2)^2 / 4) sum_{j >= 1} conj(a_{jm}) conj(u)^(jm - 2),

and similarly nu with coefficients b_{jm}.  The solution f of
(Delta_0 + 1/2) f = mu conj(nu) splits into Fourier modes f_n(r) e^(i n theta),
each solving

    -((1 - r^2)^2 / 16)(f'' + f'/r - n^2 f / r^2) + f / 2 = ((1 - r^2)^4 / 16) src_n(r)

with src_n(r) = sum_j conj(a_{jm}) b_{jm+n} r^(2jm + n - 4).  Writing
f = sum_k f_k r^k the equation becomes

    (k^2 - n^2) f_k = [8 (1 - r^2)^-2 f]_{k-2} - [(1 - r^2)^2 src_n]_{k-2},

which fixes every coefficient once the free one (f_0 for n = 0, f_|n|
otherwise) is chosen.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

PARITY_TOL = 1e-12


@dataclass(frozen=True)
class LocalBeltramiData:
    """Coefficients a_{jm}, b_{jm} (j = 1..J) of mu and nu at a cone point of order m."""

    m: int
    a: tuple[complex, ...]
    b: tuple[complex, ...]

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("cone order must be at least 2")
        object.__setattr__(self, "a", tuple(complex(x) for x in self.a))
        object.__setattr__(self, "b", tuple(complex(x) for x in self.b))

    @property
    def J(self) -> int:
        return max(len(self.a), len(self.b))

    def a_at(self, index: int) -> complex:
        """a_index (zero unless index is a positive multiple of m within range)."""
        return _coef(self.a, index, self.m)

    def b_at(self, index: int) -> complex:
        return _coef(self.b, index, self.m)

    def mu(self, u):
        return _beltrami(self.a, self.m, u)

    def nu(self, u):
        return _beltrami(self.b, self.m, u)

    @property
    def mu0(self) -> complex:
        """mu(0): conj(a_2)/4 when m = 2, else 0."""
        return self.a_at(2).conjugate() / 4 if self.m == 2 else 0j

    @property
    def nu0(self) -> complex:
        return self.b_at(2).conjugate() / 4 if self.m == 2 else 0j

    def source_terms(self, n: int) -> dict[int, complex]:
        """Powers and coefficients of src_n: {2jm + n - 4: conj(a_{jm}) b_{jm+n}}."""
        if n % self.m:
            raise ValueError(f"mode {n} is not a multiple of m = {self.m}")
        out: dict[int, complex] = {}
        for j in range(1, len(self.a) + 1):
            c = self.a_at(j * self.m).conjugate() * self.b_at(j * self.m + n)
            if c != 0:
                p = 2 * j * self.m + n - 4
                if p < 0:
                    raise RuntimeError("negative source power")
                out[p] = out.get(p, 0j) + c
        return out

    @classmethod
    def random(cls, m: int, J: int, rng: np.random.Generator, scale: float = 1.0) -> "LocalBeltramiData":
        a = scale * (rng.standard_normal(J) + 1j * rng.standard_normal(J))
        b = scale * (rng.standard_normal(J) + 1j * rng.standard_normal(J))
        return cls(m, tuple(a), tuple(b))


def _coef(seq, index: int, m: int) -> complex:
    if index <= 0 or index % m:
        return 0j
    j = index // m
    return seq[j - 1] if j <= len(seq) else 0j


def _beltrami(coefs, m: int, u):
    u = np.asarray(u, dtype=complex)
    ub = np.conj(u)
    s = np.zeros_like(u)
    for j, c in enumerate(coefs, start=1):
        s = s + np.conj(c) * ub ** (j * m - 2)
    return (1 - np.abs(u) ** 2) ** 2 / 4 * s


# ---------------------------------------------------------- equivariance


def equivariant_projection(phi, m: int):
    """P phi(u) = (1/m) sum_j phi(w^j u) w^(-2j), w = e^(2 pi i / m).

    The result satisfies P phi(w u) = w^2 P phi(u), the rule obeyed by the
    expansion of mu above.
    """
    w = cmath.exp(2j * math.pi / m)

    def projected(u):
        u = np.asarray(u, dtype=complex)
        return sum(phi(w ** j * u) * w ** (-2 * j) for j in range(m)) / m

    return projected


@dataclass(frozen=True)
class FourierCheck:
    m: int
    r: float
    coefficients: dict[int, complex]      # index n -> a_n recovered on the circle
    max_spurious: float

    def passes(self, tol: float = 1e-10) -> bool:
        return self.max_spurious < tol


def equivariance_fourier_check(mu, m: int, r: float = 0.5, max_index: int = 32,
                               samples: int | None = None) -> FourierCheck:
    """Recover the coefficients a_n of mu on the circle |u| = r and measure those with n not = 0 mod m.

    The conjugate of (4 / (1 - r^2)^2) mu(r e^(i theta)) has Fourier mode
    a_n r^(n-2) at frequency n - 2.
    """
    samples = 4 * max_index if samples is None else samples
    if samples < 4 * max_index:
        raise ValueError(f"need at least {4 * max_index} samples on the circle")
    if not 0 < r < 1:
        raise ValueError("radius must lie in (0, 1)")
    theta = 2 * math.pi * np.arange(samples) / samples
    g = np.conj(4 / (1 - r * r) ** 2 * np.asarray(mu(r * np.exp(1j * theta)), dtype=complex))
    modes = np.fft.fft(g) / samples
    coefs: dict[int, complex] = {}
    spurious = 0.0
    for q in range(-max_index, max_index + 1):
        n = q + 2
        val = complex(modes[q % samples]) / r ** q
        coefs[n] = val
        if n % m:
            # compare the mode itself, not the radius-rescaled coefficient
            spurious = max(spurious, abs(modes[q % samples]))
    return FourierCheck(m, r, coefs, spurious)


# ---------------------------------------------------------- radial modes


@dataclass(frozen=True)
class RadialSolution:
    """Power series f_n(r) = sum_k coefficients[k] r^k of one Fourier mode."""

    data: LocalBeltramiData
    n: int
    coefficients: np.ndarray        # complex
    leading: complex                # the free constant: c0 for n = 0, f_|n| otherwise
    meta: dict = field(default_factory=dict)

    @property
    def c0(self) -> complex:
        return complex(self.coefficients[0])

    @property
    def c2(self) -> complex:
        return complex(self.coefficients[2])

    @property
    def leading_exponent(self) -> int:
        nz = np.flatnonzero(np.abs(self.coefficients) > 0)
        return int(nz[0]) if nz.size else -1

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r > self.meta.get("r_max", 1.0)) or np.any(r < 0):
            raise ValueError(f"series radius exceeded: need 0 <= r <= {self.meta.get('r_max')}")
        return np.polynomial.polynomial.polyval(r, self.coefficients)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return np.polynomial.polynomial.polyval(r, np.polynomial.polynomial.polyder(self.coefficients))


def _terms_for(r_max: float, tol: float = 1e-18) -> int:
    # coefficients grow at most polynomially, so r^K (K^3) < tol is ample
    K = 16
    while r_max ** K * K ** 3 > tol:
        K += 16
    return K


def mode_series_solve(data: LocalBeltramiData, n: int, c0: complex = 1.0, r_max: float = 0.9,
                      terms: int | None = None) -> RadialSolution:
    """Regular power-series solution of the mode-n equation.

    ``c0`` is the free constant: f_n(0) for n = 0, the coefficient of r^|n|
    otherwise.  ``r_max`` sets the number of series terms needed.
    """
    if n % data.m:
        raise ValueError(f"mode {n} is not a multiple of m = {data.m}")
    if not 0 < r_max < 1:
        raise ValueError("series radius exceeded: r_max must be below 1")
    K = terms if terms is not None else _terms_for(r_max)
    a = abs(n)
    src = np.zeros(K + 1, dtype=complex)
    for p, c in data.source_terms(n).items():
        if p <= K:
            src[p] += c
    # (1 - r^2)^2 src
    rhs_src = src.copy()
    rhs_src[2:] -= 2 * src[:-2]
    rhs_src[4:] += src[:-4]
    f = np.zeros(K + 1, dtype=complex)
    f[a] = c0
    weight = 8.0 * np.arange(1, K // 2 + 2)        # 8 (1 - r^2)^-2 = sum 8 (p + 1) r^(2p)
    for k in range(a + 1, K + 1):
        # [8 (1 - r^2)^-2 f]_{k-2}
        j = k - 2
        acc = 0j
        if j >= 0:
            idx = np.arange(j, -1, -2)
            acc = np.dot(weight[: idx.size], f[idx])
        f[k] = (acc - rhs_src[k - 2]) / (k * k - a * a)
    if any(rhs_src[k - 2] != 0 for k in range(2, a + 1)):
        raise RuntimeError("source reaches below the leading power r^|n|")
    wrong = f[(a + 1) % 2::2]
    if wrong.size and np.max(np.abs(wrong)) > PARITY_TOL * max(1.0, np.max(np.abs(f))):
        raise RuntimeError("series has terms of the wrong parity")
    f[(a + 1) % 2::2] = 0
    return RadialSolution(data, n, f, complex(c0), {"terms": K, "r_max": r_max})


def fit_c2(sol: RadialSolution, r_lo: float = 1e-3, r_hi: float = 1e-2, points: int = 40) -> complex:
    """Least-squares c2 from f_0(r) - c0 against r^2 and r^4 on [r_lo, r_hi]."""
    r = np.linspace(r_lo, r_hi, points)
    y = sol(r) - sol.c0
    basis = np.stack([r ** 2, r ** 4], axis=1)
    re = np.linalg.lstsq(basis, y.real, rcond=None)[0]
    im = np.linalg.lstsq(basis, y.imag, rcond=None)[0]
    return complex(re[0], im[0])


@dataclass(frozen=True)
class CrossCheck:
    r0: float
    r1: float
    max_deviation: float            # relative to max |f| on the grid
    grid: np.ndarray
    series: np.ndarray
    integrated: np.ndarray


def mode_ode_crosscheck(sol: RadialSolution, r0: float = 0.01, r1: float = 0.5,
                        points: int = 50, rtol: float = 1e-13, atol: float | None = None) -> CrossCheck:
    """Integrate the mode equation with DOP853 from r0 using series data and compare on [r0, r1]."""
    if not 0 < r0 < r1 < 1:
        raise ValueError("need 0 < r0 < r1 < 1")
    if r1 > 0.9:
        raise ValueError("integration too close to r = 1; keep r1 <= 0.9")
    n2 = sol.n * sol.n
    terms = sol.data.source_terms(sol.n)

    def source(r):
        return sum(c * r ** p for p, c in terms.items())

    def rhs(r, y):
        f = y[0] + 1j * y[1]
        fp = y[2] + 1j * y[3]
        w = (1 - r * r) ** 2
        # f'' = -f'/r + n^2 f / r^2 + 8 f / w - w src
        fpp = -fp / r + n2 * f / (r * r) + 8 * f / w - w * source(r)
        return [fp.real, fp.imag, fpp.real, fpp.imag]

    f0 = complex(sol(r0))
    fp0 = complex(sol.derivative(r0))
    grid = np.linspace(r0, r1, points)
    if atol is None:
        # f_n starts like r^|n|, so absolute tolerance must follow the initial size
        atol = 1e-3 * rtol * max(abs(f0), abs(fp0) * r0, 1e-300)
    res = solve_ivp(rhs, (r0, r1), [f0.real, f0.imag, fp0.real, fp0.imag], method="DOP853",
                    t_eval=grid, rtol=rtol, atol=atol)
    if not res.success:
        raise RuntimeError(f"integrator failed: {res.message}")
    ode = res.y[0] + 1j * res.y[1]
    ser = sol(grid)
    dev = float(np.max(np.abs(ode - ser)) / max(np.max(np.abs(ser)), 1e-300))
    return CrossCheck(r0, r1, dev, grid, ser, ode)


def expected_c2(data: LocalBeltramiData, c0: complex) -> complex:
    """2 c0 for m > 2 and 2 c0 - 4 mu(0) conj(nu(0)) for m = 2."""
    if data.m > 2:
        return 2 * c0
    return 2 * c0 - 4 * data.mu0 * data.nu0.conjugate()
