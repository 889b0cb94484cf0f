"""Resolvent kernels, Eisenstein series and related checks.

Conventions: the Laplacian is Delta_0 = -y^2 d^2/dz dzbar = -(y^2/4)(d_xx + d_yy)
and areas are measured with dx dy / y^2.  At s = 2 the free resolvent kernel of
Delta_0 + 1/2 is

    Q(d) = (2/pi) Q_1(cosh d),   Q_1(x) = (x/2) log((x+1)/(x-1)) - 1,

which behaves like -(2/pi) log d at short distance.

Automorphic sums come in two flavours.  ``method="words"`` sums over a word
ball (any group).  ``method="modular"`` (built-in groups) enumerates the cosets
of the cusp stabiliser exactly by bottom rows of PSL(2, Z), keeps those whose
image in the cusp frame has height >= 2^-L, and sums the cusp translations in
closed form through the Fourier expansion of the periodised free kernel.
Because the height cut is defined by the orbit itself, the truncated
Eisenstein series is exactly invariant under the group, up to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import ive, kve

from .groups import PresentedGroup, cusp_coset_reps, word_ball
from .modular import complete_row, coprime_rows
from .moebius import (
    Kind,
    MoebiusMap,
    act,
    as_half_plane,
    classify,
    compose,
    fixpoint_elliptic,
)
from .spectra import TruncatedSumResult

FOURIER_GAP = 0.2       # use the Fourier expansion when |Y - v| >= this
DIRECT_TERMS = 400      # direct translates per side, per unit of height, otherwise
DEFAULT_LEVEL = 14
DEFAULT_WORD_RADIUS = 10


# ------------------------------------------------------------ free kernel


def legendre_q1(x):
    """Legendre function of the second kind Q_1(x) for x > 1."""
    x = np.asarray(x, dtype=float)
    return 0.5 * x * np.log((x + 1) / (x - 1)) - 1


def free_resolvent_s2(d):
    """(2/pi) Q_1(cosh d) for d > 0, accurate for both small and large d.

    For d < 1 uses Q_1(cosh d) = -cosh(d) log tanh(d/2) - 1.  For d >= 1 uses
    the convergent series sum_k 4k/(4k^2 - 1) e^(-2kd), which avoids the
    cancellation in the closed form.
    """
    scalar = np.ndim(d) == 0
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if np.any(~(d > 0)):
        raise ValueError("distance must be positive")
    out = np.empty_like(d)
    small = d < 1
    ds = d[small]
    out[small] = -np.cosh(ds) * np.log(np.tanh(ds / 2)) - 1
    dl = d[~small]
    if dl.size:
        q = np.exp(-2 * dl)
        acc = np.zeros_like(dl)
        power = np.ones_like(dl)
        for k in range(1, 40):
            power = power * q
            acc += 4 * k / (4 * k * k - 1) * power
        out[~small] = acc
    out *= 2 / math.pi
    return float(out[0]) if scalar else out


def free_resolvent_derivative(d):
    """d/dd of (2/pi) Q_1(cosh d)."""
    d = np.asarray(d, dtype=float)
    x = np.cosh(d)
    # Q_1'(x) = (1/2) log((x+1)/(x-1)) - x / (x^2 - 1)
    dq = 0.5 * np.log((x + 1) / (x - 1)) - x / np.sinh(d) ** 2
    return 2 / math.pi * dq * np.sinh(d)


def hyperbolic_distances(z: complex, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=complex)
    return 2 * np.arcsinh(np.abs(z - pts) / (2 * np.sqrt(z.imag * pts.imag)))


def periodized_free_kernel(Z: complex, u, v) -> np.ndarray:
    """sum_n Q(d(Z, u + n + i v)) for arrays of points u + i v.

    Uses the Fourier expansion in Re Z when |Im Z - v| >= FOURIER_GAP:

        4 [ lo^2 / (3 hi) + 2 sum_m sqrt(Y v) I_{3/2}(2 pi m lo) K_{3/2}(2 pi m hi) cos(2 pi m (X - u)) ]

    with lo, hi the smaller and larger of Y, v.  Otherwise sums translates
    directly, N = 400 max(Y, v) translates on each side, and adds the
    analytic tail, whose leading term is (16 / 9 pi) (Y v)^2 / (N + 1/2)^3.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    X, Y = Z.real, Z.imag
    out = np.empty(u.shape)
    gap = np.abs(Y - v)
    far = gap >= FOURIER_GAP
    if np.any(far):
        vf, uf = v[far], u[far]
        lo, hi = np.minimum(Y, vf), np.maximum(Y, vf)
        mmax = int(math.ceil(40 / (2 * math.pi * max(gap[far].min(), FOURIER_GAP))))
        m = np.arange(1, mmax + 1)[None, :]
        a = 2 * math.pi * m * lo[:, None]
        b = 2 * math.pi * m * hi[:, None]
        ik = ive(1.5, a) * kve(1.5, b) * np.exp(a - b)
        cosines = np.cos(2 * math.pi * m * (X - uf[:, None]))
        modes = np.sqrt(Y * vf) * np.sum(ik * cosines, axis=1)
        out[far] = 4 * (lo * lo / (3 * hi) + 2 * modes)
    near = np.flatnonzero(~far)
    for start in range(0, near.size, 1024):
        idx = near[start:start + 1024]
        vn, un = v[idx], u[idx]
        # translates beyond N contribute ~ (Yv)^2 / n^4; N scales with the heights
        N = max(8, int(math.ceil(DIRECT_TERMS * max(Y, float(vn.max())))))
        n = np.arange(-N, N + 1)[None, :]
        x0 = un + np.round(X - un)
        pts = (x0[:, None] + n) + 1j * vn[:, None]
        d = 2 * np.arcsinh(np.abs(Z - pts) / (2 * np.sqrt(Y * vn[:, None])))
        if d.min() < 1e-6:
            raise ValueError("orbit collision: evaluation point lies on the orbit")
        a2 = Y * Y + vn * vn
        tail = np.zeros(idx.size)
        # midpoint-rule tail of (8 / 3 pi) (Y v)^2 / (t^2 + a^2)^2 beyond each end
        for T in (N + 0.5 + (x0 - X), N + 0.5 - (x0 - X)):
            tail += 1 / (3 * T ** 3) - (0.4 * a2 + 1 / 6) / T ** 5
        tail *= 8 / (3 * math.pi) * (Y * vn) ** 2
        out[idx] = free_resolvent_s2(d.ravel()).reshape(d.shape).sum(axis=1) + tail
    return out


# --------------------------------------------------------------- orbits


@dataclass(frozen=True)
class CuspFrame:
    """Data to move points into the frame where the cusp is at infinity with width one."""

    to_cusp: MoebiusMap           # sigma^-1 (float)
    from_cusp: MoebiusMap         # sigma


def cusp_frame(group: PresentedGroup) -> CuspFrame:
    """The width-one cusp frame used by the kernels.

    For groups with a modular realisation this is sigma = frame^-1 g D, where g is
    the integer cusp conjugator and D = diag(sqrt(w), 1/sqrt(w)); otherwise the
    group's stored scaling map.
    """
    if group.cusp is None:
        raise ValueError(f"group {group.name!r} has no cusp")
    if group.modular is not None:
        md = group.modular
        r = math.sqrt(md.width)
        sigma = compose(compose(md.frame.inverse().to_float(), md.cusp_conjugator.to_float()),
                        MoebiusMap.of(r, 0.0, 0.0, 1 / r))
    else:
        sigma = group.cusp.scaling.to_float()
    return CuspFrame(sigma.inverse(), sigma)


@dataclass(frozen=True)
class Orbit:
    """Orbit points of a base point in the cusp frame, one per coset of the cusp stabiliser.

    ``levels`` holds the truncation level at which each point first appears.
    When ``periodic`` is true each point stands for its full orbit under
    z -> z + 1; otherwise points are individual group images.
    """

    points: np.ndarray
    levels: np.ndarray
    periodic: bool
    method: str
    L: int

    def upto(self, level: int) -> np.ndarray:
        return self.points[self.levels <= level]


def _modular_orbit(group: PresentedGroup, zp: complex, L: int, with_x: bool = True) -> Orbit:
    md = group.modular
    chi = md.character
    if chi.k != md.width or math.gcd(chi.on_p, chi.k) != 1:
        raise ValueError("modular realisation does not have a single cusp of full width")
    z0 = act(md.frame.to_float(), zp) if not md.frame.is_identity() else complex(zp)
    w = md.width
    y0 = z0.imag
    eps = 2.0 ** (-L)
    rows = coprime_rows(z0, y0 / (w * eps))
    c = rows[:, 0].astype(float)
    d = rows[:, 1].astype(float)
    den = (c * z0.real + d) ** 2 + (c * y0) ** 2
    heights = y0 / (w * den)
    keep = heights >= eps
    rows, heights = rows[keep], heights[keep]
    if with_x:
        inv_p = pow(chi.on_p, -1, chi.k)
        phi_g = chi(md.cusp_conjugator)
        xs = np.empty(len(rows))
        for i, (ci, di) in enumerate(rows.tolist()):
            m0 = complete_row(int(ci), int(di))
            j = (-(phi_g + chi(m0)) * inv_p) % chi.k
            xs[i] = (act(m0, z0).real + j) / w
        pts = xs + 1j * heights
    else:
        pts = 1j * heights
    # level at which a point of height h enters: smallest l with h >= 2^-l
    lev = np.ceil(-np.log2(heights) - 1e-12).astype(int)
    return Orbit(pts, lev, True, "modular", L)


def _word_orbit(group: PresentedGroup, zp: complex, L: int) -> Orbit:
    frame = cusp_frame(group) if group.cusp is not None else None
    ball = word_ball(group, L)
    pts, levs = [], []
    for m, w in ball.elements.items():
        p = act(m, zp)
        if frame is not None:
            p = act(frame.to_cusp, p)
        pts.append(p)
        levs.append(len(w))
    return Orbit(np.array(pts, dtype=complex), np.array(levs), False, "words", L)


def orbit(group: PresentedGroup, zp, L: int, method: str = "auto") -> Orbit:
    zp = as_half_plane(zp)
    method = _method(group, method)
    if method == "modular":
        return _modular_orbit(group, zp, L)
    return _word_orbit(group, zp, L)


def _method(group: PresentedGroup, method: str) -> str:
    if method == "auto":
        return "modular" if (group.modular is not None and group.cusp is not None) else "words"
    if method == "modular" and group.modular is None:
        raise ValueError(f"group {group.name!r} has no modular realisation")
    if method not in ("modular", "words"):
        raise ValueError(f"unknown method {method!r}")
    return method


def _default_level(method: str) -> int:
    return DEFAULT_LEVEL if method == "modular" else DEFAULT_WORD_RADIUS


# ------------------------------------------------------------- Green's


def _green_from_orbit(Zc: complex, orb: Orbit, level: int) -> tuple[float, float]:
    pts = orb.upto(level)
    if orb.periodic:
        vals = periodized_free_kernel(Zc, pts.real, pts.imag)
        d = hyperbolic_distances(Zc, pts.real - np.round(pts.real - Zc.real) + 1j * pts.imag)
    else:
        d = hyperbolic_distances(Zc, pts)
        if d.min() < 1e-6:
            raise ValueError("orbit collision: z lies on the orbit of z'")
        vals = free_resolvent_s2(d)
    return math.fsum(vals.tolist()), float(d.min())


def green_function(group: PresentedGroup, z, zp, L: int | None = None, method: str = "auto",
                   _orbit: Orbit | None = None) -> TruncatedSumResult:
    """Automorphic Green's function G(z, z') = sum_g Q(d(z, g z')) at s = 2.

    The tail estimate is |G_L - G_{L-2}|.
    """
    method = _method(group, method)
    L = _default_level(method) if L is None else L
    z = as_half_plane(z)
    orb = _orbit if _orbit is not None else orbit(group, zp, L, method)
    Zc = act(cusp_frame(group).to_cusp, z) if orb.method == "modular" or group.cusp is not None else z
    value, dmin = _green_from_orbit(Zc, orb, L)
    prev, _ = _green_from_orbit(Zc, orb, L - 2)
    return TruncatedSumResult(value=value, tail=abs(value - prev), terms=int(np.sum(orb.levels <= L)),
                              meta={"L": L, "method": method, "min_distance": dmin})


def green_function_cusp_frame(group: PresentedGroup, Zc: complex, zp, L: int | None = None,
                              method: str = "auto") -> TruncatedSumResult:
    """G with its first argument given in the width-one cusp frame."""
    z = act(cusp_frame(group).from_cusp, complex(Zc))
    return green_function(group, z, zp, L, method)


def elliptic_kernel(group: PresentedGroup, j: int, z, L: int | None = None,
                    method: str = "auto") -> TruncatedSumResult:
    """G(z_j, z) where z_j is the fixed point of the j-th elliptic generator (1-based)."""
    gens = [g for g in group.generators if classify(g) is Kind.ELLIPTIC]
    if not 1 <= j <= len(gens):
        raise ValueError(f"group {group.name!r} has no cone point {j}")
    zj = fixpoint_elliptic(gens[j - 1]).z
    return green_function(group, zj, z, L, method)


def cone_points(group: PresentedGroup) -> list[complex]:
    return [fixpoint_elliptic(g).z for g in group.generators if classify(g) is Kind.ELLIPTIC]


# ------------------------------------------------------------ Eisenstein


@dataclass(frozen=True)
class EisensteinTerms:
    """A fixed finite set of Eisenstein terms, evaluable at nearby points.

    Holding the term set fixed makes the truncated series an exact finite sum
    of eigenfunctions, which is what finite-difference checks need.
    """

    group: PresentedGroup
    method: str
    rows: np.ndarray | None          # modular: PSL(2,Z) bottom rows in the modular frame
    reps: list | None                # words: coset representatives in the cusp frame
    levels: np.ndarray

    def heights(self, z: complex, level: int | None = None) -> np.ndarray:
        z = as_half_plane(z)
        if self.method == "modular":
            md = self.group.modular
            z0 = act(md.frame.to_float(), z) if not md.frame.is_identity() else z
            rows = self.rows if level is None else self.rows[self.levels <= level]
            c = rows[:, 0].astype(float)
            d = rows[:, 1].astype(float)
            return z0.imag / (md.width * ((c * z0.real + d) ** 2 + (c * z0.imag) ** 2))
        reps = self.reps if level is None else [r for r, lv in zip(self.reps, self.levels) if lv <= level]
        return np.array([act(r, z).imag for r in reps])

    def value(self, z, s: float, level: int | None = None) -> float:
        return math.fsum((self.heights(z, level) ** s).tolist())


def eisenstein_terms(group: PresentedGroup, z, L: int, method: str = "auto") -> EisensteinTerms:
    method = _method(group, method)
    if group.cusp is None:
        raise ValueError(f"group {group.name!r} has no cusp")
    z = as_half_plane(z)
    if method == "modular":
        md = group.modular
        z0 = act(md.frame.to_float(), z) if not md.frame.is_identity() else z
        rows = coprime_rows(z0, z0.imag / (md.width * 2.0 ** (-L)))
        c = rows[:, 0].astype(float)
        d = rows[:, 1].astype(float)
        h = z0.imag / (md.width * ((c * z0.real + d) ** 2 + (c * z0.imag) ** 2))
        keep = h >= 2.0 ** (-L)
        rows, h = rows[keep], h[keep]
        lev = np.ceil(-np.log2(h) - 1e-12).astype(int)
        return EisensteinTerms(group, method, rows, None, lev)
    reps, levels = _coset_reps_with_levels(group, L)
    return EisensteinTerms(group, method, None, reps, np.array(levels))


@lru_cache(maxsize=32)
def _coset_reps_cached(group: PresentedGroup, L: int):
    return cusp_coset_reps(group, L)


def _coset_reps_with_levels(group: PresentedGroup, L: int):
    reps = _coset_reps_cached(group, L)
    # a rep appears at the first radius whose coset list contains its row
    levels = np.full(len(reps), L)
    for r in range(L - 1, -1, -1):
        n = len(_coset_reps_cached(group, r))
        levels[:n] = r
    return reps, levels.tolist()


def eisenstein(group: PresentedGroup, z, s: float = 2.0, L: int | None = None,
               method: str = "auto") -> TruncatedSumResult:
    """E(z, s) = sum over cosets <S>\\G of Im(sigma^-1 g z)^s, with tail |E_L - E_{L-2}|."""
    if not s > 1:
        raise ValueError("s must exceed 1")
    method = _method(group, method)
    L = _default_level(method) if L is None else L
    terms = eisenstein_terms(group, z, L, method)
    value = terms.value(z, s)
    prev = terms.value(z, s, L - 2)
    return TruncatedSumResult(value=value, tail=abs(value - prev), terms=len(terms.levels),
                              meta={"L": L, "method": method, "s": s})


# --------------------------------------------------- finite differences


def laplacian_fd(f, z: complex, h: float = 1e-3) -> float:
    """Five-point Delta_0 f = -(y^2/4)(f_xx + f_yy) at z."""
    x, y = z.real, z.imag
    f0 = f(z)
    lap = (f(complex(x + h, y)) + f(complex(x - h, y)) + f(complex(x, y + h))
           + f(complex(x, y - h)) - 4 * f0) / (h * h)
    return -(y * y / 4) * lap


def eisenstein_fd_residual(group: PresentedGroup, z, s: float = 2.0, h: float = 1e-3,
                           L: int | None = None, method: str = "auto") -> float:
    """|Delta_0 E - s(1-s)/4 E| / |E| with the term set frozen at the centre point."""
    method = _method(group, method)
    L = _default_level(method) if L is None else L
    z = as_half_plane(z)
    terms = eisenstein_terms(group, z, L, method)
    f = lambda w: terms.value(w, s)
    e = f(z)
    return abs(laplacian_fd(f, z, h) - 0.25 * s * (1 - s) * e) / abs(e)


def green_fd_residual(group: PresentedGroup, z, zp, h: float = 1e-3, L: int | None = None,
                      method: str = "auto") -> float:
    """|(Delta_0 + 1/2) G(., z')| / |G| at z by five-point differences."""
    method = _method(group, method)
    L = _default_level(method) if L is None else L
    orb = orbit(group, zp, L, method)
    f = lambda w: green_function(group, w, zp, L, method, _orbit=orb).value
    z = as_half_plane(z)
    g = f(z)
    return abs(laplacian_fd(f, z, h) + 0.5 * g) / abs(g)


# ------------------------------------------------------------ T_m family


def tm_family(m: int) -> MoebiusMap:
    """Elliptic element of order m fixing i m / (2 pi); tends to z -> z + 1 as m grows."""
    if m < 2:
        raise ValueError("m must be at least 2")
    t = 2 * math.pi / m
    a = math.cos(t)
    b = (m / (2 * math.pi)) * math.sin(t)
    c = -(2 * math.pi / m) * math.sin(t)
    return MoebiusMap.of(a, b, c, a)


# ------------------------------------------------------------------ Fay


@dataclass(frozen=True)
class FayResult:
    Y: float
    ratio: float
    deviation: float
    green: TruncatedSumResult
    eis: TruncatedSumResult
    max_orbit_height: float


def fay_prefactor(Y: float, s: float = 2.0) -> float:
    """4 Y^(1-s) / (2s - 1), the coefficient of E(z', s) in the cusp expansion of G."""
    return 4 * Y ** (1 - s) / (2 * s - 1)


def fay_ratio(group: PresentedGroup, zp_cusp: complex, Y: float, L: int | None = None,
              method: str = "auto") -> FayResult:
    """(3Y/4) G(iY, z') / E(z', 2) in the width-one cusp frame.

    ``zp_cusp`` is z' in that frame.  Requires Y to exceed every orbit height of
    z' by at least one, so that the expansion in e^(-2 pi (Y - v)) applies to
    all terms.
    """
    method = _method(group, method)
    L = _default_level(method) if L is None else L
    frame = cusp_frame(group)
    zp = act(frame.from_cusp, complex(zp_cusp))
    orb = orbit(group, zp, L, method)
    vmax = float(orb.points.imag.max())
    if not Y > vmax + 1:
        raise ValueError(f"Y = {Y} must exceed the highest orbit point {vmax:.4g} by 1")
    z = act(frame.from_cusp, complex(0.0, Y))
    g = green_function(group, z, zp, L, method, _orbit=orb)
    e = eisenstein(group, zp, 2.0, L, method)
    ratio = g.value / (fay_prefactor(Y, 2.0) * e.value)
    return FayResult(Y, ratio, abs(ratio - 1), g, e, vmax)


def free_kernel_ball_integral(r: float) -> float:
    """Integral of (Delta_0 + 1/2) Q over the hyperbolic ball of radius r (distributionally).

    Equals the boundary flux -(1/4) 2 pi sinh(r) Q'(r) plus (1/2) times the
    integral of Q over the ball; it is 1 when Q is the fundamental solution.
    """
    flux = -0.25 * 2 * math.pi * math.sinh(r) * float(free_resolvent_derivative(r))
    inner, _ = quad(lambda t: free_resolvent_s2(t) * 2 * math.pi * math.sinh(t), 0, r,
                    limit=200, epsabs=1e-14, epsrel=1e-12)
    return flux + 0.5 * inner
