"""Closed-form index arithmetic: Bernoulli weights, root-of-unity sums, Chern
coefficients, orbifold Riemann-Roch dimensions and areas.

Everything rational is computed with :class:`fractions.Fraction`; floats appear
only where pi or a complex root of unity enters.  Chern coefficients are stored
as exact rational multiples of 1/pi^2 (Weil-Petersson), 1 (cusp) and 1/pi
(elliptic), so dualities and cancellations can be checked with ``==``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .groups import Signature

Rational = Fraction | int

CUSP_COEFFICIENT = Fraction(-1, 9)


def bernoulli2(x):
    """Second Bernoulli polynomial x^2 - x + 1/6 (exact for Fractions and ints)."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return x * x - x + Fraction(1, 6)
    return x * x - x + 1 / 6


def frac_part(x: Rational) -> Fraction:
    """Fractional part {x} in [0, 1), exactly."""
    x = Fraction(x)
    return x - math.floor(x)


def least_residue(k: int, m: int) -> int:
    return k % m


# ------------------------------------------------------------ root sums


@dataclass(frozen=True)
class RootSumReport:
    """Direct and closed-form values of sum_{i=1}^{m-1} w^(i(k+1)) / (1 - w^i)^2, w = e^(2 pi i / m)."""

    m: int
    k: int
    direct: complex
    closed: Fraction                 # -(m^2 - 1)/12 + kbar (m - kbar)/2
    difference: float
    first_direct: complex            # sum 1 / (1 - w^i)
    first_closed: Fraction           # (m - 1)/2
    second_direct: complex           # sum w^i / (1 - w^i)^2
    second_closed: Fraction          # -(m^2 - 1)/12
    bernoulli_form: Fraction         # -(m^2/2)(B2({k/m}) - 1/(6 m^2))
    tol: float = 1e-10

    @property
    def first_difference(self) -> float:
        return abs(self.first_direct - float(self.first_closed))

    @property
    def second_difference(self) -> float:
        return abs(self.second_direct - float(self.second_closed))

    @property
    def passes(self) -> bool:
        return (self.difference < self.tol and self.first_difference < self.tol
                and self.second_difference < self.tol and self.bernoulli_form == self.closed)


def rootsum_closed(m: int, k: int) -> Fraction:
    kb = least_residue(k, m)
    return Fraction(-(m * m - 1), 12) + Fraction(kb * (m - kb), 2)


def rootsum_bernoulli(m: int, k: int) -> Fraction:
    return -Fraction(m * m, 2) * (bernoulli2(frac_part(Fraction(k, m))) - Fraction(1, 6 * m * m))


def rootsum_identity(m: int, k: int, tol: float = 1e-10) -> RootSumReport:
    if m < 2:
        raise ValueError("m must be at least 2")
    roots = [cmath.exp(2j * math.pi * i / m) for i in range(1, m)]
    # reduce exponents mod m before exponentiating so large k costs nothing in accuracy
    powers = [cmath.exp(2j * math.pi * ((i * (k + 1)) % m) / m) for i in range(1, m)]
    direct = math.fsum(((p / (1 - w) ** 2).real for p, w in zip(powers, roots))) + 1j * math.fsum(
        ((p / (1 - w) ** 2).imag for p, w in zip(powers, roots)))
    first = sum(1 / (1 - w) for w in roots)
    second = sum(w / (1 - w) ** 2 for w in roots)
    closed = rootsum_closed(m, k)
    return RootSumReport(
        m=m, k=k, direct=direct, closed=closed, difference=abs(direct - float(closed)),
        first_direct=first, first_closed=Fraction(m - 1, 2),
        second_direct=second, second_closed=Fraction(-(m * m - 1), 12),
        bernoulli_form=rootsum_bernoulli(m, k), tol=tol)


def rootsum_table(m_max: int, tol: float = 1e-10) -> list[RootSumReport]:
    """Reports for 2 <= m <= m_max and 0 <= k < 2m."""
    return [rootsum_identity(m, k, tol) for m in range(2, m_max + 1) for k in range(2 * m)]


# ---------------------------------------------------- Chern coefficients


def elliptic_coefficient_exact(m: int, k: int) -> Fraction:
    """Rational r with elliptic coefficient r / pi: -(m/4)(B2({k/m}) - 1/(6 m^2))."""
    if m < 2:
        raise ValueError("m must be at least 2")
    return -Fraction(m, 4) * (bernoulli2(frac_part(Fraction(k, m))) - Fraction(1, 6 * m * m))


def elliptic_coefficient(m: int, k: int) -> float:
    """-(m / 4 pi)(B2({k/m}) - 1/(6 m^2))."""
    return float(elliptic_coefficient_exact(m, k)) / math.pi


@dataclass(frozen=True)
class ChernCoefficients:
    """Coefficients of the first Chern form against omega_WP, omega_cusp and each omega_j^ell.

    ``wp_over_pi2`` and ``ell_over_pi`` hold exact rationals; the float
    properties divide by pi^2 and pi.  ``cusp`` is always -1/9; when the
    signature has no cusps the cusp form itself vanishes and
    :meth:`surviving_terms` leaves it out.
    """

    k: int
    signature: Signature
    wp_over_pi2: Fraction
    cusp: Fraction
    ell_over_pi: tuple[Fraction, ...]

    @property
    def wp(self) -> float:
        return float(self.wp_over_pi2) / math.pi ** 2

    @property
    def ell(self) -> list[float]:
        return [float(e) / math.pi for e in self.ell_over_pi]

    def exact_key(self) -> tuple:
        return (self.wp_over_pi2, self.cusp, self.ell_over_pi)

    def surviving_terms(self) -> dict[str, float | list[float]]:
        out: dict[str, float | list[float]] = {"wp": self.wp}
        if self.signature.n > 0:
            out["cusp"] = float(self.cusp)
        if self.signature.m:
            out["ell"] = self.ell
        return out


def chern_coefficients(sig: Signature, k: int) -> ChernCoefficients:
    """Chern coefficients for weight k through one signed entry point.

    k >= 1 uses (6k^2 - 6k + 1)/(12 pi^2) and B2({(k-1)/m_j}); k <= 0 uses
    (6|k|^2 + 6|k| + 1)/(12 pi^2) and B2({|k|/m_j}).  The two branches make
    the coefficients for k and 1 - k identical.
    """
    if k >= 1:
        wp = Fraction(6 * k * k - 6 * k + 1, 12)
        shift = k - 1
    else:
        a = -k
        wp = Fraction(6 * a * a + 6 * a + 1, 12)
        shift = a
    ell = tuple(elliptic_coefficient_exact(m, shift) for m in sig.m)
    return ChernCoefficients(k, sig, wp, CUSP_COEFFICIENT, ell)


# -------------------------------------------------- dimensions and area


def dim_omega_k(sig: Signature, k: int) -> int:
    """Dimension of the space of weight 2k cusp forms by orbifold Riemann-Roch."""
    if k > 1:
        cone = sum(math.floor(k * (1 - Fraction(1, m))) for m in sig.m)
        return (2 * k - 1) * (sig.g - 1) + (k - 1) * sig.n + cone
    if k == 1:
        return sig.g
    if k == 0:
        return 1
    return 0


def moduli_dimension(sig: Signature) -> int:
    """3g - 3 + n + l."""
    return 3 * sig.g - 3 + sig.n + len(sig.m)


def area_over_2pi(sig: Signature) -> Fraction:
    return sig.euler_char_neg


def area(sig: Signature) -> float:
    """Hyperbolic area 2 pi (2g - 2 + n + sum(1 - 1/m_i))."""
    return 2 * math.pi * float(sig.euler_char_neg)


# ------------------------------------------- the (0;1;2,2,2) index pair


SIG_0_1_222 = Signature(0, 1, (2, 2, 2))
SIG_1_1 = Signature(1, 1, ())


@dataclass(frozen=True)
class RelationReport:
    """2 c1(lambda_k) for (0;1;2,2,2) minus c1(lambda'_k) for (1;1), with omega'_WP = 2 omega_WP
    and omega'_cusp = 2 omega_cusp.  Only the elliptic part should survive."""

    k: int
    wp_residual_over_pi2: Fraction
    cusp_residual: Fraction
    ell_per_cone_over_pi: tuple[Fraction, ...]
    expected_per_cone_over_pi: Fraction          # (-1)^k / 8

    @property
    def passes(self) -> bool:
        return (self.wp_residual_over_pi2 == 0 and self.cusp_residual == 0
                and all(e == self.expected_per_cone_over_pi for e in self.ell_per_cone_over_pi))


def example_0_1_222_relations(k: int) -> RelationReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    c = chern_coefficients(SIG_0_1_222, k)
    cp = chern_coefficients(SIG_1_1, k)
    # pull back the subgroup's forms: omega' = 2 omega for WP and cusp
    wp_res = 2 * c.wp_over_pi2 - 2 * cp.wp_over_pi2
    cusp_res = 2 * c.cusp - 2 * cp.cusp
    ell = tuple(2 * e for e in c.ell_over_pi)
    return RelationReport(k, wp_res, cusp_res, ell, Fraction((-1) ** k, 8))
