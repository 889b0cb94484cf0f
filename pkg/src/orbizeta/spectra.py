"""Length spectra and truncated Selberg zeta products.

The Selberg product runs over primitive hyperbolic classes g,

    Z(s) = prod_g prod_{i >= 0} (1 - chi(g) N(g)^(-s-i)),

and is evaluated in the log domain with exactly rounded summation
(:func:`math.fsum`), so the result does not depend on accumulation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import cache
from .classes import ConjugacyClassRecord, primitive_hyperbolic_classes
from .groups import PresentedGroup
from .moebius import norm_from_trace

DEFAULT_I_MAX = 30


@dataclass(frozen=True)
class SpectrumEntry:
    norm: float
    length: float
    multiplicity: int
    chi: int | None
    trace: int | float


@dataclass(frozen=True)
class LengthSpectrum:
    group: str
    n_max: float
    convention: str
    entries: tuple[SpectrumEntry, ...]
    has_character: bool = False

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def class_count(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def truncate(self, n_max: float) -> "LengthSpectrum":
        return LengthSpectrum(self.group, n_max, self.convention,
                              tuple(e for e in self.entries if e.norm <= n_max), self.has_character)

    def to_rows(self) -> list[dict]:
        return [{"norm": e.norm, "length": e.length, "multiplicity": e.multiplicity,
                 "chi": e.chi, "trace": e.trace} for e in self.entries]


@dataclass(frozen=True)
class TruncatedSumResult:
    """A truncated sum or product with its truncation data.

    ``tail`` is an empirical error estimate: the change in the value (or in its
    logarithm, for products) when the truncation parameter is halved.
    """

    value: float | complex
    tail: float
    terms: int
    n_max: float | None = None
    i_max: int | None = None
    log_value: float | None = None
    accumulator: str = "math.fsum"
    meta: dict = field(default_factory=dict)


def spectrum_from_classes(group_name: str, records: list[ConjugacyClassRecord], n_max: float,
                          convention: str) -> LengthSpectrum:
    buckets: dict[tuple, list[ConjugacyClassRecord]] = {}
    for r in records:
        t = r.trace if isinstance(r.trace, int) else round(float(r.trace), 9)
        buckets.setdefault((t, r.chi), []).append(r)
    entries = []
    for (t, chi), rs in buckets.items():
        n = norm_from_trace(t, convention)
        entries.append(SpectrumEntry(n, math.log(n), len(rs), chi, t))
    entries.sort(key=lambda e: (e.norm, -2 if e.chi is None else e.chi))
    has_chi = any(e.chi is not None for e in entries)
    return LengthSpectrum(group_name, n_max, convention, tuple(entries), has_chi)


def length_spectrum(group: PresentedGroup, n_max: float, convention: str = "trace",
                    method: str = "auto", word_cap: int | None = None,
                    cache_dir=None) -> LengthSpectrum:
    """Primitive classes with N <= n_max aggregated by (N, chi) with multiplicity."""
    if not n_max > 1:
        raise ValueError("N_max must exceed 1")
    key = {"group": group.name, "generators": [list(map(str, g.entries())) for g in group.generators],
           "n_max": repr(float(n_max)), "convention": convention, "method": method,
           "word_cap": word_cap}
    hit = cache.load(cache_dir, "spectrum", key)
    if hit is not None:
        entries = tuple(SpectrumEntry(**e) for e in hit["entries"])
        return LengthSpectrum(hit["group"], hit["n_max"], hit["convention"], entries, hit["has_character"])
    records = primitive_hyperbolic_classes(group, n_max, convention, method, word_cap)
    spec = spectrum_from_classes(group.name, records, n_max, convention)
    cache.store(cache_dir, "spectrum", key, {
        "group": spec.group, "n_max": spec.n_max, "convention": spec.convention,
        "has_character": spec.has_character, "entries": spec.to_rows()})
    return spec


def _log_zeta_terms(spec: LengthSpectrum, s: float, i_max: int, use_chi: bool) -> list[float]:
    terms = []
    for e in spec.entries:
        chi = (e.chi if e.chi is not None else 1) if use_chi else 1
        for i in range(i_max + 1):
            terms.append(e.multiplicity * math.log1p(-chi * e.norm ** (-s - i)))
    return terms


def log_selberg_zeta(spec: LengthSpectrum, s: float, i_max: int = DEFAULT_I_MAX,
                     chi: str = "trivial") -> float:
    return math.fsum(_log_zeta_terms(spec, s, i_max, _use_chi(spec, chi)))


def _use_chi(spec: LengthSpectrum, chi: str) -> bool:
    if chi == "trivial":
        return False
    if chi == "sign":
        if not spec.has_character:
            raise ValueError(f"no character values recorded for group {spec.group!r}")
        return True
    raise ValueError(f"unknown character {chi!r}")


def selberg_zeta_truncated(spec: LengthSpectrum, s: float, i_max: int = DEFAULT_I_MAX,
                           chi: str = "trivial") -> TruncatedSumResult:
    """Truncated Euler product at real s > 1.

    The tail estimate is |log Z(N_max) - log Z(N_max / 2)|.
    """
    if not s > 1:
        raise ValueError("s must exceed 1")
    if i_max < 0:
        raise ValueError("I_max must be nonnegative")
    use_chi = _use_chi(spec, chi)
    terms = _log_zeta_terms(spec, s, i_max, use_chi)
    log_z = math.fsum(terms)
    half = math.fsum(_log_zeta_terms(spec.truncate(spec.n_max / 2), s, i_max, use_chi))
    return TruncatedSumResult(
        value=math.exp(log_z),
        tail=abs(log_z - half),
        terms=len(terms),
        n_max=spec.n_max,
        i_max=i_max,
        log_value=log_z,
        meta={"s": s, "chi": chi, "classes": spec.class_count, "convention": spec.convention},
    )


def det_delta(group: PresentedGroup, k: int, n_max: float, i_max: int = DEFAULT_I_MAX,
              convention: str = "trace", cache_dir=None) -> TruncatedSumResult:
    """Determinant of the weight -k Laplacian as Z(k + 1), k >= 1."""
    if k < 1:
        raise ValueError("k = 0 requires Z'(1), which a truncated product cannot provide")
    spec = length_spectrum(group, n_max, convention, cache_dir=cache_dir)
    return selberg_zeta_truncated(spec, k + 1, i_max, "trivial")


@dataclass(frozen=True)
class FactorizationReport:
    s: float
    n_max: float
    lhs: float
    rhs: float
    discrepancy: float
    tails: dict
    max_tail: float
    control_discrepancy: float

    @property
    def passes(self) -> bool:
        return self.discrepancy <= self.max_tail and self.control_discrepancy > 10 * self.max_tail


def factorization_check(subgroup: PresentedGroup, group: PresentedGroup, s: float, n_max: float,
                        i_max: int = DEFAULT_I_MAX, convention: str = "trace",
                        cache_dir=None) -> FactorizationReport:
    """Compare Z(s, G', 1) with Z(s, G, 1) Z(s, G, chi) for the index-two pair G' = ker chi.

    Both spectra are enumerated independently at the same N_max.  The negative
    control replaces chi by the trivial character.
    """
    if group.subgroup is not subgroup and (group.subgroup is None or group.subgroup.name != subgroup.name):
        raise ValueError("groups are not a linked index-two pair")
    spec_sub = length_spectrum(subgroup, n_max, convention, cache_dir=cache_dir)
    spec = length_spectrum(group, n_max, convention, cache_dir=cache_dir)
    lhs = selberg_zeta_truncated(spec_sub, s, i_max, "trivial")
    z1 = selberg_zeta_truncated(spec, s, i_max, "trivial")
    zchi = selberg_zeta_truncated(spec, s, i_max, "sign")
    log_rhs = z1.log_value + zchi.log_value
    disc = abs(math.expm1(lhs.log_value - log_rhs))
    control = abs(math.expm1(lhs.log_value - 2 * z1.log_value))
    tails = {"subgroup": lhs.tail, "trivial": z1.tail, "sign": zchi.tail}
    return FactorizationReport(s, n_max, lhs.value, math.exp(log_rhs), disc, tails,
                               max(tails.values()), control)
