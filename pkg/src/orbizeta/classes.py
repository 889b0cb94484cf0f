"""Primitive hyperbolic conjugacy classes via cyclic normal forms.

Conjugacy classes of a free group, or of a free product of three groups of
order two, correspond one-to-one to cyclically reduced words up to rotation.
The normal form of a class is the lexicographically least rotation of such a
word, so conjugacy testing is exact string comparison.

Two enumeration routes produce the same records:

``"words"``
    Scan all cyclically reduced words by length.  Works for any presented
    group but grows exponentially in the word length.
``"modular"``
    For groups realised as the kernel of a character PSL(2, Z) -> Z/k, list the
    primitive classes of PSL(2, Z) by trace (see :mod:`orbizeta.modular`), split
    each into classes of the subgroup, and rewrite the representatives into the
    group's own generators.  This reaches long cusp-hugging words cheaply.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .groups import (
    FREE_RANK2,
    PresentedGroup,
    character_chi,
    cyclically_reduce,
    inverse_word,
    word_ball,
)
from .modular import (
    LETTER_R,
    LETTER_S,
    canonical_rotation,
    is_proper_power,
    least_rotation,
    pq_to_sr,
    primitive_pq_words,
    sr_word_matrix,
)
from .moebius import Kind, MoebiusMap, classify, compose, norm_from_trace, conjugate

DEFAULT_WORD_CAP = {FREE_RANK2: 11, "involutions-3": 18}


@dataclass(frozen=True)
class ConjugacyClassRecord:
    word: tuple[int, ...]          # cyclic normal form
    word_text: str
    matrix: MoebiusMap
    trace: int | float             # |tr|
    norm: float
    length: float                  # log N
    primitive: bool
    chi: int | None
    inverse_word: tuple[int, ...]
    convention: str = "trace"

    @property
    def self_inverse(self) -> bool:
        return self.word == self.inverse_word

    @property
    def word_length(self) -> int:
        return len(self.word)


class WordCapExceeded(RuntimeError):
    pass


def normal_form(group: PresentedGroup, word) -> tuple[int, ...]:
    return canonical_rotation(cyclically_reduce(group, word))


def classify_word(group: PresentedGroup, word, convention: str = "trace") -> ConjugacyClassRecord | None:
    """Class record for an arbitrary word, or ``None`` when it is not hyperbolic."""
    nf = normal_form(group, word)
    if not nf:
        return None
    m = group.evaluate(nf)
    if classify(m) is not Kind.HYPERBOLIC:
        return None
    return _record(group, nf, m, abs(m.trace), convention)


def _record(group, nf, m, trace, convention) -> ConjugacyClassRecord:
    n = norm_from_trace(trace, convention)
    chi = None
    if group.sign_character or group.in_kernel_of_sign:
        chi = character_chi(group, nf)
    inv = canonical_rotation(inverse_word(group, nf))
    return ConjugacyClassRecord(
        word=nf,
        word_text=group.format_word(nf),
        matrix=m,
        trace=trace,
        norm=n,
        length=math.log(n),
        primitive=not is_proper_power(nf),
        chi=chi,
        inverse_word=inv,
        convention=convention,
    )


def trace_bound(n_max: float, convention: str) -> float:
    """Largest |tr| whose norm does not exceed n_max."""
    if convention == "trace":
        return n_max + 1 / n_max
    if convention == "geodesic":
        r = math.sqrt(n_max)
        return r + 1 / r
    raise ValueError(f"unknown norm convention {convention!r}")


# ---------------------------------------------------------------- words


def _cyclic_words_of_length(group: PresentedGroup, n: int):
    """Cyclically reduced words of length n that are their own least rotation, with matrices."""
    letters = group.letters
    inv = group.inverse_letter
    mats = {x: group.letter_matrix(x) for x in letters}
    one = MoebiusMap(1, 0, 0, 1) if group.exact else MoebiusMap(1.0, 0.0, 0.0, 1.0)
    stack = [((), one)]
    while stack:
        w, m = stack.pop()
        if len(w) == n:
            if n > 1 and w[-1] == inv(w[0]):
                continue
            if least_rotation(w) == 0:
                yield w, m
            continue
        for x in reversed(letters):
            if w:
                if w[-1] == inv(x):
                    continue
                # a least rotation never has a letter smaller than its first one
                if x < w[0]:
                    continue
            stack.append((w + (x,), compose(m, mats[x])))


def classes_by_words(group: PresentedGroup, n_max: float, max_length: int,
                     convention: str = "trace") -> tuple[list[ConjugacyClassRecord], list[int]]:
    """All primitive hyperbolic classes with N <= n_max whose normal form has length <= max_length.

    Also returns the number of classes found at each length.
    """
    t_max = trace_bound(n_max, convention)
    out: list[ConjugacyClassRecord] = []
    per_length = [0]
    for n in range(1, max_length + 1):
        found = 0
        for w, m in _cyclic_words_of_length(group, n):
            t = abs(m.trace)
            if not (t > 2 and t <= t_max + 1e-9 * t_max):
                continue
            if is_proper_power(w):
                continue
            rec = _record(group, w, m, t, convention)
            if rec.norm <= n_max:
                out.append(rec)
                found += 1
        per_length.append(found)
    return _sorted(out), per_length


def enumerate_by_words(group: PresentedGroup, n_max: float, convention: str = "trace",
                       word_cap: int | None = None) -> list[ConjugacyClassRecord]:
    """Scan word lengths until four consecutive lengths add nothing.

    That is, stop once two consecutive lengths are empty and the two lengths
    after them are empty as well.  Raises :class:`WordCapExceeded` if the cap is
    reached first.
    """
    cap = word_cap if word_cap is not None else DEFAULT_WORD_CAP[group.presentation]
    t_max = trace_bound(n_max, convention)
    out: list[ConjugacyClassRecord] = []
    empty = 0
    n = 0
    while empty < 4:
        n += 1
        if n > cap:
            raise WordCapExceeded(
                f"N_max={n_max} needs words longer than the cap {cap}; raise word_cap or use the modular route")
        found = 0
        for w, m in _cyclic_words_of_length(group, n):
            t = abs(m.trace)
            if not (t > 2 and t <= t_max + 1e-9 * t_max) or is_proper_power(w):
                continue
            rec = _record(group, w, m, t, convention)
            if rec.norm <= n_max:
                out.append(rec)
                found += 1
        empty = empty + 1 if found == 0 else 0
    return _sorted(out)


# -------------------------------------------------------------- modular


@dataclass(frozen=True)
class _Rewriter:
    """Reidemeister-Schreier rewriting of S/R words into the group's letters."""

    k: int
    on: tuple[int, int]                          # character values on S, R
    table: dict[tuple[int, int], tuple[int, ...]]

    def rewrite(self, letters, start: int = 0) -> tuple[list[int], int]:
        out: list[int] = []
        b = start
        for x in letters:
            out.extend(self.table[(b, x)])
            b = (b + self.on[x]) % self.k
        return out, b


def _integral(m: MoebiusMap) -> MoebiusMap:
    if m.exact:
        return m
    vals = [round(float(v)) for v in m.entries()]
    if max(abs(float(v) - r) for v, r in zip(m.entries(), vals)) > 1e-6:
        raise ValueError("frame does not conjugate the group into PSL(2,Z)")
    return MoebiusMap.of(*vals)


@lru_cache(maxsize=None)
def _rewriter(group: PresentedGroup) -> _Rewriter:
    md = group.modular
    chi = md.character
    # generators moved into the modular frame
    mod_gens = {x: _integral(conjugate(md.frame, group.letter_matrix(x))) for x in group.letters}
    for x, g in mod_gens.items():
        if chi(g) != 0:
            raise ValueError("generator is not in the kernel of the character")
    # shortest words for small elements of the group, in the modular frame
    lookup: dict[MoebiusMap, tuple[int, ...]] = {MoebiusMap(1, 0, 0, 1): ()}
    frontier = [((), MoebiusMap(1, 0, 0, 1))]
    for _ in range(6):
        nxt = []
        for w, m in frontier:
            for x in group.letters:
                if w and w[-1] == group.inverse_letter(x):
                    continue
                mu = compose(m, mod_gens[x])
                if mu not in lookup:
                    lookup[mu] = w + (x,)
                    nxt.append((w + (x,), mu))
        frontier = nxt
    trans = chi.transversal
    on = (chi.on_s, chi.on_r)
    table = {}
    for b in range(chi.k):
        for x in (LETTER_S, LETTER_R):
            b2 = (b + on[x]) % chi.k
            m = compose(compose(sr_word_matrix(trans[b]), sr_word_matrix((x,))),
                        sr_word_matrix(trans[b2]).inverse())
            if m not in lookup:
                raise RuntimeError("Schreier generator not found among short words")
            table[(b, x)] = lookup[m]
    return _Rewriter(chi.k, on, table)


def _chebyshev_trace(t: int, e: int) -> int:
    """|tr(g^e)| from t = |tr g| for hyperbolic g."""
    a, b = 2, t
    for _ in range(e - 1):
        a, b = b, t * b - a
    return b if e >= 1 else a


def enumerate_modular(group: PresentedGroup, n_max: float, convention: str = "trace",
                      verify: bool = True) -> list[ConjugacyClassRecord]:
    """Classes of a finite-index normal subgroup of PSL(2, Z) with cyclic quotient.

    A primitive class g of PSL(2, Z) with character value v contributes
    gcd(k, v) classes of the subgroup, each represented by t_b g^e t_b^-1 with
    e = k / gcd(k, v) and b running over Z/gcd(k, v).  These exhaust the
    primitive hyperbolic classes of the subgroup exactly once.
    """
    if group.modular is None:
        raise ValueError(f"group {group.name!r} has no modular realisation")
    md = group.modular
    k = md.character.k
    rw = _rewriter(group)
    t_max = trace_bound(n_max, convention)
    t_cap = int(math.floor(t_max * (1 + 1e-12)))
    out: list[ConjugacyClassRecord] = []
    seen: set[tuple[int, ...]] = set()
    for word, t0 in primitive_pq_words(t_cap):
        sr = pq_to_sr(word)
        v = md.character.of_letters(sr)
        g = math.gcd(k, v)
        e = k // g
        te = _chebyshev_trace(t0, e)
        if te > t_cap:
            continue
        n = norm_from_trace(te, convention)
        if n > n_max:
            continue
        for b in range(g):
            letters, end = rw.rewrite(sr * e, start=b)
            if end != b:
                raise RuntimeError("rewriting did not return to the starting coset")
            nf = normal_form(group, letters)
            if nf in seen:
                raise RuntimeError("two lifts produced the same class")
            seen.add(nf)
            m = group.evaluate(nf)
            tr = abs(m.trace) if m.exact else abs(float(m.trace))
            if verify and (tr != te if m.exact else abs(tr - te) > 1e-8 * te):
                raise RuntimeError("rewritten word has the wrong trace")
            out.append(_record(group, nf, m, te if m.exact else tr, convention))
    return _sorted(out)


def _sorted(records):
    return sorted(records, key=lambda r: (r.norm, r.chi if r.chi is not None else 0, r.word))


def primitive_hyperbolic_classes(group: PresentedGroup, n_max: float, convention: str = "trace",
                                 method: str = "auto", word_cap: int | None = None
                                 ) -> list[ConjugacyClassRecord]:
    """Every primitive hyperbolic class with N <= n_max, each exactly once.

    Classes of g and g^-1 are listed separately.  ``method`` is ``"modular"``,
    ``"words"`` or ``"auto"`` (modular when the group supports it).
    """
    if not n_max > 1:
        raise ValueError("N_max must exceed 1")
    if method == "auto":
        method = "modular" if group.modular is not None else "words"
    if method == "modular":
        return enumerate_modular(group, n_max, convention)
    if method == "words":
        return enumerate_by_words(group, n_max, convention, word_cap)
    raise ValueError(f"unknown method {method!r}")


def ball_conjugator_words(group: PresentedGroup, L: int) -> list[tuple[int, ...]]:
    return word_ball(group, L).words()
