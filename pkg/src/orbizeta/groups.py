"""Fuchsian groups given by generator matrices and a presentation tag.

Two presentations are supported:

``free-rank-2``
    Free group on A, B.  Letters are encoded as +1, -1 (A, A^-1) and
    +2, -2 (B, B^-1).
``involutions-3``
    Free product of three groups of order two generated by T1, T2, T3.
    Letters are 1, 2, 3 and every letter is its own inverse.

Words are tuples of such integer letters.  Group elements are deduplicated by
their sign-canonical integer matrices, so no tolerances are involved for the
built-in groups.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable

import numpy as np

from .moebius import (
    Kind,
    MoebiusMap,
    act,
    classify,
    compose,
    identity,
    sl2_product,
    conjugate as conjugate_map,
)
from .modular import CyclicCharacter

FREE_RANK2 = "free-rank-2"
INVOLUTIONS3 = "involutions-3"
PRESENTATIONS = (FREE_RANK2, INVOLUTIONS3)


@dataclass(frozen=True)
class Signature:
    """Orbifold signature (g; n; m_1, ..., m_l)."""

    g: int
    n: int
    m: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(sorted(int(x) for x in self.m)))
        if self.g < 0 or self.n < 0:
            raise ValueError("genus and cusp count must be nonnegative")
        if any(x < 2 for x in self.m):
            raise ValueError("cone orders must be >= 2")
        if self.euler_char_neg <= 0:
            raise ValueError(f"signature {self} is not hyperbolic")

    @property
    def euler_char_neg(self) -> Fraction:
        """2g - 2 + n + sum(1 - 1/m_i), exactly."""
        return 2 * self.g - 2 + self.n + sum((1 - Fraction(1, x) for x in self.m), Fraction(0))

    @property
    def l(self) -> int:
        return len(self.m)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse ``"g,n,m1,m2,..."``."""
        parts = [int(p) for p in text.replace(";", ",").split(",") if p.strip()]
        if len(parts) < 2:
            raise ValueError("signature needs at least g and n")
        return cls(parts[0], parts[1], tuple(parts[2:]))

    def __str__(self) -> str:
        ms = ",".join(map(str, self.m)) if self.m else "-"
        return f"({self.g};{self.n};{ms})"


@dataclass(frozen=True)
class Cusp:
    """A cusp: parabolic generator, its fixed point, and a width-one scaling map.

    ``scaling`` maps infinity to the fixed point and satisfies
    scaling^-1 parabolic scaling = z -> z + 1 or z -> z - 1.  ``conjugator``
    is the map g sending infinity to the fixed point before rescaling, and
    ``width`` the translation length of g^-1 parabolic g.
    """

    parabolic: MoebiusMap
    fixed_point: float
    conjugator: MoebiusMap
    width: float
    scaling: MoebiusMap


@dataclass(frozen=True)
class ModularData:
    """Realisation of a group as the kernel of a character of PSL(2, Z).

    ``frame`` conjugates the group into PSL(2, Z): frame G frame^-1 = ker(character).
    ``cusp_conjugator`` is an integer matrix sending infinity to the cusp of the
    modular realisation and ``width`` its (integer) width there.
    """

    character: CyclicCharacter
    frame: MoebiusMap
    cusp_conjugator: MoebiusMap
    width: int


@dataclass(frozen=True, eq=False)
class PresentedGroup:
    name: str
    signature: Signature
    presentation: str
    generator_names: tuple[str, ...]
    generators: tuple[MoebiusMap, ...]
    cusp: Cusp | None = None
    sign_character: bool = False      # chi = (-1)^(number of letters) is defined
    in_kernel_of_sign: bool = False   # group is a subgroup of ker chi of a parent
    subgroup: "PresentedGroup | None" = None
    subgroup_coset_rep: MoebiusMap | None = None
    modular: ModularData | None = None
    relations_checked: bool = field(default=False, compare=False)

    # ---------------------------------------------------------- letters

    @property
    def exact(self) -> bool:
        return all(g.exact for g in self.generators)

    @property
    def letters(self) -> tuple[int, ...]:
        if self.presentation == FREE_RANK2:
            return (1, -1, 2, -2)
        return (1, 2, 3)

    def inverse_letter(self, x: int) -> int:
        return -x if self.presentation == FREE_RANK2 else x

    def letter_matrix(self, x: int) -> MoebiusMap:
        return _letter_matrices(self)[x]

    def letter_name(self, x: int) -> str:
        name = self.generator_names[abs(x) - 1]
        return name if x > 0 else name + "^-1"

    def format_word(self, word) -> str:
        return " ".join(self.letter_name(x) for x in word) if word else "1"

    def parse_word(self, text: str) -> tuple[int, ...]:
        out = []
        for tok in text.split():
            inv = tok.endswith("^-1")
            name = tok[:-3] if inv else tok
            idx = self.generator_names.index(name) + 1
            out.append(self.inverse_letter(idx) if inv else idx)
        return reduce_word(self, out)

    # -------------------------------------------------------- evaluation

    def evaluate(self, word) -> MoebiusMap:
        m = identity(exact=self.exact)
        mats = _letter_matrices(self)
        for x in word:
            m = compose(m, mats[x])
        return m

    def word(self, letters) -> "GroupWord":
        w = reduce_word(self, letters)
        chi = character_chi(self, w) if (self.sign_character or self.in_kernel_of_sign) else None
        return GroupWord(w, self.evaluate(w), chi)

    @property
    def index2_pair(self):
        return self.subgroup, self.subgroup_coset_rep


@lru_cache(maxsize=None)
def _letter_matrices(group: PresentedGroup) -> dict[int, MoebiusMap]:
    out = {}
    for i, g in enumerate(group.generators, start=1):
        out[i] = g
        if group.presentation == FREE_RANK2:
            out[-i] = g.inverse()
    return out


@dataclass(frozen=True)
class GroupWord:
    """A reduced word together with its matrix and (if defined) its character value."""

    letters: tuple[int, ...]
    matrix: MoebiusMap
    chi: int | None = None

    def __len__(self) -> int:
        return len(self.letters)


# ------------------------------------------------------------------- words


def reduce_word(group: PresentedGroup, word: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a word (cancel x x^-1, and x x for involution letters)."""
    out: list[int] = []
    for x in word:
        if out and out[-1] == group.inverse_letter(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclically_reduce(group: PresentedGroup, word) -> tuple[int, ...]:
    w = list(reduce_word(group, word))
    i, j = 0, len(w) - 1
    while i < j and w[j] == group.inverse_letter(w[i]):
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def inverse_word(group: PresentedGroup, word) -> tuple[int, ...]:
    return tuple(group.inverse_letter(x) for x in reversed(word))


def word_power(group: PresentedGroup, word, p: int) -> tuple[int, ...]:
    return reduce_word(group, tuple(word) * p)


def iter_reduced_words(group: PresentedGroup, length: int):
    """All reduced words of the given length, in lexicographic letter order."""
    letters = group.letters
    if length == 0:
        yield ()
        return

    def rec(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for x in letters:
            if prefix and prefix[-1] == group.inverse_letter(x):
                continue
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


@dataclass
class WordBall:
    """Distinct elements reachable by reduced words of length <= radius."""

    radius: int
    elements: dict[MoebiusMap, tuple[int, ...]]   # matrix -> a shortest word
    words_scanned: int
    collisions: int

    @property
    def count(self) -> int:
        return len(self.elements)

    def items(self):
        return [(w, m) for m, w in self.elements.items()]

    def words(self) -> list[tuple[int, ...]]:
        return list(self.elements.values())


def word_ball(group: PresentedGroup, L: int) -> WordBall:
    """Breadth-first enumeration of the ball of radius L, deduplicated by matrix.

    In integer mode the matrices are exact Python integers, which never wrap.
    For float generators, entries are rounded to 1e-9 relative for dedup.
    """
    if L < 0:
        raise ValueError("radius must be nonnegative")
    mats = _letter_matrices(group)
    start = identity(exact=group.exact)
    elements: dict = {_key(start): ((), start)}
    frontier = [((), start)]
    scanned, collisions = 1, 0
    for _ in range(L):
        nxt = []
        for w, m in frontier:
            for x in group.letters:
                if w and w[-1] == group.inverse_letter(x):
                    continue
                u = w + (x,)
                mu = compose(m, mats[x])
                scanned += 1
                k = _key(mu)
                if k in elements:
                    collisions += 1
                    continue
                elements[k] = (u, mu)
                nxt.append((u, mu))
        frontier = nxt
    return WordBall(L, {m: w for (w, m) in elements.values()}, scanned, collisions)


def _key(m: MoebiusMap):
    if m.exact:
        return m
    scale = max(1.0, max(abs(x) for x in m.entries()))
    return tuple(round(x / scale, 9) for x in m.entries())


def has_no_short_relator(group: PresentedGroup, L_check: int = 12) -> bool:
    """True when no nonempty reduced word of length <= L_check is the identity.

    A relator of length <= 2r splits as u v^-1 with two distinct reduced words
    u, v of length <= r, so it suffices that the ball of radius ceil(L_check/2)
    has no collisions (a collision is exactly such a relator).
    """
    r = (L_check + 1) // 2
    ball = word_ball(group, r)
    if ball.collisions == 0:
        return True
    if L_check % 2 == 0:
        return False
    # odd L_check: a collision may only witness a relator of length 2r > L_check
    return _scan_relators(group, L_check)


def _scan_relators(group: PresentedGroup, L_check: int) -> bool:
    for n in range(1, L_check + 1):
        for w in iter_reduced_words(group, n):
            if group.evaluate(w).is_identity():
                return False
    return True


# ------------------------------------------------------------- character


def character_chi(group: PresentedGroup, word) -> int:
    """The sign character: (-1)^(number of involution letters).

    Defined on the built-in (0;1;2,2,2) group, where it sends each T_i to -1,
    and identically +1 on its index-two subgroup ker(chi).
    """
    letters = word.letters if isinstance(word, GroupWord) else tuple(word)
    if group.sign_character:
        return -1 if len(letters) % 2 else 1
    if group.in_kernel_of_sign:
        return 1
    raise ValueError(f"character is not defined for group {group.name!r}")


# ----------------------------------------------------------------- cusps


def make_cusp(parabolic: MoebiusMap, tol: float = 1e-12) -> Cusp:
    if classify(parabolic) is not Kind.PARABOLIC:
        raise ValueError("cusp generator must be parabolic")
    a, b, c, d = parabolic.entries()
    if parabolic.exact:
        if c == 0:
            g = MoebiusMap(1, 0, 0, 1)
            x0 = math.inf
        else:
            # (a - d) / (2c) is an integer multiple when trace is +-2 and entries are integers
            num, den = a - d, 2 * c
            if num % den == 0:
                x0i = num // den
                g = MoebiusMap.of(x0i, -1, 1, 0)
                x0 = float(x0i)
            else:
                x0 = num / den
                g = MoebiusMap.of(x0, -1.0, 1.0, 0.0)
    else:
        if abs(c) <= tol * max(1.0, abs(a), abs(b), abs(d)):
            g = MoebiusMap(1.0, 0.0, 0.0, 1.0)
            x0 = math.inf
        else:
            x0 = (a - d) / (2 * c)
            g = MoebiusMap.of(x0, -1.0, 1.0, 0.0)
    t = compose(compose(g.inverse(), parabolic), g)
    # t = +-[[1, h], [0, 1]] (possibly with rounding in c)
    h = float(t.b) / float(t.a)
    w = abs(h)
    r = math.sqrt(w)
    scaling = compose(g.to_float(), MoebiusMap.of(r, 0.0, 0.0, 1 / r))
    check = compose(compose(scaling.inverse(), parabolic.to_float()), scaling)
    if abs(abs(check.b) - 1) > 1e-10 or abs(check.c) > 1e-10 or abs(check.a - 1) > 1e-10:
        raise ValueError("failed to normalise cusp")
    return Cusp(parabolic, x0, g, w if not float(w).is_integer() else int(w), scaling)


def cusp_coset_reps(group: PresentedGroup, L: int, tol: float = 1e-9) -> list[MoebiusMap]:
    """Representatives of the cosets <S> gamma meeting the word ball of radius L.

    Returned in the cusp frame, i.e. as sigma^-1 gamma with sigma the scaling map.
    Two elements lie in the same coset exactly when their sigma-frame bottom
    rows agree up to sign; rows are compared to ``tol`` and every merge is
    audited by checking that the quotient is a power of the cusp translation.
    """
    if group.cusp is None:
        raise ValueError(f"group {group.name!r} has no cusp")
    sig_inv = group.cusp.scaling.inverse()
    ball = word_ball(group, L)
    reps: list[MoebiusMap] = []
    index: dict[tuple[int, int], list[int]] = {}
    # deterministic order: by word length, then word
    for m, w in sorted(ball.elements.items(), key=lambda mw: (len(mw[1]), mw[1])):
        x = compose(sig_inv, m.to_float())
        c, d = float(x.c), float(x.d)
        if c < -tol or (abs(c) <= tol and d < 0):
            c, d = -c, -d
        key = (round(c / tol / 10), round(d / tol / 10))
        dup = None
        for kk in _neighbour_keys(key):
            for j in index.get(kk, ()):
                y = reps[j]
                yc, yd = float(y.c), float(y.d)
                if yc < -tol or (abs(yc) <= tol and yd < 0):
                    yc, yd = -yc, -yd
                if abs(yc - c) <= tol and abs(yd - d) <= tol:
                    dup = j
                    break
            if dup is not None:
                break
        if dup is None:
            index.setdefault(key, []).append(len(reps))
            reps.append(x)
        else:
            _audit_same_coset(x, reps[dup], tol)
    return reps


def _neighbour_keys(key):
    c, d = key
    for dc in (-1, 0, 1):
        for dd in (-1, 0, 1):
            yield (c + dc, d + dd)


def _audit_same_coset(x: MoebiusMap, y: MoebiusMap, tol: float) -> None:
    q = compose(x, y.inverse())
    # q must be +-[[1, n], [0, 1]] with n an integer
    a, b, c, d = (float(v) for v in q.entries())
    n = b / a if abs(a) > 0.5 else math.nan
    ok = (abs(abs(a) - 1) < 1e-7 and abs(c) < 1e-7 and abs(abs(d) - 1) < 1e-7
          and abs(n - round(n)) < 1e-6)
    if not ok:
        raise RuntimeError("coset dedup collision: rows agree but quotient is not a cusp translation")


# ---------------------------------------------------------- construction


def _conjugation_solver(a: MoebiusMap, b: MoebiusMap, bound: int = 4) -> MoebiusMap:
    """Trace-zero integer matrix E with E a E^-1 = a^-1 and E b E^-1 = b^-1."""
    ai, bi = a.inverse(), b.inverse()
    hits = []
    for p, q in product(range(-bound, bound + 1), repeat=2):
        # [[p, q], [r, -p]] with -p^2 - q r = 1
        if q == 0:
            continue
        num = -1 - p * p
        if num % q:
            continue
        r = num // q
        e = MoebiusMap.of(p, q, r, -p)
        if compose(compose(e, a), e.inverse()) == ai and compose(compose(e, b), e.inverse()) == bi:
            hits.append(e)
    hits = sorted(set(hits), key=lambda m: (sum(abs(x) for x in m.entries()), m.entries()))
    if not hits:
        raise RuntimeError("no trace-zero integer solution of the conjugation constraints")
    return hits[0]


def verify_relations(group: PresentedGroup) -> dict[str, bool]:
    """Check the defining relations exactly (integer mode) or to 1e-10 (float mode)."""
    out: dict[str, bool] = {}
    gens = group.generators
    if group.presentation == FREE_RANK2:
        a, b = gens
        if group.signature.n >= 1 and group.signature.g == 1:
            t = commutator_trace(a, b)
            out["commutator_trace_-2"] = (t == -2) if a.exact and b.exact else abs(t + 2) < 1e-10
        out["no_short_relator"] = has_no_short_relator(group, 12)
    else:
        for i, t in enumerate(gens, start=1):
            sq = compose(t, t)
            out[f"T{i}^2=1"] = sq.is_identity() if sq.exact else sq.is_identity(1e-10)
            out[f"tr T{i}=0"] = (t.trace == 0) if t.exact else abs(t.trace) < 1e-10
        prod = compose(compose(gens[0], gens[1]), gens[2])
        out["T1T2T3_parabolic"] = classify(prod) is Kind.PARABOLIC
    if group.cusp is not None:
        s = group.cusp.scaling
        x = compose(compose(s.inverse(), group.cusp.parabolic.to_float()), s)
        out["cusp_normalised"] = (abs(abs(float(x.b)) - 1) < 1e-10 and abs(float(x.c)) < 1e-10)
    if group.subgroup is not None and group.subgroup_coset_rep is not None:
        e = group.subgroup_coset_rep
        ok = True
        for g in group.subgroup.generators:
            ok &= compose(compose(e, g), e.inverse()) == g.inverse() if g.exact else \
                compose(compose(e, g), e.inverse()).isclose(g.inverse())
        out["E g E^-1 = g^-1"] = bool(ok)
    return out


def commutator_trace(a: MoebiusMap, b: MoebiusMap):
    """SL(2) trace of a b a^-1 b^-1; independent of the signs chosen for a and b."""
    x = sl2_product(a, b, a.inverse(), b.inverse())
    return x[0] + x[3]


TORUS_A = MoebiusMap.of(1, 1, 1, 2)
TORUS_B = MoebiusMap.of(1, -1, -1, 2)


@lru_cache(maxsize=None)
def builtin_punctured_torus() -> PresentedGroup:
    """Free group on A = [[1,1],[1,2]], B = [[1,-1],[-1,2]]; signature (1;1)."""
    a, b = TORUS_A, TORUS_B
    comm = compose(compose(a, b), compose(a.inverse(), b.inverse()))
    if commutator_trace(a, b) != -2:
        raise RuntimeError("commutator is not parabolic")
    cusp = make_cusp(comm.inverse())
    # ker of PSL(2,Z) -> Z/6, S -> 3, R -> 2 (the commutator subgroup)
    modular = ModularData(CyclicCharacter(6, 3, 2), MoebiusMap(1, 0, 0, 1),
                          cusp.conjugator, int(cusp.width))
    group = PresentedGroup(
        name="punctured-torus",
        signature=Signature(1, 1, ()),
        presentation=FREE_RANK2,
        generator_names=("A", "B"),
        generators=(a, b),
        cusp=cusp,
        in_kernel_of_sign=True,
        modular=modular,
    )
    _require(verify_relations(group), group.name)
    return replace(group, relations_checked=True)


@lru_cache(maxsize=None)
def builtin_orbifold_0_1_222() -> PresentedGroup:
    """Free product of T1 = E, T2 = A E, T3 = B E; signature (0;1;2,2,2)."""
    sub = builtin_punctured_torus()
    a, b = sub.generators
    e = _conjugation_solver(a, b)
    t1, t2, t3 = e, compose(a, e), compose(b, e)
    prod = compose(compose(t1, t2), t3)
    if abs(prod.trace) != 2:
        raise RuntimeError("T1 T2 T3 is not parabolic")
    cusp = make_cusp(prod.inverse())
    modular = ModularData(CyclicCharacter(3, 0, 1), MoebiusMap(1, 0, 0, 1),
                          cusp.conjugator, int(cusp.width))
    group = PresentedGroup(
        name="orbifold-0-1-222",
        signature=Signature(0, 1, (2, 2, 2)),
        presentation=INVOLUTIONS3,
        generator_names=("T1", "T2", "T3"),
        generators=(t1, t2, t3),
        cusp=cusp,
        sign_character=True,
        subgroup=sub,
        subgroup_coset_rep=e,
        modular=modular,
    )
    _require(verify_relations(group), group.name)
    return replace(group, relations_checked=True)


def _require(report: dict[str, bool], name: str) -> None:
    bad = [k for k, v in report.items() if not v]
    if bad:
        raise RuntimeError(f"relation check failed for {name}: {', '.join(bad)}")


def builtin(name: str) -> PresentedGroup:
    key = name.removeprefix("builtin:")
    if key in ("punctured-torus", "torus"):
        return builtin_punctured_torus()
    if key in ("orbifold-0-1-222", "orbifold"):
        return builtin_orbifold_0_1_222()
    raise ValueError(f"unknown built-in group {name!r}")


def make_group(
    name: str,
    presentation: str,
    generators: dict[str, MoebiusMap],
    signature: Signature | None = None,
    parabolic: MoebiusMap | None = None,
    check: bool = True,
) -> PresentedGroup:
    """Build and validate a user-supplied group.

    Without an explicit signature, a free group whose commutator has trace -2
    is taken as (1;1) and three involutions with parabolic product as (0;1;2,2,2).
    """
    if presentation not in PRESENTATIONS:
        raise ValueError(f"unknown presentation {presentation!r}")
    names = tuple(generators)
    gens = tuple(generators.values())
    need = 2 if presentation == FREE_RANK2 else 3
    if len(gens) != need:
        raise ValueError(f"{presentation} needs {need} generators, got {len(gens)}")
    if presentation == FREE_RANK2:
        comm = compose(compose(gens[0], gens[1]), compose(gens[0].inverse(), gens[1].inverse()))
        if parabolic is None and classify(comm) is Kind.PARABOLIC:
            parabolic = comm.inverse()
        if signature is None:
            if classify(comm) is not Kind.PARABOLIC:
                raise ValueError("signature required when the commutator is not parabolic")
            signature = Signature(1, 1, ())
    else:
        prod = compose(compose(gens[0], gens[1]), gens[2])
        if parabolic is None and classify(prod) is Kind.PARABOLIC:
            parabolic = prod.inverse()
        if signature is None:
            if classify(prod) is not Kind.PARABOLIC:
                raise ValueError("signature required when T1 T2 T3 is not parabolic")
            signature = Signature(0, 1, (2, 2, 2))
    cusp = make_cusp(parabolic) if parabolic is not None else None
    group = PresentedGroup(
        name=name,
        signature=signature,
        presentation=presentation,
        generator_names=names,
        generators=gens,
        cusp=cusp,
        sign_character=presentation == INVOLUTIONS3,
    )
    if check:
        _require(verify_relations(group), name)
        group = replace(group, relations_checked=True)
    return group


def conjugate_group(group: PresentedGroup, m: MoebiusMap) -> PresentedGroup:
    """The group m G m^-1 with all attached data transported (float mode unless m is integral)."""
    exact = m.exact and group.exact
    mm = m if exact else m.to_float()

    def conj(x: MoebiusMap) -> MoebiusMap:
        return conjugate_map(mm, x if exact else x.to_float())

    gens = tuple(conj(g) for g in group.generators)
    cusp = make_cusp(conj(group.cusp.parabolic)) if group.cusp else None
    modular = None
    if group.modular is not None:
        md = group.modular
        frame = compose(md.frame if exact else md.frame.to_float(), mm.inverse())
        modular = replace(md, frame=frame)
    sub = conjugate_group(group.subgroup, m) if group.subgroup is not None else None
    rep = conj(group.subgroup_coset_rep) if group.subgroup_coset_rep is not None else None
    return replace(group, name=f"{group.name}^conj", generators=gens, cusp=cusp,
                   modular=modular, subgroup=sub, subgroup_coset_rep=rep)


def random_word(group: PresentedGroup, length: int, rng: np.random.Generator) -> tuple[int, ...]:
    out: list[int] = []
    letters = group.letters
    while len(out) < length:
        x = letters[int(rng.integers(len(letters)))]
        if out and out[-1] == group.inverse_letter(x):
            continue
        out.append(x)
    return tuple(out)


def orbit_points(group: PresentedGroup, z: complex, L: int) -> list[complex]:
    return [act(m, z) for m in word_ball(group, L).elements]
