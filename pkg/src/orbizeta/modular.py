"""Arithmetic in the modular group PSL(2, Z).

The built-in groups are normal subgroups of finite index in PSL(2, Z) with a
cyclic quotient.  This module provides the pieces needed to exploit that:

* decomposition of an integer matrix into the letters S and P (Euclid),
* homomorphisms PSL(2, Z) -> Z/k given by their values on S and R = S P,
* enumeration of primitive hyperbolic conjugacy classes of PSL(2, Z) as
  cyclic words in the positive matrices P = [[1,1],[0,1]] and Q = [[1,0],[1,1]],
* enumeration of the cosets of the translation subgroup by bottom rows.

Every hyperbolic class of PSL(2, Z) contains exactly one cyclic word in P and Q
that uses both letters.  Because P and Q have nonnegative entries, the trace can
only grow when letters are inserted, which makes a trace-bounded search finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .moebius import MoebiusMap, compose

S = MoebiusMap(0, 1, -1, 0)     # z -> -1/z
R = MoebiusMap(0, 1, -1, -1)    # S P, order 3
P = MoebiusMap(1, 1, 0, 1)      # z -> z + 1
Q = MoebiusMap(1, 0, 1, 1)      # S P^-1 S

# letters of the S/R alphabet used for rewriting
LETTER_S, LETTER_R = 0, 1
SR_MATRIX = {LETTER_S: S, LETTER_R: R}


def least_rotation(word) -> int:
    """Start index of the lexicographically least rotation (Booth's algorithm)."""
    s = list(word) * 2
    n = len(word)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n if n else 0


def canonical_rotation(word) -> tuple:
    word = tuple(word)
    if not word:
        return word
    k = least_rotation(word)
    return word[k:] + word[:k]


def primitive_root_length(word) -> int:
    """Length of the shortest p with word == (word[:p])^(n/p)."""
    n = len(word)
    w = tuple(word)
    for p in range(1, n + 1):
        if n % p == 0 and w == w[p:] + w[:p]:
            return p
    return n


def is_proper_power(word) -> bool:
    return primitive_root_length(word) < len(word)


def sp_decomposition(m: MoebiusMap) -> list[tuple[str, int]]:
    """Write an integer matrix as a product of letters ``("P", k)`` and ``("S", 1)``.

    The product of the returned letters, left to right, equals ``m`` in PSL(2, Z).
    """
    if not m.exact:
        raise ValueError("S/P decomposition needs an integer matrix")
    a, b, c, d = m.entries()
    out: list[tuple[str, int]] = []
    while c != 0:
        q = a // c
        if q:
            out.append(("P", q))
        a, b = a - q * c, b - q * d
        # now 0 <= a < |c| (or a in (c, 0] for c < 0); peel off S
        out.append(("S", 1))
        a, b, c, d = c, d, -a, -b
    # c == 0 means +-[[1, x], [0, 1]]
    shift = b * a
    if shift:
        out.append(("P", shift))
    return out


@dataclass(frozen=True)
class CyclicCharacter:
    """Homomorphism PSL(2, Z) -> Z/k determined by its values on S and R."""

    k: int
    on_s: int
    on_r: int

    def __post_init__(self):
        if (2 * self.on_s) % self.k or (3 * self.on_r) % self.k:
            raise ValueError("values violate S^2 = R^3 = 1")

    @property
    def on_p(self) -> int:
        return (self.on_s + self.on_r) % self.k

    def __call__(self, m: MoebiusMap) -> int:
        total = 0
        for name, e in sp_decomposition(m):
            total += self.on_s if name == "S" else e * self.on_p
        return total % self.k

    def of_letters(self, letters) -> int:
        return sum(self.on_s if x == LETTER_S else self.on_r for x in letters) % self.k

    def is_surjective(self) -> bool:
        return math.gcd(self.on_s, self.on_r, self.k) == 1

    @cached_property
    def transversal(self) -> dict[int, tuple[int, ...]]:
        """Shortest S/R word for each value in Z/k (breadth-first search)."""
        if not self.is_surjective():
            raise ValueError("character is not surjective")
        found = {0: ()}
        frontier = [()]
        while len(found) < self.k:
            nxt = []
            for w in frontier:
                for x in (LETTER_S, LETTER_R):
                    u = w + (x,)
                    v = self.of_letters(u)
                    if v not in found:
                        found[v] = u
                        nxt.append(u)
            frontier = nxt
        return found


def sr_word_matrix(letters) -> MoebiusMap:
    m = MoebiusMap(1, 0, 0, 1)
    for x in letters:
        m = compose(m, SR_MATRIX[x])
    return m


# ------------------------------------------------------- hyperbolic classes

_PQ = {1: P, 2: Q}


def _mul(x, y):
    return (x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3])


_P4 = (1, 1, 0, 1)
_Q4 = (1, 0, 1, 1)


def primitive_pq_words(trace_max: int) -> list[tuple[tuple[int, ...], int]]:
    """Primitive hyperbolic classes of PSL(2, Z) with trace <= trace_max.

    Returns ``(word, trace)`` pairs, where ``word`` is the least rotation of a
    cyclic word over {1: P, 2: Q} that uses both letters and is not a proper
    power.  Ordered by trace, then word.
    """
    out = []
    # iterative depth-first search over prefixes starting with P
    stack = [((1,), _P4, False)]
    while stack:
        word, m, has_q = stack.pop()
        bound = m if has_q else _mul(m, _Q4)
        if bound[0] + bound[3] > trace_max:
            continue
        if has_q and word[-1] == 2:
            if least_rotation(word) == 0 and not is_proper_power(word):
                out.append((word, m[0] + m[3]))
        stack.append((word + (2,), _mul(m, _Q4), True))
        stack.append((word + (1,), _mul(m, _P4), has_q))
    out.sort(key=lambda wt: (wt[1], wt[0]))
    return out


def pq_to_sr(word) -> tuple[int, ...]:
    """Rewrite a P/Q word in the S/R alphabet using P = S R and Q = S R^2."""
    out = []
    for x in word:
        out.append(LETTER_S)
        out.extend([LETTER_R] * x)
    return tuple(out)


def pq_matrix(word) -> MoebiusMap:
    m = (1, 0, 0, 1)
    for x in word:
        m = _mul(m, _P4 if x == 1 else _Q4)
    return MoebiusMap(*m)


# ----------------------------------------------------------- coset rows


def coprime_rows(z: complex, height_bound: float) -> np.ndarray:
    """All bottom rows (c, d) of PSL(2, Z) modulo sign with |c z + d|^2 <= height_bound.

    Equivalently, the cosets of the translation subgroup whose image of ``z``
    has imaginary part at least Im z / height_bound.  Returns an int array of
    shape (n, 2) with c >= 0, and d = 1 when c = 0.
    """
    x, y = z.real, z.imag
    rows = [np.array([[0, 1]], dtype=np.int64)]
    cmax = int(math.floor(math.sqrt(height_bound) / y))
    for c in range(1, cmax + 1):
        rad2 = height_bound - (c * y) ** 2
        if rad2 < 0:
            continue
        rad = math.sqrt(rad2)
        lo = math.ceil(-c * x - rad)
        hi = math.floor(-c * x + rad)
        if hi < lo:
            continue
        d = np.arange(lo, hi + 1, dtype=np.int64)
        d = d[np.gcd(d, c) == 1]
        d = d[(c * x + d) ** 2 + (c * y) ** 2 <= height_bound]
        if d.size:
            rows.append(np.column_stack([np.full(d.size, c, dtype=np.int64), d]))
    return np.concatenate(rows)


def complete_row(c: int, d: int) -> MoebiusMap:
    """A matrix of PSL(2, Z) with bottom row (c, d)."""
    if c == 0:
        return MoebiusMap(1, 0, 0, 1)
    g, x, y = _ext_gcd(d, c)        # x d + y c = 1
    if abs(g) != 1:
        raise ValueError("row is not primitive")
    # a d - b c = 1 with a = x, b = -y
    a, b = x * g, -y * g
    return MoebiusMap.of(a, b, c, d)


def _ext_gcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0
