"""Exact arithmetic in the mod-2 Steenrod algebra in the Milnor basis.

Basis elements are written Sq(r_1,...,r_k); the element with a single 1 in
position t+1 is the primitive usually called Q_t, and the element with 2^s
in position t+1 is P_{t+1}^s.  Products are computed with Milnor's matrix
formula, commutators build the Q_t^s tower, and a degree-wise change of
basis expresses any Milnor element as a sum of admissible compositions of
the Sq^n (needed to let these elements act on polynomial algebras).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InternalConsistencyError, ResourceLimitError

DEFAULT_MAX_T = 6
DEFAULT_MAX_S = 6
DEFAULT_MAX_DEGREE = 256


@dataclass(frozen=True, slots=True, order=True)
class MilnorElement:
    """A Milnor basis element Sq(r_1,...,r_k), trailing zeros trimmed.

    The empty sequence is the unit Sq() = 1.  Degree is sum r_i*(2^i - 1)
    with i counted from 1.
    """

    exponents: tuple[int, ...]

    def __post_init__(self):
        if any(r < 0 for r in self.exponents):
            raise ValueError(f"negative Milnor exponent in {self.exponents}")
        if self.exponents and self.exponents[-1] == 0:
            raise ValueError(f"non-canonical Milnor exponents {self.exponents}")

    @property
    def degree(self) -> int:
        return sum(r << i for i, r in enumerate(self.exponents, 1)) - sum(self.exponents)

    def __str__(self) -> str:
        return "Sq(" + ",".join(str(r) for r in self.exponents) + ")"


def milnor(*exponents: int) -> MilnorElement:
    """Build Sq(exponents), trimming trailing zeros."""
    exps = list(exponents)
    while exps and exps[-1] == 0:
        exps.pop()
    return MilnorElement(tuple(exps))


def sq(n: int) -> MilnorElement:
    """The generator Sq^n = Sq(n); Sq^0 is the unit."""
    if n < 0:
        raise ValueError("Sq^n needs n >= 0")
    return milnor(n) if n else milnor()


UNIT = milnor()


def milnor_degree(e: MilnorElement) -> int:
    return e.degree


@dataclass(frozen=True, slots=True)
class OperationSum:
    """A homogeneous F_2 sum of Milnor basis elements (XOR semantics)."""

    terms: frozenset[MilnorElement]
    degree: int | None

    def __post_init__(self):
        degs = {t.degree for t in self.terms}
        if len(degs) > 1:
            raise ValueError(f"mixed degrees {sorted(degs)} in operation sum")
        expect = degs.pop() if degs else None
        if self.degree != expect:
            raise ValueError(f"degree marker {self.degree} != terms degree {expect}")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "OperationSum") -> "OperationSum":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        return OperationSum(self.terms ^ other.terms, self.degree if self.terms ^ other.terms else None)

    def __mul__(self, other: "OperationSum") -> "OperationSum":
        if self.is_zero() or other.is_zero():
            return ZERO
        acc: set[MilnorElement] = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= _product_terms(a.exponents, b.exponents)
        return operation_sum(acc)

    def __iter__(self) -> Iterator[MilnorElement]:
        return iter(sorted(self.terms, key=lambda t: t.exponents))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(str(t) for t in self)


ZERO = OperationSum(frozenset(), None)


def operation_sum(terms: Iterable[MilnorElement]) -> OperationSum:
    """Sum basis elements with mod-2 cancellation of duplicates."""
    acc: set[MilnorElement] = set()
    for t in terms:
        acc ^= {t}
    if not acc:
        return ZERO
    return OperationSum(frozenset(acc), next(iter(acc)).degree)


def single(e: MilnorElement) -> OperationSum:
    return OperationSum(frozenset((e,)), e.degree)


@functools.lru_cache(maxsize=1 << 16)
def _product_terms(r: tuple[int, ...], s: tuple[int, ...]) -> frozenset[MilnorElement]:
    """Milnor's product formula for Sq(r)*Sq(s), mod 2.

    Sum over matrices X = (x_ij), i = 0..m, j = 0..n, x_00 unused, with
    weighted row sums sum_j 2^j x_ij = r_i and column sums sum_i x_ij = s_j.
    Each matrix contributes Sq(t_1,...,t_{m+n}) with t_l the l-th
    antidiagonal sum, provided the multinomial coefficient of every
    antidiagonal is odd, i.e. its entries have pairwise disjoint binary
    digits (Lucas); the diagonal sum then equals the bitwise OR.
    """
    m, n = len(r), len(s)
    if m == 0:
        return frozenset((milnor(*s),))
    if n == 0:
        return frozenset((milnor(*r),))
    acc: set[MilnorElement] = set()
    colrem = list(s)
    rows: list[tuple[int, ...]] = []  # row i entries (x_i0, x_i1, ..., x_in)

    def emit() -> None:
        # x_0j is whatever the columns have left.
        top = (0, *colrem)
        diag: list[int] = []
        for l in range(1, m + n + 1):
            acc_bits = 0
            for i in range(max(0, l - n), min(m, l) + 1):
                e = top[l - i] if i == 0 else rows[i - 1][l - i] if l - i <= n else 0
                if acc_bits & e:
                    return
                acc_bits |= e
            diag.append(acc_bits)
        acc.symmetric_difference_update((milnor(*diag),))

    def fill_row(i: int) -> None:
        if i > m:
            emit()
            return
        budget = r[i - 1]
        entries = [0] * (n + 1)

        def choose(j: int, rem: int) -> None:
            if j > n:
                entries[0] = rem
                rows.append(tuple(entries))
                fill_row(i + 1)
                rows.pop()
                return
            top_x = min(colrem[j - 1], rem >> j)
            for x in range(top_x + 1):
                entries[j] = x
                colrem[j - 1] -= x
                choose(j + 1, rem - (x << j))
                colrem[j - 1] += x
            entries[j] = 0

        choose(1, budget)

    fill_row(1)
    return frozenset(acc)


def milnor_multiply(a: MilnorElement, b: MilnorElement) -> OperationSum:
    """The Milnor product a*b as a homogeneous operation sum."""
    return operation_sum(_product_terms(a.exponents, b.exponents))


def commutator(a: OperationSum, b: OperationSum) -> OperationSum:
    """[a, b] = ab + ba over F_2; inputs must be homogeneous."""
    return a * b + b * a


def qts_milnor(
    t: int,
    s: int,
    *,
    max_t: int = DEFAULT_MAX_T,
    max_s: int = DEFAULT_MAX_S,
) -> OperationSum:
    """Milnor-basis expansion of Q_t^s.

    Q_0^s = Sq^{2^s} and Q_{t+1}^s = [Sq^{2^{s+t+1}}, Q_t^s]; the result has
    degree 2^s(2^{t+1}-1).
    """
    if t < 0 or s < 0:
        raise ValueError("Q_t^s needs t, s >= 0")
    if t > max_t or s > max_s:
        raise ResourceLimitError(
            f"Q_{t}^{s} exceeds configured bound (t <= {max_t}, s <= {max_s})"
        )
    return _qts_cached(t, s)


@functools.lru_cache(maxsize=None)
def _qts_cached(t: int, s: int) -> OperationSum:
    if t == 0:
        return single(sq(1 << s))
    return commutator(single(sq(1 << (s + t))), _qts_cached(t - 1, s))


def milnor_primitive(t: int) -> MilnorElement:
    """The primitive Q_t = Sq(0,...,0,1) with the 1 in position t+1."""
    return milnor(*([0] * t + [1]))


def milnor_basis_of_degree(n: int) -> tuple[MilnorElement, ...]:
    """All Milnor basis elements of degree n, lexicographically ordered."""
    out: list[tuple[int, ...]] = []

    def rec(pos: int, rem: int, prefix: list[int]) -> None:
        if rem == 0:
            exps = list(prefix)
            while exps and exps[-1] == 0:
                exps.pop()
            out.append(tuple(exps))
            return
        w = (1 << pos) - 1
        if w > rem:
            return
        for r in range(rem // w + 1):
            prefix.append(r)
            rec(pos + 1, rem - r * w, prefix)
            prefix.pop()

    rec(1, n, [])
    return tuple(MilnorElement(e) for e in sorted(out))


@functools.lru_cache(maxsize=None)
def admissible_words(n: int) -> tuple[tuple[int, ...], ...]:
    """Admissible compositions (i_1,...,i_k), i_j >= 2 i_{j+1}, of degree n."""
    return _admissible_bounded(n, n)


@functools.lru_cache(maxsize=None)
def _admissible_bounded(n: int, max_first: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out: list[tuple[int, ...]] = []
    for i1 in range(min(n, max_first), 0, -1):
        for rest in _admissible_bounded(n - i1, i1 // 2):
            out.append((i1,) + rest)
    return tuple(out)


def expand_admissible(word: tuple[int, ...]) -> OperationSum:
    """The Milnor-basis expansion of the composition Sq^{i_1} o ... o Sq^{i_k}."""
    acc = single(UNIT)
    for letter in reversed(word):
        acc = single(sq(letter)) * acc
    return acc


@functools.lru_cache(maxsize=None)
def _admissible_solver(n: int):
    """Echelonized expansion matrix for degree n, as int bitmasks.

    Columns index the Milnor basis of degree n, rows are admissible-word
    expansions; returns (basis index map, pivot rows with word-combination
    tracking).
    """
    basis = milnor_basis_of_degree(n)
    index = {e: i for i, e in enumerate(basis)}
    words = admissible_words(n)
    if len(words) != len(basis):
        raise InternalConsistencyError(
            f"degree {n}: {len(words)} admissible words vs {len(basis)} Milnor elements"
        )
    pivots: dict[int, tuple[int, int]] = {}  # leading bit -> (mask, word combo mask)
    for w, word in enumerate(words):
        mask = 0
        for term in expand_admissible(word).terms:
            mask |= 1 << index[term]
        combo = 1 << w
        while mask:
            lead = mask.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = (mask, combo)
                break
            pmask, pcombo = pivots[lead]
            mask ^= pmask
            combo ^= pcombo
        else:
            raise InternalConsistencyError(f"dependent admissible expansions in degree {n}")
    return index, words, pivots


def milnor_to_admissible(
    e: MilnorElement, *, max_degree: int = DEFAULT_MAX_DEGREE
) -> list[tuple[int, ...]]:
    """Express e as an F_2 sum of admissible compositions of Sq^n.

    Returns the words whose expansions XOR to e; the unit comes back as the
    empty composition.
    """
    n = e.degree
    if n > max_degree:
        raise ResourceLimitError(f"degree {n} exceeds configured bound {max_degree}")
    if n == 0:
        return [()]
    index, words, pivots = _admissible_solver(n)
    mask = 1 << index[e]
    combo = 0
    while mask:
        lead = mask.bit_length() - 1
        if lead not in pivots:
            raise InternalConsistencyError(f"no pivot for degree-{n} coordinate {lead}")
        pmask, pcombo = pivots[lead]
        mask ^= pmask
        combo ^= pcombo
    out = [words[w] for w in range(len(words)) if combo >> w & 1]
    out.sort()
    return out


def coincidence_scan(max_t: int = 4, max_s: int = 4) -> list[tuple[int, int]]:
    """Scan 1 <= t <= max_t, 1 <= s <= max_s for Q_t^s equal to P_{t+1}^s.

    Reports coincidences inside the scan range only; nothing is asserted
    beyond it.
    """
    hits = []
    for t in range(1, max_t + 1):
        for s in range(1, max_s + 1):
            p_elt = milnor(*([0] * t + [1 << s]))
            if qts_milnor(t, s, max_t=max_t, max_s=max_s) == single(p_elt):
                hits.append((t, s))
    return hits
