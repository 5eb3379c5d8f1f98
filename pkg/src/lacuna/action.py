"""Mod-2 Steenrod action on direct sums of F_2[x_1,...,x_d].

Elements of H*(B(Z/2)^d)^{+alpha} are F_2 sums of basic monomials, each a
summand index plus an exponent vector.  Sq^k acts through the Cartan
formula with binomial coefficients mod 2 (a coefficient is odd exactly when
the lower index is a bit-submask of the upper one); the doubling operation,
the Q_t^s tower and module-span generation are built on top of that.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

INFINITY = math.inf


class BasicMonomial(NamedTuple):
    summand: int
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def d(self) -> int:
        return len(self.exponents)

    def has_odd_exponent(self) -> bool:
        return any(n & 1 for n in self.exponents)


def mono(*exponents: int, summand: int = 1) -> BasicMonomial:
    if any(n < 0 for n in exponents):
        raise ValueError(f"negative exponent in {exponents}")
    if summand < 1:
        raise ValueError("summand index is 1-based")
    return BasicMonomial(summand, tuple(exponents))


@dataclass(frozen=True, slots=True)
class PolyElement:
    """Homogeneous F_2 sum of basic monomials (duplicates cancel)."""

    monomials: frozenset[BasicMonomial]
    degree: int | None

    def is_zero(self) -> bool:
        return not self.monomials

    @property
    def d(self) -> int:
        if self.is_zero():
            raise ValueError("zero element has no ambient rank")
        return next(iter(self.monomials)).d

    def __add__(self, other: "PolyElement") -> "PolyElement":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        return _raw(self.monomials ^ other.monomials)

    def __iter__(self) -> Iterator[BasicMonomial]:
        return iter(sorted(self.monomials))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m in self:
            body = "(" + ",".join(str(n) for n in m.exponents) + ")"
            if m.summand != 1:
                body += f"@{m.summand}"
            parts.append(body)
        return " + ".join(parts)


ZERO = PolyElement(frozenset(), None)


def _raw(monomials: frozenset[BasicMonomial]) -> PolyElement:
    if not monomials:
        return ZERO
    return PolyElement(monomials, next(iter(monomials)).degree)


def poly(monomials: Iterable[BasicMonomial]) -> PolyElement:
    """Sum monomials with cancellation; enforces one degree and one d."""
    acc: set[BasicMonomial] = set()
    for m in monomials:
        acc ^= {m}
    if not acc:
        return ZERO
    degs = {m.degree for m in acc}
    ds = {m.d for m in acc}
    if len(degs) > 1:
        raise ValueError(f"mixed degrees {sorted(degs)}")
    if len(ds) > 1:
        raise ValueError(f"mixed ambient ranks {sorted(ds)}")
    return PolyElement(frozenset(acc), degs.pop())


def from_exponents(*vectors, summand: int = 1) -> PolyElement:
    return poly(mono(*v, summand=summand) for v in vectors)


@functools.lru_cache(maxsize=1 << 20)
def _sq_mono(k: int, m: BasicMonomial) -> frozenset[BasicMonomial]:
    """Sq^k on one monomial: all ways to add a submask k_i to each exponent."""
    if k == 0:
        return frozenset((m,))
    exps = m.exponents
    if k > sum(exps):  # instability: every binomial vanishes
        return frozenset()
    d = len(exps)
    suffix = [0] * (d + 1)
    for i in range(d - 1, -1, -1):
        suffix[i] = suffix[i + 1] + exps[i]
    out: list[tuple[int, ...]] = []
    acc: list[int] = []

    def rec(i: int, rem: int) -> None:
        if rem > suffix[i]:
            return
        if i == d:
            out.append(tuple(acc))
            return
        n = exps[i]
        s = n
        while True:
            if s <= rem:
                acc.append(n + s)
                rec(i + 1, rem - s)
                acc.pop()
            if s == 0:
                break
            s = (s - 1) & n

    rec(0, k)
    return frozenset(BasicMonomial(m.summand, e) for e in out)


def apply_sq(k: int, x: PolyElement) -> PolyElement:
    """Sq^k x via the Cartan formula; k = 0 is the identity."""
    if k < 0:
        raise ValueError("Sq^k needs k >= 0")
    if x.is_zero() or k == 0:
        return x
    acc: set[BasicMonomial] = set()
    for m in x.monomials:
        acc ^= _sq_mono(k, m)
    return _raw(frozenset(acc))


def _sq_images_mono(m: BasicMonomial, max_k: int) -> dict[int, set[BasicMonomial]]:
    """All nonzero Sq^k images of a monomial for 1 <= k <= max_k, grouped by k."""
    exps = m.exponents
    d = len(exps)
    out: dict[int, set[BasicMonomial]] = {}
    acc: list[int] = []

    def rec(i: int, total: int) -> None:
        if i == d:
            if total:
                out.setdefault(total, set()).symmetric_difference_update(
                    (BasicMonomial(m.summand, tuple(acc)),)
                )
            return
        n = exps[i]
        s = n
        while True:
            if total + s <= max_k:
                acc.append(n + s)
                rec(i + 1, total + s)
                acc.pop()
            if s == 0:
                break
            s = (s - 1) & n

    rec(0, 0)
    return out


def sq_images(x: PolyElement, max_k: int) -> dict[int, PolyElement]:
    """Nonzero Sq^k x for 1 <= k <= max_k, skipping k with zero image."""
    buckets: dict[int, set[BasicMonomial]] = {}
    for m in x.monomials:
        for k, monos in _sq_images_mono(m, max_k).items():
            buckets.setdefault(k, set()).symmetric_difference_update(monos)
    return {k: _raw(frozenset(v)) for k, v in sorted(buckets.items()) if v}


def multiply(x: PolyElement, y: PolyElement) -> PolyElement:
    """Product inside one summand of the ambient algebra (exponent addition)."""
    if x.is_zero() or y.is_zero():
        return ZERO
    acc: set[BasicMonomial] = set()
    for a in x.monomials:
        for b in y.monomials:
            if a.summand != b.summand:
                raise ValueError("cannot multiply across distinct summands")
            acc ^= {BasicMonomial(a.summand, tuple(i + j for i, j in zip(a.exponents, b.exponents, strict=True)))}
    return _raw(frozenset(acc))


def tensor(x: PolyElement, y: PolyElement) -> PolyElement:
    """External product: concatenate exponent vectors (single-summand only)."""
    if x.is_zero() or y.is_zero():
        return ZERO
    acc: set[BasicMonomial] = set()
    for a in x.monomials:
        for b in y.monomials:
            if a.summand != 1 or b.summand != 1:
                raise ValueError("tensor product defined for single-summand elements")
            acc ^= {BasicMonomial(1, a.exponents + b.exponents)}
    return _raw(frozenset(acc))


def sq0_power(x: PolyElement, s: int) -> PolyElement:
    """Sq_0^s: multiply every exponent by 2^s."""
    if s < 0:
        raise ValueError("Sq_0^s needs s >= 0")
    if s == 0 or x.is_zero():
        return x
    return _raw(
        frozenset(
            BasicMonomial(m.summand, tuple(n << s for n in m.exponents))
            for m in x.monomials
        )
    )


def _v2(n: int) -> int:
    return (n & -n).bit_length() - 1


def sq0_level(x: PolyElement):
    """Largest s with x in Im(Sq_0^s): the least 2-adic valuation over all
    exponents; infinity for the zero element (and all-zero exponents)."""
    level = INFINITY
    for m in x.monomials:
        for n in m.exponents:
            if n:
                v = _v2(n)
                if v < level:
                    level = v
                if level == 0:
                    return 0
    return level


def sq0_root(x: PolyElement, s: int) -> PolyElement:
    """Divide all exponents by 2^s; requires s <= sq0_level(x)."""
    if s == 0 or x.is_zero():
        return x
    if s > sq0_level(x):
        raise ValueError(f"element is not in Im(Sq_0^{s})")
    return _raw(
        frozenset(
            BasicMonomial(m.summand, tuple(n >> s for n in m.exponents))
            for m in x.monomials
        )
    )


@functools.lru_cache(maxsize=1 << 18)
def _qts_mono(t: int, s: int, m: BasicMonomial) -> frozenset[BasicMonomial]:
    """Q_t^s on one monomial, by the commutator recursion over Sq^{2^j}."""
    if t == 0:
        return _sq_mono(1 << s, m)
    k = 1 << (s + t)
    acc: set[BasicMonomial] = set()
    for m1 in _qts_mono(t - 1, s, m):
        acc ^= _sq_mono(k, m1)
    for m2 in _sq_mono(k, m):
        acc ^= _qts_mono(t - 1, s, m2)
    return frozenset(acc)


def qts_apply(t: int, s: int, x: PolyElement) -> PolyElement:
    """Q_t^s x, evaluated operator-level through the defining recursion."""
    if t < 0 or s < 0:
        raise ValueError("Q_t^s needs t, s >= 0")
    acc: set[BasicMonomial] = set()
    for m in x.monomials:
        acc ^= _qts_mono(t, s, m)
    return _raw(frozenset(acc))


def milnor_qt(t: int, x: PolyElement) -> PolyElement:
    """The Milnor primitive Q_t as a derivation: on each monomial it raises
    one odd exponent by 2^{t+1}-1 and kills even ones.

    Closed form of qts_apply(t, 0, .); the two are checked against each
    other in the test suite and this one is used where speed matters.
    """
    delta = (1 << (t + 1)) - 1
    acc: set[BasicMonomial] = set()
    for m in x.monomials:
        exps = m.exponents
        for i, n in enumerate(exps):
            if n & 1:
                acc ^= {BasicMonomial(m.summand, exps[:i] + (n + delta,) + exps[i + 1 :])}
    return _raw(frozenset(acc))


@dataclass(frozen=True)
class SpanBasis:
    """Per-degree echelonized F_2 bases of an A-module span."""

    bound: int
    basis: dict[int, tuple[PolyElement, ...]]

    def occupied(self) -> tuple[int, ...]:
        return tuple(sorted(deg for deg, vecs in self.basis.items() if vecs))

    def dimension(self, degree: int) -> int:
        return len(self.basis.get(degree, ()))


def span_degrees(generators: Iterable[PolyElement], degree_bound: int) -> SpanBasis:
    """Graded basis of the A_2-span of the generators, up to degree_bound.

    Closure under every Sq^i, i >= 1 (these generate all positive-degree
    operations), processed degree by degree; within a degree vectors are
    reduced against an echelon keyed by the largest monomial in a fixed
    lexicographic order, so the output basis is deterministic.
    """
    gens = [g for g in generators if not g.is_zero()]
    if any(g.degree > degree_bound for g in gens):
        raise ValueError("degree_bound smaller than a generator degree")
    pending: dict[int, list[frozenset[BasicMonomial]]] = {}
    for g in gens:
        pending.setdefault(g.degree, []).append(g.monomials)
    echelon: dict[int, dict[BasicMonomial, frozenset[BasicMonomial]]] = {}
    for deg in range(degree_bound + 1):
        rows = echelon.setdefault(deg, {})
        for vec in pending.pop(deg, ()):  # reduce, then close under all Sq^i
            v = set(vec)
            while v:
                lead = max(v)
                if lead in rows:
                    v ^= rows[lead]
                else:
                    break
            if not v:
                continue
            new = frozenset(v)
            rows[max(new)] = new
            for k, img in sq_images(_raw(new), degree_bound - deg).items():
                pending.setdefault(deg + k, []).append(img.monomials)
    basis = {
        deg: tuple(_raw(rows[lead]) for lead in sorted(rows))
        for deg, rows in echelon.items()
        if rows
    }
    return SpanBasis(degree_bound, basis)
