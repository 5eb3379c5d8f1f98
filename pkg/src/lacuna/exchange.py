"""Exchange combinatorics on basic monomials.

A g-exchange swaps an odd exponent 2u_i+1 against 2u_j + 2p^g between two
positions (at p = 2 the displaced amount 2*2^g is the usual 2^{g+1}).
Chains are paths of m-exchanges with l <= m <= s, classes are chain
components in which every odd position of every member can be exchanged at
every m in [l, s], and the support collects positions carrying one constant
even exponent.  The bound s - l + #T <= d - 2 on any (l, s)-class with
support T of an element of H*(B(Z/2)^d) drives everything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .action import (
    BasicMonomial,
    PolyElement,
    apply_sq,
    milnor_qt,
    qts_apply,
    sq0_level,
    sq0_root,
    INFINITY,
)
from .errors import AnnihilationError


@dataclass(frozen=True, slots=True)
class ExchangeWitness:
    g: int
    positions: tuple[int, int]  # 1-based (i, j); alpha is odd at i
    monomials: tuple[BasicMonomial, BasicMonomial]


def exchange_quantum(g: int, prime: int = 2) -> int:
    """The even amount 2p^g displaced by a g-exchange."""
    return 2 * prime**g


def is_g_exchange(
    alpha: BasicMonomial,
    beta: BasicMonomial,
    g: int,
    prime: int = 2,
) -> ExchangeWitness | None:
    """Witness for a g-exchange between alpha and beta, if any.

    The first matching (i, j) in lexicographic order is returned; positions
    are reported 1-based.
    """
    if alpha.d != beta.d:
        raise ValueError("mismatched ambient rank")
    if alpha.degree != beta.degree:
        raise ValueError("mismatched degree")
    if alpha.summand != beta.summand:
        return None
    if g < 0:
        raise ValueError("g-exchange needs g >= 0")
    a, b = alpha.exponents, beta.exponents
    diff = [i for i in range(len(a)) if a[i] != b[i]]
    if len(diff) != 2:
        return None
    q = exchange_quantum(g, prime)
    for i, j in ((diff[0], diff[1]), (diff[1], diff[0])):
        if a[i] & 1 and b[j] & 1 and b[i] == a[i] - 1 + q and a[j] == b[j] - 1 + q:
            return ExchangeWitness(g, (i + 1, j + 1), (alpha, beta))
    return None


@dataclass(frozen=True)
class ChainDecomposition:
    components: tuple[frozenset[BasicMonomial], ...]
    witnesses: tuple[ExchangeWitness, ...]


def chain_components(
    monomials: Iterable[BasicMonomial],
    l: int,
    s: int,
    prime: int = 2,
) -> ChainDecomposition:
    """Partition into (l, s)-chain components (union-find over m-exchanges).

    Candidate pairs are found by bucketing monomials on everything except
    two positions, so only pairs differing in exactly those positions are
    pattern-checked.
    """
    if l > s:
        raise ValueError(f"(l, s)-chain needs l <= s, got ({l}, {s})")
    monos = sorted(set(monomials))
    if not monos:
        return ChainDecomposition((), ())
    if len({m.d for m in monos}) > 1:
        raise ValueError("mixed ambient rank")
    d = monos[0].d
    parent = {m: m for m in monos}

    def find(m: BasicMonomial) -> BasicMonomial:
        while parent[m] != m:
            parent[m] = parent[parent[m]]
            m = parent[m]
        return m

    witnesses: list[ExchangeWitness] = []
    buckets: dict[tuple, list[BasicMonomial]] = {}
    for m in monos:
        e = m.exponents
        for i in range(d):
            for j in range(i + 1, d):
                key = (m.summand, i, j, e[:i] + e[i + 1 : j] + e[j + 1 :])
                buckets.setdefault(key, []).append(m)
    seen_pairs: set[tuple[BasicMonomial, BasicMonomial]] = set()
    for group in buckets.values():
        for a_idx in range(len(group)):
            for b_idx in range(a_idx + 1, len(group)):
                pair = (group[a_idx], group[b_idx])
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                if pair[0].degree != pair[1].degree:
                    continue  # exchanges preserve degree; no edge possible
                for g in range(l, s + 1):
                    w = is_g_exchange(pair[0], pair[1], g, prime)
                    if w is not None:
                        witnesses.append(w)
                        ra, rb = find(pair[0]), find(pair[1])
                        if ra != rb:
                            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[BasicMonomial, set[BasicMonomial]] = {}
    for m in monos:
        groups.setdefault(find(m), set()).add(m)
    components = tuple(
        frozenset(groups[root]) for root in sorted(groups)
    )
    return ChainDecomposition(components, tuple(witnesses))


def compute_support(
    members: Iterable[BasicMonomial],
) -> tuple[frozenset[int], tuple[tuple[int, int], ...]]:
    """Maximal support: 1-based positions where all members share one even
    exponent, with the shared values."""
    monos = list(members)
    if not monos:
        raise ValueError("support of an empty set is undefined")
    d = monos[0].d
    positions = []
    values = []
    for i in range(d):
        vals = {m.exponents[i] for m in monos}
        if len(vals) == 1:
            v = vals.pop()
            if v % 2 == 0:
                positions.append(i + 1)
                values.append((i + 1, v))
    return frozenset(positions), tuple(values)


@dataclass(frozen=True)
class LSClass:
    """An (l, s)-class: members, support T and its size tau."""

    l: int
    s: int
    members: frozenset[BasicMonomial]
    support: frozenset[int]
    support_values: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.l > self.s:
            raise ValueError("(l, s)-class needs l <= s")
        if any(not m.has_odd_exponent() for m in self.members):
            raise ValueError("every member of an (l, s)-class has an odd exponent")

    @property
    def tau(self) -> int:
        return len(self.support)

    def condition_holds(self, prime: int = 2) -> bool:
        """Re-check the defining property: every odd position of every
        member admits an m-exchange inside the class for every m in [l, s]."""
        members = sorted(self.members)
        for alpha in members:
            for i, n in enumerate(alpha.exponents):
                if n & 1 == 0:
                    continue
                for m in range(self.l, self.s + 1):
                    if not any(
                        (w := is_g_exchange(alpha, beta, m, prime)) is not None
                        and w.positions[0] == i + 1
                        for beta in members
                        if beta != alpha
                    ):
                        return False
        return True


def find_ls_classes(x: PolyElement, p: int, q: int) -> list[LSClass]:
    """The (p, q)-classes carried by the monomials of x.

    Requires Q_t x = 0 for every p <= t <= q; under that hypothesis every
    chain component containing an odd exponent is a class (annihilation of
    the derivation Q_t forces an exchange partner at each odd position).
    Components made of fully even monomials carry no class.
    """
    if p > q:
        raise ValueError(f"need p <= q, got ({p}, {q})")
    if x.is_zero():
        raise ValueError("zero element carries no classes")
    for t in range(p, q + 1):
        r = milnor_qt(t, x)
        if not r.is_zero():
            raise AnnihilationError(t, max(r.monomials))
    decomposition = chain_components(x.monomials, p, q)
    classes = []
    for comp in decomposition.components:
        if any(m.has_odd_exponent() for m in comp):
            support, values = compute_support(comp)
            classes.append(LSClass(p, q, comp, support, values))
    return classes


def pr2_check(c: LSClass, d: int) -> tuple[bool, str]:
    """The fundamental bound s - l + #T <= d - 2 for a class of an element
    of H*(B(Z/2)^d)."""
    lhs = c.s - c.l + c.tau
    ok = lhs <= d - 2
    return ok, f"s-l+#T = {c.s}-{c.l}+{c.tau} = {lhs} {'<=' if ok else '>'} d-2 = {d - 2}"


@dataclass(frozen=True)
class RunReport:
    """Longest run of consecutive t with Q_t^s x = 0 at s = the Sq_0-level."""

    level: float
    t_max: int
    p: int | None
    q: int | None
    annihilated_by_parity: bool

    @property
    def length(self) -> int:
        if self.p is None:
            return 0
        return self.q - self.p + 1


def vanishing_run(x: PolyElement, t_max: int, level: int | None = None) -> RunReport:
    """Longest [p, q] in [0, t_max] with Q_t^s x = 0, s = sq0_level(x).

    Ties break toward the smaller p.  If the element rooted at the level in
    use has no odd exponent left (possible only for degree-0 elements or an
    explicitly lowered level), every Q_t^s kills it for parity reasons
    alone; the run is then capped at t_max and flagged, since such inputs
    sit outside the hypothesis of the run bound.
    """
    if x.is_zero():
        raise ValueError("vanishing run of the zero element is undefined")
    s = sq0_level(x) if level is None else level
    if s == INFINITY:
        return RunReport(s, t_max, 0, t_max, True)
    root = sq0_root(x, s)
    if not any(m.has_odd_exponent() for m in root.monomials):
        return RunReport(s, t_max, 0, t_max, True)
    vanish = [qts_apply(t, s, x).is_zero() for t in range(t_max + 1)]
    best: tuple[int, int] | None = None
    t = 0
    while t <= t_max:
        if vanish[t]:
            start = t
            while t + 1 <= t_max and vanish[t + 1]:
                t += 1
            if best is None or t - start > best[1] - best[0]:
                best = (start, t)
        t += 1
    if best is None:
        return RunReport(s, t_max, None, None, False)
    return RunReport(s, t_max, best[0], best[1], False)


@dataclass(frozen=True)
class Co2Report:
    """Divisibility consequence of a gap over the span of one element."""

    degree: int
    d: int
    gap_length: int | None  # None: bound hit before the next occupied degree
    k: int | None
    required_level: int | None
    level: float
    status: str  # "pass" | "fail" | "vacuous" | "inconclusive"


def co2_check(x: PolyElement, span_bound: int) -> Co2Report:
    """First gap (|x|, |x|+l] of the span of x, and the forced Sq_0-level.

    The lowest degree above |x| where the span is non-trivial is |x|+2^b
    for the least b with Sq^{2^b} x != 0 (an operation of minimal positive
    degree not killing x can be taken to be a single Sq^{2^b}, the
    multiplicative generators).  If l >= 2^k for some k >= d-2, the level
    of x must be at least k-d+2.
    """
    if x.is_zero():
        raise ValueError("co2_check needs a nonzero element")
    n = x.degree
    d = x.d
    level = sq0_level(x)
    l = None
    b = 0
    while n + (1 << b) <= span_bound:
        if not apply_sq(1 << b, x).is_zero():
            l = (1 << b) - 1
            break
        b += 1
    if l is None:
        return Co2Report(n, d, None, None, None, level, "inconclusive")
    k = l.bit_length() - 1  # largest k with 2^k <= l; -1 when l = 0
    if k < max(0, d - 2):
        return Co2Report(n, d, l, None, None, level, "vacuous")
    required = k - d + 2
    ok = level >= required
    return Co2Report(n, d, l, k, required, level, "pass" if ok else "fail")
