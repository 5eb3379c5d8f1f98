"""Odd-prime action on H*(B(Z/p)^d) and the section-6 style checks.

Encoded exponents n_i = 2m_i + eps_i stand for t^{eps}u^{m} per tensor
factor (t exterior of degree 1, u polynomial of degree 2).  P^k acts by
base-p binomials through the signless Cartan formula, the Bockstein is a
derivation with Koszul signs, and the Q_t^s tower is defined by the
commutator recursion starting from beta (s = 0) or P^{p^{s-1}} (s >= 1).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from fractions import Fraction
from math import ceil

from .linalg import modp_in_span, modp_kernel_basis
from .obstruct import GapReport, ModuleDescription, TypeTCertificate, TypeTResult, Verdict, _gaps_from_occupied, _pick_gap, _absence_reason, FiniteModuleTable

INFINITY = math.inf


class OddMonomial(NamedTuple):
    summand: int
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def d(self) -> int:
        return len(self.exponents)

    def exterior_bits(self) -> tuple[int, ...]:
        return tuple(n & 1 for n in self.exponents)


def odd_mono(*exponents: int, summand: int = 1) -> OddMonomial:
    if any(n < 0 for n in exponents):
        raise ValueError(f"negative exponent in {exponents}")
    return OddMonomial(summand, tuple(exponents))


@dataclass(frozen=True, slots=True)
class OddElement:
    """Homogeneous F_p combination of odd basic monomials."""

    prime: int
    terms: tuple[tuple[OddMonomial, int], ...]  # sorted, coefficients in 1..p-1
    degree: int | None

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def d(self) -> int:
        if self.is_zero():
            raise ValueError("zero element has no ambient rank")
        return self.terms[0][0].d

    def as_dict(self) -> dict[OddMonomial, int]:
        return dict(self.terms)

    @property
    def monomials(self) -> tuple[OddMonomial, ...]:
        return tuple(m for m, _ in self.terms)

    def __add__(self, other: "OddElement") -> "OddElement":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.prime != other.prime:
            raise ValueError("mixed primes")
        if self.degree != other.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = (acc.get(m, 0) + c) % self.prime
        return odd_element(self.prime, acc)

    def scale(self, c: int) -> "OddElement":
        c %= self.prime
        if c == 0:
            return odd_zero(self.prime)
        return odd_element(self.prime, {m: k * c for m, k in self.terms})

    def __sub__(self, other: "OddElement") -> "OddElement":
        return self + other.scale(self.prime - 1 if not other.is_zero() else 1)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m, c in self.terms:
            body = "(" + ",".join(str(n) for n in m.exponents) + ")"
            if m.summand != 1:
                body += f"@{m.summand}"
            parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)


def odd_zero(prime: int) -> OddElement:
    return OddElement(prime, (), None)


def odd_element(prime: int, coeffs: dict[OddMonomial, int] | Iterable) -> OddElement:
    if prime < 3 or prime % 2 == 0:
        raise ValueError("odd prime required")
    if not isinstance(coeffs, dict):
        coeffs = dict(coeffs)
    acc = {m: c % prime for m, c in coeffs.items() if c % prime}
    if not acc:
        return odd_zero(prime)
    degs = {m.degree for m in acc}
    ds = {m.d for m in acc}
    if len(degs) > 1:
        raise ValueError(f"mixed degrees {sorted(degs)}")
    if len(ds) > 1:
        raise ValueError(f"mixed ambient ranks {sorted(ds)}")
    return OddElement(prime, tuple(sorted(acc.items())), degs.pop())


def odd_from_exponents(prime: int, *vectors, summand: int = 1) -> OddElement:
    coeffs: dict[OddMonomial, int] = {}
    for v in vectors:
        if isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], int) and isinstance(v[1], tuple):
            c, exps = v
        else:
            c, exps = 1, v
        m = odd_mono(*exps, summand=summand)
        coeffs[m] = coeffs.get(m, 0) + c
    return odd_element(prime, coeffs)


def binom_mod_p(m: int, j: int, p: int) -> int:
    """Binomial coefficient mod p by Lucas' theorem, digitwise base p."""
    if j < 0 or j > m:
        return 0
    r = 1
    while j:
        mi, ji = m % p, j % p
        if ji > mi:
            return 0
        r = r * math.comb(mi, ji) % p
        m //= p
        j //= p
    return r


@functools.lru_cache(maxsize=1 << 18)
def _p_mono(prime: int, k: int, mono: OddMonomial) -> tuple[tuple[OddMonomial, int], ...]:
    """P^k on one monomial: distribute across factors, binomials base p.

    P^j(t^eps u^m) = binom(m, j) t^eps u^{m + j(p-1)}; the exterior part is
    untouched (P^j t = 0 for j >= 1 by instability).
    """
    exps = mono.exponents
    d = len(exps)
    ms = [n >> 1 for n in exps]
    out: dict[OddMonomial, int] = {}
    acc_exp: list[int] = []

    def rec(i: int, rem: int, coeff: int) -> None:
        if i == d:
            if rem == 0:
                key = OddMonomial(mono.summand, tuple(acc_exp))
                out[key] = (out.get(key, 0) + coeff) % prime
            return
        if rem > sum(ms[i:]):
            return
        n = exps[i]
        for j in range(min(ms[i], rem) + 1):
            c = binom_mod_p(ms[i], j, prime)
            if c:
                acc_exp.append(n + 2 * j * (prime - 1))
                rec(i + 1, rem - j, coeff * c % prime)
                acc_exp.pop()

    rec(0, k, 1)
    return tuple(sorted((m, c) for m, c in out.items() if c))


def apply_p(k: int, x: OddElement) -> OddElement:
    """P^k x via the (sign-free) Cartan formula; P^0 is the identity."""
    if k < 0:
        raise ValueError("P^k needs k >= 0")
    if k == 0 or x.is_zero():
        return x
    acc: dict[OddMonomial, int] = {}
    for m, c in x.terms:
        for m2, c2 in _p_mono(x.prime, k, m):
            acc[m2] = (acc.get(m2, 0) + c * c2) % x.prime
    return odd_element(x.prime, acc)


def apply_beta(x: OddElement) -> OddElement:
    """Bockstein: beta t = u, beta u = 0, derivation with Koszul signs."""
    if x.is_zero():
        return x
    p = x.prime
    acc: dict[OddMonomial, int] = {}
    for m, c in x.terms:
        exps = m.exponents
        prefix = 0  # total degree left of the current factor
        for i, n in enumerate(exps):
            if n & 1:
                sign = p - 1 if prefix & 1 else 1
                key = OddMonomial(m.summand, exps[:i] + (n + 1,) + exps[i + 1 :])
                acc[key] = (acc.get(key, 0) + c * sign) % p
            prefix += n
    return odd_element(p, acc)


def tensor_odd(x: OddElement, y: OddElement) -> OddElement:
    """External product: concatenate exponent vectors, multiply coefficients
    (single-summand elements only)."""
    if x.is_zero() or y.is_zero():
        return odd_zero(x.prime if not x.is_zero() else y.prime)
    if x.prime != y.prime:
        raise ValueError("mixed primes")
    acc: dict[OddMonomial, int] = {}
    for m1, c1 in x.terms:
        for m2, c2 in y.terms:
            if m1.summand != 1 or m2.summand != 1:
                raise ValueError("tensor product defined for single-summand elements")
            key = OddMonomial(1, m1.exponents + m2.exponents)
            acc[key] = (acc.get(key, 0) + c1 * c2) % x.prime
    return odd_element(x.prime, acc)


def p0_apply(x: OddElement) -> OddElement:
    """The operational top operation: P^{n/2} on even degree n, else beta
    P^{(n-1)/2}.  Linear on each degree."""
    if x.is_zero():
        return x
    n = x.degree
    if n % 2 == 0:
        return apply_p(n // 2, x)
    return apply_beta(apply_p((n - 1) // 2, x))


def p0_power(x: OddElement, s: int) -> OddElement:
    """s-fold exponent map 2m+eps -> 2pm+2eps on every monomial.

    This is the displayed closed form for P_0^s on basic monomials;
    coefficients are unchanged.
    """
    if s < 0:
        raise ValueError("P_0^s needs s >= 0")
    out = x
    for _ in range(s):
        if out.is_zero():
            return out
        p = out.prime
        acc = {
            OddMonomial(m.summand, tuple((n >> 1 << 1) * p + 2 * (n & 1) for n in m.exponents)): c
            for m, c in out.terms
        }
        out = odd_element(p, acc)
    return out


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def p0_level(x: OddElement):
    """Largest s with x in Im(P_0^s), by the membership pattern: every
    encoded exponent must be 2p^{s-1}l with l = 0 или 1 mod p for s >= 1;
    s = 0 always holds.  Infinity for the zero element."""
    level = INFINITY
    p = x.prime
    for m, _ in x.terms:
        for n in m.exponents:
            if n == 0:
                continue
            if n & 1:
                return 0
            h = n >> 1
            v = _vp(h, p)
            s_max = v + 1 if (h // p**v) % p == 1 else v
            if s_max < level:
                level = s_max
            if level == 0:
                return 0
    return level


@functools.lru_cache(maxsize=1 << 18)
def _qts_odd_mono(prime: int, t: int, s: int, mono: OddMonomial) -> tuple[tuple[OddMonomial, int], ...]:
    """Q_t^s on one monomial by the recursion; commutators are P Q - Q P
    (P^k has even degree, so no sign appears in the bracket)."""
    if t == 0:
        if s == 0:
            res = apply_beta(odd_element(prime, {mono: 1}))
        else:
            res = apply_p(prime ** (s - 1), odd_element(prime, {mono: 1}))
        return res.terms
    k = prime ** (s + t - 1) if s >= 1 else prime ** (t - 1)
    acc: dict[OddMonomial, int] = {}
    inner = _qts_odd_mono(prime, t - 1, s, mono)
    for m1, c1 in inner:
        for m2, c2 in _p_mono(prime, k, m1):
            acc[m2] = (acc.get(m2, 0) + c1 * c2) % prime
    outer = _p_mono(prime, k, mono)
    for m1, c1 in outer:
        for m2, c2 in _qts_odd_mono(prime, t - 1, s, m1):
            acc[m2] = (acc.get(m2, 0) - c1 * c2) % prime
    return tuple(sorted((m, c) for m, c in acc.items() if c))


def qts_apply_odd(t: int, s: int, x: OddElement) -> OddElement:
    """Q_t^s x at odd p: Q_0^0 = beta, Q_0^s = P^{p^{s-1}} (s >= 1), and
    Q_{t+1}^s = [P^{p^{s+t}}, Q_t^s] (the s = 0 tower uses [P^{p^t}, Q_t])."""
    if t < 0 or s < 0:
        raise ValueError("Q_t^s needs t, s >= 0")
    if x.is_zero():
        return x
    acc: dict[OddMonomial, int] = {}
    for m, c in x.terms:
        for m2, c2 in _qts_odd_mono(x.prime, t, s, m):
            acc[m2] = (acc.get(m2, 0) + c * c2) % x.prime
    return odd_element(x.prime, acc)


@dataclass(frozen=True)
class OddRunReport:
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


def le5_run_check(x: OddElement, t_max: int = 3, level: int | None = None) -> OddRunReport:
    """Longest run of consecutive t with Q_t^s x = 0 at s = p0_level(x).

    Elements with no exterior content at the level in use (all encoded
    exponents even at s = 0, or a level lowered by hand) are annihilated by
    beta and every Q_t for parity reasons alone; they are flagged and sit
    outside the run bound's hypothesis.
    """
    if x.is_zero():
        raise ValueError("run of the zero element is undefined")
    s = p0_level(x) if level is None else level
    if s == INFINITY:
        return OddRunReport(s, t_max, 0, t_max, True)
    degenerate = False
    if s == 0:
        degenerate = all(n & 1 == 0 for m, _ in x.terms for n in m.exponents)
    else:
        # root pattern: n = 2 p^{s-1} l; the root factor is exterior iff l = 1 mod p
        degenerate = all(
            ((n >> 1) // x.prime ** (s - 1)) % x.prime != 1
            for m, _ in x.terms
            for n in m.exponents
            if n
        )
    if degenerate:
        return OddRunReport(s, t_max, 0, t_max, True)
    vanish = [qts_apply_odd(t, s, x).is_zero() for t in range(t_max + 1)]
    best = None
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
        return OddRunReport(s, t_max, None, None, False)
    return OddRunReport(s, t_max, best[0], best[1], False)


@dataclass(frozen=True)
class OddCo2Report:
    degree: int
    d: int
    gap_length: int | None
    k: int | None
    required_level: int | None
    level: float
    status: str


def le6_check(x: OddElement, span_bound: int) -> OddCo2Report:
    """First gap (|x|, |x|+l] of the A_p-span of x, and the forced P_0-level.

    The generators of positive-degree A_p are beta (degree 1) and the
    P^{p^j} (degree 2(p-1)p^j), so the lowest degree above |x| where the
    span lives is reached by a single generator; if l >= 2(p-1)p^k for some
    k >= d-3 the level of x must be at least k-d+3.
    """
    if x.is_zero():
        raise ValueError("le6_check needs a nonzero element")
    p = x.prime
    n = x.degree
    d = x.d
    level = p0_level(x)
    l = None
    if n + 1 <= span_bound and not apply_beta(x).is_zero():
        l = 0
    else:
        j = 0
        while n + 2 * (p - 1) * p**j <= span_bound:
            if not apply_p(p**j, x).is_zero():
                l = 2 * (p - 1) * p**j - 1
                break
            j += 1
        else:
            return OddCo2Report(n, d, None, None, None, level, "inconclusive")
    k = -1
    while 2 * (p - 1) * p ** (k + 1) <= l:
        k += 1
    if k < max(0, d - 3):
        return OddCo2Report(n, d, l, None, None, level, "vacuous")
    required = k - d + 3
    ok = level >= required
    return OddCo2Report(n, d, l, k, required, level, "pass" if ok else "fail")


def cond2_check(layers: Sequence[int], prime: int) -> tuple[bool, tuple[tuple[int, int, int], ...]]:
    """No pairwise difference of the layer offsets may be 1 or 2(p-1)."""
    ms = list(layers)
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("layer offsets must be strictly increasing")
    forbidden = (1, 2 * (prime - 1))
    violations = []
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            if ms[j] - ms[i] in forbidden:
                violations.append((ms[i], ms[j], ms[j] - ms[i]))
    return not violations, tuple(violations)


def _p_images_mono(prime: int, mono: OddMonomial, max_i: int):
    """All nonzero P^i images of a monomial for 1 <= i <= max_i."""
    exps = mono.exponents
    d = len(exps)
    ms = [n >> 1 for n in exps]
    out: dict[int, dict[OddMonomial, int]] = {}
    acc_exp: list[int] = []

    def rec(i: int, total: int, coeff: int) -> None:
        if i == d:
            if total:
                key = OddMonomial(mono.summand, tuple(acc_exp))
                bucket = out.setdefault(total, {})
                bucket[key] = (bucket.get(key, 0) + coeff) % prime
            return
        n = exps[i]
        for j in range(min(ms[i], max_i - total) + 1):
            c = binom_mod_p(ms[i], j, prime)
            if c:
                acc_exp.append(n + 2 * j * (prime - 1))
                rec(i + 1, total + j, coeff * c % prime)
                acc_exp.pop()

    rec(0, 0, 1)
    return out


def span_degrees_odd(generators: Iterable[OddElement], degree_bound: int):
    """Occupied degrees of the A_p-span: closure under beta and all P^i,
    echelonized per degree over F_p with a fixed monomial order."""
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        return ()
    p = gens[0].prime
    if any(g.degree > degree_bound for g in gens):
        raise ValueError("degree_bound smaller than a generator degree")
    pending: dict[int, list[dict[OddMonomial, int]]] = {}
    for g in gens:
        pending.setdefault(g.degree, []).append(dict(g.terms))
    echelon: dict[int, dict[OddMonomial, dict[OddMonomial, int]]] = {}
    for deg in range(degree_bound + 1):
        rows = echelon.setdefault(deg, {})
        for vec in pending.pop(deg, ()):
            v = {m: c % p for m, c in vec.items() if c % p}
            while v:
                lead = max(v)
                if lead not in rows:
                    break
                c = v[lead]
                for m, rc in rows[lead].items():
                    v[m] = (v.get(m, 0) - c * rc) % p
                v = {m: c2 for m, c2 in v.items() if c2}
            if not v:
                continue
            lead = max(v)
            inv = pow(v[lead], -1, p)
            v = {m: c2 * inv % p for m, c2 in v.items()}
            rows[lead] = v
            elt = odd_element(p, v)
            b = apply_beta(elt)
            if not b.is_zero() and deg + 1 <= degree_bound:
                pending.setdefault(deg + 1, []).append(dict(b.terms))
            step = 2 * (p - 1)
            max_i = (degree_bound - deg) // step
            buckets: dict[int, dict[OddMonomial, int]] = {}
            for m, c in elt.terms:
                for i, img in _p_images_mono(p, m, max_i).items():
                    bucket = buckets.setdefault(i, {})
                    for m2, c2 in img.items():
                        bucket[m2] = (bucket.get(m2, 0) + c * c2) % p
            for i, img in buckets.items():
                if any(img.values()):
                    pending.setdefault(deg + i * step, []).append(img)
    return tuple(sorted(deg for deg, rows in echelon.items() if rows))


def _odd_layer_occupancy(m: ModuleDescription):
    if m.kind == "span":
        layers = [(0, m.generators)]
    else:
        layers = list(m.layers)
    out = []
    for shift, gens in layers:
        bound = m.degree_bound - shift
        occ = span_degrees_odd(gens, bound) if bound >= 0 else ()
        out.append((shift, occ))
    return out


def gap_scan_odd(m: ModuleDescription) -> GapReport:
    layers = _odd_layer_occupancy(m)
    occupied: set[int] = set()
    truncated = False
    for shift, occ in layers:
        occupied.update(shift + n for n in occ)
        if occ and m.prime * occ[-1] > m.degree_bound - shift:
            truncated = True  # P_0 keeps multiplying degrees by p past the bound
    occ_sorted = tuple(sorted(m.suspension + n for n in occupied))
    return GapReport(
        occ_sorted,
        _gaps_from_occupied(occ_sorted),
        m.degree_bound,
        m.suspension,
        truncated,
    )


def type_t_check_odd(m: ModuleDescription) -> TypeTResult:
    """Odd-prime type-T certification (span treated as a single layer).

    delta satisfies p^delta >= t > p^{delta-1}; the threshold is
    ell* = max(2(m_t+1)(p-1)p^{d+2}, layer spacings) over j up to
    1 + (d+delta)(p-1)^2 p^{d-2}, rounded up when fractional.
    """
    p = m.prime
    if p == 2:
        raise ValueError("odd checker needs an odd prime")
    report = gap_scan_odd(m)
    layers = _odd_layer_occupancy(m)
    offsets = tuple(shift for shift, _ in layers)
    t = len(layers)
    delta = 0
    while p**delta < t:
        delta += 1
    infinite = tuple(
        idx
        for idx, (shift, occ) in enumerate(layers)
        if occ and p * occ[-1] > m.degree_bound - shift
    )
    if not infinite:
        return TypeTResult(None, "no infinite layer within bound", report)
    j_count = ceil(1 + Fraction(m.d + delta) * (p - 1) ** 2 * Fraction(p) ** (m.d - 2))
    seqs = []
    for idx in infinite:
        occ = layers[idx][1]
        if len(occ) < j_count + 1:
            return TypeTResult(
                None, "bound truncation before enough occupied degrees", report
            )
        seqs.append(occ[: j_count + 1])
    spacings = tuple(seq[j + 1] - seq[j] for seq in seqs for j in range(j_count))
    base = 2 * (max(offsets) + 1) * (p - 1) * p ** (m.d + 2)
    ell_star = max((base, *spacings))
    min_start = m.suspension + min(offsets[idx] + layers[idx][1][0] for idx in infinite)
    gap = _pick_gap(report, min_start, ell_star)
    if gap is None:
        return TypeTResult(None, _absence_reason(report), report)
    cert = TypeTCertificate(
        kind="filtration" if m.kind == "filtration" else "span",
        prime=p,
        d=m.d,
        alpha=m.alpha,
        suspension=m.suspension,
        degree_bound=m.degree_bound,
        base_threshold=base,
        spacings=spacings,
        ell_star=ell_star,
        gap=gap,
        min_gap_start=min_start,
        j_count=j_count,
        degree_sequences=tuple(seqs),
        layer_offsets=offsets,
        infinite_layers=infinite,
        filtration_length=t,
        delta=delta,
    )
    return TypeTResult(cert, None, report)


def verdict_odd(m: ModuleDescription) -> Verdict:
    """Odd-prime realizability verdict (type-T plus the layer condition)."""
    if m.prime == 2:
        raise ValueError("verdict_odd needs an odd prime")
    res = type_t_check_odd(m)
    cond2 = None
    if m.kind == "filtration":
        cond2 = cond2_check([shift for shift, _ in m.layers], m.prime)
        if not cond2[0]:
            diffs = sorted({v[2] for v in cond2[1]})
            reason = "Condition 2 violated: difference " + ", ".join(map(str, diffs))
            return Verdict("inconclusive", reason, None, res.report, condition2=cond2)
    if res.found:
        return Verdict("not_realizable", None, res.certificate, res.report, condition2=cond2)
    return Verdict("inconclusive", res.reason, None, res.report, condition2=cond2)


def adams_check_odd(table: FiniteModuleTable) -> tuple:
    """Liulevicius/Shimada-Yamanoshita constraint on a finite table.

    For k >= 1 and x with beta x = 0 and P^{p^i}x = 0 for i < k, the value
    P^{p^k}x must lie in sum_{i<k} Im(P^{p^i}) + Im(beta).
    """
    p = table.prime
    if p == 2:
        raise ValueError("adams_check_odd needs an odd prime")
    degs = table.degrees()
    if not degs:
        return ()
    max_deg = max(degs.values())
    degree_span = max_deg - min(degs.values())
    violations = []
    k = 1
    while 2 * (p - 1) * p**k <= degree_span:
        step = 2 * (p - 1) * p**k
        for n in sorted(set(degs.values())):
            src = table.labels_in_degree(n)
            if not src or n + step > max_deg:
                continue
            tgt = table.labels_in_degree(n + step)
            tgt_index = {l: i for i, l in enumerate(tgt)}
            functionals: list[list[int]] = []
            constraint_keys = [("beta",)] + [("P", p**i) for i in range(k)]
            for key in constraint_keys:
                rows = table.matrix(key, n)
                out_labels = sorted({dst for img in rows.values() for dst in img})
                for dst in out_labels:
                    functionals.append(
                        [rows.get(lsrc, {}).get(dst, 0) % p for lsrc in src]
                    )
            kernel = modp_kernel_basis(functionals, p, len(src))
            if not kernel:
                continue
            span_rows: list[list[int]] = []
            source_keys = [("beta",)] + [("P", p**i) for i in range(k)]
            for key in source_keys:
                shift = table.operation_degree(key)
                rows = table.matrix(key, n + step - shift)
                for img in rows.values():
                    vec = [0] * len(tgt)
                    for dst, coeff in img.items():
                        if dst in tgt_index:
                            vec[tgt_index[dst]] = coeff % p
                    if any(vec):
                        span_rows.append(vec)
            topmap = table.matrix(("P", p**k), n)
            for kv in kernel:
                vec = [0] * len(tgt)
                for col, lsrc in enumerate(src):
                    if kv[col]:
                        for dst, coeff in topmap.get(lsrc, {}).items():
                            if dst in tgt_index:
                                vec[tgt_index[dst]] = (vec[tgt_index[dst]] + kv[col] * coeff) % p
                if any(vec) and not modp_in_span(vec, span_rows, p):
                    witness = tuple((src[c], kv[c]) for c in range(len(src)) if kv[c])
                    image = tuple((tgt[c], vec[c]) for c in range(len(tgt)) if vec[c])
                    violations.append((k, n, witness, image))
        k += 1
    return tuple(violations)
