"""Gap scanning and non-realizability certification at p = 2.

A module is described either as the A_2-span of generators inside
H*(B(Z/2)^d)^{+alpha} or as a finite list of nilpotent-filtration layers
(m_i, generators of the reduced layer R_{m_i}).  The checker scans the
occupied degrees for gaps, measures them against the type-T thresholds and,
in the filtered case, against the spacing condition on the m_i; a
qualifying gap yields a standalone re-checkable certificate that the module
is not the reduced cohomology of any space or spectrum.  Inconclusive never
means realizable.

The degree bound applies to the underlying (unsuspended) module, so every
reported quantity is a suspension-equivariant shift and the verdict is
suspension-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable, Sequence

from .action import PolyElement, span_degrees
from .linalg import gf2_in_span, gf2_kernel_basis

CONDITION1_FORBIDDEN = (1, 2, 4, 8)


@dataclass(frozen=True)
class ModuleDescription:
    prime: int
    d: int
    alpha: int
    suspension: int
    kind: str  # "span" | "filtration"
    degree_bound: int
    generators: tuple = ()  # span kind
    layers: tuple = ()  # filtration kind: ((m_i, generators), ...)

    def __post_init__(self):
        if self.kind not in ("span", "filtration"):
            raise ValueError(f"unknown module kind {self.kind!r}")
        if self.d < 1 or self.alpha < 1:
            raise ValueError("need d >= 1 and alpha >= 1")
        if self.kind == "span":
            if not self.generators:
                raise ValueError("span description needs generators")
            _check_generators(self.generators, self.d, self.alpha)
        else:
            if not self.layers:
                raise ValueError("filtration description needs layers")
            ms = [m for m, _ in self.layers]
            if any(m < 0 for m in ms) or any(b <= a for a, b in zip(ms, ms[1:])):
                raise ValueError("layer offsets must be non-negative and strictly increasing")
            for _, gens in self.layers:
                if not gens:
                    raise ValueError("every filtration layer needs generators")
                _check_generators(gens, self.d, self.alpha)


def _check_generators(gens, d: int, alpha: int) -> None:
    for g in gens:
        if g.is_zero():
            raise ValueError("zero generator")
        if g.degree < 1:
            raise ValueError("generators must have positive degree (connected module)")
        if g.d != d:
            raise ValueError(f"generator rank {g.d} != described d = {d}")
        if any(m.summand > alpha for m in g.monomials):
            raise ValueError("summand index exceeds alpha")


@dataclass(frozen=True)
class GapReport:
    occupied: tuple[int, ...]
    gaps: tuple[tuple[int, int], ...]  # (s, l): zeros in s < j <= s+l
    degree_bound: int
    suspension: int
    bound_truncated: bool

    def occupied_runs(self) -> list[tuple[int, int]]:
        """Run-length encoding of the occupied set as (start, length)."""
        runs = []
        for deg in self.occupied:
            if runs and deg == runs[-1][0] + runs[-1][1]:
                runs[-1] = (runs[-1][0], runs[-1][1] + 1)
            else:
                runs.append((deg, 1))
        return runs

    def to_dict(self) -> dict:
        return {
            "schema": "gap-report/1",
            "occupied_rle": self.occupied_runs(),
            "gaps": [list(g) for g in self.gaps],
            "degree_bound": self.degree_bound,
            "suspension": self.suspension,
            "bound_truncated": self.bound_truncated,
        }


def _gaps_from_occupied(occupied: Sequence[int]) -> tuple[tuple[int, int], ...]:
    gaps = []
    for a, b in zip(occupied, occupied[1:]):
        if b > a + 1:
            gaps.append((a, b - a - 1))
    return tuple(gaps)


def _layer_occupancy(m: ModuleDescription) -> list[tuple[int, tuple[int, ...]]]:
    """Per layer: (shift m_i, occupied degrees of the layer in its own grading)."""
    if m.kind == "span":
        layers = [(0, m.generators)]
    else:
        layers = list(m.layers)
    out = []
    for shift, gens in layers:
        bound = m.degree_bound - shift
        occ = span_degrees(gens, bound).occupied() if bound >= 0 else ()
        out.append((shift, occ))
    return out


def gap_scan(m: ModuleDescription) -> GapReport:
    """Occupied degrees and gaps of the described module, suspension applied."""
    layers = _layer_occupancy(m)
    occupied: set[int] = set()
    truncated = False
    for shift, occ in layers:
        occupied.update(shift + n for n in occ)
        if occ and 2 * occ[-1] > m.degree_bound - shift:
            truncated = True  # Sq_0 keeps doubling past the bound
    occ_sorted = tuple(sorted(m.suspension + n for n in occupied))
    return GapReport(
        occ_sorted,
        _gaps_from_occupied(occ_sorted),
        m.degree_bound,
        m.suspension,
        truncated,
    )


@dataclass(frozen=True)
class TypeTCertificate:
    """Everything needed to re-check a qualifying gap without recomputation."""

    kind: str
    prime: int
    d: int
    alpha: int
    suspension: int
    degree_bound: int
    base_threshold: int
    spacings: tuple[int, ...]
    ell_star: int
    gap: tuple[int, int]  # (s, l)
    min_gap_start: int
    j_count: int
    degree_sequences: tuple[tuple[int, ...], ...]  # first j_count+1 degrees per layer in I
    layer_offsets: tuple[int, ...] = ()
    infinite_layers: tuple[int, ...] = ()  # indices into layer_offsets
    filtration_length: int = 0
    delta: int = 0

    def revalidate(self) -> bool:
        """Re-check every inequality from the stored data alone."""
        spacings = []
        for seq in self.degree_sequences:
            if len(seq) < self.j_count + 1:
                return False
            spacings.extend(seq[j + 1] - seq[j] for j in range(self.j_count))
        if tuple(spacings) != self.spacings:
            return False
        if self.ell_star != max((self.base_threshold, *self.spacings)):
            return False
        s, l = self.gap
        p = self.prime
        if p == 2 and self.kind == "span":
            expected_base = 2 ** (self.d + 4)
            j_needed = ceil(1 + Fraction(self.d - 1) * Fraction(2) ** (self.d - 2))
        else:
            if not self.infinite_layers:
                return False
            t = self.filtration_length
            if not (p**self.delta >= t > p ** (self.delta - 1)):
                return False
            m_top = max(self.layer_offsets)
            if p == 2:
                expected_base = (m_top + 1) * 2 ** (self.d + 4)
                j_needed = ceil(
                    1 + Fraction(self.d + self.delta - 1) * Fraction(2) ** (self.d - 2)
                )
            else:
                expected_base = 2 * (m_top + 1) * (p - 1) * p ** (self.d + 2)
                j_needed = ceil(
                    1
                    + Fraction(self.d + self.delta) * (p - 1) ** 2 * Fraction(p) ** (self.d - 2)
                )
        if self.base_threshold != expected_base or self.j_count != j_needed:
            return False
        return l >= self.ell_star and s >= self.min_gap_start

    def to_dict(self) -> dict:
        return {
            "schema": "type-t-certificate/1",
            "kind": self.kind,
            "prime": self.prime,
            "d": self.d,
            "alpha": self.alpha,
            "suspension": self.suspension,
            "degree_bound": self.degree_bound,
            "base_threshold": self.base_threshold,
            "spacings": list(self.spacings),
            "ell_star": self.ell_star,
            "gap": list(self.gap),
            "min_gap_start": self.min_gap_start,
            "j_count": self.j_count,
            "degree_sequences": [list(s) for s in self.degree_sequences],
            "layer_offsets": list(self.layer_offsets),
            "infinite_layers": list(self.infinite_layers),
            "filtration_length": self.filtration_length,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class TypeTResult:
    certificate: TypeTCertificate | None
    reason: str | None
    report: GapReport

    @property
    def found(self) -> bool:
        return self.certificate is not None


def _pick_gap(report: GapReport, min_start: int, ell_star: int):
    for s, l in report.gaps:
        if s >= min_start and l >= ell_star:
            return (s, l)
    return None


def _absence_reason(report: GapReport) -> str:
    if report.gaps and report.bound_truncated:
        return "bound truncation before qualifying gap"
    return "no qualifying gap"


def type_t_check(m: ModuleDescription) -> TypeTResult:
    """Type-T certification for a reduced span (single nilpotent layer).

    The threshold is ell* = max(2^{d+4}, n_{j+1} - n_j) over the first
    1 + (d-1)2^{d-2} spacings of the occupied degrees n_1 < n_2 < ...; a
    gap (s, s+l] qualifies when s >= n_1 and l >= ell*.
    """
    if m.kind != "span":
        raise ValueError("type_t_check needs a span description")
    if m.prime != 2:
        raise ValueError("type_t_check is the p = 2 checker")
    report = gap_scan(m)
    occ = report.occupied
    if not occ:
        return TypeTResult(None, "module is trivial within bound", report)
    j_count = ceil(1 + Fraction(m.d - 1) * Fraction(2) ** (m.d - 2))
    if len(occ) < j_count + 1:
        return TypeTResult(
            None, "bound truncation before enough occupied degrees", report
        )
    n_seq = occ[: j_count + 1]
    spacings = tuple(n_seq[j + 1] - n_seq[j] for j in range(j_count))
    base = 2 ** (m.d + 4)
    ell_star = max((base, *spacings))
    gap = _pick_gap(report, occ[0], ell_star)
    if gap is None:
        return TypeTResult(None, _absence_reason(report), report)
    cert = TypeTCertificate(
        kind="span",
        prime=2,
        d=m.d,
        alpha=m.alpha,
        suspension=m.suspension,
        degree_bound=m.degree_bound,
        base_threshold=base,
        spacings=spacings,
        ell_star=ell_star,
        gap=gap,
        min_gap_start=occ[0],
        j_count=j_count,
        degree_sequences=(n_seq,),
    )
    return TypeTResult(cert, None, report)


def type_t_filtration_check(m: ModuleDescription) -> TypeTResult:
    """Type-T certification for a module with finite nilpotent filtration.

    With t layers and 2^delta >= t > 2^{delta-1}, the threshold becomes
    ell* = max((m_t+1)2^{d+4}, n_{j+1,i} - n_{j,i}) over the infinite
    layers i and j up to 1 + (d+delta-1)2^{d-2} (rounded up when
    fractional: a larger range only raises ell*); the gap must start at or
    after min(m_i + n_{1,i}).  Layers still growing at the bound count as
    infinite.
    """
    if m.kind != "filtration":
        raise ValueError("type_t_filtration_check needs a filtration description")
    if m.prime != 2:
        raise ValueError("type_t_filtration_check is the p = 2 checker")
    report = gap_scan(m)
    layers = _layer_occupancy(m)
    offsets = tuple(shift for shift, _ in layers)
    t = len(layers)
    delta = 0
    while 2**delta < t:
        delta += 1
    infinite = tuple(
        idx
        for idx, (shift, occ) in enumerate(layers)
        if occ and 2 * occ[-1] > m.degree_bound - shift
    )
    if not infinite:
        return TypeTResult(None, "no infinite layer within bound", report)
    j_count = ceil(1 + Fraction(m.d + delta - 1) * Fraction(2) ** (m.d - 2))
    seqs = []
    for idx in infinite:
        occ = layers[idx][1]
        if len(occ) < j_count + 1:
            return TypeTResult(
                None, "bound truncation before enough occupied degrees", report
            )
        seqs.append(occ[: j_count + 1])
    spacings = tuple(
        seq[j + 1] - seq[j] for seq in seqs for j in range(j_count)
    )
    base = (max(offsets) + 1) * 2 ** (m.d + 4)
    ell_star = max((base, *spacings))
    min_start = m.suspension + min(offsets[idx] + layers[idx][1][0] for idx in infinite)
    gap = _pick_gap(report, min_start, ell_star)
    if gap is None:
        return TypeTResult(None, _absence_reason(report), report)
    cert = TypeTCertificate(
        kind="filtration",
        prime=2,
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


def condition1_check(layers: Sequence[int]) -> tuple[bool, tuple[tuple[int, int, int], ...]]:
    """No pairwise difference of the layer offsets may be 1, 2, 4 or 8."""
    ms = list(layers)
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("layer offsets must be strictly increasing")
    violations = []
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            if ms[j] - ms[i] in CONDITION1_FORBIDDEN:
                violations.append((ms[i], ms[j], ms[j] - ms[i]))
    return not violations, tuple(violations)


@dataclass(frozen=True)
class FiniteModuleTable:
    """Explicit graded basis with operation matrices, for the Adams check.

    Only nonzero actions are listed; anything absent acts as zero.  Keys are
    ("Sq", k) at p = 2, ("P", k) and ("beta",) at odd p.
    """

    prime: int
    basis: tuple[tuple[str, int], ...]  # (label, degree)
    actions: dict = field(default_factory=dict)  # key -> {src: {dst: coeff}}

    def __post_init__(self):
        labels = [l for l, _ in self.basis]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate basis labels")
        deg = dict(self.basis)
        for key, rows in self.actions.items():
            shift = self.operation_degree(key)
            for src, images in rows.items():
                if src not in deg:
                    raise ValueError(f"unknown source label {src!r}")
                if key[0] == "Sq" and deg[src] < key[1]:
                    raise ValueError(f"instability: Sq^{key[1]} on degree {deg[src]}")
                if key[0] == "P" and deg[src] < 2 * key[1]:
                    raise ValueError(f"instability: P^{key[1]} on degree {deg[src]}")
                for dst, coeff in images.items():
                    if dst not in deg:
                        raise ValueError(f"unknown target label {dst!r}")
                    if deg[dst] != deg[src] + shift:
                        raise ValueError(
                            f"{key} maps degree {deg[src]} to {deg[src] + shift}, "
                            f"but {dst!r} has degree {deg[dst]}"
                        )
                    if coeff % self.prime == 0:
                        raise ValueError("zero coefficient listed")

    def operation_degree(self, key) -> int:
        if key[0] == "Sq":
            return key[1]
        if key[0] == "P":
            return 2 * key[1] * (self.prime - 1)
        if key[0] == "beta":
            return 1
        raise ValueError(f"unknown operation key {key}")

    def degrees(self) -> dict[str, int]:
        return dict(self.basis)

    def labels_in_degree(self, n: int) -> list[str]:
        return [l for l, d in self.basis if d == n]

    def matrix(self, key, src_degree: int):
        """Rows indexed by source labels in src_degree, as coefficient dicts."""
        rows = self.actions.get(key, {})
        return {
            l: rows.get(l, {}) for l in self.labels_in_degree(src_degree)
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteModuleTable":
        prime = data.get("prime", 2)
        basis = tuple((str(b["label"]), int(b["degree"])) for b in data["basis"])
        actions: dict = {}
        for opname, rows in data.get("actions", {}).items():
            key = _parse_op_key(opname)
            parsed: dict = {}
            for src, images in rows.items():
                if isinstance(images, list):
                    parsed[src] = {dst: 1 for dst in images}
                else:
                    parsed[src] = {dst: int(c) for dst, c in images.items()}
            actions[key] = parsed
        return cls(prime, basis, actions)


def _parse_op_key(name: str):
    if name == "beta":
        return ("beta",)
    if name.startswith("Sq^"):
        return ("Sq", int(name[3:]))
    if name.startswith("P^"):
        return ("P", int(name[2:]))
    raise ValueError(f"unknown operation name {name!r}")


@dataclass(frozen=True)
class AdamsViolation:
    k: int
    degree: int
    witness: tuple[tuple[str, int], ...]  # kernel vector, label: coeff
    image: tuple[tuple[str, int], ...]

    def describe(self) -> str:
        w = " + ".join(f"{c}*{l}" if c != 1 else l for l, c in self.witness)
        im = " + ".join(f"{c}*{l}" if c != 1 else l for l, c in self.image) or "0"
        return (
            f"k={self.k}, degree {self.degree}: x = {w} has Sq^(2^i)x = 0 for i < {self.k} "
            f"but Sq^(2^{self.k})x = {im} misses sum of Im(Sq^(2^i))"
        )


def adams_check(table: FiniteModuleTable) -> tuple[AdamsViolation, ...]:
    """Hopf-invariant constraint on a finite table at p = 2.

    For every k >= 4 and every x with Sq^{2^i}x = 0 for all i < k, the value
    Sq^{2^k}x must lie in the sum of the images of the Sq^{2^i}, i < k; each
    failure is returned as a violation witnessing non-realizability.
    """
    if table.prime != 2:
        raise ValueError("adams_check is the p = 2 checker; see adams_check_odd")
    degs = table.degrees()
    if not degs:
        return ()
    degree_span = max(degs.values()) - min(degs.values())
    violations = []
    for k in range(4, degree_span.bit_length() + 1):
        step = 1 << k
        if step > degree_span:
            break
        for n in sorted(set(degs.values())):
            src = table.labels_in_degree(n)
            if not src or n + step > max(degs.values()):
                continue
            tgt = table.labels_in_degree(n + step)
            tgt_index = {l: i for i, l in enumerate(tgt)}
            # kernel of the stacked Sq^{2^i}, i < k, as bitmask functionals
            functionals = []
            for i in range(k):
                rows = table.matrix(("Sq", 1 << i), n)
                out_labels = sorted({dst for img in rows.values() for dst in img})
                for dst in out_labels:
                    f = 0
                    for col, lsrc in enumerate(src):
                        if rows.get(lsrc, {}).get(dst, 0) % 2:
                            f |= 1 << col
                    if f:
                        functionals.append(f)
            kernel = gf2_kernel_basis(functionals, len(src))
            if not kernel:
                continue
            # target subspace: sum over i < k of Sq^{2^i}(M^{n+2^k-2^i})
            span_rows = []
            for i in range(k):
                sub = 1 << i
                rows = table.matrix(("Sq", sub), n + step - sub)
                for img in rows.values():
                    v = 0
                    for dst, coeff in img.items():
                        if coeff % 2 and dst in tgt_index:
                            v |= 1 << tgt_index[dst]
                    if v:
                        span_rows.append(v)
            topmap = table.matrix(("Sq", step), n)
            for kv in kernel:
                v = 0
                for col, lsrc in enumerate(src):
                    if kv >> col & 1:
                        for dst, coeff in topmap.get(lsrc, {}).items():
                            if coeff % 2 and dst in tgt_index:
                                v ^= 1 << tgt_index[dst]
                if v and not gf2_in_span(v, span_rows):
                    witness = tuple((src[c], 1) for c in range(len(src)) if kv >> c & 1)
                    image = tuple(
                        (tgt[c], 1) for c in range(len(tgt)) if v >> c & 1
                    )
                    violations.append(AdamsViolation(k, n, witness, image))
    return tuple(violations)


@dataclass(frozen=True)
class Verdict:
    outcome: str  # "not_realizable" | "inconclusive"
    reason: str | None
    certificate: TypeTCertificate | None
    report: GapReport
    condition1: tuple[bool, tuple] | None = None
    condition2: tuple[bool, tuple] | None = None

    @property
    def not_realizable(self) -> bool:
        return self.outcome == "not_realizable"

    def to_dict(self) -> dict:
        return {
            "schema": "verdict/1",
            "outcome": self.outcome,
            "reason": self.reason,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "report": self.report.to_dict(),
            "condition1": _cond_dict(self.condition1),
            "condition2": _cond_dict(self.condition2),
        }


def _cond_dict(cond):
    if cond is None:
        return None
    ok, violations = cond
    return {"holds": ok, "violations": [list(v) for v in violations]}


def verdict(m: ModuleDescription) -> Verdict:
    """Realizability verdict at p = 2.

    Span kind: not realizable as soon as a type-T certificate exists (any
    iterated suspension, positive or negative).  Filtration kind: requires
    the certificate and the layer-spacing condition.  Anything else is
    inconclusive with the failed hypothesis named.
    """
    if m.prime != 2:
        raise ValueError("verdict handles p = 2; use oddp.verdict_odd")
    if m.kind == "span":
        res = type_t_check(m)
        if res.found:
            return Verdict("not_realizable", None, res.certificate, res.report)
        return Verdict("inconclusive", res.reason, None, res.report)
    cond1 = condition1_check([shift for shift, _ in m.layers])
    res = type_t_filtration_check(m)
    if not cond1[0]:
        diffs = sorted({v[2] for v in cond1[1]})
        reason = "Condition 1 violated: difference " + ", ".join(map(str, diffs))
        return Verdict("inconclusive", reason, None, res.report, condition1=cond1)
    if res.found:
        return Verdict(
            "not_realizable", None, res.certificate, res.report, condition1=cond1
        )
    return Verdict("inconclusive", res.reason, None, res.report, condition1=cond1)
