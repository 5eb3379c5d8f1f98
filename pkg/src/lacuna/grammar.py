"""Text grammar for elements and operation expressions.

Elements: `term (+ term)*` where a term is `(e1,...,ed)` or a product of
`x<i>^<e>` factors, optionally prefixed `c*` (odd primes) and suffixed
`@<summand>` when alpha > 1.  Operations: atoms Sq^n, Q[t], Q[t;s], Sq0^s,
P^n, P0^s, beta; juxtaposition composes right-to-left and binds tighter
than `+`.  Printing is canonical, so parse(print(x)) = x.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import action, milnor, oddp
from .errors import ParseError

_TUPLE_RE = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)")
_FACTOR_RE = re.compile(r"x(\d+)(?:\^(\d+))?")


def _split_terms(text: str):
    """Split on top-level '+', keeping offsets for error reporting."""
    depth = 0
    start = 0
    parts = []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", text, i)
        elif ch == "+" and depth == 0:
            parts.append((start, text[start:i]))
            start = i + 1
    if depth:
        raise ParseError("unbalanced '('", text, len(text))
    parts.append((start, text[start:]))
    return parts


def _parse_term(term: str, offset: int, full: str, d: int, alpha: int):
    """Returns (coefficient, exponents tuple, summand)."""
    work = term.strip()
    if not work:
        raise ParseError("empty term", full, offset)
    coeff = 1
    m = re.match(r"\s*(\d+)\s*\*", work)
    if m:
        coeff = int(m.group(1))
        work = work[m.end():]
    summand = 1
    m = re.search(r"@\s*(\d+)\s*$", work)
    if m:
        summand = int(m.group(1))
        if summand < 1 or summand > alpha:
            raise ParseError(f"summand {summand} outside 1..{alpha}", full, offset)
        work = work[: m.start()]
    work = work.strip()
    tm = _TUPLE_RE.fullmatch(work)
    if tm:
        exps = tuple(int(v) for v in tm.group(1).split(","))
        if len(exps) != d:
            raise ParseError(f"expected {d} exponents, got {len(exps)}", full, offset)
        if any(e < 0 for e in exps):
            raise ParseError("negative exponent", full, offset)
        return coeff, exps, summand
    # product of variable powers
    exps_list = [0] * d
    pos = 0
    seen = False
    while pos < len(work):
        if work[pos].isspace() or work[pos] == "*":
            pos += 1
            continue
        fm = _FACTOR_RE.match(work, pos)
        if not fm:
            raise ParseError("expected x<i>[^e] factor or (e1,...,ed)", full, offset + pos)
        idx = int(fm.group(1))
        if idx < 1 or idx > d:
            raise ParseError(f"variable index {idx} outside 1..{d}", full, offset + pos)
        exps_list[idx - 1] += int(fm.group(2) or 1)
        pos = fm.end()
        seen = True
    if not seen:
        raise ParseError("empty term", full, offset)
    return coeff, tuple(exps_list), summand


def parse_element(text: str, *, prime: int = 2, d: int, alpha: int = 1):
    """Parse an element; PolyElement at p = 2, OddElement at odd p."""
    terms = [
        _parse_term(chunk, off, text, d, alpha) for off, chunk in _split_terms(text)
    ]
    if prime == 2:
        if any(c != 1 for c, _, _ in terms):
            raise ParseError("coefficients other than 1 need an odd prime", text, 0)
        return action.poly(
            action.BasicMonomial(summand, exps) for _, exps, summand in terms
        )
    coeffs: dict = {}
    for c, exps, summand in terms:
        if not 1 <= c <= prime - 1:
            raise ParseError(f"coefficient {c} outside 1..{prime - 1}", text, 0)
        m = oddp.OddMonomial(summand, exps)
        coeffs[m] = coeffs.get(m, 0) + c
    return oddp.odd_element(prime, coeffs)


def print_element(x) -> str:
    return str(x)


@dataclass(frozen=True)
class OpAtom:
    kind: str  # "Sq" | "Sq0" | "Q" | "P" | "P0" | "beta"
    params: tuple[int, ...]

    def __str__(self) -> str:
        if self.kind == "beta":
            return "beta"
        if self.kind == "Q":
            if len(self.params) == 2 and self.params[1]:
                return f"Q[{self.params[0]};{self.params[1]}]"
            return f"Q[{self.params[0]}]"
        return f"{self.kind}^{self.params[0]}"


@dataclass(frozen=True)
class OpExpr:
    """Sum of compositions; each composition applies right-to-left."""

    terms: tuple[tuple[OpAtom, ...], ...]

    def __str__(self) -> str:
        return " + ".join(" ".join(str(a) for a in term) for term in self.terms)


_OP_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<plus>\+)"
    r"|(?P<beta>beta)"
    r"|(?P<name>Sq0|Sq|P0|P)\s*\^\s*(?P<power>\d+)"
    r"|Q\s*\[\s*(?P<qt>\d+)\s*(?:;\s*(?P<qs>\d+)\s*)?\]"
    r")"
)


def parse_operation(text: str, *, prime: int = 2) -> OpExpr:
    pos = 0
    terms: list[tuple[OpAtom, ...]] = []
    current: list[OpAtom] = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _OP_TOKEN.match(text, pos)
        if not m:
            raise ParseError("expected operation atom", text, pos)
        if m.group("plus"):
            if not current:
                raise ParseError("empty summand", text, pos)
            terms.append(tuple(current))
            current = []
        elif m.group("beta"):
            current.append(OpAtom("beta", ()))
        elif m.group("name"):
            current.append(OpAtom(m.group("name"), (int(m.group("power")),)))
        else:
            t = int(m.group("qt"))
            s = int(m.group("qs") or 0)
            current.append(OpAtom("Q", (t, s)))
        pos = m.end()
    if not current:
        raise ParseError("empty operation expression", text, pos)
    terms.append(tuple(current))
    expr = OpExpr(tuple(terms))
    _check_prime_compat(expr, prime, text)
    return expr


def _check_prime_compat(expr: OpExpr, prime: int, text: str) -> None:
    for term in expr.terms:
        for atom in term:
            if prime == 2 and atom.kind in ("P", "P0", "beta"):
                raise ParseError(f"{atom} needs an odd prime", text, 0)
            if prime != 2 and atom.kind in ("Sq", "Sq0"):
                raise ParseError(f"{atom} needs p = 2", text, 0)


def _apply_atom(atom: OpAtom, x, prime: int):
    if prime == 2:
        if atom.kind == "Sq":
            return action.apply_sq(atom.params[0], x)
        if atom.kind == "Sq0":
            return action.sq0_power(x, atom.params[0])
        if atom.kind == "Q":
            return action.qts_apply(atom.params[0], atom.params[1], x)
    else:
        if atom.kind == "P":
            return oddp.apply_p(atom.params[0], x)
        if atom.kind == "P0":
            return oddp.p0_power(x, atom.params[0])
        if atom.kind == "beta":
            return oddp.apply_beta(x)
        if atom.kind == "Q":
            return oddp.qts_apply_odd(atom.params[0], atom.params[1], x)
    raise ParseError(f"{atom} not available at p = {prime}", str(atom), 0)


def apply_operation(expr: OpExpr, x, *, prime: int = 2):
    """Evaluate the expression on an element; compositions right-to-left."""
    total = None
    for term in expr.terms:
        value = x
        for atom in reversed(term):
            value = _apply_atom(atom, value, prime)
        total = value if total is None else total + value
    return total


def parse_milnor_element(text: str) -> milnor.OperationSum:
    """Milnor-basis sums like `Sq(3,1) + Sq(0,2)`; unit is Sq()."""
    acc = []
    for off, chunk in _split_terms(text):
        work = chunk.strip()
        m = re.fullmatch(r"Sq\(\s*(\d+(?:\s*,\s*\d+)*)?\s*\)", work)
        if not m:
            raise ParseError("expected Sq(r1,...,rk)", text, off)
        exps = tuple(int(v) for v in m.group(1).split(",")) if m.group(1) else ()
        acc.append(milnor.milnor(*exps))
    return milnor.operation_sum(acc)
