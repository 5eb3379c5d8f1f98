"""Command-line front end.

Exit codes: 0 success or Inconclusive, 10 NotRealizable certificate
produced, 11 Adams violation found, 1 verification-suite failure,
64 usage error, 65 bad input data.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import milnor, obstruct, oddp, suites
from .errors import ParseError, ResourceLimitError
from .grammar import (
    apply_operation,
    parse_element,
    parse_milnor_element,
    parse_operation,
)

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_NOT_REALIZABLE = 10
EXIT_ADAMS_VIOLATION = 11
EXIT_USAGE = 64
EXIT_INPUT = 65

SCHEMA_TAG = "lacuna-record/1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="lacuna",
        description=(
            "Steenrod operations on H*(B(Z/p)^d), exchange combinatorics and "
            "gap-based non-realizability certificates."
        ),
        epilog=(
            "Operation expressions compose by juxtaposition, right-to-left "
            "(Sq^2 Sq^1 means apply Sq^1 first), and composition binds "
            "tighter than '+'."
        ),
    )
    p.add_argument("--prime", type=int, default=2, help="ground prime (default 2)")
    p.add_argument("--d", type=int, default=1, help="ambient rank d")
    p.add_argument("--alpha", type=int, default=1, help="number of summands")
    p.add_argument("--bound", type=int, default=256, help="degree bound")
    p.add_argument("--machine", action="store_true", help="emit machine-readable JSON")
    p.add_argument("--seed", type=int, default=20259, help="seed for randomized suites")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("apply", help="apply an operation expression to an element")
    s.add_argument("operation")
    s.add_argument("element")

    s = sub.add_parser("milnor-mul", help="multiply two Milnor basis sums")
    s.add_argument("a")
    s.add_argument("b")

    s = sub.add_parser("qts", help="the operation Q_t^s")
    s.add_argument("t", type=int)
    s.add_argument("s", type=int)
    s.add_argument("--milnor", action="store_true", help="print the Milnor expansion (default)")
    s.add_argument("--apply", dest="target", help="apply to this element instead")

    s = sub.add_parser("gaps", help="occupied degrees and gaps of a module file")
    s.add_argument("modulefile")

    s = sub.add_parser("check", help="realizability verdict for a module file")
    s.add_argument("modulefile")

    s = sub.add_parser("adams", help="Adams-condition check on a finite table file")
    s.add_argument("tablefile")

    s = sub.add_parser("verify-suite", help="run a named verification suite")
    s.add_argument("name", choices=sorted(suites.SUITES))
    return p


def load_module_description(path: str) -> obstruct.ModuleDescription:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    prime = int(data.get("prime", 2))
    d = int(data["d"])
    alpha = int(data.get("alpha", 1))

    def gens(texts):
        return tuple(
            parse_element(t, prime=prime, d=d, alpha=alpha) for t in texts
        )

    kind = data["kind"]
    if kind == "span":
        return obstruct.ModuleDescription(
            prime=prime,
            d=d,
            alpha=alpha,
            suspension=int(data.get("suspension", 0)),
            kind="span",
            degree_bound=int(data["degree_bound"]),
            generators=gens(data["generators"]),
        )
    if kind == "filtration":
        layers = tuple(
            (int(layer["m"]), gens(layer["generators"])) for layer in data["layers"]
        )
        return obstruct.ModuleDescription(
            prime=prime,
            d=d,
            alpha=alpha,
            suspension=int(data.get("suspension", 0)),
            kind="filtration",
            degree_bound=int(data["degree_bound"]),
            layers=layers,
        )
    raise ValueError(f"unknown module kind {kind!r}")


def _emit(args, human: str, record: dict) -> None:
    print(human)
    if args.machine:
        record["schema"] = record.get("schema", SCHEMA_TAG)
        print(json.dumps(record, sort_keys=True))


def _cmd_apply(args) -> int:
    expr = parse_operation(args.operation, prime=args.prime)
    elem = parse_element(args.element, prime=args.prime, d=args.d, alpha=args.alpha)
    result = apply_operation(expr, elem, prime=args.prime)
    _emit(args, str(result), {"result": str(result), "operation": str(expr)})
    return EXIT_OK


def _cmd_milnor_mul(args) -> int:
    a = parse_milnor_element(args.a)
    b = parse_milnor_element(args.b)
    result = a * b
    _emit(args, str(result), {"result": str(result)})
    return EXIT_OK


def _cmd_qts(args) -> int:
    if args.target:
        elem = parse_element(args.target, prime=args.prime, d=args.d, alpha=args.alpha)
        if args.prime == 2:
            from .action import qts_apply

            result = qts_apply(args.t, args.s, elem)
        else:
            result = oddp.qts_apply_odd(args.t, args.s, elem)
        _emit(args, str(result), {"result": str(result)})
        return EXIT_OK
    expansion = milnor.qts_milnor(args.t, args.s)
    _emit(args, str(expansion), {"result": str(expansion)})
    return EXIT_OK


def _cmd_gaps(args) -> int:
    m = load_module_description(args.modulefile)
    report = obstruct.gap_scan(m) if m.prime == 2 else oddp.gap_scan_odd(m)
    lines = [
        f"occupied ({len(report.occupied)} degrees up to bound {m.degree_bound}):",
        "  " + " ".join(str(n) for n in report.occupied),
        "gaps (s, s+l]:",
    ]
    lines += [f"  ({s}, {s + l}]  length {l}" for s, l in report.gaps] or ["  none"]
    if report.bound_truncated:
        lines.append("occupancy continues past the bound")
    _emit(args, "\n".join(lines), report.to_dict())
    return EXIT_OK


def _cmd_check(args) -> int:
    m = load_module_description(args.modulefile)
    v = obstruct.verdict(m) if m.prime == 2 else oddp.verdict_odd(m)
    if v.not_realizable:
        c = v.certificate
        s, l = c.gap
        human = (
            f"NotRealizable: gap ({s}, {s + l}] of length {l} >= ell* = {c.ell_star} "
            f"(base threshold {c.base_threshold}, max spacing "
            f"{max(c.spacings) if c.spacings else 0})"
        )
        _emit(args, human, v.to_dict())
        return EXIT_NOT_REALIZABLE
    _emit(args, f"Inconclusive: {v.reason}", v.to_dict())
    return EXIT_OK


def _cmd_adams(args) -> int:
    with open(args.tablefile, "r", encoding="utf-8") as fh:
        table = obstruct.FiniteModuleTable.from_dict(json.load(fh))
    if table.prime == 2:
        violations = obstruct.adams_check(table)
        lines = [v.describe() for v in violations]
        record = {
            "violations": [
                {"k": v.k, "degree": v.degree, "witness": list(map(list, v.witness))}
                for v in violations
            ]
        }
    else:
        violations = oddp.adams_check_odd(table)
        lines = [
            f"k={k}, degree {n}: witness {dict(w)} misses the image sum"
            for k, n, w, _ in violations
        ]
        record = {
            "violations": [
                {"k": k, "degree": n, "witness": list(map(list, w))}
                for k, n, w, _ in violations
            ]
        }
    if violations:
        _emit(args, "\n".join(lines), record)
        return EXIT_ADAMS_VIOLATION
    _emit(args, "no violations", record)
    return EXIT_OK


def _cmd_verify_suite(args) -> int:
    result = suites.SUITES[args.name](seed=args.seed)
    status = "PASS" if not result.failures else "FAIL"
    lines = [f"[{status}] suite {result.name}: {result.checked} checks"]
    lines += [f"  {f}" for f in result.failures[:20]]
    record = {
        "suite": result.name,
        "checked": result.checked,
        "failures": list(result.failures[:100]),
        "seed": args.seed,
    }
    _emit(args, "\n".join(lines), record)
    return EXIT_OK if not result.failures else EXIT_SUITE_FAILED


_COMMANDS = {
    "apply": _cmd_apply,
    "milnor-mul": _cmd_milnor_mul,
    "qts": _cmd_qts,
    "gaps": _cmd_gaps,
    "check": _cmd_check,
    "adams": _cmd_adams,
    "verify-suite": _cmd_verify_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, ResourceLimitError, ValueError, KeyError, OSError) as e:
        print(f"lacuna: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
