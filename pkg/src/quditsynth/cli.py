"""``quditsynth`` command line: synth, verify, count, compile-reversible, bound, report-scaling.

Exit codes: 0 success or PASS, 1 verification FAIL, 2 usage or constraint error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .ir import Circuit, CircuitError, deserialize, serialize
from .multictl import FAMILIES, AncillaMode, SynthesisError, SynthesisRequest, synthesize
from .primitives import LoweringLevel, count_gates
from .revcomp import FunctionError, ReversibleFunction, compile_reversible, lower_bound
from .sim import StateSpaceTooLarge, target_map, verify_ancilla, verify_equiv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _value(text: str) -> Any:
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse parameter value {text!r}") from exc


def parse_target_spec(spec: str) -> tuple[str, dict[str, Any]]:
    """Parse ``family:key=val,key=v1,v2,...``; bare items extend the previous key into a list."""
    family, _, rest = spec.partition(":")
    params: dict[str, Any] = {}
    key = None
    for item in filter(None, (s.strip() for s in rest.split(","))):
        if "=" in item:
            key, _, val = item.partition("=")
            params[key] = _value(val)
        elif key is None:
            raise UsageError(f"parameter {item!r} has no key in target {spec!r}")
        else:
            prev = params[key]
            params[key] = (prev if isinstance(prev, list) else [prev]) + [_value(item)]
    for name in ("u", "pattern", "a", "b", "table"):
        if name in params and not isinstance(params[name], list):
            params[name] = [params[name]]
    return family.strip(), params


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _print_json(obj: Any) -> None:
    print(json.dumps(obj, sort_keys=True))


def _summary(c: Circuit) -> dict[str, Any]:
    return count_gates(c).to_dict()


def _load_circuit(path: str) -> Circuit:
    return deserialize(Path(path).read_text())


# --------------------------------------------------------------------------
# Subcommands


def cmd_synth(args: argparse.Namespace) -> int:
    u = tuple(_int_list(args.u)) if args.u else None
    req = SynthesisRequest(args.family, args.k, args.d, args.ancilla, u)
    c = synthesize(req, args.lower)
    _write(args.out, serialize(c))
    summary = json.dumps(_summary(c), sort_keys=True)
    print(summary, file=sys.stdout if args.out not in (None, "-") else sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    c = _load_circuit(args.circuit)
    if args.target_perm:
        f = ReversibleFunction.load(args.target_perm)
        if f.d != c.d:
            raise UsageError(f"function is over d={f.d}, circuit over d={c.d}")
        m, fn = target_map("function", c.d, n=f.n, table=f.table)
    elif args.target:
        family, params = parse_target_spec(args.target)
        m, fn = target_map(family, c.d, **params)
    else:
        raise UsageError("give --target or --target-perm")
    if m != len(c.main_wires):
        raise UsageError(f"target acts on {m} wires but the circuit has {len(c.main_wires)} main wires")
    check = verify_ancilla if c.ancilla_wires else verify_equiv
    report = check(c, fn, mode=args.mode, samples=args.samples, seed=args.seed)
    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_count(args: argparse.Namespace) -> int:
    _print_json(_summary(_load_circuit(args.circuit)))
    return EXIT_OK


def cmd_compile(args: argparse.Namespace) -> int:
    f = ReversibleFunction.load(args.function)
    c = compile_reversible(f, args.lower)
    _write(args.out, serialize(c))
    print(json.dumps(_summary(c), sort_keys=True), file=sys.stdout if args.out not in (None, "-") else sys.stderr)
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    _print_json(lower_bound(args.n, args.d, args.c, args.observed).to_dict())
    return EXIT_OK


def scaling_rows(family: str, d: int, ks: Sequence[int], ancilla_mode: str, u: Sequence[int] | None) -> list[dict]:
    rows = []
    for k in ks:
        c = synthesize(SynthesisRequest(family, k, d, ancilla_mode, tuple(u) if u else None))
        n = count_gates(c)
        rows.append(
            {"k": k, "macro": n.macro, "two_qudit": n.two_qudit, "g_gates": n.g_gates, "ancilla": sum(n.ancilla.values())}
        )
    return rows


def cmd_report_scaling(args: argparse.Namespace) -> int:
    ks = _int_list(args.k_list)
    if not ks:
        raise UsageError("--k-list is empty")
    u = _int_list(args.u) if args.u else None
    if args.family.replace("-", "_") == "mcu" and u is None:
        u = [(x + 1) % args.d for x in range(args.d)]
    rows = scaling_rows(args.family, args.d, ks, args.ancilla, u)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["k", "macro", "two_qudit", "g_gates", "ancilla"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write(args.csv, buf.getvalue())
    return EXIT_OK


# --------------------------------------------------------------------------


def _family(text: str) -> str:
    fam = text.replace("-", "_")
    if fam not in FAMILIES:
        raise argparse.ArgumentTypeError(f"unknown family {text!r}")
    return fam


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quditsynth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    modes = [m.value.replace("_", "-") for m in AncillaMode]
    levels = [lv.value for lv in LoweringLevel]

    s = sub.add_parser("synth", help="synthesize a multi-controlled gate")
    s.add_argument("--family", type=_family, required=True, help="ktoffoli, ctrl-add1, pk, pk-dagger or mcu")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--ancilla", choices=modes, default="auto")
    s.add_argument("--u", help="single-qudit permutation as images p0,p1,...")
    s.add_argument("--lower", choices=levels, default="macro")
    s.add_argument("--out", help="circuit JSON path (default: stdout)")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="check a circuit against a target")
    v.add_argument("circuit")
    v.add_argument("--target", help="family:key=val,... e.g. ktoffoli:k=3 or mcu:k=2,u=1,2,0")
    v.add_argument("--target-perm", help="reversible function JSON {d, n, table}")
    v.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("count", help="gate counts at every lowering level")
    c.add_argument("circuit")
    c.set_defaults(func=cmd_count)

    r = sub.add_parser("compile-reversible", help="compile a reversible function table")
    r.add_argument("--function", required=True, help="JSON {d, n, table}")
    r.add_argument("--lower", choices=levels, default="macro")
    r.add_argument("--out")
    r.set_defaults(func=cmd_compile)

    b = sub.add_parser("bound", help="counting lower bound on worst-case gate count")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--c", type=float, default=1.0)
    b.add_argument("--observed", type=int)
    b.set_defaults(func=cmd_bound)

    sc = sub.add_parser("report-scaling", help="CSV of gate counts over k")
    sc.add_argument("--family", type=_family, required=True)
    sc.add_argument("--d", type=int, required=True)
    sc.add_argument("--k-list", required=True, help="comma-separated k values")
    sc.add_argument("--ancilla", choices=modes, default="auto")
    sc.add_argument("--u")
    sc.add_argument("--csv", help="output path (default: stdout)")
    sc.set_defaults(func=cmd_report_scaling)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, SynthesisError, CircuitError, FunctionError, StateSpaceTooLarge, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
