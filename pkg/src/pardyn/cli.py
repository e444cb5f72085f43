"""Command-line interface.

Exit status: 0 on success, 1 on invalid input or violated precondition,
2 when a property check finds a counterexample.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .breaking import (
    check_conditions,
    is_global,
    verify_blurbs,
    verify_break_traces,
    verify_minimal_breaks,
    verify_simplicity,
)
from .bundles import CycleError, build_cp_algebra, cp_report, trace_measure_pairs
from .dynamics import (
    FiniteSystem,
    ValidationError,
    chain_decomposition,
    compute_domains,
    is_free,
    is_minimal,
    minimality_report,
    orbit_decomposition,
    orbit_space,
)
from .generators import make, parse_spec
from .measures import conformal_measure_polytope, invariant_measure_polytope
from .ranks import RankFunction, as_rank


class UsageError(ValidationError):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(_sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- input ----------------------------------------------------------------


def load_system(args) -> FiniteSystem:
    if bool(args.spec) == bool(args.input):
        raise UsageError("give exactly one of --spec or --input")
    if args.spec:
        return make(parse_spec(args.spec))[0]
    path = Path(args.input)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return FiniteSystem.from_json(data)


def load_rank(sys: FiniteSystem, value: Optional[str], default: Optional[int] = 1) -> RankFunction:
    if value is None:
        if default is None:
            raise UsageError("--rank is required")
        return as_rank(sys, default)
    value = value.strip()
    if value.lstrip("-").isdigit():
        return as_rank(sys, int(value))
    if value.startswith("{"):
        text = value
    else:
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise UsageError(f"--rank: cannot read {value}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--rank: malformed JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise UsageError("--rank file must hold an object {point: rank}")
    return as_rank(sys, data)


def parse_names(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# -- verbs ----------------------------------------------------------------


def cmd_decompose(args) -> tuple:
    sys = load_system(args)
    dec = chain_decomposition(sys)
    labels = orbit_decomposition(sys)
    report = {
        "system": sys.to_json(),
        "orbit_types": {x: t.value for x, t in labels.items()},
        "chains": [list(c) for c in dec.chains],
        "cycles": [list(c) for c in dec.cycles],
        "orbits": [[p for p in sys.points if p in orb] for orb, _ in orbit_space(sys)],
        "minimal": is_minimal(sys),
        "free": is_free(sys),
        "minimality_statements": minimality_report(sys).to_json(),
    }
    return report, 0


def cmd_domains(args) -> tuple:
    sys = load_system(args)
    table = compute_domains(sys, args.horizon)
    report = {
        "horizon": table.horizon,
        "stabilized": table.stabilized,
        "domains": {str(n): [p for p in sys.points if p in table[n]] for n in sorted(table.sets)},
    }
    return report, 0


def cmd_measures(args) -> tuple:
    sys = load_system(args)
    if args.conformal is not None and args.invariant:
        raise UsageError("choose one of --invariant and --conformal")
    if args.conformal is not None:
        poly = conformal_measure_polytope(sys, args.conformal)
        kind = f"conformal d={args.conformal}"
    elif args.rank is not None:
        poly = conformal_measure_polytope(sys, load_rank(sys, args.rank))
        kind = "conformal (rank function)"
    else:
        poly = invariant_measure_polytope(sys)
        kind = "invariant"
    report = {"kind": kind, "empty": poly.is_empty, **poly.to_json()}
    return report, 0


def cmd_break(args) -> tuple:
    sys = load_system(args)
    ys = parse_names(args.break_ or "")
    cond = check_conditions(sys, ys)
    report = {"Y": ys, **cond.to_json()}
    if is_global(sys) and not chain_decomposition(cond.restricted).cycles:
        rank = load_rank(cond.restricted, args.rank)
        report["traces"] = verify_break_traces(sys, ys, rank).to_json()
    return report, 0


def cmd_cp(args) -> tuple:
    sys = load_system(args)
    cp = build_cp_algebra(sys, load_rank(sys, args.rank))
    if args.matrices and cp.size > 64:
        raise UsageError(f"--matrices is limited to 64 basis vectors, model has {cp.size}")
    report = cp_report(cp, matrices=args.matrices)
    return report, 0


def cmd_traces(args) -> tuple:
    sys = load_system(args)
    rank = load_rank(sys, args.rank)
    cp = build_cp_algebra(sys, rank)
    pairs = trace_measure_pairs(cp)
    poly = conformal_measure_polytope(sys, rank)
    from_traces = frozenset(mu.weights for _, mu in pairs)
    match = from_traces == poly.vertex_set() and len(pairs) == len(poly.vertices)
    report = {
        "block_sizes": list(cp.block_sizes),
        "traces": [{"weights": t.to_json(), "measure": mu.to_json()} for t, mu in pairs],
        "conformal_vertices": [v.to_json() for v in poly.vertices],
        "trace_simplex_dimension": len(pairs) - 1,
        "conformal_dimension": poly.affine_dimension,
        "bijection": match,
    }
    return report, 0 if match else 2


def cmd_verify(args) -> tuple:
    n = args.max_size
    if args.target == "blurbs":
        rep = verify_blurbs(range(1, n + 1), "partial", args.workers)
        glob_max = args.global_max_size if args.global_max_size is not None else n
        rep.merge(verify_blurbs(range(1, glob_max + 1), "global", args.workers))
    elif args.target == "minimal-breaks":
        rep = verify_minimal_breaks(n)
    elif args.target == "simplicity":
        rep = verify_simplicity(n)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown target {args.target}")
    report = rep.to_json()
    report["summary"] = f"{len(rep.counterexamples)} counterexamples"
    return report, 0 if rep.ok else 2


def cmd_demo(args) -> tuple:
    from .generators import chain, cycle, rotation

    out = {}
    cp = build_cp_algebra(chain(3), 2)
    out["chain:3 rank 2"] = {
        "block_sizes": list(cp.block_sizes),
        "fibers": {x: cp.multiplicity(x) for x in cp.sys.points},
        "trace_measure": trace_measure_pairs(cp)[0][1].to_json(),
    }
    out["cycle:5 conformal d=2"] = {"empty": conformal_measure_polytope(cycle(5), 2).is_empty}
    out["cycle:5 break x0, rank 1"] = verify_break_traces(cycle(5), ["x0"], 1).to_json()
    out["cycle:5 break x0, rank 2"] = verify_break_traces(cycle(5), ["x0"], 2).to_json()
    big = build_cp_algebra(rotation(1009, 1, [0]), 1, verify=False)
    out["rotation:1009,1,0"] = {"block_sizes": list(big.block_sizes)}
    return out, 0


# -- output ---------------------------------------------------------------


def render_table(report, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    if isinstance(report, dict):
        for k, v in report.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_short(v)}")
    elif isinstance(report, list):
        for item in report:
            if isinstance(item, (dict, list)) and not _flat(item):
                lines.append(f"{pad}-")
                lines.append(render_table(item, indent + 1))
            else:
                lines.append(f"{pad}- {_short(item)}")
    else:
        lines.append(pad + _short(report))
    return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return all(not isinstance(x, (dict, list)) for x in v.values())
    return all(not isinstance(x, (dict, list)) for x in v)


def _short(v) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {x}" for k, x in v.items()) + "}"
    if isinstance(v, list):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return str(v)


COMMANDS = {
    "decompose": (cmd_decompose, "orbit types, chains/cycles, orbits, minimality and freeness"),
    "domains": (cmd_domains, "the domains D_n of the powers of theta"),
    "measures": (cmd_measures, "invariant or conformal measure polytope"),
    "break": (cmd_break, "orbit-breaking conditions for a set Y (and traces for global systems)"),
    "cp": (cmd_cp, "matrix model of the Cuntz-Pimsner algebra: blocks, fibres, traces"),
    "traces": (cmd_traces, "extreme traces and their measures against the conformal polytope"),
    "verify": (cmd_verify, "exhaustive property checks"),
    "demo": (cmd_demo, "worked examples"),
}


def build_parser() -> argparse.ArgumentParser:
    p = Parser(prog="pardyn", description="Exact finite models of twisted partial automorphisms.")
    p.add_argument("--version", action="version", version=f"pardyn {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    def common(sp, rank=True):
        src = sp.add_argument_group("input")
        src.add_argument("--spec", help="generator spec, e.g. chain:3, cycle:5, rotation:5,2,0, random:6,42, chain:2+cycle:3")
        src.add_argument("--input", metavar="FILE", help='system file {"points": [...], "theta": {...}}')
        if rank:
            sp.add_argument("--rank", help="constant rank, inline JSON, or a JSON file {point: rank}")
        sp.add_argument("--format", choices=("table", "json"), default="table")

    chains = {
        "decompose": "chain_decomposition + orbit_decomposition + orbit_space + minimality_report",
        "domains": "compute_domains",
        "measures": "invariant_measure_polytope | conformal_measure_polytope",
        "break": "check_conditions (+ verify_break_traces)",
        "cp": "build_cp_algebra -> cp_report",
        "traces": "build_cp_algebra -> traces_of_cp -> measure_from_trace vs conformal_measure_polytope",
        "verify": "verify_blurbs | verify_minimal_breaks | verify_simplicity",
        "demo": "fixed examples through the cp, measures and breaking modules",
    }
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=f"{help_}. Runs: {chains[name]}.")
        if name == "decompose":
            common(sp, rank=False)
        elif name == "domains":
            common(sp, rank=False)
            sp.add_argument("--horizon", type=int, default=None, metavar="N")
        elif name == "measures":
            common(sp)
            sp.add_argument("--invariant", action="store_true")
            sp.add_argument("--conformal", type=int, metavar="D")
        elif name == "break":
            common(sp)
            sp.add_argument("--break", dest="break_", metavar="Y1,Y2", default="")
        elif name in ("cp", "traces"):
            common(sp)
            if name == "cp":
                sp.add_argument("--matrices", action="store_true", help="include generator matrices")
        elif name == "verify":
            sp.add_argument("target", choices=("blurbs", "minimal-breaks", "simplicity"))
            sp.add_argument("--max-size", type=int, default=5, metavar="N")
            sp.add_argument("--global-max-size", type=int, default=None, metavar="N")
            sp.add_argument("--workers", type=int, default=1)
            sp.add_argument("--format", choices=("table", "json"), default="table")
        elif name == "demo":
            sp.add_argument("--format", choices=("table", "json"), default="table")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        report, status = fn(args)
    except (ValidationError, CycleError) as exc:
        print(f"pardyn {args.command}: error: {exc}", file=_sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(render_table(report))
    return status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
