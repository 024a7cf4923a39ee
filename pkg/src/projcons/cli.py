"""Command-line interface: ``projcons analyze|project|simulate|verify``.

Vertices are 1-based on the command line and in every report.  Exit status
is 0 on success, 1 on usage or input errors, 2 when ``verify`` finds a
failing check.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

from .digraph import MAX_ENUMERATION_VERTICES
from .dynamics import ProtocolKind, consensus_check, run_protocol
from .exceptions import ConvergenceError, GraphFormatError, TauRangeError
from .graphio import (
    format_scalar,
    matrix_to_json,
    parse_vector,
    read_graph,
    vector_to_json,
)
from .invariants import run_checks
from .laplacian import build_laplacian, check_tau
from .matrix_kernel import eigenvalues, to_float
from .projection import build_projection, in_consensus_domain

MATRIX_NAMES = ("A", "L", "J", "P", "U", "S", "P_tilde", "L_tilde", "JS")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_system(args):
    g = read_graph(args.graph)
    exact = not args.float
    if exact and g.n > MAX_ENUMERATION_VERTICES:
        print(f"projcons: warning: exact mode is limited to n <= {MAX_ENUMERATION_VERTICES} "
              f"(n = {g.n}); falling back to float", file=sys.stderr)
        exact = False
    return build_laplacian(g.to_matrix(), exact=exact)


def _resolve_tau(system, text):
    if text is None:
        return system.default_tau()
    if text == "max":
        if math.isinf(system.tau_max):
            raise TauRangeError("tau_max is unbounded for a graph without arcs")
        return system.tau_max
    return check_tau(system, Fraction(text) if system.exact else float(Fraction(text)))


def _x0(system, text):
    if text is None:
        raise ValueError("--x0 is required")
    v = parse_vector(text, system.n)
    return v if system.exact else to_float(v)


def _sorted_eigenvalues(system):
    ev = eigenvalues(system.L)
    return sorted(ev, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def _matrix(system, bundle, name):
    if name == "A":
        return system.A
    if name == "L":
        return system.L
    if name == "J":
        return system.eigenprojection
    return {"P": bundle.p, "U": bundle.u, "S": bundle.s, "P_tilde": bundle.p_tilde,
            "L_tilde": bundle.l_tilde, "JS": bundle.quasi_consensus}[name]


def _requested(args):
    if not args.matrices:
        return []
    names = [m.strip() for m in args.matrices.split(",") if m.strip()]
    bad = [m for m in names if m not in MATRIX_NAMES]
    if bad:
        raise ValueError(f"unknown matrix {bad[0]!r}; choose from {', '.join(MATRIX_NAMES)}")
    return names


def cmd_analyze(args) -> dict:
    system = _load_system(args)
    st = system.structure
    tau = _resolve_tau(system, args.tau)
    report = {
        "n": system.n,
        "backend": "exact" if system.exact else "float",
        "components": [[v + 1 for v in c] for c in st.components],
        "final_classes": [[v + 1 for v in c] for c in st.final_classes],
        "d": system.d,
        "has_spanning_in_tree": system.d == 1,
        "tau_max": format_scalar(system.tau_max),
        "tau": format_scalar(tau),
        "eigenvalues_L": [format_scalar(z) for z in _sorted_eigenvalues(system)],
    }
    names = ["J"] + [m for m in _requested(args) if m != "J"]
    bundle = build_projection(system, tau) if set(names) - {"A", "L", "J"} or args.x0 else None
    report["matrices"] = {m: matrix_to_json(_matrix(system, bundle, m)) for m in names}
    if args.x0 is not None:
        x0 = _x0(system, args.x0)
        J, JS = system.eigenprojection, bundle.quasi_consensus
        report["limits"] = {
            "basic": vector_to_json(J @ x0),
            "degroot": vector_to_json(J @ x0),
            "projected": vector_to_json(JS @ x0),
            "ltilde": vector_to_json(JS @ x0),
            "degroot-proj": vector_to_json(JS @ x0),
        }
    return report


def cmd_project(args) -> dict:
    system = _load_system(args)
    tau = _resolve_tau(system, args.tau)
    chosen = None
    if args.chosen:
        chosen = [int(v) - 1 for v in args.chosen.split(",")]
    bundle = build_projection(system, tau, chosen)
    x0 = _x0(system, args.x0)
    x_tilde = bundle.s @ x0
    qc = bundle.quasi_consensus @ x0
    return {
        "n": system.n,
        "backend": "exact" if system.exact else "float",
        "d": system.d,
        "tau": format_scalar(bundle.tau),
        "chosen": [v + 1 for v in bundle.chosen],
        "x0": vector_to_json(x0),
        "in_consensus_domain": in_consensus_domain(system, x0, S=bundle.s),
        "x_tilde0": vector_to_json(x_tilde),
        "quasi_consensus": format_scalar(qc[0]),
        "limits": {
            "basic": vector_to_json(system.eigenprojection @ x0),
            "projected": vector_to_json(qc),
        },
        "matrices": {"S": matrix_to_json(bundle.s)},
    }


def cmd_simulate(args) -> dict:
    system = _load_system(args)
    tau = _resolve_tau(system, args.tau)
    kind = ProtocolKind(args.protocol)
    x0 = _x0(system, args.x0)
    trace = run_protocol(system, kind, x0, tau=tau, t_max=args.t_max, k_max=args.k_max,
                         tol=args.tol, consensus_tol=args.consensus_tol)
    header = ["t"] + [f"x{i + 1}" for i in range(system.n)]
    if trace.cesaro_states is not None:
        header += [f"cesaro_x{i + 1}" for i in range(system.n)]
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(header)
        for i, t in enumerate(trace.times):
            row = [format_scalar(t) if kind.discrete is False else int(t)]
            row += [repr(float(x)) for x in trace.states[i]]
            if trace.cesaro_states is not None:
                row += [repr(float(x)) for x in trace.cesaro_states[i]]
            w.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    summary = {
        "protocol": kind.value,
        "tau": format_scalar(tau),
        "steps": len(trace.times) - 1,
        "converged": trace.converged,
        "limit": vector_to_json(trace.limit),
        "consensus": trace.consensus,
    }
    if trace.cesaro_states is not None:
        summary["cesaro_converged"] = trace.cesaro_converged
        summary["cesaro_limit"] = vector_to_json(trace.cesaro_limit)
        summary["period"] = trace.period
        summary["cesaro_consensus"] = consensus_check(trace.cesaro_limit, args.consensus_tol)
    return summary


def cmd_verify(args):
    system = _load_system(args)
    tau = _resolve_tau(system, args.tau)
    checks = run_checks(system, tau)
    return {
        "n": system.n,
        "backend": "exact" if system.exact else "float",
        "tau": format_scalar(tau),
        "passed": all(c.passed for c in checks),
        "checks": [{"name": c.name, "passed": c.passed, "residual": format_scalar(c.residual),
                    "detail": c.detail} for c in checks],
    }


def _print_text(report, stream):
    for key, value in report.items():
        if key == "matrices":
            for name, m in value.items():
                stream.write(f"{name} ({m['backend']}):\n")
                for row in m["rows"]:
                    stream.write("  " + "  ".join(str(x) for x in row) + "\n")
        elif key == "checks":
            for c in value:
                mark = "PASS" if c["passed"] else "FAIL"
                stream.write(f"{mark}  {c['name']}  residual={c['residual']}  {c['detail']}\n")
        else:
            stream.write(f"{key}: {json.dumps(value)}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("graph", help="edge-list or JSON graph file")
    common.add_argument("--tau", help="step parameter: a rational, or 'max' for the stochasticity bound")
    common.add_argument("--float", action="store_true", help="force the float backend")
    common.add_argument("--json", action="store_true", help="emit a JSON document")

    p = _Parser(prog="projcons", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="structure, spectrum and eigenprojection")
    a.add_argument("--matrices", help=f"comma list from {', '.join(MATRIX_NAMES)}")
    a.add_argument("--x0", help="initial state (comma list) to report protocol limits for")

    pr = sub.add_parser("project", parents=[common], help="orthogonal projection of an initial state")
    pr.add_argument("--x0", required=True)
    pr.add_argument("--chosen", help="one 1-based vertex per final class (comma list)")

    s = sub.add_parser("simulate", parents=[common], help="simulate a protocol to a CSV trace")
    s.add_argument("--protocol", required=True, choices=[k.value for k in ProtocolKind])
    s.add_argument("--x0", required=True)
    s.add_argument("--t-max", type=float, dest="t_max")
    s.add_argument("--k-max", type=int, dest="k_max", default=10000)
    s.add_argument("--out", help="CSV path (default: standard output; the summary then goes to stderr)")
    s.add_argument("--tol", type=float, default=1e-10, help="convergence tolerance")
    s.add_argument("--consensus-tol", type=float, default=1e-8, dest="consensus_tol")

    sub.add_parser("verify", parents=[common], help="check the structural identities on this graph")
    return p


COMMANDS = {"analyze": cmd_analyze, "project": cmd_project,
            "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except (GraphFormatError, TauRangeError, ConvergenceError, ValueError) as exc:
        print(f"projcons: error: {exc}", file=sys.stderr)
        return 1
    stream = sys.stdout
    if args.command == "simulate" and args.out in (None, "-"):
        stream = sys.stderr
    if args.json or args.command == "simulate":
        stream.write(json.dumps(report, indent=2) + "\n")
    else:
        _print_text(report, stream)
    if args.command == "verify" and not report["passed"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
