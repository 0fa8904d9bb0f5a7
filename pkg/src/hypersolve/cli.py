"""Command-line surface.

One job per invocation: solve a system, verify a representation against its
system, check integrability, test two eigenvalue certificates for
isomorphism, or convert structure matrices to the system their solutions
satisfy.  Input and output are the JSON documents of the system module;
reports go to stdout, diagnostics to stderr.

Exit codes: 0 success; 2 malformed input; 3 a system that fails the pairwise
integrability conditions; 4 a solver scope or search limit was hit (the
failing subproblem is echoed); 5 a verification failure.
"""

import argparse
import json
import sys

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import (
    DegreeBoundExceeded,
    FactorizationIncomplete,
    NotIntegrable,
    ParseError,
    SingularMatrix,
    UnsupportedDeltaStructure,
    UnsupportedSingularity,
)
from .ratfunc import format_ratfunc
from .solver import solve_recursive
from .system import (
    associated_system,
    delta_from_json,
    display_certificate,
    iso_test,
    representation_from_json,
    representation_to_json,
    structure_from_json,
    system_from_json,
    system_to_json,
    verify_group,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_INTEGRABLE = 3
EXIT_INCOMPLETE = 4
EXIT_VERIFY = 5


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}",
                         line=exc.lineno, column=exc.colno) from None


def _config(args):
    kw = {}
    for field in ("max_degree", "max_dispersion", "pivot"):
        value = getattr(args, field, None)
        if value is not None:
            kw[field] = value
    if not kw:
        return DEFAULT_CONFIG
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _emit(doc, text, args):
    if args.format == "json":
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        print(text)


def _matrix_lines(M, indent):
    pad = " " * indent
    return [pad + "[" + ", ".join(format_ratfunc(M.entry(i, j))
                                  for j in range(M.cols)) + "]"
            for i in range(M.rows)]


def _representation_text(rep):
    if not len(rep):
        return "no hyperexponential solutions"
    lines = []
    for k, g in enumerate(rep):
        lines.append(f"group {k + 1}: {display_certificate(g.certificate)}")
        lines.append("  certificate:")
        for name, value in g.certificate.values.items():
            lines.append(f"    {name}: {format_ratfunc(value)}")
        lines.append("  vectors:")
        for j in range(g.vectors.cols):
            entries = ", ".join(format_ratfunc(g.vectors.entry(i, j))
                                for i in range(g.vectors.rows))
            lines.append(f"    ({entries})")
    return "\n".join(lines)


def cmd_solve(args):
    sys_ = system_from_json(_load_json(args.system))
    order = tuple(args.order.split(",")) if args.order else None
    try:
        rep = solve_recursive(sys_, order=order, config=_config(args))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    _emit(representation_to_json(rep), _representation_text(rep), args)
    return EXIT_OK


def cmd_verify(args):
    sys_ = system_from_json(_load_json(args.system))
    rep = representation_from_json(_load_json(args.representation),
                                   sys_.delta)
    report, lines, ok = [], [], True
    for k, g in enumerate(rep):
        result = verify_group(sys_, g)
        failures = result.failures()
        report.append({
            "passed": result.passed,
            "failures": [{"map": name, "row": i, "column": j,
                          "residual": format_ratfunc(
                              result.residuals[name].entry(i, j))}
                         for name, i, j in failures],
        })
        if result.passed:
            lines.append(f"group {k + 1}: passed")
        else:
            ok = False
            lines.append(f"group {k + 1}: FAILED")
            for name, i, j in failures:
                r = result.residuals[name].entry(i, j)
                lines.append(f"  map {name!r} entry ({i + 1}, {j + 1}): "
                             f"residual {format_ratfunc(r)}")
    _emit({"groups": report}, "\n".join(lines) if lines else "no groups", args)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_check(args):
    try:
        system_from_json(_load_json(args.system))
    except NotIntegrable as exc:
        doc = {"integrable": False,
               "violations": [{"maps": [mi, mj], "row": i, "column": j,
                               "residual": format_ratfunc(r)}
                              for mi, mj, i, j, r in exc.details]}
        _emit(doc, f"not integrable: {exc}", args)
        return EXIT_NOT_INTEGRABLE
    _emit({"integrable": True}, "integrable", args)
    return EXIT_OK


def cmd_iso(args):
    doc = _load_json(args.certificates)
    delta, ctx = delta_from_json(doc)
    certs = []
    for key in ("f", "g"):
        cdoc = doc.get(key)
        if not isinstance(cdoc, dict):
            raise ParseError(f"certificate {key!r} must be an object")
        values = {}
        for mp in delta:
            raw = cdoc.get(mp.name)
            if not isinstance(raw, str):
                raise ParseError(
                    f"certificate {key!r}: missing value for map {mp.name!r}")
            values[mp.name] = ctx.parse(raw)
        certs.append(values)
    try:
        witness = iso_test(delta, certs[0], certs[1], _config(args))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if witness is None:
        _emit({"isomorphic": False, "witness": None}, "non-isomorphic", args)
    else:
        text = f"isomorphic: witness {format_ratfunc(witness)}"
        _emit({"isomorphic": True, "witness": format_ratfunc(witness)},
              text, args)
    return EXIT_OK


def cmd_associated(args):
    S = structure_from_json(_load_json(args.system))
    sys_ = associated_system(S)
    doc = system_to_json(sys_)
    lines = []
    for edoc in doc["equations"]:
        lines.append(f"map {edoc['map']!r}:")
        M = sys_.matrices[edoc["map"]]
        lines.extend(_matrix_lines(M, 2))
    _emit(doc, "\n".join(lines), args)
    return EXIT_OK


def _parser():
    top = argparse.ArgumentParser(
        prog="hypersolve",
        description="Hyperexponential solutions of integrable systems of "
                    "linear differential and difference equations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "pretty"),
                        default="json", help="report format")
    caps = argparse.ArgumentParser(add_help=False)
    caps.add_argument("--max-degree", type=int, metavar="N",
                      help="degree cap for polynomial ansatz solves")
    caps.add_argument("--max-dispersion", type=int, metavar="N",
                      help="cap on factor shift-distance searches")
    caps.add_argument("--pivot", type=int, metavar="K",
                      help="1-based pivot coordinate for scalar equations")

    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, caps],
                       help="compute the representation of all "
                            "hyperexponential solutions")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--order", metavar="M1,M2,...",
                   help="comma-separated map processing order")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common],
                       help="check a representation against its system")
    p.add_argument("system", help="system JSON file")
    p.add_argument("representation", help="representation JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", parents=[common],
                       help="report whether a system is fully integrable")
    p.add_argument("system", help="system JSON file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("iso", parents=[common, caps],
                       help="test two eigenvalue certificates for "
                            "isomorphic submodules")
    p.add_argument("certificates",
                   help="JSON file with the map header and certificates "
                        "'f' and 'g'")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("associated", parents=[common],
                       help="convert structure matrices to the system "
                            "their solutions satisfy")
    p.add_argument("system", help="structure-matrix JSON file")
    p.set_defaults(func=cmd_associated)
    return top


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SingularMatrix, UnsupportedDeltaStructure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotIntegrable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_INTEGRABLE
    except (FactorizationIncomplete, DegreeBoundExceeded,
            UnsupportedSingularity) as exc:
        print(f"incomplete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
