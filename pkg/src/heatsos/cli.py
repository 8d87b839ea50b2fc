"""Command-line interface.

Subcommands: prove (search for an exact certificate), verify (re-check a
stored certificate from provenance alone), constraints (inspect a
constraint system and its reduction), validate (numeric oracle suite),
and report (run the six benchmark instances next to their quoted
reference figures).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import certify
from .prover import ProveOptions, describe_target, prove

TARGET_FAMILIES = {"E0": "E0", "E1": "C1", "E2": "C2", "E3": "C3"}

REPORT_INSTANCES = (
    ("C2(3,1)", "C2", 3, 1),
    ("C3(3,2)", "C3", 3, 2),
    ("C3(3,3)", "C3", 3, 3),
    ("C3(3,4)", "C3", 3, 4),
    ("C3(4,2)", "C3", 4, 2),
    ("C2(2,n)", "C2", 2, None),
)
# Reference figures quoted for the same six instances: basis size,
# independent constraints, multiplier families in the proof, seconds.
REPORT_QUOTED = {
    "C2(3,1)": (3, 6, 0, 0.18),
    "C3(3,2)": (14, 63, 0, 0.53),
    "C3(3,3)": (38, 512, 6, 9.00),
    "C3(3,4)": (38, 512, 6, 9.02),
    "C3(4,2)": (33, 417, 3, 4.49),
    "C2(2,n)": (6, 8, 0, 0.32),
}


def _parse_n(text):
    if text == "generic":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"dimension must be an integer or 'generic', got {text!r}")


def _emit(payload, as_json):
    if as_json:
        print(json.dumps(payload, sort_keys=True, indent=2))


def cmd_prove(args):
    given = [f for f in (args.family_pos, args.family,
                         TARGET_FAMILIES.get(args.target)) if f]
    if len(given) != 1:
        print("exactly one of FAMILY / --family / --target is required",
              file=sys.stderr)
        return 2
    family = given[0]
    opts = ProveOptions(log_concave=args.log_concave, method=args.method,
                        denom_bound=args.denom_bound,
                        max_retries=args.max_retries)
    outcome = prove(family, args.m, args.n, opts)
    if args.dump_target:
        from .diffform import encode_poly
        target = describe_target(family, args.m, args.n, args.method)
        dump = encode_poly(target) if target is not None else \
            "(generic pair: see the three blocks in the certificate)"
        if not args.json:
            print(f"target: {dump}")
        outcome.diagnostics["target"] = dump
    if args.out and outcome.certificate is not None:
        certify.save_certificate(outcome.certificate, args.out)
    if args.json:
        _emit({"status": outcome.status, "message": outcome.message,
               "diagnostics": outcome.diagnostics,
               "certificate": outcome.certificate}, True)
    else:
        print(f"{outcome.status}: {outcome.message}")
        diag = outcome.diagnostics
        stats = ", ".join(f"{k}={diag[k]}" for k in
                          ("path", "solver", "basis_size",
                           "independent_constraints", "families_used",
                           "denominator_bound", "wall") if k in diag)
        if stats:
            print(stats)
        if outcome.certificate is not None:
            if args.out:
                print(f"certificate written to {args.out}")
            else:
                size = len(certify.canonical_dumps(outcome.certificate))
                print(f"certificate verified ({size} bytes); "
                      f"pass --out FILE to save it")
    return outcome.exit_code


def cmd_verify(args):
    cert = certify.load_certificate(args.certificate)
    res = certify.verify_certificate(cert)
    if args.json:
        _emit({"ok": res.ok,
               "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail}
                          for c in res.checks]}, True)
    else:
        for c in res.checks:
            mark = "ok  " if c.ok else "FAIL"
            detail = f"  ({c.detail})" if c.detail and not c.ok else ""
            print(f"{mark} {c.name}{detail}")
        print(f"verdict: {'valid' if res.ok else 'INVALID'} "
              f"({len(res.checks)} checks)")
    return 0 if res.ok else 3


def _constraint_axes(m, n):
    if n is not None:
        return tuple(range(1, n + 1))
    if m == 2:
        return ("a", "b")
    if m == 3:
        return ("a", "b", "c")
    raise SystemExit("generic axes exist only for m = 2 (pair) and "
                     "m = 3 (triple)")


def cmd_constraints(args):
    from .constraints import integral_constraints
    from .diffform import encode_poly
    from .reduction import (half_basis, intrinsic_relations, rref)
    from .sdp import prepare_constraints

    axes = _constraint_axes(args.m, args.n)
    cons = integral_constraints(args.m, axes)
    system = rref([c.form for c in cons])
    nq, rules = system.split_counts()
    intrinsic = len(intrinsic_relations(args.m, axes))
    independent = len(prepare_constraints(system, args.m, axes))
    payload = {
        "m": args.m, "axes": list(axes),
        "basis_size": len(half_basis(args.m, axes)),
        "generated": len(cons),
        "rank": system.rank,
        "quadratic_rows": nq,
        "rules": rules,
        "intrinsic_relations": intrinsic,
        "independent_constraints": independent,
    }
    if args.json:
        _emit(payload, True)
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
    if args.dump_reduction:
        from .diffform import encode_monomial
        from .reduction import row_poly
        quad_pivots = {p for p, _, _ in system.quadratic_rows()}
        for piv, row, combo in system.rows:
            kind = "quad" if piv in quad_pivots else "rule"
            print(f"[{kind}] pivot {encode_monomial(piv)}: "
                  f"{encode_poly(row_poly(row))}")
    return 0


def cmd_validate(args):
    from .validate import validation_suite
    checks = validation_suite(args.tol)
    if args.json:
        _emit({"ok": all(c.ok for c in checks),
               "checks": [{"name": c.name, "ok": c.ok, "value": c.value,
                           "bound": c.bound} for c in checks]}, True)
    else:
        for c in checks:
            mark = "ok  " if c.ok else "FAIL"
            print(f"{mark} {c.name}  ({c.value:.3g} < {c.bound:g})")
        good = sum(1 for c in checks if c.ok)
        print(f"verdict: {good}/{len(checks)} numeric checks passed")
    return 0 if all(c.ok for c in checks) else 1


def cmd_report(args):
    rows = []
    for label, family, m, n in REPORT_INSTANCES:
        outcome = prove(family, m, n)
        diag = outcome.diagnostics
        rows.append((label, outcome.status,
                     diag.get("basis_size"),
                     diag.get("independent_constraints"),
                     diag.get("families_used", 0),
                     diag.get("wall")))
    if args.json:
        _emit({"rows": [{"instance": r[0], "status": r[1], "basis": r[2],
                         "independent": r[3], "families": r[4],
                         "seconds": r[5],
                         "quoted": dict(zip(("basis", "independent",
                                             "families", "seconds"),
                                            REPORT_QUOTED[r[0]]))}
               for r in rows]}, True)
        return 0
    head = (f"{'instance':<9} {'status':<12} "
            f"{'basis':>5} {'indep':>5} {'fams':>4} {'sec':>6}   "
            f"{'basis*':>6} {'indep*':>6} {'fams*':>5} {'sec*':>6}")
    print(head)
    print("-" * len(head))
    for label, status, basis, indep, fams, wall in rows:
        qb, qi, qf, qt = REPORT_QUOTED[label]
        print(f"{label:<9} {status:<12} {basis!s:>5} {indep!s:>5} "
              f"{fams!s:>4} {wall!s:>6}   {qb:>6} {qi:>6} {qf:>5} {qt:>6}")
    print("columns marked * are the quoted reference figures")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heatsos",
        description="exact sum-of-squares certificates for entropy "
                    "derivative inequalities along the heat flow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="search for an exact certificate")
    p.add_argument("family_pos", nargs="?", metavar="FAMILY",
                   choices=("C1", "C2", "C3", "E0"),
                   help="inequality family: C1, C2, C3, or E0")
    p.add_argument("--family", choices=("C1", "C2", "C3", "E0"))
    p.add_argument("--target", choices=tuple(TARGET_FAMILIES))
    p.add_argument("--m", type=int, required=True,
                   help="derivative order parameter")
    p.add_argument("--n", type=_parse_n, required=True,
                   help="dimension, or 'generic'")
    p.add_argument("--method",
                   choices=("auto", "concrete", "pair", "triple"),
                   default="auto")
    p.add_argument("--log-concave", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="include signed-minor multiplier families")
    p.add_argument("--denom-bound", type=int, default=10 ** 4)
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--out", help="write the certificate to this path")
    p.add_argument("--dump-target", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="re-check a stored certificate")
    p.add_argument("certificate")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constraints",
                       help="inspect a constraint system and its reduction")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=_parse_n, required=True,
                   help="dimension, or 'generic' for abstract axes")
    p.add_argument("--dump-reduction", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("validate", help="numeric oracle cross-checks")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0,
                   help="reserved; the suite is deterministic")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report",
                       help="run the six benchmark instances")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
