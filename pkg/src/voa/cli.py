"""Command-line front end.

    voa verify ALG (IDFILE | --expr EXPR)
    voa suite NAME [--serial] [--jobs N] [--timings]
    voa enumerate ALG --weight W [--charge Q | --mod N [--residue R]]
    voa enumerate --gf N L [--trunc T]
    voa ope ALG --left EXPR --right EXPR [--level Q]
    voa decouple ALG --target EXPR --gens NAMES [--level Q|generic]
    voa singular ALG --expr EXPR --gens NAMES --level Q|generic

Exit codes: 0 pass, 1 verification failure, 2 usage or input error.
Reports are JSON lines; without --timings the elapsed field is null so that
identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .engine import Context, IncompleteTableError, SkewSymmetryError, \
    TableShapeError
from .fields import (FieldParseError, UnknownGeneratorError, print_field,
                     monomial_field)
from .identities import IdentityFileError, run_identity_file
from .lab import (ChargePredicate, attach_names, decouple, enumerate_basis,
                  singular_check, strong_gen_gf, word_label_text)
from .library import (AlgebraDocumentError, UnknownPresetError, load_algebra,
                      preset)
from .scalars import ScalarParseError
from .suites import SUITES, UnknownSuiteError, run_suite

USAGE_ERRORS = (IdentityFileError, FieldParseError, ScalarParseError,
                UnknownGeneratorError, UnknownPresetError, UnknownSuiteError,
                AlgebraDocumentError, IncompleteTableError, SkewSymmetryError,
                TableShapeError, FileNotFoundError, ValueError,
                ZeroDivisionError, KeyError)


def open_algebra(name):
    """A completed context from a document path, shipped .alg name, or
    preset name."""
    if name.endswith(".alg"):
        return attach_names(Context(load_algebra(name), complete=False))
    return attach_names(Context(preset(name), complete=False))


class Reporter:
    def __init__(self, out_path, timings):
        self.lines = []
        self.out_path = out_path
        self.timings = timings

    def emit(self, record):
        self.lines.append(json.dumps(record, sort_keys=True))

    def close(self):
        text = "\n".join(self.lines) + "\n" if self.lines else ""
        if self.out_path:
            with open(self.out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _level_arg(text):
    if text is None or text == "generic":
        return None
    return Fraction(text)


def cmd_verify(args, rep):
    ctx = open_algebra(args.algebra)
    if args.jacobi:
        failures = ctx.check_jacobi(max_weight=args.max_weight)
        rep.emit({"command": "verify-jacobi", "algebra": ctx.spec.name,
                  "passed": not failures,
                  "failures": [{"triple": list(t), "m": m, "n": n}
                               for t, m, n, _ in failures[:20]],
                  "version": __version__})
        return 0 if not failures else 1
    if args.expr is not None:
        field = ctx.parse(args.expr)
        passed = field.is_zero()
        rep.emit({"command": "verify", "expr": args.expr, "passed": passed,
                  "residual": "" if passed else print_field(field, ctx.gens),
                  "version": __version__})
        return 0 if passed else 1
    if not args.identity:
        raise IdentityFileError("verify needs an identity file, --expr, "
                                "or --jacobi")
    res = run_identity_file(ctx, args.identity)
    res["version"] = __version__
    rep.emit(res)
    return 0 if res["passed"] else 1


def cmd_suite(args, rep):
    result = run_suite(args.name, serial=args.serial, jobs=args.jobs)
    for case in result.cases:
        rep.emit({
            "suite": result.suite_id,
            "caseId": case["caseId"],
            "status": case["status"],
            "exceptionalLevels": case.get("exceptionalLevels", []),
            "residualSummary": case.get("residualSummary", ""),
            "elapsed_ms": int(case["elapsed"] * 1000) if args.timings else None,
        })
    passed = result.passed
    rep.emit({"suite": result.suite_id, "cases": len(result.cases),
              "passed": passed, "version": __version__})
    return 0 if passed else 1


def cmd_enumerate(args, rep):
    if args.gf:
        n_order, l = args.gf
        full, reduced = strong_gen_gf(n_order, l, args.trunc)
        rep.emit({"command": "enumerate-gf", "N": n_order, "l": l,
                  "trunc": args.trunc,
                  "series": {str(w): c for w, c in sorted(full.items())},
                  "reduced": {str(w): c for w, c in sorted(reduced.items())},
                  "version": __version__})
        return 0
    if args.algebra is None or args.weight is None:
        raise ValueError("enumerate needs an algebra and --weight, or --gf")
    ctx = open_algebra(args.algebra)
    pred = None
    if args.charge is not None:
        pred = ChargePredicate.exact(args.charge)
    elif args.mod is not None:
        pred = ChargePredicate.modulo(args.mod, args.residue)
    basis = enumerate_basis(ctx, Fraction(args.weight), pred)
    rep.emit({"command": "enumerate", "algebra": ctx.spec.name,
              "weight": args.weight,
              "monomials": [print_field(monomial_field(m), ctx.gens)
                            for m in basis],
              "count": len(basis), "version": __version__})
    return 0


def cmd_ope(args, rep):
    ctx = open_algebra(args.algebra)
    level = _level_arg(args.level)
    if level is not None:
        ctx = attach_names(ctx.specialize(level))
    a = ctx.parse(args.left)
    b = ctx.parse(args.right)
    poles = ctx.ope(a, b)
    rep.emit({"command": "ope", "left": args.left, "right": args.right,
              "poles": {str(n + 1): print_field(f, ctx.gens)
                        for n, f in sorted(poles.items())},
              "version": __version__})
    return 0


def _parse_gens(ctx, text):
    names = text.replace(",", " ").split()
    return [(n, ctx.parse(n)) for n in names]


def cmd_decouple(args, rep):
    ctx = open_algebra(args.algebra)
    target = ctx.parse(args.target)
    gens = _parse_gens(ctx, args.gens)
    sol = decouple(ctx, target, gens, level=_level_arg(args.level))
    if sol is None:
        rep.emit({"command": "decouple", "target": args.target,
                  "feasible": False, "version": __version__})
        return 1
    rep.emit({"command": "decouple", "target": args.target, "feasible": True,
              "exceptionalLevels": sorted(str(q) for q in
                                          sol.exceptional_levels),
              "coefficients": {word_label_text(lab): str(c)
                               for lab, c in sorted(sol.coefficients.items())},
              "version": __version__})
    return 0


def cmd_singular(args, rep):
    from .fields import print_field as pf
    from .lab import singular_search
    ctx = open_algebra(args.algebra)
    gens = _parse_gens(ctx, args.gens)
    level = _level_arg(args.level)
    if args.expr is None:
        if args.weight is None:
            raise ValueError("singular needs --expr or --weight")
        pred = None
        if args.charge is not None:
            pred = ChargePredicate.exact(args.charge)
        elif args.mod is not None:
            pred = ChargePredicate.modulo(args.mod, args.residue)
        report = singular_search(ctx, Fraction(args.weight), pred, gens)
        rep.emit({
            "command": "singular-search", "weight": args.weight,
            "genericDimension": len(report.generic_basis),
            "exceptionalLevels": {
                str(q): [pf(w, ctx.gens) for w in ws]
                for q, ws in sorted(report.exceptional_levels.items())},
            "version": __version__})
        return 0
    field = ctx.parse(args.expr)
    ok, fails = singular_check(ctx, field, gens, level=level)
    rep.emit({"command": "singular", "expr": args.expr,
              "level": args.level or "generic", "passed": ok,
              "failingModes": [{"generator": g, "mode": n}
                               for g, n, _ in fails[:20]],
              "version": __version__})
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="voa",
        description="exact OPE engine and verification suites for vertex "
                    "superalgebras over Q(k)")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON-lines report here")
    common.add_argument("--timings", action="store_true",
                        help="include real elapsed times in reports "
                             "(breaks byte-determinism)")

    v = sub.add_parser("verify", parents=[common],
                       help="check an identity file, an inline expression, "
                            "or the table's commutator identities")
    v.add_argument("algebra")
    v.add_argument("identity", nargs="?")
    v.add_argument("--expr")
    v.add_argument("--jacobi", action="store_true",
                   help="check the commutator identity on all generator "
                        "triples")
    v.add_argument("--max-weight", type=int,
                   help="cap the mode range of --jacobi")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("suite", parents=[common],
                       help=f"run a named suite ({', '.join(SUITES)})")
    s.add_argument("name")
    s.add_argument("--serial", action="store_true",
                   help="run cases sequentially")
    s.add_argument("--jobs", type=int)
    s.set_defaults(fn=cmd_suite)

    e = sub.add_parser("enumerate", parents=[common],
                       help="graded PBW basis listing or counting series")
    e.add_argument("algebra", nargs="?")
    e.add_argument("--weight")
    e.add_argument("--charge", type=int)
    e.add_argument("--mod", type=int)
    e.add_argument("--residue", type=int, default=0)
    e.add_argument("--gf", nargs=2, type=int, metavar=("N", "L"))
    e.add_argument("--trunc", type=int, default=10)
    e.set_defaults(fn=cmd_enumerate)

    o = sub.add_parser("ope", parents=[common],
                       help="print all poles of a pair of fields")
    o.add_argument("algebra")
    o.add_argument("--left", required=True)
    o.add_argument("--right", required=True)
    o.add_argument("--level")
    o.set_defaults(fn=cmd_ope)

    d = sub.add_parser("decouple", parents=[common],
                       help="express a field in normally ordered words of "
                            "lower-weight generators")
    d.add_argument("algebra")
    d.add_argument("--target", required=True)
    d.add_argument("--gens", required=True)
    d.add_argument("--level", default="generic")
    d.set_defaults(fn=cmd_decouple)

    g = sub.add_parser("singular", parents=[common],
                       help="weight-lowering-mode annihilation check, or a "
                            "level-dependent singular-field search with "
                            "--weight")
    g.add_argument("algebra")
    g.add_argument("--expr")
    g.add_argument("--gens", required=True)
    g.add_argument("--level", default="generic")
    g.add_argument("--weight", help="search this weight instead of checking "
                                    "one field")
    g.add_argument("--charge", type=int)
    g.add_argument("--mod", type=int)
    g.add_argument("--residue", type=int, default=0)
    g.set_defaults(fn=cmd_singular)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = Reporter(getattr(args, "out", None), getattr(args, "timings", False))
    try:
        code = args.fn(args, rep)
    except USAGE_ERRORS as exc:
        print(f"voa: error: {exc}", file=sys.stderr)
        return 2
    rep.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
