"""Command line entry point: ``pertalg <command> ...``.

Exit status is 0 when every requested check passes, 1 when a check fails
(the report is still written) and 2 on malformed input.
"""
from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__, ainf
from .algebra import NotInvertibleError, series_constant
from .catalog import IdentityReport, verify_catalog
from .hodge import (
    ChainComplex,
    HodgeData,
    MCViolation,
    build_hodge,
    evaluate_element,
    gauge_conjugation,
    make_perturbation,
    transferred_structure,
    verify_hodge,
    verify_transfer,
)
from .modules import enumerate_admissible_trees, module_codifferential_check, transfer_module
from .problems import (
    ProblemError,
    dump_problem,
    linear_entries,
    load_problem,
    module_problem,
    structure_problem,
    write_report,
    _linear_dict,
)
from .scalars import GF


def _maps(gm) -> list:
    return _linear_dict(linear_entries(gm))


def _hodge_dict(hd: HodgeData) -> dict:
    return {"s": _maps(hd.s), "t": _maps(hd.t)}


def _morphism_entries(comps, src_labels, tgt_labels, key_labels=None) -> dict:
    out = {}
    for n, m in sorted(comps.items()):
        rows = []
        for k, row in sorted(m.items()):
            ins = key_labels(k) if key_labels else [src_labels[i] for i in k]
            for o, c in sorted(row.items()):
                rows.append({"in": ins, "out": tgt_labels[o], "coef": c})
        if rows:
            out[str(n)] = rows
    return out


def _hodge_for(prob, C: ChainComplex) -> tuple[HodgeData, list[IdentityReport]]:
    hd = prob.hodge_data()
    if hd is None:
        hd = build_hodge(C)
    return hd, verify_hodge(C, hd)


# ---------------------------------------------------------------------------
# commands


def cmd_verify_algebra(args) -> dict:
    field = GF(args.field) if args.field else None
    return {"cap": args.cap, "field": args.field, "results": verify_catalog(args.cap, field)}


def cmd_hodge(args) -> dict:
    prob = load_problem(args.file)
    C = prob.complex()
    hd, reports = _hodge_for(prob, C)
    return {"hodge": _hodge_dict(hd), "homology_dims": C.cohomology_dims(), "results": reports}


def cmd_transfer(args) -> dict:
    prob = load_problem(args.file)
    C = prob.complex()
    hd, reports = _hodge_for(prob, C)
    x = prob.perturbation_map()
    if x is None:
        raise ProblemError(f"{args.file}: perturbation: a \"perturbation\" block is required")
    try:
        p = make_perturbation(C, hd, x)
    except (MCViolation, NotInvertibleError) as e:
        fail = IdentityReport("perturbation", "fail", None, {"error": str(e)})
        return {"results": reports + [fail]}
    tr = transferred_structure(C, hd, p)
    reports += verify_transfer(C, hd, p, tr)
    g, rep = gauge_conjugation(C, hd, p)
    reports.append(rep)
    g_sym = evaluate_element(C, hd, p, series_constant("g", args.cap))
    w = (g_sym - g).first_nonzero()
    reports.append(IdentityReport("symbolic g evaluates to g_V", "pass" if w is None else "fail", args.cap, w))
    return {
        "cap": args.cap,
        "tspace": {str(n): list(l) for n, l in tr.tspace.labels.items()},
        "xi": _maps(tr.xi),
        "perturbed_hodge": _hodge_dict(tr.hd_perturbed),
        "gauge": _maps(g),
        "homology_dims": C.cohomology_dims(x),
        "results": reports,
    }


def _algebra_setup(args):
    prob = load_problem(args.file)
    if prob.kind != "ainf":
        raise ProblemError(f"{args.file}: kind: expected \"ainf\", got {prob.kind!r}")
    A = prob.algebra(args.cap)
    C = ChainComplex(A.space, A.differential())
    hd, reports = _hodge_for(prob, C)
    reports = reports + [IdentityReport(f"input {r.identity_id}", r.status, r.cap, r.witness)
                         for r in ainf.codifferential_check(A)]
    return A, hd, reports


def cmd_minimal(args) -> dict:
    A, hd, reports = _algebra_setup(args)
    mm = ainf.transfer_minimal(A, hd, args.cap)
    Amin = mm.structure
    reports += [IdentityReport(f"minimal {r.identity_id}", r.status, r.cap, r.witness)
                for r in ainf.codifferential_check(Amin)]
    reports += [IdentityReport(f"incl {r.identity_id}", r.status, r.cap, r.witness)
                for r in ainf.morphism_check(mm.incl)]
    reports += [IdentityReport(f"proj {r.identity_id}", r.status, r.cap, r.witness)
                for r in ainf.morphism_check(mm.proj)]
    ok = ainf.is_identity_morphism(ainf.compose_morphisms(mm.proj, mm.incl))
    reports.append(IdentityReport("proj o incl = id", "pass" if ok else "fail", args.cap,
                                  None if ok else {"note": "composite differs from the identity"}))
    return {
        "cap": args.cap,
        "structure": dump_problem(structure_problem(Amin, "m")),
        "structure_b": dump_problem(structure_problem(Amin, "b")),
        "incl": _morphism_entries(mm.incl.comps, Amin.basis.labels, A.basis.labels),
        "proj": _morphism_entries(mm.proj.comps, A.basis.labels, Amin.basis.labels),
        "results": reports,
    }


def cmd_split(args) -> dict:
    A, hd, reports = _algebra_setup(args)
    dec = ainf.decomposition(A, hd, args.cap)
    lab = A.basis.labels
    return {
        "cap": args.cap,
        "split": dump_problem(structure_problem(dec.split, "m")),
        "iso": _morphism_entries(dec.iso.comps, lab, lab),
        "iso_inverse": _morphism_entries(dec.iso_inverse.comps, lab, lab),
        "results": reports + dec.reports,
    }


def cmd_module_transfer(args) -> dict:
    prob = load_problem(args.file)
    if prob.kind != "module":
        raise ProblemError(f"{args.file}: kind: expected \"module\", got {prob.kind!r}")
    Mm = prob.module(args.cap)
    C = ChainComplex(Mm.module_space, Mm.differential())
    hd, reports = _hodge_for(prob, C)
    reports = reports + [IdentityReport(f"input {r.identity_id}", r.status, r.cap, r.witness)
                         for r in ainf.codifferential_check(Mm.algebra)]
    reports += [IdentityReport(f"input {r.identity_id}", r.status, r.cap, r.witness)
                for r in module_codifferential_check(Mm)]
    tr = transfer_module(Mm, hd, args.cap)
    MB = Mm.module_basis.labels
    return {
        "cap": args.cap,
        "minimal": dump_problem(module_problem(tr.minimal)),
        "split_iso": _morphism_entries(tr.split_iso.comps, None, MB, key_labels=Mm.input_labels),
        "results": reports + tr.reports,
    }


def cmd_trees(args) -> dict:
    trees = enumerate_admissible_trees(args.arity)
    want = 2 ** (args.arity - 2)
    rep = IdentityReport(f"tree count = 2^{args.arity - 2}", "pass" if len(trees) == want else "fail",
                         None, None if len(trees) == want else {"count": len(trees)})
    return {
        "arity": args.arity,
        "count": len(trees),
        "trees": [{"composition": list(t.composition), "formula": t.formula()} for t in trees],
        "results": [rep],
    }


COMMANDS = {
    "verify-algebra": cmd_verify_algebra,
    "hodge": cmd_hodge,
    "transfer": cmd_transfer,
    "minimal": cmd_minimal,
    "split": cmd_split,
    "module-transfer": cmd_module_transfer,
    "trees": cmd_trees,
}


def _positive(v: str) -> int:
    n = int(v)
    if n < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pertalg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="report path (default: stdout)")
    common.add_argument("--timing", action="store_true", help="record wall time in the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-algebra", parents=[common], help="check the identity catalog")
    p.add_argument("--cap", type=_positive, default=6)
    p.add_argument("--field", type=int, default=None, help="work over GF(p) instead of Q")

    p = sub.add_parser("hodge", parents=[common], help="build or validate a Hodge decomposition")
    p.add_argument("file")

    p = sub.add_parser("transfer", parents=[common], help="linear perturbation transfer")
    p.add_argument("file")
    p.add_argument("--cap", type=_positive, default=6)

    for name, help_ in (("minimal", "A-infinity minimal model"),
                        ("split", "minimal plus linear contractible decomposition"),
                        ("module-transfer", "transfer of an A-infinity module")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file")
        p.add_argument("--cap", type=_positive, default=4)

    p = sub.add_parser("trees", parents=[common], help="list admissible trees")
    p.add_argument("--arity", type=int, required=True)
    return parser


def _summary(report: dict) -> str:
    lines = []
    for r in report["results"]:
        lines.append(f"  {r['status']:4}  {r['identity']}")
    ok = report["passed"]
    lines.append(f"{report['command'][0]}: {'all checks pass' if ok else 'FAILED'}")
    return "\n".join(lines) + "\n"


def run_command(argv: list[str]) -> tuple[int, dict | None]:
    """Run one command; returns (exit code, report)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), None
    start = time.perf_counter()
    try:
        if args.command == "trees" and args.arity < 2:
            raise ProblemError(f"--arity: admissible trees need arity at least 2, got {args.arity}")
        body = COMMANDS[args.command](args)
    except ProblemError as e:
        print(f"pertalg: error: {e}", file=sys.stderr)
        return 2, None
    except OSError as e:
        print(f"pertalg: error: {e}", file=sys.stderr)
        return 2, None
    results = [r.to_dict() for r in body.pop("results")]
    report = {
        "tool": {"name": "pertalg", "version": __version__},
        "command": list(argv),
        "passed": all(r["status"] == "pass" for r in results),
        "results": results,
        **body,
    }
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    write_report(report, args.out)
    sys.stderr.write(_summary(report))
    return (0 if report["passed"] else 1), report


def main(argv: list[str] | None = None) -> int:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
