"""Command-line interface: ``starlab <command> <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import io
from .cochain import (
    CochainError,
    StarProduct,
    associator_operator,
    hochschild_d,
    solve_coboundary,
    star_apply,
)
from .equiv import EquivalenceError, NonTruncatingError, gauge, solve_equivalence, star_bch
from .formal import DimensionError, ParseError, format_series, parse_polynomial
from .kontsevich import KontsevichError, WeightTable, compute_table, kontsevich_star
from .liestar import ExtractionError, cbh_star
from .moyal import moyal_star
from .poisson import (
    LieAlgebra,
    LieAlgebraError,
    PoissonError,
    PoissonTensor,
    builtin_algebra,
    jacobi_witness,
    linear_poisson,
    poisson_from_json,
)
from .verify import bulk_associativity

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_COMPUTATION = 4


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int, position: Optional[int] = None):
        super().__init__(message)
        self.category = category
        self.code = code
        self.position = position


# ---------------------------------------------------------------------------
# input resolution


def resolve_algebra(name: str) -> LieAlgebra:
    """Built-in names first; a file with the same name is an ambiguity error."""
    g = builtin_algebra(name)
    if g is not None:
        if Path(name).exists():
            raise CliError("validation", f"{name!r} is both a built-in algebra and a file", EXIT_VALIDATION)
        return g
    if not Path(name).exists():
        raise CliError("validation", f"unknown algebra {name!r}", EXIT_VALIDATION)
    return read_doc(name, LieAlgebra.from_json)


def resolve_poisson(spec: str, dim: Optional[int]) -> PoissonTensor:
    if spec == "symplectic":
        if dim is None:
            raise CliError("usage", "--P symplectic needs --dim", EXIT_USAGE)
        if Path(spec).exists():
            raise CliError("validation", "'symplectic' is both a keyword and a file", EXIT_VALIDATION)
        return PoissonTensor.symplectic(dim)
    if not Path(spec).exists():
        raise CliError("validation", f"Poisson tensor file {spec!r} not found", EXIT_VALIDATION)
    P = read_doc(spec, poisson_from_json)
    if dim is not None and dim != P.dim:
        raise CliError("validation", f"--dim {dim} does not match the tensor's dimension {P.dim}", EXIT_VALIDATION)
    return P


def parse_poly(text: str, dim: int):
    return parse_polynomial(text, dim)


def read_doc(path: str, decode, *keys):
    """Decode a file, unwrapping CLI output under one of ``keys``."""
    doc = io.load(path)
    if isinstance(doc, dict) and "job" in doc:
        for key in keys:
            if key in doc:
                doc = doc[key]
                break
    try:
        return decode(doc)
    except (KeyError, TypeError, IndexError) as exc:
        raise io.SchemaError(f"{path}: malformed document ({exc!r})") from None


def load_star(path: str) -> StarProduct:
    return read_doc(path, io.star_from_json, "star", "result")


def emit(args, text: str, doc: dict) -> None:
    if args.format == "json":
        doc = {"schema": io.SCHEMA, "job": job_record(args), **doc}
        out = io.dumps(doc)
    else:
        out = text.rstrip("\n") + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def job_record(args) -> dict:
    """The parsed arguments, enough to rerun the job."""
    skip = {"func", "format", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# commands


def _star_output(args, s: StarProduct) -> None:
    if args.emit_cochains:
        doc = io.star_to_json(s)
        text = io.dumps(doc)
        if args.format == "json":
            emit(args, "", {"star": doc})
        else:
            emit(args, text, {})
        return
    if args.u is None or args.v is None:
        raise CliError("usage", "--u and --v are required unless --emit-cochains is given", EXIT_USAGE)
    u = parse_poly(args.u, s.dim)
    v = parse_poly(args.v, s.dim)
    result = star_apply(s, u, v)
    text = f"{args.u}*{args.v} = {format_series(result)}"
    emit(args, text, {"result": io.series_document(result)})


def cmd_star_moyal(args):
    P = resolve_poisson(args.P, args.dim)
    _star_output(args, moyal_star(P, args.order))


def cmd_star_cbh(args):
    g = resolve_algebra(args.algebra)
    _star_output(args, cbh_star(g, args.order))


def cmd_star_kontsevich(args):
    if args.algebra:
        P = linear_poisson(resolve_algebra(args.algebra))
    elif args.P:
        P = resolve_poisson(args.P, args.dim)
    else:
        raise CliError("usage", "give --algebra or --P", EXIT_USAGE)
    table = WeightTable.load(args.weights)
    _star_output(args, kontsevich_star(P, args.order, table, exact=not args.numeric))


def cmd_hochschild_d(args):
    op = read_doc(args.op, io.op_from_document, "result")
    d = hochschild_d(op)
    emit(args, str(d), {"result": io.op_document(d)})


def cmd_hochschild_solve(args):
    op = read_doc(args.op, io.op_from_document, "result")
    B = solve_coboundary(op, args.max_order, args.max_degree)
    emit(args, str(B), {"result": io.op_document(B)})


def cmd_check_jacobi(args):
    if args.algebra:
        P = linear_poisson(resolve_algebra(args.algebra))
    else:
        P = resolve_poisson(args.P, args.dim)
    found = jacobi_witness(P, total_degree=args.degree)
    if found is None:
        emit(args, "jacobi: ok", {"ok": True})
        return EXIT_OK
    u, v, w, d = found
    text = f"jacobi: FAIL at ({u}, {v}, {w}): defect {d}"
    emit(args, text, {"ok": False, "witness": {"u": str(u), "v": str(v), "w": str(w), "defect": str(d)}})
    return EXIT_CHECK_FAILED


def cmd_check_assoc(args):
    s = load_star(args.star)
    if s.is_exact():
        report = bulk_associativity(s, args.degree)
        ok = report.ok
        lines = [f"order {k}: {report.nonzero[k]} failing triples" for k in report.orders]
        doc = {"ok": ok, "triples": report.triples, "nonzero": {str(k): v for k, v in report.nonzero.items()},
               "witness": {str(k): [list(e) for e in w] for k, w in report.witness.items()}}
    else:
        tol = args.tol if args.tol is not None else s.tol
        worst = {k: associator_operator(s, k).max_abs_coeff() for k in range(1, s.order + 1)}
        ok = all(v <= tol for v in worst.values())
        lines = [f"order {k}: max |defect coefficient| = {v:.3g} (tolerance {tol:.3g})" for k, v in worst.items()]
        doc = {"ok": ok, "max_defect": {str(k): v for k, v in worst.items()}, "tolerance": tol}
    lines.append("assoc: ok" if ok else "assoc: FAIL")
    emit(args, "\n".join(lines), doc)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_equiv_solve(args):
    s1 = load_star(args.s1)
    s2 = load_star(args.s2)
    E = solve_equivalence(s1, s2, args.max_order, args.max_degree)
    doc = io.equivalence_to_json(E)
    lines = [f"T_{r} = {T}" for r, T in enumerate(E.ops, start=1)]
    if E.param is not None:
        lines.append("f = " + " + ".join(f"{c} ν^{r}" for r, c in enumerate(E.param, start=1) if c))
    emit(args, "\n".join(lines), {"result": doc})


def cmd_equiv_gauge(args):
    s = load_star(args.star)
    E = read_doc(args.equiv, io.equivalence_from_json, "result")
    s2 = gauge(s, E)
    doc = io.star_to_json(s2)
    emit(args, io.dumps(doc), {"result": doc})


def cmd_equiv_bch(args):
    s = load_star(args.star)
    a = parse_poly(args.a, s.dim)
    b = parse_poly(args.b, s.dim)
    r = star_bch(s, a, b)
    emit(args, f"{args.a} o {args.b} = {format_series(r)}", {"result": io.series_document(r)})


def cmd_weights_compute(args):
    samples = int(float(args.samples))
    table = compute_table(args.k, samples=samples, seed=args.seed, batches=args.batches,
                          denominator=args.denominator or None)
    doc = table.to_json()
    lines = []
    for key, w in sorted((w.graph.key, w) for w in table.values()):
        exact = f"  exact {w.exact}" if w.exact is not None else ""
        lines.append(f"{key}  {w.value:+.6f} ± {w.error_bound:.2e}{exact}")
    if args.table_out:
        Path(args.table_out).write_text(io.dumps(doc))
    emit(args, "\n".join(lines), {"weights": doc["weights"], "samples": samples, "seed": args.seed})


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starlab", description="Formal star products on polynomial observables.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", help="write output to this file instead of stdout")

    star = sub.add_parser("star", help="evaluate or dump a star product").add_subparsers(dest="kind", required=True)
    for name, fn in (("moyal", cmd_star_moyal), ("cbh", cmd_star_cbh), ("kontsevich", cmd_star_kontsevich)):
        sp = star.add_parser(name)
        if name in ("moyal", "kontsevich"):
            sp.add_argument("--P", help="'symplectic' or a Poisson tensor JSON file")
            sp.add_argument("--dim", type=int)
        if name in ("cbh", "kontsevich"):
            sp.add_argument("--algebra", required=(name == "cbh"),
                            help="heisenberg3, so3, sl2, abelian(n) or a Lie algebra JSON file")
        if name == "kontsevich":
            sp.add_argument("--weights", help="weight table JSON (default: $STARLAB_WEIGHT_TABLE or shipped)")
            sp.add_argument("--numeric", action="store_true", help="use numeric weights instead of exact values")
        sp.add_argument("--order", type=int, default=2 if name == "kontsevich" else 3)
        sp.add_argument("--u")
        sp.add_argument("--v")
        sp.add_argument("--emit-cochains", action="store_true")
        common(sp)
        sp.set_defaults(func=fn)

    hoch = sub.add_parser("hochschild", help="Hochschild coboundary tools").add_subparsers(dest="kind", required=True)
    sp = hoch.add_parser("d")
    sp.add_argument("--op", required=True, help="MultiDiffOp JSON file")
    common(sp)
    sp.set_defaults(func=cmd_hochschild_d)
    sp = hoch.add_parser("solve")
    sp.add_argument("--op", required=True)
    sp.add_argument("--max-order", type=int, default=4)
    sp.add_argument("--max-degree", type=int, default=4)
    common(sp)
    sp.set_defaults(func=cmd_hochschild_solve)

    check = sub.add_parser("check", help="verification checks").add_subparsers(dest="kind", required=True)
    sp = check.add_parser("jacobi")
    sp.add_argument("--P")
    sp.add_argument("--dim", type=int)
    sp.add_argument("--algebra")
    sp.add_argument("--degree", type=int, default=None, help="total degree of monomial triples")
    common(sp)
    sp.set_defaults(func=cmd_check_jacobi)
    sp = check.add_parser("assoc")
    sp.add_argument("--star", required=True, help="star product JSON file")
    sp.add_argument("--degree", type=int, default=3)
    sp.add_argument("--tol", type=float)
    common(sp)
    sp.set_defaults(func=cmd_check_assoc)

    eq = sub.add_parser("equiv", help="equivalences and star-BCH").add_subparsers(dest="kind", required=True)
    sp = eq.add_parser("solve")
    sp.add_argument("--s1", required=True)
    sp.add_argument("--s2", required=True)
    sp.add_argument("--max-order", type=int, default=4)
    sp.add_argument("--max-degree", type=int, default=4)
    common(sp)
    sp.set_defaults(func=cmd_equiv_solve)
    sp = eq.add_parser("gauge")
    sp.add_argument("--star", required=True)
    sp.add_argument("--equiv", required=True)
    common(sp)
    sp.set_defaults(func=cmd_equiv_gauge)
    sp = eq.add_parser("bch")
    sp.add_argument("--star", required=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    common(sp)
    sp.set_defaults(func=cmd_equiv_bch)

    w = sub.add_parser("weights", help="Kontsevich weights").add_subparsers(dest="kind", required=True)
    sp = w.add_parser("compute")
    sp.add_argument("--k", type=int, nargs="+", default=[1])
    sp.add_argument("--samples", default="1e6")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--batches", type=int, default=16)
    sp.add_argument("--denominator", type=int, default=48, help="rational grid for exact values; 0 disables")
    sp.add_argument("--table-out", help="also write the weight table JSON here")
    common(sp)
    sp.set_defaults(func=cmd_weights_compute)
    return p


_CATEGORY_CODES = (
    (ParseError, "parse", EXIT_VALIDATION),
    (io.SchemaError, "parse", EXIT_VALIDATION),
    (json.JSONDecodeError, "parse", EXIT_VALIDATION),
    (LieAlgebraError, "validation", EXIT_VALIDATION),
    (PoissonError, "validation", EXIT_VALIDATION),
    (DimensionError, "validation", EXIT_VALIDATION),
    (CochainError, None, EXIT_COMPUTATION),
    (EquivalenceError, None, EXIT_COMPUTATION),
    (NonTruncatingError, None, EXIT_COMPUTATION),
    (ExtractionError, None, EXIT_COMPUTATION),
    (KontsevichError, None, EXIT_COMPUTATION),
)


def _report_error(args, category: str, message: str, position: Optional[int] = None) -> None:
    if args is not None and getattr(args, "format", "text") == "json":
        err = {"category": category, "message": message}
        if position is not None:
            err["position"] = position
        sys.stdout.write(io.dumps({"schema": io.SCHEMA, "error": err}))
    sys.stderr.write(f"error[{category}]: {message}\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
        return EXIT_OK if code is None else code
    except CliError as exc:
        _report_error(args, exc.category, str(exc), exc.position)
        return exc.code
    except (OSError, ValueError) as exc:
        for cls, cat, code in _CATEGORY_CODES:
            if isinstance(exc, cls):
                category = cat or getattr(exc, "category", "computation")
                _report_error(args, category, str(exc), getattr(exc, "position", None))
                return code
        _report_error(args, "validation" if isinstance(exc, ValueError) else "io", str(exc))
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
