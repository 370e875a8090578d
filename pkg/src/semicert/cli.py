"""``semicert`` command line: every subcommand exits 0 exactly when all its checks pass."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import io
from .certkit import verify_certificate
from .construct import NotPositiveDefinite, PatchBudgetExceeded, cover_sphere, sphere_grid
from .detrepr import quadratic_determinantal_representation, verify_determinantal
from .domination import check_domination, orthant_certificate_from_domination, univariate_certificate_at_zero
from .gallery import run_gallery
from .matpoly import is_unimodular, smith_normal_form
from .polycore import format_polynomial


def _point(text: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(v.strip()) for v in text.split(",") if v.strip())


def _signs(text: str) -> tuple[int, ...]:
    out = []
    for v in text.split(","):
        v = v.strip()
        if v in ("+", "+1", "1"):
            out.append(1)
        elif v in ("-", "-1"):
            out.append(-1)
        else:
            raise argparse.ArgumentTypeError(f"bad sign {v!r}")
    return tuple(out)


def _emit(args, ok: bool, data: dict, lines: Sequence[str]) -> int:
    if args.format == "structured":
        print(io.dumps({"ok": ok, **data}))
    else:
        for line in lines:
            print(line)
        print("OK" if ok else "FAILED")
    return 0 if ok else 1


def _report_lines(rep) -> list[str]:
    lines = []
    for p in rep.pieces:
        lines.append(f"piece {p.label}: identity {'exact' if p.identity_exact else 'FAIL'}")
        if p.identity_witness is not None:
            pt, (i, j), diff = p.identity_witness
            lines.append(f"  entry ({i},{j}) differs by {diff} at {tuple(str(v) for v in pt)}")
        for t in p.terms:
            extra = "" if t.witness is None else f" witness {tuple(str(v) for v in t.witness)}"
            fac = "" if t.factor_ok else " factor NOT psd"
            lines.append(f"  term {t.index}: {t.weight_status}{extra}{fac}")
    c = rep.covering
    lines.append(f"covering ({c.scope}, {c.samples} samples): "
                 + ("ok" if c.uncovered is None else f"uncovered {tuple(str(v) for v in c.uncovered)}"))
    return lines


def cmd_verify(args) -> int:
    cert = io.load_certificate(args.certificate)
    rep = verify_certificate(cert, samples=args.samples, seed=args.seed)
    return _emit(args, rep.ok, rep.to_dict(), _report_lines(rep))


def cmd_construct(args) -> int:
    A, names = io.load_matrix(args.matrix)
    try:
        cert = cover_sphere(A, grid=args.grid, max_pieces=args.max_pieces, names=names)
    except (NotPositiveDefinite, PatchBudgetExceeded) as exc:
        pt = None if exc.point is None else [str(v) for v in exc.point]
        return _emit(args, False, {"error": str(exc), "point": pt}, [f"error: {exc} at {pt}"])
    rep = verify_certificate(cert, extra_points=sphere_grid(A.nvars, args.grid * 4))
    if args.output:
        io.save_certificate(cert, args.output)
    data = {"pieces": len(cert.pieces), "report": rep.to_dict()}
    if not args.output:
        data["certificate"] = io.certificate_to_dict(cert)
    return _emit(args, rep.ok, data, [f"{len(cert.pieces)} pieces"] + _report_lines(rep))


def cmd_domination(args) -> int:
    A, names = io.load_matrix(args.matrix)
    x0 = _point(args.at)
    res = check_domination(A, x0)
    gamma = [list(b) for b in res.gamma.elements]
    if not res:
        return _emit(args, False, {"gamma": gamma, "failing_alpha": list(res.alpha)},
                     [f"Gamma = {gamma}", f"no dominating beta for alpha = {list(res.alpha)}"])
    assignment = {",".join(map(str, a)): {"beta": list(b), "r": str(r)} for a, (b, r) in res.assignment.items()}
    data = {"gamma": gamma, "assignment": assignment}
    lines = [f"Gamma = {gamma}"] + [f"alpha {a} -> beta {v['beta']}, r = {v['r']}" for a, v in assignment.items()]
    ok = True
    if args.signs:
        cert, orth = orthant_certificate_from_domination(A, x0, args.signs, res, names)
        rep = verify_certificate(cert)
        ok = rep.ok
        data["orthant_radius"] = str(orth.box_radius)
        data["report"] = rep.to_dict()
        lines += [f"orthant box radius {orth.box_radius}"] + _report_lines(rep)
        if args.output:
            io.save_certificate(cert, args.output)
    return _emit(args, ok, data, lines)


def cmd_smith(args) -> int:
    M, names = io.load_matrix(args.matrix)
    s = smith_normal_form(M)
    ok = s.product() == M and is_unimodular(s.E) and is_unimodular(s.F)
    diag = [format_polynomial(d, names) for d in s.diagonal]
    data = {"diagonal": diag, "E": io.matrix_to_dict(s.E, names), "F": io.matrix_to_dict(s.F, names),
            "product_matches": s.product() == M}
    lines = ["D = diag(" + ", ".join(diag) + ")", f"E D F == M: {s.product() == M}"]
    return _emit(args, ok, data, lines)


def cmd_zero_plus(args) -> int:
    M, names = io.load_matrix(args.matrix)
    try:
        z = univariate_certificate_at_zero(M, Fraction(args.delta), names)
    except (ValueError, ArithmeticError) as exc:
        return _emit(args, False, {"error": str(exc)}, [f"error: {exc}"])
    rep = verify_certificate(z.certificate)
    if args.output:
        io.save_certificate(z.certificate, args.output)
    data = {"delta": str(z.delta), "exponents": list(z.exponents), "mus": [str(m) for m in z.mus],
            "report": rep.to_dict()}
    return _emit(args, rep.ok, data, [f"interval [0, {z.delta}]"] + _report_lines(rep))


def cmd_detrep(args) -> int:
    f, names = io.load_polynomial(args.polynomial)
    try:
        rep = quadratic_determinantal_representation(f, tolerance=args.tol)
    except (ValueError, ArithmeticError) as exc:
        return _emit(args, False, {"error": str(exc)}, [f"error: {exc}"])
    if args.output:
        io.save_json(io.matrix_to_dict(rep.matrix, names), args.output)
    data = {"matrix": io.matrix_to_dict(rep.matrix, names), "residual": rep.residual,
            "exact": rep.factorization.is_exact, "entries_psd": rep.entries_psd}
    lines = [f"diag({', '.join(format_polynomial(rep.matrix[i, i], names) for i in range(rep.matrix.size))})",
             f"relative residual {rep.residual:.3g} (tolerance {rep.tolerance:.3g})"]
    return _emit(args, rep.ok, data, lines)


def cmd_detrep_verify(args) -> int:
    M, _ = io.load_matrix(args.matrix)
    f, _ = io.load_polynomial(args.polynomial)
    chk = verify_determinantal(M, f, samples=args.samples)
    pt = None if chk.psd_witness is None else [str(v) for v in chk.psd_witness]
    data = {"determinant_exact": chk.identity_exact, "psd_samples": chk.samples, "psd_witness": pt}
    lines = [f"det M == f: {chk.identity_exact}",
             f"psd at {chk.samples} samples" if pt is None else f"not psd at {pt}"]
    return _emit(args, chk.ok, data, lines)


def cmd_gallery(args) -> int:
    rep = run_gallery(args.filter, workers=args.workers)
    lines = [f"{'ok  ' if r.ok else 'FAIL'} {r.id:22s} {r.status:20s} {r.seconds:6.2f}s {r.detail}"
             for r in rep.results]
    return _emit(args, rep.ok, rep.to_dict(), lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semicert", description=__doc__)
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "structured"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[fmt], help="verify a certificate file")
    p.add_argument("certificate")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[fmt], help="build a certificate for a positive definite form")
    p.add_argument("matrix")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--max-pieces", type=int, default=400)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("domination", parents=[fmt], help="check the domination condition at a point")
    p.add_argument("matrix")
    p.add_argument("--at", required=True, help="comma separated rationals")
    p.add_argument("--signs", type=_signs, help="orthant signs, e.g. +,-; builds and verifies a certificate")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_domination)

    p = sub.add_parser("smith", parents=[fmt], help="Smith normal form of a univariate matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_smith)

    p = sub.add_parser("zero-plus", parents=[fmt], help="certificate at 0+ for a univariate matrix")
    p.add_argument("matrix")
    p.add_argument("--delta", default="1/2")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_zero_plus)

    p = sub.add_parser("detrep", parents=[fmt], help="diagonal quadratic determinantal representation")
    p.add_argument("polynomial")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_detrep)

    p = sub.add_parser("detrep-verify", parents=[fmt], help="check det M == f and sample psd-ness of M")
    p.add_argument("matrix")
    p.add_argument("polynomial")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_detrep_verify)

    p = sub.add_parser("gallery", parents=[fmt], help="run the built-in examples")
    p.add_argument("--filter", default="*", help="glob on item ids")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_gallery)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"semicert: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
