"""JSON file formats for polynomials, matrix polynomials, and certificates.

Polynomials are stored as strings over the declared variable names and rationals
as strings like ``"3/4"``, so every file round-trips exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .certkit import (
    CertificateError,
    CertificateTerm,
    CertifiedPiece,
    ConeCombination,
    ConstPSD,
    ExplicitSOS,
    PiecewiseCertificate,
    PolyPSD,
    Sampled,
    SemiAlgebraicPiece,
    Square,
)
from .matpoly import MatrixPolynomial
from .polycore import Polynomial, as_fraction, default_names, format_polynomial, parse_polynomial

CERT_FORMAT = "semicert-certificate/1"


def _names(names: Sequence[str] | None, nvars: int) -> list[str]:
    return list(names) if names is not None else default_names(nvars)


def _poly_out(p: Polynomial, names) -> str:
    return format_polynomial(p, names)


def _matrix_out(A: MatrixPolynomial, names) -> list[list[str]]:
    return [[_poly_out(e, names) for e in row] for row in A.rows]


def _matrix_in(rows, names) -> MatrixPolynomial:
    return MatrixPolynomial([[parse_polynomial(str(e), names) for e in row] for row in rows], len(names))


# -- polynomials and matrices --------------------------------------------------


def polynomial_to_dict(p: Polynomial, names: Sequence[str] | None = None) -> dict:
    names = _names(names, p.nvars)
    return {"vars": names, "poly": _poly_out(p, names)}


def polynomial_from_dict(data: dict) -> tuple[Polynomial, list[str]]:
    names = list(data["vars"])
    return parse_polynomial(str(data["poly"]), names), names


def matrix_to_dict(A: MatrixPolynomial, names: Sequence[str] | None = None) -> dict:
    names = _names(names, A.nvars)
    return {"vars": names, "rows": _matrix_out(A, names)}


def matrix_from_dict(data: dict) -> tuple[MatrixPolynomial, list[str]]:
    names = list(data["vars"])
    return _matrix_in(data["rows"], names), names


# -- certificates -------------------------------------------------------------------


def _piece_out(piece: SemiAlgebraicPiece, names) -> dict:
    return {
        "label": piece.label,
        "constraints": [_poly_out(g, names) for g in piece.constraints],
        "box": None if piece.box is None else [[str(lo), str(hi)] for lo, hi in piece.box],
    }


def _piece_in(data: dict, names) -> SemiAlgebraicPiece:
    box = data.get("box")
    return SemiAlgebraicPiece(
        tuple(parse_polynomial(str(g), names) for g in data.get("constraints", [])),
        data.get("label", ""),
        None if box is None else tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in box),
    )


def _factor_out(f, names) -> dict:
    if isinstance(f, Square):
        return {"kind": "square", "rows": _matrix_out(f.U, names)}
    if isinstance(f, ConstPSD):
        return {
            "kind": "const_psd",
            "matrix": [[str(v) for v in row] for row in f.Q],
            "outer": None if f.outer is None else _matrix_out(f.outer, names),
        }
    if isinstance(f, PolyPSD):
        return {"kind": "poly_psd", "rows": _matrix_out(f.P, names)}
    raise CertificateError(f"unknown factor {f!r}")


def _factor_in(data: dict, names):
    kind = data.get("kind")
    if kind == "square":
        return Square(_matrix_in(data["rows"], names))
    if kind == "const_psd":
        outer = data.get("outer")
        return ConstPSD(
            tuple(tuple(as_fraction(v) for v in row) for row in data["matrix"]),
            None if outer is None else _matrix_in(outer, names),
        )
    if kind == "poly_psd":
        return PolyPSD(_matrix_in(data["rows"], names))
    raise CertificateError(f"unknown factor kind {kind!r}")


def _proof_out(p, names) -> dict:
    if isinstance(p, ExplicitSOS):
        return {"kind": "sos", "squares": [[str(c), _poly_out(s, names)] for c, s in p.squares]}
    if isinstance(p, ConeCombination):
        return {"kind": "cone", "items": [[str(c), _poly_out(s, names), list(g)] for c, s, g in p.items]}
    if isinstance(p, Sampled):
        return {"kind": "sampled", "n": p.n, "seed": p.seed}
    raise CertificateError(f"unknown proof {p!r}")


def _proof_in(data: dict, names):
    kind = data.get("kind")
    if kind == "sos":
        return ExplicitSOS(tuple((as_fraction(c), parse_polynomial(str(s), names)) for c, s in data["squares"]))
    if kind == "cone":
        return ConeCombination(
            tuple((as_fraction(c), parse_polynomial(str(s), names), tuple(int(i) for i in g)) for c, s, g in data["items"])
        )
    if kind == "sampled":
        return Sampled(int(data.get("n", 200)), int(data.get("seed", 0)))
    raise CertificateError(f"unknown proof kind {kind!r}")


def certificate_to_dict(cert: PiecewiseCertificate) -> dict:
    names = _names(cert.names, cert.nvars)
    return {
        "format": CERT_FORMAT,
        "vars": names,
        "target": _matrix_out(cert.target, names),
        "domain": None if cert.domain is None else _piece_out(cert.domain, names),
        "pieces": [
            {
                **_piece_out(cp.piece, names),
                "terms": [
                    {
                        "weight": _poly_out(t.weight, names),
                        "factor": _factor_out(t.factor, names),
                        "proof": _proof_out(t.proof, names),
                    }
                    for t in cp.terms
                ],
            }
            for cp in cert.pieces
        ],
    }


def certificate_from_dict(data: dict) -> PiecewiseCertificate:
    if data.get("format") != CERT_FORMAT:
        raise CertificateError(f"expected format {CERT_FORMAT!r}, got {data.get('format')!r}")
    names = list(data["vars"])
    pieces = []
    for pd in data["pieces"]:
        terms = tuple(
            CertificateTerm(
                parse_polynomial(str(t["weight"]), names),
                _factor_in(t["factor"], names),
                _proof_in(t.get("proof", {"kind": "sampled"}), names),
            )
            for t in pd["terms"]
        )
        pieces.append(CertifiedPiece(_piece_in(pd, names), terms))
    domain = data.get("domain")
    return PiecewiseCertificate(
        _matrix_in(data["target"], names),
        tuple(pieces),
        tuple(names),
        None if domain is None else _piece_in(domain, names),
    )


def dumps(data: dict) -> str:
    return json.dumps(data, indent=1)


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def save_json(data: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(data) + "\n")


def load_certificate(path) -> PiecewiseCertificate:
    return certificate_from_dict(load_json(path))


def save_certificate(cert: PiecewiseCertificate, path) -> None:
    save_json(certificate_to_dict(cert), path)


def load_matrix(path) -> tuple[MatrixPolynomial, list[str]]:
    data = load_json(path)
    if "rows" not in data:
        raise ValueError(f"{path}: not a matrix file (missing 'rows')")
    return matrix_from_dict(data)


def load_polynomial(path) -> tuple[Polynomial, list[str]]:
    data = load_json(path)
    if "poly" not in data:
        raise ValueError(f"{path}: not a polynomial file (missing 'poly')")
    return polynomial_from_dict(data)

