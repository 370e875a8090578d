import json
from fractions import Fraction

import pytest

from semicert import io
from semicert.certkit import ConstPSD, psd_constant, verify_certificate
from semicert.cli import main
from semicert.gallery import (
    STATUSES,
    choi_certificate,
    two_piece_certificate,
    items,
    m_lambda,
    mlambda_certificate,
    mlambda_patch,
    corner_shift,
    corner_shift_reference,
    run_gallery,
)
from semicert.polycore import Polynomial

FAST = [it.id for it in items() if it.id != "mlambda-1-2"]


@pytest.mark.parametrize("item_id", FAST)
def test_gallery_item(item_id):
    rep = run_gallery(item_id)
    (res,) = rep.results
    assert res.expected in STATUSES
    assert res.ok, res.detail


def test_mlambda_one_middle_term():
    patch = mlambda_patch(1)
    middle = next(t for t in patch.terms if isinstance(t.factor, ConstPSD))
    assert psd_constant(middle.factor.Q)
    x, y, z = (Polynomial.var(i, 3) for i in range(3))
    mat = middle.factor_matrix()
    assert mat[1, 2] == -2 * y * z and mat[0, 0] == 2 * z * z


def test_mlambda_one_matches_choi_piece():
    x, y, z = (Polynomial.var(i, 3) for i in range(3))
    weight = mlambda_patch(1).terms[-1].weight
    assert weight == 2 * (x * x - z * z)


def test_mlambda_four():
    x, y, z = (Polynomial.var(i, 3) for i in range(3))
    cert = mlambda_certificate(4)
    assert cert.pieces[0].terms[-1].weight == (25 * x * x - 4 * z * z).scale(Fraction(1, 5))
    assert verify_certificate(cert).exact


def test_mlambda_rejects_nonpositive():
    with pytest.raises(ValueError):
        mlambda_certificate(0)
    with pytest.raises(ValueError):
        mlambda_certificate(-1)


def test_mlambda_half_patches_leave_a_gap():
    rep = verify_certificate(mlambda_certificate(Fraction(1, 2)))
    assert rep.identity_exact and rep.weights_ok
    assert not rep.covering.ok


def test_corner_shift_matches_display():
    assert corner_shift() == corner_shift_reference()


def test_cli_gallery_structured(capsys):
    code = main(["gallery", "--filter", "choi*", "--format", "structured"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["ok"] and len(out["items"]) == 2


def test_cli_verify_and_mutation(tmp_path, capsys):
    path = tmp_path / "two_piece.json"
    io.save_certificate(two_piece_certificate(), path)
    assert main(["verify", str(path)]) == 0
    data = io.load_json(path)
    data["pieces"][0]["terms"][0]["weight"] = "2"
    io.save_json(data, path)
    capsys.readouterr()
    assert main(["verify", str(path), "--format", "structured"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["pieces"][0]["identity"] == "fail"
    assert out["pieces"][0]["identity_witness"] is not None


def test_cli_matrix_commands(tmp_path, capsys):
    uni = tmp_path / "u.json"
    io.save_json({"vars": ["t"], "rows": [["t^2", "0"], ["0", "t^4"]]}, uni)
    assert main(["smith", str(uni)]) == 0
    assert main(["zero-plus", str(uni)]) == 0
    dom = tmp_path / "d.json"
    io.save_json({"vars": ["x", "y"], "rows": [["1+x", "x*y"], ["x*y", "1+y"]]}, dom)
    assert main(["domination", str(dom), "--at", "0,0", "--signs", "+,-"]) == 0
    io.save_json(io.matrix_to_dict(corner_shift(), ["h", "y"]), dom)
    assert main(["domination", str(dom), "--at", "0,0"]) == 1


def test_cli_construct(tmp_path, capsys):
    m = tmp_path / "m.json"
    io.save_json({"vars": ["x", "y"], "rows": [["2*x^2+y^2", "x*y"], ["x*y", "x^2+2*y^2"]]}, m)
    out = tmp_path / "c.json"
    assert main(["construct", str(m), "-o", str(out)]) == 0
    assert verify_certificate(io.load_certificate(out)).ok
    io.save_json(io.matrix_to_dict(m_lambda(1)), m)
    assert main(["construct", str(m)]) == 1


def test_cli_detrep(tmp_path, capsys):
    f = tmp_path / "f.json"
    io.save_json({"vars": ["x"], "poly": "(x^2+1)^2*(x-3)^2"}, f)
    rep = tmp_path / "rep.json"
    assert main(["detrep", str(f), "-o", str(rep)]) == 0
    assert main(["detrep-verify", str(rep), str(f)]) == 0
    io.save_json({"vars": ["x"], "poly": "x^3"}, f)
    assert main(["detrep", str(f)]) == 1


def test_cli_bad_file(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
