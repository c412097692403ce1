import json
import subprocess
import sys

import numpy as np
import pytest

from ncortho import cli
from ncortho import io as nio
from ncortho.fock_multivar import GammaParamsCT, ct_kernel_from_gamma
from ncortho.hermitian_jacobi import JacobiFamily, jacobi_distance
from ncortho.schur_params import GammaParams1D


def run_json(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_complex_format_roundtrip():
    for z in (0j, 1.5 - 2j, -0.25 + 1e-17j, complex(3, -0.0)):
        assert nio.parse_complex(nio.format_complex(z)) == z
    assert nio.format_complex(1 + 2j) == "1.0+2.0i"
    assert nio.parse_complex({"re": 1, "im": -1}) == 1 - 1j
    with pytest.raises(ValueError):
        nio.parse_complex("")


def test_csv_quoting_and_roundtrip(rng):
    M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    text = nio.matrix_to_csv(M)
    assert '"' in text
    np.testing.assert_array_equal(nio.matrix_from_csv(text), M)
    with pytest.raises(ValueError):
        nio.matrix_from_csv("1,2\n3\n")


def test_json_roundtrips(rng):
    p = GammaParams1D.random(rng, 4)
    q = nio.params_from_json(json.loads(nio.dumps(nio.params_to_json(p))))
    np.testing.assert_array_equal(q.gamma, p.gamma)
    ct = GammaParamsCT.random(rng, 2, 2)
    ct2 = nio.ct_params_from_json(nio.ct_params_to_json(ct))
    assert ct2.gamma == ct.gamma
    K = ct_kernel_from_gamma(ct)
    K2 = nio.ct_kernel_from_json(nio.ct_kernel_to_json(K), 2, 2)
    assert K2.entries == K.entries
    J = JacobiFamily.random(rng, 2, 2)
    assert jacobi_distance(J, nio.jacobi_from_json(json.loads(nio.dumps(nio.jacobi_to_json(J))))) == 0


def test_catalan_command(capsys):
    code, rep = run_json(capsys, "catalan", "--l", "3")
    assert code == 0
    assert rep["count"] == 5 and len(rep["terms"]) == 5
    assert {"tolerance", "max_residual", "ok"} <= rep.keys()


def test_params2moments_zero_file_gives_identity(tmp_path, capsys):
    src = tmp_path / "zero.json"
    src.write_text(json.dumps({"horizon": 3, "diag": [1, 1, 1, 1], "gamma": []}))
    out = tmp_path / "k.csv"
    assert cli.run(["params2moments", "--in", str(src), "--out", str(out)]) == 0
    np.testing.assert_array_equal(nio.matrix_from_csv(out.read_text()), np.eye(4))


def test_moments2params_from_csv(tmp_path, capsys):
    src = tmp_path / "k.csv"
    src.write_text(nio.matrix_to_csv(np.array([[1, 0.5], [0.5, 1]])))
    code, rep = run_json(capsys, "moments2params", "--in", str(src))
    assert code == 0
    assert nio.parse_complex(rep["gamma"][0]["value"]) == pytest.approx(0.5)


def test_favard_semicircle(capsys):
    code, rep = run_json(capsys, "favard", "--preset", "semicircle", "--depth", "3")
    assert code == 0
    vals = [nio.parse_complex(m["value"]) for m in rep["moments"]]
    np.testing.assert_allclose(vals, [1, 0, 1, 0, 2, 0, 5], atol=1e-12)


@pytest.mark.parametrize("command", sorted(cli.COMMANDS))
def test_every_command_succeeds(command, capsys):
    extra = ["--l", "4"] if command == "catalan" else []
    assert cli.run([command, "--horizon", "6", "--format", "json", *extra]) == 0


def test_determinism(capsys):
    cli.run(["szego-kernel", "--seed", "7"])
    first = capsys.readouterr().out
    cli.run(["szego-kernel", "--seed", "7"])
    assert capsys.readouterr().out == first


def test_exit_code_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.run(["params2moments", "--in", str(bad)]) == 2
    assert cli.run(["params2moments", "--in", str(tmp_path / "missing.json")]) == 2
    assert cli.run(["catalan", "--l", "0"]) == 2
    assert cli.run(["no-such-command"]) == 2
    err = capsys.readouterr().err
    assert "malformed input" in err


def test_exit_code_invariant_failure(tmp_path, capsys):
    src = tmp_path / "k.csv"
    src.write_text("1,2\n2,1\n")
    assert cli.run(["moments2params", "--in", str(src)]) == 1
    assert cli.run(["params2moments", "--tol", "1e-300", "--horizon", "10"]) == 1
    assert "error" in capsys.readouterr().err


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "ncortho", "catalan", "--l", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["count"] == 2
