import json

import pytest

from ptlab import cli, io


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_parse_complex():
    assert cli.parse_complex("1+0.2i") == 1 + 0.2j
    assert cli.parse_complex("1.167i") == 1.167j
    assert cli.parse_complex("-1") == -1


def test_spectrum_shifted(tmp_path, capsys):
    code, cap = run(capsys, "spectrum", "--family", "shifted", "--eps", "1", "--emax", "6", "--out", str(tmp_path))
    assert code == 0
    energies = json.loads(cap.out)["energies"]
    assert abs(energies[0] - 1.0) < 1e-8
    header, rows = io.read_csv(tmp_path / "spectrum.csv")
    assert header[:2] == ["n", "re_E"] and len(rows) == len(energies)


def test_qop_prints_coefficients(capsys):
    code, cap = run(capsys, "qop")
    assert code == 0
    assert "A = -4/3, B = -2" in cap.out


def test_matrix_broken_needs_eigen_only(tmp_path, capsys):
    code, cap = run(capsys, "matrix", "--a", "0", "--b", "2", "--g", "1", "--out", str(tmp_path))
    assert code == 2 and "error" in cap.err
    code, cap = run(capsys, "matrix", "--a", "0", "--b", "2", "--g", "1", "--eigen-only", "--out", str(tmp_path))
    assert code == 0
    assert json.loads((tmp_path / "matrix.json").read_text())["phase"] == "broken"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["matrix", "--r", "1"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tag": "pt-quartic", "levels": 2}))
    code, cap = run(capsys, "wkb", "--tag", "pt-x6", "--config", str(cfg))
    out = json.loads(cap.out)
    assert code == 0 and out["tag"] == "pt-x6" and len(out["levels"]) == 2


def test_classical_writes_svg(tmp_path, capsys):
    svg = tmp_path / "orbit.svg"
    code, cap = run(capsys, "classical", "--family", "quartic-pt", "--energy", "1", "--x0=-2i",
                    "--tmax", "3", "--svg", str(svg), "--out", str(tmp_path))
    assert code == 0
    assert json.loads(cap.out)["closed"]
    assert svg.read_text().startswith("<svg")
    assert (tmp_path / "trajectory.csv").exists()
