import json

import pytest

from crosstheta.cli import main
from crosstheta.lattices import lattice_to_json, lattice_to_text
from crosstheta import catalog


@pytest.fixture
def lattice_files(tmp_path):
    d4 = tmp_path / "d4.json"
    d4.write_text(lattice_to_json(catalog.dn(4)) + "\n")
    z3 = tmp_path / "z3.txt"
    z3.write_text(lattice_to_text(catalog.zn(3)))
    two_z3 = tmp_path / "2z3.txt"
    two_z3.write_text("2 0 0\n0 2 0\n0 0 2\n")
    dim4 = tmp_path / "table_dim4.txt"
    dim4.write_text(lattice_to_text(catalog.known_packing(4)))
    return {"d4": str(d4), "z3": str(z3), "2z3": str(two_z3),
            "dim4": str(dim4), "dir": tmp_path}


def test_theta_csv(lattice_files, capsys):
    rc = main(["theta", "--lattice", lattice_files["d4"], "--order", "8"])
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "exponent,coefficient"
    rows = dict(line.split(",") for line in out[1:])
    assert rows["2"] == "32"
    assert rows["4"] == "192"


def test_theta_rational_and_outfile(lattice_files):
    out = lattice_files["dir"] / "theta.csv"
    rc = main(["theta", "--lattice", lattice_files["d4"], "--order", "4",
               "--rational", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("# theta = ")
    manifest = json.loads((lattice_files["dir"] / "theta.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "theta"
    assert lattice_files["d4"] in manifest["inputs"]


def test_theta_json_format(lattice_files, capsys):
    rc = main(["theta", "--lattice", lattice_files["d4"], "--order", "2",
               "--format", "json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["terms"][1] == {"exponent": "2", "coefficient": "32"}


def test_svp_report(lattice_files, capsys):
    rc = main(["svp", "--lattice", lattice_files["dim4"], "--report"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["kissing"] == 30
    assert data["density"] == pytest.approx(0.824858, abs=1e-5)


def test_bounds_csv(lattice_files):
    out = lattice_files["dir"] / "curves.csv"
    rc = main(["bounds", "--lattice-b", lattice_files["z3"],
               "--lattice-e", lattice_files["2z3"],
               "--gamma-db-range", "0:10:5", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "gamma_db,F_exact,G_upper,Pce_bound,Peb_bound"
    assert len(lines) == 4  # header + 0, 5, 10 dB


def test_simulate_csv(lattice_files):
    out = lattice_files["dir"] / "sim.csv"
    rc = main(["simulate", "--code", lattice_files["z3"], lattice_files["2z3"],
               "--pam", "4", "--snr-db", "40:40:1", "--rounds", "2000",
               "--seed", "5", "--who", "bob", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "snr_db,estimate,ci_halfwidth"
    snr, est, ci = lines[1].split(",")
    assert float(est) < 0.05
    manifest = json.loads((lattice_files["dir"] / "sim.csv.manifest.json").read_text())
    assert manifest["seed"] == 5


def test_pack_json(lattice_files):
    out = lattice_files["dir"] / "solutions.json"
    rc = main(["pack", "--dim", "2", "--coeff-cap", "1", "--multistarts", "4",
               "--count-target", "3", "--seed", "42", "--out", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["solutions"][0]["density"] == pytest.approx(1.0, abs=1e-8)


def test_missing_file_exit_2(capsys):
    rc = main(["theta", "--lattice", "/nonexistent/lat.json"])
    assert rc == 2
    assert "lat.json" in capsys.readouterr().err


def test_bad_range_exit_2(lattice_files, capsys):
    rc = main(["bounds", "--lattice-b", lattice_files["z3"],
               "--lattice-e", lattice_files["2z3"], "--gamma-db-range", "oops"])
    assert rc == 2
    assert "range" in capsys.readouterr().err


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        main(["simulate", "--help"])
    out = capsys.readouterr().out
    for flag in ("--code", "--pam", "--snr-db", "--rounds", "--seed", "--who",
                 "--out", "--format", "--threads", "--server"):
        assert flag in out


def test_help_lists_pack_flags(capsys):
    with pytest.raises(SystemExit):
        main(["pack", "--help"])
    out = capsys.readouterr().out
    for flag in ("--dim", "--coeff-cap", "--half-box", "--multistarts", "--seed"):
        assert flag in out


def test_reruns_identical_with_same_manifest(lattice_files):
    out1 = lattice_files["dir"] / "a.csv"
    out2 = lattice_files["dir"] / "b.csv"
    args = ["simulate", "--code", lattice_files["z3"], lattice_files["2z3"],
            "--pam", "4", "--snr-db", "10:10:1", "--rounds", "4096", "--seed", "9"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()


def test_cli_lattice_roundtrip_via_theta(lattice_files, capsys):
    # text and json forms of the same lattice give identical output
    rc1 = main(["theta", "--lattice", lattice_files["d4"], "--order", "6"])
    out1 = capsys.readouterr().out
    alt = lattice_files["dir"] / "d4.txt"
    alt.write_text(lattice_to_text(catalog.dn(4)))
    rc2 = main(["theta", "--lattice", str(alt), "--order", "6"])
    out2 = capsys.readouterr().out
    assert rc1 == rc2 == 0
    assert out1 == out2
