import os
import subprocess

import pytest

import _psprog as pp


def test_exact_tables():
    assert pp.stirling2(0, 0) == 1
    assert pp.stirling2(3, 2) == 3
    assert pp.stirling2(4, 2) == 7
    assert pp.binomial(6, 2) == 15
    assert pp.binomial(2, 3) == 0


def test_floors_and_membership():
    assert pp.floor_f("pow:3/2", 3) == 5
    assert pp.floor_f("pow:3/2", 4) == 8
    assert pp.floor_f("pow:3/2", 2) == 2
    assert pp.exact_integer_check("pow:3/2", 4) == 8
    assert pp.exact_integer_check("pow:3/2", 2) is None
    r = pp.is_in_pkd([2, 5, 8], 1)
    assert r["in_pkd"] and r["newton"] == [2, 3]
    assert not pp.is_in_pkd([1, 2, 5], 1)["in_pkd"]
    assert pp.brute_force_test("pow:3/2", 3, 1, 1, 2)
    assert not pp.brute_force_test("pow:3/2", 3, 1, 1, 1)


def test_enclosure():
    lo, hi = pp.eval_enclosure("pow:3/2", 0, 4)
    assert lo <= 8.0 <= hi
    assert hi - lo < 1e-12


def test_classifier_is_sound():
    for n in range(100, 260):
        c = pp.classify("pow:3/2", 3, 1, 1, n)
        if c["verdict"] == "uncertain":
            continue
        truth = pp.brute_force_test("pow:3/2", 3, 1, 1, n)
        assert (c["verdict"] == "certainly-in") == truth


def test_volumes():
    assert pp.volume_exact(3, 1)["volume"] == "1/2"
    assert pp.volume_exact(6, 1)["volume"] == "1/5"
    assert pp.volume_exact(4, 2, "Cprime")["volume"] == "1/9"
    assert pp.lower_bound(4, 2) == "1/9"
    mc = pp.volume_montecarlo(3, 1, samples=200000, seed=7)
    assert abs(mc["estimate"] - 0.5) < 4 * mc["std_error"] + 1e-9


def test_density_and_band():
    rep = pp.density("pow:3/2", 3, 1, [4000])
    assert rep["target"] == "1/2"
    assert abs(rep["densities"][0] - 0.5) < 0.05
    band = pp.xlogx_band(3, 1, [3000])
    assert band["band_lo"] < band["densities"][0] < band["band_hi"]


def test_discrepancy():
    rep = pp.discrepancy("pow:3/2", 1, 500, 256, mode="exact", H=8)
    assert 0.0 < rep["D"] < 1.0
    assert rep["D"] <= rep["etk_constant"] * rep["etk"]
    assert rep["isotropic"] >= rep["D"]


def _cli():
    path = os.environ.get("PSPROG_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("PSPROG_CLI not set")
    return path


def test_cli_volume_and_exit_codes():
    cli = _cli()
    out = subprocess.run([cli, "volume", "--k", "3", "--d", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "1/2"
    bad = subprocess.run([cli, "volume", "--k", "2", "--d", "1"],
                         capture_output=True, text=True)
    assert bad.returncode == 1


def test_cli_determinism(tmp_path):
    cli = _cli()
    args = [cli, "density", "--f", "pow:3/2", "--k", "3", "--r", "1",
            "--n-grid", "500,1500", "--format", "csv"]
    a = subprocess.run(args + ["--threads", "1"], capture_output=True)
    b = subprocess.run(args + ["--threads", "2"], capture_output=True)
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout

    man = tmp_path / "run.json"
    outp = tmp_path / "out.csv"
    r = subprocess.run(args + ["--out", str(outp), "--manifest", str(man)],
                       capture_output=True)
    assert r.returncode == 0
    assert outp.read_bytes() == a.stdout
    text = man.read_text()
    assert '"command": "density"' in text and '"outputs"' in text


def test_cli_computation_error_and_config(tmp_path):
    cli = _cli()
    # Pre-asymptotic n: the classifier refuses rather than guessing.
    r = subprocess.run([cli, "detect", "--f", "pow:3/2", "--k", "3", "--r", "5",
                        "--n", "1"], capture_output=True, text=True)
    assert r.returncode == 2
    assert "asymptotic" in r.stderr

    cfg = tmp_path / "run.cfg"
    cfg.write_text("volume.k=4\nvolume.d=1\n")
    out = subprocess.run([cli, "--config", str(cfg), "volume"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "1/3"


def test_cli_svg_emission(tmp_path):
    cli = _cli()
    svg = tmp_path / "density.svg"
    r = subprocess.run([cli, "density", "--f", "pow:3/2", "--k", "3",
                        "--n-grid", "200,400,800", "--svg", str(svg),
                        "--out", str(tmp_path / "d.csv")], capture_output=True)
    assert r.returncode == 0
    text = svg.read_text()
    assert text.startswith("<svg") and "<polyline" in text
    svg2 = tmp_path / "sweep.svg"
    r2 = subprocess.run([cli, "sweep", "--k", "3", "--n", "150",
                         "--alpha-grid", "1+i/20,i=1..19", "--svg", str(svg2),
                         "--out", str(tmp_path / "s.csv")], capture_output=True)
    assert r2.returncode == 0
    assert svg2.read_text().startswith("<svg")
