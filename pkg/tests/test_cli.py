import csv
import io
import json
import math
import subprocess
import sys

import pytest

from nilweyl import cli


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_weyl_gauss_sum(capsys):
    rc, out, _ = run(capsys, "weyl", "--k", "2", "--coeffs", "1/5,0", "--n", "5")
    assert rc == 0
    assert "# library: nilweyl" in out and "# mode: float64" in out
    (row,) = rows(out)
    assert abs(float(row["abs"]) - math.sqrt(5)) < 1e-12
    assert row["N"] == "5"


def test_weyl_schedule_and_modes(capsys):
    rc, out, _ = run(capsys, "weyl", "--k", "3", "--alpha", "0.25,0.5,0.125", "--nmin", "2", "--nmax", "6",
                     "--mode", "fixed64")
    assert rc == 0
    assert [r["N"] for r in rows(out)] == ["4", "8", "16", "32", "64"]


def test_fit_from_table(tmp_path, capsys):
    rc, out, _ = run(capsys, "weyl", "--k", "2", "--alpha", "1.4142135623730950488,0", "--nmin", "8", "--nmax", "16")
    path = tmp_path / "t.csv"
    path.write_text(out)
    rc, out, _ = run(capsys, "fit", "--table", str(path), "--k", "2")
    assert rc == 0
    rep = json.loads(out)
    assert set(rep) == {"k", "alpha", "regime", "fit", "bound", "provenance"}
    assert rep["bound"]["verdict"] == "pass"
    assert 0.35 <= rep["fit"]["slope"] <= 0.65


def test_fit_direct(capsys):
    rc, out, _ = run(capsys, "fit", "--k", "3", "--alpha", "0.41421356237309504880,0,0", "--nmax", "14",
                     "--regime", "weak", "--nu0", "2")
    assert rc == 0
    rep = json.loads(out)
    assert rep["bound"]["power"] == pytest.approx(7 / 8)


def test_orbit(capsys):
    rc, out, _ = run(capsys, "orbit", "--k", "2", "--alpha", "1/2,1/4", "--n", "3")
    assert rc == 0
    r = rows(out)
    assert [(x["s1"], x["s2"]) for x in r] == [("0", "0"), ("0.5", "0.25"), ("0", "0")]


def test_lattice_flow(tmp_path, capsys):
    summ = tmp_path / "s.json"
    rc, out, _ = run(capsys, "lattice-flow", "--alpha", "0.5,0", "--rho", "1,0", "--tmax", "2", "--dt", "0.5",
                     "--summary", str(summ))
    assert rc == 0
    r = rows(out)
    assert len(r) == 5 and float(r[0]["inj"]) == 0.5
    s = json.loads(summ.read_text())
    assert s["grid"]["n"] == 5 and "delta_hat" in s


def test_inj(capsys):
    rc, out, _ = run(capsys, "inj", "--vectors", "2,0;1,3")
    assert rc == 0
    assert json.loads(out)["systole"] == pytest.approx(2)
    rc, out, _ = run(capsys, "inj", "--alpha", "0.3,0.7", "--rho", "1,0", "--t", "0")
    assert json.loads(out)["inj"] == 0.5


def test_dist_norm_and_scaling(capsys):
    rc, out, _ = run(capsys, "dist-norm", "--poly", "0,0,1")
    assert json.loads(out)["norm"] == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    rc, out, _ = run(capsys, "dist-norm", "--lambda", "0,0,1", "--rho", "optimal", "--tmax", "2", "--threads", "2")
    r = rows(out)
    assert float(r[0]["rate_fit"]) == pytest.approx(1 / 6, rel=1e-9)
    rc, out, _ = run(capsys, "scaling", "--lambda", "0,1", "--rho", "optimal")
    res = json.loads(out)
    assert res["holds"] and res["rate"] == pytest.approx(0.5, rel=1e-9)


def test_green(capsys):
    rc, out, _ = run(capsys, "green", "--f", "gauss-deriv")
    assert rc == 0 and json.loads(out)["residual"] < 1e-6
    rc, out, err = run(capsys, "green", "--f", "gauss")
    assert rc == 1
    assert json.loads(err.splitlines()[0])["obstruction"] == pytest.approx(math.sqrt(math.pi))


def test_green_input_file(tmp_path, capsys):
    path = tmp_path / "f.csv"
    lines = ["# x,f"] + [f"{x / 100},{-2 * x / 100 * math.exp(-(x / 100) ** 2)}" for x in range(-800, 801)]
    path.write_text("\n".join(lines))
    rc, out, _ = run(capsys, "green", "--input", str(path))
    assert rc == 0 and json.loads(out)["points"] == 1601


def test_cf(capsys):
    rc, out, _ = run(capsys, "cf", "--x", "1.41421356237309504880168872420969807857", "--depth", "8")
    res = json.loads(out)
    assert res["quotients"] == [1, 2, 2, 2, 2, 2, 2, 2]
    assert res["convergents"][1] == [3, 2]
    assert res["nu_hat"] < 1.1


def test_algebra_rho_bound(capsys):
    rc, out, _ = run(capsys, "algebra", "--k", "3")
    assert json.loads(out)["brackets"][0] == {"lhs": "X", "rhs": "Y1", "out": {"Y2": 1}}
    rc, out, _ = run(capsys, "algebra", "--k", "3", "--basis", "eta")
    assert json.loads(out)["S"][1] == ["0", "1", "-1/2"]
    rc, out, _ = run(capsys, "algebra", "--k", "3", "--basis", "quasi")
    assert json.loads(out)["quotient_ok"] is True
    rc, out, _ = run(capsys, "rho", "--k", "3")
    assert json.loads(out)["rho"] == ["2/3", "1/3", "0"]
    rc, out, _ = run(capsys, "bound", "--k", "3")
    assert json.loads(out)["power"] == "5/6"


def test_config_file_and_override(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[weyl]\nk = 2\ncoeffs = 1/5,0\nn = 5\n")
    rc, out, _ = run(capsys, "weyl", "--config", str(ini))
    assert rc == 0 and rows(out)[0]["N"] == "5"
    rc, out, _ = run(capsys, "weyl", "--config", str(ini), "--n", "10")
    assert rows(out)[0]["N"] == "10"


def test_out_file(tmp_path, capsys):
    path = tmp_path / "o.json"
    rc, out, _ = run(capsys, "rho", "--k", "2", "--out", str(path))
    assert rc == 0 and out == ""
    assert json.loads(path.read_text())["rho"] == ["1", "0"]


@pytest.mark.parametrize("argv", [
    ["weyl", "--bogus"],
    ["weyl", "--k", "2"],
    ["weyl", "--k", "1", "--coeffs", "1"],
    ["bound", "--k", "3", "--regime", "weak"],
    ["dist-norm", "--poly", "0,0,1", "--sigma", "0.3"],
    ["cf", "--x", "abc"],
    ["inj", "--vectors", "1,2;2,4"],
    ["weyl", "--config", "/nonexistent.ini", "--k", "2", "--coeffs", "1,0"],
])
def test_invalid_input_exit_code(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        sys.exit(cli.main(argv))
    assert exc.value.code == 1


def test_resource_exit_code(capsys):
    rc, _, err = run(capsys, "weyl", "--k", "2", "--coeffs", "1,0", "--n", str(2**40))
    assert rc == 3 and "exceeds" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nilweyl", "bound", "--k", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["power"] == "1/2"
