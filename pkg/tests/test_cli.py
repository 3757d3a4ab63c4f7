import json
import subprocess
import sys


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "kahlerlap.cli", *args],
        capture_output=True,
        text=True,
    )


class TestCatalogCommand:
    def test_table_lists_families(self):
        r = run_cli("catalog")
        assert r.returncode == 0
        for name in ("grassmannian", "sp", "so2n", "quadric-even",
                     "quadric-odd", "cp", "ch", "flat"):
            assert name in r.stdout

    def test_json_array(self):
        r = run_cli("catalog", "--json")
        rows = json.loads(r.stdout)
        assert isinstance(rows, list) and len(rows) == 8

    def test_family_filter(self):
        r = run_cli("catalog", "--family", "grassmannian", "--json")
        rows = json.loads(r.stdout)
        assert len(rows) == 1 and rows[0]["family"] == "grassmannian"


class TestCheckCommand:
    def test_cp1_passes(self):
        r = run_cli("check", "cp:n=1", "--kmax", "3")
        assert r.returncode == 0
        assert "p_2 = x^2 + 2*x" in r.stdout
        assert "p_3 = x^3 + 10*x^2 + 8*x" in r.stdout

    def test_grassmannian_violation_exit_code(self):
        r = run_cli("check", "grassmannian:k=2,N=4", "--kmax", "3")
        assert r.returncode == 1
        assert "VIOLATED" in r.stdout
        assert "val1 - 2*val2 = 16" in r.stdout

    def test_unknown_space_usage_error(self):
        r = run_cli("check", "missing:x=1")
        assert r.returncode == 2
        assert "error" in r.stderr

    def test_low_degree_usage_error(self):
        r = run_cli("check", "cp:n=1", "--kmax", "3", "--degree", "4")
        assert r.returncode == 2

    def test_json_schema(self):
        r = run_cli("check", "grassmannian:k=2,N=4", "--json")
        report = json.loads(r.stdout)
        assert report["space"] == "grassmannian:k=2,N=4"
        assert report["dim"] == 4 and report["truncation"] == 6
        assert report["einstein"] == {"lambda": "4", "residual": "0"}
        delta = report["delta"]
        assert delta[0]["pk"] == {"1": "1"}
        assert delta[1]["pk"] == {"1": "4", "2": "1"}
        assert delta[2]["status"] == "violated"
        w = delta[2]["witness"]
        assert set(w) == {"P", "Q", "kind", "lhs", "expected"}
        assert report["obstruction"] == {
            "lambda": "4",
            "mu": ["1", "1"],
            "val1": "64",
            "val2": "24",
            "requirement": "16",
        }
        assert report["engine"]["version"]

    def test_determinism_and_round_trip(self):
        a = run_cli("check", "sp:N=2", "--json")
        b = run_cli("check", "sp:N=2", "--json")
        assert a.stdout == b.stdout
        report = json.loads(a.stdout)
        assert json.loads(json.dumps(report)) == report

    def test_pot_file(self, tmp_path):
        pot = tmp_path / "line.pot"
        pot.write_text("# Fubini-Study line\ndim 1\nlog(1 + modsq(z(1)))\n")
        r = run_cli("check", str(pot), "--kmax", "2")
        assert r.returncode == 0
        assert "p_2 = x^2 + 2*x" in r.stdout

    def test_bad_pot_file(self, tmp_path):
        pot = tmp_path / "broken.pot"
        pot.write_text("dim 1\nlog(\n")
        r = run_cli("check", str(pot))
        assert r.returncode == 2

    def test_out_flag_writes_file(self, tmp_path):
        out = tmp_path / "report.json"
        r = run_cli("check", "cp:n=1", "--json", "--out", str(out))
        assert r.returncode == 0 and r.stdout == ""
        assert json.loads(out.read_text())["space"] == "cp:n=1"


class TestRadialCommand:
    def test_named_profile(self):
        r = run_cli("radial", "--name", "fubini-study", "--n", "2", "--kmax", "3")
        assert r.returncode == 0
        assert "p_2 = x^2 + 3*x" in r.stdout
        assert "verdict: equal" in r.stdout

    def test_coefficient_profile(self):
        r = run_cli("radial", "--coeffs", "0,1,1/2", "--n", "1", "--kmax", "3")
        assert r.returncode == 0
        assert "verdict: equal" in r.stdout

    def test_negative_slope_rejected(self):
        r = run_cli("radial", "--coeffs", "0,-1", "--n", "1")
        assert r.returncode == 2

    def test_requires_exactly_one_source(self):
        r = run_cli("radial", "--n", "1")
        assert r.returncode == 2


class TestDualCommand:
    def test_cp1(self):
        r = run_cli("dual", "cp:n=1")
        assert r.returncode == 0
        assert "40 / -40" in r.stdout
        assert "all pairs sum to zero" in r.stdout

    def test_grassmannian(self):
        r = run_cli("dual", "grassmannian:k=2,N=4", "--json")
        assert r.returncode == 0
        rows = json.loads(r.stdout)["dual"]
        assert len(rows) == 10
        for row in rows:
            from fractions import Fraction

            assert Fraction(row["compact"]) + Fraction(row["noncompact"]) == 0

    def test_flat_zeros(self):
        r = run_cli("dual", "flat:n=2", "--json")
        rows = json.loads(r.stdout)["dual"]
        assert all(row["compact"] == "0" for row in rows)
