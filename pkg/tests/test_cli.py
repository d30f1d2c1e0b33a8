import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from click.testing import CliRunner

from cubicwave import __version__
from cubicwave.cli import main, parse_list, parse_range

GOLDEN = Path(__file__).parent / "golden"
SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def schema():
    text = resources.files("cubicwave").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def run(*args):
    return CliRunner().invoke(main, list(args))


def records(result):
    return list(csv.DictReader(io.StringIO(result.stdout)))


class TestParsing:
    def test_range(self):
        assert parse_range("-3:3:11", "--grid") == (-3.0, 3.0, 11)

    @pytest.mark.parametrize("bad", ["1:2", "a:b:3", "0:1:0", "0:inf:3"])
    def test_bad_range(self, bad):
        with pytest.raises(Exception) as info:
            parse_range(bad, "--grid")
        assert info.value.exit_code == 2

    def test_list(self):
        assert parse_list("0, 1.5,2", "--times") == [0.0, 1.5, 2.0]


class TestClassify:
    def test_origin(self):
        res = run("classify", "0", "0")
        assert res.exit_code == 0
        (rec,) = records(res)
        assert rec["label"] == "Scattering/Scattering"

    def test_blowup(self):
        (rec,) = records(run("classify", "2", "2"))
        assert rec["forward"] == "Blowup"
        assert float(rec["t_plus"]) == pytest.approx(math.tan(math.pi / 8), abs=1e-10)
        assert float(rec["T_plus"]) == pytest.approx(math.pi / 4, abs=1e-10)

    def test_x_c_from_constants(self):
        rows = records(run("constants"))
        xc = next(r["value"] for r in rows if r["name"] == "X_C")
        (rec,) = records(run("classify", xc, "0"))
        assert rec["label"] == "Threshold/Threshold"
        assert rec["t_plus"] == "inf"

    def test_malformed(self):
        assert run("classify", "abc", "0").exit_code == 2
        assert run("classify", "nan", "0").exit_code == 2


class TestConstants:
    def test_locked_rows(self):
        rows = {(r["name"], r["nu"]): r for r in records(run("constants"))}
        assert float(rows[("E_inf", "")]["value"]) == pytest.approx(2.6853543447618726, rel=1e-10)
        assert float(rows[("X_C", "")]["value"]) == pytest.approx(1.046200688768708, rel=1e-10)
        assert float(rows[("beta(0)", "")]["value"]) == pytest.approx(0.9122117886751556, rel=1e-10)
        assert float(rows[("kappa", "0.0")]["value"]) == pytest.approx(64 * math.pi ** 4 / 3, rel=1e-10)
        assert len(rows) == 8
        for r in rows.values():
            assert float(r["residual"]) < 1e-8 * max(1.0, float(r["value"]))


class TestExports:
    def test_phase_diagram_golden(self):
        res = run("phase-diagram", "--grid=-3:3:11")
        assert res.exit_code == 0
        assert res.stdout == (GOLDEN / "phase_diagram_11x11.csv").read_text()

    def test_beta_curve_golden(self):
        got = records(run("beta-curve", "--grid=-3:3:13"))
        ref = list(csv.DictReader((GOLDEN / "beta_curve_13.csv").open()))
        assert [r["X"] for r in got] == [r["X"] for r in ref]
        assert np.allclose([float(r["beta"]) for r in got], [float(r["beta"]) for r in ref],
                           rtol=1e-9, atol=1e-12)

    def test_beta_column_monotone(self):
        betas = [float(r["beta"]) for r in records(run("beta-curve", "--grid=-3:3:31"))]
        assert np.all(np.diff(betas) < 0)

    def test_label_swap(self):
        rows = records(run("phase-diagram", "--grid=-3:3:11"))
        cell = {(round(float(r["X"]), 9), round(float(r["Y"]), 9)): r for r in rows}
        for (x, y), r in cell.items():
            m = cell[(x, round(-y, 9) + 0.0)]
            assert (m["forward"], m["backward"]) == (r["backward"], r["forward"])

    def test_curve_rows(self):
        rows = records(run("phase-diagram", "--grid=-3:3:31", "--curve", "--workers", "4"))
        assert {r["source"] for r in rows} == {"grid", "curve"}
        assert len({r["label"] for r in rows}) == 9

    def test_csv_format(self):
        res = run("beta-curve", "--grid=0:1:3")
        assert res.stdout.splitlines()[0] == "X,beta"
        assert "\r" not in res.stdout
        assert res.stdout.endswith("\n")

    def test_grid_needs_two(self):
        assert run("beta-curve", "--grid=0:1:1").exit_code == 2

    def test_unwritable(self, tmp_path):
        res = run("--out", str(tmp_path / "missing" / "x.csv"), "beta-curve", "--grid=0:1:3")
        assert res.exit_code == 3

    def test_out_file(self, tmp_path):
        out = tmp_path / "pd.csv"
        assert run("--out", str(out), "phase-diagram", "--grid=-3:3:11").exit_code == 0
        assert out.read_text() == (GOLDEN / "phase_diagram_11x11.csv").read_text()


class TestEvolve:
    def test_initial_row(self):
        rows = records(run("evolve", "0.7", "-0.3", "--times", "0", "--rgrid", "0:5:11"))
        for r in rows:
            rr = float(r["r"])
            assert float(r["u"]) == pytest.approx(1.4 / (1 + rr * rr), abs=1e-12)
            assert float(r["u_t"]) == pytest.approx(-1.2 / (1 + rr * rr) ** 2, abs=1e-12)

    def test_refuses_beyond_blowup(self):
        res = run("evolve", "2", "2", "--times", "0.5")
        assert res.exit_code == 2
        assert "blows up" in res.output
        assert f"{math.tan(math.pi / 8):.6f}"[:6] in res.output

    def test_threshold_origin(self, beta0):
        rows = records(run("evolve", "0", repr(beta0), "--times", "100", "--rgrid", "0:0:1"))
        assert abs(float(rows[0]["u"]) - SQRT2 / 100) <= 1.0 / 1e6

    def test_snapshot_before_blowup(self):
        # M+(T+, r) >= t+ for all r, so a snapshot before t+ is fully in the domain
        rows = records(run("evolve", "1", "1.5", "--times", "-0.5,0.7", "--rgrid", "0:3:31"))
        assert len(rows) == 62
        assert all(r["in_domain"] == "True" for r in rows)
        assert max(abs(float(r["u"])) for r in rows) > 10

    def test_bad_rgrid(self):
        assert run("evolve", "0", "0", "--rgrid", "2:1:3").exit_code == 2


class TestVerify:
    def test_passing_suite(self):
        res = run("verify", "lifespan")
        assert res.exit_code == 0
        assert res.stderr.count("[PASS]") == 4

    def test_failing_suite(self):
        res = run("verify", "attractor")
        assert res.exit_code == 1
        assert "[FAIL]" in res.stderr

    def test_unknown_suite(self):
        assert run("verify", "nope").exit_code == 2

    def test_deterministic(self):
        a = run("--format", "json", "verify", "norms")
        b = run("--format", "json", "verify", "norms")
        assert a.stdout == b.stdout


class TestJson:
    @pytest.mark.parametrize("args", [
        ("classify", "2", "2"),
        ("constants",),
        ("beta-curve", "--grid=-1:1:5"),
        ("phase-diagram", "--grid=-3:3:5", "--curve"),
        ("evolve", "1", "1.5", "--times", "0,0.7", "--rgrid", "0:3:7"),
        ("verify", "lifespan"),
    ])
    def test_schema(self, schema, args):
        res = run("--format", "json", *args)
        assert res.exit_code == 0
        doc = json.loads(res.stdout)
        jsonschema.validate(doc, schema)
        assert doc["meta"]["version"] == __version__
        assert doc["meta"]["command"] == args[0]

    def test_tol_scaling(self):
        doc = json.loads(run("--tol", "0.1", "--format", "json", "classify", "0", "0").stdout)
        assert doc["meta"]["tolerance_scale"] == 0.1
        assert doc["meta"]["config"]["ode_tol"] == pytest.approx(1e-11)

    def test_bad_tol(self):
        assert run("--tol", "0", "classify", "0", "0").exit_code == 2
        assert run("--tol", "-1", "classify", "0", "0").exit_code == 2


def test_version():
    res = run("--version")
    assert __version__ in res.output
