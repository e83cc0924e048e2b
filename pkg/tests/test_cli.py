import io
import json
import subprocess
import sys

import numpy as np
import pytest

from jacobi_cohomology.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, InputError, JobConfig, main
from jacobi_cohomology.cohomology import Cocycle, JacobiContext, PolyVector
from jacobi_cohomology.multiplier import MultiplierSystem


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def delta_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "delta.json"
    code, _ = run("fourier", "--weight", "12", "--spec=-1:1", "--n-max", "20", "-o", str(path))
    assert code == EXIT_OK
    return path


@pytest.fixture
def coboundary_file(tmp_path):
    jctx = JacobiContext(2, 1, MultiplierSystem.eta(1))
    rng = np.random.default_rng(0)
    p = PolyVector(jctx.vv, rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)))
    path = tmp_path / "cob.json"
    path.write_text(json.dumps(Cocycle.coboundary(p).to_json()))
    return path


def test_theta_eval_frozen():
    code, text = run("theta-eval", "--S", "2", "--tau", "1i", "--z", "0")
    assert code == EXIT_OK
    re, im = json.loads(text)["value"]
    assert abs(re - 1.0037348854877) < 1e-12 and abs(im) < 1e-15


def test_bad_input_exit_codes(tmp_path):
    assert run("no-such-command")[0] == EXIT_INPUT
    assert run("theta-eval", "--S", "0", "--tau", "1i", "--z", "0")[0] == EXIT_INPUT
    assert run("theta-eval", "--S", "2", "--tau", "-1i", "--z", "0")[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{\"S\": 1}")
    assert run("coboundary", "--cocycle", str(bad))[0] == EXIT_INPUT
    assert run("coboundary", "--cocycle", str(tmp_path / "missing.json"))[0] == EXIT_INPUT


def test_job_config_validation():
    with pytest.raises(InputError):
        JobConfig("x", {}, C=0)
    with pytest.raises(InputError):
        JobConfig("x", {}, tol=-1)


def test_coboundary_round_trip(coboundary_file):
    code, text = run("coboundary", "--cocycle", str(coboundary_file))
    assert code == EXIT_OK
    rep = json.loads(text)
    assert rep["is_coboundary"] and rep["residual"] < 1e-10
    assert run("cocycle-check", "--cocycle", str(coboundary_file))[0] == EXIT_OK
    assert run("parabolic", "--cocycle", str(coboundary_file))[0] == EXIT_OK


def test_non_coboundary_exit_code(tmp_path):
    jctx = JacobiContext(2, 1, MultiplierSystem.eta(1))
    n = jctx.vv.dim * 3
    path = tmp_path / "c.json"
    c = Cocycle(jctx.vv, np.arange(n, dtype=float), np.ones(n))
    path.write_text(json.dumps(c.to_json()))
    assert run("cocycle-check", "--cocycle", str(path))[0] == EXIT_FAIL


def test_period_command(delta_file):
    code, text = run("period", "--form", str(delta_file))
    assert code == EXIT_OK
    c = np.array([complex(*z) for z in json.loads(text)["polys"][0]])
    assert abs(c[3] / c[1] + 6.25) < 1e-8


def test_plot_data_csv(delta_file):
    code, text = run("plot-data", "--form", str(delta_file), "--start=-0.5+1i", "--end",
                     "0.5+1i", "--points", "5")
    assert code == EXIT_OK
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,component,re,im" and len(lines) == 6
    assert run("plot-data", "--form", str(delta_file), "--start=-1-1i", "--end", "1i")[0] \
        == EXIT_INPUT


def test_output_is_deterministic(delta_file):
    a = run("eichler", "--form", str(delta_file), "--tau", "0.1+1.2i", "--method", "series")
    b = run("eichler", "--form", str(delta_file), "--tau", "0.1+1.2i", "--method", "series")
    assert a == b and a[0] == EXIT_OK


def test_verify_suite_subset():
    code, text = run("verify-suite", "--only", "1,3")
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["passed"] and [c["number"] for c in report["criteria"]] == [1, 3]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jacobi_cohomology.cli", "theta-eval", "--S",
                           "2", "--tau", "1i", "--z", "0"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"][0] == pytest.approx(1.0037348854877, abs=1e-12)
