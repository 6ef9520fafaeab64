import json
import math
import subprocess
import sys

import pytest

from fraclap.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_apply_cosine(capsys):
    code, out, _ = run(["apply", "--kind", "cosine", "--n", "1", "--alpha", "1", "--at", "0"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["results"][0]["normalized"] == pytest.approx(1.0, abs=1e-8)
    assert 0 <= d["bounds"][0]["normalized"] < 1e-8


def test_apply_constant_is_exact_zero(capsys):
    code, out, _ = run(["apply", "--kind", "constant", "--value", "5", "--n", "2", "--alpha", "0.7", "--at", "0,0"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["results"][0]["normalized"] == 0.0 and d["bounds"][0]["normalized"] == "exact"


def test_apply_multiple_points_csv(capsys):
    code, out, _ = run(
        ["apply", "--kind", "gaussian", "--n", "1", "--alpha", "1", "--at", "0;1", "--at", "2", "--format", "csv"], capsys
    )
    assert code == 0
    lines = out.strip().split("\r\n")
    assert lines[0] == "x,normalized,unnormalized,normalized_bound,unnormalized_bound" and len(lines) == 4


def test_inline_and_file_specs_agree(tmp_path, capsys):
    spec = {"kind": "gaussian", "params": {"center": [0.2], "sigma": 0.9}}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(spec))
    base = ["apply", "--alpha", "0.6", "--at", "0.1", "--no-timing"]
    c1, o1, _ = run(base + ["--spec", json.dumps(spec)], capsys)
    c2, o2, _ = run(base + ["--spec", str(path)], capsys)
    assert c1 == c2 == 0 and o1 == o2


def test_extend_with_direction(capsys):
    code, out, _ = run(
        ["extend", "--kind", "affine", "--coef", "2", "--intercept", "1", "--n", "1", "--alpha", "1.5", "--at", "0.5",
         "--direction", "1"],
        capsys,
    )
    d = json.loads(out)
    assert code == 0
    assert d["results"][0]["value"] == pytest.approx(2.0, abs=1e-6)
    assert d["results"][0]["derivative"] == pytest.approx(2.0, abs=1e-5)


def test_pizzetti_command(capsys):
    code, out, _ = run(["pizzetti", "--kind", "cosine", "--n", "1", "--alpha", "1"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["verdicts"]["limit_estimate"] == pytest.approx(1.0, rel=0.02)
    assert len(d["results"]) == 6


def test_growth_command(capsys):
    code, out, _ = run(["growth", "--kind", "power", "--exponent", "1", "--coefficient", "-1", "--n", "1", "--alpha", "1.5",
                        "--gamma", "0.5"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["verdicts"]["hypotheses"] == "violated"


def test_verify_all_pass_and_json_round_trip(capsys):
    code, out, _ = run(["verify", "--n", "1", "--alpha", "1.5", "--no-timing"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["verdicts"]["overall"] == "pass"
    assert all(r["verdict"] == "pass" for r in d["results"])
    # serialize-parse-compare
    again = json.loads(json.dumps(d, indent=2))
    assert again == d
    for r, s in zip(d["results"], again["results"]):
        assert math.copysign(1.0, r["residual"]) == math.copysign(1.0, s["residual"])


def test_verify_is_deterministic(capsys, monkeypatch):
    argv = ["verify", "--n", "1", "--alpha", "0.8", "--no-timing", "--seed", "3", "--format", "csv"]
    _, a, _ = run(argv, capsys)
    monkeypatch.setenv("FRACLAP_THREADS", "3")
    _, b, _ = run(argv, capsys)
    assert a == b


def test_timing_reported_by_default(capsys):
    _, out, _ = run(["apply", "--kind", "constant", "--n", "1", "--alpha", "1"], capsys)
    assert json.loads(out)["duration_ms"] >= 0


@pytest.mark.parametrize(
    "argv,field",
    [
        (["apply", "--kind", "cosine", "--n", "1", "--alpha", "2.5"], "alpha"),
        (["apply", "--kind", "cosine", "--n", "1"], "--alpha"),
        (["apply", "--spec", '{"kind": "nope"}', "--alpha", "1"], "kind"),
        (["apply", "--spec", '{"kind": "gaussian", "params": {"sigma": -1}}', "--alpha", "1"], "sigma"),
        (["apply", "--spec", "{not json", "--alpha", "1"], "--spec"),
        (["apply", "--spec", "/nonexistent/spec.json", "--alpha", "1"], "--spec"),
        (["apply", "--kind", "cosine", "--n", "2", "--alpha", "1", "--at", "0"], "--at"),
        (["apply", "--kind", "cosine", "--n", "1", "--alpha", "1", "--at", "x"], "--at"),
        (["apply", "--kind", "gaussian", "--spec", "{}", "--alpha", "1"], "--spec"),
        (["apply", "--kind", "samples", "--n", "1", "--alpha", "1"], "--kind"),
        (["apply", "--kind", "power", "--n", "1", "--alpha", "1"], "--exponent"),
        (["extend", "--kind", "constant", "--n", "1", "--alpha", "1", "--r", "-1"], "radius"),
        (["growth", "--kind", "constant", "--n", "1", "--alpha", "1"], "--gamma"),
        (["verify", "--alpha", "1"], "--n"),
        (["verify", "--n", "1", "--alpha", "1", "--rel-tol", "0"], "tolerance"),
        (["pizzetti", "--kind", "cosine", "--n", "1", "--alpha", "1", "--radii", "0.1,0.2,0.3"], "radii"),
    ],
)
def test_usage_errors_exit_2_and_name_the_field(argv, field, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert field in err
    assert out == ""


def test_argparse_errors_exit_2(capsys):
    assert main(["bogus"]) == 2
    assert main(["apply", "--format", "xml"]) == 2
    assert main([]) == 2


def test_divergence_exits_1_with_partial_report(capsys):
    code, out, err = run(["apply", "--kind", "affine", "--n", "1", "--alpha", "0.5", "--no-timing"], capsys)
    assert code == 1
    d = json.loads(out)
    assert d["results"] == [] and "divergence" in d["error"]
    assert "divergence" in err


def test_numeric_failure_keeps_completed_rows(capsys, monkeypatch):
    import fraclap.cli as cli
    from fraclap.errors import AccuracyError

    real = cli.frac_laplacian_pv
    calls = []

    def flaky(f, x, params, cfg):
        calls.append(x)
        if len(calls) == 2:
            raise AccuracyError("did not converge", 0.0, 1.0)
        return real(f, x, params, cfg)

    monkeypatch.setattr(cli, "frac_laplacian_pv", flaky)
    code, out, _ = run(["apply", "--kind", "gaussian", "--n", "1", "--alpha", "1", "--at", "0;1;2"], capsys)
    d = json.loads(out)
    assert code == 1 and len(d["results"]) == 1 and "AccuracyError" in d["error"]


def test_verify_failure_exits_1(capsys, monkeypatch):
    import fraclap.cli as cli
    from fraclap.verify import Check

    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: [Check("x", 1.0, 0.1, "fail")])
    code, out, _ = run(["verify", "--n", "1", "--alpha", "1"], capsys)
    assert code == 1 and json.loads(out)["verdicts"]["overall"] == "fail"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fraclap.cli", "apply", "--kind", "constant", "--n", "1", "--alpha", "1", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("x,normalized")
