import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from sdforms.cli import analyze_curvature, analyze_form, main
from sdforms.curvature import random_curvature
from sdforms.errors import FormError
from sdforms.exterior import KForm
from sdforms.io import (curvature_from_json, curvature_to_json, dumps, form_from_json,
                        form_to_json, load_curvature, load_form, read_json, write_json)
from sdforms.selfdual import Classification, random_skew

FIX = Path(__file__).parent / "fixtures"
FORM_FIXTURES = ["ssd8.json", "generic4.json", "asd4_duplicates.json", "empty6.json"]
CURV_FIXTURES = ["two_pair8.json", "zero_curvature.json"]


def coeff_multiset(form: KForm):
    return sorted(form.terms().items())


@pytest.mark.parametrize("name", FORM_FIXTURES)
def test_form_round_trip(name, tmp_path):
    form = load_form(FIX / name)
    write_json(tmp_path / "out.json", form_to_json(form))
    again = load_form(tmp_path / "out.json")
    assert again.dim == form.dim and coeff_multiset(again) == coeff_multiset(form)
    assert again == form


@pytest.mark.parametrize("name", CURV_FIXTURES)
def test_curvature_round_trip(name, tmp_path):
    F = load_curvature(FIX / name)
    write_json(tmp_path / "out.json", curvature_to_json(F))
    G = load_curvature(tmp_path / "out.json")
    assert (G.dim, G.N) == (F.dim, F.N) and np.array_equal(G.coeffs, F.coeffs)


def test_random_round_trip_is_exact():
    rng = np.random.default_rng(0)
    form = random_skew(10, rng).kform
    assert form_from_json(json.loads(dumps(form_to_json(form)))) == form
    F = random_curvature(8, 5, rng, density=0.5)
    G = curvature_from_json(json.loads(dumps(curvature_to_json(F))))
    assert np.array_equal(F.coeffs, G.coeffs)


def test_duplicates_are_summed():
    form = load_form(FIX / "asd4_duplicates.json")
    assert form.terms() == {(1, 2): 1.0, (3, 4): -1.0}


@pytest.mark.parametrize("name, fragment", [
    ("bad_index.json", "terms"),
    ("not_increasing.json", "strictly increasing"),
    ("malformed.json", "malformed.json:2:"),
])
def test_bad_form_files(name, fragment):
    with pytest.raises(FormError, match=fragment):
        load_form(FIX / name)


def test_bad_pair_file():
    with pytest.raises(FormError, match=r"entries\[0\]"):
        load_curvature(FIX / "bad_pair.json")


@pytest.mark.parametrize("obj", [
    {"dim": 7, "degree": 2, "terms": []},
    {"dim": 8, "degree": 2},
    {"dim": 8, "degree": 2, "terms": [{"i": [1, 2], "c": "x"}]},
    {"dim": 8, "degree": 2, "terms": [{"i": [1, 2], "c": float("nan")}]},
    {"dim": "8", "degree": 2, "terms": []},
])
def test_invalid_form_objects(obj):
    with pytest.raises(FormError):
        form_from_json(obj)


def test_nan_serializes_as_null():
    assert json.loads(dumps({"x": float("nan"), "y": np.float64(1.5)})) == {"x": None, "y": 1.5}


def test_analyze_form_examples():
    result, ok = analyze_form(FIX / "ssd8.json")
    assert ok and result["self_duality"].classification is Classification.STRONGLY_SELF_DUAL
    assert result["trautman"].k_fit == pytest.approx(6.0, abs=1e-12) and result["grossman"]
    result, ok = analyze_form(FIX / "generic4.json")
    assert ok and result["self_duality"].classification is Classification.GENERIC
    assert result["gaps"].g1 == 9.0
    result, ok = analyze_form(FIX / "empty6.json")
    assert result["self_duality"].classification is Classification.ZERO and result["trautman"] is None


def test_analyze_curvature_examples():
    result, ok = analyze_curvature(FIX / "two_pair8.json")
    assert ok and result["invariants"]["sigma4_top"] == 24.0
    eq33 = next(b for b in result["bounds"] if b.name == "eq33")
    assert (eq33.lhs, eq33.rhs) == (24.0, 72.0)
    result, ok = analyze_curvature(FIX / "zero_curvature.json")
    assert ok and all(b.saturated for b in result["bounds"] if b.applicable)


def run_cli(*args):
    return main([str(a) for a in args])


def strip_volatile(path):
    report = json.loads(Path(path).read_text())
    report.pop("timestamp")
    return report


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("verify", "--dim", 6, "--samples", 20, "--seed", 42, "--out", a) == 0
    assert run_cli("verify", "--dim", 6, "--samples", 20, "--seed", 42, "--out", b) == 0
    # everything outside the timestamp block is byte-identical, key order included
    assert dumps(strip_volatile(a)) == dumps(strip_volatile(b))
    c = tmp_path / "c.json"
    run_cli("verify", "--dim", 6, "--samples", 20, "--seed", 43, "--out", c)
    assert strip_volatile(c) != strip_volatile(a)


def test_verify_exit_codes(tmp_path, capsys):
    assert run_cli("verify", "--dim", 8, "--samples", 10, "--seed", 1) == 0
    assert run_cli("verify", "--dim", 8, "--samples", 1, "--tol", 1e-20) == 1
    assert run_cli("verify", "--dim", 7) == 2
    assert run_cli("verify", "--samples", 0) == 2
    assert run_cli("verify", "--suites", "identities,bogus") == 2
    with pytest.raises(SystemExit) as exc:
        run_cli("verify", "--dim", "eight")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run_cli("no-such-command")
    assert exc.value.code == 2


def test_verify_single_suite(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("verify", "--dim", 4, "--samples", 5, "--suites", "identities", "--out", out) == 0
    report = read_json(out)
    assert list(report["suites"]) == ["identities"] and report["passed"]
    assert set(report["timestamp"]["timings"]) == {"identities"}


def test_analyze_form_exit_codes(tmp_path, capsys):
    out = tmp_path / "f.json"
    assert run_cli("analyze-form", FIX / "ssd8.json", "--out", out) == 0
    assert read_json(out)["self_duality"]["classification"] == "strongly_self_dual"
    assert "strongly_self_dual" in capsys.readouterr().out
    assert run_cli("analyze-form", FIX / "bad_index.json") == 2
    assert run_cli("analyze-form", FIX / "malformed.json") == 2
    err = capsys.readouterr().err
    assert "malformed.json:2:" in err
    assert run_cli("analyze-form", tmp_path / "missing.json") == 2


def test_analyze_curvature_exit_codes(tmp_path, capsys):
    assert run_cli("analyze-curvature", FIX / "two_pair8.json") == 0
    assert run_cli("analyze-curvature", FIX / "bad_pair.json") == 2
    assert run_cli("analyze-curvature", FIX / "zero_curvature.json", "--tol", 1e-20) == 0


def test_saturate_so4(tmp_path, capsys):
    out = tmp_path / "so4.json"
    assert run_cli("saturate", "so4", "--dim", 8, "--lambda", 1, "--out", out) == 0
    result, ok = analyze_curvature(out)
    eq33 = next(b for b in result["bounds"] if b.name == "eq33")
    assert ok and eq33.lhs == pytest.approx(216.0, rel=1e-12) and eq33.saturated
    assert run_cli("saturate", "so4", "--dim", 8, "--fiber", 5, "--out", out) == 0
    assert run_cli("saturate", "so4", "--dim", 4, "--out", out) == 2
    assert run_cli("saturate", "so4", "--lambda", -1, "--out", out) == 2


def test_saturate_product(tmp_path, capsys):
    out = tmp_path / "prod.json"
    assert run_cli("saturate", "product", "--dim", 8, "--seed", 3, "--out", out) == 0
    result, _ = analyze_curvature(out)
    second = next(b for b in result["bounds"] if b.name == "eq32_second")
    assert second.saturated


@pytest.mark.parametrize("kind", ["generic", "ssd", "asd", "curvature"])
def test_sample_command(kind, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("sample", "--kind", kind, "--dim", 8, "--seed", 5, "--out", a) == 0
    assert run_cli("sample", "--kind", kind, "--dim", 8, "--seed", 5, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    if kind == "curvature":
        assert load_curvature(a).N == 4
    else:
        expected = {"generic": "generic", "ssd": "strongly_self_dual",
                    "asd": "strongly_anti_self_dual"}[kind]
        assert analyze_form(a)[0]["self_duality"].classification.value == expected


def test_module_entry_point_subprocess(tmp_path):
    cmd = [sys.executable, "-m", "sdforms", "analyze-form", str(FIX / "generic4.json")]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0 and "generic" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "sdforms", "analyze-form",
                           str(FIX / "bad_index.json")], capture_output=True, text=True)
    assert proc.returncode == 2 and "error" in proc.stderr


@pytest.mark.skipif(shutil.which("sdforms") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["sdforms", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sdforms" in proc.stdout
