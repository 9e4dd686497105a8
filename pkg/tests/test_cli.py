"""Command-line front end: manifests, report emission, exit codes."""

import json
import subprocess
import sys

import pytest

from cotlift.cli import (
    EXIT_MANIFEST_ERROR,
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
    EXIT_VERIFICATION_FAILED,
    ManifestError,
    load_manifest,
    main,
)

GOOD_MANIFEST = """
[[manifold]]
name = "stretched"
dim = 2
coords = ["x", "y"]
fiber = [-2.0, 2.0]

[manifold.metric]
g11 = "1 + x^2"
g22 = "1"

[manifold.domain]
x = [-1.0, 1.0]
y = [-1.0, 1.0]

[run]
samples = 4
seed = 11
tol = 1e-8
suites = ["theorem"]
"""


@pytest.fixture
def manifest(tmp_path):
    path = tmp_path / "manifest.toml"
    path.write_text(GOOD_MANIFEST)
    return str(path)


class TestCatalog:
    def test_lists_builtins(self, capsys):
        assert main(["catalog"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("flat2", "sphere2", "halfplane2"):
            assert name in out
        assert "dim=2" in out


class TestRun:
    def test_theorem_suite_passes(self, capsys):
        code = main(["run", "--suite", "theorem", "--samples", "4", "--seed", "42",
                     "--tol", "1e-8"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "theorem" in out

    def test_json_format(self, capsys):
        code = main(["run", "--suite", "theorem", "--samples", "2", "--format", "json"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["pass"] is True
        assert {row["manifold"] for row in doc["results"]} == {
            "flat2",
            "sphere2",
            "halfplane2",
        }

    def test_out_file(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code = main(["run", "--suite", "theorem", "--samples", "2",
                     "--format", "json", "--out", str(out_path)])
        assert code == EXIT_OK
        assert capsys.readouterr().out == ""
        doc = json.loads(out_path.read_text())
        assert doc["pass"] is True

    def test_reports_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            code = main(["run", "--suite", "theorem", "--samples", "3",
                         "--seed", "42", "--format", "json", "--out", str(path)])
            assert code == EXIT_OK
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_flipped_curvature_sign_fails_loudly(self, capsys):
        code = main(["run", "--suite", "theorem", "--samples", "3",
                     "--curvature-sign", "-1"])
        assert code == EXIT_VERIFICATION_FAILED
        assert "FAIL" in capsys.readouterr().out

    def test_manifest_adds_manifold(self, manifest, capsys):
        code = main(["run", "--manifest", manifest, "--format", "json"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        manifolds = {row["manifold"] for row in doc["results"]}
        assert "stretched" in manifolds
        assert "sphere2" in manifolds  # catalog always included
        # run defaults picked up from the manifest
        assert doc["meta"]["samples"] == 4
        assert doc["meta"]["seed"] == 11

    def test_flag_overrides_manifest(self, manifest, capsys):
        code = main(["run", "--manifest", manifest, "--samples", "2",
                     "--format", "json"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["meta"]["samples"] == 2


class TestCheck:
    def test_single_property(self, capsys):
        code = main(["check", "symplectic", "--samples", "2"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "symplectic(balanced)" in out

    def test_unknown_property_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["check", "mystery"])


class TestManifestErrors:
    def test_unreadable(self, capsys):
        assert main(["run", "--manifest", "/nonexistent.toml"]) == EXIT_MANIFEST_ERROR
        assert "manifest error" in capsys.readouterr().err

    def test_bad_toml(self, tmp_path, capsys):
        path = tmp_path / "bad.toml"
        path.write_text("this is not toml [")
        assert main(["run", "--manifest", str(path)]) == EXIT_MANIFEST_ERROR

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "extra.toml"
        path.write_text(GOOD_MANIFEST.replace("[run]", "[run]\nworkers = 4"))
        with pytest.raises(ManifestError, match="unknown run keys"):
            load_manifest(str(path))

    def test_unknown_manifold_keys_rejected(self, tmp_path):
        path = tmp_path / "extra.toml"
        path.write_text(GOOD_MANIFEST.replace('dim = 2', 'dim = 2\ncolor = "red"'))
        with pytest.raises(ManifestError, match="unknown manifold keys"):
            load_manifest(str(path))

    def test_dim_coord_mismatch(self, tmp_path):
        path = tmp_path / "dim.toml"
        path.write_text(GOOD_MANIFEST.replace("dim = 2", "dim = 3"))
        with pytest.raises(ManifestError, match="coordinates"):
            load_manifest(str(path))

    def test_bad_metric_key(self, tmp_path):
        path = tmp_path / "key.toml"
        path.write_text(GOOD_MANIFEST.replace('g11 = "1 + x^2"', 'g13 = "1"'))
        with pytest.raises(ManifestError, match="bad metric key"):
            load_manifest(str(path))

    def test_bad_expression(self, tmp_path):
        path = tmp_path / "expr.toml"
        path.write_text(GOOD_MANIFEST.replace('"1 + x^2"', '"1 + z^2"'))
        with pytest.raises(ManifestError, match="stretched"):
            load_manifest(str(path))

    def test_unknown_suite(self, tmp_path):
        path = tmp_path / "suite.toml"
        path.write_text(GOOD_MANIFEST.replace('["theorem"]', '["everything"]'))
        with pytest.raises(ManifestError, match="unknown suites"):
            load_manifest(str(path))


class TestRuntimeErrors:
    def test_non_positive_definite_manifest(self, tmp_path, capsys):
        path = tmp_path / "npd.toml"
        path.write_text(
            GOOD_MANIFEST.replace('g11 = "1 + x^2"', 'g11 = "0 - 1 - x^2"')
        )
        code = main(["run", "--manifest", str(path), "--suite", "theorem",
                     "--samples", "2"])
        assert code == EXIT_RUNTIME_ERROR
        err = capsys.readouterr().err
        assert "runtime error" in err
        assert "last draw" in err  # failing sample point reported

    def test_domain_violation_inside_box(self, tmp_path, capsys):
        # expressions must be total on the declared box; log hits x <= 0 here
        path = tmp_path / "dom.toml"
        path.write_text(GOOD_MANIFEST.replace('g11 = "1 + x^2"', 'g11 = "log(2 + x)"')
                        .replace("x = [-1.0, 1.0]", "x = [-3.0, 1.0]"))
        code = main(["run", "--manifest", str(path), "--suite", "theorem",
                     "--samples", "20"])
        assert code == EXIT_RUNTIME_ERROR
        err = capsys.readouterr().err
        assert "log(2 + x)" in err  # offending subexpression named


class TestConsoleScript:
    def test_installed_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "cotlift.cli", "run", "--suite", "theorem",
             "--samples", "2"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == EXIT_OK, proc.stderr
        assert "PASS" in proc.stdout
