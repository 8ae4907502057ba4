"""Command-line contract: exit codes, golden reports, config precedence."""

from __future__ import annotations

import hashlib
import json
import os
import subprocess
import sys

import numpy as np
import pytest
from conftest import DISJOINT_A, DISJOINT_B, FIXTURES, rand_features

import repalign.cli as cli
from repalign import write_rafs
from repalign.cli import main as cli_main
from repalign.selfcheck import equivalence_sweep

ALPHA = FIXTURES / "alpha.rafs"
BETA = FIXTURES / "beta.rafs"


def write_csv(path, rows):
    header = ",".join(f"c{i}" for i in range(len(rows[0])))
    body = "\n".join(",".join(f"{v}" for v in row) for row in rows)
    path.write_text(f"{header}\n{body}\n")


class TestGoldenReports:
    def test_pair_report(self, run_cli, tmp_path):
        out = tmp_path / "r.json"
        code, stdout, _ = run_cli(["cknna", str(ALPHA), str(BETA), "--out", str(out)])
        assert code == 0
        assert "cknna value=" in stdout
        assert out.read_bytes() == (FIXTURES / "golden_cknna.json").read_bytes()

    def test_suite_report(self, run_cli, tmp_path):
        out = tmp_path / "se.json"
        manifest = FIXTURES / "se" / "manifest.json"
        code, stdout, _ = run_cli(["se-cknna", str(manifest), "--out", str(out)])
        assert code == 0
        assert "aggregate=" in stdout
        assert out.read_bytes() == (FIXTURES / "golden_se_cknna.json").read_bytes()

    def test_suite_report_csv(self, run_cli, tmp_path):
        out = tmp_path / "se.csv"
        manifest = FIXTURES / "se" / "manifest.json"
        code, _, _ = run_cli(
            ["se-cknna", str(manifest), "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        assert out.read_bytes() == (FIXTURES / "golden_se_cknna.csv").read_bytes()

    def test_profile_report(self, run_cli, tmp_path):
        out = tmp_path / "p.json"
        manifest = FIXTURES / "profile" / "manifest.json"
        code, stdout, _ = run_cli(["layer-profile", str(manifest), "--out", str(out)])
        assert code == 0
        assert "peak_layer=" in stdout
        assert out.read_bytes() == (FIXTURES / "golden_layer_profile.json").read_bytes()

    def test_profile_report_csv(self, run_cli, tmp_path):
        out = tmp_path / "p.csv"
        manifest = FIXTURES / "profile" / "manifest.json"
        code, _, _ = run_cli(
            ["layer-profile", str(manifest), "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        assert out.read_bytes() == (FIXTURES / "golden_layer_profile.csv").read_bytes()


class TestPairCommand:
    def test_self_pair_without_out(self, run_cli):
        code, stdout, stderr = run_cli(["cknna", str(ALPHA), str(ALPHA)])
        assert code == 0
        report = json.loads(stdout)
        assert report["results"]["value"] == pytest.approx(1.0, abs=1e-6)
        assert "cknna value=" in stderr

    def test_missing_file(self, run_cli, tmp_path):
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(tmp_path / "nope.rafs")])
        assert code == 1
        assert "not found" in stderr

    def test_shape_mismatch(self, run_cli, tmp_path):
        short = tmp_path / "short.rafs"
        write_rafs(short, rand_features(1, 8, 10))
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(short)])
        assert code == 1
        assert "error:" in stderr

    def test_degenerate_pair_exits_two(self, run_cli, tmp_path):
        fa = tmp_path / "a.csv"
        fb = tmp_path / "b.csv"
        write_csv(fa, DISJOINT_A.tolist())
        write_csv(fb, DISJOINT_B.tolist())
        code, _, stderr = run_cli(
            ["cknna", str(fa), str(fb), "--k", "1", "--no-normalize", "--outlier", "none"]
        )
        assert code == 2
        assert "(degenerate metric)" in stderr

    def test_k_at_sample_count(self, run_cli):
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(BETA), "--k", "40"])
        assert code == 1
        assert "k=40" in stderr

    def test_seed_flag_does_not_change_report(self, run_cli, tmp_path):
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        run_cli(["cknna", str(ALPHA), str(BETA), "--out", str(out_a)])
        run_cli(["cknna", str(ALPHA), str(BETA), "--seed", "5", "--out", str(out_b)])
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_usage_error_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli_main(["cknna", str(ALPHA)])
        assert exc.value.code == 1
        capsys.readouterr()

    def test_unknown_command_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli_main(["frobnicate"])
        assert exc.value.code == 1
        capsys.readouterr()

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli_main(["--version"])
        assert exc.value.code == 0
        assert "repalign" in capsys.readouterr().out


class TestManifestValidation:
    def test_wrong_manifest_kind(self, run_cli):
        code, _, stderr = run_cli(["layer-profile", str(FIXTURES / "se" / "manifest.json")])
        assert code == 1
        assert "layer_profile manifest" in stderr

    def test_partial_layer_indices(self, run_cli, tmp_path):
        profile_dir = FIXTURES / "profile"
        manifest = {
            "kind": "layer_profile_manifest",
            "reference": str(profile_dir / "ref.rafs"),
            "layers": [
                {"path": str(profile_dir / "layer1.rafs"), "layer_index": 1},
                {"path": str(profile_dir / "layer2.rafs")},
            ],
        }
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest))
        code, _, stderr = run_cli(["layer-profile", str(path)])
        assert code == 1
        assert "layer_index" in stderr


class TestConfig:
    def test_config_file_applies(self, run_cli, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k": 3}))
        out = tmp_path / "r.json"
        code, _, _ = run_cli(
            ["cknna", str(ALPHA), str(BETA), "--config", str(cfg), "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_bytes())["k"] == 3

    def test_flag_beats_config(self, run_cli, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k": 3}))
        out = tmp_path / "r.json"
        code, _, _ = run_cli(
            ["cknna", str(ALPHA), str(BETA), "--config", str(cfg), "--k", "2", "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_bytes())["k"] == 2

    def test_unknown_config_key(self, run_cli, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"neighborhood": 3}))
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(BETA), "--config", str(cfg)])
        assert code == 1
        assert "unknown keys" in stderr

    def test_non_bool_normalize(self, run_cli, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"normalize": "yes"}))
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(BETA), "--config", str(cfg)])
        assert code == 1
        assert "normalize" in stderr

    def test_non_object_config(self, run_cli, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps([1, 2]))
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(BETA), "--config", str(cfg)])
        assert code == 1
        assert "JSON object" in stderr

    def test_invalid_json_config(self, run_cli, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        code, _, stderr = run_cli(["cknna", str(ALPHA), str(BETA), "--config", str(cfg)])
        assert code == 1
        assert "invalid JSON" in stderr


class TestSynth:
    def test_deterministic_and_scoreable(self, run_cli, tmp_path):
        d1 = tmp_path / "one"
        d2 = tmp_path / "two"
        for outdir in (d1, d2):
            code, stdout, _ = run_cli(
                ["synth", "--outdir", str(outdir), "--n", "6", "--d", "8",
                 "--size", "16", "--seed", "9"]
            )
            assert code == 0
            assert "13 condition pairs" in stdout

        files = sorted(p.relative_to(d1) for p in d1.rglob("*") if p.is_file())
        assert len([f for f in files if f.suffix == ".rafs"]) == 26
        assert (d1 / "manifest.json").is_file()
        assert (d1 / "suite.json").is_file()
        for rel in files:
            h1 = hashlib.sha256((d1 / rel).read_bytes()).hexdigest()
            h2 = hashlib.sha256((d2 / rel).read_bytes()).hexdigest()
            assert h1 == h2, f"non-deterministic output {rel}"

        code, stdout, _ = run_cli(
            ["se-cknna", str(d1 / "manifest.json"), "--k", "3",
             "--out", str(tmp_path / "se.json")]
        )
        assert code == 0

    def test_rejects_empty_corpus(self, run_cli, tmp_path):
        code, _, stderr = run_cli(["synth", "--outdir", str(tmp_path / "x"), "--n", "0"])
        assert code == 1
        assert "--n" in stderr


class TestOracleCheck:
    @pytest.fixture
    def short_sweep(self, monkeypatch):
        monkeypatch.setattr(cli, "equivalence_sweep", lambda seed: equivalence_sweep(seed, count=6))

    def test_pass(self, run_cli, short_sweep):
        code, stdout, _ = run_cli(["oracle-check"])
        assert code == 0
        assert "equivalence: PASS" in stdout

    def test_detects_fault(self, run_cli, short_sweep, monkeypatch):
        monkeypatch.setenv("REPALIGN_TEST_PERTURB_CENTERING", "0.001")
        code, stdout, _ = run_cli(["oracle-check"])
        assert code == 3
        assert "equivalence: FAIL" in stdout


class TestBackendSelection:
    def test_numpy_backend_matches_golden(self, tmp_path):
        out = tmp_path / "r.json"
        env = dict(os.environ, REPALIGN_NUMBA="0")
        proc = subprocess.run(
            [sys.executable, "-m", "repalign.cli", "cknna", str(ALPHA), str(BETA),
             "--out", str(out)],
            env=env,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        got = json.loads(out.read_bytes())["results"]["value"]
        want = json.loads((FIXTURES / "golden_cknna.json").read_bytes())["results"]["value"]
        assert got == pytest.approx(want, abs=1e-9)
