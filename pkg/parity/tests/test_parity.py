"""Golden regeneration and cross-implementation parity checks.

The pipeline under test is exercised only through its public surfaces:
the `emopack golden-check --emit` CLI and the EPK1 file layout.
"""

import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from melparity.compare import compare_dirs
from melparity.epkio import read_values, write_fixture
from melparity.generate import generate_goldens, sha256_of
from melparity.recipes import FIXTURES, synthesize

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
GOLDEN_DIR = REPO_ROOT / "goldens"


@pytest.fixture(scope="module")
def regenerated(tmp_path_factory):
    out = tmp_path_factory.mktemp("regen")
    index = generate_goldens(out)
    return out, index


def committed_index():
    with open(GOLDEN_DIR / "index.json", encoding="utf-8") as fh:
        return json.load(fh)


class TestFixtures:
    def test_twenty_five_fixtures(self):
        assert len(FIXTURES) == 25
        assert len({f["name"] for f in FIXTURES}) == 25

    def test_synthesis_deterministic(self):
        for fixture in FIXTURES[:5]:
            a = synthesize(fixture["recipe"])
            b = synthesize(fixture["recipe"])
            np.testing.assert_array_equal(a, b)

    def test_waveforms_are_float32_and_bounded(self):
        for fixture in FIXTURES:
            w = synthesize(fixture["recipe"])
            assert w.dtype == np.float32
            assert np.all(np.isfinite(w))
            assert np.max(np.abs(w)) <= 1.0


class TestRegeneration:
    def test_checksums_match_committed_goldens(self, regenerated):
        out, index = regenerated
        committed = committed_index()
        by_name = {e["name"]: e for e in committed["fixtures"]}
        assert len(index["fixtures"]) == len(committed["fixtures"]) == 25
        for entry in index["fixtures"]:
            want = by_name[entry["name"]]
            assert entry["checksum_sha256"] == want["checksum_sha256"], entry["name"]
            assert sha256_of(out / entry["file"]) == sha256_of(GOLDEN_DIR / want["file"])

    def test_silence_goldens_constant(self):
        values = read_values(GOLDEN_DIR / "silence_30s.epk")
        assert values.shape == (80, 3000)
        np.testing.assert_array_equal(values, np.full((80, 3000), -1.5, dtype=np.float32))

    def test_thirty_second_fixture_shape(self):
        assert read_values(GOLDEN_DIR / "chirp_lin_full.epk").shape == (80, 3000)


class TestCompare:
    def test_goldens_match_themselves(self):
        report = compare_dirs(GOLDEN_DIR, GOLDEN_DIR)
        assert report["all_pass"]
        assert all(r["max_abs_diff"] == 0.0 for r in report["fixtures"])

    def test_perturbation_detected(self, tmp_path):
        perturbed = tmp_path / "perturbed"
        shutil.copytree(GOLDEN_DIR, perturbed)
        name = "tone_440.epk"
        values = read_values(perturbed / name)
        values[0, 0] += 1e-3
        write_fixture(perturbed / name, values, 2.0)
        report = compare_dirs(perturbed, GOLDEN_DIR)
        assert not report["all_pass"]
        failed = [r for r in report["fixtures"] if r["status"] == "fail"]
        assert [r["name"] for r in failed] == ["tone_440"]

    def test_missing_file_reported(self, tmp_path):
        partial = tmp_path / "partial"
        partial.mkdir()
        report = compare_dirs(partial, GOLDEN_DIR)
        assert not report["all_pass"]
        assert all(r["status"] == "missing" for r in report["fixtures"])


class TestPrimaryParity:
    def test_primary_features_match_reference(self, tmp_path):
        emitted = tmp_path / "primary"
        result = subprocess.run(
            ["emopack", "golden-check", "--goldens", str(GOLDEN_DIR), "--emit", str(emitted)],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        report = compare_dirs(emitted, GOLDEN_DIR)
        assert report["all_pass"], [r for r in report["fixtures"] if r["status"] != "pass"]
        worst = max(r["max_abs_diff"] for r in report["fixtures"])
        assert worst <= 1e-4
