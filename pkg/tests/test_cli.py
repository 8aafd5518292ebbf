import json
from pathlib import Path

import numpy as np
import pytest

from emopack.audio import Waveform, read_wav, write_wav
from emopack.cli import main
from emopack.config import load_config
from emopack.errors import ConfigError


def write_json(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
    return str(path)


class TestConfig:
    def test_set_overrides_nested_keys(self, tmp_path):
        path = write_json(tmp_path / "c.json", {"seed": 1, "augment": {"p_gain": 0.3}})
        cfg = load_config(path, ["seed=9", "augment.p_gain=0.5", "out_dir=somewhere"])
        assert cfg.seed == 9
        assert cfg.augment.p_gain == 0.5
        assert cfg.out_dir == "somewhere"

    def test_unknown_key_rejected(self, tmp_path):
        path = write_json(tmp_path / "c.json", {"sneed": 1})
        with pytest.raises(ConfigError, match="sneed"):
            load_config(path)

    def test_missing_file_rejected(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("/nonexistent/config.json")

    def test_validate_checks_fractions(self):
        cfg = load_config(None, ["train_fraction=1.5"])
        with pytest.raises(ConfigError, match="train_fraction"):
            cfg.validate()


class TestCliStages:
    def test_harmonize_smooth_pack_chain(self, fixture_corpus, capsys):
        root = fixture_corpus["dir"]
        out1 = root / "stage1"
        rc = main(["harmonize", "--set", f'manifests=["{fixture_corpus["manifest"]}"]',
                   "--out", str(out1)])
        assert rc == 0
        harmonized = out1 / "harmonized.jsonl"
        assert harmonized.is_file()
        assert (out1 / "domains.json").is_file()

        out2 = root / "stage2"
        rc = main(["smooth", str(harmonized), "--out", str(out2)])
        assert rc == 0
        assert (out2 / "smoothed.jsonl").is_file()
        assert (out2 / "smoothing_means.json").is_file()

        out3 = root / "stage3"
        rc = main(["pack", str(out2 / "smoothed.jsonl"), "--out", str(out3),
                   "--count", "3", "--set", "context_s=6.0", "--seed", "5"])
        assert rc == 0
        with open(out3 / "sequences.jsonl") as fh:
            lines = [json.loads(x) for x in fh]
        assert len(lines) == 3
        for line in lines:
            assert 0.8 * 6.0 <= line["total_duration_s"] <= 6.0

    def test_featurize_writes_epk(self, tmp_path, capsys):
        tone = 0.4 * np.sin(2 * np.pi * 440 * np.arange(16000) / 16000)
        wav = tmp_path / "t.wav"
        write_wav(wav, Waveform(samples=tone, sample_rate_hz=16000))
        rc = main(["featurize", str(wav), "--out", str(tmp_path / "feat")])
        assert rc == 0
        assert (tmp_path / "feat" / "t.epk").is_file()

    def test_augment_roundtrip(self, tmp_path):
        tone = 0.4 * np.sin(2 * np.pi * 440 * np.arange(8000) / 16000)
        wav_in = tmp_path / "in.wav"
        wav_out = tmp_path / "out.wav"
        write_wav(wav_in, Waveform(samples=tone, sample_rate_hz=16000))
        rc = main(["augment", str(wav_in), str(wav_out), "--seed", "3", "--id", "x"])
        assert rc == 0
        out = read_wav(wav_out)
        assert len(out.samples) >= 1

    def test_eval_reports_metrics_and_figure(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        pred_path = tmp_path / "preds.jsonl"
        with open(pred_path, "w") as fh:
            for _ in range(30):
                target = rng.uniform(0, 1, 8)
                logits = np.log(target / target.sum() + 1e-9) + rng.normal(0, 0.01, 8)
                fh.write(json.dumps({"logits": logits.tolist(), "target": target.tolist()}) + "\n")
        rc = main(["eval", str(pred_path), "--out", str(tmp_path / "ev"), "--pearson"])
        assert rc == 0
        with open(tmp_path / "ev" / "metrics.json") as fh:
            metrics = json.load(fh)
        assert metrics["n"] == 30
        assert metrics["micro_f1"] > 0.9  # logits track targets by construction
        assert (tmp_path / "ev" / "per_class_f1.png").is_file()

    def test_eval_respects_ban_and_priors(self, tmp_path):
        pred_path = tmp_path / "p.jsonl"
        # raw argmax would be class 0; config bans it
        with open(pred_path, "w") as fh:
            fh.write(json.dumps({"logits": [5, 1, 0, 0, 0, 0, 0, 0],
                                 "target": [0, 1, 0, 0, 0, 0, 0, 0]}) + "\n")
        eval_cfg = write_json(tmp_path / "e.json", {
            "allowed": ["sadness", "anger"],
            "priors": [0.125] * 8,
            "tau": 1.0,
        })
        rc = main(["eval", str(pred_path), "--eval-config", eval_cfg, "--out", str(tmp_path / "ev2")])
        assert rc == 0
        with open(tmp_path / "ev2" / "metrics.json") as fh:
            metrics = json.load(fh)
        assert metrics["micro_f1"] == 1.0

    def test_toy_train_writes_trace_and_figure(self, tmp_path, capsys):
        rc = main(["toy-train", "--epochs", "30", "--n", "150",
                   "--out", str(tmp_path / "toy"), "--seed", "1"])
        assert rc == 0
        trace = (tmp_path / "toy" / "trace.csv").read_text().splitlines()
        assert trace[0] == "epoch,emo_acc,dom_acc,ce_emo,ce_dom,total"
        assert len(trace) == 31
        assert (tmp_path / "toy" / "trace.png").is_file()

    def test_golden_check_passes(self, capsys):
        goldens = Path(__file__).resolve().parent.parent / "goldens"
        rc = main(["golden-check", "--goldens", str(goldens)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "all 25 golden fixtures match" in out


class TestExitCodes:
    def test_config_error_is_2(self, capsys):
        rc = main(["run", "--config", "/nonexistent.json"])
        assert rc == 2

    def test_data_error_is_3(self, tmp_path, capsys):
        manifest = tmp_path / "m.jsonl"
        manifest.write_text('{"id": "a"}\n')
        rc = main(["harmonize", "--set", f'manifests=["{manifest}"]', "--out", str(tmp_path / "o")])
        assert rc == 3

    def test_invariant_error_is_4(self, tmp_path, capsys):
        # corrupt one golden value so the parity check trips
        goldens = Path(__file__).resolve().parent.parent / "goldens"
        import shutil

        broken = tmp_path / "goldens"
        shutil.copytree(goldens, broken)
        path = broken / "tone_440.epk"
        raw = bytearray(path.read_bytes())
        raw[24:28] = np.float32(9.9).tobytes()
        path.write_bytes(bytes(raw))
        rc = main(["golden-check", "--goldens", str(broken)])
        assert rc == 4

    def test_run_without_manifests_is_3(self, tmp_path, capsys):
        rc = main(["run", "--out", str(tmp_path / "o")])
        assert rc == 3
