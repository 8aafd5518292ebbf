import json
from pathlib import Path

import numpy as np
import pytest

from emopack.audio import Waveform
from emopack.errors import DataError
from emopack.features import (
    FRAMES_PER_CONTEXT,
    SpecAugmentConfig,
    log_mel_spectrogram,
    mel_filterbank,
    pad_or_trim,
    roll_waveform,
    spec_augment,
)
from emopack.fixtures import synthesize
from emopack.epk import read_epk
from emopack.rng import derive_rng

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "goldens"


def wave(samples, rate=16000):
    return Waveform(samples=np.asarray(samples, dtype=np.float64), sample_rate_hz=rate)


def golden_index():
    with open(GOLDEN_DIR / "index.json", encoding="utf-8") as fh:
        return json.load(fh)


class TestLogMel:
    def test_thirty_seconds_is_3000_frames(self):
        mel = log_mel_spectrogram(wave(np.zeros(480000)))
        assert mel.values.shape == (80, FRAMES_PER_CONTEXT) == (80, 3000)

    def test_silence_is_exactly_minus_1_5(self):
        mel = log_mel_spectrogram(wave(np.zeros(16000)))
        np.testing.assert_array_equal(mel.values, np.full((80, 100), -1.5, dtype=np.float32))

    def test_frame_count_is_floor_len_over_hop(self):
        for n in (400, 999, 16000, 16159, 16160):
            mel = log_mel_spectrogram(wave(np.random.default_rng(0).uniform(-0.1, 0.1, n)))
            assert mel.values.shape[1] == n // 160

    def test_dynamic_range_bounded(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            mel = log_mel_spectrogram(wave(rng.uniform(-1, 1, 8000)))
            values = mel.values
            assert values.max() - values.min() <= 2.0 + 1e-6
            assert np.all(np.isfinite(values))

    def test_wrong_sample_rate_rejected(self):
        with pytest.raises(DataError, match="16000"):
            log_mel_spectrogram(wave(np.zeros(8000), rate=8000))

    def test_too_short_rejected(self):
        with pytest.raises(DataError, match="short"):
            log_mel_spectrogram(wave(np.zeros(150)))

    def test_filterbank_rows_cover_spectrum(self):
        fb = mel_filterbank()
        assert fb.shape == (80, 201)
        assert np.all(fb >= 0)
        assert np.all(fb.sum(axis=1) > 0)

    def test_golden_parity_all_fixtures(self):
        index = golden_index()
        assert index["n_fixtures"] == 25
        worst = 0.0
        for entry in index["fixtures"]:
            golden = read_epk(GOLDEN_DIR / entry["file"])
            mel = log_mel_spectrogram(synthesize(entry["recipe"]))
            assert mel.values.shape == tuple(entry["shape"]), entry["name"]
            diff = float(np.max(np.abs(mel.values.astype(np.float64) - golden.values.astype(np.float64))))
            worst = max(worst, diff)
            assert diff <= 1e-4, f"{entry['name']}: {diff}"
        assert worst <= 1e-4


class TestPadOrTrim:
    def test_exact_length_unchanged(self):
        w = wave(np.random.default_rng(1).uniform(-1, 1, 480000))
        out, frames = pad_or_trim(w)
        np.testing.assert_array_equal(out.samples, w.samples)
        assert frames == 3000

    def test_short_input_zero_padded(self):
        w = wave(np.ones(160000))
        out, frames = pad_or_trim(w)
        assert len(out.samples) == 480000
        np.testing.assert_array_equal(out.samples[:160000], 1.0)
        np.testing.assert_array_equal(out.samples[160000:], 0.0)
        assert frames == 1000

    def test_long_input_truncated(self):
        w = wave(np.arange(496000, dtype=np.float64))
        out, frames = pad_or_trim(w)
        assert len(out.samples) == 480000
        assert out.samples[-1] == 479999.0
        assert frames == 3000


class TestRoll:
    def test_zero_shift_identity(self):
        w = wave([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(roll_waveform(w, 0).samples, w.samples)

    def test_full_cycle_identity(self):
        w = wave([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(roll_waveform(w, 4).samples, w.samples)

    def test_shift_one(self):
        w = wave([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(roll_waveform(w, 1).samples, [4.0, 1.0, 2.0, 3.0])

    def test_group_action(self):
        w = wave(np.random.default_rng(3).uniform(-1, 1, 50))
        a = roll_waveform(roll_waveform(w, 13), 21)
        b = roll_waveform(w, (13 + 21) % 50)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_out_of_range_rejected(self):
        with pytest.raises(DataError):
            roll_waveform(wave([1.0, 2.0]), 3)


class TestSpecAugment:
    def base_mel(self, seed=0, frames=200):
        w = wave(np.random.default_rng(seed).uniform(-0.5, 0.5, frames * 160))
        return log_mel_spectrogram(w)

    def test_zero_probability_identity(self):
        mel = self.base_mel()
        cfg = SpecAugmentConfig(p_freq_mask=0, p_time_mask=0, p_noise=0, p_roll=0)
        out = spec_augment(mel, cfg, derive_rng(0, "sa"))
        np.testing.assert_array_equal(out.values, mel.values)

    def test_freq_mask_rows_equal_premask_mean(self):
        mel = self.base_mel()
        fill = float(mel.values.mean())
        cfg = SpecAugmentConfig(n_freq_masks=1, max_freq_width=10, p_freq_mask=1.0,
                                p_time_mask=0, p_noise=0)
        out = spec_augment(mel, cfg, derive_rng(1, "sa"))
        masked_rows = [i for i in range(80) if np.all(out.values[i] == np.float32(fill))]
        changed = np.any(out.values != mel.values, axis=1)
        for i in np.flatnonzero(changed):
            assert i in masked_rows
        if masked_rows:
            # masked rows are contiguous
            assert masked_rows == list(range(masked_rows[0], masked_rows[-1] + 1))

    def test_masked_fraction_matches_expectation(self):
        mel = self.base_mel(seed=2)
        max_width = 20
        cfg = SpecAugmentConfig(n_freq_masks=1, max_freq_width=max_width, p_freq_mask=1.0,
                                p_time_mask=0, p_noise=0)
        total_masked = 0
        trials = 3000
        for k in range(trials):
            out = spec_augment(mel, cfg, derive_rng(k, "mc"))
            total_masked += int(np.sum(np.all(out.values != mel.values, axis=1)))
        observed = total_masked / trials
        assert observed == pytest.approx(max_width / 2, rel=0.05)

    def test_noise_infusion_changes_everything(self):
        mel = self.base_mel(seed=3)
        cfg = SpecAugmentConfig(p_freq_mask=0, p_time_mask=0, p_noise=1.0, noise_std=0.05)
        out = spec_augment(mel, cfg, derive_rng(5, "noise"))
        delta = out.values - mel.values
        assert np.std(delta) == pytest.approx(0.05, rel=0.05)

    def test_shape_and_finiteness_preserved(self):
        mel = self.base_mel(seed=4)
        cfg = SpecAugmentConfig(p_freq_mask=1, p_time_mask=1, p_noise=1)
        for k in range(10):
            out = spec_augment(mel, cfg, derive_rng(k, "shape"))
            assert out.values.shape == mel.values.shape
            assert np.all(np.isfinite(out.values))

    def test_deterministic_under_seed(self):
        mel = self.base_mel(seed=6)
        cfg = SpecAugmentConfig(p_freq_mask=1, p_time_mask=1, p_noise=1)
        a = spec_augment(mel, cfg, derive_rng(11, "det"))
        b = spec_augment(mel, cfg, derive_rng(11, "det"))
        np.testing.assert_array_equal(a.values, b.values)
