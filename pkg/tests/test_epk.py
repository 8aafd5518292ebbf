import struct

import numpy as np
import pytest

from emopack.epk import FeatureFile, MemberRecord, frame_targets, read_epk, write_epk
from emopack.errors import DataError


def sample_file():
    rng = np.random.default_rng(0)
    return FeatureFile(
        values=rng.normal(-1.0, 0.3, (80, 12)).astype(np.float32),
        total_duration_s=1.875,
        members=[
            MemberRecord(
                id="utt-0001",
                start_s=0.0,
                dur_s=1.0,
                emotion=np.linspace(0, 1, 8).astype(np.float32),
                domain_id=3,
            ),
            MemberRecord(
                id="uttérance-β",  # non-ASCII id exercises UTF-8 length handling
                start_s=1.0,
                dur_s=0.875,
                emotion=np.zeros(8, dtype=np.float32),
                domain_id=0,
            ),
        ],
    )


class TestRoundTrip:
    def test_full_roundtrip(self, tmp_path):
        original = sample_file()
        path = tmp_path / "x.epk"
        write_epk(path, original)
        loaded = read_epk(path)
        np.testing.assert_array_equal(loaded.values, original.values)
        assert loaded.total_duration_s == pytest.approx(1.875)
        assert len(loaded.members) == 2
        for got, want in zip(loaded.members, original.members):
            assert got.id == want.id
            assert got.start_s == pytest.approx(want.start_s)
            assert got.dur_s == pytest.approx(want.dur_s)
            assert got.domain_id == want.domain_id
            np.testing.assert_array_equal(got.emotion, want.emotion)

    def test_header_layout_bit_exact(self, tmp_path):
        f = FeatureFile(
            values=np.zeros((2, 3), dtype=np.float32),
            total_duration_s=0.5,
            members=[],
        )
        path = tmp_path / "h.epk"
        write_epk(path, f)
        raw = path.read_bytes()
        assert raw[:4] == b"EPK1"
        version, n_mels, n_frames, n_members = struct.unpack_from("<IIII", raw, 4)
        assert (version, n_mels, n_frames, n_members) == (1, 2, 3, 0)
        (duration,) = struct.unpack_from("<f", raw, 20)
        assert duration == 0.5
        assert len(raw) == 24 + 4 * 6

    def test_values_row_major_little_endian(self, tmp_path):
        values = np.arange(6, dtype=np.float32).reshape(2, 3)
        path = tmp_path / "v.epk"
        write_epk(path, FeatureFile(values=values, total_duration_s=0.0, members=[]))
        raw = path.read_bytes()[24:]
        decoded = np.frombuffer(raw, dtype="<f4")
        np.testing.assert_array_equal(decoded, [0, 1, 2, 3, 4, 5])

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.epk"
        path.write_bytes(b"NOPE" + b"\x00" * 40)
        with pytest.raises(DataError, match="magic"):
            read_epk(path)

    def test_trailing_bytes_rejected(self, tmp_path):
        path = tmp_path / "t.epk"
        write_epk(path, FeatureFile(values=np.zeros((1, 1), dtype=np.float32),
                                    total_duration_s=0.0, members=[]))
        with open(path, "ab") as fh:
            fh.write(b"junk")
        with pytest.raises(DataError, match="trailing"):
            read_epk(path)


class TestFrameTargets:
    def test_tiles_member_spans_and_masks_padding(self):
        emotion_a = np.zeros(8, dtype=np.float32)
        emotion_a[0] = 1.0
        emotion_b = np.zeros(8, dtype=np.float32)
        emotion_b[5] = 0.5
        f = FeatureFile(
            values=np.zeros((80, 100), dtype=np.float32),
            total_duration_s=0.7,
            members=[
                MemberRecord(id="a", start_s=0.0, dur_s=0.30, emotion=emotion_a, domain_id=0),
                MemberRecord(id="b", start_s=0.30, dur_s=0.40, emotion=emotion_b, domain_id=1),
            ],
        )
        targets, mask = frame_targets(f)
        assert targets.shape == (8, 100)
        np.testing.assert_array_equal(targets[:, :30], np.tile(emotion_a[:, None], 30))
        np.testing.assert_array_equal(targets[:, 30:70], np.tile(emotion_b[:, None], 40))
        # padding frames carry no target mass and are masked out
        np.testing.assert_array_equal(targets[:, 70:], 0.0)
        assert mask[:70].all()
        assert not mask[70:].any()
