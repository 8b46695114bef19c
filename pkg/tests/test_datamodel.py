"""Format round-trips and validation behavior of the core types."""

import json
import struct
from datetime import datetime, timedelta

import numpy as np
import pytest

from egosumm.datamodel import (
    EGOF_MAGIC,
    SPEC_VERSION,
    SYNTHETIC_EPOCH,
    Event,
    EventSegmentation,
    DistanceMatrix,
    Photostream,
    Selection,
    SelectionMethod,
    Summary,
    SummaryParameters,
    ValidationError,
    load_ground_truth,
    load_manifest,
    load_summary,
    read_features,
    read_label_csv,
    segmentation_from_labels,
    summary_from_dict,
    summary_to_dict,
    write_features,
    write_label_csv,
    write_manifest,
    write_summary,
)


def make_stream(n=4, d=3, day_id="day", interval=60.0, synthetic=True):
    rng = np.random.default_rng(7)
    return Photostream.build(
        day_id,
        [f"f{i:03d}" for i in range(n)],
        [SYNTHETIC_EPOCH + timedelta(seconds=interval * i) for i in range(n)],
        rng.normal(size=(n, d)),
        synthetic_timestamps=synthetic,
    )


class TestPhotostream:
    def test_build_widens_and_freezes(self):
        stream = make_stream()
        assert stream.feature_matrix.dtype == np.float64
        assert not stream.feature_matrix.flags.writeable
        assert stream.frames[2].features.shape == (3,)
        with pytest.raises(ValueError):
            stream.frames[2].features[0] = 9.0

    def test_frame_views_share_matrix(self):
        stream = make_stream()
        assert np.shares_memory(stream.frames[1].features, stream.feature_matrix)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            Photostream.build("d", [], [], np.zeros((0, 2)))

    def test_nonfinite_named(self):
        feats = np.zeros((2, 2))
        feats[1, 1] = np.nan
        with pytest.raises(ValidationError, match="f001.*component 1"):
            Photostream.build(
                "d",
                ["f000", "f001"],
                [SYNTHETIC_EPOCH, SYNTHETIC_EPOCH],
                feats,
            )

    def test_decreasing_timestamps_rejected(self):
        with pytest.raises(ValidationError, match="decrease"):
            Photostream.build(
                "d",
                ["a", "b"],
                [SYNTHETIC_EPOCH + timedelta(1), SYNTHETIC_EPOCH],
                np.zeros((2, 1)),
            )

    def test_equal_timestamps_keep_order(self):
        stream = Photostream.build(
            "d", ["a", "b"], [SYNTHETIC_EPOCH, SYNTHETIC_EPOCH], np.zeros((2, 1))
        )
        assert [f.frame_id for f in stream.frames] == ["a", "b"]

    def test_mixed_aware_naive_rejected(self):
        from datetime import timezone

        with pytest.raises(ValidationError, match="naive"):
            Photostream.build(
                "d",
                ["a", "b"],
                [SYNTHETIC_EPOCH, datetime(2000, 1, 2, tzinfo=timezone.utc)],
                np.zeros((2, 1)),
            )


class TestEvents:
    def test_event_bounds(self):
        with pytest.raises(ValidationError):
            Event("e", 3, 2)
        assert Event("e", 2, 2).frame_count == 1

    def test_duration(self):
        stream = make_stream(n=5, interval=60.0)
        assert Event("e", 1, 3).duration_seconds(stream) == 120.0
        assert Event("e", 2, 2).duration_seconds(stream) == 0.0

    def test_segmentation_must_tile(self):
        with pytest.raises(ValidationError, match="start at frame 0"):
            EventSegmentation((Event("a", 1, 2),))
        with pytest.raises(ValidationError, match="tile"):
            EventSegmentation((Event("a", 0, 1), Event("b", 3, 4)))
        with pytest.raises(ValidationError, match="unique"):
            EventSegmentation((Event("a", 0, 1), Event("a", 2, 3)))

    def test_labels_roundtrip(self):
        seg = EventSegmentation((Event("x", 0, 1), Event("y", 2, 4)))
        assert seg.labels() == ["x", "x", "y", "y", "y"]
        assert segmentation_from_labels(seg.labels()) == seg

    def test_recurring_label_gets_suffix(self):
        seg = segmentation_from_labels(["a", "b", "a"])
        assert [e.event_id for e in seg.events] == ["a~1", "b", "a~2"]
        assert [(e.start_index, e.end_index) for e in seg.events] == [
            (0, 0),
            (1, 1),
            (2, 2),
        ]


class TestDistanceMatrix:
    def test_valid(self):
        m = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert DistanceMatrix(m).order == 2

    @pytest.mark.parametrize(
        "values,msg",
        [
            (np.array([[0.0, 1.0]]), "square"),
            (np.array([[0.0, -1.0], [-1.0, 0.0]]), "negative"),
            (np.array([[1.0, 1.0], [1.0, 0.0]]), "diagonal"),
            (np.array([[0.0, 1.0], [2.0, 0.0]]), "symmetric"),
            (np.array([[0.0, np.inf], [np.inf, 0.0]]), "finite"),
        ],
    )
    def test_invalid(self, values, msg):
        with pytest.raises(ValidationError, match=msg):
            DistanceMatrix(values)


class TestFeatureSidecar:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "x.egof"
        mat = np.array([[1.5, -2.25], [0.0, 3.0]], dtype=np.float32)
        write_features(path, mat)
        back = read_features(path)
        assert back.dtype == np.float32
        assert np.array_equal(back, mat)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "x.egof"
        write_features(path, np.zeros((2, 3), dtype=np.float32))
        blob = path.read_bytes()
        magic, version, n, d = struct.unpack_from("<4sIII", blob)
        assert (magic, version, n, d) == (EGOF_MAGIC, 1, 2, 3)
        assert len(blob) == 16 + 2 * 3 * 4

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.egof"
        path.write_bytes(b"NOPE" + b"\x00" * 12)
        with pytest.raises(ValidationError, match="magic"):
            read_features(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "x.egof"
        write_features(path, np.zeros((4, 4), dtype=np.float32))
        blob = path.read_bytes()
        path.write_bytes(blob[:-8])
        with pytest.raises(ValidationError, match="expected 80 bytes"):
            read_features(path)


class TestManifest:
    def test_roundtrip(self, tmp_path):
        stream = make_stream(n=3, d=2, synthetic=False)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        back = load_manifest(path)
        assert back.day_id == stream.day_id
        assert [f.frame_id for f in back.frames] == [
            f.frame_id for f in stream.frames
        ]
        assert [f.timestamp for f in back.frames] == [
            f.timestamp for f in stream.frames
        ]
        # float64 -> float32 -> float64 is exact for float32-representable data
        assert np.allclose(back.feature_matrix, stream.feature_matrix, atol=1e-7)

    def test_missing_sidecar_is_io_error(self, tmp_path):
        stream = make_stream(n=2, d=2)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        (tmp_path / "day.egof").unlink()
        with pytest.raises(OSError):
            load_manifest(path)

    def test_sidecar_shape_crosschecked(self, tmp_path):
        stream = make_stream(n=3, d=2)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        write_features(tmp_path / "day.egof", np.zeros((3, 5), dtype=np.float32))
        with pytest.raises(ValidationError, match="dimension"):
            load_manifest(path)
        write_features(tmp_path / "day.egof", np.zeros((2, 2), dtype=np.float32))
        with pytest.raises(ValidationError, match="2 frames"):
            load_manifest(path)

    def test_timestamps_all_or_none(self, tmp_path):
        stream = make_stream(n=2, d=1)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        doc = json.loads(path.read_text())
        del doc["frames"][1]["timestamp"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="all present or all absent"):
            load_manifest(path)

    def test_synthesized_timestamps(self, tmp_path):
        stream = make_stream(n=3, d=1)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        doc = json.loads(path.read_text())
        for frame in doc["frames"]:
            del frame["timestamp"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="interval"):
            load_manifest(path)
        back = load_manifest(path, assume_interval=30.0)
        assert back.synthetic_timestamps
        assert back.frames[2].timestamp == SYNTHETIC_EPOCH + timedelta(seconds=60)

    def test_decreasing_rejected_not_reordered(self, tmp_path):
        stream = make_stream(n=2, d=1)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        doc = json.loads(path.read_text())
        doc["frames"][0]["timestamp"] = "2001-01-01T00:00:00"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="decrease"):
            load_manifest(path)

    def test_zulu_timestamp_accepted(self, tmp_path):
        stream = make_stream(n=2, d=1)
        path = tmp_path / "day.json"
        write_manifest(stream, path)
        doc = json.loads(path.read_text())
        doc["frames"][0]["timestamp"] = "2000-01-01T00:00:00Z"
        doc["frames"][1]["timestamp"] = "2000-01-01T00:01:00Z"
        path.write_text(json.dumps(doc))
        back = load_manifest(path)
        assert back.frames[0].timestamp.tzinfo is not None


class TestLabelCsv:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "labels.csv"
        write_label_csv(path, ["a", "a", "b"])
        assert read_label_csv(path) == ["a", "a", "b"]
        assert path.read_text().startswith("frame_index,event_id\n")

    def test_header_required(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("frame,event\n0,a\n")
        with pytest.raises(ValidationError, match="header"):
            read_label_csv(path)

    def test_duplicate_and_missing(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("frame_index,event_id\n0,a\n0,b\n")
        with pytest.raises(ValidationError, match="duplicate"):
            read_label_csv(path)
        path.write_text("frame_index,event_id\n0,a\n2,b\n")
        with pytest.raises(ValidationError, match="missing frame_index 1"):
            read_label_csv(path)

    def test_unknown_index_with_expected_count(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("frame_index,event_id\n0,a\n1,b\n2,c\n")
        with pytest.raises(ValidationError, match="missing|unknown"):
            read_label_csv(path, n_frames=2)

    def test_ground_truth_must_cover_stream(self, tmp_path):
        stream = make_stream(n=3)
        path = tmp_path / "gt.csv"
        write_label_csv(path, ["a", "b"])
        with pytest.raises(ValidationError):
            load_ground_truth(path, stream)
        write_label_csv(path, ["a", "a", "b"])
        seg = load_ground_truth(path, stream)
        assert len(seg) == 2


class TestSummaryJson:
    def build_summary(self):
        return Summary(
            "day",
            SelectionMethod.MIN_DISTANCE,
            SummaryParameters(seed=3, linkage="average", cutoff=1.154),
            (
                Selection("e000", 0, 1, 1, "f001"),
                Selection("e001", 2, 3, 2, "f002"),
            ),
        )

    def test_roundtrip(self, tmp_path):
        summary = self.build_summary()
        path = tmp_path / "summary.json"
        write_summary(summary, path)
        assert load_summary(path) == summary
        assert json.loads(path.read_text())["spec_version"] == SPEC_VERSION

    def test_extra_keys_tolerated(self):
        doc = summary_to_dict(self.build_summary())
        doc["extra"] = 1
        doc["selections"][0]["note"] = "x"
        assert summary_from_dict(doc) == self.build_summary()

    def test_version_mismatch_rejected(self):
        doc = summary_to_dict(self.build_summary())
        doc["spec_version"] = "9.9.9"
        with pytest.raises(ValidationError, match="spec_version"):
            summary_from_dict(doc)

    def test_keyframe_must_lie_in_event(self):
        with pytest.raises(ValidationError, match="outside"):
            Summary(
                "day",
                SelectionMethod.RANDOM,
                SummaryParameters(),
                (Selection("e", 0, 2, 5, "f"),),
            )

    def test_selections_temporally_ordered(self):
        with pytest.raises(ValidationError, match="temporal"):
            Summary(
                "day",
                SelectionMethod.RANDOM,
                SummaryParameters(),
                (
                    Selection("b", 2, 3, 2, "f2"),
                    Selection("a", 0, 1, 0, "f0"),
                ),
            )
