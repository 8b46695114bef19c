"""Core domain types and file formats for day-long photostream summarization.

A day is a manifest (JSON metadata) plus a binary feature sidecar; event
segmentations travel as per-frame CSV labels; summaries as JSON. Every
writer/reader pair here is an identity on valid values.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np

SPEC_VERSION = "1.0.0"

EGOF_MAGIC = b"EGOF"
EGOF_VERSION = 1
_EGOF_HEADER = struct.Struct("<4sIII")

# Epoch used when timestamps are synthesized from a fixed frame interval.
SYNTHETIC_EPOCH = datetime(2000, 1, 1, 0, 0, 0)


class ValidationError(ValueError):
    """Input data violates a documented invariant or format contract."""


class SelectionMethod(str, Enum):
    """Keyframe selection strategies a summary can record."""

    RANDOM_WALK = "random_walk"
    MIN_DISTANCE = "min_distance"
    RANDOM = "random"
    UNIFORM = "uniform"

    @classmethod
    def coerce(cls, value: "SelectionMethod | str") -> "SelectionMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown selection method {value!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None


def _parse_timestamp(raw: str, context: str) -> datetime:
    if not isinstance(raw, str):
        raise ValidationError(f"{context}: timestamp must be an ISO-8601 string")
    text = raw.strip()
    if text.endswith(("Z", "z")):  # fromisoformat rejects Z before 3.11
        text = text[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValidationError(f"{context}: bad timestamp {raw!r}: {exc}") from None


def _format_timestamp(ts: datetime) -> str:
    return ts.isoformat()


@dataclass(frozen=True, eq=False)
class FrameDescriptor:
    """One photostream frame: identity, capture time, and feature vector."""

    frame_index: int
    frame_id: str
    timestamp: datetime
    features: np.ndarray  # 1-D float64 view, read-only


@dataclass(frozen=True, eq=False)
class Photostream:
    """Ordered frames of one day sharing a common feature dimension."""

    day_id: str
    frames: tuple[FrameDescriptor, ...]
    dimension: int
    synthetic_timestamps: bool = False

    def __post_init__(self) -> None:
        if not self.frames:
            raise ValidationError("photostream must contain at least one frame")
        prev = None
        for pos, frame in enumerate(self.frames):
            if frame.frame_index != pos:
                raise ValidationError(
                    f"frame {frame.frame_id!r}: frame_index {frame.frame_index} "
                    f"does not match position {pos}"
                )
            if frame.features.shape != (self.dimension,):
                raise ValidationError(
                    f"frame {frame.frame_id!r}: feature length "
                    f"{frame.features.shape[0] if frame.features.ndim == 1 else frame.features.shape} "
                    f"!= dimension {self.dimension}"
                )
            if prev is not None:
                try:
                    decreased = frame.timestamp < prev.timestamp
                except TypeError:
                    raise ValidationError(
                        f"timestamps mix offset-aware and offset-naive values "
                        f"around frame {frame.frame_id!r}"
                    ) from None
                if decreased:
                    raise ValidationError(
                        f"timestamps decrease between {prev.frame_id!r} "
                        f"and {frame.frame_id!r}"
                    )
            prev = frame

    @classmethod
    def build(
        cls,
        day_id: str,
        frame_ids: list[str] | tuple[str, ...],
        timestamps: list[datetime] | tuple[datetime, ...],
        features: np.ndarray,
        synthetic_timestamps: bool = False,
    ) -> "Photostream":
        """Assemble a stream from parallel arrays, validating finiteness.

        ``features`` is (N, D); it is widened to float64 and frozen, and
        each frame descriptor holds a read-only row view.
        """
        matrix = np.ascontiguousarray(features, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValidationError("feature array must be 2-D (frames x components)")
        n, d = matrix.shape
        if not (len(frame_ids) == len(timestamps) == n):
            raise ValidationError(
                f"inconsistent lengths: {len(frame_ids)} ids, "
                f"{len(timestamps)} timestamps, {n} feature rows"
            )
        bad = np.argwhere(~np.isfinite(matrix))
        if bad.size:
            i, k = bad[0]
            raise ValidationError(
                f"non-finite feature value at frame {frame_ids[i]!r} component {k}"
            )
        matrix.flags.writeable = False
        frames = tuple(
            FrameDescriptor(pos, str(frame_ids[pos]), timestamps[pos], matrix[pos])
            for pos in range(n)
        )
        stream = cls(day_id, frames, d, synthetic_timestamps)
        stream.__dict__["feature_matrix"] = matrix
        return stream

    def __len__(self) -> int:
        return len(self.frames)

    @cached_property
    def feature_matrix(self) -> np.ndarray:
        """All features stacked as a read-only (N, D) float64 matrix."""
        matrix = np.stack([f.features for f in self.frames]).astype(np.float64)
        matrix.flags.writeable = False
        return matrix

    @cached_property
    def timestamps(self) -> tuple[datetime, ...]:
        return tuple(f.timestamp for f in self.frames)


@dataclass(frozen=True)
class Event:
    """A temporally contiguous run of frames, inclusive on both ends."""

    event_id: str
    start_index: int
    end_index: int

    def __post_init__(self) -> None:
        if self.end_index < self.start_index:
            raise ValidationError(
                f"event {self.event_id!r}: end {self.end_index} < start {self.start_index}"
            )

    @property
    def frame_count(self) -> int:
        return self.end_index - self.start_index + 1

    def duration_seconds(self, stream: Photostream) -> float:
        """Span from first to last frame timestamp, in seconds."""
        first = stream.frames[self.start_index].timestamp
        last = stream.frames[self.end_index].timestamp
        return (last - first).total_seconds()


@dataclass(frozen=True)
class EventSegmentation:
    """Partition of the frame range into contiguous, non-overlapping events."""

    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        if not self.events:
            raise ValidationError("segmentation must contain at least one event")
        if self.events[0].start_index != 0:
            raise ValidationError("first event must start at frame 0")
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.start_index != prev.end_index + 1:
                raise ValidationError(
                    f"events {prev.event_id!r} and {cur.event_id!r} do not tile: "
                    f"{prev.end_index} then {cur.start_index}"
                )
        ids = [e.event_id for e in self.events]
        if len(set(ids)) != len(ids):
            raise ValidationError("event ids must be unique")

    @property
    def n_frames(self) -> int:
        return self.events[-1].end_index + 1

    def __len__(self) -> int:
        return len(self.events)

    def labels(self) -> list[str]:
        """Per-frame event id, one entry per frame."""
        out: list[str] = []
        for event in self.events:
            out.extend([event.event_id] * event.frame_count)
        return out

    def durations(self, stream: Photostream) -> list[float]:
        return [e.duration_seconds(stream) for e in self.events]


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise frame distances with a zero diagonal."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValidationError("distance matrix must be square")
        if not np.all(np.isfinite(v)):
            raise ValidationError("distance matrix contains non-finite entries")
        if np.any(v < 0):
            raise ValidationError("distance matrix contains negative entries")
        if np.any(np.diagonal(v) != 0):
            raise ValidationError("distance matrix diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValidationError("distance matrix must be symmetric")

    @property
    def order(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class SummaryParameters:
    """Pipeline settings recorded with a summary for reproducibility."""

    seed: int = 0
    linkage: str | None = None
    cutoff: float | None = None
    min_event_duration: float | None = None


@dataclass(frozen=True)
class Selection:
    """One chosen keyframe together with the event it represents."""

    event_id: str
    event_start_index: int
    event_end_index: int
    frame_index: int
    frame_id: str


@dataclass(frozen=True)
class Summary:
    """Per-event keyframe choices plus the provenance needed to redo them."""

    day_id: str
    method: SelectionMethod
    parameters: SummaryParameters
    selections: tuple[Selection, ...]

    def __post_init__(self) -> None:
        if not self.selections:
            raise ValidationError("summary must contain at least one selection")
        ids = [s.event_id for s in self.selections]
        if len(set(ids)) != len(ids):
            raise ValidationError("summary has multiple selections for one event")
        for sel in self.selections:
            if not sel.event_start_index <= sel.frame_index <= sel.event_end_index:
                raise ValidationError(
                    f"selection for event {sel.event_id!r}: keyframe {sel.frame_index} "
                    f"outside [{sel.event_start_index}, {sel.event_end_index}]"
                )
        starts = [s.event_start_index for s in self.selections]
        if starts != sorted(starts):
            raise ValidationError("selections must be in temporal order")


# ---------------------------------------------------------------------------
# Feature sidecar (binary)
# ---------------------------------------------------------------------------

def write_features(path: str | Path, matrix: np.ndarray) -> None:
    """Write an (N, D) feature matrix as a little-endian float32 sidecar."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValidationError("feature matrix must be 2-D")
    n, d = matrix.shape
    payload = np.ascontiguousarray(matrix, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_EGOF_HEADER.pack(EGOF_MAGIC, EGOF_VERSION, n, d))
        fh.write(payload)


def read_features(path: str | Path) -> np.ndarray:
    """Read a feature sidecar back as an (N, D) float32 matrix."""
    blob = Path(path).read_bytes()
    if len(blob) < _EGOF_HEADER.size:
        raise ValidationError(f"{path}: too short for a feature sidecar header")
    magic, version, n, d = _EGOF_HEADER.unpack_from(blob)
    if magic != EGOF_MAGIC:
        raise ValidationError(f"{path}: bad magic {magic!r}, expected {EGOF_MAGIC!r}")
    if version != EGOF_VERSION:
        raise ValidationError(f"{path}: unsupported sidecar version {version}")
    expected = _EGOF_HEADER.size + n * d * 4
    if len(blob) != expected:
        raise ValidationError(
            f"{path}: expected {expected} bytes for {n}x{d} floats, got {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=_EGOF_HEADER.size)
    return data.reshape(n, d).copy()


# ---------------------------------------------------------------------------
# Manifest (JSON + sidecar)
# ---------------------------------------------------------------------------

def load_manifest(
    path: str | Path,
    assume_interval: float | None = None,
) -> Photostream:
    """Load a day manifest and its feature sidecar into a Photostream.

    Frames are kept in manifest order, which must already be sorted by
    timestamp; a decreasing timestamp is an error, never a silent
    reorder (equal timestamps keep manifest order). When every frame
    lacks a timestamp and ``assume_interval`` is given, timestamps are
    synthesized at that fixed spacing in seconds and the stream is
    flagged as synthetic.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    for key in ("day_id", "dimension", "features_file", "frames"):
        if key not in doc:
            raise ValidationError(f"{path}: manifest missing {key!r}")
    day_id = str(doc["day_id"])
    dimension = doc["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise ValidationError(f"{path}: dimension must be a positive integer")
    entries = doc["frames"]
    if not isinstance(entries, list) or not entries:
        raise ValidationError(f"{path}: manifest must list at least one frame")

    frame_ids: list[str] = []
    raw_stamps: list[str | None] = []
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict) or "id" not in entry:
            raise ValidationError(f"{path}: frame entry {pos} missing 'id'")
        frame_ids.append(str(entry["id"]))
        raw_stamps.append(entry.get("timestamp"))

    missing = [i for i, s in enumerate(raw_stamps) if s is None]
    synthetic = False
    if missing:
        if len(missing) != len(raw_stamps):
            raise ValidationError(
                f"{path}: frame {frame_ids[missing[0]]!r} has no timestamp "
                "(timestamps must be all present or all absent)"
            )
        if assume_interval is None:
            raise ValidationError(
                f"{path}: manifest has no timestamps; pass a fixed frame "
                "interval to synthesize them"
            )
        timestamps = [
            SYNTHETIC_EPOCH + timedelta(seconds=assume_interval * i)
            for i in range(len(frame_ids))
        ]
        synthetic = True
    else:
        timestamps = [
            _parse_timestamp(raw, f"{path}: frame {frame_ids[i]!r}")
            for i, raw in enumerate(raw_stamps)
        ]
    for i in range(1, len(timestamps)):
        try:
            decreasing = timestamps[i] < timestamps[i - 1]
        except TypeError:
            raise ValidationError(
                f"{path}: timestamps mix naive and timezone-aware values"
            ) from None
        if decreasing:
            raise ValidationError(
                f"{path}: timestamps decrease between frames "
                f"{frame_ids[i - 1]!r} and {frame_ids[i]!r}"
            )

    sidecar = path.parent / doc["features_file"]
    features = read_features(sidecar)
    if features.shape[0] != len(frame_ids):
        raise ValidationError(
            f"{sidecar}: sidecar holds {features.shape[0]} frames, "
            f"manifest lists {len(frame_ids)}"
        )
    if features.shape[1] != dimension:
        raise ValidationError(
            f"{sidecar}: sidecar dimension {features.shape[1]} != "
            f"manifest dimension {dimension}"
        )
    return Photostream.build(day_id, frame_ids, timestamps, features, synthetic)


def write_manifest(
    stream: Photostream,
    path: str | Path,
    features_file: str | None = None,
) -> None:
    """Write a Photostream as manifest JSON plus feature sidecar."""
    path = Path(path)
    if features_file is None:
        features_file = path.stem + ".egof"
    doc = {
        "day_id": stream.day_id,
        "dimension": stream.dimension,
        "features_file": features_file,
        "frames": [
            {"id": f.frame_id, "timestamp": _format_timestamp(f.timestamp)}
            for f in stream.frames
        ],
    }
    # Synthetic timestamps are written out like real ones; the flag only
    # records how they were obtained and is not persisted.
    write_features(path.parent / features_file, stream.feature_matrix)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Event segmentation (CSV: frame_index,event_id)
# ---------------------------------------------------------------------------

def read_label_csv(path: str | Path, n_frames: int | None = None) -> list[str]:
    """Read per-frame labels, validating coverage of 0..N-1 exactly once."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != "frame_index,event_id":
        raise ValidationError(f"{path}: expected header 'frame_index,event_id'")
    rows: dict[int, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",", 1)
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 'frame_index,event_id'")
        try:
            idx = int(parts[0])
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: bad frame_index {parts[0]!r}") from None
        if idx in rows:
            raise ValidationError(f"{path}: duplicate frame_index {idx}")
        rows[idx] = parts[1]
    if not rows:
        raise ValidationError(f"{path}: no frames listed")
    total = n_frames if n_frames is not None else max(rows) + 1
    labels: list[str] = []
    for idx in range(total):
        if idx not in rows:
            raise ValidationError(f"{path}: missing frame_index {idx} of {total}")
        labels.append(rows[idx])
    if len(rows) != total:
        extra = sorted(set(rows) - set(range(total)))
        raise ValidationError(f"{path}: unknown frame_index {extra[0]} >= {total}")
    return labels


def segmentation_from_labels(labels: list[str]) -> EventSegmentation:
    """Build events as the maximal contiguous runs of an equal label.

    A label that recurs in separate runs yields distinct events; repeated
    labels get a ``~<k>`` suffix so event ids stay unique.
    """
    if not labels:
        raise ValidationError("cannot build a segmentation from zero frames")
    runs: list[tuple[str, int, int]] = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            runs.append((labels[start], start, i - 1))
            start = i
    counts: dict[str, int] = {}
    for label, _, _ in runs:
        counts[label] = counts.get(label, 0) + 1
    seen: dict[str, int] = {}
    events = []
    for label, lo, hi in runs:
        if counts[label] == 1:
            event_id = label
        else:
            seen[label] = seen.get(label, 0) + 1
            event_id = f"{label}~{seen[label]}"
        events.append(Event(event_id, lo, hi))
    return EventSegmentation(tuple(events))


def load_ground_truth(path: str | Path, stream: Photostream) -> EventSegmentation:
    """Load a ground-truth CSV, checking it covers the stream exactly."""
    labels = read_label_csv(path, n_frames=len(stream))
    return segmentation_from_labels(labels)


def write_label_csv(path: str | Path, labels: list[str]) -> None:
    lines = ["frame_index,event_id"]
    lines.extend(f"{i},{label}" for i, label in enumerate(labels))
    Path(path).write_text("\n".join(lines) + "\n")


def write_segmentation(seg: EventSegmentation, path: str | Path) -> None:
    write_label_csv(path, seg.labels())


# ---------------------------------------------------------------------------
# Summary (JSON)
# ---------------------------------------------------------------------------

def summary_to_dict(summary: Summary) -> dict:
    return {
        "spec_version": SPEC_VERSION,
        "day_id": summary.day_id,
        "method": summary.method.value,
        "parameters": {
            "seed": summary.parameters.seed,
            "linkage": summary.parameters.linkage,
            "cutoff": summary.parameters.cutoff,
            "min_event_duration": summary.parameters.min_event_duration,
        },
        "selections": [
            {
                "event_id": s.event_id,
                "event_start_index": s.event_start_index,
                "event_end_index": s.event_end_index,
                "frame_index": s.frame_index,
                "frame_id": s.frame_id,
            }
            for s in summary.selections
        ],
    }


def summary_from_dict(doc: dict, context: str = "summary") -> Summary:
    for key in ("spec_version", "day_id", "method", "parameters", "selections"):
        if key not in doc:
            raise ValidationError(f"{context}: missing {key!r}")
    if doc["spec_version"] != SPEC_VERSION:
        raise ValidationError(
            f"{context}: spec_version {doc['spec_version']!r} != {SPEC_VERSION!r}"
        )
    try:
        method = SelectionMethod(doc["method"])
    except ValueError:
        raise ValidationError(f"{context}: unknown method {doc['method']!r}") from None
    params = doc["parameters"]
    parameters = SummaryParameters(
        seed=int(params.get("seed", 0)),
        linkage=params.get("linkage"),
        cutoff=params.get("cutoff"),
        min_event_duration=params.get("min_event_duration"),
    )
    selections = tuple(
        Selection(
            event_id=str(s["event_id"]),
            event_start_index=int(s["event_start_index"]),
            event_end_index=int(s["event_end_index"]),
            frame_index=int(s["frame_index"]),
            frame_id=str(s["frame_id"]),
        )
        for s in doc["selections"]
    )
    return Summary(str(doc["day_id"]), method, parameters, selections)


def write_summary(summary: Summary, path: str | Path) -> None:
    """Persist a summary as JSON; the summary is re-validated first."""
    # Dataclass construction already validated; re-check in case the caller
    # assembled the object through other means.
    Summary(summary.day_id, summary.method, summary.parameters, summary.selections)
    Path(path).write_text(
        json.dumps(summary_to_dict(summary), indent=2, sort_keys=True) + "\n"
    )


def load_summary(path: str | Path) -> Summary:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    return summary_from_dict(doc, context=str(path))
