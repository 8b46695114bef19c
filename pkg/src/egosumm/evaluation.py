"""Segmentation scoring against ground truth and synthetic test days.

The score matches every detected event to the ground-truth segment it
overlaps most and averages the frame-level Jaccard ratios of those
pairs. The synthetic generator builds days with known events (plus
optional one-frame noise intrusions) so the whole pipeline can be
scored against an exact answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from .clustering import LinkageMethod, agglomerate, cut, pairwise_distances
from .datamodel import (
    Event,
    EventSegmentation,
    Photostream,
    SYNTHETIC_EPOCH,
    ValidationError,
)
from .temporal import FusionConfig, divide, refine

# Rejection-sampling retry budget per placed point.
_MAX_PLACEMENT_TRIES = 200


@dataclass(frozen=True, eq=False)
class JaccardReport:
    """Best-match overlap scores of a detected segmentation.

    ``matches`` holds one row per detected event: (detected id, matched
    ground-truth id, intersection frames, union frames, ratio).
    ``match_matrix`` is the 0/1 indicator of those pairings, one 1 per
    row. ``aggregate`` is the mean ratio over detected events.
    """

    matches: tuple[tuple[str, str, int, int, float], ...]
    match_matrix: np.ndarray
    aggregate: float
    n_detected: int
    n_truth: int

    def __post_init__(self) -> None:
        if self.match_matrix.shape != (self.n_detected, self.n_truth):
            raise ValidationError("match matrix shape disagrees with event counts")
        if not np.all(self.match_matrix.sum(axis=1) == 1):
            raise ValidationError("each detected event must match exactly one segment")
        if not 0.0 <= self.aggregate <= 1.0:
            raise ValidationError(f"aggregate {self.aggregate} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "aggregate": self.aggregate,
            "n_detected": self.n_detected,
            "n_truth": self.n_truth,
            "matches": [
                {
                    "detected": d,
                    "truth": t,
                    "intersection": i,
                    "union": u,
                    "ratio": r,
                }
                for d, t, i, u, r in self.matches
            ],
        }


def jaccard(pred: EventSegmentation, truth: EventSegmentation) -> JaccardReport:
    """Score detected events against ground truth, frame-counted.

    Each detected event is paired with the ground-truth segment sharing
    the most frames (ties to the earliest segment); several detected
    events may share one segment. The pair's ratio is intersection over
    union in frames, and the aggregate is the mean over detected
    events, so over-segmentation drags the score down through the many
    small ratios it produces.
    """
    if pred.n_frames != truth.n_frames:
        raise ValidationError(
            f"segmentations cover different ranges: {pred.n_frames} vs "
            f"{truth.n_frames} frames"
        )
    n_pred, n_truth = len(pred), len(truth)
    counts = np.zeros((n_pred, n_truth), dtype=np.int64)
    pred_idx = np.repeat(np.arange(n_pred), [e.frame_count for e in pred.events])
    truth_idx = np.repeat(np.arange(n_truth), [e.frame_count for e in truth.events])
    np.add.at(counts, (pred_idx, truth_idx), 1)

    best = counts.argmax(axis=1)  # first max wins the tie
    matrix = np.zeros_like(counts)
    matrix[np.arange(n_pred), best] = 1

    rows = []
    total = 0.0
    for i, j in enumerate(best):
        inter = int(counts[i, j])
        union = pred.events[i].frame_count + truth.events[j].frame_count - inter
        ratio = inter / union
        total += ratio
        rows.append(
            (pred.events[i].event_id, truth.events[j].event_id, inter, union, ratio)
        )
    return JaccardReport(
        matches=tuple(rows),
        match_matrix=matrix,
        aggregate=total / n_pred,
        n_detected=n_pred,
        n_truth=n_truth,
    )


@dataclass(frozen=True)
class SynthConfig:
    """Shape of a generated day.

    ``separation`` is the minimum distance between event centers as a
    multiple of the per-component noise scale ``sigma``. Each event
    draws its frame count uniformly from the inclusive
    ``frames_per_event`` range (a single int pins it). ``noise_frames``
    one-frame intrusions are inserted strictly inside distinct events,
    with features far from every center; ground truth keeps them in
    the surrounding event.
    """

    num_events: int = 5
    frames_per_event: tuple[int, int] | int = 20
    dimension: int = 64
    separation: float = 10.0
    sigma: float = 1.0
    frame_interval_seconds: float = 60.0
    noise_frames: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        fpe = self.frames_per_event
        if isinstance(fpe, int):
            fpe = (fpe, fpe)
            object.__setattr__(self, "frames_per_event", fpe)
        if self.num_events < 1:
            raise ValidationError(f"num_events must be >= 1, got {self.num_events}")
        if not 1 <= fpe[0] <= fpe[1]:
            raise ValidationError(f"bad frames_per_event range {fpe}")
        if self.dimension < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.dimension}")
        if self.separation < 0:
            raise ValidationError(f"separation must be >= 0, got {self.separation}")
        if self.sigma <= 0:
            raise ValidationError(f"sigma must be > 0, got {self.sigma}")
        if self.frame_interval_seconds <= 0:
            raise ValidationError("frame_interval_seconds must be > 0")
        if self.noise_frames < 0:
            raise ValidationError(f"noise_frames must be >= 0, got {self.noise_frames}")

    @property
    def intra_scale(self) -> float:
        """Typical distance between two frames of the same event."""
        return self.sigma * math.sqrt(2.0 * self.dimension)

    @property
    def inter_scale(self) -> float:
        """Smallest typical distance between frames of different events."""
        sep = self.separation * self.sigma
        return math.sqrt(sep * sep + 2.0 * self.dimension * self.sigma * self.sigma)


def suggested_cutoff(config: SynthConfig) -> float:
    """Midpoint of the intra/inter distance scales, a safe cut height."""
    return 0.5 * (config.intra_scale + config.inter_scale)


def _place_points(
    rng: np.random.Generator,
    count: int,
    dimension: int,
    scale: float,
    min_dist: float,
    existing: list[np.ndarray],
    what: str,
) -> list[np.ndarray]:
    placed: list[np.ndarray] = []
    for _ in range(count):
        for _ in range(_MAX_PLACEMENT_TRIES):
            candidate = rng.normal(0.0, scale, size=dimension)
            others = existing + placed
            if all(
                float(np.linalg.norm(candidate - p)) >= min_dist for p in others
            ):
                placed.append(candidate)
                break
        else:
            raise ValidationError(
                f"could not place {count} {what} at separation {min_dist:.3g} "
                f"in dimension {dimension}; lower the separation or raise D"
            )
    return placed


def synth_generate(config: SynthConfig) -> tuple[Photostream, EventSegmentation]:
    """Build a synthetic day and its exact event segmentation.

    Event centers are rejection-sampled Gaussians kept at least the
    configured separation apart; frames are center plus isotropic
    sigma-noise, quantized to float32 so regenerating with the same
    config reproduces the feature bytes exactly. Timestamps tick
    uniformly from a fixed epoch. Noise intrusions are placed far
    outside every event's neighborhood so they cluster with nothing.
    """
    rng = np.random.default_rng(config.seed)
    k = config.num_events
    d = config.dimension
    lo, hi = config.frames_per_event  # type: ignore[misc]
    counts = [int(c) for c in rng.integers(lo, hi + 1, size=k)]

    min_sep = config.separation * config.sigma
    center_scale = (
        1.3 * min_sep / math.sqrt(2.0 * d) if min_sep > 0 else config.sigma
    )
    centers = _place_points(rng, k, d, center_scale, min_sep, [], "event centers")

    noise_points: list[np.ndarray] = []
    insert_at: dict[int, int] = {}
    if config.noise_frames:
        eligible = [i for i, c in enumerate(counts) if c >= 2]
        if len(eligible) < config.noise_frames:
            raise ValidationError(
                f"{config.noise_frames} noise frames need as many events with "
                f">= 2 frames, have {len(eligible)}"
            )
        hosts = rng.choice(len(eligible), size=config.noise_frames, replace=False)
        for host in sorted(int(h) for h in hosts):
            event_idx = eligible[host]
            # Strictly interior offset, so the intrusion never touches an
            # event boundary and ground truth stays unambiguous.
            insert_at[event_idx] = int(rng.integers(1, counts[event_idx]))
        min_noise_dist = 2.0 * (min_sep + config.intra_scale)
        radius = 2.0 * min_noise_dist + max(
            float(np.linalg.norm(c)) for c in centers
        )
        for _ in range(config.noise_frames):
            for _ in range(_MAX_PLACEMENT_TRIES):
                direction = rng.normal(0.0, 1.0, size=d)
                norm = float(np.linalg.norm(direction))
                if norm == 0.0:
                    continue
                candidate = direction * (radius / norm)
                if all(
                    float(np.linalg.norm(candidate - p)) >= min_noise_dist
                    for p in noise_points
                ):
                    noise_points.append(candidate)
                    break
            else:
                raise ValidationError(
                    "could not place mutually distant noise intrusions; "
                    "lower noise_frames or raise the dimension"
                )

    rows: list[np.ndarray] = []
    boundaries: list[tuple[int, int]] = []
    noise_iter = iter(noise_points)
    for event_idx, count in enumerate(counts):
        start = len(rows)
        offset = insert_at.get(event_idx)
        for pos in range(count):
            if pos == offset:
                rows.append(next(noise_iter) + rng.normal(0.0, config.sigma, size=d))
            rows.append(centers[event_idx] + rng.normal(0.0, config.sigma, size=d))
        boundaries.append((start, len(rows) - 1))

    features = np.asarray(rows).astype(np.float32)
    n = len(features)
    step = timedelta(seconds=config.frame_interval_seconds)
    stream = Photostream.build(
        day_id=f"synth-{config.seed:05d}",
        frame_ids=[f"f{i:05d}" for i in range(n)],
        timestamps=[SYNTHETIC_EPOCH + i * step for i in range(n)],
        features=features,
        synthetic_timestamps=True,
    )
    truth = EventSegmentation(
        tuple(Event(f"g{i:03d}", s, e) for i, (s, e) in enumerate(boundaries))
    )
    return stream, truth


def sweep_cutoff(
    stream: Photostream,
    truth: EventSegmentation,
    linkage: LinkageMethod | str,
    cutoffs: list[float] | tuple[float, ...],
    fusion: FusionConfig = FusionConfig(),
) -> list[tuple[float, float]]:
    """Aggregate score of the full pipeline at each cut height.

    The dendrogram is built once and only the cut varies, so the sweep
    costs one agglomeration regardless of how many cutoffs it scores.
    """
    if not cutoffs:
        raise ValidationError("cutoffs must be a non-empty list")
    dendrogram = agglomerate(pairwise_distances(stream), linkage)
    table = []
    for cutoff in cutoffs:
        segmentation = refine(cut(dendrogram, cutoff), stream, fusion)
        table.append((float(cutoff), jaccard(segmentation, truth).aggregate))
    return table


def compare_division_fusion(
    stream: Photostream,
    truth: EventSegmentation,
    linkage: LinkageMethod | str,
    cutoff: float,
    fusion: FusionConfig = FusionConfig(),
) -> tuple[float, float]:
    """Scores without and with fusion, from one clustering.

    The unrefined baseline still splits cluster labels into contiguous
    runs (a segmentation must tile the day) but skips the merge step,
    so every short intrusion survives as its own event.
    """
    labels = cut(agglomerate(pairwise_distances(stream), linkage), cutoff)
    unrefined = jaccard(divide(labels, stream), truth).aggregate
    refined = jaccard(refine(labels, stream, fusion), truth).aggregate
    return unrefined, refined
