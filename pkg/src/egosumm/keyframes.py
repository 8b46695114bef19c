"""Keyframe selection within events and whole-day summarization.

The main selector ranks an event's frames by the stationary
distribution of a random walk over frame similarities, so the chosen
frame is the one the walk visits most: the most central, most
"representative" view of the event. Simpler selectors (accumulated
distance, seeded random, uniform whole-day sampling) serve as
baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import get_backend
from .datamodel import (
    DistanceMatrix,
    Event,
    EventSegmentation,
    Photostream,
    Selection,
    SelectionMethod,
    Summary,
    SummaryParameters,
    ValidationError,
)

DAMPING = 0.99
CONVERGENCE_TOL = 1e-12
MAX_ITERATIONS = 10_000

_MASK64 = (1 << 64) - 1


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach the requested tolerance."""


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic transition probabilities of the frame random walk."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValidationError(f"transition matrix must be square, got {v.shape}")
        if v.shape[0] == 0:
            raise ValidationError("transition matrix must be non-empty")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValidationError("transition probabilities must be finite and >= 0")
        if not np.allclose(v.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValidationError("transition matrix rows must sum to 1")

    @property
    def order(self) -> int:
        return self.values.shape[0]


def similarity_matrix(distances: np.ndarray) -> TransitionMatrix:
    """Turn a pairwise distance block into walk transition probabilities.

    Affinity is exp(-d/sigma) with sigma the mean off-diagonal distance
    (1 when every distance is zero, where the scale is arbitrary). Self
    transitions are removed before row normalization so the walk always
    moves; a single-frame block degenerates to [[1]].
    """
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationError(f"distance block must be square, got {d.shape}")
    n = d.shape[0]
    if n == 0:
        raise ValidationError("distance block must be non-empty")
    if n == 1:
        return TransitionMatrix(np.ones((1, 1)))
    off_diag = ~np.eye(n, dtype=bool)
    sigma = float(d[off_diag].mean())
    if sigma == 0.0:
        sigma = 1.0
    w = np.exp(-d / sigma)
    w[~off_diag] = 0.0
    w /= w.sum(axis=1, keepdims=True)
    return TransitionMatrix(w)


def stationary_distribution(
    transitions: TransitionMatrix,
    damping: float = DAMPING,
    tol: float = CONVERGENCE_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> np.ndarray:
    """Long-run visit frequencies of the damped walk.

    Iterates pi <- damping * pi P + (1 - damping) * uniform from the
    uniform start until the L1 change drops below ``tol``. The damping
    term mixes in a uniform restart, which guarantees a unique
    stationary distribution even for periodic or reducible chains.
    """
    if not 0.0 < damping <= 1.0:
        raise ValidationError(f"damping must be in (0, 1], got {damping}")
    p = transitions.values
    n = transitions.order
    pi = np.full(n, 1.0 / n)
    restart = (1.0 - damping) / n
    for _ in range(max_iterations):
        nxt = damping * (pi @ p) + restart
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        if residual < tol:
            return pi
    raise ConvergenceError(
        f"stationary distribution not converged after {max_iterations} "
        f"iterations; last L1 residual {residual:.3e} (tol {tol:.3e})"
    )


def _event_block(
    stream: Photostream, event: Event, dist: DistanceMatrix | None
) -> np.ndarray:
    lo, hi = event.start_index, event.end_index + 1
    if dist is not None:
        return dist.values[lo:hi, lo:hi]
    return get_backend().pairwise_euclidean(stream.feature_matrix[lo:hi])


def random_walk_keyframe(
    stream: Photostream,
    event: Event,
    dist: DistanceMatrix | None = None,
    damping: float = DAMPING,
) -> int:
    """Frame the event's random walk visits most, as a stream index.

    Ties in the stationary probability go to the earliest frame.
    """
    if event.frame_count == 1:
        return event.start_index
    block = _event_block(stream, event, dist)
    pi = stationary_distribution(similarity_matrix(block), damping=damping)
    return event.start_index + int(np.argmax(pi))


def min_distance_keyframe(
    stream: Photostream, event: Event, dist: DistanceMatrix | None = None
) -> int:
    """Frame minimizing summed distance to the event's other frames.

    Ties go to the earliest frame.
    """
    block = _event_block(stream, event, dist)
    totals = block.sum(axis=1)
    return event.start_index + int(np.argmin(totals))


def _fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return h


class SplitMix64:
    """Tiny deterministic 64-bit generator, identical on every platform."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def random_keyframe(event: Event, seed: int = 0) -> int:
    """Seeded random frame choice, reproducible bit for bit.

    The per-event generator is SplitMix64 seeded with the run seed
    XORed with the FNV-1a 64-bit hash of the event id, and the frame
    offset is its first output modulo the event length. The same seed
    and event id therefore select the same frame on any platform,
    independently of selection order.
    """
    rng = SplitMix64(seed ^ _fnv1a64(event.event_id))
    return event.start_index + rng.next() % event.frame_count


def uniform_summary(stream: Photostream, k: int, seed: int = 0) -> Summary:
    """Evenly spaced whole-day sample of ``k`` frames.

    Selection i is the frame at floor((i + 0.5) * N / k); its nominal
    event is the slice [floor(i*N/k), floor((i+1)*N/k) - 1]. This
    ignores any event structure and serves as the weakest baseline.
    """
    n = len(stream)
    if not 1 <= k <= n:
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    selections = []
    for i in range(k):
        idx = (2 * i + 1) * n // (2 * k)
        lo = i * n // k
        hi = (i + 1) * n // k - 1
        selections.append(
            Selection(f"u{i:03d}", lo, hi, idx, stream.frames[idx].frame_id)
        )
    return Summary(
        day_id=stream.day_id,
        method=SelectionMethod.UNIFORM,
        parameters=SummaryParameters(seed=seed),
        selections=tuple(selections),
    )


def summarize(
    stream: Photostream,
    segmentation: EventSegmentation,
    method: SelectionMethod | str = SelectionMethod.RANDOM_WALK,
    dist: DistanceMatrix | None = None,
    seed: int = 0,
    parameters: SummaryParameters | None = None,
) -> Summary:
    """One keyframe per event, using the requested selector.

    The uniform method draws as many frames as there are events but
    from the whole day, replacing the segmentation's events with its
    own evenly sized slices. Passing the full distance matrix avoids
    recomputing per-event blocks from features.
    """
    method = SelectionMethod.coerce(method)
    if segmentation.n_frames != len(stream):
        raise ValidationError(
            f"segmentation covers {segmentation.n_frames} frames, "
            f"stream has {len(stream)}"
        )
    if parameters is None:
        parameters = SummaryParameters(seed=seed)
    if method is SelectionMethod.UNIFORM:
        uniform = uniform_summary(stream, len(segmentation), seed=seed)
        return Summary(stream.day_id, method, parameters, uniform.selections)

    selections = []
    for event in segmentation.events:
        if method is SelectionMethod.RANDOM_WALK:
            idx = random_walk_keyframe(stream, event, dist)
        elif method is SelectionMethod.MIN_DISTANCE:
            idx = min_distance_keyframe(stream, event, dist)
        else:
            idx = random_keyframe(event, seed)
        selections.append(
            Selection(
                event.event_id,
                event.start_index,
                event.end_index,
                idx,
                stream.frames[idx].frame_id,
            )
        )
    return Summary(stream.day_id, method, parameters, tuple(selections))
