"""Division and fusion: turning visual clusters into temporal events.

Cluster labels ignore time, so one label can cover several separate
stretches of the day. Division splits labels into contiguous runs;
fusion then absorbs runs too short to be events of their own into a
temporal neighbor, which also soaks up one-frame outlier runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import Event, EventSegmentation, Photostream, ValidationError

# Shortest stretch treated as a standalone event, in seconds.
DEFAULT_MIN_EVENT_DURATION = 180.0


@dataclass(frozen=True)
class FusionConfig:
    """Thresholds deciding which events are too short to keep.

    ``min_event_duration`` is a timestamp span in seconds. The optional
    ``min_event_frames`` additionally marks events with fewer frames as
    short, for streams whose timestamps are synthetic or unreliable.
    """

    min_event_duration: float = DEFAULT_MIN_EVENT_DURATION
    min_event_frames: int | None = None

    def __post_init__(self) -> None:
        if self.min_event_duration <= 0:
            raise ValidationError(
                f"min_event_duration must be > 0, got {self.min_event_duration}"
            )
        if self.min_event_frames is not None and self.min_event_frames < 1:
            raise ValidationError(
                f"min_event_frames must be >= 1, got {self.min_event_frames}"
            )

    def is_short(self, event: Event, stream: Photostream) -> bool:
        if stream.synthetic_timestamps and self.min_event_frames is not None:
            return event.frame_count < self.min_event_frames
        return event.duration_seconds(stream) < self.min_event_duration


def divide(
    labels: np.ndarray | list, stream: Photostream | None = None
) -> EventSegmentation:
    """Split per-frame cluster labels into maximal contiguous runs.

    Every label change starts a new event, so a cluster appearing in
    two separate stretches yields two events. Ids are assigned in
    temporal order. Passing the stream checks the label count against
    its frame count.
    """
    arr = np.asarray(labels)
    if arr.ndim != 1 or len(arr) == 0:
        raise ValidationError("labels must be a non-empty 1-d sequence")
    if stream is not None and len(arr) != len(stream):
        raise ValidationError(
            f"{len(arr)} labels for a stream of {len(stream)} frames"
        )
    events: list[Event] = []
    start = 0
    for i in range(1, len(arr) + 1):
        if i == len(arr) or arr[i] != arr[start]:
            events.append(Event(f"e{len(events):03d}", start, i - 1))
            start = i
    return EventSegmentation(tuple(events))


def fuse(
    segmentation: EventSegmentation,
    stream: Photostream,
    config: FusionConfig = FusionConfig(),
) -> EventSegmentation:
    """Merge too-short events into their temporally closest neighbor.

    Repeatedly takes the shortest offending event (ties to the earliest)
    and joins it with the neighbor across the smaller boundary gap: the
    gap to the previous event is measured from that event's last frame
    to the short event's first, the gap to the next from the short
    event's last frame to the next event's first. On equal gaps the
    previous neighbor wins. The merged event keeps the id of its earlier
    constituent. This cascades until every event passes the thresholds
    or a single event remains.
    """
    if segmentation.n_frames != len(stream):
        raise ValidationError(
            f"segmentation covers {segmentation.n_frames} frames, "
            f"stream has {len(stream)}"
        )
    events = list(segmentation.events)
    times = stream.timestamps

    while len(events) > 1:
        short_pos = -1
        short_key: tuple[float, int] | None = None
        for pos, event in enumerate(events):
            if not config.is_short(event, stream):
                continue
            key = (event.duration_seconds(stream), event.start_index)
            if short_key is None or key < short_key:
                short_key = key
                short_pos = pos
        if short_pos < 0:
            break
        short = events[short_pos]

        if short_pos == 0:
            into_prev = False
        elif short_pos == len(events) - 1:
            into_prev = True
        else:
            prev_gap = (
                times[short.start_index]
                - times[events[short_pos - 1].end_index]
            ).total_seconds()
            next_gap = (
                times[events[short_pos + 1].start_index]
                - times[short.end_index]
            ).total_seconds()
            into_prev = prev_gap <= next_gap

        if into_prev:
            other = events[short_pos - 1]
            merged = Event(other.event_id, other.start_index, short.end_index)
            events[short_pos - 1 : short_pos + 1] = [merged]
        else:
            other = events[short_pos + 1]
            merged = Event(short.event_id, short.start_index, other.end_index)
            events[short_pos : short_pos + 2] = [merged]

    return EventSegmentation(tuple(events))


def refine(
    labels: np.ndarray | list,
    stream: Photostream,
    config: FusionConfig = FusionConfig(),
) -> EventSegmentation:
    """Division followed by fusion."""
    return fuse(divide(labels, stream), stream, config)
