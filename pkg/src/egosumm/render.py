"""Static contact-sheet rendering of a summary.

One image cell per selected keyframe, in temporal order, plus a JSON
manifest for downstream tools. The HTML is script-free and a pure
function of its inputs, so re-rendering identical inputs yields the
identical document.
"""

from __future__ import annotations

import html
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .datamodel import (
    Photostream,
    Summary,
    ValidationError,
    summary_to_dict,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SheetEntry:
    """One contact-sheet cell."""

    event_id: str
    span_start: str
    span_end: str
    frame_id: str
    frame_count: int
    image_path: str | None  # None renders the placeholder cell


@dataclass(frozen=True)
class ContactSheet:
    """Ordered cells of a day's summary plus its caption."""

    day_id: str
    caption: str
    entries: tuple[SheetEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValidationError("contact sheet must have at least one entry")
        starts = [e.span_start for e in self.entries]
        if starts != sorted(starts):
            raise ValidationError("contact sheet entries must be in temporal order")


def _check_resolves(summary: Summary, stream: Photostream) -> None:
    n = len(stream)
    for sel in summary.selections:
        if not 0 <= sel.frame_index < n:
            raise ValidationError(
                f"selection {sel.event_id!r}: frame_index {sel.frame_index} "
                f"outside stream of {n} frames"
            )
        if stream.frames[sel.frame_index].frame_id != sel.frame_id:
            raise ValidationError(
                f"selection {sel.event_id!r}: frame_id {sel.frame_id!r} does not "
                f"match stream frame {stream.frames[sel.frame_index].frame_id!r}"
            )


def build_sheet(
    summary: Summary, stream: Photostream, image_root: str | Path | None = None
) -> ContactSheet:
    """Resolve selections against the stream and locate their images.

    A frame's image is looked up as <image_root>/<frame_id>; a missing
    file becomes a placeholder entry and a warning, never a failure.
    """
    _check_resolves(summary, stream)
    entries = []
    for sel in summary.selections:
        image: str | None = None
        if image_root is not None:
            candidate = Path(image_root) / sel.frame_id
            if candidate.is_file():
                image = sel.frame_id
            else:
                log.warning("image for frame %s not found at %s", sel.frame_id, candidate)
        first = stream.frames[sel.event_start_index].timestamp
        last = stream.frames[sel.event_end_index].timestamp
        entries.append(
            SheetEntry(
                event_id=sel.event_id,
                span_start=first.isoformat(),
                span_end=last.isoformat(),
                frame_id=sel.frame_id,
                frame_count=sel.event_end_index - sel.event_start_index + 1,
                image_path=image,
            )
        )
    caption = f"{summary.day_id}: {len(entries)} events, {summary.method.value} selection"
    return ContactSheet(summary.day_id, caption, tuple(entries))


_PAGE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{title}</title>
<style>
body {{ font-family: sans-serif; margin: 1.5rem; background: #fafafa; }}
h1 {{ font-size: 1.2rem; }}
.grid {{ display: flex; flex-wrap: wrap; gap: 12px; }}
.cell {{ width: 240px; border: 1px solid #ccc; background: #fff; padding: 8px; }}
.cell img {{ width: 100%; display: block; }}
.missing {{ width: 100%; aspect-ratio: 4/3; display: flex; align-items: center;
  justify-content: center; background: #eee; color: #666; font-size: 0.8rem; }}
.meta {{ font-size: 0.75rem; color: #333; margin-top: 6px; }}
</style>
</head>
<body>
<h1>{caption}</h1>
<div class="grid">
{cells}
</div>
</body>
</html>
"""

_CELL = """<div class="cell">
{media}
<div class="meta">{event}<br>{start} &ndash; {end}<br>{count} frames</div>
</div>"""


def render_html(
    summary: Summary, stream: Photostream, image_root: str | Path | None = None
) -> str:
    """Contact-sheet HTML for a summary, one cell per event."""
    sheet = build_sheet(summary, stream, image_root)
    cells = []
    for entry in sheet.entries:
        if entry.image_path is not None:
            media = (
                f'<img src="{html.escape(entry.image_path, quote=True)}" '
                f'alt="{html.escape(entry.frame_id, quote=True)}">'
            )
        else:
            media = f'<div class="missing">{html.escape(entry.frame_id)}</div>'
        cells.append(
            _CELL.format(
                media=media,
                event=html.escape(entry.event_id),
                start=html.escape(entry.span_start),
                end=html.escape(entry.span_end),
                count=entry.frame_count,
            )
        )
    return _PAGE.format(
        title=html.escape(sheet.day_id),
        caption=html.escape(sheet.caption),
        cells="\n".join(cells),
    )


def render_manifest(summary: Summary, stream: Photostream) -> str:
    """JSON rendering of the summary with ISO-8601 event spans."""
    _check_resolves(summary, stream)
    doc = summary_to_dict(summary)
    for sel, entry in zip(summary.selections, doc["selections"]):
        entry["span_start"] = stream.frames[sel.event_start_index].timestamp.isoformat()
        entry["span_end"] = stream.frames[sel.event_end_index].timestamp.isoformat()
        entry["keyframe_timestamp"] = stream.frames[sel.frame_index].timestamp.isoformat()
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
