"""Diagnostic reports: data maps, moving-distance curves, ranked listings.

Charts are hand-assembled SVG strings (circles, polylines, rects, text) so
rendering stays a pure, dependency-free string transform: identical inputs
give byte-identical documents. Tabular values are printed with 4 decimals;
the L-curve CSV keeps full float precision because it is also the chart's
re-render source.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .dynamics import STOP_THRESHOLD, DynamicsSnapshot, find_stop_index
from .errors import ValidationError
from .pruning import Ranking, band_of, higher_is_easier, rank

BAND_COLORS = {
    "hard": "#d62728",
    "ambiguous": "#1f77b4",
    "easy": "#2ca02c",
}

AXIS_COLOR = "#333333"
GRID_COLOR = "#dddddd"
RULE_COLOR = "#888888"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;")
        .replace(">", "&gt;").replace('"', "&quot;")
    )


def _fmt(x: float) -> str:
    return f"{x:.4f}"


# ---------------------------------------------------------------------------
# Data map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DataMapPoint:
    """One sample's map coordinates: x = variability, y = windowed mean dice."""

    sample_id: str
    x: float
    y: float
    band: str

    def __post_init__(self):
        if self.band not in BAND_COLORS:
            raise ValidationError(f"unknown band {self.band!r}")


def datamap_points(snap: DynamicsSnapshot, p: float) -> tuple[DataMapPoint, ...]:
    """Band-annotated points for one snapshot, ordered by sample id.

    Band boundaries come from the pruning module's trim arithmetic at the
    same fraction, so a map at p and a prune at p always tell one story.
    """
    if not snap.entries:
        raise ValidationError("snapshot has no samples")
    ranking = rank(snap)
    bands = band_of(ranking, p)
    return tuple(
        DataMapPoint(e.sample_id, x=e.sigma, y=e.mu, band=bands[e.sample_id])
        for e in snap.entries
    )


def datamap_csv(points: Sequence[DataMapPoint]) -> str:
    lines = ["sample_id,mu,sigma,band"]
    for pt in points:
        lines.append(f"{pt.sample_id},{_fmt(pt.y)},{_fmt(pt.x)},{pt.band}")
    return "\n".join(lines) + "\n"


def datamap_svg(points: Sequence[DataMapPoint], width: int = 640, height: int = 480) -> str:
    """Scatter of the sample cloud: variability across, confidence up.

    Axes are fixed to the metric's full range (x in [0, 0.5], y in [0, 1])
    so maps from different epochs are visually comparable. Legend swatches
    are rects: the circle count equals the sample count exactly.
    """
    ml, mr, mt, mb = 64, 20, 20, 52
    cw, ch = width - ml - mr, height - mt - mb

    def sx(v: float) -> float:
        return ml + (v / 0.5) * cw

    def sy(v: float) -> float:
        return mt + (1.0 - v) * ch

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for i in range(6):  # x grid at 0.0 .. 0.5
        v = i / 10.0
        x = sx(v)
        parts.append(
            f'<line x1="{x:.2f}" y1="{mt}" x2="{x:.2f}" y2="{mt + ch}" '
            f'stroke="{GRID_COLOR}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{mt + ch + 16}" text-anchor="middle" '
            f'font-size="11" fill="{AXIS_COLOR}">{v:.1f}</text>'
        )
    for i in range(6):  # y grid at 0.0 .. 1.0
        v = i / 5.0
        y = sy(v)
        parts.append(
            f'<line x1="{ml}" y1="{y:.2f}" x2="{ml + cw}" y2="{y:.2f}" '
            f'stroke="{GRID_COLOR}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-size="11" fill="{AXIS_COLOR}">{v:.1f}</text>'
        )
    parts.append(
        f'<rect x="{ml}" y="{mt}" width="{cw}" height="{ch}" '
        f'fill="none" stroke="{AXIS_COLOR}" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{ml + cw / 2:.2f}" y="{height - 14}" text-anchor="middle" '
        f'font-size="13" fill="{AXIS_COLOR}">variability</text>'
    )
    parts.append(
        f'<text x="18" y="{mt + ch / 2:.2f}" text-anchor="middle" font-size="13" '
        f'fill="{AXIS_COLOR}" transform="rotate(-90 18 {mt + ch / 2:.2f})">confidence</text>'
    )
    for pt in points:
        parts.append(
            f'<circle cx="{sx(pt.x):.2f}" cy="{sy(pt.y):.2f}" r="3" '
            f'fill="{BAND_COLORS[pt.band]}" fill-opacity="0.75"/>'
        )
    lx, ly = ml + cw - 108, mt + 10
    for j, band in enumerate(("easy", "ambiguous", "hard")):
        y = ly + 18 * j
        parts.append(
            f'<rect x="{lx}" y="{y}" width="12" height="12" fill="{BAND_COLORS[band]}"/>'
        )
        parts.append(
            f'<text x="{lx + 18}" y="{y + 10}" font-size="11" '
            f'fill="{AXIS_COLOR}">{band}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_datamap(snap: DynamicsSnapshot, p: float) -> tuple[str, str]:
    """CSV table and SVG scatter for one snapshot at pruning fraction p."""
    points = datamap_points(snap, p)
    return datamap_csv(points), datamap_svg(points)


# ---------------------------------------------------------------------------
# Moving-distance curve
# ---------------------------------------------------------------------------

L_CURVE_HEADER = "epoch,moving_distance"


def l_curve_csv(history: Sequence[tuple[int, float]]) -> str:
    """Full-precision CSV: parsing it back re-renders the chart byte-for-byte."""
    lines = [L_CURVE_HEADER]
    for epoch, l_val in history:
        lines.append(f"{int(epoch)},{float(l_val)!r}")
    return "\n".join(lines) + "\n"


def read_l_curve_csv(text: str) -> list[tuple[int, float]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != L_CURVE_HEADER:
        raise ValidationError(f"expected header {L_CURVE_HEADER!r}")
    out = []
    for i, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != 2:
            raise ValidationError(f"line {i}: expected 2 fields, got {len(cells)}")
        try:
            out.append((int(cells[0]), float(cells[1])))
        except ValueError:
            raise ValidationError(f"line {i}: cannot parse {ln!r}") from None
    return out


def l_curve_svg(
    history: Sequence[tuple[int, float]],
    threshold: float = STOP_THRESHOLD,
    width: int = 640,
    height: int = 360,
) -> str:
    """Polyline of L over epochs with the stop rule drawn in.

    A dashed horizontal rule marks threshold * L_max; if the stop condition
    fires anywhere in the history, a dashed vertical rule marks that epoch.
    """
    pts = [(int(e), float(l)) for e, l in history]
    if not pts:
        raise ValidationError("moving-distance history is empty")
    for (e0, _), (e1, _) in zip(pts, pts[1:]):
        if e1 <= e0:
            raise ValidationError(f"epochs must increase: {e0} then {e1}")

    ml, mr, mt, mb = 70, 20, 20, 46
    cw, ch = width - ml - mr, height - mt - mb
    e_lo, e_hi = pts[0][0], pts[-1][0]
    e_span = max(e_hi - e_lo, 1)
    l_max = max(l for _, l in pts)
    l_top = l_max if l_max > 0 else 1.0

    def sx(e: float) -> float:
        return ml + (e - e_lo) / e_span * cw

    def sy(l: float) -> float:
        return mt + (1.0 - l / l_top) * ch

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{ml}" y="{mt}" width="{cw}" height="{ch}" '
        f'fill="none" stroke="{AXIS_COLOR}" stroke-width="1"/>',
    ]
    for i in range(5):
        v = l_top * i / 4.0
        y = sy(v)
        parts.append(
            f'<text x="{ml - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-size="11" fill="{AXIS_COLOR}">{_fmt(v)}</text>'
        )
    for e in (e_lo, e_hi) if e_hi > e_lo else (e_lo,):
        parts.append(
            f'<text x="{sx(e):.2f}" y="{mt + ch + 16}" text-anchor="middle" '
            f'font-size="11" fill="{AXIS_COLOR}">{e}</text>'
        )
    parts.append(
        f'<text x="{ml + cw / 2:.2f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="13" fill="{AXIS_COLOR}">epoch</text>'
    )
    parts.append(
        f'<text x="20" y="{mt + ch / 2:.2f}" text-anchor="middle" font-size="13" '
        f'fill="{AXIS_COLOR}" transform="rotate(-90 20 {mt + ch / 2:.2f})">moving distance</text>'
    )

    rule = threshold * l_max
    y_rule = sy(rule)
    parts.append(
        f'<line x1="{ml}" y1="{y_rule:.2f}" x2="{ml + cw}" y2="{y_rule:.2f}" '
        f'stroke="{RULE_COLOR}" stroke-width="1" stroke-dasharray="5,3"/>'
    )
    parts.append(
        f'<text x="{ml + 4}" y="{y_rule - 5:.2f}" font-size="10" '
        f'fill="{RULE_COLOR}">{_fmt(threshold * 100)}% of peak</text>'
    )
    stop_i = find_stop_index([l for _, l in pts], threshold)
    if stop_i is not None:
        stop_epoch = pts[stop_i][0]
        x_stop = sx(stop_epoch)
        parts.append(
            f'<line x1="{x_stop:.2f}" y1="{mt}" x2="{x_stop:.2f}" y2="{mt + ch}" '
            f'stroke="{BAND_COLORS["hard"]}" stroke-width="1" stroke-dasharray="5,3"/>'
        )
        parts.append(
            f'<text x="{x_stop + 4:.2f}" y="{mt + 12}" font-size="10" '
            f'fill="{BAND_COLORS["hard"]}">stop @ {stop_epoch}</text>'
        )

    if len(pts) >= 2:
        coords = " ".join(f"{sx(e):.2f},{sy(l):.2f}" for e, l in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" '
            f'stroke="{BAND_COLORS["ambiguous"]}" stroke-width="1.5"/>'
        )
    for e, l in pts:
        parts.append(
            f'<circle cx="{sx(e):.2f}" cy="{sy(l):.2f}" r="2.5" '
            f'fill="{BAND_COLORS["ambiguous"]}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_l_curve(
    history: Sequence[tuple[int, float]], threshold: float = STOP_THRESHOLD
) -> tuple[str, str]:
    """CSV and SVG for a moving-distance history of (epoch, L) pairs."""
    pts = [(int(e), float(l)) for e, l in history]
    if not pts:
        raise ValidationError("moving-distance history is empty")
    return l_curve_csv(pts), l_curve_svg(pts, threshold)


# ---------------------------------------------------------------------------
# Ranked listings
# ---------------------------------------------------------------------------

def rank_listing(ranking: Ranking, k: int) -> str:
    """The k hardest and k easiest samples as a small text report.

    Sections are labeled by difficulty, not score direction, so listings
    read the same for dice-like and error-like metrics. Scores ascend
    within each section.
    """
    n = len(ranking)
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    if 2 * k > n:
        raise ValidationError(f"k = {k} too large for {n} samples (need k <= n/2)")
    head = ranking.entries[:k]
    tail = ranking.entries[n - k:]
    if higher_is_easier(ranking.metric):
        sections = [("hardest", head), ("easiest", tail)]
    else:
        sections = [("easiest", head), ("hardest", tail)]
    lines = []
    for title, entries in sections:
        lines.append(f"{title} {k} by {ranking.metric}:")
        for sid, score in entries:
            lines.append(f"  {sid}  {_fmt(score)}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subset-overlap bars
# ---------------------------------------------------------------------------

def overlap_csv(pairs: Sequence[tuple[str, float]]) -> str:
    lines = ["label,overlap"]
    for label, value in pairs:
        lines.append(f"{label},{_fmt(value)}")
    return "\n".join(lines) + "\n"


def overlap_svg(pairs: Sequence[tuple[str, float]], width: int = 480, height: int = 300) -> str:
    """Bar chart of overlap fractions in [0, 1], one bar per label."""
    for label, value in pairs:
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"overlap for {label!r} outside [0, 1]: {value}")
    ml, mr, mt, mb = 56, 16, 16, 44
    cw, ch = width - ml - mr, height - mt - mb
    n = max(len(pairs), 1)
    slot = cw / n
    bar_w = slot * 0.6
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{ml}" y="{mt}" width="{cw}" height="{ch}" '
        f'fill="none" stroke="{AXIS_COLOR}" stroke-width="1"/>',
    ]
    for i in range(6):
        v = i / 5.0
        y = mt + (1.0 - v) * ch
        parts.append(
            f'<text x="{ml - 6}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-size="11" fill="{AXIS_COLOR}">{v:.1f}</text>'
        )
    for i, (label, value) in enumerate(pairs):
        x = ml + i * slot + (slot - bar_w) / 2
        h = value * ch
        parts.append(
            f'<rect x="{x:.2f}" y="{mt + ch - h:.2f}" width="{bar_w:.2f}" '
            f'height="{h:.2f}" fill="{BAND_COLORS["ambiguous"]}"/>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{mt + ch - h - 4:.2f}" text-anchor="middle" '
            f'font-size="10" fill="{AXIS_COLOR}">{_fmt(value)}</text>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{mt + ch + 16}" text-anchor="middle" '
            f'font-size="11" fill="{AXIS_COLOR}">{_escape(str(label))}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_overlap_bars(pairs: Sequence[tuple[str, float]]) -> tuple[str, str]:
    """CSV and SVG for labeled subset-overlap fractions."""
    pairs = [(str(l), float(v)) for l, v in pairs]
    return overlap_csv(pairs), overlap_svg(pairs)
