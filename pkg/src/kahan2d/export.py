"""Serialization: trajectory files, verification report files, SVG portraits.

Numbers are formatted with ``repr``, Python's shortest round-trip decimal,
so re-parsing and re-emitting a file reproduces it byte for byte on any
platform.
"""

from __future__ import annotations

import json
import math
from typing import IO, Iterable, Sequence

from .kahan import Trajectory, TrajectoryRecord
from .vectorfield import Point2
from .verify import VerificationReport

TRAJECTORY_HEADER = "n,t,x,y,H,Htilde"

REPORT_KEYS = (
    "suite",
    "samples_attempted",
    "samples_used",
    "max_violation",
    "mean_violation",
    "threshold",
    "passed",
)


def format_number(value: float | None) -> str:
    """Shortest round-trip decimal; None renders as nan."""
    if value is None:
        return "nan"
    return repr(float(value))


def write_trajectory_csv(traj: Trajectory, out: IO[str]) -> None:
    """Emit the 'n,t,x,y,H,Htilde' schema, '#' comments for metadata."""
    out.write(TRAJECTORY_HEADER + "\n")
    for r in traj.records:
        out.write(
            f"{r.n},{format_number(r.t)},{format_number(r.p.x)},"
            f"{format_number(r.p.y)},{format_number(r.H)},{format_number(r.Htilde)}\n"
        )
    if traj.terminated_early:
        out.write(f"# terminated_early: {traj.termination_reason}\n")


def parse_trajectory_csv(lines: Iterable[str]) -> Trajectory:
    """Inverse of :func:`write_trajectory_csv`."""
    records: list[TrajectoryRecord] = []
    terminated = False
    reason: str | None = None
    header_seen = False
    for raw in lines:
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("terminated_early:"):
                terminated = True
                reason = body.split(":", 1)[1].strip()
            continue
        if not header_seen:
            if line != TRAJECTORY_HEADER:
                raise ValueError(f"unexpected trajectory header: {line!r}")
            header_seen = True
            continue
        cells = line.split(",")
        if len(cells) != 6:
            raise ValueError(f"expected 6 columns, got {len(cells)}: {line!r}")
        n = int(cells[0])
        t, x, y, hval, htval = (float(c) for c in cells[1:])
        records.append(TrajectoryRecord(n, t, Point2(x, y), hval, htval))
    if not header_seen:
        raise ValueError("missing trajectory header")
    return Trajectory(tuple(records), terminated, reason)


def write_trajectory_jsonl(traj: Trajectory, out: IO[str]) -> None:
    """One JSON object per record; a final metadata object on early termination."""
    for r in traj.records:
        out.write(
            json.dumps(
                {
                    "n": r.n,
                    "t": r.t,
                    "x": r.p.x,
                    "y": r.p.y,
                    "H": math.nan if r.H is None else r.H,
                    "Htilde": math.nan if r.Htilde is None else r.Htilde,
                }
            )
            + "\n"
        )
    if traj.terminated_early:
        out.write(
            json.dumps({"terminated_early": True, "reason": traj.termination_reason})
            + "\n"
        )


def write_report(report: VerificationReport, out: IO[str]) -> None:
    """One key=value line per metric, in the fixed schema order."""
    values = {
        "suite": report.suite,
        "samples_attempted": str(report.samples_attempted),
        "samples_used": str(report.samples_used),
        "max_violation": format_number(report.max_violation),
        "mean_violation": format_number(report.mean_violation),
        "threshold": format_number(report.threshold),
        "passed": "true" if report.passed else "false",
    }
    for key in REPORT_KEYS:
        out.write(f"{key}={values[key]}\n")


_SVG_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf",
)


def render_phase_svg(
    orbits: Sequence[Trajectory],
    region: tuple[float, float, float, float],
    title: str,
    width: int = 640,
    height: int = 480,
) -> str:
    """A static phase portrait: one polyline per non-empty orbit, two axis
    lines, a title; the viewport is the given region (content outside it is
    clipped by the renderer)."""
    x0, x1, y0, y1 = region
    margin = 40.0
    sx = (width - 2 * margin) / (x1 - x0)
    sy = (height - 2 * margin) / (y1 - y0)

    def to_screen(x: float, y: float) -> tuple[float, float]:
        return (margin + (x - x0) * sx, height - margin - (y - y0) * sy)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    # axis lines (x = 0 and y = 0 in data coordinates), clipped to the region
    ax_x, _ = to_screen(0.0, 0.0)
    _, ax_y = to_screen(0.0, 0.0)
    parts.append(
        f'<line x1="{margin}" y1="{ax_y:.2f}" x2="{width - margin}" y2="{ax_y:.2f}" '
        'stroke="#888888" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{ax_x:.2f}" y1="{margin}" x2="{ax_x:.2f}" y2="{height - margin}" '
        'stroke="#888888" stroke-width="1"/>'
    )
    for i, traj in enumerate(orbits):
        if len(traj) == 0:
            continue
        color = _SVG_PALETTE[i % len(_SVG_PALETTE)]
        pts = " ".join(
            "{:.3f},{:.3f}".format(*to_screen(r.p.x, r.p.y)) for r in traj.records
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
    parts.append(
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>'
    )
    parts.append(
        f'<text x="{width - margin / 2:.0f}" y="{height - margin / 2:.0f}" '
        'font-family="sans-serif" font-size="12">x</text>'
    )
    parts.append(
        f'<text x="{margin / 2:.0f}" y="{margin / 2:.0f}" '
        'font-family="sans-serif" font-size="12">y</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
