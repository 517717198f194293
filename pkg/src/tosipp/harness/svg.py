"""Deterministic SVG snapshot of an instance and plans."""
from __future__ import annotations

from typing import Iterable, Optional
from xml.sax.saxutils import escape

from ..world import MotionPlan, ProblemInstance

CELL = 24
PALETTE = ("#2a9d8f", "#e9c46a", "#e76f51", "#264653", "#8338ec")


def _p(v: float) -> str:
    return f"{v:.2f}"


def _xy(x: float, y: float) -> tuple[str, str]:
    return _p((x + 0.5) * CELL), _p((y + 0.5) * CELL)


def _polyline(plan: MotionPlan, color: str, width: float, dash: str = "") -> str:
    pts = [plan.start] + [a.target for a in plan.actions if a.kind == "move"]
    coords = " ".join(",".join(_xy(*p)) for p in pts)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{extra}/>')


def render_svg(instance: ProblemInstance, plans: Iterable = (), out=None,
               show_obstacles: bool = True) -> bytes:
    """``plans`` holds MotionPlans or ``(label, MotionPlan)`` pairs."""
    gm = instance.map
    W, H = gm.width * CELL, gm.height * CELL
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
             f'viewBox="0 0 {W} {H}">',
             f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
             '<g stroke="#dddddd" stroke-width="1">']
    for x in range(gm.width + 1):
        lines.append(f'<line x1="{x * CELL}" y1="0" x2="{x * CELL}" y2="{H}"/>')
    for y in range(gm.height + 1):
        lines.append(f'<line x1="0" y1="{y * CELL}" x2="{W}" y2="{y * CELL}"/>')
    lines.append('</g>')
    lines.append('<g fill="#444444">')
    for x, y in sorted(gm.blocked):
        lines.append(f'<rect x="{x * CELL}" y="{y * CELL}" width="{CELL}" height="{CELL}"/>')
    lines.append('</g>')
    if show_obstacles:
        for k, ob in enumerate(instance.obstacles):
            lines.append(f'<g class="obstacle" id="obstacle-{k}">')
            lines.append(_polyline(ob, "#999999", 1.5, "4 2"))
            for a in ob.actions:
                if a.kind == "move":
                    cx, cy = _xy(*a.source)
                    lines.append(f'<text x="{cx}" y="{cy}" font-size="7" fill="#777777">'
                                 f't={a.start:.2f}</text>')
            cx, cy = _xy(*ob.start)
            lines.append(f'<circle cx="{cx}" cy="{cy}" r="{_p(ob.radius * CELL)}" '
                         f'fill="#bbbbbb" fill-opacity="0.6"/>')
            lines.append('</g>')
    for i, item in enumerate(plans):
        label, plan = item if isinstance(item, tuple) else (f"plan-{i}", item)
        color = PALETTE[i % len(PALETTE)]
        lines.append(f'<g class="plan" id="{escape(str(label))}">')
        lines.append(_polyline(plan, color, 2.5))
        lines.append('</g>')
    for v, color in ((instance.start, "#1d3557"), (instance.goal, "#d62828")):
        cx, cy = _xy(*v)
        lines.append(f'<circle cx="{cx}" cy="{cy}" r="{_p(instance.radius * CELL)}" '
                     f'fill="none" stroke="{color}" stroke-width="2"/>')
    lines.append('</svg>')
    data = ("\n".join(lines) + "\n").encode()
    if out is not None:
        out.write(data)
    return data
