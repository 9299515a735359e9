"""ASCII and SVG renderings of instances, solutions, and compiled layouts.

Both renderers are deterministic byte for byte.  Start cells are drawn
filled and target cells unfilled; with layout metadata the SVG also tags
variable channels, the opening cells, and the ladder connectors.
"""

from __future__ import annotations

from typing import Optional

from .core import Cell, Instance, Solution
from .reduction import ReductionMetadata

_TEAM_COLORS = {"+": "#2ca02c", "-": "#d62728"}
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _agent_color(instance: Instance, idx: int) -> str:
    team = instance.agents[idx].team
    if team in _TEAM_COLORS:
        return _TEAM_COLORS[team]
    return _PALETTE[idx % len(_PALETTE)]


def render_ascii(instance: Instance, solution: Optional[Solution] = None) -> str:
    """One character per cell: '@' obstacle, '.' free, '*' path overlay.

    A single agent is marked 's'/'g'; with several agents, starts show the
    agent's index digit and goals the matching uppercase letter (A for the
    first agent, B for the second, ...).
    """
    grid = instance.grid
    rows = [
        ["." if grid.is_free(Cell(c, r)) else "@" for c in range(grid.width)]
        for r in range(grid.height)
    ]
    if solution is not None:
        for path in solution.paths:
            for cell in path.cells[1:-1]:
                rows[cell.row][cell.col] = "*"
    single = instance.num_agents == 1
    for i, agent in enumerate(instance.agents):
        gmark = "g" if single else chr(ord("A") + i % 26)
        rows[agent.goal.row][agent.goal.col] = gmark
    for i, agent in enumerate(instance.agents):
        smark = "s" if single else str(i % 10)
        rows[agent.start.row][agent.start.col] = smark
    return "\n".join("".join(r) for r in rows) + "\n"


def render_svg(
    instance: Instance,
    solution: Optional[Solution] = None,
    metadata: Optional[ReductionMetadata] = None,
    cell_px: int = 12,
) -> str:
    grid = instance.grid
    w, h = grid.width * cell_px, grid.height * cell_px

    def rect(cell: Cell, fill: str, cls: str = "") -> str:
        cls_attr = f' class="{cls}"' if cls else ""
        return (
            f'<rect{cls_attr} x="{cell.col * cell_px}" y="{cell.row * cell_px}" '
            f'width="{cell_px}" height="{cell_px}" fill="{fill}" />'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff" />',
    ]
    for row in range(grid.height):
        for col in range(grid.width):
            if not grid.is_free(Cell(col, row)):
                parts.append(rect(Cell(col, row), "#3b3b3b"))

    if metadata is not None:
        for ch in metadata.channels:
            parts.append(
                f'<rect class="channel" x="{ch.col * cell_px}" '
                f'y="{ch.top_row * cell_px}" width="{cell_px}" '
                f'height="{(ch.bottom_row - ch.top_row + 1) * cell_px}" '
                f'fill="#ffe680" />'
            )
        for lad in metadata.ladders:
            if lad.kind == "v":
                x, y = lad.fixed * cell_px, lad.lo * cell_px
                width, height = cell_px, (lad.hi - lad.lo + 1) * cell_px
            else:
                x, y = lad.lo * cell_px, lad.fixed * cell_px
                width, height = (lad.hi - lad.lo + 1) * cell_px, cell_px
            parts.append(
                f'<rect class="ladder" x="{x}" y="{y}" width="{width}" '
                f'height="{height}" fill="#ccf2f2" />'
            )
        for name, cell in (("c", metadata.c), ("cprime", metadata.c_prime)):
            parts.append(rect(cell, "#f9c6f9", f"opening opening-{name}"))

    if solution is not None:
        for i, path in enumerate(solution.paths):
            color = _agent_color(instance, i)
            points = " ".join(
                f"{cell.col * cell_px + cell_px / 2},{cell.row * cell_px + cell_px / 2}"
                for cell in path.cells
            )
            parts.append(
                f'<polyline class="path" points="{points}" fill="none" '
                f'stroke="{color}" stroke-width="{cell_px / 4}" opacity="0.6" />'
            )

    radius = cell_px * 0.35
    for i, agent in enumerate(instance.agents):
        color = _agent_color(instance, i)
        cx = agent.start.col * cell_px + cell_px / 2
        cy = agent.start.row * cell_px + cell_px / 2
        parts.append(
            f'<circle class="start" cx="{cx}" cy="{cy}" r="{radius}" fill="{color}" />'
        )
        gx = agent.goal.col * cell_px + cell_px / 2
        gy = agent.goal.row * cell_px + cell_px / 2
        parts.append(
            f'<circle class="goal" cx="{gx}" cy="{gy}" r="{radius}" fill="none" '
            f'stroke="{color}" stroke-width="2" />'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(
    instance: Instance,
    solution: Optional[Solution] = None,
    fmt: str = "ascii",
    metadata: Optional[ReductionMetadata] = None,
) -> str:
    if fmt == "ascii":
        return render_ascii(instance, solution)
    if fmt == "svg":
        return render_svg(instance, solution, metadata)
    raise ValueError(f"unknown render format {fmt!r}")
