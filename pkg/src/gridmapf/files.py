"""Line-based text formats for grids, agents, solutions, and layouts.

All formats are diff-friendly: one fact per line, deterministic writers,
and read(write(x)) == x on canonical files.  Parse errors carry the
offending line number.
"""

from __future__ import annotations

from typing import Optional

from .core import (
    AgentTask,
    Cell,
    Direction,
    DirectionSet,
    GridMap,
    Instance,
    Solution,
    TimedPath,
    direction_between,
)
from .formula import MonotoneFormula, format_formula, parse_formula
from .reduction import ChannelSpec, LadderSpec, ReductionMetadata


class FileFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def write_map(grid: GridMap) -> str:
    lines = [f"height {grid.height}", f"width {grid.width}", "map"]
    for row in range(grid.height):
        lines.append(
            "".join(
                "." if Cell(col, row) not in grid.obstacles else "@"
                for col in range(grid.width)
            )
        )
    return "\n".join(lines) + "\n"


def read_map(text: str) -> GridMap:
    lines = text.splitlines()
    if len(lines) < 3:
        raise FileFormatError("map file needs height, width and map lines")
    header = {}
    for i, key in enumerate(("height", "width")):
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != key or not parts[1].isdigit():
            raise FileFormatError(f"expected '{key} <n>'", i + 1)
        header[key] = int(parts[1])
    if lines[2].strip() != "map":
        raise FileFormatError("expected 'map'", 3)
    height, width = header["height"], header["width"]
    rows = lines[3 : 3 + height]
    if len(rows) != height:
        raise FileFormatError(f"expected {height} map rows, found {len(rows)}")
    obstacles = set()
    for r, row in enumerate(rows):
        if len(row) != width:
            raise FileFormatError(
                f"row has {len(row)} cells, expected {width}", 4 + r
            )
        for c, ch in enumerate(row):
            if ch == "@":
                obstacles.add(Cell(c, r))
            elif ch != ".":
                raise FileFormatError(f"bad map character {ch!r}", 4 + r)
    return GridMap(width, height, frozenset(obstacles))


def write_agents(instance: Instance) -> str:
    lines = [f"directions {instance.directions.letters}"]
    for a in instance.agents:
        team = f" {a.team}" if a.team is not None else ""
        lines.append(
            f"agent {a.id} {a.start.col} {a.start.row} {a.goal.col} {a.goal.row}{team}"
        )
    return "\n".join(lines) + "\n"


def read_agents(text: str, grid: GridMap) -> Instance:
    directions: Optional[DirectionSet] = None
    agents: list[AgentTask] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "directions":
            if len(parts) != 2:
                raise FileFormatError("expected: directions <letters>", lineno)
            try:
                directions = DirectionSet.from_letters(parts[1])
            except ValueError as e:
                raise FileFormatError(str(e), lineno) from None
        elif parts[0] == "agent":
            if len(parts) not in (6, 7):
                raise FileFormatError(
                    "expected: agent <id> <scol> <srow> <gcol> <grow> [team]", lineno
                )
            try:
                aid, scol, srow, gcol, grow = (int(p) for p in parts[1:6])
            except ValueError:
                raise FileFormatError("agent fields must be integers", lineno) from None
            team = parts[6] if len(parts) == 7 else None
            start, goal = Cell(scol, srow), Cell(gcol, grow)
            for cell, label in ((start, "start"), (goal, "goal")):
                if not grid.is_free(cell):
                    raise FileFormatError(f"{label} {cell} is not a free cell", lineno)
            agents.append(AgentTask(aid, start, goal, team))
        else:
            raise FileFormatError(f"unknown directive {parts[0]!r}", lineno)
    if directions is None:
        raise FileFormatError("missing directions line")
    ids = [a.id for a in agents]
    if len(set(ids)) != len(ids):
        raise FileFormatError("duplicate agent id")
    teams = None
    if any(a.team is not None for a in agents):
        if any(a.team is None for a in agents):
            raise FileFormatError("either all or no agents must carry a team")
        teams = {}
        for a in agents:
            teams.setdefault(a.team, set()).add(a.goal)
        teams = {t: frozenset(cells) for t, cells in teams.items()}
    return Instance(grid, tuple(agents), directions, teams=teams)


def write_solution(instance: Instance, solution: Solution) -> str:
    lines = []
    for agent, path in zip(instance.agents, solution.paths):
        moves = []
        for a, b in zip(path.cells, path.cells[1:]):
            d = direction_between(a, b)
            if d is None:
                raise ValueError(f"agent {agent.id}: {a} -> {b} is not a single step")
            moves.append(d.letter)
        lines.append(f"agent {agent.id} {''.join(moves) or '-'}")
    return "\n".join(lines) + "\n"


_MOVES = {d.letter: d for d in Direction}


def read_solution(text: str, instance: Instance) -> Solution:
    by_id: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "agent" or len(parts) != 3:
            raise FileFormatError("expected: agent <id> <moves|->", lineno)
        if not parts[1].lstrip("-").isdigit():
            raise FileFormatError(f"bad agent id {parts[1]!r}", lineno)
        aid = int(parts[1])
        if aid in by_id:
            raise FileFormatError(f"duplicate agent {aid}", lineno)
        by_id[aid] = "" if parts[2] == "-" else parts[2]
    paths = []
    for agent in instance.agents:
        if agent.id not in by_id:
            raise FileFormatError(f"missing moves for agent {agent.id}")
        cells = [agent.start]
        for t, letter in enumerate(by_id[agent.id], start=1):
            d = _MOVES.get(letter)
            if d is None:
                raise FileFormatError(f"agent {agent.id}: bad move {letter!r} at step {t}")
            if d is not Direction.WAIT and d not in instance.directions:
                raise FileFormatError(
                    f"agent {agent.id}: move {letter} at step {t} not in the "
                    f"instance direction set"
                )
            nxt = d.apply(cells[-1])
            if not instance.grid.is_free(nxt):
                raise FileFormatError(
                    f"agent {agent.id}: step {t} moves into {nxt}, which is not free"
                )
            cells.append(nxt)
        paths.append(TimedPath.from_cells(cells))
    extra = set(by_id) - {a.id for a in instance.agents}
    if extra:
        raise FileFormatError(f"unknown agent ids {sorted(extra)}")
    return Solution(tuple(paths))


def write_metadata(meta: ReductionMetadata) -> str:
    lines = [f"variant {meta.variant}"]
    lines.append(f"const W {meta.w_total}")
    lines.append(f"const Wbound {meta.w_coarse_bound}")
    lines.append(f"const U {meta.unit}")
    lines.append(f"const L {meta.channel_length}")
    lines.append(f"const d {meta.common_distance if meta.common_distance is not None else '-'}")
    lines.append(f"opening c {meta.c.col} {meta.c.row}")
    lines.append(f"opening cprime {meta.c_prime.col} {meta.c_prime.row}")
    for ch in meta.channels:
        lines.append(f"channel {ch.var} {ch.col} {ch.top_row} {ch.bottom_row}")
    for lad in meta.ladders:
        lines.append(
            f"ladder {lad.owner_kind} {lad.owner_id} {lad.kind} {lad.fixed} {lad.lo} {lad.hi}"
        )
    lines.append(f"vars {meta.formula.num_vars}")
    for c in meta.formula.clauses:
        lines.append(f"clause {c.id} {c.side.value} " + " ".join(map(str, c.vars)))
    return "\n".join(lines) + "\n"


def read_metadata(text: str) -> ReductionMetadata:
    variant = None
    consts: dict[str, Optional[int]] = {}
    openings: dict[str, Cell] = {}
    channels: list[ChannelSpec] = []
    ladders: list[LadderSpec] = []
    formula_lines: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "variant":
                variant = parts[1]
            elif parts[0] == "const":
                consts[parts[1]] = None if parts[2] == "-" else int(parts[2])
            elif parts[0] == "opening":
                openings[parts[1]] = Cell(int(parts[2]), int(parts[3]))
            elif parts[0] == "channel":
                channels.append(
                    ChannelSpec(int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4]))
                )
            elif parts[0] == "ladder":
                ladders.append(
                    LadderSpec(
                        parts[1], int(parts[2]), parts[3], int(parts[4]),
                        int(parts[5]), int(parts[6]),
                    )
                )
            elif parts[0] in ("vars", "clause"):
                formula_lines.append(line)
            else:
                raise FileFormatError(f"unknown directive {parts[0]!r}", lineno)
        except (IndexError, ValueError) as e:
            if isinstance(e, FileFormatError):
                raise
            raise FileFormatError(f"malformed line: {line!r}", lineno) from None
    if variant is None or "W" not in consts or "L" not in consts or "U" not in consts:
        raise FileFormatError("metadata misses variant or W/L/U constants")
    if "c" not in openings or "cprime" not in openings:
        raise FileFormatError("metadata misses opening cells")
    formula = parse_formula("\n".join(formula_lines))
    return ReductionMetadata(
        variant=variant,
        w_total=consts["W"],
        w_coarse_bound=consts.get("Wbound") or 0,
        unit=consts["U"],
        channel_length=consts["L"],
        common_distance=consts.get("d"),
        c=openings["c"],
        c_prime=openings["cprime"],
        channels=tuple(channels),
        ladders=tuple(ladders),
        formula=formula,
    )


def read_formula(text: str) -> MonotoneFormula:
    return parse_formula(text)


def write_formula(formula: MonotoneFormula) -> str:
    return format_formula(formula)
