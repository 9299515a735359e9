"""Individually optimal flowtime solutions for down+right agents.

When every agent may only move down or right, an individually optimal
solution (every agent on a shortest path, no waits) can be found in
O(N * |V|) time or proven not to exist.  The algorithm is prioritized
planning over anti-diagonal groups: agents are processed rightmost
diagonal first, and inside a diagonal by decreasing start column; each
single-agent search is a depth-first search that prefers going right
before going down.

Two facts make this correct.  Each down or right move increases
``col + row`` by exactly one, so agents starting on different
anti-diagonals stay phase-shifted forever and can only ever meet on the
right agent's goal cell after it has parked; it therefore suffices to
treat the goals of agents on diagonals further right as obstacles.
Within one diagonal, two timed paths conflict exactly when they share a
cell, so earlier-planned path cells are blocked for the rest of the
group.  The right-first preference makes every planned path the
"highest" feasible one, which never steals a cell that a later agent of
the group could not concede.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    AgentTask,
    Cell,
    Direction,
    GridMap,
    Instance,
    Solution,
    TimedPath,
)


def diagonal_key(cell: Cell) -> int:
    """Anti-diagonal index of a cell; each down/right move increases it by 1."""
    return cell.col + cell.row


@dataclass(frozen=True)
class MonotonePath:
    """A down/right-only path, one move per time step, no waits."""

    cells: tuple[Cell, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))
        if not self.cells:
            raise ValueError("empty monotone path")
        for a, b in zip(self.cells, self.cells[1:]):
            if not (
                (b.col == a.col + 1 and b.row == a.row)
                or (b.col == a.col and b.row == a.row + 1)
            ):
                raise ValueError(f"step {a} -> {b} is not a down or right move")

    @property
    def start(self) -> Cell:
        return self.cells[0]

    @property
    def end(self) -> Cell:
        return self.cells[-1]

    @property
    def length(self) -> int:
        return len(self.cells) - 1

    @property
    def move_string(self) -> str:
        return "".join(
            "R" if b.col > a.col else "D" for a, b in zip(self.cells, self.cells[1:])
        )

    def to_timed_path(self) -> TimedPath:
        return TimedPath(self.cells)


@dataclass
class SolverStats:
    """Work counters for the planner, used by the complexity checks."""

    visited_cells: int = 0
    planned_agents: int = 0


def check_two_directional(instance: Instance) -> bool:
    """False when some goal lies left of or above its start (no solution)."""
    return all(
        a.goal.col >= a.start.col and a.goal.row >= a.start.row for a in instance.agents
    )


def partition_diagonals(instance: Instance) -> list[list[AgentTask]]:
    """Group agents by the anti-diagonal of their start cells.

    Groups come rightmost diagonal first (decreasing key); inside a group
    agents are ordered by decreasing start column.  Two distinct starts on
    one diagonal always differ in column, so the order is total.
    """
    groups: dict[int, list[AgentTask]] = {}
    for agent in instance.agents:
        groups.setdefault(diagonal_key(agent.start), []).append(agent)
    ordered = []
    for key in sorted(groups, reverse=True):
        ordered.append(sorted(groups[key], key=lambda a: -a.start.col))
    return ordered


def plan_monotone_path(
    grid: GridMap,
    blocked: Iterable[Cell],
    start: Cell,
    goal: Cell,
    *,
    right_first: bool = True,
    stats: Optional[SolverStats] = None,
) -> Optional[MonotonePath]:
    """Depth-first search for a down/right path from ``start`` to ``goal``.

    Returns the path whose move string is lexicographically smallest under
    Right < Down (with ``right_first``), i.e. the highest feasible monotone
    path, or None when no monotone path avoids the blocked cells.  Dead
    ends are memoized, so every cell of the start-goal bounding box is
    expanded at most once and the cost is O(area of the box).
    """
    blocked = blocked if isinstance(blocked, (set, frozenset)) else set(blocked)
    if goal.col < start.col or goal.row < start.row:
        return None
    if not grid.is_free(start) or not grid.is_free(goal):
        return None
    if start in blocked or goal in blocked:
        return None
    if right_first:
        moves = (Direction.RIGHT, Direction.DOWN)
    else:
        moves = (Direction.DOWN, Direction.RIGHT)

    failed: set[Cell] = set()
    stack: list[list] = [[start, 0]]  # (cell, number of moves already tried)
    if stats is not None:
        stats.visited_cells += 1
    while stack:
        cell, tried = stack[-1]
        if cell == goal:
            return MonotonePath(tuple(entry[0] for entry in stack))
        if tried == 2:
            failed.add(cell)
            stack.pop()
            continue
        stack[-1][1] = tried + 1
        nxt = moves[tried].apply(cell)
        if (
            nxt.col <= goal.col
            and nxt.row <= goal.row
            and nxt not in failed
            and nxt not in blocked
            and grid.is_free(nxt)
        ):
            stack.append([nxt, 0])
            if stats is not None:
                stats.visited_cells += 1
    return None


def region_above(path: MonotonePath) -> set[Cell]:
    """Cells of the path plus every cell above one of them (smaller row)."""
    region: set[Cell] = set()
    for cell in path.cells:
        for row in range(cell.row + 1):
            region.add(Cell(cell.col, row))
    return region


def weakly_above(q: MonotonePath, p: MonotonePath) -> bool:
    """True iff every cell of ``q`` lies in ``region_above(p)``."""
    deepest: dict[int, int] = {}
    for cell in p.cells:
        deepest[cell.col] = max(deepest.get(cell.col, -1), cell.row)
    return all(cell.col in deepest and cell.row <= deepest[cell.col] for cell in q.cells)


def solve_two_dir(
    instance: Instance,
    *,
    right_first: bool = True,
    stats: Optional[SolverStats] = None,
) -> Optional[Solution]:
    """Find an individually optimal solution for a down+right instance.

    Returns None exactly when no individually optimal solution exists.
    ``right_first=False`` flips the single-agent tie-break to prefer down
    moves; that variant is incomplete and only exists so tests can show
    the preference matters.
    """
    if instance.directions.moves != frozenset({Direction.DOWN, Direction.RIGHT}):
        raise ValueError("solver requires the down+right direction set")
    if not check_two_directional(instance):
        return None

    blocked: set[Cell] = set(instance.grid.obstacles)
    found: dict[int, MonotonePath] = {}
    for group in partition_diagonals(instance):
        group_cells: set[Cell] = set()
        for agent in group:
            path = plan_monotone_path(
                instance.grid,
                blocked,
                agent.start,
                agent.goal,
                right_first=right_first,
                stats=stats,
            )
            if path is None:
                return None
            if stats is not None:
                stats.planned_agents += 1
            found[agent.id] = path
            for cell in path.cells:
                if cell not in blocked:
                    group_cells.add(cell)
                    blocked.add(cell)
        blocked -= group_cells
        for agent in group:
            blocked.add(agent.goal)

    return Solution(tuple(found[a.id].to_timed_path() for a in instance.agents))
