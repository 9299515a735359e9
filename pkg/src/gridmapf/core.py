"""Domain model for grid-based multi-agent path finding.

Cells, grids, agents, timed paths, conflict detection, and the two cost
objectives (flowtime and makespan).  Everything here is immutable after
construction and all operations are pure functions, so instances can be
shared freely between threads and tests.

Coordinate convention: ``col`` grows rightward, ``row`` grows downward,
origin at the top-left.  "Up" therefore means ``row - 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, NamedTuple, Optional, Sequence


class Cell(NamedTuple):
    """A grid cell, addressed by (col, row)."""

    col: int
    row: int


class Direction(Enum):
    """One agent action per time step: four moves plus an explicit wait."""

    UP = (0, -1)
    DOWN = (0, 1)
    LEFT = (-1, 0)
    RIGHT = (1, 0)
    WAIT = (0, 0)

    @property
    def dcol(self) -> int:
        return self.value[0]

    @property
    def drow(self) -> int:
        return self.value[1]

    @property
    def letter(self) -> str:
        return self.name[0]

    def apply(self, cell: Cell) -> Cell:
        return Cell(cell.col + self.value[0], cell.row + self.value[1])


#: Motion directions in the canonical tie-break order used everywhere.
MOTION_DIRECTIONS: tuple[Direction, ...] = (
    Direction.UP,
    Direction.DOWN,
    Direction.LEFT,
    Direction.RIGHT,
)

_LETTER_TO_DIRECTION = {d.letter: d for d in Direction}


def direction_between(a: Cell, b: Cell) -> Optional[Direction]:
    """The single action leading from ``a`` to ``b``, or None if not one step."""
    delta = (b.col - a.col, b.row - a.row)
    for d in Direction:
        if d.value == delta:
            return d
    return None


@dataclass(frozen=True)
class DirectionSet:
    """The motion directions an instance permits, plus whether waiting is legal."""

    moves: frozenset[Direction]
    waits_allowed: bool = True

    def __post_init__(self) -> None:
        if Direction.WAIT in self.moves:
            raise ValueError("WAIT is controlled by waits_allowed, not by moves")

    @classmethod
    def from_letters(cls, letters: str, waits_allowed: bool = True) -> "DirectionSet":
        moves = set()
        for ch in letters:
            d = _LETTER_TO_DIRECTION.get(ch.upper())
            if d is None or d is Direction.WAIT:
                raise ValueError(f"unknown direction letter {ch!r}")
            moves.add(d)
        return cls(frozenset(moves), waits_allowed)

    @property
    def letters(self) -> str:
        return "".join(d.letter for d in MOTION_DIRECTIONS if d in self.moves)

    def ordered(self) -> tuple[Direction, ...]:
        """Member directions in canonical order."""
        return tuple(d for d in MOTION_DIRECTIONS if d in self.moves)

    def __contains__(self, d: Direction) -> bool:
        return d in self.moves


DOWN_RIGHT = DirectionSet(frozenset({Direction.DOWN, Direction.RIGHT}))
UP_RIGHT = DirectionSet(frozenset({Direction.UP, Direction.RIGHT}))
THREE_DIRECTIONS = DirectionSet(
    frozenset({Direction.UP, Direction.DOWN, Direction.RIGHT})
)
FOUR_DIRECTIONS = DirectionSet(frozenset(MOTION_DIRECTIONS))


@dataclass(frozen=True)
class GridMap:
    """A rectangular grid with obstacle cells removed."""

    width: int
    height: int
    obstacles: frozenset[Cell] = frozenset()

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        object.__setattr__(self, "obstacles", frozenset(self.obstacles))
        for cell in self.obstacles:
            if not self.in_bounds(cell):
                raise ValueError(f"obstacle {cell} outside {self.width}x{self.height} grid")

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell.col < self.width and 0 <= cell.row < self.height

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.obstacles

    @property
    def free_count(self) -> int:
        return self.width * self.height - len(self.obstacles)

    def free_cells(self) -> Iterator[Cell]:
        for row in range(self.height):
            for col in range(self.width):
                cell = Cell(col, row)
                if cell not in self.obstacles:
                    yield cell


@dataclass(frozen=True)
class AgentTask:
    """One agent's assignment: start cell, goal cell, optional team label."""

    id: int
    start: Cell
    goal: Cell
    team: Optional[str] = None


@dataclass(frozen=True, eq=False)
class Instance:
    """A MAPF problem: grid, agents, allowed directions, optional team targets.

    In team (colored) mode ``teams`` maps each team label to its target set;
    any member of the team may end on any of the team's targets.  Agents keep
    their labeled ``goal`` fields, which double as the canonical assignment.
    """

    grid: GridMap
    agents: tuple[AgentTask, ...]
    directions: DirectionSet
    teams: Optional[Mapping[str, frozenset[Cell]]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        starts = [a.start for a in self.agents]
        goals = [a.goal for a in self.agents]
        for a in self.agents:
            if not self.grid.is_free(a.start):
                raise ValueError(f"agent {a.id}: start {a.start} is not a free cell")
            if not self.grid.is_free(a.goal):
                raise ValueError(f"agent {a.id}: goal {a.goal} is not a free cell")
        if len(set(starts)) != len(starts):
            raise ValueError("agent starts must be pairwise distinct")
        if len(set(goals)) != len(goals):
            raise ValueError("agent goals must be pairwise distinct")
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValueError("agent ids must be unique")
        if self.teams is not None:
            sizes: dict[str, int] = {}
            for a in self.agents:
                if a.team is None:
                    raise ValueError(f"agent {a.id} has no team in a colored instance")
                if a.team not in self.teams:
                    raise ValueError(f"agent {a.id}: unknown team {a.team!r}")
                sizes[a.team] = sizes.get(a.team, 0) + 1
            for team, targets in self.teams.items():
                if sizes.get(team, 0) != len(targets):
                    raise ValueError(
                        f"team {team!r}: {len(targets)} targets for {sizes.get(team, 0)} agents"
                    )
                for cell in targets:
                    if not self.grid.is_free(cell):
                        raise ValueError(f"team {team!r}: target {cell} is not free")

    @property
    def num_agents(self) -> int:
        return len(self.agents)


@dataclass(frozen=True)
class TimedPath:
    """A timed path: ``cells[t]`` is the agent's cell at step ``t``.

    The sequence ends the first time the agent reaches its final cell and
    rests there forever; the agent implicitly stays at ``cells[-1]`` for all
    later times.  ``cost`` is that arrival index.
    """

    cells: tuple[Cell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("a timed path needs at least one cell")
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.cells) > 1 and self.cells[-1] == self.cells[-2]:
            raise ValueError("timed path must be normalized (no trailing rest steps)")

    @classmethod
    def from_cells(cls, cells: Sequence[Cell]) -> "TimedPath":
        """Build a path, trimming any trailing waits at the final cell."""
        cells = list(cells)
        while len(cells) > 1 and cells[-1] == cells[-2]:
            cells.pop()
        return cls(tuple(cells))

    @property
    def cost(self) -> int:
        return len(self.cells) - 1

    @property
    def start(self) -> Cell:
        return self.cells[0]

    @property
    def end(self) -> Cell:
        return self.cells[-1]

    def at(self, t: int) -> Cell:
        """Position at time ``t`` with stay-at-target padding."""
        return self.cells[t] if t < len(self.cells) else self.cells[-1]


@dataclass(frozen=True)
class Solution:
    """One timed path per agent, in instance agent order."""

    paths: tuple[TimedPath, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))

    def flowtime(self) -> int:
        return sum(p.cost for p in self.paths)

    def makespan(self) -> int:
        return max((p.cost for p in self.paths), default=0)


@dataclass(frozen=True)
class ConflictModel:
    """Which interaction types count as conflicts.

    Vertex and edge conflicts are always forbidden in the default model;
    following and cycle conflicts are opt-in.
    """

    forbid_vertex: bool = True
    forbid_edge: bool = True
    forbid_following: bool = False
    forbid_cycle: bool = False

    def forbids_subset_of(self, other: "ConflictModel") -> bool:
        """True if every conflict kind this model forbids, ``other`` forbids too."""
        return (
            (not self.forbid_vertex or other.forbid_vertex)
            and (not self.forbid_edge or other.forbid_edge)
            and (not self.forbid_following or other.forbid_following)
            and (not self.forbid_cycle or other.forbid_cycle)
        )


VERTEX_EDGE = ConflictModel()
ALL_CONFLICTS = ConflictModel(forbid_following=True, forbid_cycle=True)


class Conflict(NamedTuple):
    time: int
    kind: str  # vertex | edge | following | cycle | illegal-step
    agents: tuple[int, ...]
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class ConflictReport:
    conflicts: tuple[Conflict, ...]

    @property
    def ok(self) -> bool:
        return not self.conflicts

    def kinds(self) -> set[str]:
        return {c.kind for c in self.conflicts}


def neighbors(grid: GridMap, cell: Cell, dirs: DirectionSet) -> list[Cell]:
    """Free cells reachable from ``cell`` in one motion step (waits excluded)."""
    if not grid.is_free(cell):
        raise ValueError(f"{cell} is not a free cell of the grid")
    result = []
    for d in dirs.ordered():
        nxt = d.apply(cell)
        if grid.is_free(nxt):
            result.append(nxt)
    return result


def shortest_dist_field(grid: GridMap, goal: Cell, dirs: DirectionSet) -> dict[Cell, int]:
    """Exact move count from every free cell to ``goal`` under ``dirs``.

    Cells absent from the returned mapping cannot reach the goal.  Computed
    by BFS from the goal over reversed moves; waits never shorten a path and
    are ignored.
    """
    if not grid.is_free(goal):
        raise ValueError(f"goal {goal} is not a free cell of the grid")
    reverse = [
        Direction((-d.dcol, -d.drow)) for d in dirs.ordered()
    ]
    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        cur = queue.popleft()
        d0 = dist[cur]
        for d in reverse:
            prev = d.apply(cur)
            if prev not in dist and grid.is_free(prev):
                dist[prev] = d0 + 1
                queue.append(prev)
    return dist


def _team_assignment_ok(instance: Instance, solution: Solution) -> Optional[str]:
    """Check that paths end on a bijection of each team's targets."""
    assert instance.teams is not None
    used: dict[str, set[Cell]] = {team: set() for team in instance.teams}
    for agent, path in zip(instance.agents, solution.paths):
        targets = instance.teams[agent.team]
        if path.end not in targets:
            return f"agent {agent.id} ends at {path.end}, not a team {agent.team!r} target"
        if path.end in used[agent.team]:
            return f"target {path.end} of team {agent.team!r} used twice"
        used[agent.team].add(path.end)
    return None


def validate_solution(
    instance: Instance,
    solution: Solution,
    model: ConflictModel = VERTEX_EDGE,
) -> ConflictReport:
    """Scan a solution for conflicts and malformed steps.

    Paths are padded at their final cell forever after arrival, so a parked
    agent keeps participating in vertex conflicts.  Raises ``ValueError`` on
    structural mismatch (wrong path count, wrong start, wrong goal); every
    other defect is reported as a conflict entry.
    """
    if len(solution.paths) != instance.num_agents:
        raise ValueError(
            f"solution has {len(solution.paths)} paths for {instance.num_agents} agents"
        )
    for agent, path in zip(instance.agents, solution.paths):
        if path.start != agent.start:
            raise ValueError(f"agent {agent.id}: path starts at {path.start}, not {agent.start}")
    if instance.teams is None:
        for agent, path in zip(instance.agents, solution.paths):
            if path.end != agent.goal:
                raise ValueError(f"agent {agent.id}: path ends at {path.end}, not {agent.goal}")
    else:
        problem = _team_assignment_ok(instance, solution)
        if problem is not None:
            raise ValueError(problem)

    conflicts: list[Conflict] = []
    ids = [a.id for a in instance.agents]
    paths = solution.paths
    n = len(paths)
    horizon = max((len(p.cells) for p in paths), default=1)

    # Malformed single-agent steps.
    for idx, path in enumerate(paths):
        for t, cell in enumerate(path.cells):
            if not instance.grid.is_free(cell):
                conflicts.append(Conflict(t, "illegal-step", (ids[idx],), (cell,)))
        for t in range(1, len(path.cells)):
            a, b = path.cells[t - 1], path.cells[t]
            d = direction_between(a, b)
            if d is None:
                conflicts.append(Conflict(t, "illegal-step", (ids[idx],), (a, b)))
            elif d is Direction.WAIT:
                if not instance.directions.waits_allowed:
                    conflicts.append(Conflict(t, "illegal-step", (ids[idx],), (a,)))
            elif d not in instance.directions:
                conflicts.append(Conflict(t, "illegal-step", (ids[idx],), (a, b)))

    # Pairwise conflicts, time step by time step.
    for t in range(horizon):
        here = [p.at(t) for p in paths]
        if model.forbid_vertex:
            seen: dict[Cell, int] = {}
            for i, cell in enumerate(here):
                if cell in seen:
                    conflicts.append(
                        Conflict(t, "vertex", (ids[seen[cell]], ids[i]), (cell,))
                    )
                else:
                    seen[cell] = i
        if t == 0:
            continue
        prev = [p.at(t - 1) for p in paths]
        if model.forbid_edge:
            for i in range(n):
                for j in range(i + 1, n):
                    if prev[i] != here[i] and here[i] == prev[j] and here[j] == prev[i]:
                        conflicts.append(
                            Conflict(t, "edge", (ids[i], ids[j]), (prev[i], here[i]))
                        )
        if model.forbid_following:
            for i in range(n):
                if here[i] == prev[i]:
                    continue
                for j in range(n):
                    if j != i and here[i] == prev[j] and here[j] != prev[j]:
                        conflicts.append(
                            Conflict(t, "following", (ids[i], ids[j]), (here[i],))
                        )
        if model.forbid_cycle:
            at_prev = {prev[i]: i for i in range(n)}
            in_cycle: set[int] = set()
            for start_i in range(n):
                if start_i in in_cycle or here[start_i] == prev[start_i]:
                    continue
                chain = [start_i]
                cur = start_i
                while True:
                    nxt = at_prev.get(here[cur])
                    if nxt is None or here[nxt] == prev[nxt]:
                        break
                    if nxt == start_i:
                        if len(chain) >= 2:
                            members = tuple(sorted(ids[k] for k in chain))
                            conflicts.append(
                                Conflict(t, "cycle", members, tuple(prev[k] for k in chain))
                            )
                            in_cycle.update(chain)
                        break
                    if nxt in chain:
                        break
                    chain.append(nxt)
                    cur = nxt
    return ConflictReport(tuple(conflicts))


def lower_bound_cost(instance: Instance) -> Optional[int]:
    """Sum of the agents' individually optimal path lengths, or None if some
    agent cannot reach its goal at all."""
    total = 0
    for agent in instance.agents:
        field_map = shortest_dist_field(instance.grid, agent.goal, instance.directions)
        d = field_map.get(agent.start)
        if d is None:
            return None
        total += d
    return total


def is_individually_optimal(instance: Instance, solution: Solution) -> bool:
    """True iff the solution's flowtime equals the instance lower bound.

    Equivalently, every agent moves along some shortest path at every step
    with no waits.  The solution must be conflict-free under the default
    model; an invalid solution raises ``ValueError``.
    """
    report = validate_solution(instance, solution, VERTEX_EDGE)
    if not report.ok:
        raise ValueError(f"solution has conflicts: {report.conflicts[:3]}")
    bound = lower_bound_cost(instance)
    if bound is None:
        return False
    return solution.flowtime() == bound
