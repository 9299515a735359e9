"""Lower a monotone nested formula into a grid MAPF decision instance.

The emitted instance has one agent per clause and admits an individually
optimal flowtime solution exactly when the formula is satisfiable.  Each
variable becomes a long one-cell-wide vertical channel; a positive
agent's shortest paths all cross some channel of its clause's variables
top-to-bottom, a negative agent's bottom-to-top, and the channels are
long enough that opposite traversal directions cannot share a channel
without someone waiting.  Which direction each channel is traversed in
therefore encodes a truth assignment.

Layout summary (rows grow downward):

* a variable row band in the middle: a horizontal collector corridor per
  variable on each side, the channel hanging between them;
* clause corridors above (positive) and below (negative) the band, at a
  height proportional to their nesting level, with vertical legs down to
  the collectors of their variables; the innermost clause holding a
  variable owns the channel column itself;
* "ladders" that let agents of the opposite sign climb from a clause
  corridor to its parent's corridor, entered through a notch that
  requires one move in the vertical direction the same-sign agents never
  take;
* a single opening cell at the far right of each root corridor, with the
  opposite sign's targets stacked beyond it, farthest target assigned to
  the earliest arriving agent.

Every start cell sits at a distinct right+vertical distance from its
sign's opening, with pairwise gaps of at least two, so same-sign agents
can never collide (or even follow each other) while all of them advance
toward the opening every step.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    AgentTask,
    Cell,
    DirectionSet,
    DOWN_RIGHT,
    FOUR_DIRECTIONS,
    GridMap,
    Instance,
    Solution,
    THREE_DIRECTIONS,
    TimedPath,
    UP_RIGHT,
    is_individually_optimal,
    shortest_dist_field,
)
from .formula import (
    Clause,
    MonotoneFormula,
    NestingForest,
    Side,
    evaluate,
    validate_planar_monotone,
)


class LayoutError(ValueError):
    """The formula cannot be laid out under the straight-leg discipline."""


#: Pinned factor for the construction size check: grid cells never exceed
#: this multiple of m^3 + n*m^2 on any accepted formula.  The ratio peaks
#: on single-clause layouts (observed maximum 70); larger formulas sit far
#: below it because the asymptotic terms dominate.
CELL_BUDGET_FACTOR = 128


@dataclass(frozen=True)
class ChannelSpec:
    """A variable channel: column plus the rows of its interior cells."""

    var: int
    col: int
    top_row: int
    bottom_row: int

    @property
    def length(self) -> int:
        return self.bottom_row - self.top_row + 1

    def cells(self) -> tuple[Cell, ...]:
        return tuple(Cell(self.col, r) for r in range(self.top_row, self.bottom_row + 1))


@dataclass(frozen=True)
class LadderSpec:
    """One straight piece of a ladder or channel connector, for rendering."""

    owner_kind: str  # "clause" or "var"
    owner_id: int
    kind: str  # "v" for a column piece, "h" for a row piece
    fixed: int  # the column (v) or row (h)
    lo: int
    hi: int


@dataclass(frozen=True)
class ReductionMetadata:
    """Layout ledger of a compiled instance.

    Agent ids equal clause ids.  ``channel_length`` is the number of
    interior cells of every channel and also the largest channel-entry
    distance of any agent; ``unit`` is the per-nesting-level height step;
    ``common_distance`` is the shared start-goal distance of the makespan
    variant (None for the base instance).
    """

    variant: str
    w_total: int
    w_coarse_bound: int
    unit: int
    channel_length: int
    common_distance: Optional[int]
    c: Cell
    c_prime: Cell
    channels: tuple[ChannelSpec, ...]
    ladders: tuple[LadderSpec, ...]
    formula: MonotoneFormula

    def channel_by_var(self, var: int) -> Optional[ChannelSpec]:
        for ch in self.channels:
            if ch.var == var:
                return ch
        return None

    def opening(self, side: Side) -> Cell:
        """The opening a given sign's agents pass through: c' for positive."""
        return self.c_prime if side is Side.POSITIVE else self.c

    def sign_directions(self, side: Side) -> DirectionSet:
        return DOWN_RIGHT if side is Side.POSITIVE else UP_RIGHT

    def entry_cell(self, side: Side, channel: ChannelSpec) -> Cell:
        """First channel interior cell an agent of this sign reaches."""
        row = channel.top_row if side is Side.POSITIVE else channel.bottom_row
        return Cell(channel.col, row)

    def exit_cell(self, side: Side, channel: ChannelSpec) -> Cell:
        """First cell beyond the channel interior in travel direction."""
        row = channel.bottom_row + 1 if side is Side.POSITIVE else channel.top_row - 1
        return Cell(channel.col, row)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ConstructionReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.ok)


def _routability_precheck(formula: MonotoneFormula, forest: NestingForest) -> None:
    """Reject formulas whose legs cannot be drawn as straight columns.

    A clause's leg to variable v descends past the corridors of every
    deeper clause on its side; a deeper clause whose interval reaches v
    from the left would be crossed.  Sharing v is fine exactly when v is
    the deeper clause's leftmost variable (its corridor then starts at
    its own leg and the shallower legs fit to the left of it).
    """
    for side in (Side.POSITIVE, Side.NEGATIVE):
        group = formula.side_clauses(side)
        for z in group:
            for v in z.vars:
                for e in group:
                    if e.id == z.id or forest.levels[e.id] >= forest.levels[z.id]:
                        continue
                    lo, hi = e.interval
                    if lo < v <= hi:
                        raise LayoutError(
                            f"clause {z.id}: leg to variable {v} would cross clause "
                            f"{e.id} spanning {e.interval}; a nested clause may share "
                            f"a variable only as its leftmost one"
                        )


@dataclass
class _ColumnPlan:
    width: int
    x: dict[int, int]  # variable -> channel column
    slot: dict[tuple[Side, int, int], int]  # (side, clause, var) -> leg column
    ladder_col: dict[tuple[Side, int], int]  # (side, clause) -> ladder column
    connector_col: dict[tuple[Side, int], int]  # (side, var) -> connector column
    rightmost: int  # X_right: opening / stack column


def _plan_columns(formula: MonotoneFormula, forest: NestingForest) -> _ColumnPlan:
    """Assign every vertical structure an even column, two apart.

    Per variable, left to right: the leg slots (deepest clause rightmost,
    owning the channel column), then in the gap after it the ladder
    columns of clauses whose interval ends at this variable, then any
    connector column for a side the variable does not occur on.
    """
    occurring = sorted({v for c in formula.clauses for v in c.vars})
    chains: dict[tuple[Side, int], list[Clause]] = {}
    for side in (Side.POSITIVE, Side.NEGATIVE):
        for c in formula.side_clauses(side):
            for v in c.vars:
                chains.setdefault((side, v), []).append(c)
    for key in chains:
        chains[key].sort(key=lambda c: forest.levels[c.id])

    x: dict[int, int] = {}
    slot: dict[tuple[Side, int, int], int] = {}
    ladder_col: dict[tuple[Side, int], int] = {}
    connector_col: dict[tuple[Side, int], int] = {}
    cursor = 0
    for v in occurring:
        pos_chain = chains.get((Side.POSITIVE, v), [])
        neg_chain = chains.get((Side.NEGATIVE, v), [])
        slots_needed = max(len(pos_chain), len(neg_chain))
        x[v] = cursor + 2 * (slots_needed - 1)
        for side, chain in ((Side.POSITIVE, pos_chain), (Side.NEGATIVE, neg_chain)):
            for k, clause in enumerate(chain):
                slot[(side, clause.id, v)] = x[v] - 2 * k
        cursor = x[v] + 2
        for side in (Side.POSITIVE, Side.NEGATIVE):
            enders = [
                c
                for c in formula.side_clauses(side)
                if c.interval[1] == v and forest.parent[c.id] is not None
            ]
            enders.sort(key=lambda c: forest.levels[c.id])
            for c in enders:
                ladder_col[(side, c.id)] = cursor
                cursor += 2
        for side in (Side.POSITIVE, Side.NEGATIVE):
            if not chains.get((side, v)) and (
                chains.get((side.opposite, v))
            ):
                connector_col[(side, v)] = cursor
                cursor += 2
    rightmost = cursor
    return _ColumnPlan(
        width=rightmost + 1,
        x=x,
        slot=slot,
        ladder_col=ladder_col,
        connector_col=connector_col,
        rightmost=rightmost,
    )


def compute_w(formula: MonotoneFormula, forest: Optional[NestingForest] = None) -> tuple[int, int]:
    """Final column count of the layout plus the coarse 6m a-priori bound."""
    forest = forest or validate_planar_monotone(formula)
    plan = _plan_columns(formula, forest)
    return plan.width, 6 * max(1, formula.num_clauses)


class _Segments:
    """Free cells built from straight runs, tracking legal adjacencies."""

    def __init__(self) -> None:
        self.free: set[Cell] = set()
        self.allowed: set[frozenset[Cell]] = set()

    def add_run(self, cells: Sequence[Cell]) -> None:
        prev: Optional[Cell] = None
        for cell in cells:
            self.free.add(cell)
            if prev is not None:
                self.allowed.add(frozenset((prev, cell)))
            prev = cell

    def h_run(self, row: int, col_lo: int, col_hi: int) -> None:
        self.add_run([Cell(c, row) for c in range(col_lo, col_hi + 1)])

    def v_run(self, col: int, row_lo: int, row_hi: int) -> None:
        self.add_run([Cell(col, r) for r in range(row_lo, row_hi + 1)])

    def audit(self) -> None:
        for cell in self.free:
            for other in (Cell(cell.col + 1, cell.row), Cell(cell.col, cell.row + 1)):
                if other in self.free and frozenset((cell, other)) not in self.allowed:
                    raise LayoutError(f"accidental corridor adjacency {cell} / {other}")


def compile_formula(
    formula: MonotoneFormula,
    forest: Optional[NestingForest] = None,
    *,
    max_cells: int = 2_000_000,
) -> tuple[Instance, ReductionMetadata]:
    """Build the grid decision instance and its layout metadata.

    One agent per clause (agent id = clause id), allowed directions up,
    down and right.  The instance has an individually optimal flowtime
    solution exactly when the formula is satisfiable.
    """
    forest = forest or validate_planar_monotone(formula)
    _routability_precheck(formula, forest)
    plan = _plan_columns(formula, forest)

    unit = plan.width + 2
    levels = forest.levels

    def height_of(clause_id: int) -> int:
        return (levels[clause_id] + 1) * unit

    pos_clauses = formula.side_clauses(Side.POSITIVE)
    neg_clauses = formula.side_clauses(Side.NEGATIVE)
    m_pos, m_neg = len(pos_clauses), len(neg_clauses)

    max_height_pos = max((height_of(c.id) for c in pos_clauses), default=unit)
    max_height_neg = max((height_of(c.id) for c in neg_clauses), default=unit)

    def start_col(c: Clause) -> int:
        return plan.slot[(c.side, c.id, c.vars[0])]

    # Channel length: the largest distance any agent needs to reach the first
    # interior cell of one of its clause's channels.  Row geometry inside each
    # sign's territory is translation independent, so this is computable
    # before the rows are pinned.
    entry_dists = [
        (plan.x[v] - start_col(c)) + height_of(c.id) + 1
        for c in formula.clauses
        for v in c.vars
    ]
    channel_length = max(entry_dists, default=0)

    pos_root_row = 2 * m_neg + 1
    r_top = pos_root_row + max_height_pos
    r_bot = r_top + channel_length + 1
    neg_root_row = r_bot + max_height_neg
    c_cell = Cell(plan.rightmost, pos_root_row - 1)
    c_prime = Cell(plan.rightmost, neg_root_row + 1)
    height = c_prime.row + 2 * m_pos + 1

    def corridor_row(c: Clause) -> int:
        if c.side is Side.POSITIVE:
            return r_top - height_of(c.id)
        return r_bot + height_of(c.id)

    seg = _Segments()
    ladders: list[LadderSpec] = []

    # Clause corridors, legs, ladders.
    right_end: dict[int, int] = {}
    for c in formula.clauses:
        own = plan.slot[(c.side, c.id, c.vars[-1])]
        kid_ladders = [
            plan.ladder_col[(c.side, k)]
            for k in forest.children.get(c.id, ())
            if (c.side, k) in plan.ladder_col
        ]
        if forest.parent[c.id] is None:
            right_end[c.id] = plan.rightmost
        else:
            right_end[c.id] = max([own] + kid_ladders)
    for c in formula.clauses:
        row = corridor_row(c)
        seg.h_run(row, start_col(c), right_end[c.id])
        for v in c.vars:
            col = plan.slot[(c.side, c.id, v)]
            if c.side is Side.POSITIVE:
                seg.v_run(col, row, r_top)
            else:
                seg.v_run(col, r_bot, row)
        parent = forest.parent[c.id]
        if parent is not None:
            lad = plan.ladder_col[(c.side, c.id)]
            p_row = corridor_row(formula.clause_by_id(parent))
            notch_row = row - 1 if c.side is Side.POSITIVE else row + 1
            # notch step off the corridor, run to the ladder column, climb.
            seg.v_run(
                right_end[c.id],
                min(row, notch_row),
                max(row, notch_row),
            )
            seg.h_run(notch_row, right_end[c.id], lad)
            seg.v_run(lad, min(p_row, notch_row), max(p_row, notch_row))
            ladders.append(
                LadderSpec("clause", c.id, "h", notch_row, right_end[c.id], lad)
            )
            ladders.append(
                LadderSpec(
                    "clause", c.id, "v", lad, min(p_row, notch_row), max(p_row, notch_row)
                )
            )

    # Variable collectors, channels, connectors.  A connector stands in for
    # the missing side's legs: it descends (or rises) from the channel end
    # until it meets the corridor of the innermost clause whose interval
    # spans its gap, or the root row when no clause does.
    channels: list[ChannelSpec] = []
    uncovered_connectors: dict[Side, list[int]] = {Side.POSITIVE: [], Side.NEGATIVE: []}
    occurring = sorted({v for c in formula.clauses for v in c.vars})
    for v in occurring:
        for side, band_row in ((Side.POSITIVE, r_top), (Side.NEGATIVE, r_bot)):
            slots = [
                plan.slot[(side, c.id, v)]
                for c in formula.side_clauses(side)
                if v in c.vars
            ]
            if slots:
                seg.h_run(band_row, min(slots), plan.x[v])
                continue
            conn = plan.connector_col[(side, v)]
            seg.h_run(band_row, plan.x[v], conn)
            coverers = [
                c
                for c in formula.side_clauses(side)
                if c.interval[0] <= v < c.interval[1]
            ]
            if coverers:
                target = min(coverers, key=lambda c: levels[c.id])
                end_row = corridor_row(target)
            else:
                end_row = pos_root_row if side is Side.POSITIVE else neg_root_row
                uncovered_connectors[side].append(conn)
            seg.v_run(conn, min(band_row, end_row), max(band_row, end_row))
            ladders.append(
                LadderSpec("var", v, "v", conn, min(band_row, end_row), max(band_row, end_row))
            )
            ladders.append(LadderSpec("var", v, "h", band_row, plan.x[v], conn))
        seg.v_run(plan.x[v], r_top, r_bot)
        channels.append(ChannelSpec(v, plan.x[v], r_top + 1, r_bot - 1))

    # Root corridors exist even on a side without clauses, to host the
    # opening; they stretch left as far as the leftmost connector that had
    # to come all the way to the root row.
    pos_root = forest.roots[Side.POSITIVE]
    neg_root = forest.roots[Side.NEGATIVE]
    for side, root, row in (
        (Side.POSITIVE, pos_root, pos_root_row),
        (Side.NEGATIVE, neg_root, neg_root_row),
    ):
        risers = uncovered_connectors[side]
        if root is None:
            seg.h_run(row, min(risers, default=plan.rightmost), plan.rightmost)
        elif risers:
            left = min(min(risers), start_col(formula.clause_by_id(root)))
            seg.h_run(row, left, plan.rightmost)

    # Openings and target stacks (targets every other row so parked agents
    # and private makespan extensions never touch).
    seg.v_run(plan.rightmost, pos_root_row - max(1, 2 * m_neg), pos_root_row)
    seg.v_run(plan.rightmost, neg_root_row, neg_root_row + max(1, 2 * m_pos))

    # Starts, opening distances, target assignment.
    def opening_distance(c: Clause) -> int:
        row = corridor_row(c)
        if c.side is Side.POSITIVE:
            return (plan.rightmost - start_col(c)) + (c_prime.row - row)
        return (plan.rightmost - start_col(c)) + (row - c_cell.row)

    targets: dict[int, Cell] = {}
    for side, clauses, opening in (
        (Side.POSITIVE, pos_clauses, c_prime),
        (Side.NEGATIVE, neg_clauses, c_cell),
    ):
        dists = sorted((opening_distance(c), c.id) for c in clauses)
        for i in range(1, len(dists)):
            if dists[i][0] - dists[i - 1][0] < 2:
                raise LayoutError(
                    f"opening distances of clauses {dists[i - 1][1]} and "
                    f"{dists[i][1]} are not two apart"
                )
        count = len(clauses)
        for rank, (_, cid) in enumerate(dists):
            depth = 2 * (count - rank) - 1
            if side is Side.POSITIVE:
                targets[cid] = Cell(opening.col, opening.row + depth)
            else:
                targets[cid] = Cell(opening.col, opening.row - depth)

    if plan.width * height > max_cells:
        raise LayoutError(
            f"layout needs {plan.width * height} cells, over the cap of {max_cells}"
        )

    seg.audit()
    obstacles = frozenset(
        Cell(col, row)
        for row in range(height)
        for col in range(plan.width)
        if Cell(col, row) not in seg.free
    )
    grid = GridMap(plan.width, height, obstacles)
    agents = tuple(
        AgentTask(
            id=c.id,
            start=Cell(start_col(c), corridor_row(c)),
            goal=targets[c.id],
        )
        for c in formula.clauses
    )
    instance = Instance(grid, agents, THREE_DIRECTIONS)
    meta = ReductionMetadata(
        variant="base",
        w_total=plan.width,
        w_coarse_bound=6 * max(1, formula.num_clauses),
        unit=unit,
        channel_length=channel_length,
        common_distance=None,
        c=c_cell,
        c_prime=c_prime,
        channels=tuple(channels),
        ladders=tuple(ladders),
        formula=formula,
    )
    _compile_sanity(instance, meta, forest)
    return instance, meta


def _compile_sanity(instance: Instance, meta: ReductionMetadata, forest: NestingForest) -> None:
    """Cheap invariants that catch layout bugs at compile time."""
    agents = {a.id: a for a in instance.agents}
    for c in meta.formula.clauses:
        dirs = meta.sign_directions(c.side)
        agent = agents[c.id]
        field = shortest_dist_field(instance.grid, agent.goal, dirs)
        total = field.get(agent.start)
        if total is None:
            raise LayoutError(f"agent {c.id} cannot reach its target monotonically")
        for v in c.vars:
            channel = meta.channel_by_var(v)
            assert channel is not None
            entry_field = shortest_dist_field(
                instance.grid, meta.entry_cell(c.side, channel), dirs
            )
            d = entry_field.get(agent.start)
            if d is None or d > meta.channel_length:
                raise LayoutError(
                    f"agent {c.id}: channel {v} entry distance {d} exceeds "
                    f"channel length {meta.channel_length}"
                )


def compute_l(instance: Instance, meta: ReductionMetadata) -> int:
    """Largest channel-entry distance over agents and their usable channels.

    Recomputed from scratch with direction-restricted BFS; the compiled
    layout sets the channel length to exactly this value.
    """
    worst = 0
    agents = {a.id: a for a in instance.agents}
    for c in meta.formula.clauses:
        dirs = meta.sign_directions(c.side)
        for v in c.vars:
            channel = meta.channel_by_var(v)
            if channel is None:
                continue
            field = shortest_dist_field(instance.grid, meta.entry_cell(c.side, channel), dirs)
            d = field.get(agents[c.id].start)
            if d is not None:
                worst = max(worst, d)
    return worst


def makespan_variant(
    instance: Instance, meta: ReductionMetadata
) -> tuple[Instance, ReductionMetadata]:
    """Equalize every agent's shortest distance by extending targets rightward.

    Each target moves to the end of a private dead-end corridor in its own
    row so that all start-goal distances equal the previous maximum d; the
    result has a makespan-d solution exactly when the base instance has an
    individually optimal one.
    """
    if meta.variant != "base":
        raise ValueError("makespan_variant starts from the base instance")
    dists: dict[int, int] = {}
    for agent in instance.agents:
        field = shortest_dist_field(instance.grid, agent.goal, instance.directions)
        d = field.get(agent.start)
        assert d is not None
        dists[agent.id] = d
    common = max(dists.values(), default=0)

    extension_cells: set[Cell] = set()
    new_goals: dict[int, Cell] = {}
    for agent in instance.agents:
        ext = common - dists[agent.id]
        new_goals[agent.id] = Cell(agent.goal.col + ext, agent.goal.row)
        for k in range(1, ext + 1):
            extension_cells.add(Cell(agent.goal.col + k, agent.goal.row))
    new_width = max(
        [instance.grid.width] + [g.col + 1 for g in new_goals.values()]
    )
    free = set()
    for row in range(instance.grid.height):
        for col in range(instance.grid.width):
            cell = Cell(col, row)
            if instance.grid.is_free(cell):
                free.add(cell)
    free |= extension_cells
    obstacles = frozenset(
        Cell(col, row)
        for row in range(instance.grid.height)
        for col in range(new_width)
        if Cell(col, row) not in free
    )
    grid = GridMap(new_width, instance.grid.height, obstacles)
    agents = tuple(
        AgentTask(id=a.id, start=a.start, goal=new_goals[a.id], team=a.team)
        for a in instance.agents
    )
    new_meta = dataclasses.replace(
        meta, variant="makespan", common_distance=common, w_total=new_width
    )
    return Instance(grid, agents, instance.directions), new_meta


def two_colored_variant(instance: Instance, meta: ReductionMetadata) -> Instance:
    """Group agents into a positive and a negative team sharing target stacks."""
    side_of = {c.id: c.side for c in meta.formula.clauses}
    agents = tuple(
        AgentTask(id=a.id, start=a.start, goal=a.goal, team=side_of[a.id].value)
        for a in instance.agents
    )
    teams: dict[str, frozenset[Cell]] = {}
    for side in (Side.POSITIVE, Side.NEGATIVE):
        members = [a for a in agents if a.team == side.value]
        if members:
            teams[side.value] = frozenset(a.goal for a in members)
    return Instance(instance.grid, agents, instance.directions, teams=teams)


def _walk(grid: GridMap, dirs: DirectionSet, a: Cell, b: Cell) -> list[Cell]:
    """A deterministic shortest path from a to b under the given directions."""
    field = shortest_dist_field(grid, b, dirs)
    if a not in field:
        raise LayoutError(f"no route {a} -> {b}")
    cells = [a]
    cur = a
    while cur != b:
        for d in dirs.ordered():
            nxt = d.apply(cur)
            if grid.is_free(nxt) and field.get(nxt, -1) == field[cur] - 1:
                cur = nxt
                cells.append(cur)
                break
        else:
            raise LayoutError(f"walk stuck at {cur} heading for {b}")
    return cells


def realize_solution(
    instance: Instance, meta: ReductionMetadata, assignment: Sequence[bool]
) -> Solution:
    """The canonical individually optimal solution for a satisfying assignment.

    Every agent moves toward its target each step, routed through the
    channel of its clause's first variable whose assigned value matches the
    clause's sign (true for positive clauses, false for negative ones).
    """
    if not evaluate(meta.formula, assignment):
        raise ValueError("assignment does not satisfy the formula")
    agents = {a.id: a for a in instance.agents}
    paths = []
    for c in meta.formula.clauses:
        want = c.side is Side.POSITIVE
        chosen = next(v for v in c.vars if assignment[v - 1] == want)
        channel = meta.channel_by_var(chosen)
        assert channel is not None
        dirs = meta.sign_directions(c.side)
        agent = agents[c.id]
        entry = meta.entry_cell(c.side, channel)
        exit_ = meta.exit_cell(c.side, channel)
        cells = _walk(instance.grid, dirs, agent.start, entry)
        cells += _walk(instance.grid, dirs, entry, exit_)[1:]
        cells += _walk(instance.grid, dirs, exit_, agent.goal)[1:]
        paths.append(TimedPath(tuple(cells)))
    order = {a.id: i for i, a in enumerate(instance.agents)}
    ordered = [None] * len(paths)
    for c, p in zip(meta.formula.clauses, paths):
        ordered[order[c.id]] = p
    return Solution(tuple(ordered))


def extract_assignment(
    instance: Instance, meta: ReductionMetadata, solution: Solution
) -> tuple[bool, ...]:
    """Read a satisfying assignment off an individually optimal solution.

    A variable is true exactly when its channel is traversed by a positive
    agent; channels nobody uses default to true.  The solution must be
    individually optimal, otherwise channel usage proves nothing.
    """
    if not is_individually_optimal(instance, solution):
        raise ValueError("solution is not individually optimal")
    side_of = {c.id: c.side for c in meta.formula.clauses}
    values: dict[int, bool] = {}
    for agent, path in zip(instance.agents, solution.paths):
        side = side_of[agent.id]
        cells = set(path.cells)
        for channel in meta.channels:
            if cells & set(channel.cells()):
                value = side is Side.POSITIVE
                if values.get(channel.var, value) != value:
                    raise RuntimeError(
                        f"channel {channel.var} used by both signs in an "
                        f"individually optimal solution"
                    )
                values[channel.var] = value
    assignment = tuple(
        values.get(v, True) for v in range(1, meta.formula.num_vars + 1)
    )
    if not evaluate(meta.formula, assignment):
        raise RuntimeError("extracted assignment does not satisfy the formula")
    return assignment


def verify_construction(instance: Instance, meta: ReductionMetadata) -> ConstructionReport:
    """Independent structural checks of a compiled instance.

    Every check recomputes what it needs with plain BFS and counting; none
    of them trusts the compiler's arithmetic.
    """
    checks: list[CheckResult] = []
    agents = {a.id: a for a in instance.agents}
    clauses = meta.formula.clauses
    grid = instance.grid

    # start fields per agent under its sign's two directions
    start_fields: dict[int, dict[Cell, int]] = {}
    for c in clauses:
        dirs = meta.sign_directions(c.side)
        dist = {agents[c.id].start: 0}
        queue = deque([agents[c.id].start])
        while queue:
            cur = queue.popleft()
            for d in dirs.ordered():
                nxt = d.apply(cur)
                if grid.is_free(nxt) and nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        start_fields[c.id] = dist

    # 1. unique start-to-opening distances per sign
    problems = []
    for side in (Side.POSITIVE, Side.NEGATIVE):
        opening = meta.opening(side)
        seen: dict[int, int] = {}
        for c in clauses:
            if c.side is not side:
                continue
            d = start_fields[c.id].get(opening)
            if d is None:
                problems.append(f"agent {c.id} cannot reach the opening")
            elif d in seen:
                problems.append(
                    f"agents {seen[d]} and {c.id} share opening distance {d}"
                )
            else:
                seen[d] = c.id
    checks.append(CheckResult("unique-opening-distances", not problems, "; ".join(problems)))

    # 2. channels all have length L and identical row spans
    problems = []
    spans = {(ch.top_row, ch.bottom_row) for ch in meta.channels}
    if len(spans) > 1:
        problems.append(f"channel row spans differ: {sorted(spans)}")
    for ch in meta.channels:
        if ch.length != meta.channel_length:
            problems.append(
                f"channel {ch.var} has length {ch.length}, expected {meta.channel_length}"
            )
        for cell in ch.cells():
            if not grid.is_free(cell):
                problems.append(f"channel {ch.var} cell {cell} is not free")
                break
    checks.append(CheckResult("channel-geometry", not problems, "; ".join(problems)))

    # 3. every channel-entry distance is at most L
    problems = []
    for c in clauses:
        for v in c.vars:
            ch = meta.channel_by_var(v)
            if ch is None:
                problems.append(f"variable {v} has no channel")
                continue
            d = start_fields[c.id].get(meta.entry_cell(c.side, ch))
            if d is None:
                problems.append(f"agent {c.id} cannot enter channel {v}")
            elif d > meta.channel_length:
                problems.append(
                    f"agent {c.id} needs {d} steps into channel {v}, over {meta.channel_length}"
                )
    checks.append(CheckResult("entry-distances", not problems, "; ".join(problems)))

    # 4. openings dominate everything reachable before them
    problems = []
    for side in (Side.POSITIVE, Side.NEGATIVE):
        opening = meta.opening(side)
        dirs = meta.sign_directions(side)
        beyond = set(shortest_dist_field(grid, opening, dirs))
        after: set[Cell] = {opening}
        queue = deque([opening])
        while queue:
            cur = queue.popleft()
            for d in dirs.ordered():
                nxt = d.apply(cur)
                if grid.is_free(nxt) and nxt not in after:
                    after.add(nxt)
                    queue.append(nxt)
        for c in clauses:
            if c.side is not side:
                continue
            for cell in start_fields[c.id]:
                if cell in after and cell != opening:
                    continue
                ok_col = cell.col <= opening.col
                ok_row = cell.row <= opening.row if side is Side.POSITIVE else cell.row >= opening.row
                if not (ok_col and ok_row):
                    problems.append(
                        f"agent {c.id} reaches {cell}, not dominated by opening {opening}"
                    )
                    break
    checks.append(CheckResult("opening-dominates", not problems, "; ".join(problems)))

    # 5. a route through every clause variable's channel, all equal length
    problems = []
    for c in clauses:
        dirs = meta.sign_directions(c.side)
        agent = agents[c.id]
        goal_field = shortest_dist_field(grid, agent.goal, dirs)
        total = goal_field.get(agent.start)
        if total is None:
            problems.append(f"agent {c.id} cannot reach its target")
            continue
        for v in c.vars:
            ch = meta.channel_by_var(v)
            if ch is None:
                problems.append(f"variable {v} has no channel")
                continue
            d1 = start_fields[c.id].get(meta.entry_cell(c.side, ch))
            d2 = goal_field.get(meta.exit_cell(c.side, ch))
            if d1 is None or d2 is None:
                problems.append(f"agent {c.id} has no route through channel {v}")
            elif d1 + meta.channel_length + d2 != total:
                problems.append(
                    f"agent {c.id} via channel {v}: {d1}+{meta.channel_length}+{d2} != {total}"
                )
    checks.append(CheckResult("channel-routes-equal-length", not problems, "; ".join(problems)))

    # 6. no route bypasses all of the clause's channels
    problems = []
    for c in clauses:
        dirs = meta.sign_directions(c.side)
        agent = agents[c.id]
        blocked: set[Cell] = set()
        for v in c.vars:
            ch = meta.channel_by_var(v)
            if ch is not None:
                blocked.update(ch.cells())
        pruned = GridMap(grid.width, grid.height, grid.obstacles | frozenset(blocked))
        field = shortest_dist_field(pruned, agent.goal, dirs)
        if agent.start in field:
            problems.append(f"agent {c.id} can bypass its channels")
        for ch in meta.channels:
            if ch.var in c.vars:
                continue
            if meta.entry_cell(c.side, ch) in start_fields[c.id]:
                problems.append(f"agent {c.id} can enter foreign channel {ch.var}")
    checks.append(CheckResult("no-channel-bypass", not problems, "; ".join(problems)))

    # 7. construction size within the pinned budget; the makespan variant
    # may additionally widen the grid by up to its common distance for the
    # private target extensions
    m, n = meta.formula.num_clauses, meta.formula.num_vars
    cells = grid.width * grid.height
    budget = CELL_BUDGET_FACTOR * max(1, m**3 + n * m**2)
    if meta.variant == "makespan" and meta.common_distance is not None:
        budget += grid.height * meta.common_distance
    ok = cells <= budget
    checks.append(
        CheckResult(
            "cell-budget",
            ok,
            f"{cells} cells vs budget {budget}" if not ok else f"{cells} cells",
        )
    )

    # 8. two directions per sign suffice (left moves never help anyone)
    problems = []
    for c in clauses:
        agent = agents[c.id]
        free_field = shortest_dist_field(grid, agent.goal, FOUR_DIRECTIONS)
        sign_field = shortest_dist_field(grid, agent.goal, meta.sign_directions(c.side))
        d_free, d_sign = free_field.get(agent.start), sign_field.get(agent.start)
        if d_free != d_sign:
            problems.append(
                f"agent {c.id}: unrestricted distance {d_free} beats two-direction {d_sign}"
            )
    checks.append(CheckResult("two-directions-suffice", not problems, "; ".join(problems)))

    return ConstructionReport(tuple(checks))
