"""The cellular world: grid, cells, and the transmit/collect cell cycle.

A virtual particle is the set of cells currently living for one emission.
Each non-wall cell runs one ``cell_behavior`` on the shared scheduler. The
cycle of a triggered cell spans instants: it wakes in the instant it is
triggered, combines the collected activations and settles its state one
instant later, and one instant after that either retransmits to its three
forward neighbours or, if its measurement event fired, hands over to a
reduction. Every cycle ends with the cell reset to dead and state 0, so a
wavefront row advances every two instants.
"""

from __future__ import annotations

import random
from enum import Enum
from typing import NamedTuple, Optional

from .kernel import Await, Collect, Event, Scheduler
from .stats import RunStats


class CellKind(Enum):
    UP = "up"
    DOWN = "down"
    BRICK = "brick"


UP = CellKind.UP
DOWN = CellKind.DOWN
BRICK = CellKind.BRICK

# grid convention: UP means decreasing y, DOWN means increasing y
_DY = {UP: -1, DOWN: 1}


def direction_dy(kind: CellKind) -> int:
    return _DY[kind]


def opposite(kind: CellKind) -> CellKind:
    return DOWN if kind is UP else UP


class Holder:
    """A shared mutable slot, -1 meaning not yet assigned.

    Two measurement contexts may point at the same holder; that sharing is
    what ties an entangled pair to a single state choice.
    """

    __slots__ = ("value",)

    def __init__(self, value: int = -1):
        self.value = value

    def __repr__(self):
        return f"Holder({self.value})"


class MeasurementContext:
    """Everything that binds one superposition to one measurement.

    ``measure`` is the broadcast event a detector fires; ``signal`` is the
    roll-call event on which member cells report their identities during
    reduction; ``chosen`` holds the elected cell id and ``chosen_state`` the
    elected basic state. ``measure`` and ``chosen_state`` may be shared with
    a twin context (entanglement); ``signal`` and ``chosen`` never are.

    The trailing fields are an audit trail for collapse checks and carry no
    behavioral weight.
    """

    __slots__ = (
        "measure",
        "signal",
        "chosen",
        "chosen_state",
        "serial",
        "spawn_velocity",
        "live_count",
        "last_transmit",
        "last_reset",
    )

    def __init__(
        self,
        measure: Event,
        signal: Event,
        chosen: Holder,
        chosen_state: Holder,
        serial: int,
        spawn_velocity: Optional[tuple] = None,
    ):
        self.measure = measure
        self.signal = signal
        self.chosen = chosen
        self.chosen_state = chosen_state
        self.serial = serial
        self.spawn_velocity = spawn_velocity
        self.live_count = 0
        self.last_transmit = -1
        self.last_reset = -1


class Activation(NamedTuple):
    """What a cell tells a neighbour when triggering it."""

    kind: CellKind
    basic_state: int
    ctx: MeasurementContext


class Cell:
    """One grid site.

    ``kind``, ``basic_state`` and ``ctx`` are only meaningful while the cell
    is ``visible`` (between its combine step and its reset); outside that
    window they are leftovers of the previous cycle. ``kind`` is None until
    the first activation ever reaches the cell. BRICK cells have no trigger
    event and never run a behavior.
    """

    __slots__ = ("x", "y", "kind", "living", "basic_state", "trigger", "ctx", "visible")

    def __init__(self, x: int, y: int, kind: Optional[CellKind], trigger: Optional[Event]):
        self.x = x
        self.y = y
        self.kind = kind
        self.living = False
        self.basic_state = 0
        self.trigger = trigger
        self.ctx: Optional[MeasurementContext] = None
        self.visible = False

    def __repr__(self):
        return f"Cell({self.x},{self.y},{self.kind},s={self.basic_state})"


class Grid:
    """Dense cell array with a BRICK border ring."""

    def __init__(self, width: int, height: int, sched: Scheduler):
        if width < 3 or height < 3:
            raise ValueError("grid needs at least a border ring plus interior")
        self.width = width
        self.height = height
        cells = []
        for y in range(height):
            for x in range(width):
                border = x == 0 or y == 0 or x == width - 1 or y == height - 1
                if border:
                    cells.append(Cell(x, y, BRICK, None))
                else:
                    cells.append(Cell(x, y, None, sched.new_event()))
        self._cells = cells

    def cell(self, x: int, y: int) -> Cell:
        return self._cells[y * self.width + x]

    def kind_at(self, x: int, y: int) -> CellKind:
        if 0 <= x < self.width and 0 <= y < self.height:
            return self._cells[y * self.width + x].kind
        return BRICK

    def in_range(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def set_brick(self, x: int, y: int) -> None:
        c = self._cells[y * self.width + x]
        c.kind = BRICK
        c.trigger = None

    def linear(self, x: int, y: int) -> int:
        """Injective cell identity used on the reduction roll-call."""
        return y * self.width + x

    def cells(self):
        return iter(self._cells)

    def cell_in_direction(self, x: int, y: int, kind: CellKind) -> Cell:
        return self.cell(x, y + _DY[kind])


class World:
    """Grid, scheduler, RNG and run-wide registries for one simulation."""

    def __init__(
        self,
        width: int,
        height: int,
        seed: int = 0,
        base: int = 6,
        microstep_budget: int = 1_000_000,
    ):
        self.sched = Scheduler(microstep_budget)
        self.grid = Grid(width, height, self.sched)
        self.rng = random.Random(seed)
        self.seed = seed
        self.base = base
        # cell -> context registered when the cell became visible
        self.visible: dict[Cell, MeasurementContext] = {}
        self.particles: list = []
        self.sources: list = []
        self.detectors: list = []
        self.stats = RunStats()
        self.measure_enabled = True
        self.ctx_collisions = 0
        self.scenario_digest = "-"
        self._ctx_serial = 0

    def new_context(
        self,
        measure: Optional[Event] = None,
        chosen_state: Optional[Holder] = None,
        spawn_velocity: Optional[tuple] = None,
    ) -> MeasurementContext:
        """Fresh context; pass measure / chosen_state to share them."""
        ctx = MeasurementContext(
            measure if measure is not None else self.sched.new_event(),
            self.sched.new_event(),
            Holder(-1),
            chosen_state if chosen_state is not None else Holder(-1),
            self._ctx_serial,
            spawn_velocity,
        )
        self._ctx_serial += 1
        return ctx

    def spawn_cell_behaviors(self) -> int:
        """One behavior per non-BRICK cell, in row-major order."""
        n = 0
        for c in self.grid.cells():
            if c.kind is not BRICK:
                self.sched.spawn(cell_behavior(self, c))
                n += 1
        return n

    # -- liveness registry -------------------------------------------------

    def mark_visible(self, c: Cell) -> None:
        c.visible = True
        self.visible[c] = c.ctx
        c.ctx.live_count += 1

    def mark_erased(self, c: Cell) -> None:
        c.visible = False
        ctx = self.visible.pop(c)
        ctx.live_count -= 1
        ctx.last_reset = self.sched.clock

    def note_transmit(self, c: Cell) -> None:
        if c.ctx is not None:
            c.ctx.last_transmit = self.sched.clock

    def add_particle(self, p) -> None:
        from .particles import particle_behavior

        self.particles.append(p)
        self.sched.spawn(particle_behavior(self, p))

    # -- observation helpers ------------------------------------------------

    def snapshot(self, ctx: Optional[MeasurementContext] = None):
        """Sorted (x, y, state) triples of visible cells, optionally of one
        context only."""
        items = [
            (c.x, c.y, c.basic_state)
            for c, registered in self.visible.items()
            if ctx is None or registered is ctx
        ]
        items.sort()
        return items

    def superposition_census(self, ctx: MeasurementContext) -> tuple[int, ...]:
        counts = [0] * self.base
        for c, registered in self.visible.items():
            if registered is ctx:
                counts[c.basic_state] += 1
        return tuple(counts)

    def run(self, instants: int, on_instant=None, stop_on_quiet: bool = True) -> int:
        """Run up to ``instants`` instants; stops early once nothing can run.

        Returns the number of instants actually executed.
        """
        executed = 0
        for _ in range(instants):
            report = self.sched.run_instant()
            executed += 1
            if on_instant is not None:
                on_instant(self, report)
            if stop_on_quiet and self.sched.is_quiet():
                break
        return executed


# -- basic state arithmetic ---------------------------------------------------


def add_state(world: World, c: Cell, z: int) -> None:
    c.basic_state = (c.basic_state + z) % world.base


def increm_state(world: World, c: Cell) -> None:
    add_state(world, c, 1)


# -- triggering ---------------------------------------------------------------


def awake_neighbour(world: World, c: Cell, ix: int, iy: int) -> None:
    """Trigger the cell at the given offset; walls and off-grid are no-ops."""
    x = c.x + ix
    y = c.y + iy
    if not world.grid.in_range(x, y):
        return
    target = world.grid.cell(x, y)
    if target.kind is BRICK:
        return
    world.sched.generate(target.trigger, Activation(c.kind, c.basic_state, c.ctx))


def awake_neighbourhood(world: World, c: Cell) -> None:
    """Trigger the three forward neighbours (row above for UP, below for DOWN)."""
    if c.kind is UP:
        dy = -1
    elif c.kind is DOWN:
        dy = 1
    else:
        raise ValueError(f"cell at ({c.x},{c.y}) has no direction to transmit in")
    world.note_transmit(c)
    awake_neighbour(world, c, -1, dy)
    awake_neighbour(world, c, 0, dy)
    awake_neighbour(world, c, 1, dy)


def combine(world: World, c: Cell, a: Activation) -> None:
    """Merge a triggering neighbour into this cell: direction, state, context."""
    c.kind = a.kind
    add_state(world, c, a.basic_state)
    c.ctx = a.ctx


def cell_reset(world: World, c: Cell) -> None:
    c.basic_state = 0
    c.living = False
    if c.visible:
        world.mark_erased(c)


def cell_behavior(world: World, c: Cell):
    """The non-terminating cycle of one cell (see the module docstring)."""
    from .measure import reduce

    sched = world.sched
    wait_trigger = Await(c.trigger)
    collect_trigger = Collect(c.trigger)
    while True:
        if c.living:
            awake_neighbourhood(world, c)
        else:
            yield wait_trigger
            c.living = True
        activations = yield collect_trigger
        if activations:
            first_ctx = activations[0].ctx
            for a in activations:
                if a.ctx is not first_ctx:
                    world.ctx_collisions += 1
                    break
            for a in activations:
                combine(world, c, a)
        increm_state(world, c)
        world.mark_visible(c)
        measured = yield Collect(c.ctx.measure)
        if measured:
            done = sched.new_event()
            sched.spawn(reduce(world, c, done))
            yield Await(done)
        else:
            awake_neighbourhood(world, c)
        cell_reset(world, c)
