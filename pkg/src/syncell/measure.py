"""Measurement: detectors, the uniform choice, and the reduction protocol.

A detector broadcasts the measurement event of the first superposition it
sees; every member cell reacts by spawning a ``reduce`` behavior. The
reductions roll-call their identities on the context's signal event, one
identity is drawn uniformly, and only the elected cell turns into a real
particle. The whole protocol takes a fixed five instants from the
measurement broadcast to the last member reset, which is what makes
"the collapse is instantaneous" a checkable claim.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .kernel import Await, COOPERATE, Collect
from .particles import RealParticle
from .stats import DetectionRecord, ReductionRecord
from .world import BRICK, Cell, CellKind, World, direction_dy

# instants from the measurement broadcast to the member cells' reset
REDUCE_WINDOW = 5


def choose(ids: list, rng: random.Random):
    """Uniform draw from a non-empty list; the run's only use of randomness."""
    if not ids:
        raise ValueError("choose requires a non-empty list")
    return ids[rng.randrange(len(ids))]


@dataclass
class Detector:
    """A zone that measures superpositions of one direction passing through.

    ``zone`` is an inclusive cell rectangle (x0, y0, x1, y1). A detector
    fires the measurement event of a given superposition at most once,
    however many of its cells cross the zone.
    """

    zone: tuple[int, int, int, int]
    accepted_kind: CellKind
    detections: int = 0
    seen: set = field(default_factory=set)


def detector_behavior(world: World, d: Detector, index: int):
    """Scan the zone every instant; fire each passing context's measurement.

    With ``world.measure_enabled`` off the detector only records contacts
    (used to read off the undisturbed superposition a detector would see).
    """
    x0, y0, x1, y1 = d.zone
    zone_cells = [
        c
        for y in range(y0, y1 + 1)
        for x in range(x0, x1 + 1)
        if (c := world.grid.cell(x, y)).kind is not BRICK
    ]
    sched = world.sched
    while True:
        for c in zone_cells:
            if c.visible and c.kind is d.accepted_kind:
                ctx = c.ctx
                if ctx.serial in d.seen:
                    continue
                d.seen.add(ctx.serial)
                counts = world.superposition_census(ctx)
                rec = DetectionRecord(
                    instant=sched.clock,
                    detector=index,
                    ctx_serial=ctx.serial,
                    measure_eid=ctx.measure.eid,
                    size=sum(counts),
                    state_counts=counts,
                    measured=world.measure_enabled,
                    ctx=ctx,
                )
                world.stats.record_contact(rec)
                if world.measure_enabled:
                    d.detections += 1
                    sched.generate(ctx.measure, ())
        yield COOPERATE


def set_chosen_state(c: Cell) -> None:
    """Publish this cell's basic state as the outcome, unless one exists.

    The guard is the whole entanglement mechanism: the second context
    sharing the holder reads what the first wrote instead of writing.
    """
    holder = c.ctx.chosen_state
    if holder.value == -1:
        holder.value = c.basic_state


def choose_in_superposition(world: World, c: Cell):
    """Collect the roll-call and elect one member, first writer only."""
    ctx = c.ctx
    yield Await(ctx.signal)
    ids = yield Collect(ctx.signal)
    if ctx.chosen.value == -1:
        ctx.chosen.value = choose(ids, world.rng)


def reduce(world: World, c: Cell, done):
    """One member cell's part of the collapse.

    Spawns an elector, reports its identity on the roll-call one instant
    later, waits two instants for the election, and if elected publishes the
    outcome state and launches the real particle. Always signals ``done`` so
    the owning cell can reset.
    """
    sched = world.sched
    ctx = c.ctx
    me = world.grid.linear(c.x, c.y)
    sched.spawn(choose_in_superposition(world, c))
    yield COOPERATE
    sched.generate(ctx.signal, me)
    yield COOPERATE
    yield COOPERATE
    if ctx.chosen.value == me:
        set_chosen_state(c)
        state = ctx.chosen_state.value
        if ctx.spawn_velocity is not None:
            vx, vy = ctx.spawn_velocity
        else:
            vx, vy = 0.0, float(direction_dy(c.kind))
        p = RealParticle(c.x + 0.5, c.y + 0.5, vx, vy, state)
        world.add_particle(p)
        world.stats.record_reduction(
            ReductionRecord(sched.clock, ctx.serial, ctx.measure.eid, me, state)
        )
    sched.generate(done, ())
