"""Scenario definition: geometry, sources, detectors, and emission schedules.

A scenario is a small line-based text file:

    # comment
    [grid]
    width=80
    height=80
    base=6              # optional, 2..6, default 6

    [wall]              # one section per rectangle, inclusive coordinates
    x0=1
    y0=55
    x1=78
    y1=55

    [slit]              # a column interval carved through (or kept in) a wall
    wall=0              # index of the wall, in file order
    x0=30
    x1=30
    open=true           # false leaves the gap bricked up

    [source]
    x=40
    y=75
    state=0
    direction=up        # for entangled sources: the first of the two beams
    entangled=false
    period=8            # instants between emissions
    shots=1
    # vx= / vy= optionally override the spawned particles' velocity

    [run]
    instants=200
    seed=42

    [detector]          # inclusive rectangle plus the direction it accepts
    x0=1
    y0=20
    x1=78
    y1=20
    kind=up

Sections may repeat and appear in any order; keys are one per line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .kernel import Await, COOPERATE, Event
from .measure import Detector, detector_behavior
from .world import (
    Activation,
    BRICK,
    Cell,
    CellKind,
    DOWN,
    Holder,
    MeasurementContext,
    UP,
    World,
    opposite,
)
from .stats import digest_text


class ScenarioError(Exception):
    """A scenario file or spec that cannot be built, with a location hint."""


@dataclass
class WallSpec:
    x0: int
    y0: int
    x1: int
    y1: int
    line: int = 0


@dataclass
class SlitSpec:
    wall: int
    x0: int
    x1: int
    open: bool = True
    line: int = 0


@dataclass
class SourceSpec:
    x: int
    y: int
    state: int = 0
    direction: CellKind = UP
    entangled: bool = False
    period: int = 1
    shots: int = 1
    vx: Optional[float] = None
    vy: Optional[float] = None
    line: int = 0


@dataclass
class DetectorSpec:
    x0: int
    y0: int
    x1: int
    y1: int
    kind: CellKind = UP
    line: int = 0


@dataclass
class ScenarioSpec:
    width: int
    height: int
    base: int = 6
    walls: list[WallSpec] = field(default_factory=list)
    slits: list[SlitSpec] = field(default_factory=list)
    sources: list[SourceSpec] = field(default_factory=list)
    detectors: list[DetectorSpec] = field(default_factory=list)
    run_length: int = 0
    seed: int = 0
    digest: str = "-"


# -- parsing ------------------------------------------------------------------

_SECTIONS = ("grid", "wall", "slit", "source", "detector", "run")


def _parse_int(value: str, key: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"line {lineno}: {key} expects an integer, got {value!r}")


def _parse_float(value: str, key: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"line {lineno}: {key} expects a number, got {value!r}")


def _parse_bool(value: str, key: str, lineno: int) -> bool:
    if value in ("true", "yes", "1"):
        return True
    if value in ("false", "no", "0"):
        return False
    raise ScenarioError(f"line {lineno}: {key} expects true/false, got {value!r}")


def _parse_kind(value: str, key: str, lineno: int) -> CellKind:
    if value == "up":
        return UP
    if value == "down":
        return DOWN
    raise ScenarioError(f"line {lineno}: {key} expects up or down, got {value!r}")


def parse_scenario(text: str) -> ScenarioSpec:
    """Parse scenario text; raises ScenarioError with line numbers."""
    grid: dict = {}
    grid_line = 0
    walls: list[WallSpec] = []
    slits: list[SlitSpec] = []
    sources: list[SourceSpec] = []
    detectors: list[DetectorSpec] = []
    run: dict = {}
    section = None
    record: Optional[dict] = None

    def close_record():
        nonlocal record
        if record is None:
            return
        kind, fields, lineno = record["kind"], record["fields"], record["line"]
        try:
            if kind == "wall":
                walls.append(WallSpec(line=lineno, **fields))
            elif kind == "slit":
                slits.append(SlitSpec(line=lineno, **fields))
            elif kind == "source":
                sources.append(SourceSpec(line=lineno, **fields))
            elif kind == "detector":
                detectors.append(DetectorSpec(line=lineno, **fields))
        except TypeError as exc:
            raise ScenarioError(f"line {lineno}: incomplete [{kind}] section ({exc})")
        record = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioError(f"line {lineno}: malformed section header {line!r}")
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ScenarioError(f"line {lineno}: unknown section [{name}]")
            close_record()
            section = name
            if name == "grid":
                grid_line = lineno
            elif name in ("wall", "slit", "source", "detector"):
                record = {"kind": name, "fields": {}, "line": lineno}
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key=value, got {line!r}")
        if section is None:
            raise ScenarioError(f"line {lineno}: key outside any section")
        key, value = (part.strip() for part in line.split("=", 1))

        if section == "grid":
            if key in ("width", "height", "base"):
                grid[key] = _parse_int(value, key, lineno)
            else:
                raise ScenarioError(f"line {lineno}: unknown [grid] key {key!r}")
        elif section == "run":
            if key == "instants":
                run["instants"] = _parse_int(value, key, lineno)
            elif key == "seed":
                run["seed"] = _parse_int(value, key, lineno)
            else:
                raise ScenarioError(f"line {lineno}: unknown [run] key {key!r}")
        elif section == "wall":
            if key in ("x0", "y0", "x1", "y1"):
                record["fields"][key] = _parse_int(value, key, lineno)
            else:
                raise ScenarioError(f"line {lineno}: unknown [wall] key {key!r}")
        elif section == "slit":
            if key in ("wall", "x0", "x1"):
                record["fields"][key] = _parse_int(value, key, lineno)
            elif key == "open":
                record["fields"]["open"] = _parse_bool(value, key, lineno)
            else:
                raise ScenarioError(f"line {lineno}: unknown [slit] key {key!r}")
        elif section == "source":
            if key in ("x", "y", "state", "period", "shots"):
                record["fields"][key] = _parse_int(value, key, lineno)
            elif key == "direction":
                record["fields"]["direction"] = _parse_kind(value, key, lineno)
            elif key == "entangled":
                record["fields"]["entangled"] = _parse_bool(value, key, lineno)
            elif key in ("vx", "vy"):
                record["fields"][key] = _parse_float(value, key, lineno)
            else:
                raise ScenarioError(f"line {lineno}: unknown [source] key {key!r}")
        elif section == "detector":
            if key in ("x0", "y0", "x1", "y1"):
                record["fields"][key] = _parse_int(value, key, lineno)
            elif key == "kind":
                record["fields"]["kind"] = _parse_kind(value, key, lineno)
            else:
                raise ScenarioError(f"line {lineno}: unknown [detector] key {key!r}")

    close_record()
    if "width" not in grid or "height" not in grid:
        raise ScenarioError(
            f"line {grid_line or 1}: a [grid] section with width and height is required"
        )
    spec = ScenarioSpec(
        width=grid["width"],
        height=grid["height"],
        base=grid.get("base", 6),
        walls=walls,
        slits=slits,
        sources=sources,
        detectors=detectors,
        run_length=run.get("instants", 0),
        seed=run.get("seed", 0),
        digest=digest_text(text),
    )
    return spec


def load_scenario(path) -> ScenarioSpec:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario(text)


# -- source records and behaviors ----------------------------------------------


@dataclass
class SourceRecord:
    x: int
    y: int
    direction: CellKind
    initial_state: int
    entangled: bool
    period: int
    shots: int
    go: Event
    vx: Optional[float] = None
    vy: Optional[float] = None


def fire(
    world: World,
    cell: Cell,
    state: int,
    direction: CellKind,
    measure: Event,
    chosen_state: Holder,
    spawn_velocity: Optional[tuple] = None,
) -> MeasurementContext:
    """Inject one emission into a cell, under a fresh signal and election.

    The measurement event and the outcome holder are the caller's: a
    standard source passes fresh ones per shot, an entangled source passes
    the pair shared by both beams. ``spawn_velocity`` optionally overrides
    the axis-aligned velocity of the particle this emission may end in.
    """
    if cell.kind is BRICK:
        raise ScenarioError(f"cannot fire into wall cell ({cell.x},{cell.y})")
    ctx = world.new_context(
        measure=measure, chosen_state=chosen_state, spawn_velocity=spawn_velocity
    )
    world.sched.generate(cell.trigger, Activation(direction, state % world.base, ctx))
    return ctx


def _source_velocity(src: SourceRecord, direction: CellKind) -> Optional[tuple]:
    if src.vx is None and src.vy is None:
        return None
    from .world import direction_dy

    vx = src.vx if src.vx is not None else 0.0
    vy = src.vy if src.vy is not None else float(direction_dy(direction))
    if direction is not src.direction:
        vy = -vy  # the mirror beam spawns mirrored
    return (vx, vy)


def source_behavior(world: World, src: SourceRecord):
    """Fire the adjacent cell on every go, one independent context per shot."""
    cell = world.grid.cell_in_direction(src.x, src.y, src.direction)
    velocity = _source_velocity(src, src.direction)
    while True:
        yield Await(src.go)
        fire(
            world,
            cell,
            src.initial_state,
            src.direction,
            world.sched.new_event(),
            Holder(-1),
            velocity,
        )
        yield COOPERATE


def dual_source_behavior(world: World, src: SourceRecord):
    """Fire two opposite beams per go, sharing measurement and outcome."""
    fore = src.direction
    back = opposite(src.direction)
    fore_cell = world.grid.cell_in_direction(src.x, src.y, fore)
    back_cell = world.grid.cell_in_direction(src.x, src.y, back)
    fore_velocity = _source_velocity(src, fore)
    back_velocity = _source_velocity(src, back)
    while True:
        shared_measure = world.sched.new_event()
        shared_state = Holder(-1)
        yield Await(src.go)
        fire(world, fore_cell, src.initial_state, fore, shared_measure, shared_state, fore_velocity)
        fire(world, back_cell, src.initial_state, back, shared_measure, shared_state, back_velocity)
        yield COOPERATE


def schedule_go(world: World, sources: list[SourceRecord], period: int, shots: int):
    """Generate the sources' go events ``shots`` times, ``period`` apart."""
    if period < 1:
        raise ScenarioError("emission period must be at least 1 instant")
    for _ in range(shots):
        for src in sources:
            world.sched.generate(src.go, ())
        for _ in range(period):
            yield COOPERATE


# -- building -----------------------------------------------------------------


def _check_inside(spec: ScenarioSpec, x: int, y: int, what: str, line: int) -> None:
    if not (1 <= x <= spec.width - 2 and 1 <= y <= spec.height - 2):
        raise ScenarioError(
            f"{what} (line {line}): ({x},{y}) is outside the interior "
            f"1..{spec.width - 2} x 1..{spec.height - 2}"
        )


def build_world(spec: ScenarioSpec) -> World:
    """Construct the world: geometry, one behavior per cell, sources, detectors.

    The emission schedules are not started here; call ``start_sources`` (or
    use ``cli.run_scenario``) to begin firing.
    """
    if not (2 <= spec.base <= 6):
        raise ScenarioError(f"base must be within 2..6, got {spec.base}")
    world = World(spec.width, spec.height, seed=spec.seed, base=spec.base)
    world.scenario_digest = spec.digest

    grid = world.grid
    for i, w in enumerate(spec.walls):
        for x, y, name in (
            (w.x0, w.y0, "corner (x0,y0)"),
            (w.x1, w.y1, "corner (x1,y1)"),
        ):
            if not grid.in_range(x, y):
                raise ScenarioError(
                    f"wall #{i} (line {w.line}): {name} ({x},{y}) is off the grid"
                )
        if w.x1 < w.x0 or w.y1 < w.y0:
            raise ScenarioError(f"wall #{i} (line {w.line}): empty rectangle")
        for y in range(w.y0, w.y1 + 1):
            for x in range(w.x0, w.x1 + 1):
                grid.set_brick(x, y)

    for i, s in enumerate(spec.slits):
        if not (0 <= s.wall < len(spec.walls)):
            raise ScenarioError(
                f"slit #{i} (line {s.line}): wall index {s.wall} does not exist"
            )
        w = spec.walls[s.wall]
        if s.x0 > s.x1 or s.x0 < w.x0 or s.x1 > w.x1:
            raise ScenarioError(
                f"slit #{i} (line {s.line}): interval {s.x0}..{s.x1} is not "
                f"inside wall #{s.wall} ({w.x0}..{w.x1})"
            )
        if not s.open:
            continue
        for y in range(w.y0, w.y1 + 1):
            for x in range(s.x0, s.x1 + 1):
                _check_inside(spec, x, y, f"slit #{i}", s.line)
                cell = grid.cell(x, y)
                cell.kind = None
                cell.trigger = world.sched.new_event()

    world.spawn_cell_behaviors()

    for i, s in enumerate(spec.sources):
        _check_inside(spec, s.x, s.y, f"source #{i}", s.line)
        if grid.cell(s.x, s.y).kind is BRICK:
            raise ScenarioError(
                f"source #{i} (line {s.line}): ({s.x},{s.y}) sits on a wall"
            )
        if not (0 <= s.state < spec.base):
            raise ScenarioError(
                f"source #{i} (line {s.line}): state {s.state} is outside 0..{spec.base - 1}"
            )
        if s.period < 1:
            raise ScenarioError(f"source #{i} (line {s.line}): period must be >= 1")
        if s.shots < 0:
            raise ScenarioError(f"source #{i} (line {s.line}): shots must be >= 0")
        directions = [s.direction]
        if s.entangled:
            directions.append(opposite(s.direction))
        for direction in directions:
            target = grid.cell_in_direction(s.x, s.y, direction)
            if target.kind is BRICK:
                raise ScenarioError(
                    f"source #{i} (line {s.line}): fired cell "
                    f"({target.x},{target.y}) is a wall"
                )
        record = SourceRecord(
            s.x,
            s.y,
            s.direction,
            s.state,
            s.entangled,
            s.period,
            s.shots,
            world.sched.new_event(),
            s.vx,
            s.vy,
        )
        world.sources.append(record)
        behavior = dual_source_behavior if s.entangled else source_behavior
        world.sched.spawn(behavior(world, record))

    for i, d in enumerate(spec.detectors):
        for x, y in ((d.x0, d.y0), (d.x1, d.y1)):
            if not grid.in_range(x, y):
                raise ScenarioError(
                    f"detector #{i} (line {d.line}): corner ({x},{y}) is off the grid"
                )
        if d.x1 < d.x0 or d.y1 < d.y0:
            raise ScenarioError(f"detector #{i} (line {d.line}): empty zone")
        zone_has_cell = any(
            grid.cell(x, y).kind is not BRICK
            for y in range(d.y0, d.y1 + 1)
            for x in range(d.x0, d.x1 + 1)
        )
        if not zone_has_cell:
            raise ScenarioError(
                f"detector #{i} (line {d.line}): zone covers only wall cells"
            )
        detector = Detector((d.x0, d.y0, d.x1, d.y1), d.kind)
        world.detectors.append(detector)
        world.sched.spawn(detector_behavior(world, detector, i))

    return world


def start_sources(world: World) -> None:
    """Spawn one emission schedule per source, in source order. Idempotent."""
    if getattr(world, "_sources_started", False):
        return
    world._sources_started = True
    for src in world.sources:
        world.sched.spawn(schedule_go(world, [src], src.period, src.shots))
