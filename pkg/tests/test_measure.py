"""Choice, detectors, and the collapse protocol."""

import random

import pytest

from syncell import COOPERATE, Holder, UP, World
from syncell.measure import REDUCE_WINDOW, choose, set_chosen_state
from syncell.scenario import (
    ScenarioSpec,
    SourceSpec,
    DetectorSpec,
    build_world,
    start_sources,
)


def test_choose_singleton_and_membership():
    rng = random.Random(0)
    assert choose([7], rng) == 7
    for _ in range(20):
        assert choose(["a", "b", "c"], rng) in ("a", "b", "c")


def test_choose_rejects_empty():
    with pytest.raises(ValueError):
        choose([], random.Random(0))


def test_choose_is_close_to_uniform():
    # tolerance 0.01 at 1e5 draws: ~5 sigma for p=1/4, deterministic per seed
    rng = random.Random(123)
    ids = [10, 20, 30, 40]
    n = 100_000
    counts = {i: 0 for i in ids}
    for _ in range(n):
        counts[choose(ids, rng)] += 1
    for i in ids:
        assert abs(counts[i] / n - 0.25) < 0.01


def test_set_chosen_state_writes_once():
    w = World(9, 9)
    c = w.grid.cell(4, 4)
    c.ctx = w.new_context()
    c.basic_state = 4
    set_chosen_state(c)
    assert c.ctx.chosen_state.value == 4
    c.basic_state = 2
    set_chosen_state(c)
    assert c.ctx.chosen_state.value == 4  # second write is ignored


def test_shared_holder_carries_the_state_across_contexts():
    w = World(9, 9)
    shared = Holder(-1)
    a = w.grid.cell(3, 3)
    b = w.grid.cell(5, 5)
    a.ctx = w.new_context(chosen_state=shared)
    b.ctx = w.new_context(chosen_state=shared)
    a.basic_state = 5
    set_chosen_state(a)
    b.basic_state = 1
    set_chosen_state(b)
    assert a.ctx.chosen_state.value == 5
    assert b.ctx.chosen_state.value == 5


def single_shot_world(**kwargs):
    spec = ScenarioSpec(
        width=31,
        height=31,
        sources=[SourceSpec(x=15, y=27, state=0, shots=1, period=10)],
        detectors=[DetectorSpec(x0=1, y0=17, x1=29, y1=17)],
        seed=kwargs.pop("seed", 3),
        **kwargs,
    )
    w = build_world(spec)
    start_sources(w)
    return w


def test_detection_fires_once_and_resolves():
    w = single_shot_world()
    w.run(80)
    assert w.detectors[0].detections == 1
    [rec] = w.stats.detections
    # source at y=27 fires (15,26); zone row 17 is generation 9
    assert rec.instant == 2 * 9 + 1
    assert rec.size == 2 * 9 + 1
    assert rec.chosen_state is not None
    assert sum(rec.state_counts) == rec.size


def test_collapse_window_and_silence_after_measurement():
    w = single_shot_world()
    w.run(80)
    assert w.stats.unresolved() == 0
    [rec] = w.stats.detections
    [red] = w.stats.reductions
    assert red.instant == rec.instant + REDUCE_WINDOW
    ctx = rec.ctx
    assert ctx.live_count == 0
    assert ctx.last_reset <= rec.instant + REDUCE_WINDOW
    assert ctx.last_transmit < rec.instant  # silence from the broadcast on


def test_exactly_one_particle_per_measured_superposition():
    w = single_shot_world()
    w.run(80)
    assert len(w.particles) == 1
    [rec] = w.stats.detections
    [p] = w.particles
    assert p.state == rec.chosen_state


def test_detector_ignores_opposite_direction():
    spec = ScenarioSpec(
        width=31,
        height=41,
        sources=[SourceSpec(x=15, y=20, state=0, direction=UP, entangled=True, shots=1, period=10)],
        detectors=[DetectorSpec(x0=1, y0=30, x1=29, y1=30, kind=UP)],
        seed=3,
    )
    w = build_world(spec)
    start_sources(w)
    w.run(60)
    # the DOWN beam crosses the zone, but the detector accepts UP only
    assert w.detectors[0].detections == 0
    assert w.particles == []


def test_detector_dedups_by_context_not_by_cell():
    # two cells of the same superposition inside the zone: one measurement
    w = single_shot_world()
    w.run(80)
    assert w.detectors[0].detections == 1
    # a second, disjoint shot gets its own fresh measurement
    w2 = ScenarioSpec(
        width=31,
        height=31,
        sources=[SourceSpec(x=15, y=27, state=0, shots=2, period=40)],
        detectors=[DetectorSpec(x0=1, y0=17, x1=29, y1=17)],
        seed=3,
    )
    world = build_world(w2)
    start_sources(world)
    world.run(130)
    assert world.detectors[0].detections == 2


def test_probe_mode_records_contacts_without_measuring():
    w = single_shot_world()
    w.measure_enabled = False
    w.run(80)
    assert w.detectors[0].detections == 0
    [rec] = w.stats.detections
    assert rec.measured is False and rec.chosen_state is None
    assert w.particles == []


def test_empty_zone_never_detects():
    spec = ScenarioSpec(
        width=31,
        height=31,
        detectors=[DetectorSpec(x0=1, y0=17, x1=29, y1=17)],
        seed=3,
    )
    w = build_world(spec)
    w.run(30)
    assert w.detectors[0].detections == 0


def test_chooser_leaves_an_existing_choice_alone():
    # pre-electing a member before the roll-call freezes the outcome
    spec = ScenarioSpec(
        width=31,
        height=31,
        sources=[SourceSpec(x=15, y=27, state=0, shots=1, period=10)],
        detectors=[DetectorSpec(x0=1, y0=17, x1=29, y1=17)],
        seed=3,
    )
    w = build_world(spec)
    start_sources(w)
    forced = {}

    def rig():
        # wait for the detection instant, then force the choice before the
        # election resolves (the roll-call happens 3 instants after measure)
        while not w.stats.detections:
            yield COOPERATE
        [rec] = w.stats.detections
        ctx = next(c for c in w.visible.values())
        ctx.chosen.value = w.grid.linear(15, 17)
        forced["id"] = ctx.chosen.value
        yield COOPERATE

    w.sched.spawn(rig())
    w.run(80)
    [red] = w.stats.reductions
    assert red.cell_id == forced["id"]
