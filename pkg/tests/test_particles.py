"""Inertia, bouncing, and containment."""

import pytest

from syncell import DOWN, UP, World
from syncell.particles import RealParticle, bounce_step, inertia_step
from syncell.scenario import (
    ScenarioSpec,
    SourceSpec,
    DetectorSpec,
    build_world,
    start_sources,
)
from syncell.world import BRICK


def test_inertia_moves_by_velocity():
    p = RealParticle(5.0, 5.0, 0.0, -1.0, 0)
    inertia_step(p)
    assert (p.fx, p.fy) == (5.0, 4.0)
    q = RealParticle(5.0, 5.0, 0.0, 0.0, 0)
    inertia_step(q)
    assert (q.fx, q.fy) == (5.0, 5.0)


def test_inertia_is_linear_over_steps():
    p = RealParticle(10.5, 15.5, 0.0, -1.0, 0)
    for _ in range(10):
        inertia_step(p)
    assert p.fy == 5.5


def test_speed_components_above_one_are_rejected():
    with pytest.raises(ValueError):
        RealParticle(5.0, 5.0, 0.0, -1.5, 0)


def test_bounce_flips_the_offending_component():
    w = World(9, 9)
    p = RealParticle(4.5, 1.5, 0.0, -1.0, 0)
    inertia_step(p)  # would enter the top border row
    bounce_step(p, w.grid)
    assert p.vy == 1.0 and p.fy == 1.5


def test_corner_hit_flips_both_components():
    w = World(9, 9)
    p = RealParticle(1.5, 1.5, -1.0, -1.0, 0)
    inertia_step(p)
    bounce_step(p, w.grid)
    assert (p.vx, p.vy) == (1.0, 1.0)
    assert (p.fx, p.fy) == (1.5, 1.5)


def test_interior_wall_reflects_too():
    w = World(15, 15)
    for y in range(15):
        w.grid.set_brick(7, y)
    p = RealParticle(6.5, 7.5, 1.0, 0.0, 0)
    inertia_step(p)
    bounce_step(p, w.grid)
    assert p.vx == -1.0 and p.fx == 6.5


def test_long_run_containment_with_conserved_speed():
    w = World(23, 17)
    p = RealParticle(5.5, 8.5, 1.0, -1.0, 2)
    for _ in range(10_000):
        inertia_step(p)
        bounce_step(p, w.grid)
        assert 1.0 <= p.fx < 22.0 and 1.0 <= p.fy < 16.0
        assert w.grid.kind_at(int(p.fx), int(p.fy)) is not BRICK
        assert (abs(p.vx), abs(p.vy)) == (1.0, 1.0)


def test_trajectory_is_deterministic():
    def track():
        w = World(13, 13)
        p = RealParticle(3.5, 3.5, 1.0, -1.0, 0)
        out = []
        for _ in range(50):
            inertia_step(p)
            bounce_step(p, w.grid)
            out.append((p.fx, p.fy, p.vx, p.vy))
        return out

    assert track() == track()


def test_spawn_direction_sets_the_initial_velocity():
    def measured_particles(direction, detector_row):
        spec = ScenarioSpec(
            width=31,
            height=31,
            sources=[SourceSpec(x=15, y=15, state=0, direction=direction, shots=1)],
            detectors=[DetectorSpec(x0=1, y0=detector_row, x1=29, y1=detector_row, kind=direction)],
            seed=5,
        )
        w = build_world(spec)
        start_sources(w)
        # stop right after the particle is born to read its initial velocity
        while not w.particles:
            w.sched.run_instant()
        return w.particles[0]

    up = measured_particles(UP, 8)
    assert (up.vx, up.vy) == (0.0, -1.0)
    down = measured_particles(DOWN, 22)
    assert (down.vx, down.vy) == (0.0, 1.0)
