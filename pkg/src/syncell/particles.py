"""Real particles: the animated entities born from a collapse.

A particle is driven by two per-instant steps composed in its behavior:
inertia moves it by its velocity, bouncing reflects whichever velocity
component would carry it into a wall cell. Positions are continuous, in
cell units, and particles spawn at the centre of their birth cell so a
component never lands exactly on a cell boundary.
"""

from __future__ import annotations

from .kernel import COOPERATE
from .world import BRICK, Grid


class RealParticle:
    __slots__ = ("fx", "fy", "vx", "vy", "state", "alive")

    def __init__(self, fx: float, fy: float, vx: float, vy: float, state: int):
        if abs(vx) > 1 or abs(vy) > 1:
            raise ValueError("particle speed components are bounded by 1 cell/instant")
        self.fx = fx
        self.fy = fy
        self.vx = vx
        self.vy = vy
        self.state = state
        self.alive = True

    def __repr__(self):
        return (
            f"RealParticle(({self.fx:.2f},{self.fy:.2f}) "
            f"v=({self.vx},{self.vy}) state={self.state})"
        )


def inertia_step(p: RealParticle) -> None:
    p.fx += p.vx
    p.fy += p.vy


def bounce_step(p: RealParticle, grid: Grid) -> None:
    """Reflect off wall cells the inertia step ran into, component-wise.

    Each offending component is flipped and backed out to its pre-step
    value, so a legal position stays legal and speed magnitude is
    conserved. A corner hit flips both components.
    """
    prev_x = p.fx - p.vx
    prev_y = p.fy - p.vy
    if p.vx and grid.kind_at(int(p.fx), int(prev_y)) is BRICK:
        p.vx = -p.vx
        p.fx = prev_x
    if p.vy and grid.kind_at(int(p.fx), int(p.fy)) is BRICK:
        p.vy = -p.vy
        p.fy = prev_y


def particle_behavior(world, p: RealParticle):
    grid = world.grid
    while p.alive:
        inertia_step(p)
        bounce_step(p, grid)
        yield COOPERATE
