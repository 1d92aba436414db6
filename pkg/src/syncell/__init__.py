"""Synchronous-reactive cellular world with broadcast measurement.

Virtual particles evolve deterministically as wavefronts of a cellular
automaton whose cells are cooperating behaviors over global instants;
a measurement broadcast collapses a wavefront to one uniformly chosen
cell, which becomes a bouncing real particle. Entangled emission pairs
share the measurement event and the outcome holder, so measuring one
collapses both, to the same state, in the same instant.
"""

from .kernel import (
    Await,
    COOPERATE,
    Collect,
    DivergenceError,
    Event,
    InstantReport,
    KernelError,
    PhaseError,
    Scheduler,
)
from .world import (
    Activation,
    BRICK,
    Cell,
    CellKind,
    DOWN,
    Grid,
    Holder,
    MeasurementContext,
    UP,
    World,
)
from .measure import Detector, REDUCE_WINDOW, choose
from .particles import RealParticle
from .scenario import (
    ScenarioError,
    ScenarioSpec,
    build_world,
    fire,
    load_scenario,
    parse_scenario,
    start_sources,
)
from .render import FrameBuffer, render_frame
from .stats import RunReport, frequency_table
from .cli import expected_distribution, run_scenario

__all__ = [
    "Activation",
    "Await",
    "BRICK",
    "COOPERATE",
    "Cell",
    "CellKind",
    "Collect",
    "DOWN",
    "Detector",
    "DivergenceError",
    "Event",
    "FrameBuffer",
    "Grid",
    "Holder",
    "InstantReport",
    "KernelError",
    "MeasurementContext",
    "PhaseError",
    "REDUCE_WINDOW",
    "RealParticle",
    "RunReport",
    "ScenarioError",
    "ScenarioSpec",
    "Scheduler",
    "UP",
    "World",
    "build_world",
    "choose",
    "expected_distribution",
    "fire",
    "frequency_table",
    "load_scenario",
    "parse_scenario",
    "render_frame",
    "run_scenario",
    "start_sources",
]

__version__ = "0.1.0"
