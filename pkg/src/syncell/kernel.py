"""Cooperative scheduler with global instants and broadcast valued events.

Time advances in discrete *instants*. During the active phase of an instant,
runnable behaviors take micro-steps until every behavior is suspended or
finished; everything that happens inside one instant counts as simultaneous.
The end-of-instant phase then snapshots the values collected on each event,
clears all event buffers, and schedules newly spawned behaviors, after which
the clock advances.

A behavior is a generator. It suspends by yielding a command:

    yield Await(e)     resume as soon as e is generated (immediately if it
                       already was this instant)
    yield Collect(e)   resume at the start of the next instant with the list
                       of values generated on e during the current instant
    yield COOPERATE    resume at the start of the next instant

and it acts without suspending by calling ``Scheduler.generate(e, value)``
(broadcast a value on an event, waking every awaiter this same instant) or
``Scheduler.spawn(gen)`` (the new behavior takes its first step at the start
of the next instant).

Dispatch is deterministic: behaviors that become runnable together are
ordered by their spawn id, so two runs of the same program produce identical
event traces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Generator

Behavior = Generator  # a behavior is any generator yielding kernel commands

# behavior states
READY = 0
WAIT_EVENT = 1
WAIT_COLLECT = 2
WAIT_NEXT = 3
DONE = 4

# scheduler phases
_IDLE = 0
_ACTIVE = 1
_END = 2

DEFAULT_MICROSTEP_BUDGET = 1_000_000


class KernelError(Exception):
    pass


class PhaseError(KernelError):
    """An operation was used outside the active phase of an instant."""


class DivergenceError(KernelError):
    """An instant exceeded its micro-step budget and will never finish."""

    def __init__(self, instant: int, budget: int):
        super().__init__(
            f"instant {instant} exceeded the micro-step budget of {budget}; "
            "some behavior loops without suspending"
        )
        self.instant = instant
        self.budget = budget


class Event:
    """A broadcast channel. Presence and values are scoped to one instant."""

    __slots__ = ("eid", "values", "present", "waiters")

    def __init__(self, eid: int):
        self.eid = eid
        self.values: list = []
        self.present = False
        self.waiters: list[_Task] = []

    def __repr__(self):
        return f"Event({self.eid}, present={self.present}, values={self.values!r})"


class Await:
    """Suspend until the event is generated; no-op if already present."""

    __slots__ = ("event",)

    def __init__(self, event: Event):
        self.event = event


class Collect:
    """Suspend to the next instant; resume with this instant's value list."""

    __slots__ = ("event",)

    def __init__(self, event: Event):
        self.event = event


class _Cooperate:
    __slots__ = ()

    def __repr__(self):
        return "COOPERATE"


COOPERATE = _Cooperate()


class _Task:
    __slots__ = ("bid", "gen", "state", "value")

    def __init__(self, bid: int, gen: Behavior):
        self.bid = bid
        self.gen = gen
        self.state = READY
        self.value: Any = None


def _task_bid(task: _Task) -> int:
    return task.bid


def _entry_bid(entry: tuple[_Task, Any]) -> int:
    return entry[0].bid


@dataclass(frozen=True)
class InstantReport:
    instant: int
    alive: int
    terminated: int
    generated: int


class Scheduler:
    """Drives behaviors through instants; owns all events it hands out."""

    def __init__(self, microstep_budget: int = DEFAULT_MICROSTEP_BUDGET):
        self.microstep_budget = microstep_budget
        self._clock = 0
        self._phase = _IDLE
        self._queue: deque[_Task] = deque()
        self._resume: list[tuple[_Task, Any]] = []  # run at next instant start
        self._pending_spawns: list[_Task] = []
        self._collectors: list[tuple[_Task, Event]] = []
        self._touched: list[Event] = []
        self._next_bid = 0
        self._next_eid = 0
        self.alive = 0
        self.terminated = 0
        self._generated = 0

    @property
    def clock(self) -> int:
        """Index of the next instant to run (completed instants so far)."""
        return self._clock

    def new_event(self) -> Event:
        e = Event(self._next_eid)
        self._next_eid += 1
        return e

    def spawn(self, gen: Behavior) -> int:
        """Queue a behavior; it takes its first step next instant."""
        task = _Task(self._next_bid, gen)
        self._next_bid += 1
        self._pending_spawns.append(task)
        self.alive += 1
        return task.bid

    def generate(self, event: Event, value: Any = None) -> None:
        """Broadcast a value on an event; wakes all awaiters this instant.

        Only legal during the active phase: generation at the end of an
        instant, or between instants, would make "all values of the instant"
        ill-defined and is rejected.
        """
        if self._phase != _ACTIVE:
            raise PhaseError(
                "generate is only allowed during the active phase of an instant"
            )
        event.values.append(value)
        if not event.present:
            event.present = True
            self._touched.append(event)
        self._generated += 1
        waiters = event.waiters
        if waiters:
            if len(waiters) > 1:
                waiters.sort(key=_task_bid)
            for task in waiters:
                task.state = READY
                task.value = None
            self._queue.extend(waiters)
            waiters.clear()

    def run_instant(self) -> InstantReport:
        """Execute one full instant (active phase, then end-of-instant)."""
        instant = self._clock
        self._phase = _ACTIVE
        self._generated = 0

        # Admit everything scheduled for this instant, in spawn-id order.
        ready = self._resume
        self._resume = []
        for task in self._pending_spawns:
            ready.append((task, None))
        self._pending_spawns = []
        ready.sort(key=_entry_bid)
        queue = self._queue
        for task, value in ready:
            task.state = READY
            task.value = value
            queue.append(task)

        steps = 0
        budget = self.microstep_budget
        while queue:
            task = queue.popleft()
            gen = task.gen
            value = task.value
            task.value = None
            while True:
                steps += 1
                if steps > budget:
                    raise DivergenceError(instant, budget)
                try:
                    cmd = gen.send(value)
                except StopIteration:
                    task.state = DONE
                    self.alive -= 1
                    self.terminated += 1
                    break
                if cmd is COOPERATE:
                    task.state = WAIT_NEXT
                    self._resume.append((task, None))
                    break
                cls = cmd.__class__
                if cls is Collect:
                    task.state = WAIT_COLLECT
                    self._collectors.append((task, cmd.event))
                    break
                if cls is Await:
                    event = cmd.event
                    if event.present:
                        value = None
                        continue
                    task.state = WAIT_EVENT
                    event.waiters.append(task)
                    break
                raise KernelError(f"behavior yielded a non-command: {cmd!r}")

        # End of instant: collectors see exactly this instant's values,
        # then every touched event buffer is reset.
        self._phase = _END
        for task, event in self._collectors:
            self._resume.append((task, list(event.values)))
        self._collectors = []
        for event in self._touched:
            event.values.clear()
            event.present = False
        self._touched = []

        self._clock += 1
        self._phase = _IDLE
        return InstantReport(instant, self.alive, self.terminated, self._generated)

    def run(self, instants: int) -> list[InstantReport]:
        return [self.run_instant() for _ in range(instants)]

    def is_quiet(self) -> bool:
        """True when nothing can ever run again without external input.

        Behaviors parked on never-generated events do not count: only a
        runnable behavior could wake them, and there is none.
        """
        return not (self._resume or self._pending_spawns or self._queue)
