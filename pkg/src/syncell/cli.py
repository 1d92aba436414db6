"""Command-line front end: run scenarios, write frames and stats, compare slits."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .kernel import DivergenceError
from .render import FrameBuffer
from .scenario import (
    ScenarioError,
    ScenarioSpec,
    build_world,
    load_scenario,
    parse_scenario,
    start_sources,
)
from .stats import FrequencyRow, RunReport, frequency_csv, frequency_text
from .world import World


class DetectorNotReachedError(ScenarioError):
    pass


def run_world(
    world: World,
    instants: int,
    frames_dir: str | None = None,
    remanence: bool = False,
    ascii_frames: bool = False,
) -> RunReport:
    """Drive a built world for up to ``instants`` instants and report."""
    start_sources(world)
    fb = None
    writer = None
    if frames_dir is not None:
        os.makedirs(frames_dir, exist_ok=True)
        fb = FrameBuffer(world.grid.width, world.grid.height, remanence=remanence)

        def writer(w: World, report):
            fb.paint(w)
            stem = os.path.join(frames_dir, f"frame_{report.instant:06d}")
            with open(stem + ".ppm", "wb") as fh:
                fh.write(fb.to_ppm_bytes())
            if ascii_frames:
                with open(stem + ".txt", "w", encoding="ascii") as fh:
                    fh.write(fb.to_ascii())

    executed = world.run(instants, on_instant=writer)
    return RunReport.from_world(world, executed)


def run_scenario(
    spec: ScenarioSpec,
    instants: int | None = None,
    seed: int | None = None,
    frames_dir: str | None = None,
    remanence: bool = False,
    ascii_frames: bool = False,
) -> RunReport:
    """Build and run a scenario; CLI flags override the file's [run] values."""
    if seed is not None:
        spec = replace(spec, seed=seed)
    world = build_world(spec)
    budget = instants if instants is not None else spec.run_length
    return run_world(world, budget, frames_dir, remanence, ascii_frames)


def expected_distribution(world: World, detector_index: int, instants: int):
    """Per-state fractions of the superposition a detector would measure.

    Runs the world with measurement disabled until the detector's first
    contact, then reads the contacted superposition's census. The world must
    be freshly built. Raises DetectorNotReachedError if nothing arrives
    within ``instants``.
    """
    world.measure_enabled = False
    start_sources(world)
    contact = None
    executed = 0
    while executed < instants and contact is None:
        world.sched.run_instant()
        executed += 1
        for rec in world.stats.detections:
            if rec.detector == detector_index:
                contact = rec
                break
        if world.sched.is_quiet():
            break
    if contact is None:
        raise DetectorNotReachedError(
            f"detector {detector_index} saw no superposition within {instants} instants"
        )
    total = contact.size
    return {s: n / total for s, n in enumerate(contact.state_counts) if n}


# -- compare ------------------------------------------------------------------


def _slit_variant(spec: ScenarioSpec, closed_indices: set[int]) -> ScenarioSpec:
    slits = [
        replace(s, open=False) if i in closed_indices else s
        for i, s in enumerate(spec.slits)
    ]
    return replace(spec, slits=slits)


def _variant_counts(args) -> list[int]:
    text, closed, seed, instants = args
    spec = _slit_variant(parse_scenario(text), closed)
    report = run_scenario(spec, instants=instants, seed=seed)
    totals = [0] * spec.base
    for row in report.detector_counts:
        for s, n in enumerate(row):
            totals[s] += n
    return totals


def compare_slits(
    text: str,
    close_index: int | None = None,
    seed: int = 0,
    instants: int | None = None,
    runs: int = 1,
    jobs: int = 1,
):
    """Run the scenario with all slits open and with one slit closed.

    Returns frequency rows labelled by the number of open slits. ``runs``
    independent repetitions per variant (seeds seed, seed+1, ...) are merged
    by summing counts; with jobs > 1 the repetitions execute on worker
    processes.
    """
    spec = parse_scenario(text)
    open_slits = [i for i, s in enumerate(spec.slits) if s.open]
    if not open_slits:
        raise ScenarioError("compare needs at least one open slit")
    if close_index is None:
        close_index = open_slits[-1]
    elif close_index not in open_slits:
        raise ScenarioError(f"slit {close_index} is not an open slit of this scenario")

    variants = [
        (f"{len(open_slits) - 1} slit" + ("s" if len(open_slits) - 1 != 1 else ""),
         {close_index}),
        (f"{len(open_slits)} slits", set()),
    ]
    tasks = []
    for _, closed in variants:
        for r in range(runs):
            tasks.append((text, closed, seed + r, instants))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_variant_counts, tasks))
    else:
        results = [_variant_counts(t) for t in tasks]

    rows = []
    base = spec.base
    for vi, (label, _) in enumerate(variants):
        totals = [0] * base
        for r in range(runs):
            for s, n in enumerate(results[vi * runs + r]):
                totals[s] += n
        grand = sum(totals)
        fractions = [n / grand for n in totals] if grand else [0.0] * base
        rows.append(FrequencyRow(label, fractions, grand))
    return rows


# -- entry point ----------------------------------------------------------------

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_DIVERGENCE = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="syncell",
        description="Synchronous cellular world with broadcast measurement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--scenario", required=True, help="scenario file")
    p_run.add_argument("--instants", type=int, default=None, help="override [run] instants")
    p_run.add_argument("--seed", type=int, default=None, help="override [run] seed")
    p_run.add_argument("--frames", default=None, metavar="DIR", help="write a frame per instant")
    p_run.add_argument("--remanence", action="store_true", help="accumulate traces in frames")
    p_run.add_argument("--ascii", action="store_true", help="also write ASCII frames")
    p_run.add_argument("--stats", default=None, metavar="FILE", help="write the counts CSV")
    p_run.add_argument("--report", default=None, metavar="FILE", help="write the text report (default: stdout)")

    p_cmp = sub.add_parser("compare", help="compare all-slits-open against one slit closed")
    p_cmp.add_argument("--scenario", required=True)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--instants", type=int, default=None)
    p_cmp.add_argument("--close", type=int, default=None, help="index of the slit to close")
    p_cmp.add_argument("--runs", type=int, default=1, help="independent repetitions per variant")
    p_cmp.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_cmp.add_argument("--out", default=None, metavar="FILE", help="write the CSV table")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            spec = load_scenario(args.scenario)
            report = run_scenario(
                spec,
                instants=args.instants,
                seed=args.seed,
                frames_dir=args.frames,
                remanence=args.remanence,
                ascii_frames=args.ascii,
            )
            if args.stats:
                with open(args.stats, "w", encoding="ascii") as fh:
                    fh.write(report.stats_csv())
            text = report.text()
            if args.report:
                with open(args.report, "w", encoding="ascii") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        else:
            with open(args.scenario, "r", encoding="utf-8") as fh:
                text = fh.read()
            rows = compare_slits(
                text,
                close_index=args.close,
                seed=args.seed,
                instants=args.instants,
                runs=args.runs,
                jobs=args.jobs,
            )
            base = parse_scenario(text).base
            csv = frequency_csv(rows, base=base)
            if args.out:
                with open(args.out, "w", encoding="ascii") as fh:
                    fh.write(csv)
            sys.stdout.write(frequency_text(rows))
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
