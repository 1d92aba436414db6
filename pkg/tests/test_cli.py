"""Command-line surface: run, compare, exit codes, file outputs."""

import os

import pytest

from syncell.cli import EXIT_DIVERGENCE, EXIT_OK, EXIT_SCENARIO, compare_slits, main

SMALL = """\
[grid]
width=31
height=31

[source]
x=15
y=27
state=0
period=30
shots=2

[detector]
x0=1
y0=17
x1=29
y1=17
kind=up

[run]
instants=90
seed=13
"""

TWO_SLIT = """\
[grid]
width=41
height=41

[wall]
x0=1
y0=25
x1=39
y1=25

[slit]
wall=0
x0=17
x1=17
open=true

[slit]
wall=0
x0=24
x1=24
open=true

[source]
x=20
y=35
state=0
period=8
shots=40

[detector]
x0=1
y0=12
x1=39
y1=12
kind=up

[run]
instants=420
seed=5
"""


@pytest.fixture
def small_file(tmp_path):
    path = tmp_path / "small.scn"
    path.write_text(SMALL)
    return str(path)


def test_run_writes_stats_and_report(small_file, tmp_path, capsys):
    stats = tmp_path / "stats.csv"
    code = main(["run", "--scenario", small_file, "--stats", str(stats)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "detections_total=2" in out
    assert stats.read_text().startswith("detector,state0")


def test_run_twice_same_seed_is_byte_identical(small_file, tmp_path):
    outputs = []
    for name in ("a", "b"):
        stats = tmp_path / f"{name}.csv"
        report = tmp_path / f"{name}.txt"
        frames = tmp_path / f"frames_{name}"
        code = main(
            [
                "run",
                "--scenario",
                small_file,
                "--stats",
                str(stats),
                "--report",
                str(report),
                "--frames",
                str(frames),
                "--ascii",
            ]
        )
        assert code == EXIT_OK
        frame_files = sorted(os.listdir(frames))
        blob = stats.read_bytes() + report.read_bytes()
        for f in frame_files:
            blob += (frames / f).read_bytes()
        outputs.append((frame_files, blob))
    assert outputs[0] == outputs[1]


def test_seed_override_changes_outcomes_not_arrivals(small_file, tmp_path):
    reports = []
    for seed in ("1", "2"):
        report = tmp_path / f"r{seed}.txt"
        main(["run", "--scenario", small_file, "--seed", seed, "--report", str(report)])
        reports.append(report.read_text())
    # same arrivals and sizes, independent outcomes
    for text in reports:
        assert "superposition_sizes=min:19,max:19,mean:19.000" in text
        assert "detections_total=2" in text


def test_zero_instants_gives_an_empty_report(small_file, capsys):
    code = main(["run", "--scenario", small_file, "--instants", "0"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "instants=0" in out and "detections_total=0" in out


def test_missing_file_and_parse_error_exit_2(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope.scn")]) == EXIT_SCENARIO
    bad = tmp_path / "bad.scn"
    bad.write_text("[grid]\nwidth=oops\nheight=5\n")
    assert main(["run", "--scenario", str(bad)]) == EXIT_SCENARIO
    err = capsys.readouterr().err
    assert "scenario error" in err


def test_divergent_behavior_exits_3(tmp_path, capsys, monkeypatch):
    # rig a world whose first instant spins forever
    import syncell.cli as cli_mod
    from syncell.kernel import Await

    real_build = cli_mod.build_world

    def sabotaged(spec):
        world = real_build(spec)
        world.sched.microstep_budget = 500
        e = world.sched.new_event()

        def spinner():
            while True:
                world.sched.generate(e, 0)
                yield Await(e)

        world.sched.spawn(spinner())
        return world

    monkeypatch.setattr(cli_mod, "build_world", sabotaged)
    scn = tmp_path / "s.scn"
    scn.write_text(SMALL)
    assert main(["run", "--scenario", str(scn)]) == EXIT_DIVERGENCE
    assert "divergence" in capsys.readouterr().err


def test_compare_emits_both_variants(tmp_path, capsys):
    scn = tmp_path / "two.scn"
    scn.write_text(TWO_SLIT)
    out = tmp_path / "table.csv"
    code = main(["compare", "--scenario", str(scn), "--out", str(out)])
    assert code == EXIT_OK
    table = out.read_text().splitlines()
    assert table[0] == "variant,state0,state1,state2,state3,state4,state5,total"
    assert table[1].startswith("1 slit,")
    assert table[2].startswith("2 slits,")
    assert table[1].endswith(",40") and table[2].endswith(",40")
    shown = capsys.readouterr().out
    assert "1 slit" in shown and "2 slits" in shown


def test_compare_merges_runs_and_matches_parallel_execution():
    seq = compare_slits(TWO_SLIT, seed=3, runs=2, jobs=1)
    par = compare_slits(TWO_SLIT, seed=3, runs=2, jobs=2)
    assert [(r.label, r.fractions, r.total) for r in seq] == [
        (r.label, r.fractions, r.total) for r in par
    ]
    assert all(r.total == 80 for r in seq)


def test_compare_needs_an_open_slit(tmp_path):
    closed = TWO_SLIT.replace("open=true", "open=false")
    scn = tmp_path / "closed.scn"
    scn.write_text(closed)
    assert main(["compare", "--scenario", str(scn)]) == EXIT_SCENARIO


def test_expected_distribution_reads_the_first_contact():
    from syncell.cli import expected_distribution
    from syncell.scenario import build_world, parse_scenario

    world = build_world(parse_scenario(SMALL))
    fractions = expected_distribution(world, 0, 100)
    assert abs(sum(fractions.values()) - 1.0) < 1e-9
    assert all(0 < f <= 1 for f in fractions.values())
    # probing never measures: no outcome, no particle
    assert world.detectors[0].detections == 0
    assert world.particles == []


def test_expected_distribution_errors_when_nothing_arrives():
    from syncell.cli import DetectorNotReachedError, expected_distribution
    from syncell.scenario import build_world, parse_scenario

    silent = SMALL.replace("shots=2", "shots=0")
    world = build_world(parse_scenario(silent))
    with pytest.raises(DetectorNotReachedError):
        expected_distribution(world, 0, 50)
