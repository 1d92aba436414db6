"""Detection bookkeeping, run reports, and frequency tables."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass


@dataclass
class DetectionRecord:
    """One detector contact with a superposition.

    ``state_counts`` is the per-basic-state census of every cell of the
    contacted superposition at the contact instant (the whole superposition,
    not only the zone slice). ``chosen_state`` is filled in once the
    corresponding reduction decides; it stays None for probe-mode contacts
    (measurement disabled) and for measurements that never resolve.
    """

    instant: int
    detector: int
    ctx_serial: int
    measure_eid: int
    size: int
    state_counts: tuple[int, ...]
    measured: bool
    chosen_state: int | None = None
    ctx: object = None  # the live context, kept for collapse audits


@dataclass
class ReductionRecord:
    instant: int
    ctx_serial: int
    measure_eid: int
    cell_id: int
    state: int


class RunStats:
    """Statistics sink shared by detectors and reductions during a run."""

    def __init__(self):
        self.detections: list[DetectionRecord] = []
        self.reductions: list[ReductionRecord] = []
        self._pending: dict[int, list[DetectionRecord]] = {}

    def record_contact(self, rec: DetectionRecord) -> None:
        self.detections.append(rec)
        if rec.measured:
            self._pending.setdefault(rec.ctx_serial, []).append(rec)

    def record_reduction(self, rec: ReductionRecord) -> None:
        self.reductions.append(rec)
        for det in self._pending.pop(rec.ctx_serial, ()):
            det.chosen_state = rec.state

    def unresolved(self) -> int:
        """Measured contacts whose reduction never reported back."""
        return sum(len(v) for v in self._pending.values())


def state_fractions(counts) -> dict[int, float]:
    """Per-state fractions of a superposition census; empty census -> {}."""
    total = sum(counts)
    if total == 0:
        return {}
    return {s: n / total for s, n in enumerate(counts) if n}


@dataclass
class RunReport:
    """Summary of one executed run; all fields render deterministically."""

    seed: int
    instants: int
    base: int
    scenario_digest: str
    detector_counts: list[list[int]]  # per detector, per basic state
    detector_sizes: list[list[int]]  # superposition sizes per detection
    detections_total: int
    unresolved: int
    ctx_collisions: int

    @classmethod
    def from_world(cls, world, instants: int) -> "RunReport":
        base = world.base
        n_det = len(world.detectors)
        counts = [[0] * base for _ in range(n_det)]
        sizes: list[list[int]] = [[] for _ in range(n_det)]
        total = 0
        for det in world.stats.detections:
            if not det.measured:
                continue
            sizes[det.detector].append(det.size)
            if det.chosen_state is not None:
                counts[det.detector][det.chosen_state] += 1
                total += 1
        return cls(
            seed=world.seed,
            instants=instants,
            base=base,
            scenario_digest=world.scenario_digest,
            detector_counts=counts,
            detector_sizes=sizes,
            detections_total=total,
            unresolved=world.stats.unresolved(),
            ctx_collisions=world.ctx_collisions,
        )

    def stats_csv(self) -> str:
        cols = ",".join(f"state{s}" for s in range(self.base))
        lines = [f"detector,{cols},total"]
        for i, row in enumerate(self.detector_counts):
            lines.append(f"{i}," + ",".join(str(n) for n in row) + f",{sum(row)}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        lines = [
            f"scenario_digest={self.scenario_digest}",
            f"seed={self.seed}",
            f"instants={self.instants}",
            f"base={self.base}",
            f"detections_total={self.detections_total}",
            f"unresolved={self.unresolved}",
            f"ctx_collisions={self.ctx_collisions}",
        ]
        for i, row in enumerate(self.detector_counts):
            lines.append(f"detector={i}")
            lines.append("  counts=" + ",".join(str(n) for n in row))
            lines.append(f"  total={sum(row)}")
            sizes = self.detector_sizes[i]
            if sizes:
                mean = sum(sizes) / len(sizes)
                lines.append(
                    f"  superposition_sizes=min:{min(sizes)},max:{max(sizes)},"
                    f"mean:{mean:.3f}"
                )
            else:
                lines.append("  superposition_sizes=none")
        return "\n".join(lines) + "\n"


@dataclass
class FrequencyRow:
    label: str
    fractions: list[float]
    total: int

    @property
    def empty(self) -> bool:
        return self.total == 0


def frequency_table(reports, labels=None) -> list[FrequencyRow]:
    """Empirical per-state frequencies, one row per run report.

    Counts are aggregated over all detectors of each report. Fractions of a
    non-empty row sum to 1 up to float rounding; a report with zero resolved
    detections yields a row of zeros with ``empty`` set.
    """
    rows = []
    for i, report in enumerate(reports):
        label = labels[i] if labels else f"run{i}"
        base = report.base
        totals = [0] * base
        for det_row in report.detector_counts:
            for s, n in enumerate(det_row):
                totals[s] += n
        grand = sum(totals)
        if grand == 0:
            rows.append(FrequencyRow(label, [0.0] * base, 0))
        else:
            rows.append(FrequencyRow(label, [n / grand for n in totals], grand))
    return rows


def frequency_csv(rows: list[FrequencyRow], base: int = 6) -> str:
    cols = ",".join(f"state{s}" for s in range(base))
    lines = [f"variant,{cols},total"]
    for row in rows:
        label = row.label + (" (no detections)" if row.empty else "")
        lines.append(
            label + "," + ",".join(f"{f:.6f}" for f in row.fractions) + f",{row.total}"
        )
    return "\n".join(lines) + "\n"


def frequency_text(rows: list[FrequencyRow]) -> str:
    lines = []
    for row in rows:
        cells = " ".join(f"{f:.3f}" for f in row.fractions)
        note = "  (no detections)" if row.empty else ""
        lines.append(f"{row.label:>10}  {cells}{note}")
    return "\n".join(lines) + "\n"


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
