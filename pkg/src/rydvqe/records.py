"""Run provenance: per-stage records, run records, and ensemble statistics.

The data in these records is a pure function of (config, seed); wall time
and other host-dependent facts live in a separate metadata block so that
the data files are reproducible byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

RNG_FAMILY = "numpy-pcg64+splitmix64-stream"


@dataclass(frozen=True)
class StageRecord:
    """Optimization outcome at one segment count."""

    stage: int
    n_segments: int
    times_ns: list
    omegas: list
    deltas: list
    radius_um: float
    energy: float
    eta_err_pct: float | None
    iterations: int
    n_evals: int
    cum_iterations: int
    cum_evals: int
    norm_drift: float
    translation_re: float
    translation_im: float
    split: dict | None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StageRecord":
        return cls(**d)


@dataclass(frozen=True)
class RunRecord:
    """Full provenance of one adaptive optimization run."""

    seed: int
    rng_family: str
    config: dict
    oracle_energy: float | None
    init_draws: dict
    stages: list
    stop_reason: str
    metadata: dict = field(default_factory=dict)

    @property
    def final_stage(self) -> StageRecord:
        return self.stages[-1]

    @property
    def final_eta_pct(self) -> float | None:
        return self.final_stage.eta_err_pct

    @property
    def final_energy(self) -> float:
        return self.final_stage.energy

    @property
    def final_radius_um(self) -> float:
        return self.final_stage.radius_um

    @property
    def final_sequence_dict(self) -> dict:
        last = self.final_stage
        return {
            "breakpoints": [
                [t, om, de] for t, om, de in zip(last.times_ns, last.omegas, last.deltas)
            ],
            "radius_um": last.radius_um,
        }

    def to_dict(self) -> dict:
        return {
            "schema": "rydvqe.run/1",
            "seed": self.seed,
            "rng_family": self.rng_family,
            "config": self.config,
            "oracle_energy": self.oracle_energy,
            "init_draws": self.init_draws,
            "stages": [s.to_dict() for s in self.stages],
            "stop_reason": self.stop_reason,
            "final_sequence": self.final_sequence_dict,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            seed=d["seed"],
            rng_family=d["rng_family"],
            config=d["config"],
            oracle_energy=d["oracle_energy"],
            init_draws=d["init_draws"],
            stages=[StageRecord.from_dict(s) for s in d["stages"]],
            stop_reason=d["stop_reason"],
            metadata=d.get("metadata", {}),
        )

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def read_json(cls, path: str | Path) -> "RunRecord":
        return cls.from_dict(json.loads(Path(path).read_text()))


STAGE_CSV_COLUMNS = [
    "run_id",
    "stage",
    "segments",
    "energy",
    "eta_err_percent",
    "iterations",
    "cumulative_iterations",
    "radius_um",
]


def stage_csv_rows(record: RunRecord, run_id: int) -> list[list]:
    rows = []
    for s in record.stages:
        rows.append(
            [
                run_id,
                s.stage,
                s.n_segments,
                repr(s.energy),
                "" if s.eta_err_pct is None else repr(s.eta_err_pct),
                s.iterations,
                s.cum_iterations,
                repr(s.radius_um),
            ]
        )
    return rows


def write_stage_csv(path: str | Path, records, run_ids=None) -> None:
    """Write the per-stage trace CSV for one or more runs."""
    if run_ids is None:
        run_ids = list(range(len(records)))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(STAGE_CSV_COLUMNS)
        for run_id, record in zip(run_ids, records):
            writer.writerows(stage_csv_rows(record, run_id))


@dataclass(frozen=True)
class EnsembleStats:
    """Summary statistics over the completed runs of one ensemble."""

    n_runs: int
    base_seed: int
    seeds: list
    final_eta_pct: list
    mean_eta_pct: float | None
    stderr_eta_pct: float | None
    best_run: int
    final_radius_um: list
    mean_radius_um: float
    final_segments: list
    nn_coupling_mhz_at_mean_radius: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def from_records(
        cls, records, base_seed: int, nn_coupling_mhz=None
    ) -> "EnsembleStats":
        etas = [r.final_eta_pct for r in records]
        radii = [r.final_radius_um for r in records]
        have_eta = [e for e in etas if e is not None]
        mean_eta = sum(have_eta) / len(have_eta) if have_eta else None
        stderr = None
        if len(have_eta) > 1:
            var = sum((e - mean_eta) ** 2 for e in have_eta) / (len(have_eta) - 1)
            stderr = math.sqrt(var / len(have_eta))
        elif len(have_eta) == 1:
            stderr = 0.0
        if have_eta:
            best = min(range(len(records)), key=lambda i: etas[i] if etas[i] is not None else math.inf)
        else:
            best = min(range(len(records)), key=lambda i: records[i].final_energy)
        mean_radius = sum(radii) / len(radii)
        return cls(
            n_runs=len(records),
            base_seed=base_seed,
            seeds=[r.seed for r in records],
            final_eta_pct=etas,
            mean_eta_pct=mean_eta,
            stderr_eta_pct=stderr,
            best_run=best,
            final_radius_um=radii,
            mean_radius_um=mean_radius,
            final_segments=[r.final_stage.n_segments for r in records],
            nn_coupling_mhz_at_mean_radius=nn_coupling_mhz,
        )
