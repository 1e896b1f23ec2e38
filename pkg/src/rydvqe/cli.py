"""Batch front end: exact diagonalization, runs, ensembles, measurement,
and figure-data emission.

Every subcommand reads one JSON config document; outputs land in the
directory given by --outdir, the RYDVQE_OUTDIR environment variable, or the
config's output section, in that order of precedence.  Exit codes: 0 on
success, 2 for configuration problems, 3 for runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import figures
from .config import ConfigError, Document, load_document
from .evolve import evolve
from .geometry import RingGeometry, interaction_matrix, nn_ising_mhz
from .measure import estimate_heisenberg_energy, rotated_protocol_duration_ns
from .oracle import correlation_profile, dense_ground_state, ground_state_report
from .pulses import PulseError, PulseSequence
from .records import RunRecord, write_stage_csv
from .vqe import adaptive_run, ensemble

FIGURE_NAMES = (
    "error_vs_segments",
    "pulse_profile",
    "correlators",
    "radius_vs_segments",
    "iterations",
)


class RuntimeFailure(RuntimeError):
    pass


def _outdir(args, doc: Document) -> Path:
    path = args.outdir or os.environ.get("RYDVQE_OUTDIR") or doc.output_dir
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=1))
    print(path)


def cmd_ed(args) -> int:
    doc = load_document(args.config)
    report = ground_state_report(doc.vqe.target)
    out = _outdir(args, doc)
    _write_json(out / "ed.json", report)
    return 0


def cmd_run(args) -> int:
    doc = load_document(args.config)
    config = doc.vqe if args.seed is None else doc.vqe.with_seed(args.seed)
    if args.dry_run:
        print(f"config OK: {config.n_atoms} atoms, target {config.target.kind}, "
              f"seed {config.seed}")
        return 0
    record = adaptive_run(config)
    out = _outdir(args, doc)
    record.write_json(out / f"run_{config.seed}.json")
    print(out / f"run_{config.seed}.json")
    write_stage_csv(out / f"run_{config.seed}.csv", [record], run_ids=[0])
    print(out / f"run_{config.seed}.csv")
    return 0


def cmd_ensemble(args) -> int:
    doc = load_document(args.config)
    if args.runs < 1:
        raise ConfigError("--runs", "need at least one run")
    stats, records = ensemble(
        doc.vqe, n_runs=args.runs, base_seed=args.seed, parallel=args.parallel
    )
    out = _outdir(args, doc)
    for record in records:
        record.write_json(out / f"run_{record.seed}.json")
    write_stage_csv(out / "stages.csv", records)
    print(out / "stages.csv")
    stats.write_json(out / "ensemble_stats.json")
    print(out / "ensemble_stats.json")
    return 0


def cmd_measure(args) -> int:
    doc = load_document(args.config)
    try:
        pulse_doc = json.loads(Path(args.pulse).read_text())
        seq = PulseSequence.from_dict(pulse_doc)
    except (OSError, json.JSONDecodeError, PulseError) as exc:
        raise ConfigError("--pulse", str(exc)) from exc
    radius = pulse_doc.get("radius_um", doc.geometry_radius_um)
    if radius is None:
        raise ConfigError(
            "geometry.radius_um", "needed when the pulse file carries no radius"
        )
    config = doc.vqe
    geometry = RingGeometry(config.n_atoms, float(radius))
    geometry.check_spacing(config.constants)
    jmat = interaction_matrix(geometry, config.constants)
    from .vqe import _initial_state  # shared initial-state construction

    psi = evolve(seq, _initial_state(config), jmat, config.step_ns)
    rng = np.random.default_rng(doc.measure.shots_seed)
    sampled = estimate_heisenberg_energy(
        psi, doc.measure.shots_per_basis, rng, j=config.target.j
    )
    exact = estimate_heisenberg_energy(psi, 0, exact=True, j=config.target.j)
    total_ns, within = rotated_protocol_duration_ns(
        seq.duration_ns, doc.measure.rotation_time_ns, doc.measure.coherence_budget_ns
    )
    out = _outdir(args, doc)
    _write_json(
        out / "measure.json",
        {
            "energy_estimate": sampled.value,
            "stderr": sampled.stderr,
            "shots_per_basis": sampled.shots_per_basis,
            "bond_means": sampled.bond_means,
            "exact_energy": exact.value,
            "protocol_duration_ns": total_ns,
            "within_coherence_budget": within,
        },
    )
    return 0


def _load_records(records_dir: Path) -> list[RunRecord]:
    paths = sorted(records_dir.glob("run_*.json"))
    if not paths:
        raise RuntimeFailure(f"no run records found in {records_dir}")
    return [RunRecord.read_json(p) for p in paths]


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    print(path)


def cmd_figdata(args) -> int:
    records_dir = Path(args.records)
    records = _load_records(records_dir)
    out = Path(args.outdir) if args.outdir else records_dir
    out.mkdir(parents=True, exist_ok=True)
    figure = args.figure

    if figure == "error_vs_segments":
        rows = [
            (i, s.n_segments, s.eta_err_pct)
            for i, rec in enumerate(records)
            for s in rec.stages
        ]
        _write_csv(out / "error_vs_segments.csv", ["run", "segments", "eta_err"], rows)
        threshold = records[0].config.get("error_threshold_pct")
        figures.render_error_vs_segments(rows, threshold, out / "error_vs_segments.png")
    elif figure == "pulse_profile":
        rows = [
            (i, t, om, de)
            for i, rec in enumerate(records)
            for t, om, de in zip(
                rec.final_stage.times_ns, rec.final_stage.omegas, rec.final_stage.deltas
            )
        ]
        _write_csv(out / "pulse_profile.csv", ["run", "t_ns", "omega", "delta"], rows)
        figures.render_pulse_profile(rows, out / "pulse_profile.png")
    elif figure == "correlators":
        rows = _correlator_rows(records)
        _write_csv(
            out / "correlators.csv",
            ["run", "axis", "separation", "optimized", "exact"],
            rows,
        )
        figures.render_correlators(rows, out / "correlators.png")
    elif figure == "radius_vs_segments":
        rows = [
            (i, s.n_segments, s.radius_um)
            for i, rec in enumerate(records)
            for s in rec.stages
        ]
        _write_csv(out / "radius_vs_segments.csv", ["run", "segments", "radius_um"], rows)
        figures.render_radius_vs_segments(rows, out / "radius_vs_segments.png")
    elif figure == "iterations":
        rows = [
            (i, s.n_segments, s.iterations, s.cum_iterations)
            for i, rec in enumerate(records)
            for s in rec.stages
        ]
        _write_csv(
            out / "iterations.csv",
            ["run", "segments", "iterations", "cumulative_iterations"],
            rows,
        )
        figures.render_iterations(rows, out / "iterations.png")
    else:
        raise ConfigError("--figure", f"unknown figure {figure!r}")
    return 0


def _rebuild_config(record: RunRecord):
    from .config import parse_document

    cfg = record.config
    doc = parse_document(
        {
            "constants": cfg["constants"],
            "geometry": {"n_atoms": cfg["n_atoms"]},
            "target": cfg["target"],
            "vqe": {
                k: v
                for k, v in cfg.items()
                if k not in ("constants", "target", "n_atoms")
            },
        }
    )
    return doc.vqe


def _correlator_rows(records: list[RunRecord]) -> list[tuple]:
    """Re-simulate each final schedule and pair its correlators with exact ones.

    Exchange targets use the S = sigma/2 normalization shown alongside the
    exact curves; Ising targets use bare Pauli ZZ / XX correlators.
    """
    rows = []
    for i, record in enumerate(records):
        config = _rebuild_config(record)
        seq = PulseSequence.from_dict(record.final_sequence_dict)
        geometry = RingGeometry(config.n_atoms, record.final_radius_um)
        jmat = interaction_matrix(geometry, config.constants)
        from .vqe import _initial_state

        psi = evolve(seq, _initial_state(config), jmat, config.step_ns)
        exact_vec = dense_ground_state(config.target).vector
        spin_half = config.target.kind == "xxx"
        axes = ("x", "y", "z") if spin_half else ("z", "x")
        for axis in axes:
            opt_profile = correlation_profile(psi, axis, spin_half=spin_half)
            exact_profile = correlation_profile(exact_vec, axis, spin_half=spin_half)
            for r, (v, e) in enumerate(zip(opt_profile, exact_profile), start=1):
                rows.append((i, axis, r, float(v), float(e)))
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydvqe",
        description="Pulse-level variational ground-state preparation on Rydberg rings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("-c", "--config", required=True, help="JSON config document")
        p.add_argument("-o", "--outdir", default=None, help="output directory")

    p_ed = sub.add_parser("ed", help="exact diagonalization of the target")
    add_common(p_ed)
    p_ed.set_defaults(func=cmd_ed)

    p_run = sub.add_parser("run", help="one adaptive optimization run")
    add_common(p_run)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--dry-run", action="store_true", help="validate config and exit")
    p_run.set_defaults(func=cmd_run)

    p_ens = sub.add_parser("ensemble", help="independent seeded runs with statistics")
    add_common(p_ens)
    p_ens.add_argument("--runs", type=int, required=True, help="number of runs (>= 1)")
    p_ens.add_argument("--seed", type=int, default=1, help="base seed")
    p_ens.add_argument("--parallel", type=int, default=1, help="worker processes")
    p_ens.set_defaults(func=cmd_ensemble)

    p_meas = sub.add_parser("measure", help="shot-based energy estimate of a schedule")
    add_common(p_meas)
    p_meas.add_argument("--pulse", required=True, help="pulse schedule JSON")
    p_meas.set_defaults(func=cmd_measure)

    p_fig = sub.add_parser("figdata", help="tidy CSV + figure for stored records")
    p_fig.add_argument("--records", required=True, help="directory of run_*.json files")
    p_fig.add_argument("--figure", required=True, choices=FIGURE_NAMES)
    p_fig.add_argument("-o", "--outdir", default=None)
    p_fig.set_defaults(func=cmd_figdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeFailure, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
