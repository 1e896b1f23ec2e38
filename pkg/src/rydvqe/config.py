"""Configuration documents: parsing, validation, and round-tripping.

A single JSON document with sections {constants, geometry, target, vqe,
measure, output} drives every command.  Parsing reports the dotted path of
the offending field so config errors are actionable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .geometry import PhysicalConstants
from .hamiltonian import TargetHamiltonian

DEFAULT_RADIUS_CEILING_UM = 35.0


class ConfigError(ValueError):
    """A configuration document is malformed; ``field`` names the culprit."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"config field '{field_path}': {message}")
        self.field_path = field_path


@dataclass(frozen=True)
class FixedRadius:
    radius_um: float

    def to_dict(self) -> dict:
        return {"mode": "fixed", "radius_um": self.radius_um}


@dataclass(frozen=True)
class VariableRadius:
    bounds_um: tuple[float, float]

    def to_dict(self) -> dict:
        return {"mode": "variable", "bounds_um": list(self.bounds_um)}


@dataclass(frozen=True)
class NelderMeadSpec:
    max_iter: int = 5000

    def to_dict(self) -> dict:
        return {"kind": "nelder_mead", "max_iter": self.max_iter}


@dataclass(frozen=True)
class LbfgsbFdSpec:
    max_iter: int = 1000
    fd_step: float = 1e-4

    def to_dict(self) -> dict:
        return {"kind": "lbfgsb_fd", "max_iter": self.max_iter, "fd_step": self.fd_step}


def default_radius_bounds(n_atoms: int, constants: PhysicalConstants) -> tuple[float, float]:
    """Radius window implied by the nearest-neighbor spacing floor."""
    floor = constants.min_nn_distance_um / (2.0 * math.sin(math.pi / n_atoms))
    return (floor, DEFAULT_RADIUS_CEILING_UM)


@dataclass(frozen=True)
class VqeConfig:
    """Everything one adaptive optimization run depends on."""

    target: TargetHamiltonian
    n_atoms: int
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    duration_ns: int = 2400
    initial_state: str = "product_g"  # product_g | q_pi
    radius_mode: FixedRadius | VariableRadius | None = None
    optimizer: NelderMeadSpec | LbfgsbFdSpec = field(default_factory=NelderMeadSpec)
    max_segments: int = 30
    error_threshold_pct: float = 0.01
    seed: int = 1
    step_ns: float = 1.0
    init_strategy: str = "uniform"  # uniform | stable_radius

    def __post_init__(self):
        if self.target.n_sites != self.n_atoms:
            raise ValueError("target size and atom number disagree")
        if self.duration_ns % self.constants.clock_period_ns != 0:
            raise ValueError("duration_ns must be a multiple of the clock period")
        if self.duration_ns <= self.constants.min_segment_ns:
            raise ValueError("duration_ns must exceed the minimum segment duration")
        if self.initial_state not in ("product_g", "q_pi"):
            raise ValueError(f"unknown initial_state {self.initial_state!r}")
        if self.error_threshold_pct <= 0:
            raise ValueError("error_threshold_pct must be positive")
        if self.max_segments < 1:
            raise ValueError("max_segments must be at least 1")
        if self.step_ns <= 0:
            raise ValueError("step_ns must be positive")
        if self.init_strategy not in ("uniform", "stable_radius"):
            raise ValueError(f"unknown init_strategy {self.init_strategy!r}")
        if self.radius_mode is None:
            object.__setattr__(
                self,
                "radius_mode",
                VariableRadius(default_radius_bounds(self.n_atoms, self.constants)),
            )
        if isinstance(self.radius_mode, VariableRadius):
            lo, hi = self.radius_mode.bounds_um
            if not 0 < lo < hi:
                raise ValueError("radius bounds must satisfy 0 < lo < hi")

    def with_seed(self, seed: int) -> "VqeConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class MeasureConfig:
    shots_per_basis: int = 100_000
    rotation_time_ns: float = 900.0
    coherence_budget_ns: float = 6000.0
    shots_seed: int = 1


@dataclass(frozen=True)
class Document:
    """Parsed top-level configuration document."""

    vqe: VqeConfig
    measure: MeasureConfig
    geometry_radius_um: float | None
    output_dir: str


class _Reader:
    """Dict reader that turns missing/ill-typed entries into ConfigErrors."""

    def __init__(self, data: dict, prefix: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(prefix or "<root>", "expected a JSON object")
        self.data = data
        self.prefix = prefix

    def _path(self, key: str) -> str:
        return f"{self.prefix}.{key}" if self.prefix else key

    def section(self, key: str) -> "_Reader":
        return _Reader(self.data.get(key, {}), self._path(key))

    def require(self, key: str, kind, convert=None):
        if key not in self.data:
            raise ConfigError(self._path(key), "missing required field")
        return self._convert(key, self.data[key], kind, convert)

    def get(self, key: str, kind, default, convert=None):
        if key not in self.data or self.data[key] is None:
            return default
        return self._convert(key, self.data[key], kind, convert)

    def _convert(self, key, value, kind, convert):
        if kind is float and isinstance(value, int):
            value = float(value)
        if kind is int and isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, kind):
            raise ConfigError(
                self._path(key), f"expected {kind.__name__}, got {type(value).__name__}"
            )
        if convert is not None:
            try:
                return convert(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(self._path(key), str(exc)) from exc
        return value

    def unknown_keys(self, allowed: set[str]) -> None:
        extra = set(self.data) - allowed
        if extra:
            raise ConfigError(self._path(sorted(extra)[0]), "unknown field")


def _pair(value) -> tuple[float, float]:
    lo, hi = (float(v) for v in value)
    return lo, hi


def parse_document(data: dict) -> Document:
    root = _Reader(data)
    root.unknown_keys({"constants", "geometry", "target", "vqe", "measure", "output"})

    cs = root.section("constants")
    try:
        constants = PhysicalConstants(
            c6_over_hbar=cs.get("c6_over_hbar", float, PhysicalConstants.c6_over_hbar),
            clock_period_ns=cs.get("clock_period_ns", int, PhysicalConstants.clock_period_ns),
            min_segment_ns=cs.get("min_segment_ns", int, PhysicalConstants.min_segment_ns),
            omega_bounds=cs.get("omega_bounds", list, PhysicalConstants.omega_bounds, _pair),
            delta_bounds=cs.get("delta_bounds", list, PhysicalConstants.delta_bounds, _pair),
            min_nn_distance_um=cs.get(
                "min_nn_distance_um", float, PhysicalConstants.min_nn_distance_um
            ),
        )
    except ValueError as exc:
        raise ConfigError("constants", str(exc)) from exc

    geo = root.section("geometry")
    n_atoms = geo.require("n_atoms", int)
    geometry_radius = geo.get("radius_um", float, None)

    tgt = root.section("target")
    kind = tgt.require("kind", str)
    try:
        if kind == "xxx":
            target = TargetHamiltonian.xxx(n_atoms, j=tgt.get("j", float, 1.0))
        elif kind == "mfi":
            target = TargetHamiltonian.mfi(
                n_atoms,
                h_x=tgt.get("h_x", float, 0.0),
                h_z=tgt.get("h_z", float, 0.0),
                j=tgt.get("j", float, 1.0),
            )
        else:
            raise ConfigError("target.kind", f"unknown target kind {kind!r}")
    except ValueError as exc:
        raise ConfigError("target", str(exc)) from exc

    vq = root.section("vqe")
    rm = vq.data.get("radius_mode")
    radius_mode = None
    if rm is not None:
        rr = vq.section("radius_mode")
        mode = rr.require("mode", str)
        if mode == "fixed":
            radius_mode = FixedRadius(rr.require("radius_um", float))
        elif mode == "variable":
            radius_mode = VariableRadius(
                rr.get("bounds_um", list, default_radius_bounds(n_atoms, constants), _pair)
            )
        else:
            raise ConfigError("vqe.radius_mode.mode", f"unknown mode {mode!r}")
    opt = vq.data.get("optimizer")
    if opt is None:
        optimizer = NelderMeadSpec()
    else:
        orr = vq.section("optimizer")
        okind = orr.require("kind", str)
        if okind == "nelder_mead":
            optimizer = NelderMeadSpec(max_iter=orr.get("max_iter", int, 5000))
        elif okind == "lbfgsb_fd":
            optimizer = LbfgsbFdSpec(
                max_iter=orr.get("max_iter", int, 1000),
                fd_step=orr.get("fd_step", float, 1e-4),
            )
        else:
            raise ConfigError("vqe.optimizer.kind", f"unknown optimizer {okind!r}")

    try:
        vqe = VqeConfig(
            target=target,
            n_atoms=n_atoms,
            constants=constants,
            duration_ns=vq.get("duration_ns", int, 2400),
            initial_state=vq.get("initial_state", str, "product_g"),
            radius_mode=radius_mode,
            optimizer=optimizer,
            max_segments=vq.get("max_segments", int, 30),
            error_threshold_pct=vq.get("error_threshold_pct", float, 0.01),
            seed=vq.get("seed", int, 1),
            step_ns=vq.get("step_ns", float, 1.0),
            init_strategy=vq.get("init_strategy", str, "uniform"),
        )
    except ValueError as exc:
        raise ConfigError("vqe", str(exc)) from exc

    ms = root.section("measure")
    measure = MeasureConfig(
        shots_per_basis=ms.get("shots_per_basis", int, 100_000),
        rotation_time_ns=ms.get("rotation_time_ns", float, 900.0),
        coherence_budget_ns=ms.get("coherence_budget_ns", float, 6000.0),
        shots_seed=ms.get("shots_seed", int, 1),
    )

    out = root.section("output")
    output_dir = out.get("dir", str, "out")

    return Document(
        vqe=vqe,
        measure=measure,
        geometry_radius_um=geometry_radius,
        output_dir=output_dir,
    )


def document_to_dict(doc: Document) -> dict:
    c = doc.vqe.constants
    v = doc.vqe
    return {
        "constants": {
            "c6_over_hbar": c.c6_over_hbar,
            "clock_period_ns": c.clock_period_ns,
            "min_segment_ns": c.min_segment_ns,
            "omega_bounds": list(c.omega_bounds),
            "delta_bounds": list(c.delta_bounds),
            "min_nn_distance_um": c.min_nn_distance_um,
        },
        "geometry": {"n_atoms": v.n_atoms, "radius_um": doc.geometry_radius_um},
        "target": v.target.to_dict(),
        "vqe": {
            "duration_ns": v.duration_ns,
            "initial_state": v.initial_state,
            "radius_mode": v.radius_mode.to_dict(),
            "optimizer": v.optimizer.to_dict(),
            "max_segments": v.max_segments,
            "error_threshold_pct": v.error_threshold_pct,
            "seed": v.seed,
            "step_ns": v.step_ns,
            "init_strategy": v.init_strategy,
        },
        "measure": {
            "shots_per_basis": doc.measure.shots_per_basis,
            "rotation_time_ns": doc.measure.rotation_time_ns,
            "coherence_budget_ns": doc.measure.coherence_budget_ns,
            "shots_seed": doc.measure.shots_seed,
        },
        "output": {"dir": doc.output_dir},
    }


def load_document(path: str | Path) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_document(data)
