"""Adaptive pulse optimization: cost evaluation, optimizers, and ensembles.

One run alternates bounded classical optimization of all breakpoint
amplitudes (plus, optionally, the ring radius) with random time splitting of
the current optimal schedule.  Splitting preserves the sampled pulse exactly,
so every stage warm-starts at its predecessor's optimum and recorded costs
can only improve, up to integrator jitter.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import _kernels
from .config import LbfgsbFdSpec, NelderMeadSpec, VariableRadius, VqeConfig
from .evolve import IntegrationError, evolve_with_info
from .geometry import GeometryError, RingGeometry, interaction_matrix, nn_ising_mhz
from .hamiltonian import expectation, product_ground_state
from .measure import prepare_q_pi
from .oracle import MAX_DENSE_QUBITS, dense_ground_state, translation_expectation
from .pulses import PulseError, PulseSequence, random_split
from .records import RNG_FAMILY, EnsembleStats, RunRecord, StageRecord

#: cost assigned to invalid intermediate configurations, far above any
#: physical energy in target units
PENALTY = 1.0e6

#: optimizer coordinate for the radius is radius_um * RADIUS_SCALE, keeping
#: all coordinates O(1-10)
RADIUS_SCALE = 0.1

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One output of the SplitMix64 mixing function (public-domain constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D4A2CA9F1D8415) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, k: int) -> int:
    """Seed for ensemble member k: splitmix64(splitmix64(base_seed) + k).

    Deterministic, documented, and extensible: adding runs never changes the
    seeds of earlier members.
    """
    return splitmix64((splitmix64(base_seed & _MASK64) + k) & _MASK64)


def relative_error(energy: float, ground_energy: float) -> float:
    """100 * |E - E_gs| / |E_gs| in percent."""
    if ground_energy == 0:
        raise ValueError("relative error undefined for zero reference energy")
    return 100.0 * abs(energy - ground_energy) / abs(ground_energy)


@dataclass(frozen=True)
class OptimizerResult:
    x: np.ndarray
    fun: float
    iterations: int
    n_evals: int


class _CountingFunction:
    def __init__(self, f):
        self.f = f
        self.n_evals = 0

    def __call__(self, x):
        self.n_evals += 1
        return self.f(x)


def nelder_mead(
    f,
    x0: np.ndarray,
    bounds,
    max_iter: int,
    xatol: float = 1e-8,
    fatol: float = 1e-10,
    initial_step: float | None = None,
) -> OptimizerResult:
    """Bounded simplex search (reflection 1, expansion 2, contractions 0.5).

    Proposed vertices are clipped to the box before evaluation; termination
    is on simplex spread below ``xatol`` and value spread below ``fatol``,
    or on the iteration cap.  ``initial_step`` optionally sets the absolute
    per-coordinate size of the initial simplex.
    """
    x0 = np.asarray(x0, dtype=float)
    counted = _CountingFunction(f)
    f0 = counted(x0)
    if not np.isfinite(f0):
        raise ValueError("objective is not finite at the starting point")
    options = {
        "maxiter": max_iter,
        "xatol": xatol,
        "fatol": fatol,
        "adaptive": False,
    }
    if initial_step is not None:
        lb = np.array([b[0] for b in bounds])
        ub = np.array([b[1] for b in bounds])
        simplex = np.tile(x0, (x0.size + 1, 1))
        for i in range(x0.size):
            step = initial_step
            if x0[i] + step > ub[i]:
                step = -initial_step
            simplex[i + 1, i] = np.clip(x0[i] + step, lb[i], ub[i])
        options["initial_simplex"] = simplex
    res = scipy.optimize.minimize(
        counted, x0, method="Nelder-Mead", bounds=bounds, options=options
    )
    return OptimizerResult(
        x=np.asarray(res.x, dtype=float),
        fun=float(res.fun),
        iterations=int(res.nit),
        n_evals=counted.n_evals,
    )


def lbfgsb_fd(
    f,
    x0: np.ndarray,
    bounds,
    max_iter: int,
    fd_step: float = 1e-4,
) -> OptimizerResult:
    """Box-constrained quasi-Newton with central finite-difference gradients.

    The difference step shrinks at the box edges so probes stay feasible;
    history size is 10.
    """
    x0 = np.asarray(x0, dtype=float)
    lb = np.array([b[0] for b in bounds])
    ub = np.array([b[1] for b in bounds])
    counted = _CountingFunction(f)
    f0 = counted(x0)
    if not np.isfinite(f0):
        raise ValueError("objective is not finite at the starting point")

    def grad(x):
        g = np.zeros_like(x)
        for i in range(x.size):
            h_plus = min(fd_step, ub[i] - x[i])
            h_minus = min(fd_step, x[i] - lb[i])
            if h_plus + h_minus <= 0:
                continue
            xp = x.copy()
            xp[i] += h_plus
            xm = x.copy()
            xm[i] -= h_minus
            g[i] = (counted(xp) - counted(xm)) / (h_plus + h_minus)
        return g

    res = scipy.optimize.minimize(
        counted,
        x0,
        jac=grad,
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": max_iter, "maxcor": 10},
    )
    return OptimizerResult(
        x=np.asarray(res.x, dtype=float),
        fun=float(res.fun),
        iterations=int(res.nit),
        n_evals=counted.n_evals,
    )


def stable_radius_floor(n_atoms: int, config: VqeConfig) -> float:
    """Smallest radius at which the integrator step resolves the diagonal.

    The largest diagonal scale is the fully excited configuration: the full
    interaction sum K / R^6 plus N * max|delta|.  The floor keeps that scale
    times the step below ~0.8 rad so the fixed-step integrator stays in its
    stable region during initialization.
    """
    c = config.constants
    k_sum = 0.0
    for i in range(n_atoms):
        for j in range(i + 1, n_atoms):
            sep = min((j - i) % n_atoms, (i - j) % n_atoms)
            k_sum += c.c6_over_hbar / (2.0 * math.sin(math.pi * sep / n_atoms)) ** 6
    budget = 0.8 / (config.step_ns * 1e-3)
    det = n_atoms * max(abs(c.delta_bounds[0]), abs(c.delta_bounds[1]))
    det += 0.5 * n_atoms * c.omega_bounds[1]
    headroom = budget - det
    if headroom <= 0:
        return math.inf
    return (k_sum / headroom) ** (1.0 / 6.0)


class CostFunction:
    """Energy of the evolved state as a function of the flat parameter vector.

    Coordinates are (omega_0..omega_M, delta_0..delta_M[, radius * 0.1]); the
    radius coordinate is present only in variable-radius mode.  Invalid
    intermediate configurations (spacing floor, pulse bounds, integration
    failure) surface as a large finite penalty, never as an exception.
    """

    def __init__(self, config: VqeConfig, times_ns, psi0: np.ndarray):
        self.config = config
        self.times_ns = np.asarray(times_ns, dtype=float)
        self.psi0 = psi0
        self.variable_radius = isinstance(config.radius_mode, VariableRadius)
        self._fixed_radius = (
            None if self.variable_radius else config.radius_mode.radius_um
        )
        self.n_amplitudes = len(times_ns)

    def encode(self, omegas, deltas, radius_um: float) -> np.ndarray:
        parts = [np.asarray(omegas, dtype=float), np.asarray(deltas, dtype=float)]
        if self.variable_radius:
            parts.append([radius_um * RADIUS_SCALE])
        return np.concatenate(parts)

    def decode(self, x: np.ndarray):
        m1 = self.n_amplitudes
        omegas = np.asarray(x[:m1], dtype=float)
        deltas = np.asarray(x[m1 : 2 * m1], dtype=float)
        radius = (
            float(x[-1]) / RADIUS_SCALE if self.variable_radius else self._fixed_radius
        )
        return omegas, deltas, radius

    def bounds(self):
        c = self.config.constants
        m1 = self.n_amplitudes
        bounds = [c.omega_bounds] * m1 + [c.delta_bounds] * m1
        if self.variable_radius:
            lo, hi = self.config.radius_mode.bounds_um
            bounds.append((lo * RADIUS_SCALE, hi * RADIUS_SCALE))
        return bounds

    def _simulate(self, x):
        omegas, deltas, radius = self.decode(x)
        geometry = RingGeometry(self.config.n_atoms, radius)
        geometry.check_spacing(self.config.constants)
        bps = tuple(
            (int(t), float(om), float(de))
            for t, om, de in zip(self.times_ns, omegas, deltas)
        )
        seq = PulseSequence(bps)
        seq.validate(self.config.constants)
        jmat = interaction_matrix(geometry, self.config.constants)
        psi, info = evolve_with_info(seq, self.psi0, jmat, self.config.step_ns)
        energy = expectation(psi, self.config.target)
        return energy, psi, info, seq, radius

    def __call__(self, x) -> float:
        try:
            energy, _, _, _, _ = self._simulate(x)
        except (GeometryError, PulseError, IntegrationError, ValueError):
            return PENALTY
        return energy

    def evaluate_full(self, x):
        """Simulate at x and return (energy, psi, info, seq, radius).

        Unlike ``__call__`` this propagates failures, which only occur if the
        optimizer itself returned an invalid point (possible when every
        probed point was penalized)."""
        return self._simulate(x)


def _draw_initial_parameters(config: VqeConfig, rng: np.random.Generator):
    """Stage-one amplitudes and radius, drawn in a documented order.

    Draw order: omega_0, omega_1, delta_0, delta_1, then the radius when it
    is variable.  The 'stable_radius' strategy narrows the radius draw to
    the window where the fixed integrator step is stable, so randomized
    starts cannot begin in a penalized (uninformative) region.
    """
    c = config.constants
    omegas = [float(rng.uniform(*c.omega_bounds)) for _ in range(2)]
    deltas = [float(rng.uniform(*c.delta_bounds)) for _ in range(2)]
    radius = None
    if isinstance(config.radius_mode, VariableRadius):
        lo, hi = config.radius_mode.bounds_um
        if config.init_strategy == "stable_radius":
            lo = min(max(lo, stable_radius_floor(config.n_atoms, config)), hi)
        radius = float(rng.uniform(lo, hi))
    return omegas, deltas, radius


def _initial_state(config: VqeConfig) -> np.ndarray:
    if config.initial_state == "product_g":
        return product_ground_state(config.n_atoms)
    return prepare_q_pi(config.n_atoms)


def _run_optimizer(config: VqeConfig, cost: CostFunction, x0):
    spec = config.optimizer
    if isinstance(spec, NelderMeadSpec):
        return nelder_mead(cost, x0, cost.bounds(), max_iter=spec.max_iter)
    if isinstance(spec, LbfgsbFdSpec):
        return lbfgsb_fd(cost, x0, cost.bounds(), spec.max_iter, spec.fd_step)
    raise TypeError(f"unknown optimizer spec {spec!r}")


def adaptive_run(
    config: VqeConfig,
    ground_energy: float | None = None,
    have_ground_energy: bool = False,
) -> RunRecord:
    """One full adaptive run: optimize, split, repeat until done.

    Stops when the relative error falls below the configured threshold, the
    segment budget is exhausted, or no segment admits a further split.  When
    the system is too large for the dense oracle the run proceeds in
    energy-only mode and stops on the budget alone.
    """
    start_time = time.monotonic()
    rng = np.random.default_rng(config.seed)
    if not have_ground_energy:
        if config.n_atoms <= MAX_DENSE_QUBITS:
            ground_energy = dense_ground_state(config.target).energy
        else:
            ground_energy = None

    psi0 = _initial_state(config)
    omegas, deltas, radius = _draw_initial_parameters(config, rng)
    init_draws = {"omegas": omegas, "deltas": deltas, "radius_um": radius}
    if radius is None:
        radius = config.radius_mode.radius_um

    times = [0, config.duration_ns]
    seq = None
    stages: list[StageRecord] = []
    cum_iterations = 0
    cum_evals = 0
    split_info = None
    stop_reason = "segment_budget"

    while True:
        cost = CostFunction(config, times, psi0)
        x0 = np.clip(
            cost.encode(omegas, deltas, radius),
            [b[0] for b in cost.bounds()],
            [b[1] for b in cost.bounds()],
        )
        opt = _run_optimizer(config, cost, x0)
        try:
            energy, psi, info, seq, radius = cost.evaluate_full(opt.x)
            drift = info.norm_drift
            t_eig = translation_expectation(psi)
        except (GeometryError, PulseError, IntegrationError, ValueError):
            # the optimizer never left the penalized region
            energy = PENALTY
            drift = math.nan
            t_eig = complex(math.nan, math.nan)
            seq = None
            _, _, radius = cost.decode(opt.x)
        omegas, deltas, _ = cost.decode(opt.x)
        eta = relative_error(energy, ground_energy) if ground_energy is not None else None
        cum_iterations += opt.iterations
        cum_evals += opt.n_evals
        stages.append(
            StageRecord(
                stage=len(stages) + 1,
                n_segments=len(times) - 1,
                times_ns=[int(t) for t in times],
                omegas=[float(v) for v in omegas],
                deltas=[float(v) for v in deltas],
                radius_um=float(radius),
                energy=float(energy),
                eta_err_pct=None if eta is None else float(eta),
                iterations=opt.iterations,
                n_evals=opt.n_evals,
                cum_iterations=cum_iterations,
                cum_evals=cum_evals,
                norm_drift=float(drift),
                translation_re=float(t_eig.real),
                translation_im=float(t_eig.imag),
                split=None if split_info is None else split_info.to_dict(),
            )
        )

        if eta is not None and eta < config.error_threshold_pct:
            stop_reason = "converged"
            break
        if len(times) - 1 >= config.max_segments:
            stop_reason = "segment_budget"
            break
        if seq is None:
            stop_reason = "optimizer_stuck_in_penalty"
            break
        split = random_split(seq, rng, config.constants)
        if split is None:
            stop_reason = "saturated"
            break
        new_seq, split_info = split
        times = [bp[0] for bp in new_seq.breakpoints]
        omegas = list(new_seq.omegas)
        deltas = list(new_seq.deltas)

    return RunRecord(
        seed=config.seed,
        rng_family=RNG_FAMILY,
        config=_config_document(config),
        oracle_energy=ground_energy,
        init_draws=init_draws,
        stages=stages,
        stop_reason=stop_reason,
        metadata={"wall_time_s": time.monotonic() - start_time},
    )


def _config_document(config: VqeConfig) -> dict:
    """Snapshot of the run-relevant configuration, stored in every record."""
    c = config.constants
    return {
        "target": config.target.to_dict(),
        "n_atoms": config.n_atoms,
        "constants": {
            "c6_over_hbar": c.c6_over_hbar,
            "clock_period_ns": c.clock_period_ns,
            "min_segment_ns": c.min_segment_ns,
            "omega_bounds": list(c.omega_bounds),
            "delta_bounds": list(c.delta_bounds),
            "min_nn_distance_um": c.min_nn_distance_um,
        },
        "duration_ns": config.duration_ns,
        "initial_state": config.initial_state,
        "radius_mode": config.radius_mode.to_dict(),
        "optimizer": config.optimizer.to_dict(),
        "max_segments": config.max_segments,
        "error_threshold_pct": config.error_threshold_pct,
        "seed": config.seed,
        "step_ns": config.step_ns,
        "init_strategy": config.init_strategy,
    }


def _ensemble_worker(args):
    config, seed, ground_energy, have = args
    return adaptive_run(config.with_seed(seed), ground_energy, have)


def ensemble(
    config: VqeConfig,
    n_runs: int,
    base_seed: int,
    parallel: int = 1,
) -> tuple[EnsembleStats, list[RunRecord]]:
    """Independent seeded runs plus summary statistics.

    Run k uses seed ``derive_seed(base_seed, k)``; results are identical for
    any degree of parallelism because every run is self-contained and the
    collection order is fixed.
    """
    if n_runs < 1:
        raise ValueError("need at least one run")
    if config.n_atoms <= MAX_DENSE_QUBITS:
        ground_energy, have = dense_ground_state(config.target).energy, True
    else:
        ground_energy, have = None, True  # energy-only mode, explicit
    seeds = [derive_seed(base_seed, k) for k in range(n_runs)]
    jobs = [(config, seed, ground_energy, have) for seed in seeds]
    if parallel > 1:
        _kernels.warmup((config.n_atoms,))
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            records = list(pool.map(_ensemble_worker, jobs))
    else:
        records = [_ensemble_worker(job) for job in jobs]
    mean_radius = sum(r.final_radius_um for r in records) / len(records)
    nn_mhz = nn_ising_mhz(
        RingGeometry(config.n_atoms, mean_radius), config.constants
    )
    stats = EnsembleStats.from_records(records, base_seed, nn_coupling_mhz=nn_mhz)
    return stats, records
