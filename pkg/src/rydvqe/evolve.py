"""Time-ordered propagation of statevectors through pulse schedules.

The Schrodinger equation d|psi>/dt = -i H(t) |psi> (hbar = 1) is integrated
with fixed-step classic fourth-order Runge-Kutta; the drive amplitudes are
evaluated at the exact stage times of each step.  No renormalization is ever
applied: norm drift is the integration-quality signal, and exceeding
``max_drift`` is an error, not something to hide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hamiltonian import interaction_diagonal, n_qubits, occupation_numbers
from .pulses import PulseSequence

DEFAULT_STEP_NS = 1.0
DEFAULT_MAX_DRIFT = 1e-6


class IntegrationError(RuntimeError):
    """Integration failed: the step is too large for the drive strength."""

    def __init__(self, message: str, norm_drift: float):
        super().__init__(f"{message} (norm drift {norm_drift:.3e})")
        self.norm_drift = norm_drift


@dataclass(frozen=True)
class EvolveInfo:
    """Diagnostics of one propagation."""

    norm_drift: float
    global_phase_rad: float


def _run_kernel(psi0, times_ns, omegas, deltas, jmat, step_ns, max_drift):
    n = n_qubits(psi0)
    if jmat.shape != (n, n):
        raise ValueError(f"coupling matrix shape {jmat.shape} does not match {n} qubits")
    if step_ns <= 0:
        raise ValueError("step_ns must be positive")
    inter = interaction_diagonal(jmat)
    cnt = occupation_numbers(n)
    re = np.ascontiguousarray(psi0.real, dtype=np.float64)
    im = np.ascontiguousarray(psi0.imag, dtype=np.float64)
    status, phase = _kernels.rk4_drive_evolve(
        re, im,
        inter, cnt,
        np.asarray(times_ns, dtype=np.float64),
        np.asarray(omegas, dtype=np.float64),
        np.asarray(deltas, dtype=np.float64),
        float(step_ns), n,
    )
    if status != _kernels.STATUS_OK:
        raise IntegrationError("state norm blew up; reduce step_ns", norm_drift=float("inf"))
    psi = (re + 1j * im) * np.exp(-1j * phase)
    drift = abs(np.linalg.norm(psi) - 1.0)
    if not np.isfinite(drift) or drift > max_drift:
        raise IntegrationError("norm drift exceeds the failure threshold", norm_drift=drift)
    return psi, EvolveInfo(norm_drift=drift, global_phase_rad=phase)


def propagate_segment(
    psi: np.ndarray,
    start: tuple[float, float, float],
    end: tuple[float, float, float],
    jmat: np.ndarray,
    step_ns: float = DEFAULT_STEP_NS,
    max_drift: float = DEFAULT_MAX_DRIFT,
) -> np.ndarray:
    """Propagate through one segment with linear ramps.

    ``start`` and ``end`` are (t_ns, omega, delta) endpoint triples.  The
    final step is shortened when step_ns does not divide the duration.
    """
    (t0, om0, de0), (t1, om1, de1) = start, end
    if t1 <= t0:
        raise ValueError("segment must have positive duration")
    psi_out, _ = _run_kernel(
        psi, [t0, t1], [om0, om1], [de0, de1], jmat, step_ns, max_drift
    )
    return psi_out


def evolve_with_info(
    seq: PulseSequence,
    psi0: np.ndarray,
    jmat: np.ndarray,
    step_ns: float = DEFAULT_STEP_NS,
    max_drift: float = DEFAULT_MAX_DRIFT,
) -> tuple[np.ndarray, EvolveInfo]:
    """Like :func:`evolve` but also returns integration diagnostics."""
    return _run_kernel(
        psi0, seq.times_ns, seq.omegas, seq.deltas, jmat, step_ns, max_drift
    )


def evolve(
    seq: PulseSequence,
    psi0: np.ndarray,
    jmat: np.ndarray,
    step_ns: float = DEFAULT_STEP_NS,
    max_drift: float = DEFAULT_MAX_DRIFT,
) -> np.ndarray:
    """Time-ordered evolution of ``psi0`` through the whole schedule.

    Segments are composed in time order (earliest applied first).  Raises
    :class:`IntegrationError` when the norm drift exceeds ``max_drift``.
    """
    psi, _ = evolve_with_info(seq, psi0, jmat, step_ns, max_drift)
    return psi
