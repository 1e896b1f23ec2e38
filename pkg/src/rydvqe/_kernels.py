"""Compiled inner loops for time-ordered statevector propagation.

The integrator works on split real/imaginary float64 arrays and applies the
drive Hamiltonian bitwise: a real diagonal (interactions minus detuning) plus
a uniform transverse coupling gathered across single bit flips.  Kernels are
generated per qubit count so the bit-flip strides are compile-time constants;
each process compiles the sizes it touches once (a few seconds each).

Each step subtracts the instantaneous diagonal-mean energy from the
generator and accumulates the corresponding global phase exactly.  This
keeps the per-step phases of populated components small (spreads around the
mean rather than absolute energies), which is what makes a fixed-step
Runge-Kutta scheme accurate at multi-hundred rad/us diagonal scales; the
caller restores the accumulated phase, so the returned state solves the
unshifted equation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_BLOWUP = 1

_EVOLVE_KERNELS: dict[int, object] = {}


def _make_evolve_kernel(nq: int):
    @njit(fastmath=True)
    def kern(psi_re, psi_im, inter, cnt, times_ns, omegas, deltas, step_ns):
        dim = psi_re.shape[0]
        ya_re = np.empty(dim)
        ya_im = np.empty(dim)
        yb_re = np.empty(dim)
        yb_im = np.empty(dim)
        acc_re = np.empty(dim)
        acc_im = np.empty(dim)
        phase = 0.0

        # diagonal statistics of the current state: norm^2 and the means
        # needed for the energy shift at arbitrary detuning
        s_norm = 0.0
        s_inter = 0.0
        s_cnt = 0.0
        for b in range(dim):
            p = psi_re[b] * psi_re[b] + psi_im[b] * psi_im[b]
            s_norm += p
            s_inter += p * inter[b]
            s_cnt += p * cnt[b]

        for seg in range(times_ns.shape[0] - 1):
            t0 = times_ns[seg]
            dur = times_ns[seg + 1] - t0
            om0 = omegas[seg]
            de0 = deltas[seg]
            om_slope = (omegas[seg + 1] - om0) / dur
            de_slope = (deltas[seg + 1] - de0) / dur

            n_full = int(dur // step_ns)
            rem = dur - n_full * step_ns
            nsteps = n_full + (1 if rem > 1e-9 else 0)

            for s in range(nsteps):
                t_loc = s * step_ns
                h_ns = step_ns if s < n_full else rem
                h = h_ns * 1e-3  # us
                half = 0.5 * h
                sixth = h / 6.0

                de_a = de0 + de_slope * t_loc
                om_a = om0 + om_slope * t_loc
                de_b = de0 + de_slope * (t_loc + 0.5 * h_ns)
                om_b = om0 + om_slope * (t_loc + 0.5 * h_ns)
                de_c = de0 + de_slope * (t_loc + h_ns)
                om_c = om0 + om_slope * (t_loc + h_ns)

                if not (0.25 < s_norm < 4.0):
                    return STATUS_BLOWUP, phase
                eshift = (s_inter - de_a * s_cnt) / s_norm
                phase += eshift * h

                c_a = 0.5 * om_a
                c_b = 0.5 * om_b
                c_c = 0.5 * om_c

                # stage 1: k1 from psi; acc = k1; ya = psi + h/2 k1
                for b in range(dim):
                    d = inter[b] - de_a * cnt[b] - eshift
                    kre = d * psi_im[b]
                    kim = -d * psi_re[b]
                    for j in range(nq):
                        q = b ^ (1 << j)
                        kre += c_a * psi_im[q]
                        kim -= c_a * psi_re[q]
                    acc_re[b] = kre
                    acc_im[b] = kim
                    ya_re[b] = psi_re[b] + half * kre
                    ya_im[b] = psi_im[b] + half * kim
                # stage 2: k2 from ya; acc += 2 k2; yb = psi + h/2 k2
                for b in range(dim):
                    d = inter[b] - de_b * cnt[b] - eshift
                    kre = d * ya_im[b]
                    kim = -d * ya_re[b]
                    for j in range(nq):
                        q = b ^ (1 << j)
                        kre += c_b * ya_im[q]
                        kim -= c_b * ya_re[q]
                    acc_re[b] += 2.0 * kre
                    acc_im[b] += 2.0 * kim
                    yb_re[b] = psi_re[b] + half * kre
                    yb_im[b] = psi_im[b] + half * kim
                # stage 3: k3 from yb; acc += 2 k3; ya = psi + h k3
                for b in range(dim):
                    d = inter[b] - de_b * cnt[b] - eshift
                    kre = d * yb_im[b]
                    kim = -d * yb_re[b]
                    for j in range(nq):
                        q = b ^ (1 << j)
                        kre += c_b * yb_im[q]
                        kim -= c_b * yb_re[q]
                    acc_re[b] += 2.0 * kre
                    acc_im[b] += 2.0 * kim
                    ya_re[b] = psi_re[b] + h * kre
                    ya_im[b] = psi_im[b] + h * kim
                # stage 4: k4 from ya; psi += h/6 (acc + k4); refresh stats
                s_norm = 0.0
                s_inter = 0.0
                s_cnt = 0.0
                for b in range(dim):
                    d = inter[b] - de_c * cnt[b] - eshift
                    kre = d * ya_im[b]
                    kim = -d * ya_re[b]
                    for j in range(nq):
                        q = b ^ (1 << j)
                        kre += c_c * ya_im[q]
                        kim -= c_c * ya_re[q]
                    pre = psi_re[b] + sixth * (acc_re[b] + kre)
                    pim = psi_im[b] + sixth * (acc_im[b] + kim)
                    psi_re[b] = pre
                    psi_im[b] = pim
                    p = pre * pre + pim * pim
                    s_norm += p
                    s_inter += p * inter[b]
                    s_cnt += p * cnt[b]

        if not (0.25 < s_norm < 4.0):
            return STATUS_BLOWUP, phase
        return STATUS_OK, phase

    return kern


def get_evolve_kernel(nq: int):
    """RK4 propagation kernel specialized to ``nq`` qubits."""
    kern = _EVOLVE_KERNELS.get(nq)
    if kern is None:
        kern = _make_evolve_kernel(nq)
        _EVOLVE_KERNELS[nq] = kern
    return kern


def rk4_drive_evolve(psi_re, psi_im, inter, cnt, times_ns, omegas, deltas, step_ns, nq):
    """Propagate through all segments in place with classic RK4.

    ``times_ns``/``omegas``/``deltas`` are the breakpoint arrays of the
    schedule; the drive amplitudes ramp linearly within each segment and are
    evaluated at the exact RK4 stage times.  Steps of ``step_ns`` are taken,
    with a shortened final step when a segment duration is not a multiple.

    Returns (status, accumulated_phase_rad).  A nonzero status means the
    state norm left [0.5, 2] (the step size is unstable for this drive
    strength) and the array contents are unusable.
    """
    return get_evolve_kernel(nq)(
        psi_re, psi_im, inter, cnt, times_ns, omegas, deltas, step_ns
    )


def warmup(n_qubits=(1,)) -> None:
    """Force JIT compilation for the given sizes (useful before forking)."""
    for nq in n_qubits:
        dim = 1 << nq
        psi_re = np.zeros(dim)
        psi_re[0] = 1.0
        psi_im = np.zeros(dim)
        inter = np.zeros(dim)
        cnt = np.zeros(dim)
        times = np.array([0.0, 4.0])
        om = np.array([1.0, 1.0])
        de = np.array([0.0, 0.0])
        rk4_drive_evolve(psi_re, psi_im, inter, cnt, times, om, de, 1.0, nq)
