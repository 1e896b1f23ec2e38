"""Piecewise-linear global pulse schedules and their refinement by splitting.

A schedule is an ordered list of breakpoints (t_i, omega_i, delta_i); between
breakpoints both drive amplitudes ramp linearly.  Splitting a segment inserts
a breakpoint whose amplitudes are the linear interpolants of the segment
endpoints, so the sampled profile is unchanged and only the optimizer's
freedom grows.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass

import numpy as np

from .geometry import PhysicalConstants


class PulseError(ValueError):
    """Raised when a schedule violates the hardware constraints."""


@dataclass(frozen=True)
class SplitInfo:
    """Provenance of one random split (both RNG draws are recorded)."""

    segment_index: int
    t_split_ns: int
    n_eligible_segments: int
    n_candidate_times: int
    segment_draw: int
    time_draw: int

    def to_dict(self) -> dict:
        return {
            "segment_index": self.segment_index,
            "t_split_ns": self.t_split_ns,
            "n_eligible_segments": self.n_eligible_segments,
            "n_candidate_times": self.n_candidate_times,
            "segment_draw": self.segment_draw,
            "time_draw": self.time_draw,
        }


@dataclass(frozen=True)
class PulseSequence:
    """Immutable piecewise-linear drive schedule.

    ``breakpoints`` holds (t_ns, omega, delta) triples with strictly
    increasing integer times starting at t = 0.
    """

    breakpoints: tuple[tuple[int, float, float], ...]

    def __post_init__(self):
        if len(self.breakpoints) < 2:
            raise PulseError("a schedule needs at least two breakpoints")
        times = [bp[0] for bp in self.breakpoints]
        if times[0] != 0:
            raise PulseError("schedule must start at t = 0")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise PulseError("breakpoint times must be strictly increasing")

    @property
    def times_ns(self) -> np.ndarray:
        return np.array([bp[0] for bp in self.breakpoints], dtype=float)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([bp[1] for bp in self.breakpoints], dtype=float)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([bp[2] for bp in self.breakpoints], dtype=float)

    @property
    def duration_ns(self) -> int:
        return self.breakpoints[-1][0]

    @property
    def n_segments(self) -> int:
        return len(self.breakpoints) - 1

    def sample(self, t_ns: float) -> tuple[float, float]:
        """Drive amplitudes (omega, delta) at time ``t_ns``.

        Exact breakpoint values are returned at t = t_i; within a segment the
        amplitudes are the linear interpolants of its endpoints.
        """
        if t_ns < 0 or t_ns > self.duration_ns:
            raise PulseError(f"sample time {t_ns} ns outside [0, {self.duration_ns}] ns")
        times = [bp[0] for bp in self.breakpoints]
        i = bisect.bisect_left(times, t_ns)
        if i < len(times) and times[i] == t_ns:
            return self.breakpoints[i][1], self.breakpoints[i][2]
        t0, om0, de0 = self.breakpoints[i - 1]
        t1, om1, de1 = self.breakpoints[i]
        w = (t_ns - t0) / (t1 - t0)
        return om0 + (om1 - om0) * w, de0 + (de1 - de0) * w

    def validate(self, constants: PhysicalConstants) -> None:
        """Check clock alignment, segment floors, and amplitude bounds."""
        clock = constants.clock_period_ns
        for t, om, de in self.breakpoints:
            if t % clock != 0:
                raise PulseError(f"breakpoint time {t} ns is not a multiple of the {clock} ns clock")
            _check_bounds(om, de, constants)
        times = [bp[0] for bp in self.breakpoints]
        for t0, t1 in zip(times, times[1:]):
            if t1 - t0 <= constants.min_segment_ns:
                raise PulseError(
                    f"segment [{t0}, {t1}] ns is not longer than the "
                    f"{constants.min_segment_ns} ns floor"
                )

    def to_dict(self) -> dict:
        return {"breakpoints": [[t, om, de] for t, om, de in self.breakpoints]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSequence":
        try:
            bps = tuple((int(t), float(om), float(de)) for t, om, de in data["breakpoints"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PulseError(f"malformed pulse document: {exc}") from exc
        return cls(bps)

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        return cls.from_dict(json.loads(text))


def _check_bounds(omega: float, delta: float, constants: PhysicalConstants) -> None:
    lo, hi = constants.omega_bounds
    if not lo <= omega <= hi:
        raise PulseError(f"omega out of bounds: {omega} not in [{lo}, {hi}] rad/us")
    lo, hi = constants.delta_bounds
    if not lo <= delta <= hi:
        raise PulseError(f"delta out of bounds: {delta} not in [{lo}, {hi}] rad/us")


def linear_schedule(
    omega0: float,
    omega1: float,
    delta0: float,
    delta1: float,
    duration_ns: int,
    constants: PhysicalConstants,
) -> PulseSequence:
    """Two-breakpoint schedule ramping linearly over [0, duration_ns]."""
    if duration_ns % constants.clock_period_ns != 0:
        raise PulseError(
            f"duration {duration_ns} ns is not a multiple of the "
            f"{constants.clock_period_ns} ns clock"
        )
    seq = PulseSequence(((0, omega0, delta0), (int(duration_ns), omega1, delta1)))
    seq.validate(constants)
    return seq


def split_segment(
    seq: PulseSequence,
    segment_index: int,
    t_split_ns: int,
    constants: PhysicalConstants,
) -> PulseSequence:
    """Insert a breakpoint at ``t_split_ns`` inside segment ``segment_index``.

    The amplitudes at the new breakpoint are the linear interpolants of the
    segment endpoints, so ``sample`` is unchanged at every time.  The split
    time must sit on the clock grid and leave both halves strictly longer
    than the minimum segment duration.
    """
    if not 0 <= segment_index < seq.n_segments:
        raise PulseError(f"segment index {segment_index} out of range")
    t0, om0, de0 = seq.breakpoints[segment_index]
    t1, om1, de1 = seq.breakpoints[segment_index + 1]
    if t_split_ns % constants.clock_period_ns != 0:
        raise PulseError(
            f"split time {t_split_ns} ns is not a multiple of the "
            f"{constants.clock_period_ns} ns clock"
        )
    floor = constants.min_segment_ns
    if not (t0 + floor < t_split_ns and t_split_ns < t1 - floor):
        raise PulseError(
            f"split time {t_split_ns} ns leaves a sub-segment of "
            f"({t0}, {t1}) ns at or below the {floor} ns floor"
        )
    w0 = (t1 - t_split_ns) / (t1 - t0)
    w1 = (t_split_ns - t0) / (t1 - t0)
    om_s = w0 * om0 + w1 * om1
    de_s = w0 * de0 + w1 * de1
    bps = (
        seq.breakpoints[: segment_index + 1]
        + ((int(t_split_ns), om_s, de_s),)
        + seq.breakpoints[segment_index + 1 :]
    )
    return PulseSequence(bps)


def candidate_split_times(
    seq: PulseSequence, segment_index: int, constants: PhysicalConstants
) -> np.ndarray:
    """Clock-grid times that split the segment into two legal segments.

    Both halves must be strictly longer than the minimum segment duration,
    so the admissible offsets are min_segment + clock, min_segment + 2*clock,
    ... up to duration - min_segment - clock.
    """
    t0 = seq.breakpoints[segment_index][0]
    t1 = seq.breakpoints[segment_index + 1][0]
    clock = constants.clock_period_ns
    floor = constants.min_segment_ns
    lo = t0 + floor + clock
    hi = t1 - floor - clock
    if hi < lo:
        return np.empty(0, dtype=int)
    # align lo up to the clock grid (t0 is clock-aligned for valid sequences)
    lo = ((lo + clock - 1) // clock) * clock
    return np.arange(lo, hi + 1, clock, dtype=int)


def random_split(
    seq: PulseSequence,
    rng: np.random.Generator,
    constants: PhysicalConstants,
) -> tuple[PulseSequence, SplitInfo] | None:
    """Split a uniformly chosen eligible segment at a uniform grid time.

    Returns None when no segment admits a legal split (the schedule is
    saturated).  Selection is two-stage uniform: first over segments with a
    nonempty candidate set, then over that segment's candidate times; both
    draws are recorded in the returned :class:`SplitInfo`.
    """
    eligible = []
    for i in range(seq.n_segments):
        cands = candidate_split_times(seq, i, constants)
        if cands.size:
            eligible.append((i, cands))
    if not eligible:
        return None
    segment_draw = int(rng.integers(len(eligible)))
    segment_index, cands = eligible[segment_draw]
    time_draw = int(rng.integers(cands.size))
    t_split = int(cands[time_draw])
    new_seq = split_segment(seq, segment_index, t_split, constants)
    info = SplitInfo(
        segment_index=segment_index,
        t_split_ns=t_split,
        n_eligible_segments=len(eligible),
        n_candidate_times=int(cands.size),
        segment_draw=segment_draw,
        time_draw=time_draw,
    )
    return new_seq, info


def pack(seq: PulseSequence, radius_um: float) -> np.ndarray:
    """Flatten a schedule into (omega_0..omega_M, delta_0..delta_M, R)."""
    return np.concatenate([seq.omegas, seq.deltas, [radius_um]])


def unpack(
    theta: np.ndarray,
    breakpoint_times_ns: np.ndarray,
    constants: PhysicalConstants,
) -> tuple[PulseSequence, float]:
    """Rebuild (schedule, radius) from a flat parameter vector.

    Out-of-bound amplitudes are rejected with the offending entry named,
    never clipped; enforcing bounds is the optimizer's job.
    """
    theta = np.asarray(theta, dtype=float)
    m1 = len(breakpoint_times_ns)
    if theta.size != 2 * m1 + 1:
        raise PulseError(
            f"parameter vector of length {theta.size} does not match "
            f"{m1} breakpoints (expected {2 * m1 + 1})"
        )
    omegas = theta[:m1]
    deltas = theta[m1 : 2 * m1]
    radius = float(theta[-1])
    bps = tuple(
        (int(t), float(om), float(de))
        for t, om, de in zip(breakpoint_times_ns, omegas, deltas)
    )
    seq = PulseSequence(bps)
    seq.validate(constants)
    return seq, radius
