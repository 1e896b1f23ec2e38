import numpy as np
import pytest
from scipy.stats import chi2

from rydvqe.geometry import PhysicalConstants
from rydvqe.pulses import (
    PulseError,
    PulseSequence,
    candidate_split_times,
    linear_schedule,
    pack,
    random_split,
    split_segment,
    unpack,
)

CONSTANTS = PhysicalConstants()


def test_linear_schedule_ramps():
    seq = linear_schedule(0.0, 15.0, -125.0, 125.0, 2400, CONSTANTS)
    assert seq.breakpoints == ((0, 0.0, -125.0), (2400, 15.0, 125.0))
    assert seq.sample(0) == (0.0, -125.0)
    assert seq.sample(2400) == (15.0, 125.0)


def test_linear_schedule_midpoint():
    seq = linear_schedule(0.0, 10.0, 0.0, 0.0, 2000, CONSTANTS)
    assert seq.sample(1000)[0] == pytest.approx(5.0)


def test_linear_schedule_bound_violation_names_field():
    with pytest.raises(PulseError, match="omega out of bounds"):
        linear_schedule(16.0, 10.0, 0.0, 0.0, 2000, CONSTANTS)
    with pytest.raises(PulseError, match="delta out of bounds"):
        linear_schedule(1.0, 1.0, -300.0, 0.0, 2000, CONSTANTS)


def test_sample_linear_interpolation():
    seq = PulseSequence(((0, 0.0, 0.0), (1000, 10.0, -20.0)))
    om, de = seq.sample(400)
    assert om == pytest.approx(4.0)
    assert de == pytest.approx(-8.0)


def test_sample_exact_at_breakpoints():
    seq = PulseSequence(((0, 1.0, 2.0), (1000, 3.0, -4.0), (2000, 5.0, 6.0)))
    for t, om, de in seq.breakpoints:
        assert seq.sample(t) == (om, de)


def test_sample_second_segment_kink():
    seq = PulseSequence(((0, 0.0, 0.0), (1000, 10.0, 0.0), (2000, 0.0, 0.0)))
    assert seq.sample(1500)[0] == pytest.approx(5.0)


def test_sample_out_of_range():
    seq = linear_schedule(0.0, 1.0, 0.0, 0.0, 1000, CONSTANTS)
    with pytest.raises(PulseError):
        seq.sample(-1)
    with pytest.raises(PulseError):
        seq.sample(1001)


def test_split_interpolates_linearly():
    seq = PulseSequence(((0, 0.0, 0.0), (1000, 10.0, -10.0)))
    out = split_segment(seq, 0, 400, CONSTANTS)
    assert out.breakpoints[1] == (400, pytest.approx(4.0), pytest.approx(-4.0))


def test_split_preserves_sampled_profile_on_grid():
    seq = PulseSequence(((0, 1.0, -50.0), (800, 12.0, 30.0), (2400, 3.0, 110.0)))
    out = split_segment(seq, 1, 1500, CONSTANTS)
    for t in range(0, 2401, 4):
        a = seq.sample(t)
        b = out.sample(t)
        assert a[0] == pytest.approx(b[0], rel=1e-12, abs=1e-12)
        assert a[1] == pytest.approx(b[1], rel=1e-12, abs=1e-12)


def test_split_rejects_interior_violations():
    seq = PulseSequence(((0, 0.0, 0.0), (1000, 10.0, 0.0)))
    with pytest.raises(PulseError):
        split_segment(seq, 0, 0, CONSTANTS)
    with pytest.raises(PulseError):
        split_segment(seq, 0, 1000, CONSTANTS)
    with pytest.raises(PulseError):
        split_segment(seq, 5, 100, CONSTANTS)


def test_candidate_times_respect_duration_floor():
    seq = PulseSequence(((0, 0.0, 0.0), (40, 1.0, 0.0)))
    assert list(candidate_split_times(seq, 0, CONSTANTS)) == [20]
    seq36 = PulseSequence(((0, 0.0, 0.0), (36, 1.0, 0.0)))
    assert candidate_split_times(seq36, 0, CONSTANTS).size == 0


def test_split_at_12ns_offset_rejected():
    # 12 ns from the boundary violates the strict 16 ns floor
    seq = PulseSequence(((0, 0.0, 0.0), (2400, 1.0, 0.0)))
    assert 12 not in candidate_split_times(seq, 0, CONSTANTS)
    with pytest.raises(PulseError, match="floor"):
        split_segment(seq, 0, 12, CONSTANTS)
    with pytest.raises(PulseError, match="clock"):
        split_segment(seq, 0, 22, CONSTANTS)


def test_random_split_uniform_over_eligible_grid():
    seq = linear_schedule(0.0, 10.0, 0.0, 0.0, 2400, CONSTANTS)
    candidates = candidate_split_times(seq, 0, CONSTANTS)
    assert candidates[0] == 20 and candidates[-1] == 2380 and candidates[1] - candidates[0] == 4
    rng = np.random.default_rng(123)
    draws = 100_000
    counts = {int(t): 0 for t in candidates}
    for _ in range(draws):
        _, info = random_split(seq, rng, CONSTANTS)
        counts[info.t_split_ns] += 1
    expected = draws / len(candidates)
    stat = sum((c - expected) ** 2 / expected for c in counts.values())
    p_value = chi2.sf(stat, df=len(candidates) - 1)
    assert p_value > 0.001


def test_random_split_saturates_on_short_segments():
    seq = PulseSequence(((0, 0.0, 0.0), (20, 1.0, 0.0), (40, 0.0, 0.0)))
    rng = np.random.default_rng(0)
    assert random_split(seq, rng, CONSTANTS) is None


def test_random_split_deterministic_under_seed():
    seq = linear_schedule(0.0, 10.0, -5.0, 5.0, 2400, CONSTANTS)
    a = random_split(seq, np.random.default_rng(99), CONSTANTS)
    b = random_split(seq, np.random.default_rng(99), CONSTANTS)
    assert a[1] == b[1]
    assert a[0].breakpoints == b[0].breakpoints


def test_pack_lengths():
    seq1 = linear_schedule(0.0, 10.0, 0.0, 0.0, 2400, CONSTANTS)
    assert pack(seq1, 6.0).size == 5  # two breakpoints
    seq2 = split_segment(seq1, 0, 1200, CONSTANTS)
    assert pack(seq2, 6.0).size == 7  # three breakpoints


def test_pack_unpack_round_trip_bit_identical():
    rng = np.random.default_rng(7)
    seq = linear_schedule(1.0, 10.0, -100.0, 100.0, 2400, CONSTANTS)
    for _ in range(4):
        seq, _ = random_split(seq, rng, CONSTANTS)
    theta = pack(seq, 7.25)
    rebuilt, radius = unpack(theta, seq.times_ns.astype(int), CONSTANTS)
    assert radius == 7.25
    assert rebuilt.breakpoints == seq.breakpoints
    assert np.array_equal(pack(rebuilt, radius), theta)


def test_unpack_reports_out_of_bounds_without_clipping():
    times = np.array([0, 2400])
    theta = np.array([20.0, 1.0, 0.0, 0.0, 6.0])  # omega_0 out of range
    with pytest.raises(PulseError, match="omega out of bounds"):
        unpack(theta, times, CONSTANTS)


def test_unpack_length_mismatch():
    with pytest.raises(PulseError, match="does not match"):
        unpack(np.zeros(6), np.array([0, 2400]), CONSTANTS)


def test_refinement_chain_keeps_invariants():
    rng = np.random.default_rng(21)
    seq = linear_schedule(0.0, 15.0, -125.0, 125.0, 2400, CONSTANTS)
    for k in range(1, 40):
        result = random_split(seq, rng, CONSTANTS)
        if result is None:
            break
        seq, _ = result
        assert seq.n_segments == k + 1
        seq.validate(CONSTANTS)


def test_json_round_trip():
    seq = PulseSequence(((0, 1.0, -2.0), (1000, 3.5, 4.0), (2400, 0.0, 0.0)))
    assert PulseSequence.from_json(seq.to_json()) == seq
