import math

import numpy as np
import pytest

from rydvqe.geometry import (
    GeometryError,
    PhysicalConstants,
    RingGeometry,
    atom_positions,
    interaction_matrix,
    nn_ising_mhz,
)

CONSTANTS = PhysicalConstants()


def test_unit_circle_positions():
    pos = atom_positions(RingGeometry(4, 1.0))
    expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert np.allclose(pos, expected, atol=1e-12)


def test_two_atoms_sit_on_a_diameter():
    pos = atom_positions(RingGeometry(2, 5.0))
    assert np.linalg.norm(pos[0] - pos[1]) == pytest.approx(10.0, abs=1e-12)


def test_nn_distance_closed_form_matches_brute_force():
    g = RingGeometry(8, 11.27)
    pos = atom_positions(g)
    pairwise = [
        np.linalg.norm(pos[i] - pos[j])
        for i in range(g.n_atoms)
        for j in range(i + 1, g.n_atoms)
    ]
    assert g.nn_distance_um == pytest.approx(min(pairwise), rel=1e-12)
    assert g.nn_distance_um == pytest.approx(8.626, abs=2e-3)


def test_positions_invariant_under_ring_rotation():
    g = RingGeometry(6, 3.0)
    pos = atom_positions(g)
    rot = 2 * math.pi / g.n_atoms
    m = np.array([[math.cos(rot), -math.sin(rot)], [math.sin(rot), math.cos(rot)]])
    assert np.allclose(pos @ m.T, np.roll(pos, -1, axis=0), atol=1e-12)


@pytest.mark.parametrize(
    "n, radius, jnn_mhz",
    [
        (4, 5.952, 2.42),
        (4, 5.973, 2.38),
        (8, 11.27, 2.1),
        (6, 10.39, 0.68),
        (10, 15.81, 0.99),
    ],
)
def test_quoted_coupling_values(n, radius, jnn_mhz):
    value = nn_ising_mhz(RingGeometry(n, radius), CONSTANTS)
    assert abs(value - jnn_mhz) / jnn_mhz < 0.01


def test_interaction_matrix_properties_random_geometries():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 11))
        g = RingGeometry(n, float(rng.uniform(3.0, 30.0)))
        jmat = interaction_matrix(g, CONSTANTS)
        assert np.array_equal(jmat, jmat.T)
        assert np.all(np.diag(jmat) == 0)
        assert np.all(jmat >= 0)


def test_couplings_match_brute_force_distances():
    g = RingGeometry(7, 9.3)
    pos = atom_positions(g)
    jmat = interaction_matrix(g, CONSTANTS)
    for i in range(7):
        for j in range(7):
            if i == j:
                continue
            r = np.linalg.norm(pos[i] - pos[j])
            assert jmat[i, j] == pytest.approx(CONSTANTS.c6_over_hbar / r**6, rel=1e-12)


def test_doubling_radius_divides_couplings_by_64():
    a = interaction_matrix(RingGeometry(5, 6.0), CONSTANTS)
    b = interaction_matrix(RingGeometry(5, 12.0), CONSTANTS)
    assert np.allclose(a, 64.0 * b, rtol=1e-12)


def test_nn_coupling_consistent_with_matrix_entry():
    g = RingGeometry(6, 8.0)
    jmat = interaction_matrix(g, CONSTANTS)
    assert nn_ising_mhz(g, CONSTANTS) == pytest.approx(
        jmat[0, 1] / (2 * math.pi), rel=1e-12
    )


def test_spacing_floor_enforced():
    g = RingGeometry(10, 5.0)  # nn distance ~3.09 um
    with pytest.raises(GeometryError):
        g.check_spacing(CONSTANTS)
    RingGeometry(10, 15.0).check_spacing(CONSTANTS)


def test_invalid_geometry_rejected():
    with pytest.raises(GeometryError):
        RingGeometry(1, 5.0)
    with pytest.raises(GeometryError):
        RingGeometry(4, -1.0)


def test_constants_invariants():
    with pytest.raises(ValueError):
        PhysicalConstants(min_segment_ns=18)  # not a clock multiple
    with pytest.raises(ValueError):
        PhysicalConstants(omega_bounds=(-1.0, 15.0))
    with pytest.raises(ValueError):
        PhysicalConstants(delta_bounds=(10.0, -10.0))
