import numpy as np
import pytest

from rydvqe.hamiltonian import TargetHamiltonian, apply_target, basis_state, expectation
from rydvqe.measure import prepare_q_pi
from rydvqe.oracle import (
    correlation,
    correlation_profile,
    dense_ground_state,
    dense_matrix,
    marshall_momentum,
    momentum_of,
    sector_ground_energy,
    translation_apply,
    translation_expectation,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def test_xxx_ring_of_four_ground_energy_exact():
    result = dense_ground_state(TargetHamiltonian.xxx(4, j=1.0))
    assert result.energy == pytest.approx(-2.0, abs=1e-10)


def test_two_site_singlet_energy():
    result = dense_ground_state(TargetHamiltonian.xxx(2, j=1.0))
    assert result.energy == pytest.approx(-0.75, abs=1e-12)


def test_dense_matrix_matches_matrix_free_application():
    for target in (
        TargetHamiltonian.xxx(5),
        TargetHamiltonian.mfi(5, h_x=0.7, h_z=-0.3),
    ):
        h = dense_matrix(target)
        psi = random_state(5, 11)
        assert np.allclose(h @ psi, apply_target(psi, target), atol=1e-12)


def test_eigenpair_residual():
    target = TargetHamiltonian.mfi(8, h_x=1.2, h_z=-0.9)
    result = dense_ground_state(target)
    h = dense_matrix(target)
    residual = np.linalg.norm(h @ result.vector - result.energy * result.vector)
    assert residual <= 1e-10 * abs(result.energy)


def test_variational_bound_over_random_states():
    target = TargetHamiltonian.mfi(4, h_x=1.0, h_z=-0.5)
    e0 = dense_ground_state(target).energy
    for seed in range(10):
        psi = random_state(4, seed)
        assert expectation(psi, target) >= e0 - 1e-10


def test_translation_matches_cyclic_bit_shift_example():
    # six sites a..f: site 1 receives site 6's state, others shift up by one
    n = 6
    for index in (0b000001, 0b010110, 0b111000):
        shifted = translation_apply(basis_state(n, index))
        expected = ((index << 1) & (2**n - 1)) | (index >> (n - 1))
        assert shifted[expected] == pytest.approx(1.0)


def test_translation_preserves_uniform_state_and_has_order_n():
    n = 5
    psi = random_state(n, 3)
    out = psi
    for _ in range(n):
        out = translation_apply(out)
    assert np.allclose(out, psi, atol=1e-12)
    ground = basis_state(n, 0)
    assert np.allclose(translation_apply(ground), ground)


def test_translation_is_unitary():
    psi = random_state(6, 4)
    assert np.linalg.norm(translation_apply(psi)) == pytest.approx(1.0, abs=1e-12)


def test_momentum_classification():
    assert momentum_of(prepare_q_pi(6)) == "pi"
    assert momentum_of(basis_state(4, 0)) == "0"
    assert momentum_of(random_state(4, 5)) == "mixed"


@pytest.mark.parametrize("n, sector", [(4, "0"), (6, "pi"), (8, "0"), (10, "pi")])
def test_marshall_rule_and_ground_state_momentum(n, sector):
    assert marshall_momentum(n) == sector
    result = dense_ground_state(TargetHamiltonian.xxx(n))
    assert momentum_of(result.vector) == sector


def test_marshall_rejects_odd_rings():
    with pytest.raises(ValueError):
        marshall_momentum(5)


def test_target_commutes_with_translation():
    for target in (
        TargetHamiltonian.xxx(6),
        TargetHamiltonian.mfi(6, h_x=1.1, h_z=0.4),
    ):
        psi = random_state(6, 6)
        lhs = apply_target(translation_apply(psi), target)
        rhs = translation_apply(apply_target(psi, target))
        assert np.linalg.norm(lhs - rhs) <= 1e-10


def test_correlation_on_neel_basis_state():
    n = 6
    neel = sum(1 << j for j in range(0, n, 2))
    psi = basis_state(n, neel)
    for i in range(n):
        assert correlation(psi, "z", i, "z", (i + 1) % n) == pytest.approx(-1.0)


def test_correlation_transverse_product_state():
    psi = basis_state(4, 0)
    assert correlation(psi, "x", 0, "x", 2) == pytest.approx(0.0, abs=1e-12)


def test_xxx_ground_state_correlators_isotropic():
    result = dense_ground_state(TargetHamiltonian.xxx(8))
    x = correlation_profile(result.vector, "x", spin_half=True)
    y = correlation_profile(result.vector, "y", spin_half=True)
    z = correlation_profile(result.vector, "z", spin_half=True)
    assert np.allclose(x, y, atol=1e-10)
    assert np.allclose(x, z, atol=1e-10)


def test_momentum_sector_energies_bracket_ground_state():
    target = TargetHamiltonian.xxx(6)
    e_all = dense_ground_state(target).energy
    e_pi = sector_ground_energy(target, "pi")
    e_0 = sector_ground_energy(target, "0")
    assert e_pi == pytest.approx(e_all, abs=1e-10)  # N/2 odd: ground state at pi
    assert e_0 > e_all + 0.1


def test_sector_minimum_is_variational_floor_for_q0_states():
    target = TargetHamiltonian.xxx(6)
    e_0 = sector_ground_energy(target, "0")
    psi = basis_state(6, 0)
    assert expectation(psi, target) >= e_0 - 1e-10


def test_translation_expectation_of_q_pi_state():
    t = translation_expectation(prepare_q_pi(10))
    assert t.real == pytest.approx(-1.0, abs=1e-12)
    assert t.imag == pytest.approx(0.0, abs=1e-12)
