import numpy as np
import pytest

from rydvqe.geometry import PhysicalConstants, RingGeometry, interaction_matrix
from rydvqe.hamiltonian import (
    PauliString,
    TargetHamiltonian,
    apply_drive,
    apply_pauli_string,
    apply_target,
    basis_state,
    expectation,
    product_ground_state,
)

CONSTANTS = PhysicalConstants()


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def test_drive_diagonal_on_doubly_excited_pair():
    jmat = interaction_matrix(RingGeometry(2, 5.0), CONSTANTS)
    psi = basis_state(2, 0b11)
    delta = 30.0
    out = apply_drive(psi, 0.0, delta, jmat)
    assert out[0b11] == pytest.approx(jmat[0, 1] - 2 * delta)
    assert np.count_nonzero(out) == 1


def test_drive_annihilates_all_ground():
    jmat = interaction_matrix(RingGeometry(3, 6.0), CONSTANTS)
    out = apply_drive(product_ground_state(3), 0.0, 17.0, jmat)
    assert np.allclose(out, 0.0)


def test_drive_transverse_term_flips_single_qubit():
    out = apply_drive(product_ground_state(1), 2.0, 0.0, np.zeros((1, 1)))
    assert out[1] == pytest.approx(1.0)
    assert out[0] == pytest.approx(0.0)


def test_drive_is_hermitian_and_linear():
    jmat = interaction_matrix(RingGeometry(4, 7.0), CONSTANTS)
    a, b = random_state(4, 1), random_state(4, 2)
    ha = apply_drive(a, 3.0, -40.0, jmat)
    hb = apply_drive(b, 3.0, -40.0, jmat)
    assert np.vdot(b, ha) == pytest.approx(np.conj(np.vdot(a, hb)), abs=1e-10)
    combo = apply_drive(0.3 * a + 2j * b, 3.0, -40.0, jmat)
    assert np.allclose(combo, 0.3 * ha + 2j * hb, atol=1e-12)


def test_drive_with_zero_omega_is_diagonal():
    jmat = interaction_matrix(RingGeometry(3, 6.5), CONSTANTS)
    psi = random_state(3, 3)
    out = apply_drive(psi, 0.0, 55.0, jmat)
    ratios = out[np.abs(psi) > 1e-12] / psi[np.abs(psi) > 1e-12]
    assert np.allclose(ratios.imag, 0.0, atol=1e-10)


def test_drive_commutes_with_translation():
    from rydvqe.oracle import translation_apply

    jmat = interaction_matrix(RingGeometry(5, 8.0), CONSTANTS)
    psi = random_state(5, 4)
    lhs = apply_drive(translation_apply(psi), 4.0, -20.0, jmat)
    rhs = translation_apply(apply_drive(psi, 4.0, -20.0, jmat))
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)


def test_xxx_singlet_is_bond_eigenstate():
    target = TargetHamiltonian.xxx(2, j=1.0)
    singlet = (basis_state(2, 0b01) - basis_state(2, 0b10)) / np.sqrt(2)
    out = apply_target(singlet, target)
    assert np.allclose(out, -0.75 * singlet, atol=1e-12)


def test_mfi_diagonal_on_neel_state():
    target = TargetHamiltonian.mfi(10, h_x=0.0, h_z=-0.9)
    neel = sum(1 << j for j in range(0, 10, 2))
    psi = basis_state(10, neel)
    out = apply_target(psi, target)
    assert out[neel] == pytest.approx(-10.0)  # all ZZ bonds -1, fields cancel


def test_targets_hermitian_on_random_vectors():
    for target in (
        TargetHamiltonian.xxx(4),
        TargetHamiltonian.mfi(4, h_x=1.2, h_z=-0.9),
    ):
        a, b = random_state(4, 5), random_state(4, 6)
        assert np.vdot(b, apply_target(a, target)) == pytest.approx(
            np.conj(np.vdot(a, apply_target(b, target))), abs=1e-10
        )


def test_pauli_z_signs():
    z0 = PauliString(((0, "z"),))
    assert apply_pauli_string(basis_state(1, 1), z0)[1] == pytest.approx(1.0)
    assert apply_pauli_string(basis_state(1, 0), z0)[0] == pytest.approx(-1.0)


def test_pauli_xx_flips_pair():
    xx = PauliString(((0, "x"), (1, "x")))
    out = apply_pauli_string(basis_state(2, 0b00), xx)
    assert out[0b11] == pytest.approx(1.0)


def test_pauli_y_squares_to_identity():
    psi = random_state(3, 7)
    y1 = PauliString(((1, "y"),))
    assert np.allclose(apply_pauli_string(apply_pauli_string(psi, y1), y1), psi)


def test_pauli_commutator_xy_equals_2iz():
    psi = random_state(2, 8)
    x0, y0, z0 = (PauliString(((0, a),)) for a in "xyz")
    comm = apply_pauli_string(apply_pauli_string(psi, y0), x0) - apply_pauli_string(
        apply_pauli_string(psi, x0), y0
    )
    assert np.allclose(comm, 2j * apply_pauli_string(psi, z0), atol=1e-12)


def test_pauli_site_out_of_range():
    with pytest.raises(ValueError):
        apply_pauli_string(basis_state(2, 0), PauliString(((5, "x"),)))


def test_expectation_product_state_xxx():
    for n in (4, 6):
        target = TargetHamiltonian.xxx(n, j=1.0)
        assert expectation(product_ground_state(n), target) == pytest.approx(n / 4)


def test_expectation_rejects_unnormalized():
    psi = 2.0 * product_ground_state(2)
    with pytest.raises(ValueError, match="norm"):
        expectation(psi, TargetHamiltonian.xxx(2))


def test_expectation_z_vanishes_on_alternating_superposition():
    from rydvqe.measure import prepare_q_pi

    psi = prepare_q_pi(6)
    for j in range(6):
        val = expectation(psi, PauliString(((j, "z"),)))
        assert val == pytest.approx(0.0, abs=1e-12)


def test_mfi_ground_energy_expectation_matches_oracle():
    from rydvqe.oracle import dense_ground_state

    target = TargetHamiltonian.mfi(6, h_x=1.2, h_z=-0.9)
    result = dense_ground_state(target)
    assert expectation(result.vector, target) == pytest.approx(result.energy, abs=1e-10)
