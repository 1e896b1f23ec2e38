"""Matrix-free operators on bitwise statevectors.

A state over N qubits is a complex array of 2^N amplitudes.  Basis index b
encodes qubit j in bit j, with the Rydberg state |r> as bit value 1 and the
atomic ground state |g> as 0.  The Pauli convention is Z|r> = +|r>,
Z|g> = -|g>, X flips the bit, Y = i|g><r| - i|r><g|.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

EXPECTATION_NORM_TOL = 1e-6
EXPECTATION_IMAG_TOL = 1e-10


def n_qubits(psi: np.ndarray) -> int:
    n = int(np.log2(psi.size) + 0.5)
    if 2**n != psi.size:
        raise ValueError(f"statevector length {psi.size} is not a power of two")
    return n


def product_ground_state(n: int) -> np.ndarray:
    """|g...g>: every atom in the atomic ground state (all bits 0)."""
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[0] = 1.0
    return psi


def basis_state(n: int, index: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[index] = 1.0
    return psi


@lru_cache(maxsize=None)
def occupation_numbers(n: int) -> np.ndarray:
    """Rydberg excitation count per basis index (popcount), float64."""
    b = np.arange(2**n, dtype=np.uint32)
    counts = np.zeros(2**n, dtype=np.float64)
    for j in range(n):
        counts += (b >> j) & 1
    return counts


@lru_cache(maxsize=None)
def z_values(n: int) -> np.ndarray:
    """Matrix of Z eigenvalues, shape (2^n, n): +1 for |r>, -1 for |g>."""
    b = np.arange(2**n, dtype=np.uint32)
    return np.stack([2.0 * ((b >> j) & 1) - 1.0 for j in range(n)], axis=1)


def interaction_diagonal(jmat: np.ndarray) -> np.ndarray:
    """Diagonal of sum_{i<j} J_ij n_i n_j over the 2^N basis."""
    n = jmat.shape[0]
    bits = (z_values(n) + 1.0) / 2.0
    return 0.5 * np.einsum("bi,ij,bj->b", bits, jmat, bits)


def flip_qubit(psi: np.ndarray, j: int) -> np.ndarray:
    """Amplitudes with bit j flipped (the action of X_j)."""
    n = n_qubits(psi)
    view = psi.reshape(2 ** (n - 1 - j), 2, 2**j)
    return view[:, ::-1, :].reshape(psi.shape)


def apply_drive(psi: np.ndarray, omega: float, delta: float, jmat: np.ndarray) -> np.ndarray:
    """Apply the driven Ising Hamiltonian, returning H |psi> / hbar.

    H/hbar = sum_{i<j} (J_ij/hbar) n_i n_j - delta * sum_j n_j
             + (omega/2) * sum_j X_j
    with omega and delta in rad/us and the couplings from
    :func:`rydvqe.geometry.interaction_matrix`.
    """
    n = n_qubits(psi)
    if jmat.shape != (n, n):
        raise ValueError(f"coupling matrix shape {jmat.shape} does not match {n} qubits")
    out = (interaction_diagonal(jmat) - delta * occupation_numbers(n)) * psi
    if omega != 0.0:
        half = 0.5 * omega
        for j in range(n):
            out += half * flip_qubit(psi, j)
    return out


@dataclass(frozen=True)
class TargetHamiltonian:
    """Spin Hamiltonian whose ground state the pulses should prepare.

    ``kind`` is "xxx" for the isotropic nearest-neighbor exchange ring
    (J/4) * sum_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) with J = ``j``,
    or "mfi" for the mixed-field Ising ring
    j * sum_i Z_i Z_{i+1} + sum_i (h_x X_i + h_z Z_i).
    Boundaries are periodic; for two sites the single shared bond is counted
    once.
    """

    kind: str
    n_sites: int
    j: float = 1.0
    h_x: float = 0.0
    h_z: float = 0.0

    def __post_init__(self):
        if self.kind not in ("xxx", "mfi"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.n_sites < 2:
            raise ValueError("target needs at least two sites")
        if self.j <= 0:
            raise ValueError("antiferromagnetic coupling j must be positive")

    @classmethod
    def xxx(cls, n_sites: int, j: float = 1.0) -> "TargetHamiltonian":
        return cls(kind="xxx", n_sites=n_sites, j=j)

    @classmethod
    def mfi(cls, n_sites: int, h_x: float, h_z: float, j: float = 1.0) -> "TargetHamiltonian":
        return cls(kind="mfi", n_sites=n_sites, j=j, h_x=h_x, h_z=h_z)

    def bonds(self) -> list[tuple[int, int]]:
        """Ring bonds (i, i+1 mod N); a two-site ring has one bond."""
        if self.n_sites == 2:
            return [(0, 1)]
        return [(i, (i + 1) % self.n_sites) for i in range(self.n_sites)]

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "j": self.j}
        if self.kind == "mfi":
            d.update(h_x=self.h_x, h_z=self.h_z)
        return d


@lru_cache(maxsize=None)
def _target_structure(target: TargetHamiltonian):
    """Precomputed (diagonal, hop list) for fast repeated application.

    Hops are (source indices, destination indices, coefficient): the operator
    adds coeff * psi[src] onto out[dst].
    """
    n = target.n_sites
    dim = 2**n
    zz = z_values(n)
    diag = np.zeros(dim)
    hops = []
    idx = np.arange(dim)
    if target.kind == "xxx":
        quarter = 0.25 * target.j
        for i, k in target.bonds():
            diag += quarter * zz[:, i] * zz[:, k]
            mask = (1 << i) | (1 << k)
            src = idx[zz[:, i] != zz[:, k]]
            hops.append((src, src ^ mask, 0.5 * target.j))
    else:
        for i, k in target.bonds():
            diag += target.j * zz[:, i] * zz[:, k]
        for i in range(n):
            diag += target.h_z * zz[:, i]
            if target.h_x != 0.0:
                hops.append((idx, idx ^ (1 << i), target.h_x))
    return diag, hops


def apply_target(psi: np.ndarray, target: TargetHamiltonian) -> np.ndarray:
    """Apply the target spin Hamiltonian to a statevector."""
    if psi.size != 2**target.n_sites:
        raise ValueError(
            f"statevector of {psi.size} amplitudes does not match {target.n_sites} sites"
        )
    diag, hops = _target_structure(target)
    out = diag * psi
    for src, dst, coeff in hops:
        np.add.at(out, dst, coeff * psi[src])
    return out


@dataclass(frozen=True)
class PauliString:
    """Product of single-site Pauli operators on distinct sites."""

    ops: tuple[tuple[int, str], ...]

    def __post_init__(self):
        sites = [site for site, _ in self.ops]
        if len(set(sites)) != len(sites):
            raise ValueError("Pauli string sites must be distinct")
        for _, axis in self.ops:
            if axis not in ("x", "y", "z"):
                raise ValueError(f"unknown Pauli axis {axis!r}")


def apply_pauli_string(
    psi: np.ndarray, string: PauliString, phase: complex = 1.0
) -> np.ndarray:
    """Apply phase * (product of Paulis) in the Z|r> = +|r> convention."""
    n = n_qubits(psi)
    dim = psi.size
    flip_mask = 0
    factor = np.full(dim, phase, dtype=np.complex128)
    bits = np.arange(dim, dtype=np.uint32)
    for site, axis in string.ops:
        if not 0 <= site < n:
            raise ValueError(f"site {site} out of range for {n} qubits")
        bit = (bits >> site) & 1
        if axis == "z":
            factor *= 2.0 * bit - 1.0
        elif axis == "x":
            flip_mask |= 1 << site
        else:  # y: maps |r> -> i|g>, |g> -> -i|r>
            flip_mask |= 1 << site
            factor *= np.where(bit == 1, 1j, -1j)
    out = np.zeros(dim, dtype=np.complex128)
    out[np.arange(dim) ^ flip_mask] = factor * psi
    return out


def expectation(psi: np.ndarray, observable) -> float:
    """Real expectation value of a target Hamiltonian or Pauli string.

    The state must be normalized to within 1e-6; the imaginary residue must
    be below 1e-10 and is discarded.
    """
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > EXPECTATION_NORM_TOL:
        raise ValueError(f"state norm {norm} deviates from 1 by more than {EXPECTATION_NORM_TOL}")
    if isinstance(observable, TargetHamiltonian):
        applied = apply_target(psi, observable)
    elif isinstance(observable, PauliString):
        applied = apply_pauli_string(psi, observable)
    else:
        raise TypeError(f"cannot take expectation of {type(observable).__name__}")
    value = np.vdot(psi, applied)
    if abs(value.imag) > EXPECTATION_IMAG_TOL:
        raise ValueError(f"expectation has imaginary residue {value.imag}")
    return float(value.real)
