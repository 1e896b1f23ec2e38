"""Dense exact diagonalization and translation-symmetry tooling.

Everything here is ground truth for the variational machinery: dense
eigensolves of the target Hamiltonians, the cyclic translation operator of
the ring, momentum classification, exact spin correlators, and
momentum-sector-restricted ground energies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hamiltonian import (
    PauliString,
    TargetHamiltonian,
    _target_structure,
    apply_pauli_string,
    expectation,
    n_qubits,
)

MAX_DENSE_QUBITS = 12
MOMENTUM_TOL = 1e-6
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class GroundStateResult:
    """Lowest eigenpair of a target Hamiltonian.

    ``degeneracy_gap`` is the distance to the next eigenvalue; callers that
    need a unique ground state should check it before trusting ``vector``.
    """

    energy: float
    vector: np.ndarray
    degeneracy_gap: float


def dense_matrix(target: TargetHamiltonian) -> np.ndarray:
    """Dense real-symmetric matrix of the target Hamiltonian."""
    if target.n_sites > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrix limited to {MAX_DENSE_QUBITS} sites")
    dim = 2**target.n_sites
    diag, hops = _target_structure(target)
    h = np.zeros((dim, dim))
    h[np.arange(dim), np.arange(dim)] = diag
    for src, dst, coeff in hops:
        h[dst, src] += coeff
    return h


def dense_ground_state(target: TargetHamiltonian) -> GroundStateResult:
    """Lowest eigenpair via a dense symmetric eigensolve.

    The eigenpair residual is asserted against the spectral scale, so the
    returned energy can be used as an exact reference.
    """
    h = dense_matrix(target)
    eigvals, eigvecs = np.linalg.eigh(h)
    energy = float(eigvals[0])
    vector = eigvecs[:, 0].astype(np.complex128)
    scale = max(abs(eigvals[0]), abs(eigvals[-1]), 1.0)
    residual = np.linalg.norm(h @ eigvecs[:, 0] - energy * eigvecs[:, 0])
    if residual > RESIDUAL_RTOL * scale:
        raise RuntimeError(f"eigensolver residual {residual:.3e} above tolerance")
    return GroundStateResult(
        energy=energy,
        vector=vector,
        degeneracy_gap=float(eigvals[1] - eigvals[0]),
    )


@lru_cache(maxsize=None)
def _translation_permutation(n: int) -> np.ndarray:
    """Destination index for each basis index under the cyclic shift.

    Site j+1 receives the state of site j, and site 1 receives the state of
    site N; in bit terms every index is rotated left by one bit.
    """
    b = np.arange(2**n, dtype=np.int64)
    mask = (1 << n) - 1
    return ((b << 1) & mask) | (b >> (n - 1))


def translation_apply(psi: np.ndarray) -> np.ndarray:
    """Apply the single-site cyclic translation of the ring."""
    n = n_qubits(psi)
    out = np.empty_like(psi)
    out[_translation_permutation(n)] = psi
    return out


def translation_expectation(psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, translation_apply(psi)))


def momentum_of(psi: np.ndarray, tol: float = MOMENTUM_TOL) -> str:
    """Classify a normalized state as momentum "0", "pi", or "mixed"."""
    t = translation_expectation(psi)
    if abs(t - 1.0) <= tol:
        return "0"
    if abs(t + 1.0) <= tol:
        return "pi"
    return "mixed"


def marshall_momentum(n: int) -> str:
    """Ground-state momentum sector of the exchange ring: "pi" iff N/2 is odd."""
    if n % 2 != 0:
        raise ValueError("only even rings are supported")
    return "pi" if (n // 2) % 2 == 1 else "0"


def correlation(
    psi: np.ndarray,
    axis_a: str,
    site_a: int,
    axis_b: str,
    site_b: int,
    spin_half: bool = False,
) -> float:
    """Two-point correlator <sigma^a_i sigma^b_j> (or S = sigma/2 with the flag)."""
    string = PauliString(((site_a, axis_a), (site_b, axis_b)))
    value = expectation(psi, string)
    return 0.25 * value if spin_half else value


def correlation_profile(psi: np.ndarray, axis: str, spin_half: bool = False) -> np.ndarray:
    """Correlators between site 0 and site r for r = 1 .. N-1."""
    n = n_qubits(psi)
    return np.array(
        [correlation(psi, axis, 0, axis, r, spin_half=spin_half) for r in range(1, n)]
    )


@lru_cache(maxsize=None)
def _momentum_sector_basis(n: int, sector: str) -> np.ndarray:
    """Orthonormal basis of the q = 0 or q = pi translation sector.

    Basis vectors are phase-weighted sums over translation orbits; an orbit
    of period p contributes to q = pi only when p is even.
    """
    dim = 2**n
    perm = _translation_permutation(n)
    seen = np.zeros(dim, dtype=bool)
    columns = []
    sign = 1.0 if sector == "0" else -1.0
    for b in range(dim):
        if seen[b]:
            continue
        orbit = [b]
        seen[b] = True
        cur = int(perm[b])
        while cur != b:
            orbit.append(cur)
            seen[cur] = True
            cur = int(perm[cur])
        p = len(orbit)
        if sector == "pi" and p % 2 == 1:
            continue
        v = np.zeros(dim)
        for k, idx in enumerate(orbit):
            v[idx] = sign**k
        columns.append(v / np.sqrt(p))
    return np.stack(columns, axis=1)


def sector_ground_energy(target: TargetHamiltonian, sector: str) -> float:
    """Lowest eigenvalue of the target restricted to a momentum sector."""
    if sector not in ("0", "pi"):
        raise ValueError(f"unknown momentum sector {sector!r}")
    h = dense_matrix(target)
    basis = _momentum_sector_basis(target.n_sites, sector)
    restricted = basis.T @ h @ basis
    return float(np.linalg.eigvalsh(restricted)[0])


def ground_state_report(target: TargetHamiltonian) -> dict:
    """Energy, gap, momentum, and correlator profiles of the exact ground state."""
    result = dense_ground_state(target)
    psi = result.vector / np.linalg.norm(result.vector)
    report = {
        "energy": result.energy,
        "gap": result.degeneracy_gap,
        "momentum": momentum_of(psi) if result.degeneracy_gap > 1e-8 else "degenerate",
        "correlators": {
            axis: correlation_profile(psi, axis).tolist() for axis in ("x", "y", "z")
        },
    }
    return report
