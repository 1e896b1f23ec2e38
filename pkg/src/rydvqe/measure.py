"""State preparation and the shot-based measurement toolbox.

Preparation targets the alternating two-branch superposition
(|r g r ... g> - |g r g ... r>)/sqrt(2), the translation eigenstate with
eigenvalue -1 that unlocks odd-N/2 exchange rings.  Three equivalent routes
are provided: direct construction, a Hadamard + CNOT cascade (chain or
log-depth wiring), and a single Pauli-string flip unitary.

The gate conventions follow the |g>-|r> basis with the computational
identification |g> = |1>, |r> = |0>: the Hadamard sends
|g> -> (|r> - |g>)/sqrt(2), and the CNOT flips its target when the control
is in |g>.

Energy estimation uses fluorescence-style Z-basis readout: bond ZZ parities
are sampled directly, and the XX/YY bonds become ZZ after an ideal global
pi/2 rotation of the quantization axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import (
    PauliString,
    TargetHamiltonian,
    apply_pauli_string,
    expectation,
    n_qubits,
    product_ground_state,
    z_values,
)

#: rotation duration quoted for a pulse-synthesized global pi/2 rotation (ns)
DEFAULT_ROTATION_TIME_NS = 900
#: typical coherence budget of the platform (ns)
DEFAULT_COHERENCE_BUDGET_NS = 6000


@dataclass(frozen=True)
class ShotTable:
    """Histogram of projective Z-basis readouts.

    Keys are bitstrings with site 1 leftmost, '1' marking the Rydberg state.
    """

    shots: int
    counts: dict

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("histogram counts must sum to the shot number")

    def to_json(self) -> str:
        return json.dumps({"shots": self.shots, "counts": self.counts}, sort_keys=True)


def bitstring_key(index: int, n: int) -> str:
    return "".join("1" if (index >> j) & 1 else "0" for j in range(n))


def prepare_q_pi(n: int) -> np.ndarray:
    """(|up down up ... down> - |down up down ... up>)/sqrt(2), |r> as up.

    Carries translation eigenvalue -1.  Only even rings are supported.
    """
    if n % 2 != 0:
        raise ValueError("the alternating superposition needs an even ring")
    up_first = sum(1 << j for j in range(0, n, 2))
    down_first = sum(1 << j for j in range(1, n, 2))
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[up_first] = 1.0 / math.sqrt(2.0)
    psi[down_first] = -1.0 / math.sqrt(2.0)
    return psi


def hadamard(psi: np.ndarray, site: int) -> np.ndarray:
    """Hadamard in the |g>-|r> basis: |g> -> (|r>-|g>)/sqrt(2), |r> -> (|r>+|g>)/sqrt(2)."""
    n = n_qubits(psi)
    view = psi.reshape(2 ** (n - 1 - site), 2, 2**site)
    g, r = view[:, 0, :], view[:, 1, :]
    out = np.empty_like(psi).reshape(view.shape)
    inv = 1.0 / math.sqrt(2.0)
    out[:, 0, :] = inv * (r - g)
    out[:, 1, :] = inv * (r + g)
    return out.reshape(psi.shape)


def cnot(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    """CNOT that flips ``target`` when ``control`` is in |g> (bit 0)."""
    n = n_qubits(psi)
    dim = psi.size
    idx = np.arange(dim)
    control_g = (idx >> control) & 1 == 0
    dest = np.where(control_g, idx ^ (1 << target), idx)
    out = np.empty_like(psi)
    out[dest] = psi
    return out


def _chain_edges(n: int) -> list[tuple[int, int]]:
    return [(j, j + 1) for j in range(n - 1)]


def _log_depth_edges(n: int) -> list[tuple[int, int]]:
    """CNOT forest of logarithmic depth, odd control-target distances only.

    Intervals are split recursively near the middle; splits at even distance
    are nudged by one site so every edge still toggles the sublattice parity
    and the final state matches the plain chain exactly.
    """
    edges: list[tuple[int, int]] = []

    def cover(lo: int, hi: int) -> None:
        if lo >= hi:
            return
        mid = lo + (hi - lo + 1) // 2
        if (mid - lo) % 2 == 0:
            mid = mid + 1 if mid + 1 <= hi else mid - 1
        edges.append((lo, mid))
        cover(lo, mid - 1)
        cover(mid, hi)

    cover(0, n - 1)
    return edges


def ghz_circuit_state(n: int, layout: str = "chain") -> np.ndarray:
    """Run the Hadamard + CNOT cascade on |g...g>.

    ``layout`` selects the wiring: "chain" for the nearest-neighbor cascade,
    "log_depth" for the recursively halved forest.  Both produce the same
    state, equal to :func:`prepare_q_pi` for even n.
    """
    if n < 2:
        raise ValueError("need at least two qubits")
    if layout == "chain":
        edges = _chain_edges(n)
    elif layout == "log_depth":
        edges = _log_depth_edges(n)
    else:
        raise ValueError(f"unknown layout {layout!r}")
    psi = product_ground_state(n)
    psi = hadamard(psi, 0)
    for control, target in edges:
        psi = cnot(psi, control, target)
    return psi


def u_flip(psi: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta/2 * Y_1 X_2 ... X_N) via the two-term closed form.

    Pauli strings square to the identity, so the exponential is
    cos(theta/2) - i sin(theta/2) * (string).
    """
    n = n_qubits(psi)
    string = PauliString(tuple([(0, "y")] + [(j, "x") for j in range(1, n)]))
    return math.cos(theta / 2.0) * psi + apply_pauli_string(
        psi, string, phase=-1j * math.sin(theta / 2.0)
    )


def u_flip_state(n: int) -> np.ndarray:
    """Flip-unitary preparation: X on even sites, then the pi/2 string flip.

    Agrees with :func:`prepare_q_pi` up to a global phase.
    """
    if n % 2 != 0:
        raise ValueError("the flip preparation needs an even ring")
    start = sum(1 << j for j in range(1, n, 2))  # |g r g r ... >, site 1 in |g>
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[start] = 1.0
    return u_flip(psi, math.pi / 2.0)


_ROTATION_MATRICES = {
    # 2x2 blocks in the (|g>, |r>) ordering of our Pauli convention
    "x": lambda half: np.array(
        [[math.cos(half), -1j * math.sin(half)], [-1j * math.sin(half), math.cos(half)]]
    ),
    "y": lambda half: np.array(
        [[math.cos(half), math.sin(half)], [-math.sin(half), math.cos(half)]]
    ),
}


def global_rotation(psi: np.ndarray, axis: str, theta: float) -> np.ndarray:
    """Apply exp(-i theta sigma_axis / 2) on every qubit."""
    if axis not in _ROTATION_MATRICES:
        raise ValueError(f"unknown rotation axis {axis!r}")
    mat = _ROTATION_MATRICES[axis](0.5 * theta)
    n = n_qubits(psi)
    out = psi
    for site in range(n):
        view = out.reshape(2 ** (n - 1 - site), 2, 2**site)
        rotated = np.empty_like(view)
        rotated[:, 0, :] = mat[0, 0] * view[:, 0, :] + mat[0, 1] * view[:, 1, :]
        rotated[:, 1, :] = mat[1, 0] * view[:, 0, :] + mat[1, 1] * view[:, 1, :]
        out = rotated.reshape(psi.shape)
    return out


def sample_bitstrings(psi: np.ndarray, shots: int, rng: np.random.Generator) -> ShotTable:
    """Draw i.i.d. projective Z-basis readouts from |amplitude|^2."""
    if shots < 1:
        raise ValueError("need at least one shot")
    n = n_qubits(psi)
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    draws = rng.choice(psi.size, size=shots, p=probs)
    hist = np.bincount(draws, minlength=psi.size)
    counts = {
        bitstring_key(idx, n): int(c) for idx, c in enumerate(hist) if c > 0
    }
    return ShotTable(shots=shots, counts=counts)


@dataclass(frozen=True)
class EnergyEstimate:
    """Shot-estimated exchange-ring energy with binomial error propagation."""

    value: float
    stderr: float
    bond_means: dict
    shots_per_basis: int


# measurement setting -> global rotation that maps the bond onto ZZ readout
_SETTINGS = {"zz": None, "xx": ("y", math.pi / 2.0), "yy": ("x", math.pi / 2.0)}


def _bond_zz_means_exact(psi: np.ndarray, bonds) -> np.ndarray:
    probs = np.abs(psi) ** 2
    zz = z_values(n_qubits(psi))
    return np.array([probs @ (zz[:, i] * zz[:, k]) for i, k in bonds])


def _bond_zz_means_sampled(psi, bonds, shots, rng):
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    draws = rng.choice(psi.size, size=shots, p=probs)
    hist = np.bincount(draws, minlength=psi.size).astype(float)
    zz = z_values(n_qubits(psi))
    return np.array([(hist @ (zz[:, i] * zz[:, k])) / shots for i, k in bonds])


def estimate_heisenberg_energy(
    psi: np.ndarray,
    shots_per_basis: int,
    rng: np.random.Generator | None = None,
    j: float = 1.0,
    exact: bool = False,
) -> EnergyEstimate:
    """Three-setting estimate of the exchange-ring energy (J/4) sum of bonds.

    One setting reads ZZ bonds directly; the XX and YY settings first apply
    the ideal global pi/2 rotation about y and x respectively.  With
    ``exact=True`` the infinite-shot limit is returned (stderr 0), which
    coincides with :func:`rydvqe.hamiltonian.expectation` of the exchange
    target.
    """
    if not exact and shots_per_basis < 1:
        raise ValueError("need at least one shot per basis")
    if not exact and rng is None:
        raise ValueError("sampling requires an RNG")
    n = n_qubits(psi)
    bonds = TargetHamiltonian.xxx(n, j=j).bonds()
    bond_means: dict[str, list[float]] = {}
    total = 0.0
    variance = 0.0
    for name, rotation in _SETTINGS.items():
        rotated = psi if rotation is None else global_rotation(psi, *rotation)
        if exact:
            means = _bond_zz_means_exact(rotated, bonds)
        else:
            means = _bond_zz_means_sampled(rotated, bonds, shots_per_basis, rng)
            variance += float(np.sum((1.0 - means**2) / shots_per_basis))
        bond_means[name] = [float(m) for m in means]
        total += float(np.sum(means))
    value = 0.25 * j * total
    stderr = 0.25 * j * math.sqrt(variance) if not exact else 0.0
    return EnergyEstimate(
        value=value,
        stderr=stderr,
        bond_means=bond_means,
        shots_per_basis=0 if exact else shots_per_basis,
    )


def rotated_protocol_duration_ns(
    pulse_duration_ns: float,
    rotation_time_ns: float = DEFAULT_ROTATION_TIME_NS,
    coherence_budget_ns: float = DEFAULT_COHERENCE_BUDGET_NS,
) -> tuple[float, bool]:
    """Total duration of pulse + measurement rotation, and whether it fits
    within the coherence budget."""
    total = pulse_duration_ns + rotation_time_ns
    return total, total <= coherence_budget_ns
