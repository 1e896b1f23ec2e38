"""Ring geometries, hardware constants, and van der Waals couplings.

Unit conventions used throughout the package: energies and frequencies in
rad/us (hbar = 1), lengths in um, schedule times in ns.  Frequencies quoted
in MHz are ordinary frequencies, i.e. rad/us divided by 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Raised for geometries the hardware cannot realize."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Platform constants of the tweezer array.

    Attributes
    ----------
    c6_over_hbar:
        van der Waals coefficient C6/hbar in rad um^6 / us (Rb-87, n = 70).
    clock_period_ns:
        Pulse clock granularity; every breakpoint time is a multiple of it.
    min_segment_ns:
        Strict lower bound on the duration of any pulse segment.
    omega_bounds:
        Allowed Rabi-frequency range in rad/us.
    delta_bounds:
        Allowed detuning range in rad/us.
    min_nn_distance_um:
        Hardware floor for the nearest-neighbor tweezer spacing.
    """

    c6_over_hbar: float = 5420158.53
    clock_period_ns: int = 4
    min_segment_ns: int = 16
    omega_bounds: tuple[float, float] = (0.0, 15.0)
    delta_bounds: tuple[float, float] = (-125.0, 125.0)
    min_nn_distance_um: float = 4.0

    def __post_init__(self):
        if self.c6_over_hbar <= 0:
            raise ValueError("c6_over_hbar must be positive")
        if self.clock_period_ns <= 0:
            raise ValueError("clock_period_ns must be positive")
        if self.min_segment_ns % self.clock_period_ns != 0:
            raise ValueError("min_segment_ns must be a multiple of clock_period_ns")
        if self.omega_bounds[0] < 0 or self.omega_bounds[0] >= self.omega_bounds[1]:
            raise ValueError("omega_bounds must satisfy 0 <= lo < hi")
        if self.delta_bounds[0] >= self.delta_bounds[1]:
            raise ValueError("delta_bounds must satisfy lo < hi")
        if self.min_nn_distance_um <= 0:
            raise ValueError("min_nn_distance_um must be positive")


@dataclass(frozen=True)
class RingGeometry:
    """N atoms equally spaced on a circle of radius ``radius_um``."""

    n_atoms: int
    radius_um: float

    def __post_init__(self):
        if self.n_atoms < 2:
            raise GeometryError("need at least two atoms on the ring")
        if self.radius_um <= 0:
            raise GeometryError("ring radius must be positive")

    @property
    def nn_distance_um(self) -> float:
        """Nearest-neighbor chord distance 2 R sin(pi / N)."""
        return 2.0 * self.radius_um * math.sin(math.pi / self.n_atoms)

    def separation_um(self, k: int) -> float:
        """Chord distance between atoms k sites apart on the ring."""
        return 2.0 * self.radius_um * math.sin(math.pi * (k % self.n_atoms) / self.n_atoms)

    def check_spacing(self, constants: PhysicalConstants) -> None:
        if self.nn_distance_um < constants.min_nn_distance_um:
            raise GeometryError(
                f"nearest-neighbor distance {self.nn_distance_um:.3f} um is below "
                f"the hardware floor {constants.min_nn_distance_um:.3f} um"
            )


def atom_positions(geometry: RingGeometry) -> np.ndarray:
    """Cartesian positions (um) of the ring sites, shape (N, 2).

    Site j sits at R * (cos(2 pi j / N), sin(2 pi j / N)).
    """
    angles = TWO_PI * np.arange(geometry.n_atoms) / geometry.n_atoms
    return geometry.radius_um * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def interaction_matrix(geometry: RingGeometry, constants: PhysicalConstants) -> np.ndarray:
    """Pairwise van der Waals couplings J_ij / hbar in rad/us.

    The coupling falls off as C6 / r^6 with the chord distance r between
    sites.  Distances are evaluated from the index separation, so the matrix
    is exactly invariant under cyclic relabeling of the ring (coincident
    atoms cannot occur for a positive radius).
    """
    n = geometry.n_atoms
    coupling_by_separation = np.zeros(n)
    for k in range(1, n):
        coupling_by_separation[k] = constants.c6_over_hbar / geometry.separation_um(k) ** 6
    idx = np.arange(n)
    sep = np.minimum((idx[:, None] - idx[None, :]) % n, (idx[None, :] - idx[:, None]) % n)
    jmat = coupling_by_separation[sep]
    np.fill_diagonal(jmat, 0.0)
    return jmat


def nn_ising_mhz(geometry: RingGeometry, constants: PhysicalConstants) -> float:
    """Nearest-neighbor Ising coupling J_nn / h in MHz, C6 / (h d_nn^6)."""
    return constants.c6_over_hbar / geometry.nn_distance_um**6 / TWO_PI
