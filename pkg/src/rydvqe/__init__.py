"""Pulse-level variational ground-state preparation on Rydberg tweezer rings.

The package simulates N-qubit statevectors under the long-range Ising drive
of a ring tweezer array with piecewise-linear global pulses, adaptively
refines the pulse schedule by random time splitting to minimize the energy
of a target spin Hamiltonian, and validates everything against a dense
exact-diagonalization oracle.
"""

from .config import (
    ConfigError,
    FixedRadius,
    LbfgsbFdSpec,
    MeasureConfig,
    NelderMeadSpec,
    VariableRadius,
    VqeConfig,
)
from .evolve import IntegrationError, evolve, evolve_with_info, propagate_segment
from .geometry import (
    GeometryError,
    PhysicalConstants,
    RingGeometry,
    atom_positions,
    interaction_matrix,
    nn_ising_mhz,
)
from .hamiltonian import (
    PauliString,
    TargetHamiltonian,
    apply_drive,
    apply_pauli_string,
    apply_target,
    expectation,
    product_ground_state,
)
from .measure import (
    ShotTable,
    estimate_heisenberg_energy,
    ghz_circuit_state,
    global_rotation,
    prepare_q_pi,
    sample_bitstrings,
    u_flip_state,
)
from .oracle import (
    GroundStateResult,
    correlation,
    dense_ground_state,
    marshall_momentum,
    momentum_of,
    translation_apply,
)
from .pulses import (
    PulseError,
    PulseSequence,
    SplitInfo,
    linear_schedule,
    pack,
    random_split,
    split_segment,
    unpack,
)
from .records import EnsembleStats, RunRecord, StageRecord
from .vqe import (
    CostFunction,
    adaptive_run,
    derive_seed,
    ensemble,
    lbfgsb_fd,
    nelder_mead,
    relative_error,
)

__version__ = "0.1.0"
