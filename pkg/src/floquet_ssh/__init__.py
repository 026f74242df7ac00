"""Numerical laboratory for quasienergy spectra, wave-packet dynamics, and
band topology of the periodically driven SSH chain."""

__version__ = "0.1.0"

from .model import (
    BlochOperator,
    ModelParams,
    StaticEigenpair,
    bloch_hamiltonian,
    drive_fourier_components,
    static_eigensystem,
    velocity_operator,
)
from .propagator import MagnusPair, Propagator, evolve, floquet_operator, magnus_leading
from .extended import (
    ExtendedEigenpair,
    ExtendedHamiltonian,
    build_extended,
    convergence_check,
    fold_quasienergy,
    quasienergies,
    spectrum_scan,
)
from .perturbation import (
    ComTerms,
    FirstOrderMode,
    ResonanceError,
    com_first_order,
    com_low_frequency,
    first_order_extended,
    first_order_magnus,
    heisenberg_identity_check,
)
from .wavepacket import (
    DensityProfile,
    Trajectory,
    WavePacketSpec,
    density_map,
    evolve_momentum_space,
    evolve_real_space,
    prepare_packet,
)
from .topology import (
    InvariantReport,
    PhaseDiagram,
    band_winding,
    effective_hamiltonian,
    gap_invariants,
    periodicized_half,
    phase_diagram,
)
