"""Driven SSH chain in the Bloch basis.

Units: energies in units of the intra-cell hopping J1, lattice constant 1,
hbar = 1.  The intra-cell hopping is modulated as J1 + A*cos(omega*t); the
inter-cell hopping J2 is static.  Both sublattices of cell i sit at
position i, so the velocity operator is the plain k-derivative of the
Bloch Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Parameter set of the driven chain: hoppings, drive amplitude, drive frequency."""

    j1: float = 1.0
    j2: float = 1.5
    amp: float = 0.0
    omega: float = 5.5

    def __post_init__(self):
        for name in ("j1", "j2", "amp", "omega"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def as_dict(self) -> dict:
        return {"j1": self.j1, "j2": self.j2, "amp": self.amp, "omega": self.omega}


@dataclass(frozen=True)
class BlochOperator:
    """2x2 Bloch Hamiltonian at fixed (k, t), stored by Pauli coefficients."""

    dx: float
    dy: float
    dz: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        return self.dx * SIGMA_X + self.dy * SIGMA_Y + self.dz * SIGMA_Z

    @property
    def magnitude(self) -> float:
        return math.hypot(self.dx, self.dy, self.dz)


@dataclass(frozen=True)
class StaticEigenpair:
    energy: float
    state: np.ndarray = field(repr=False)
    degenerate: bool = False


def intracell_hopping(params: ModelParams, t) -> float:
    """Instantaneous intra-cell hopping J1 + A*cos(omega*t)."""
    return params.j1 + params.amp * np.cos(params.omega * t)


def bloch_hamiltonian(params: ModelParams, k: float, t: float) -> BlochOperator:
    """Instantaneous Bloch Hamiltonian h(k, t).

    dx = J1 + A*cos(omega*t) + J2*cos(k), dy = J2*sin(k), dz = 0.
    """
    dx = intracell_hopping(params, t) + params.j2 * np.cos(k)
    dy = params.j2 * np.sin(k)
    return BlochOperator(dx=float(dx), dy=float(dy))


def drive_fourier_components(params: ModelParams, k: float) -> dict:
    """Fourier components H_p of h(k, t) for the cosine drive.

    Returns {0: h0(k), +1: (A/2) sigma_x, -1: (A/2) sigma_x}; components with
    |p| >= 2 vanish.  The single-photon coupling V = (A/2) sigma_x is
    Hermitian, so H_{+1} = H_{-1} = V = V^dagger.
    """
    static = ModelParams(params.j1, params.j2, 0.0, params.omega)
    h0 = bloch_hamiltonian(static, k, 0.0).matrix
    v = 0.5 * params.amp * SIGMA_X
    return {0: h0, 1: v, -1: v}


def drive_coupling(params: ModelParams) -> np.ndarray:
    """Single-photon coupling V = (A/2) sigma_x."""
    return 0.5 * params.amp * SIGMA_X


def static_eigensystem(params: ModelParams, k: float) -> tuple[StaticEigenpair, StaticEigenpair]:
    """Eigenpairs of the undriven Bloch Hamiltonian at k, sorted ascending.

    Closed form: energies -+|d(k)| with eigenvectors (1, -+exp(i*phi))/sqrt(2),
    phi = arg(dx + i dy).  A closure of the static gap (|d| ~ 0) is flagged,
    not fatal; flagged pairs use an arbitrary orthonormal basis.
    """
    h = bloch_hamiltonian(ModelParams(params.j1, params.j2, 0.0, params.omega), k, 0.0)
    d = h.magnitude
    if d < DEGENERACY_TOL:
        lower = StaticEigenpair(0.0, np.array([1.0, 0.0], dtype=complex), degenerate=True)
        upper = StaticEigenpair(0.0, np.array([0.0, 1.0], dtype=complex), degenerate=True)
        return lower, upper
    phase = complex(h.dx, h.dy) / d
    lower = StaticEigenpair(-d, np.array([1.0, -phase], dtype=complex) / np.sqrt(2.0))
    upper = StaticEigenpair(+d, np.array([1.0, +phase], dtype=complex) / np.sqrt(2.0))
    return lower, upper


def velocity_operator(params: ModelParams, k: float) -> np.ndarray:
    """Velocity operator dh/dk = -J2 sin(k) sigma_x + J2 cos(k) sigma_y."""
    return -params.j2 * np.sin(k) * SIGMA_X + params.j2 * np.cos(k) * SIGMA_Y
