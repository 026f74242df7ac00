"""Gaussian wave-packet dynamics on the driven chain.

The primary evolution path diagonalizes in momentum space: the drive is
spatially uniform, so each Bloch 2-spinor evolves independently under the
propagator stepper.  A real-space split-step integrator over the open
chain serves as an independent oracle.

The momentum decomposition uses phi(k_j) = (1/sqrt(L)) sum_i e^{-i k_j i}
psi_i, under which the position operator acts as +i d/dk and the Bloch
Hamiltonian is the one from the model module.  In real space this fixes
the inter-cell bond to couple sublattice B of cell i with sublattice A of
cell i+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams
from .perturbation import ResonanceError, com_low_frequency, com_terms
from .propagator import DEFAULT_STEPS_PER_PERIOD, pauli_exponential, step_generator

BOUNDARY_LEAK_LIMIT = 1e-8


class BoundaryLeakError(RuntimeError):
    """Open-chain density reached the edges beyond the tolerated leak."""


@dataclass(frozen=True)
class WavePacketSpec:
    """Initial Gaussian packet and run geometry."""

    width: float = 10.0
    k0: float = 0.0
    spinor: tuple = (1.0, 0.0)
    cells: int = 400
    duration: float = 25.0
    dt: float = 0.05
    center: int | None = None

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if self.cells < 8 * self.width:
            raise ValueError(
                f"lattice too small: cells={self.cells} < 8*width={8 * self.width:g} "
                "(packet tails must stay below 1e-7 at the boundaries)"
            )
        if self.duration <= 0 or self.dt <= 0:
            raise ValueError("duration and dt must be positive")
        s = np.asarray(self.spinor, dtype=complex)
        if abs(np.linalg.norm(s) - 1.0) > 1e-14:
            raise ValueError("spinor must be normalized")

    @property
    def center_cell(self) -> int:
        return self.cells // 2 if self.center is None else self.center

    @property
    def spinor_array(self) -> np.ndarray:
        return np.asarray(self.spinor, dtype=complex)

    def as_dict(self) -> dict:
        return {
            "width": self.width,
            "k0": self.k0,
            "spinor_re": [float(np.real(c)) for c in self.spinor],
            "spinor_im": [float(np.imag(c)) for c in self.spinor],
            "cells": self.cells,
            "duration": self.duration,
            "dt": self.dt,
            "center": self.center_cell,
        }


@dataclass(frozen=True)
class Trajectory:
    """CoM time series; x_exact is centered so that x_exact(0) = 0."""

    times: np.ndarray = field(repr=False)
    x_exact: np.ndarray = field(repr=False)
    v_exact: np.ndarray = field(repr=False)
    norm: np.ndarray = field(repr=False)
    x_first_order: np.ndarray | None = field(repr=False, default=None)
    x_lowfreq: np.ndarray | None = field(repr=False, default=None)
    x_initial: float = 0.0


@dataclass(frozen=True)
class DensityProfile:
    times: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)   # shape (n_times, cells)


def prepare_packet(spec: WavePacketSpec) -> np.ndarray:
    """Normalized lattice state, shape (cells, 2).

    psi_i proportional to exp(-(i - ic)^2 / (2 d^2) + i k0 (i - ic)) times
    the spinor, centered at ic = cells // 2.
    """
    x = np.arange(spec.cells, dtype=float) - spec.center_cell
    envelope = np.exp(-(x**2) / (2.0 * spec.width**2) + 1j * spec.k0 * x)
    psi = envelope[:, None] * spec.spinor_array[None, :]
    return psi / np.linalg.norm(psi)


def lattice_momenta(cells: int) -> np.ndarray:
    """Quasimomenta 2*pi*j/cells folded into (-pi, pi]."""
    ks = 2.0 * np.pi * np.arange(cells) / cells
    return np.where(ks > np.pi, ks - 2.0 * np.pi, ks)


def to_momentum(psi: np.ndarray) -> np.ndarray:
    return np.fft.fft(psi, axis=0) / math.sqrt(psi.shape[0])


def to_position(phi: np.ndarray) -> np.ndarray:
    return np.fft.ifft(phi, axis=0) * math.sqrt(phi.shape[0])


def _com(psi: np.ndarray) -> tuple[float, float]:
    rho = np.abs(psi[:, 0]) ** 2 + np.abs(psi[:, 1]) ** 2
    cells = np.arange(psi.shape[0], dtype=float)
    return float(np.sum(cells * rho)), float(np.sum(rho))


def _velocity_expectation(phi: np.ndarray, ks: np.ndarray, j2: float) -> float:
    # v(k) = -J2 sin k sigma_x + J2 cos k sigma_y, diagonal in k
    sx = -j2 * np.sin(ks)
    sy = j2 * np.cos(ks)
    va = sx * phi[:, 1] - 1j * sy * phi[:, 1]
    vb = sx * phi[:, 0] + 1j * sy * phi[:, 0]
    return float(np.real(np.sum(phi[:, 0].conj() * va + phi[:, 1].conj() * vb)))


def _analytic_columns(params: ModelParams, times: np.ndarray):
    try:
        terms = com_terms(params)
    except ResonanceError:
        return None, None
    return terms.evaluate(times), com_low_frequency(params, times)


def _output_grid(spec: WavePacketSpec, params: ModelParams, steps_per_period: int):
    n_out = int(round(spec.duration / spec.dt))
    delta0 = params.period / steps_per_period
    n_sub = max(1, int(round(spec.dt / delta0)))
    return n_out, spec.dt / n_sub, n_sub


def evolve_momentum_space(
    spec: WavePacketSpec,
    params: ModelParams,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    with_analytic: bool = True,
) -> Trajectory:
    """Exact evolution via the k-diagonal factorization (periodic chain)."""
    psi0 = prepare_packet(spec)
    L = spec.cells
    ks = lattice_momenta(L)
    phi = to_momentum(psi0)
    n_out, dsub, n_sub = _output_grid(spec, params, steps_per_period)

    times = np.empty(n_out + 1)
    xs = np.empty(n_out + 1)
    vs = np.empty(n_out + 1)
    norms = np.empty(n_out + 1)
    t = 0.0
    x0 = None
    for m in range(n_out + 1):
        psi = to_position(phi)
        x, norm = _com(psi)
        if x0 is None:
            x0 = x
        times[m] = t
        xs[m] = x - x0
        vs[m] = _velocity_expectation(phi, ks, params.j2)
        norms[m] = norm
        if m == n_out:
            break
        for n in range(n_sub):
            gx, gy, gz = step_generator(params, ks, t + n * dsub, dsub)
            phi = np.einsum("kab,kb->ka", pauli_exponential(gx, gy, gz), phi)
        t += spec.dt

    xfo, xlf = _analytic_columns(params, times) if with_analytic else (None, None)
    return Trajectory(times, xs, vs, norms, xfo, xlf, x_initial=x0)


def _intra_step(psi: np.ndarray, params: ModelParams, ta: float, tb: float) -> None:
    # exp(-i sigma_x * int J1(t) dt) within each cell, in place
    w = params.omega
    phase = params.j1 * (tb - ta) + (params.amp / w) * (np.sin(w * tb) - np.sin(w * ta))
    c, s = np.cos(phase), np.sin(phase)
    a = psi[:, 0].copy()
    b = psi[:, 1]
    psi[:, 0] = c * a - 1j * s * b
    psi[:, 1] = c * b - 1j * s * a


def _inter_step(psi: np.ndarray, j2: float, tau: float) -> None:
    # exp(-i J2 tau sigma_x) on each open-chain bond (i, B) <-> (i+1, A)
    c, s = np.cos(j2 * tau), np.sin(j2 * tau)
    b = psi[:-1, 1].copy()
    a = psi[1:, 0].copy()
    psi[:-1, 1] = c * b - 1j * s * a
    psi[1:, 0] = c * a - 1j * s * b


def _velocity_real_space(psi: np.ndarray, j2: float) -> float:
    z = np.sum(psi[1:, 0].conj() * psi[:-1, 1])
    return float(2.0 * j2 * np.imag(z))


def evolve_real_space(
    spec: WavePacketSpec,
    params: ModelParams,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    with_analytic: bool = True,
) -> Trajectory:
    """Independent oracle: split-step integration of the open chain.

    Strang split of intra- and inter-cell hoppings; each substep is exactly
    unitary.  Raises BoundaryLeakError once edge density exceeds 1e-8.
    """
    psi = prepare_packet(spec).copy()
    n_out, dsub, n_sub = _output_grid(spec, params, steps_per_period)

    times = np.empty(n_out + 1)
    xs = np.empty(n_out + 1)
    vs = np.empty(n_out + 1)
    norms = np.empty(n_out + 1)
    t = 0.0
    x0 = None
    for m in range(n_out + 1):
        edge = (
            np.abs(psi[0]) ** 2 + np.abs(psi[-1]) ** 2
        ).sum()
        if edge > BOUNDARY_LEAK_LIMIT:
            raise BoundaryLeakError(
                f"edge density {edge:.3e} exceeds {BOUNDARY_LEAK_LIMIT} at t={t:g}"
            )
        x, norm = _com(psi)
        if x0 is None:
            x0 = x
        times[m] = t
        xs[m] = x - x0
        vs[m] = _velocity_real_space(psi, params.j2)
        norms[m] = norm
        if m == n_out:
            break
        for n in range(n_sub):
            ta = t + n * dsub
            _inter_step(psi, params.j2, dsub / 2)
            _intra_step(psi, params, ta, ta + dsub)
            _inter_step(psi, params.j2, dsub / 2)
        t += spec.dt

    xfo, xlf = _analytic_columns(params, times) if with_analytic else (None, None)
    return Trajectory(times, xs, vs, norms, xfo, xlf, x_initial=x0)


def density_map(
    spec: WavePacketSpec,
    params: ModelParams,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
) -> DensityProfile:
    """Per-cell density rho(i, t) on the output time grid (momentum path)."""
    psi0 = prepare_packet(spec)
    ks = lattice_momenta(spec.cells)
    phi = to_momentum(psi0)
    n_out, dsub, n_sub = _output_grid(spec, params, steps_per_period)
    times = np.empty(n_out + 1)
    dens = np.empty((n_out + 1, spec.cells))
    t = 0.0
    for m in range(n_out + 1):
        psi = to_position(phi)
        dens[m] = np.abs(psi[:, 0]) ** 2 + np.abs(psi[:, 1]) ** 2
        times[m] = t
        if m == n_out:
            break
        for n in range(n_sub):
            gx, gy, gz = step_generator(params, ks, t + n * dsub, dsub)
            phi = np.einsum("kab,kb->ka", pauli_exponential(gx, gy, gz), phi)
        t += spec.dt
    return DensityProfile(times=times, density=dens)
