"""First-order Floquet perturbation theory and analytic CoM formulas.

Two first-order schemes are provided: the sideband expansion in the
extended space (single-photon corrections with exact denominators) and the
stroboscopic expansion whose correction carries V^dagger - V over omega.
The analytic center-of-mass formulas apply at the band-inversion point
k = 0 of the effective two-level model, where the band gap is 2(J1+J2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extended import quasienergies
from .model import ModelParams, StaticEigenpair, drive_coupling, static_eigensystem, velocity_operator

TOL_RES = 1e-6

SCHEME_EXTENDED = "extended-space"
SCHEME_MAGNUS = "floquet-magnus"


class ResonanceError(ValueError):
    """A first-order denominator fell below the resonance tolerance."""


class DegenerateInputError(ValueError):
    """Static eigensystem flagged degenerate; perturbation theory rejected."""


@dataclass(frozen=True)
class FirstOrderMode:
    """Zeroth-order spinor plus the single-photon sideband corrections."""

    base: StaticEigenpair
    u0: np.ndarray = field(repr=False)
    u_plus: np.ndarray = field(repr=False)
    u_minus: np.ndarray = field(repr=False)
    scheme: str = SCHEME_EXTENDED

    def assembled_state(self) -> np.ndarray:
        """Physical state sum_p u^p, unnormalized."""
        return self.u0 + self.u_plus + self.u_minus

    def component(self, p: int) -> np.ndarray:
        if p == 0:
            return self.u0
        if p == 1:
            return self.u_plus
        if p == -1:
            return self.u_minus
        return np.zeros(2, dtype=complex)


@dataclass(frozen=True)
class ComTerms:
    """Three-cosine decomposition of the first-order CoM.

    x(t) = sum_i amplitudes[i] * (cos(frequencies[i] * t) - 1), with
    frequencies {2e, 2e - omega, 2e + omega} for e = J1 + J2.
    """

    amplitudes: tuple[float, float, float]
    frequencies: tuple[float, float, float]
    lowfreq_index: int = 1

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, f in zip(self.amplitudes, self.frequencies):
            out = out + a * (np.cos(f * t) - 1.0)
        return out

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, f in zip(self.amplitudes, self.frequencies):
            out = out - a * f * np.sin(f * t)
        return out

    def as_dict(self) -> dict:
        return {
            "amplitudes": list(self.amplitudes),
            "frequencies": list(self.frequencies),
            "lowfreq_index": self.lowfreq_index,
        }


def _checked_pair(params: ModelParams, k: float):
    lower, upper = static_eigensystem(params, k)
    if lower.degenerate or upper.degenerate:
        raise DegenerateInputError(f"static gap closed at k={k}")
    return lower, upper


def first_order_extended(
    params: ModelParams, k: float, include_diagonal: bool = False
) -> tuple[FirstOrderMode, FirstOrderMode]:
    """Single-photon first-order modes in the extended space.

    u^{-1} = sum_{m != n} <m|V^+|n> / (e_n - e_m + omega) |m> and u^{+1}
    analogously with -omega.  With include_diagonal=True the m = n sideband
    amplitudes <n|V|n>/(-+omega) are kept as well; for a drive that is
    diagonal in the static basis they reproduce the oscillating phase
    factors of the effective-model evolution.
    """
    lower, upper = _checked_pair(params, k)
    v = drive_coupling(params)
    w = params.omega
    modes = []
    pair = (lower, upper)
    for n, base in enumerate(pair):
        other = pair[1 - n]
        den_minus = base.energy - other.energy + w
        den_plus = base.energy - other.energy - w
        for sign, den in (("+", den_plus), ("-", den_minus)):
            if abs(den) < TOL_RES:
                raise ResonanceError(
                    f"single-photon resonance (n={n}, m={1 - n}, sign={sign}): "
                    f"denominator {den:.3e} below {TOL_RES}"
                )
        amp = complex(np.vdot(other.state, v @ base.state))
        u_minus = (amp / den_minus) * other.state
        u_plus = (amp / den_plus) * other.state
        if include_diagonal:
            diag = complex(np.vdot(base.state, v @ base.state))
            u_minus = u_minus + (diag / w) * base.state
            u_plus = u_plus + (diag / (-w)) * base.state
        modes.append(FirstOrderMode(base, base.state.copy(), u_plus, u_minus, SCHEME_EXTENDED))
    return modes[0], modes[1]


def first_order_magnus(params: ModelParams, k: float) -> tuple[FirstOrderMode, FirstOrderMode]:
    """First-order stroboscopic modes: |n> + (1/omega) sum_{m != n} |m><m|V^+ - V|n>.

    The first-order quasienergy shift vanishes.  For the Hermitian coupling
    of this model the correction is identically zero and the mode equals the
    static eigenstate.
    """
    lower, upper = _checked_pair(params, k)
    v = drive_coupling(params)
    w = params.omega
    if w < TOL_RES:
        raise ValueError(f"omega too small for the stroboscopic expansion: {w}")
    modes = []
    pair = (lower, upper)
    for n, base in enumerate(pair):
        other = pair[1 - n]
        amp_dag = complex(np.vdot(other.state, v.conj().T @ base.state))
        amp = complex(np.vdot(other.state, v @ base.state))
        u_minus = (amp_dag / w) * other.state
        u_plus = (-amp / w) * other.state
        modes.append(FirstOrderMode(base, base.state.copy(), u_plus, u_minus, SCHEME_MAGNUS))
    return modes[0], modes[1]


def com_terms(params: ModelParams) -> ComTerms:
    """Amplitudes and frequencies of the three-term first-order CoM."""
    e = params.j1 + params.j2
    w = params.omega
    for den, label in ((2 * e - w, "2e-omega"), (2 * e + w, "2e+omega"), (2 * e, "2e")):
        if abs(den) < TOL_RES:
            raise ResonanceError(f"CoM amplitude diverges: |{label}| = {abs(den):.3e}")
    amps = (
        params.j2 / (2 * e),
        -(params.amp / w) * params.j2 / (2 * e - w),
        +(params.amp / w) * params.j2 / (2 * e + w),
    )
    freqs = (2 * e, 2 * e - w, 2 * e + w)
    return ComTerms(amplitudes=amps, frequencies=freqs, lowfreq_index=1)


def com_first_order(params: ModelParams, t):
    """First-order CoM at the band-inversion point; returns (x(t), ComTerms)."""
    terms = com_terms(params)
    return terms.evaluate(t), terms


def com_velocity_first_order(params: ModelParams, t):
    """dx/dt = -J2 sin(2e t) - (2 A J2 / omega) cos(2e t) sin(omega t)."""
    e = params.j1 + params.j2
    t = np.asarray(t, dtype=float)
    return -params.j2 * np.sin(2 * e * t) - (2 * params.amp * params.j2 / params.omega) * np.cos(
        2 * e * t
    ) * np.sin(params.omega * t)


def com_low_frequency(params: ModelParams, t):
    """Low-frequency CoM component, the (2e - omega) term alone."""
    terms = com_terms(params)
    i = terms.lowfreq_index
    t = np.asarray(t, dtype=float)
    return terms.amplitudes[i] * (np.cos(terms.frequencies[i] * t) - 1.0)


def com_from_evolved_state(params: ModelParams, k: float, t, include_diagonal: bool = True):
    """CoM from the assembled first-order state, by integrating <v>.

    Builds psi(t) = sum_n c_n exp(-i e_n t) sum_p u_n^p exp(i p omega t)
    for the spin-polarized initial state (1, 0), evaluates <psi|v|psi>, and
    integrates it on the given time grid (trapezoid).  With diagonal
    sideband terms included this reproduces the three-term formula at k = 0
    up to second order in the drive.
    """
    t = np.asarray(t, dtype=float)
    modes = first_order_extended(params, k, include_diagonal=include_diagonal)
    spinor = np.array([1.0, 0.0], dtype=complex)
    v = velocity_operator(params, k)
    w = params.omega
    psi = np.zeros((t.size, 2), dtype=complex)
    for mode in modes:
        c = complex(np.vdot(mode.base.state, spinor))
        band_phase = np.exp(-1j * mode.base.energy * t)
        for p in (-1, 0, 1):
            psi += (c * band_phase * np.exp(1j * p * w * t))[:, None] * mode.component(p)[None, :]
    vel = np.real(np.einsum("ta,ab,tb->t", psi.conj(), v, psi))
    norm = np.real(np.einsum("ta,ta->t", psi.conj(), psi))
    vel = vel / norm
    x = np.concatenate(([0.0], np.cumsum(0.5 * (vel[1:] + vel[:-1]) * np.diff(t))))
    return x


def _principal_vectors(params: ModelParams, k: float, P: int):
    pairs = quasienergies(params, k, P)
    return [(p.quasienergy, p.components) for p in pairs]


def _shifted(components: np.ndarray, shift: int) -> np.ndarray:
    """Slot l of the shifted stack holds u^{l+shift}; vacated slots are zero."""
    out = np.zeros_like(components)
    n = components.shape[0]
    for l in range(n):
        src = l + shift
        if 0 <= src < n:
            out[l] = components[src]
    return out


def heisenberg_identity_check(
    params: ModelParams,
    k: float,
    bands: tuple[int, int] = (0, 1),
    shifts: tuple[int, int] = (0, 0),
    P: int = 12,
    dk: float = 1e-4,
) -> dict:
    """Both sides of the coordinate-operator identity between extended modes.

    For modes (m, q) and (n, p): sum_l <u_m^{l+q}| x |u_n^{l+p}> must equal
    i * sum_l <u_m^{l+q}| v |u_n^{l+p}> / (eps_np - eps_mq), with x acting as
    i d/dk.  The left side uses phase-aligned Richardson finite differences
    of the extended eigenvectors; the right side only needs data at k.
    """
    m_band, n_band = bands
    q_shift, p_shift = shifts
    center = _principal_vectors(params, k, P)
    eps_m = center[m_band][0] - q_shift * params.omega
    eps_n = center[n_band][0] - p_shift * params.omega
    if abs(eps_n - eps_m) < TOL_RES:
        raise ResonanceError(
            f"near-degenerate pair at k={k}: eps_np - eps_mq = {eps_n - eps_m:.3e}"
        )

    vec_m = _shifted(center[m_band][1], q_shift)
    vec_n = _shifted(center[n_band][1], p_shift)

    def aligned_vectors(kk: float):
        side = _principal_vectors(params, kk, P)
        out = []
        for band in range(2):
            ref = center[band][1].ravel()
            cur = side[band][1].ravel()
            ov = np.vdot(ref, cur)
            out.append((cur * (ov.conjugate() / abs(ov))).reshape(center[band][1].shape))
        return out

    def derivative(step: float) -> np.ndarray:
        plus = aligned_vectors(k + step)[n_band]
        minus = aligned_vectors(k - step)[n_band]
        return (plus - minus) / (2 * step)

    d1 = derivative(dk)
    d2 = derivative(2 * dk)
    dvec_n = _shifted((4.0 * d1 - d2) / 3.0, p_shift)

    lhs = complex(np.vdot(vec_m.ravel(), 1j * dvec_n.ravel()))
    v = velocity_operator(params, k)
    vel_elem = complex(np.einsum("la,ab,lb->", vec_m.conj(), v, vec_n))
    rhs = 1j * vel_elem / (eps_n - eps_m)
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs)}


def orthogonality_deficit(
    modes: tuple[FirstOrderMode, FirstOrderMode], q_range: tuple[int, ...] = (-2, -1, 0, 1, 2)
) -> dict:
    """Deviations of sum_p <u_m^p|u_n^{p+q}> from delta_mn delta_q0.

    Keys are (m, n, q); the worst channel scales quadratically with the
    drive amplitude.
    """
    out = {}
    for m, mode_m in enumerate(modes):
        for n, mode_n in enumerate(modes):
            for q in q_range:
                total = 0.0 + 0.0j
                for p in (-1, 0, 1):
                    total += complex(np.vdot(mode_m.component(p), mode_n.component(p + q)))
                expected = 1.0 if (m == n and q == 0) else 0.0
                out[(m, n, q)] = abs(total - expected)
    return out
