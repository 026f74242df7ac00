"""Truncated extended (frequency-domain) Hamiltonian and quasienergies.

The time-periodic 2x2 Bloch problem becomes a static eigenproblem on the
space of Fourier sidebands p in [-P, P].  Quasienergies are reported in the
principal window (-omega/2, omega/2], boundary assigned to +omega/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import IDENTITY, ModelParams, drive_fourier_components

DEFAULT_TRUNCATION = 10
EDGE_WEIGHT_LIMIT = 0.01       # discard eigenvectors with >1% weight in |p| in {P-1, P}
AMBIGUITY_TOL = 1e-6
DEFAULT_DRIFT_TOL = 1e-10


class TruncationError(ValueError):
    """Principal quasienergy extraction failed at the given truncation."""


class AmbiguousSelectionError(TruncationError):
    """Two principal candidates with near-equal central weight."""


def fold_quasienergy(energy, omega: float):
    """Fold into (-omega/2, omega/2]; returns (folded, integer shift q) with
    energy = folded + q*omega."""
    q = np.ceil(np.asarray(energy) / omega - 0.5)
    return energy - q * omega, q.astype(int)


@dataclass(frozen=True)
class ExtendedHamiltonian:
    truncation: int
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * (2 * self.truncation + 1)


@dataclass(frozen=True)
class ExtendedEigenpair:
    """Folded quasienergy with the stack of Fourier components of the mode.

    components[p + P] is the 2-spinor of sideband p.  replica_index is 0 for
    the principal representative returned by quasienergies().
    """

    quasienergy: float
    components: np.ndarray = field(repr=False)
    replica_index: int = 0

    @property
    def truncation(self) -> int:
        return (self.components.shape[0] - 1) // 2

    def assembled_state(self) -> np.ndarray:
        """Physical 2-spinor sum_p u^p (the mode at t = 0), unnormalized."""
        return self.components.sum(axis=0)

    def central_weight(self) -> float:
        p0 = self.truncation
        return float(np.sum(np.abs(self.components[p0]) ** 2))


def build_extended(params: ModelParams, k: float, P: int) -> ExtendedHamiltonian:
    """Block-tridiagonal extended Hamiltonian with blocks H_{q-p} + p*omega*I.

    Row block q, column block p; only H_0 and H_{+-1} are nonzero for the
    cosine drive.
    """
    if P < 1:
        raise ValueError(f"truncation P must be >= 1, got {P}")
    comps = drive_fourier_components(params, k)
    h0 = comps[0]
    v = comps[1]
    nb = 2 * P + 1
    m = np.zeros((2 * nb, 2 * nb), dtype=complex)
    for q in range(-P, P + 1):
        iq = 2 * (q + P)
        m[iq:iq + 2, iq:iq + 2] = h0 + q * params.omega * IDENTITY
        if q + 1 <= P:
            ip = 2 * (q + 1 + P)
            m[iq:iq + 2, ip:ip + 2] = comps[-1]   # H_{q-p} with p = q+1
            m[ip:ip + 2, iq:iq + 2] = comps[1]
    return ExtendedHamiltonian(truncation=P, matrix=m)


def _edge_weight(components: np.ndarray) -> float:
    w = np.sum(np.abs(components) ** 2, axis=1)
    return float(w[0] + w[1] + w[-2] + w[-1])


def quasienergies(params: ModelParams, k: float, P: int = DEFAULT_TRUNCATION) -> list[ExtendedEigenpair]:
    """The two principal eigenpairs at k, sorted by quasienergy.

    Diagonalizes the truncated extended Hamiltonian, discards
    truncation-edge eigenvectors, and keeps the eigenvalues inside the
    principal window.  Exactly one replica per physical band lands there;
    anything else raises a diagnostic error.
    """
    ext = build_extended(params, k, P)
    evals, evecs = np.linalg.eigh(ext.matrix)
    half = params.omega / 2
    picked = []
    for i, e in enumerate(evals):
        if -half < e <= half:
            comp = evecs[:, i].reshape(2 * P + 1, 2)
            if _edge_weight(comp) < EDGE_WEIGHT_LIMIT:
                picked.append(ExtendedEigenpair(float(e), comp))
    if len(picked) > 2:
        picked.sort(key=lambda p: p.central_weight(), reverse=True)
        if abs(picked[1].central_weight() - picked[2].central_weight()) < AMBIGUITY_TOL:
            raise AmbiguousSelectionError(
                f"principal selection ambiguous at k={k}: central weights "
                f"{[p.central_weight() for p in picked[:3]]}"
            )
        picked = picked[:2]
    if len(picked) != 2:
        raise TruncationError(
            f"expected 2 principal pairs at k={k}, found {len(picked)} at P={P}; "
            "increase the truncation"
        )
    picked.sort(key=lambda p: p.quasienergy)
    return picked


def convergence_check(params: ModelParams, k: float, P: int = DEFAULT_TRUNCATION) -> dict:
    """Quasienergy drift between truncations P and P+2."""
    a = [p.quasienergy for p in quasienergies(params, k, P)]
    b = [p.quasienergy for p in quasienergies(params, k, P + 2)]
    drift = max(abs(x - y) for x, y in zip(a, b))
    return {"P": P, "P_next": P + 2, "max_drift": drift}


def resolve_truncation(
    params: ModelParams,
    k: float,
    P: int = DEFAULT_TRUNCATION,
    drift_tol: float = DEFAULT_DRIFT_TOL,
    max_P: int = 60,
) -> int:
    """Smallest truncation >= P whose P -> P+2 drift is below drift_tol."""
    cur = P
    while cur <= max_P:
        try:
            report = convergence_check(params, k, cur)
        except TruncationError:
            cur += 2
            continue
        if report["max_drift"] < drift_tol:
            return cur
        cur += 2
    raise TruncationError(f"no converged truncation found up to P={max_P} at k={k}")


def spectrum_scan(params: ModelParams, k_grid, P: int = DEFAULT_TRUNCATION, q_display: int = 1) -> list[dict]:
    """Principal quasienergies per k plus shifted display replicas.

    Rows are dicts with keys k, band_index, quasienergy, replica_q; replica
    rows repeat the principal value shifted by -q*omega for |q| <= q_display.
    """
    rows = []
    for idx, k in enumerate(np.asarray(k_grid, dtype=float)):
        try:
            pairs = quasienergies(params, k, P)
        except TruncationError as exc:
            raise TruncationError(f"spectrum scan failed at k={k}: {exc}") from exc
        for band, pair in enumerate(pairs):
            for q in range(-q_display, q_display + 1):
                rows.append(
                    {
                        "k": float(k),
                        "band_index": band,
                        "quasienergy": pair.quasienergy - q * params.omega,
                        "replica_q": q,
                    }
                )
    return rows


def gap_minima(params: ModelParams, k_grid, P: int = DEFAULT_TRUNCATION) -> tuple[float, float]:
    """Minimum quasienergy gaps at the window center and edge over k_grid.

    The chiral-symmetric spectrum comes in +-eps pairs, so the center gap is
    2*min|eps| and the edge gap is 2*min(omega/2 - |eps|).
    """
    g0 = math.inf
    gpi = math.inf
    half = params.omega / 2
    for k in np.asarray(k_grid, dtype=float):
        for pair in quasienergies(params, k, P):
            g0 = min(g0, 2 * abs(pair.quasienergy))
            gpi = min(gpi, 2 * (half - abs(pair.quasienergy)))
    return g0, gpi
