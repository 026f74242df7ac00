import numpy as np
import pytest

from floquet_ssh.extended import (
    build_extended,
    convergence_check,
    fold_quasienergy,
    gap_minima,
    quasienergies,
    resolve_truncation,
    spectrum_scan,
)
from floquet_ssh.model import ModelParams, drive_fourier_components, static_eigensystem
from floquet_ssh.propagator import floquet_operator

P0 = ModelParams(1.0, 1.5, 1.0, 5.5)


def test_fold_window():
    w = 5.5
    f, q = fold_quasienergy(w / 2, w)
    assert f == pytest.approx(w / 2) and q == 0
    f, q = fold_quasienergy(-w / 2, w)
    assert f == pytest.approx(w / 2) and q == -1
    f, q = fold_quasienergy(0.6 * w, w)
    assert f == pytest.approx(-0.4 * w) and q == 1


def test_build_requires_truncation():
    with pytest.raises(ValueError):
        build_extended(P0, 0.0, 0)


def test_build_structure_p1():
    ext = build_extended(ModelParams(1.0, 1.5, 1.0, 5.5), 0.0, 1)
    m = ext.matrix
    assert m.shape == (6, 6)
    assert ext.dim == 6
    # corner blocks (coupling p = -1 to p = +1) vanish: bandwidth one
    assert np.max(np.abs(m[0:2, 4:6])) == 0.0
    assert np.max(np.abs(m[4:6, 0:2])) == 0.0
    # off-diagonal blocks are (A/2) sigma_x
    assert np.allclose(m[0:2, 2:4], 0.5 * np.array([[0, 1], [1, 0]]))


def test_build_static_block_diagonal_eigenvalues():
    params = ModelParams(1.0, 1.5, 0.0, 5.5)
    ext = build_extended(params, 0.6, 1)
    lower, upper = static_eigensystem(params, 0.6)
    expected = sorted(
        e + p * params.omega for e in (lower.energy, upper.energy) for p in (-1, 0, 1)
    )
    assert np.allclose(np.linalg.eigvalsh(ext.matrix), expected, atol=1e-12)


def test_build_hermitian_random():
    rng = np.random.default_rng(7)
    for _ in range(50):
        params = ModelParams(1.0, rng.uniform(0.3, 2), rng.uniform(0, 4), rng.uniform(1, 10))
        m = build_extended(params, rng.uniform(-np.pi, np.pi), 4).matrix
        assert np.linalg.norm(m - m.conj().T) < 1e-13


def test_quasienergies_static_unfolded():
    params = ModelParams(1.0, 1.5, 0.0, 5.5)
    pairs = quasienergies(params, 0.0, 10)
    assert [p.quasienergy for p in pairs] == pytest.approx([-2.5, 2.5], abs=1e-10)


def test_quasienergies_static_folded():
    # omega = 4: the -+2.5 levels fold to +-1.5
    params = ModelParams(1.0, 1.5, 0.0, 4.0)
    pairs = quasienergies(params, 0.0, 10)
    assert [p.quasienergy for p in pairs] == pytest.approx([-1.5, 1.5], abs=1e-10)


def test_quasienergy_normalization_and_orthonormality():
    pairs = quasienergies(P0, 0.7, 12)
    vecs = [p.components.ravel() for p in pairs]
    for v in vecs:
        assert abs(np.vdot(v, v) - 1) < 1e-10
    assert abs(np.vdot(vecs[0], vecs[1])) < 1e-10


def test_replica_relation():
    # the eigenpair at eps - q*omega carries components shifted by q slots
    P = 12
    ext = build_extended(P0, 0.4, P)
    evals, evecs = np.linalg.eigh(ext.matrix)
    principal = quasienergies(P0, 0.4, P)[1]
    q = 2
    target = principal.quasienergy - q * P0.omega
    idx = int(np.argmin(np.abs(evals - target)))
    assert abs(evals[idx] - target) < 1e-9
    replica = evecs[:, idx].reshape(2 * P + 1, 2)
    # slot l of the replica holds u^{l+q} up to a global phase
    shifted = np.zeros_like(principal.components)
    shifted[:-q] = principal.components[q:]
    overlap = np.vdot(replica.ravel(), shifted.ravel())
    assert abs(abs(overlap) - 1) < 1e-8


def test_cross_check_with_propagator():
    for params in (P0, ModelParams(1.0, 1.5, 3.0, 6.0)):
        for k in np.linspace(-np.pi, np.pi, 8, endpoint=False):
            u = floquet_operator(params, k, steps=4000).matrix
            phases = np.sort(-np.angle(np.linalg.eigvals(u)) / params.period)
            qe = np.sort([p.quasienergy for p in quasienergies(params, k, 12)])
            assert np.max(np.abs(phases - qe)) < 1e-8


def test_spectrum_scan_static_limit():
    params = ModelParams(1.0, 1.5, 0.0, 5.5)
    ks = np.linspace(-np.pi, np.pi, 16, endpoint=False)
    rows = spectrum_scan(params, ks, P=8, q_display=0)
    for row in rows:
        lower, upper = static_eigensystem(params, row["k"])
        expected = lower.energy if row["band_index"] == 0 else upper.energy
        folded, _ = fold_quasienergy(expected, params.omega)
        assert row["quasienergy"] == pytest.approx(folded, abs=1e-10)


def test_spectrum_scan_parity():
    ks = np.linspace(0.1, 3.0, 7)
    for k in ks:
        a = [p.quasienergy for p in quasienergies(P0, k, 10)]
        b = [p.quasienergy for p in quasienergies(P0, -k, 10)]
        assert a == pytest.approx(b, abs=1e-9)


def test_spectrum_scan_replicas():
    ks = np.linspace(-np.pi, np.pi, 4, endpoint=False)
    rows = spectrum_scan(P0, ks, P=10, q_display=1)
    assert len(rows) == 4 * 2 * 3
    by_q = {}
    for r in rows:
        by_q.setdefault((r["k"], r["band_index"]), {})[r["replica_q"]] = r["quasienergy"]
    for vals in by_q.values():
        assert vals[1] == pytest.approx(vals[0] - P0.omega, abs=1e-12)
        assert vals[-1] == pytest.approx(vals[0] + P0.omega, abs=1e-12)


def test_pi_gap_closure_located_by_bisection():
    # at A = 3 the edge gap closes where the k=0 quasienergy hits omega/2
    params_at = lambda w: ModelParams(1.0, 1.5, 3.0, w)
    ks = np.linspace(-np.pi, np.pi, 32, endpoint=False)

    def edge_gap(w):
        return gap_minima(params_at(w), ks, P=12)[1]

    lo, hi = 4.6, 5.4
    assert edge_gap(lo) > 0.1 and edge_gap(hi) > 0.1
    for _ in range(25):
        mid = 0.5 * (lo + hi)
        if edge_gap(mid) < 1e-6:
            break
        # the gap grows away from the closure on both sides; walk the slope
        if edge_gap(mid - 1e-3) < edge_gap(mid + 1e-3):
            hi = mid
        else:
            lo = mid
    else:
        mid = 0.5 * (lo + hi)
    assert edge_gap(mid) < 1e-3
    assert mid == pytest.approx(5.0, abs=1e-2)


def test_folding_consistency():
    # every well-converged extended eigenvalue folds onto a principal
    # quasienergy; replicas near the truncation edge drift and are excluded
    from floquet_ssh.extended import _edge_weight

    P = 12
    ext = build_extended(P0, 0.9, P)
    evals, evecs = np.linalg.eigh(ext.matrix)
    principal = [p.quasienergy for p in quasienergies(P0, 0.9, P)]
    checked = 0
    for i, e in enumerate(evals):
        comp = evecs[:, i].reshape(2 * P + 1, 2)
        if _edge_weight(comp) >= 1e-5:
            continue
        folded, _ = fold_quasienergy(e, P0.omega)
        assert min(abs(folded - q) for q in principal) < 1e-9
        checked += 1
    assert checked >= 30   # most of the 2(2P+1) spectrum is well converged


def test_convergence_check_static():
    params = ModelParams(1.0, 1.5, 0.0, 5.5)
    assert convergence_check(params, 0.3, 8)["max_drift"] < 1e-12


def test_convergence_check_default_regime():
    assert convergence_check(P0, 0.0, 10)["max_drift"] < 1e-10


def test_truncation_escalation_strong_drive():
    # strong low-frequency drive needs a bigger sideband window
    params = ModelParams(1.0, 1.5, 3.0, 2.0)
    P = resolve_truncation(params, 0.5, P=10, drift_tol=1e-10)
    assert P >= 10
    assert convergence_check(params, 0.5, P)["max_drift"] < 1e-10
