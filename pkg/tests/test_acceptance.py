"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines inline.
"""

import time

import numpy as np
import pytest

from floquet_ssh.extended import TruncationError, gap_minima, quasienergies
from floquet_ssh.model import ModelParams
from floquet_ssh.perturbation import (
    com_terms,
    first_order_extended,
    heisenberg_identity_check,
    orthogonality_deficit,
)
from floquet_ssh.propagator import evolve_grid
from floquet_ssh.topology import (
    TopologyError,
    band_stacks,
    gap_invariants,
    winding_from_stacks,
)
from floquet_ssh.wavepacket import WavePacketSpec, evolve_momentum_space, evolve_real_space

J1, J2 = 1.0, 1.5


def report(name: str, passed: bool, detail: str) -> None:
    print(f"[ACCEPTANCE] {name}: {'PASS' if passed else 'FAIL'} ({detail})")


def _invariants(amp, omega, kgrid=256, P=12, steps=1000):
    return gap_invariants(ModelParams(J1, J2, amp, omega), kgrid_size=kgrid, P=P, steps=steps)


def _bisect_invariant_change(value_of, lo, hi, iterations=14):
    """Bisect on an integer-valued function; probes nudged off exact boundaries."""
    v_lo, v_hi = value_of(lo), value_of(hi)
    assert v_lo != v_hi, "no invariant change inside the bracket"
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        try:
            v_mid = value_of(mid)
        except (TopologyError, TruncationError):
            mid += 1e-5 * (hi - lo)
            v_mid = value_of(mid)
        if v_mid == v_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_high_frequency_invariants():
    start = time.perf_counter()
    rep = _invariants(1.0, 20.0, kgrid=512, P=10, steps=2000)
    elapsed = time.perf_counter() - start
    ok = (rep.nu0, rep.nupi) == (1, 0) and elapsed < 10.0
    report(
        "high-frequency invariants",
        ok,
        f"(nu0, nupi) = ({rep.nu0}, {rep.nupi}), runtime {elapsed:.1f}s",
    )
    assert (rep.nu0, rep.nupi) == (1, 0)
    assert elapsed < 10.0


def test_pi_gap_transition():
    start = time.perf_counter()

    def nupi(w):
        return _invariants(3.0, w).nupi

    w_star = _bisect_invariant_change(nupi, 4.5, 5.5)
    below = _invariants(3.0, w_star - 0.2, kgrid=512)
    above = _invariants(3.0, w_star + 0.2, kgrid=512)
    gap_at_boundary = gap_minima(
        ModelParams(J1, J2, 3.0, w_star + 1e-3),
        np.linspace(-np.pi, np.pi, 512, endpoint=False),
        P=12,
    )[1]
    elapsed = time.perf_counter() - start
    ok = (
        (below.nupi, above.nupi) == (1, 0)
        and below.nu0 == above.nu0 == 1
        and gap_at_boundary < 0.05
        and elapsed < 120.0
    )
    report(
        "pi-gap transition at A=3",
        ok,
        f"omega* = {w_star:.4f}, nupi {above.nupi} -> {below.nupi}, nu0 = {below.nu0}, "
        f"edge gap at boundary {gap_at_boundary:.2e}, runtime {elapsed:.0f}s",
    )
    assert (below.nupi, above.nupi) == (1, 0)
    assert below.nu0 == above.nu0 == 1
    assert gap_at_boundary < 0.05
    assert elapsed < 120.0


def test_zero_gap_transition():
    start = time.perf_counter()

    def nu0(amp):
        return _invariants(amp, 6.0, P=14).nu0

    a_star = _bisect_invariant_change(nu0, 6.5, 7.5)
    below = _invariants(a_star - 0.2, 6.0, kgrid=512, P=14)
    above = _invariants(a_star + 0.2, 6.0, kgrid=512, P=14)
    gap_at_boundary = gap_minima(
        ModelParams(J1, J2, a_star + 1e-3, 6.0),
        np.linspace(-np.pi, np.pi, 512, endpoint=False),
        P=14,
    )[0]
    elapsed = time.perf_counter() - start
    ok = (
        (below.nu0, above.nu0) == (1, -1)
        and below.nupi == above.nupi == 0
        and gap_at_boundary < 0.05
        and elapsed < 120.0
    )
    report(
        "0-gap transition at omega=6",
        ok,
        f"A* = {a_star:.4f}, nu0 {below.nu0} -> {above.nu0}, nupi = {below.nupi}, "
        f"center gap at boundary {gap_at_boundary:.2e}, runtime {elapsed:.0f}s",
    )
    assert (below.nu0, above.nu0) == (1, -1)
    assert below.nupi == above.nupi == 0
    assert gap_at_boundary < 0.05
    assert elapsed < 120.0


def test_band_invariant_differences():
    params = ModelParams(J1, J2, 1.0, 20.0)
    stacks = band_stacks(params, kgrid_size=512, P=10)
    state = winding_from_stacks(stacks, "floquet-state")
    extended = winding_from_stacks(stacks, "extended-term")
    routes_agree = (state["lower"], state["upper"]) == (extended["lower"], extended["upper"])
    ok = routes_agree and state["upper"] == -1 and state["lower"] == 1
    report(
        "band-invariant differences",
        ok,
        f"upper (nu_0pi) = {state['upper']}, lower (nu_pi0) = {state['lower']}, "
        f"routes agree: {routes_agree}",
    )
    assert routes_agree
    assert state["upper"] == -1   # nu_pi - nu_0
    assert state["lower"] == +1   # nu_0 - nu_pi


def test_com_perturbative_agreement():
    start = time.perf_counter()
    params = ModelParams(J1, J2, 1.0, 5.5)
    spec = WavePacketSpec(width=10.0, cells=400, duration=25.0, dt=params.period / 40.0)
    traj = evolve_momentum_space(spec, params, steps_per_period=2000)
    deviation = float(np.max(np.abs(traj.x_exact - traj.x_first_order)))

    signal = traj.x_exact - np.mean(traj.x_exact)
    freqs = 2 * np.pi * np.fft.rfftfreq(traj.times.size, d=spec.dt)
    spectrum = np.abs(np.fft.rfft(signal))
    dominant = freqs[1 + int(np.argmax(spectrum[1:]))]
    bin_width = freqs[1]
    elapsed = time.perf_counter() - start

    freq_ok = abs(dominant - 0.5) <= bin_width
    ok = deviation < 0.1 and freq_ok and elapsed < 30.0
    report(
        "CoM perturbative agreement",
        ok,
        f"max|x_exact - x_first_order| = {deviation:.4f} cells, dominant frequency "
        f"{dominant:.4f} (bin {bin_width:.4f}), runtime {elapsed:.0f}s",
    )
    assert freq_ok
    assert elapsed < 30.0
    assert deviation < 0.1


def test_dual_path_oracle():
    params = ModelParams(J1, J2, 1.0, 5.5)
    spec = WavePacketSpec(width=10.0, cells=400, duration=25.0, dt=params.period / 40.0)
    mom = evolve_momentum_space(spec, params)
    real = evolve_real_space(spec, params)
    deviation = float(np.max(np.abs(mom.x_exact - real.x_exact)))
    drift = float(max(np.max(np.abs(mom.norm - 1)), np.max(np.abs(real.norm - 1))))
    ok = deviation < 1e-6 and drift < 1e-10
    report("dual-path oracle", ok, f"CoM mismatch {deviation:.2e} cells, norm drift {drift:.2e}")
    assert deviation < 1e-6
    assert drift < 1e-10


def test_quasienergy_cross_check():
    worst = 0.0
    for amp, omega in ((1.0, 5.5), (3.0, 6.0)):
        params = ModelParams(J1, J2, amp, omega)
        ks = np.linspace(-np.pi, np.pi, 64, endpoint=False)
        us = evolve_grid(params, ks, 0.0, params.period, 4000)
        for k, u in zip(ks, us):
            phases = np.sort(-np.angle(np.linalg.eigvals(u)) / params.period)
            qe = np.sort([p.quasienergy for p in quasienergies(params, float(k), 12)])
            worst = max(worst, float(np.max(np.abs(phases - qe))))
    ok = worst < 1e-8
    report("quasienergy cross-check", ok, f"worst mismatch {worst:.2e} over 2x64 k-points")
    assert worst < 1e-8


def test_heisenberg_identity_and_orthogonality():
    params = ModelParams(J1, J2, 1.0, 5.5)
    residual = heisenberg_identity_check(params, 0.0, bands=(0, 1), shifts=(0, 0), P=12)[
        "residual"
    ]
    amps = (0.05, 0.1, 0.2)
    worst = [
        max(orthogonality_deficit(first_order_extended(ModelParams(J1, J2, a, 5.5), 0.7)).values())
        for a in amps
    ]
    slope = float(np.polyfit(np.log(amps), np.log(worst), 1)[0])
    ok = residual < 1e-8 and abs(slope - 2.0) <= 0.2
    report(
        "Heisenberg identity",
        ok,
        f"residual {residual:.2e}, orthogonality-deficit slope {slope:.3f}",
    )
    assert residual < 1e-8
    assert slope == pytest.approx(2.0, abs=0.2)


def test_band_inversion_phase_shift():
    lf_below = com_terms(ModelParams(J1, J2, 1.0, 4.5)).amplitudes[1]
    lf_above = com_terms(ModelParams(J1, J2, 1.0, 5.5)).amplitudes[1]
    drifts = {}
    for omega in (4.5, 5.5):
        params = ModelParams(J1, J2, 1.0, omega)
        spec = WavePacketSpec(width=10.0, cells=400, duration=8.0, dt=params.period / 40.0)
        traj = evolve_momentum_space(spec, params, steps_per_period=1000)
        window = (traj.times > 2.0) & (traj.times < 8.0)
        drifts[omega] = float(np.mean(traj.x_exact[window]))
    ok = lf_below < 0 < lf_above and drifts[4.5] > 0 > drifts[5.5]
    report(
        "band-inversion phase shift",
        ok,
        f"LF prefactor {lf_below:+.3f} -> {lf_above:+.3f}; "
        f"mean drift {drifts[4.5]:+.3f} -> {drifts[5.5]:+.3f}",
    )
    assert lf_below < 0 < lf_above
    assert drifts[4.5] > 0 and drifts[5.5] < 0


def test_phase_boundary_properties():
    amps = [0.5, 2.0, 3.0, 5.0, 6.5, 8.0]
    omegas = [4.0, 4.5, 5.5, 6.0, 7.0]
    table = {}
    for a in amps:
        for w in omegas:
            rep = _invariants(a, w, kgrid=192, P=12, steps=800)
            table[(a, w)] = rep

    def boundary_gap(fixed, lo, hi, along, which_gap):
        # locate the invariant change inside (lo, hi) and measure the dipped
        # gap just off the boundary (exactly at it the folded levels collide)
        def value(x):
            rep = _invariants(x, fixed, P=12) if along == "amp" else _invariants(fixed, x, P=12)
            return (rep.nu0, rep.nupi)

        x_star = _bisect_invariant_change(value, lo, hi)
        ks = np.linspace(-np.pi, np.pi, 512, endpoint=False)
        span = hi - lo
        best = np.inf
        for offset in (1e-3, -1e-3, 5e-3, -5e-3):
            x = x_star + offset * span
            params = (
                ModelParams(J1, J2, x, fixed) if along == "amp" else ModelParams(J1, J2, fixed, x)
            )
            try:
                gaps = gap_minima(params, ks, P=14)
            except Exception:
                continue
            best = min(best, gaps[0 if which_gap == 0 else 1])
        return best

    # invariant changes between ok-status neighbors must come with a gap dip
    checked_changes = 0
    failures = []
    for i, a in enumerate(amps):
        for j, w in enumerate(omegas):
            here = table[(a, w)]
            if here.status != "ok":
                continue
            for (a2, w2), along in (
                ((amps[i + 1], w) if i + 1 < len(amps) else (None, None), "amp"),
                ((a, omegas[j + 1]) if j + 1 < len(omegas) else (None, None), "omega"),
            ):
                if a2 is None:
                    continue
                there = table[(a2, w2)]
                if there.status != "ok":
                    continue
                if (here.nu0, here.nupi) == (there.nu0, there.nupi):
                    continue
                checked_changes += 1
                which = 0 if here.nu0 != there.nu0 else "pi"
                if along == "amp":
                    dip = boundary_gap(w, a, a2, "amp", which)
                else:
                    dip = boundary_gap(a, w, w2, "omega", which)
                if dip >= 0.05:
                    failures.append(((a, w), (a2, w2), dip))

    # the two caption transitions are present in the sweep
    pi_change = table[(3.0, 4.5)].nupi == 1 and table[(3.0, 5.5)].nupi == 0
    zero_change = table[(6.5, 6.0)].nu0 == 1 and table[(8.0, 6.0)].nu0 == -1
    ok = not failures and checked_changes >= 2 and pi_change and zero_change
    report(
        "phase-boundary properties",
        ok,
        f"{checked_changes} invariant changes all bracketed by gap dips "
        f"(failures: {failures}); pi-arrow present: {pi_change}, 0-arrow present: {zero_change}",
    )
    assert not failures
    assert checked_changes >= 2
    assert pi_change and zero_change
