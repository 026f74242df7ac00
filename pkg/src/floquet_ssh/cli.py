"""Command-line front end.

Dispatches the computations, writes CSV/JSON artifacts plus a manifest
recording the fully resolved configuration, and runs the cross-module
validation suite.  Exit codes: 0 success, 2 config error, 3 numerical
failure (with a machine-readable error.json naming the failing module).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .extended import TruncationError, quasienergies, spectrum_scan
from .io import COMMANDS, ConfigError, parse_config_file, write_csv, write_json
from .model import ModelParams
from .perturbation import ResonanceError, com_terms, heisenberg_identity_check
from .propagator import evolve_grid, floquet_operator
from .topology import TopologyError, band_winding, gap_invariants, phase_diagram
from .wavepacket import (
    BoundaryLeakError,
    WavePacketSpec,
    density_map,
    evolve_momentum_space,
    evolve_real_space,
)

DEFAULTS = {
    "command": "validate",
    "j1": 1.0,
    "j2": 1.5,
    "amp": 1.0,
    "omega": 5.5,
    "width": 10.0,
    "k0": 0.0,
    "cells": 400,
    "duration": 25.0,
    "dt": None,              # resolved to period / 40
    "truncation": 10,
    "steps_per_period": 2000,
    "kgrid_size": 512,
    "q_display": 1,
    "closure_threshold": 0.05,
    "drift_tol": 1e-10,
    "amp_grid": [0.5, 1.0, 2.0, 3.0],
    "omega_grid": [4.5, 5.5, 6.5],
    "out": "out",
}

NUMERICAL_ERRORS = (TopologyError, TruncationError, ResonanceError, BoundaryLeakError)


def resolve_config(overrides: dict) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(overrides)
    if cfg["dt"] is None:
        cfg["dt"] = 2.0 * math.pi / cfg["omega"] / 40.0
    return cfg


def _model(cfg: dict) -> ModelParams:
    return ModelParams(j1=cfg["j1"], j2=cfg["j2"], amp=cfg["amp"], omega=cfg["omega"])


def _packet(cfg: dict) -> WavePacketSpec:
    return WavePacketSpec(
        width=cfg["width"],
        k0=cfg["k0"],
        cells=cfg["cells"],
        duration=cfg["duration"],
        dt=cfg["dt"],
    )


def _trajectory_rows(traj):
    for i in range(traj.times.size):
        yield (
            float(traj.times[i]),
            float(traj.x_exact[i]),
            float(traj.v_exact[i]),
            float(traj.norm[i]),
            float(traj.x_first_order[i]) if traj.x_first_order is not None else None,
            float(traj.x_lowfreq[i]) if traj.x_lowfreq is not None else None,
        )


TRAJECTORY_HEADER = ["t", "x_exact", "v_exact", "norm", "x_first_order", "x_lowfreq"]


def write_trajectory(outdir: Path, stem: str, params: ModelParams, spec: WavePacketSpec, cfg: dict) -> list[str]:
    traj = evolve_momentum_space(spec, params, steps_per_period=cfg["steps_per_period"])
    csv_name = f"{stem}.csv"
    write_csv(outdir / csv_name, TRAJECTORY_HEADER, _trajectory_rows(traj))
    artifacts = [csv_name]
    try:
        terms = com_terms(params)
    except ResonanceError:
        terms = None
    if terms is not None:
        side = f"{stem}_comterms.json"
        write_json(outdir / side, terms.as_dict())
        artifacts.append(side)
    return artifacts


def cmd_spectrum(cfg: dict, outdir: Path) -> list[str]:
    params = _model(cfg)
    ks = np.linspace(-math.pi, math.pi, cfg["kgrid_size"], endpoint=False)
    rows = spectrum_scan(params, ks, P=cfg["truncation"], q_display=cfg["q_display"])
    write_csv(
        outdir / "spectrum.csv",
        ["k", "band_index", "quasienergy", "replica_q"],
        ((r["k"], r["band_index"], r["quasienergy"], r["replica_q"]) for r in rows),
    )
    return ["spectrum.csv"]


def cmd_trajectory(cfg: dict, outdir: Path) -> list[str]:
    return write_trajectory(outdir, "trajectory", _model(cfg), _packet(cfg), cfg)


def cmd_density(cfg: dict, outdir: Path) -> list[str]:
    params = _model(cfg)
    profile = density_map(_packet(cfg), params, steps_per_period=cfg["steps_per_period"])
    rows = (
        (float(profile.times[m]), cell, float(profile.density[m, cell]))
        for m in range(profile.times.size)
        for cell in range(profile.density.shape[1])
    )
    write_csv(outdir / "density.csv", ["t", "cell", "rho"], rows)
    return ["density.csv"]


def cmd_invariants(cfg: dict, outdir: Path) -> list[str]:
    report = gap_invariants(
        _model(cfg),
        kgrid_size=cfg["kgrid_size"],
        P=cfg["truncation"],
        steps=cfg["steps_per_period"],
        closure_threshold=cfg["closure_threshold"],
    )
    write_json(outdir / "invariants.json", report.as_dict())
    return ["invariants.json"]


PHASE_HEADER = ["A", "omega", "nu0", "nupi", "gap0", "gappi", "status"]


def cmd_phase_diagram(cfg: dict, outdir: Path, workers: int = 1) -> list[str]:
    diagram = phase_diagram(
        _model(cfg),
        cfg["amp_grid"],
        cfg["omega_grid"],
        kgrid_size=cfg["kgrid_size"],
        P=cfg["truncation"],
        steps=cfg["steps_per_period"],
        closure_threshold=cfg["closure_threshold"],
        workers=workers,
    )
    rows = []
    for point in diagram.points:
        rep = point["report"]
        rows.append(
            (point["amp"], point["omega"], rep.nu0, rep.nupi, rep.gap0, rep.gappi, rep.status)
        )
    write_csv(outdir / "phase_diagram.csv", PHASE_HEADER, rows)
    return ["phase_diagram.csv"]


def cmd_validate(cfg: dict, outdir: Path) -> list[str]:
    """Cross-module property suite; raises on hard numerical errors."""
    params = _model(cfg)
    checks = []

    # two routes to the quasienergies
    worst = 0.0
    for k in np.linspace(-math.pi, math.pi, 16, endpoint=False):
        U = floquet_operator(params, k, steps=4000).matrix
        phases = np.sort(-np.angle(np.linalg.eigvals(U)) / params.period)
        qe = np.sort([p.quasienergy for p in quasienergies(params, k, P=12)])
        worst = max(worst, float(np.max(np.abs(phases - qe))))
    checks.append(("quasienergy_cross_check", worst, worst < 1e-8))

    # dual-path wave packet
    spec = WavePacketSpec(width=10.0, cells=400, duration=5.0, dt=cfg["dt"])
    mom = evolve_momentum_space(spec, params, steps_per_period=cfg["steps_per_period"])
    real = evolve_real_space(spec, params, steps_per_period=cfg["steps_per_period"])
    dev = float(np.max(np.abs(mom.x_exact - real.x_exact)))
    checks.append(("dual_path_com", dev, dev < 1e-6))
    drift = float(max(np.max(np.abs(mom.norm - 1)), np.max(np.abs(real.norm - 1))))
    checks.append(("norm_drift", drift, drift < 1e-10))

    # winding route equivalence
    wa = band_winding(params, kgrid_size=256, route="floquet-state", P=cfg["truncation"])
    wb = band_winding(params, kgrid_size=256, route="extended-term", P=cfg["truncation"])
    agree = wa["lower"] == wb["lower"] and wa["upper"] == wb["upper"]
    checks.append(("winding_route_equivalence", f"{wa['lower']},{wa['upper']}", agree))

    # Heisenberg identity on the principal pair
    res = heisenberg_identity_check(params, k=0.0, P=12)["residual"]
    checks.append(("heisenberg_identity", res, res < 1e-8))

    # integrator convergence under step doubling
    ks = np.linspace(-math.pi, math.pi, 8, endpoint=False)
    u1 = evolve_grid(params, ks, 0.0, params.period, 250)
    u2 = evolve_grid(params, ks, 0.0, params.period, 500)
    u4 = evolve_grid(params, ks, 0.0, params.period, 1000)
    e1 = float(np.max(np.linalg.norm(u1 - u4, axis=(1, 2))))
    e2 = float(np.max(np.linalg.norm(u2 - u4, axis=(1, 2))))
    factor = e1 / e2 if e2 > 0 else math.inf
    checks.append(("step_doubling_factor", factor, factor > 8.0))

    payload = {
        "params": params.as_dict(),
        "checks": [{"name": n, "value": v, "passed": bool(p)} for n, v, p in checks],
        "all_passed": all(p for _, _, p in checks),
    }
    write_json(outdir / "validate.json", payload)
    for name, value, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {value}")
    if not payload["all_passed"]:
        raise RuntimeError("validation suite failed; see validate.json")
    return ["validate.json"]


def reproduce_figures(cfg: dict, outdir: Path, workers: int = 1) -> list[str]:
    """Artifact set for the three reference figures (parameters from the captions)."""
    artifacts = []
    j1, j2 = cfg["j1"], cfg["j2"]

    # phase diagram sweep covering both transition arrows (A=3 in omega, omega=6 in A)
    sweep = dict(cfg)
    sweep["amp_grid"] = [0.5, 1.25, 2.0, 2.75, 3.0, 3.5, 4.25, 5.0, 5.75, 6.5, 7.25, 8.0]
    sweep["omega_grid"] = [4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0]
    sweep["kgrid_size"] = 256
    sweep["steps_per_period"] = 1000
    diagram = phase_diagram(
        _model(sweep),
        sweep["amp_grid"],
        sweep["omega_grid"],
        kgrid_size=sweep["kgrid_size"],
        P=sweep["truncation"],
        steps=sweep["steps_per_period"],
        closure_threshold=sweep["closure_threshold"],
        workers=workers,
    )
    rows = [
        (pt["amp"], pt["omega"], pt["report"].nu0, pt["report"].nupi,
         pt["report"].gap0, pt["report"].gappi, pt["report"].status)
        for pt in diagram.points
    ]
    write_csv(outdir / "fig1_phase_diagram.csv", PHASE_HEADER, rows)
    artifacts.append("fig1_phase_diagram.csv")

    # CoM trajectories and density maps at omega = 5.5, d = 10, A in {1, 3}
    for amp, tag in ((1.0, "fig2a"), (3.0, "fig2b")):
        params = ModelParams(j1=j1, j2=j2, amp=amp, omega=5.5)
        spec = WavePacketSpec(width=10.0, cells=400, duration=25.0, dt=params.period / 40.0)
        artifacts += write_trajectory(outdir, f"{tag}_trajectory", params, spec, cfg)
    for amp, tag in ((1.0, "fig2c"), (3.0, "fig2d")):
        params = ModelParams(j1=j1, j2=j2, amp=amp, omega=5.5)
        spec = WavePacketSpec(width=10.0, cells=400, duration=25.0, dt=params.period / 40.0)
        profile = density_map(spec, params, steps_per_period=cfg["steps_per_period"])
        name = f"{tag}_density.csv"
        write_csv(
            outdir / name,
            ["t", "cell", "rho"],
            (
                (float(profile.times[m]), cell, float(profile.density[m, cell]))
                for m in range(profile.times.size)
                for cell in range(profile.density.shape[1])
            ),
        )
        artifacts.append(name)

    # quasienergy spectrum at the pi-gap inversion regime
    params = ModelParams(j1=j1, j2=j2, amp=3.0, omega=5.0)
    ks = np.linspace(-math.pi, math.pi, 257, endpoint=False)
    rows = spectrum_scan(params, ks, P=cfg["truncation"], q_display=1)
    write_csv(
        outdir / "fig3a_spectrum.csv",
        ["k", "band_index", "quasienergy", "replica_q"],
        ((r["k"], r["band_index"], r["quasienergy"], r["replica_q"]) for r in rows),
    )
    artifacts.append("fig3a_spectrum.csv")

    # trajectories across the frequency-induced transition (A = 3, k0 = 0)
    for omega in (4.5, 5.5):
        params = ModelParams(j1=j1, j2=j2, amp=3.0, omega=omega)
        spec = WavePacketSpec(width=10.0, cells=400, duration=25.0, dt=params.period / 40.0)
        artifacts += write_trajectory(
            outdir, f"fig3b_omega{omega:g}_trajectory", params, spec, cfg
        )

    # trajectories across the amplitude-induced transition (omega = 6, k0 = arccos(J1/J2))
    k0 = math.acos(j1 / j2)
    for amp in (6.5, 7.5):
        params = ModelParams(j1=j1, j2=j2, amp=amp, omega=6.0)
        spec = WavePacketSpec(width=10.0, cells=400, duration=25.0, dt=params.period / 40.0, k0=k0)
        artifacts += write_trajectory(outdir, f"fig3c_amp{amp:g}_trajectory", params, spec, cfg)

    return artifacts


DISPATCH = {
    "spectrum": cmd_spectrum,
    "trajectory": cmd_trajectory,
    "density": cmd_density,
    "invariants": cmd_invariants,
}


def run(cfg: dict, workers: int = 1) -> int:
    """Execute the resolved config; returns the process exit status."""
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    command = cfg["command"]
    try:
        if command in DISPATCH:
            artifacts = DISPATCH[command](cfg, outdir)
        elif command == "phase-diagram":
            artifacts = cmd_phase_diagram(cfg, outdir, workers=workers)
        elif command == "validate":
            artifacts = cmd_validate(cfg, outdir)
        elif command == "reproduce-figures":
            artifacts = reproduce_figures(cfg, outdir, workers=workers)
        else:
            raise ConfigError(f"unknown command {command!r}")
    except NUMERICAL_ERRORS as exc:
        write_json(
            outdir / "error.json",
            {
                "module": type(exc).__module__.rsplit(".", 1)[-1],
                "error": type(exc).__name__,
                "message": str(exc),
                "config": {k: cfg[k] for k in sorted(cfg)},
            },
        )
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    manifest = {
        "version": __version__,
        "command": command,
        "workers": workers,
        "config": {k: cfg[k] for k in sorted(cfg)},
        "artifacts": sorted(artifacts),
    }
    write_json(outdir / "manifest.json", manifest)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="floquet-ssh",
        description="Quasienergy spectra, wave-packet dynamics, and gap invariants "
        "of the periodically driven SSH chain.",
    )
    parser.add_argument("--config", type=Path, help="key=value config file")
    parser.add_argument("--out", type=Path, help="output directory (overrides config)")
    parser.add_argument("--workers", type=int, default=1, help="worker pool size for sweeps")
    parser.add_argument("--command", choices=COMMANDS, help="command (overrides config)")
    args = parser.parse_args(argv)

    try:
        overrides = parse_config_file(args.config) if args.config else {}
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command:
        overrides["command"] = args.command
    if args.out:
        overrides["out"] = str(args.out)
    try:
        cfg = resolve_config(overrides)
        _ = _model(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg, workers=max(1, args.workers))


if __name__ == "__main__":
    sys.exit(main())
