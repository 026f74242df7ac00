"""Render figures from the solver's CSV artifacts.

The renderer never imports the solver; the interface is the files.  Four
figure kinds are supported: phase-diagram heatmaps, CoM trajectories with
the analytic overlays (exact solid, first-order dashed, low-frequency
dot-dashed), space-time density maps, and quasienergy spectra with
replica bands dimmed.  Axis labels use the solver's units (time in 1/J1,
length in lattice cells, energies in J1).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("phase-diagram", "trajectory", "density", "spectrum")

SCHEMAS = {
    "phase-diagram": ["A", "omega", "nu0", "nupi", "gap0", "gappi", "status"],
    "trajectory": ["t", "x_exact", "v_exact", "norm", "x_first_order", "x_lowfreq"],
    "density": ["t", "cell", "rho"],
    "spectrum": ["k", "band_index", "quasienergy", "replica_q"],
}


class SchemaError(ValueError):
    """Input CSV does not match the schema of the requested figure kind."""


@dataclass(frozen=True)
class FigureJob:
    kind: str
    source: Path
    output: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def read_table(path: Path, kind: str) -> dict:
    """Read a CSV into columns, validating the header against the kind."""
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or len(rows) < 2:
        raise SchemaError(f"{path}: empty table")
    header = rows[0]
    if header != SCHEMAS[kind]:
        raise SchemaError(
            f"{path}: header {header} does not match the {kind!r} schema {SCHEMAS[kind]}"
        )
    columns = {name: [] for name in header}
    for row in rows[1:]:
        for name, cell in zip(header, row):
            columns[name].append(cell)
    return columns


def _floats(cells, allow_blank=False):
    if allow_blank:
        return np.array([np.nan if c == "" else float(c) for c in cells])
    return np.array([float(c) for c in cells])


def _plot_trajectory(ax, cols, style):
    t = _floats(cols["t"])
    ax.plot(t, _floats(cols["x_exact"]), "-", color="C0", label="exact")
    first = _floats(cols["x_first_order"], allow_blank=True)
    if not np.all(np.isnan(first)):
        ax.plot(t, first, "--", color="C1", label="first order")
    low = _floats(cols["x_lowfreq"], allow_blank=True)
    if not np.all(np.isnan(low)):
        ax.plot(t, low, "-.", color="C2", label="low-frequency part")
    ax.set_xlabel(r"$t$ ($1/J_1$)")
    ax.set_ylabel(r"$\langle x \rangle$ (cells)")
    ax.legend(loc="best", frameon=False)


def _plot_density(ax, cols, style):
    t = _floats(cols["t"])
    cell = _floats(cols["cell"]).astype(int)
    rho = _floats(cols["rho"])
    times = np.unique(t)
    cells = np.unique(cell)
    grid = np.full((cells.size, times.size), np.nan)
    t_index = {v: i for i, v in enumerate(times)}
    c_index = {v: i for i, v in enumerate(cells)}
    for ti, ci, ri in zip(t, cell, rho):
        grid[c_index[ci], t_index[ti]] = ri
    mesh = ax.pcolormesh(times, cells, grid, shading="nearest", cmap="magma")
    ax.figure.colorbar(mesh, ax=ax, label=r"$\rho$")
    ax.set_xlabel(r"$t$ ($1/J_1$)")
    ax.set_ylabel("cell")
    pad = style.get("density_margin", 4.0)
    occupied = np.abs(grid) > 1e-6
    if occupied.any():
        lo = cells[occupied.any(axis=1)].min() - pad
        hi = cells[occupied.any(axis=1)].max() + pad
        ax.set_ylim(lo, hi)


def _plot_spectrum(ax, cols, style):
    k = _floats(cols["k"])
    band = _floats(cols["band_index"]).astype(int)
    eps = _floats(cols["quasienergy"])
    replica = _floats(cols["replica_q"]).astype(int)
    for b in np.unique(band):
        for q in np.unique(replica):
            sel = (band == b) & (replica == q)
            if not sel.any():
                continue
            order = np.argsort(k[sel])
            alpha = 1.0 if q == 0 else 0.25
            label = f"band {b}" if q == 0 else None
            ax.plot(k[sel][order], eps[sel][order], ".", ms=2.5, color=f"C{b}", alpha=alpha,
                    label=label)
    ax.set_xlabel(r"$k$")
    ax.set_ylabel(r"$\varepsilon$ ($J_1$)")
    ax.legend(loc="upper right", frameon=False)


def _plot_phase_diagram(fig, cols, style):
    amps = _floats(cols["A"])
    omegas = _floats(cols["omega"])
    a_vals = np.unique(amps)
    w_vals = np.unique(omegas)
    axes = fig.subplots(1, 2, sharex=True, sharey=True)
    for ax, name in zip(axes, ("nu0", "nupi")):
        grid = np.full((w_vals.size, a_vals.size), np.nan)
        for a, w, nu, status in zip(amps, omegas, cols[name], cols["status"]):
            if status != "ok" or nu in ("", "None"):
                continue
            grid[np.searchsorted(w_vals, w), np.searchsorted(a_vals, a)] = float(nu)
        mesh = ax.pcolormesh(
            a_vals, w_vals, grid, shading="nearest", cmap="coolwarm", vmin=-1.5, vmax=1.5
        )
        ax.set_xlabel(r"$A$ ($J_1$)")
        ax.set_title(r"$\nu_0$" if name == "nu0" else r"$\nu_\pi$")
    axes[0].set_ylabel(r"$\omega$ ($J_1$)")
    fig.colorbar(mesh, ax=list(axes), shrink=0.85)


def build_figure(job: FigureJob):
    """Validate the input and draw the figure; returns the matplotlib figure."""
    cols = read_table(job.source, job.kind)
    if job.kind == "phase-diagram":
        fig = plt.figure(figsize=(7.2, 3.2))
        _plot_phase_diagram(fig, cols, job.style)
        return fig
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    if job.kind == "trajectory":
        _plot_trajectory(ax, cols, job.style)
    elif job.kind == "density":
        _plot_density(ax, cols, job.style)
    else:
        _plot_spectrum(ax, cols, job.style)
    fig.tight_layout()
    return fig


def render(job: FigureJob) -> Path:
    """Render one job to its output path; no file is written on failure."""
    fig = build_figure(job)
    try:
        job.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(job.output, dpi=160)
    finally:
        plt.close(fig)
    return job.output


def _kind_of(name: str) -> str | None:
    if name.endswith("phase_diagram.csv"):
        return "phase-diagram"
    if name.endswith("_trajectory.csv") or name == "trajectory.csv":
        return "trajectory"
    if name.endswith("_density.csv") or name == "density.csv":
        return "density"
    if name.endswith("_spectrum.csv") or name == "spectrum.csv":
        return "spectrum"
    return None


def discover_jobs(indir: Path, outdir: Path, kind_filter: str | None = None) -> list[FigureJob]:
    """Map the artifact directory to figure jobs, via the manifest when present."""
    manifest = indir / "manifest.json"
    if manifest.exists():
        names = json.loads(manifest.read_text()).get("artifacts", [])
    else:
        names = sorted(p.name for p in indir.glob("*.csv"))
    jobs = []
    for name in names:
        kind = _kind_of(name)
        if kind is None or (kind_filter and kind != kind_filter):
            continue
        jobs.append(
            FigureJob(kind=kind, source=indir / name, output=outdir / (Path(name).stem + ".png"))
        )
    return jobs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-figures", description="Render figures from solver CSV artifacts."
    )
    parser.add_argument("--in", dest="indir", type=Path, required=True)
    parser.add_argument("--out", dest="outdir", type=Path, required=True)
    parser.add_argument("--kind", choices=KINDS, default=None)
    args = parser.parse_args(argv)

    jobs = discover_jobs(args.indir, args.outdir, args.kind)
    if not jobs:
        print(f"no renderable artifacts found in {args.indir}", file=sys.stderr)
        return 1
    status = 0
    for job in jobs:
        try:
            path = render(job)
        except (SchemaError, OSError, ValueError) as exc:
            print(f"error rendering {job.source.name}: {exc}", file=sys.stderr)
            status = 1
            continue
        print(f"wrote {path}")
    return status


if __name__ == "__main__":
    sys.exit(main())
