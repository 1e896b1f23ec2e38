"""Figure rendering for the report path of the CLI.

Each renderer takes the tidy rows already destined for CSV and draws the
matching overview plot; files are written next to the delimited output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

DPI = 150


def _finish(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_error_vs_segments(rows, threshold_pct: float | None, path: Path) -> None:
    """Per-run relative-error traces against segment count, log scale."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    by_run: dict[int, list] = {}
    for run, segments, eta in rows:
        if eta is not None:
            by_run.setdefault(run, []).append((segments, eta))
    for run, pts in sorted(by_run.items()):
        pts.sort()
        ax.plot(*zip(*pts), marker="o", ms=2.5, lw=0.8, alpha=0.7)
    if threshold_pct is not None:
        ax.axhspan(0, threshold_pct, color="pink", alpha=0.4)
    ax.set_yscale("log")
    ax.set_xlabel("number of segments")
    ax.set_ylabel(r"relative error $\eta_{\rm err}$ [%]")
    _finish(fig, path)


def render_pulse_profile(rows, path: Path) -> None:
    """Final piecewise-linear drive profile of each run (best run opaque)."""
    fig, (ax_om, ax_de) = plt.subplots(2, 1, sharex=True, figsize=(5.0, 4.2))
    by_run: dict[int, list] = {}
    for run, t_ns, omega, delta in rows:
        by_run.setdefault(run, []).append((t_ns, omega, delta))
    for run, pts in sorted(by_run.items()):
        pts.sort()
        t = [p[0] / 1000.0 for p in pts]
        ax_om.plot(t, [p[1] for p in pts], marker=".", ms=3, lw=1.0, alpha=0.8)
        ax_de.plot(t, [p[2] for p in pts], marker=".", ms=3, lw=1.0, alpha=0.8)
    ax_om.set_ylabel(r"$\Omega(t)$ [rad/$\mu$s]")
    ax_de.set_ylabel(r"$\Delta(t)$ [rad/$\mu$s]")
    ax_de.set_xlabel(r"$t$ [$\mu$s]")
    _finish(fig, path)


def render_correlators(rows, path: Path) -> None:
    """Spin correlators of the optimized state against the exact curves."""
    axes_present = sorted({axis for _, axis, _, _, _ in rows})
    fig, axs = plt.subplots(1, len(axes_present), figsize=(3.2 * len(axes_present), 3.2), squeeze=False)
    for ax, axis in zip(axs[0], axes_present):
        pts = sorted((r, v, o) for run, a, r, v, o in rows if a == axis)
        rs = [p[0] for p in pts]
        ax.plot(rs, [p[2] for p in pts], "k-", lw=1.2, label="exact")
        ax.plot(rs, [p[1] for p in pts], "o", ms=4, label="optimized")
        ax.set_xlabel("separation r")
        ax.set_ylabel(f"<{axis.upper()}_1 {axis.upper()}_(1+r)>")
        ax.legend(fontsize=8)
    _finish(fig, path)


def render_radius_vs_segments(rows, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    by_run: dict[int, list] = {}
    for run, segments, radius in rows:
        by_run.setdefault(run, []).append((segments, radius))
    for run, pts in sorted(by_run.items()):
        pts.sort()
        ax.plot(*zip(*pts), marker="o", ms=2.5, lw=0.8, alpha=0.8)
    ax.set_xlabel("number of segments")
    ax.set_ylabel(r"optimized radius $R$ [$\mu$m]")
    _finish(fig, path)


def render_iterations(rows, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    by_run: dict[int, list] = {}
    for run, segments, _, cumulative in rows:
        by_run.setdefault(run, []).append((segments, cumulative))
    for run, pts in sorted(by_run.items()):
        pts.sort()
        ax.plot(*zip(*pts), marker="o", ms=2.5, lw=0.8, alpha=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("number of segments")
    ax.set_ylabel("cumulative optimizer iterations")
    _finish(fig, path)
