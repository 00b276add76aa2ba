"""Figure rendering for the CLI commands.

All figures are rendered with the Agg backend and written as SVG next to
the CSV files they illustrate.  CSV remains the authoritative output; these
are conveniences for eyeballing a run.  Dates are stripped and the hash
salt pinned so re-renders of the same data are stable.
"""

from __future__ import annotations

import math

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

matplotlib.rcParams["svg.hashsalt"] = "slipgen"
matplotlib.rcParams["figure.max_open_warning"] = 0

_META = {"Date": None}


def _save(fig, path):
    fig.savefig(path, metadata=_META)
    plt.close(fig)


def plot_eigenvalues(eigenvalues, path, title=""):
    """Spectrum on log-log axes with a 1/k^2 guide line."""
    lam = np.asarray(eigenvalues, dtype=float)
    k = np.arange(1, lam.size)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(k, lam[1:], "o", ms=3, label="eigenvalues")
    if lam.size > 3 and lam[3] > 0:
        ax.loglog(k, lam[3] * 9.0 / k**2, "k--", lw=1, label=r"$\propto 1/k^2$")
    ax.set_xlabel("mode k")
    ax.set_ylabel("eigenvalue")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)


def plot_mode_1d(fault, values, k, path, taper=None):
    """One eigenmode along the down-dip coordinate, with the taper for scale."""
    x = fault.centroids()[:, 0] / 1e3
    fig, ax = plt.subplots(figsize=(5, 3))
    if taper is not None:
        t = np.asarray(taper, dtype=float)
        scale = np.max(np.abs(values)) / max(t.max(), 1e-30)
        ax.plot(x, t * scale, "k--", lw=1, label="taper (scaled)")
    ax.plot(x, values, lw=1.5, label="mode %d" % k)
    ax.axhline(0.0, color="0.8", lw=0.5)
    ax.set_xlabel("surface x (km)")
    ax.set_ylabel("component")
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)


def plot_mode_2d(fault, values, k, path):
    """One eigenmode as a colored patch scatter (positive/negative diverging)."""
    c = fault.centroids()
    v = np.asarray(values, dtype=float)
    vmax = np.max(np.abs(v))
    fig, ax = plt.subplots(figsize=(5, 5))
    sc = ax.scatter(c[:, 0] / 1e3, c[:, 1] / 1e3, c=v, s=18, cmap="PiYG",
                    vmin=-vmax, vmax=vmax, marker="s")
    fig.colorbar(sc, ax=ax, label="mode %d" % k)
    ax.set_xlabel("x (km)")
    ax.set_ylabel("y (km)")
    ax.set_aspect("equal")
    fig.tight_layout()
    _save(fig, path)


def plot_slip_deform_1d(fault, grid, slips, deforms, path, draw_label=""):
    """Slip (left) and deformation (right) curves, one line per truncation."""
    xs = fault.centroids()[:, 0] / 1e3
    xg = grid.x / 1e3
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3))
    for m in sorted(slips):
        ax1.plot(xs, slips[m], lw=1.2, label="m=%d" % m)
        ax2.plot(xg, deforms[m], lw=1.2, label="m=%d" % m)
    ax1.set_xlabel("surface x (km)")
    ax1.set_ylabel("slip (m)")
    ax2.set_xlabel("surface x (km)")
    ax2.set_ylabel("dz (m)")
    ax1.legend(frameon=False, fontsize=8)
    if draw_label:
        ax1.set_title(draw_label, fontsize=9)
    fig.tight_layout()
    _save(fig, path)


def plot_slip_deform_2d(fault, grid, slips, deforms, path, draw_label=""):
    """Slip scatter (top row) and deformation mesh (bottom row) per truncation."""
    ms = sorted(slips)
    c = fault.centroids()
    fig, axes = plt.subplots(2, len(ms), figsize=(4.2 * len(ms), 7.5), squeeze=False)
    smax = max(np.max(np.abs(slips[m])) for m in ms)
    dmax = max(np.max(np.abs(deforms[m])) for m in ms)
    for j, m in enumerate(ms):
        ax = axes[0][j]
        sc = ax.scatter(c[:, 0] / 1e3, c[:, 1] / 1e3, c=slips[m], s=10, cmap="viridis",
                        vmin=0.0, vmax=smax, marker="s")
        ax.set_title("slip, m=%d" % m, fontsize=9)
        ax.set_aspect("equal")
        fig.colorbar(sc, ax=ax, shrink=0.8)
        ax = axes[1][j]
        zz = deforms[m].reshape(grid.ny, grid.nx)
        xx = grid.x.reshape(grid.ny, grid.nx) / 1e3
        yy = grid.y.reshape(grid.ny, grid.nx) / 1e3
        pm = ax.pcolormesh(xx, yy, zz, cmap="RdBu_r", vmin=-dmax, vmax=dmax)
        ax.set_title("dz, m=%d" % m, fontsize=9)
        ax.set_aspect("equal")
        fig.colorbar(pm, ax=ax, shrink=0.8)
    if draw_label:
        fig.suptitle(draw_label, fontsize=10)
    fig.tight_layout()
    _save(fig, path)


def plot_densities(curves, path, xlabel, exact=None):
    """Overlaid density estimates; ``curves`` is [(label, x, y), ...]."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, x, y in curves:
        ax.plot(x, y, lw=1.3, label=label)
    if exact is not None:
        ax.plot(exact[0], exact[1], "k:", lw=1.8, label="exact")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_joint(grid_pair, values, path, xlabel, ylabel, title=""):
    """Filled contours of a joint density estimate."""
    gx, gy = grid_pair
    fig, ax = plt.subplots(figsize=(4.5, 4))
    cs = ax.contourf(gx, gy, np.asarray(values).T, levels=12, cmap="magma")
    fig.colorbar(cs, ax=ax, label="density")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    _save(fig, path)


def plot_hazard(curves, path, xlabel="depth proxy level (m)"):
    """Hazard curves, one per truncation; ``curves`` is [(label, levels, probs), ...]."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, lev, prob in curves:
        ax.plot(lev, prob, lw=1.3, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("exceedance probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_extreme_scatter(rows, path, title=""):
    """Extreme-event coefficients in the z1-z2 plane over unit-normal contours."""
    fig, ax = plt.subplots(figsize=(4.5, 4))
    t = np.linspace(0.0, 2.0 * math.pi, 200)
    for r in (1.0, 2.0, 3.0):
        ax.plot(r * np.cos(t), r * np.sin(t), color="0.75", lw=0.8)
    rows = np.asarray(rows, dtype=float)
    if rows.size:
        ax.plot(rows[:, 0], rows[:, 1], "r.", ms=3)
    ax.set_xlabel(r"$z_1$")
    ax.set_ylabel(r"$z_2$")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    _save(fig, path)
