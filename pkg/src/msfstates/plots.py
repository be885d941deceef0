"""Figure rendering for the report paths (headless matplotlib)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

DPI = 130


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_levels(entries, path):
    """Splitting diagram: energy vs angular quantum number, one marker set
    per sector."""
    fig, ax = plt.subplots(figsize=(6.2, 4.6))
    for j, marker, color, label in ((0, "_", "tab:blue", "not enclosing (j=0)"),
                                    (1, "_", "tab:red", "enclosing (j=1)")):
        ls = [e.qn.l for e in entries if e.qn.j == j]
        es = [e.energy_hw for e in entries if e.qn.j == j]
        ax.scatter(ls, es, marker=marker, s=250, color=color, label=label,
                   linewidths=2)
    ax.set_xlabel("angular quantum number l")
    ax.set_ylabel(r"energy / $\hbar\omega$")
    ax.set_title("Level splitting by the flux-line mantissa")
    ax.legend(loc="upper left", fontsize=9)
    ax.grid(alpha=0.25)
    _save(fig, path)


def plot_orbit(rows, orbit, path):
    """Orbit projection on the transverse plane with the flux line marked."""
    xs = [r[1] for r in rows]
    ys = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(5.4, 5.4))
    ax.plot(xs, ys, color="tab:blue", lw=1.6, label="orbit")
    ax.plot([orbit.x0], [orbit.y0], "+", color="tab:blue", ms=10,
            label="orbit center")
    ax.plot([0], [0], "o", color="black", ms=6, label="flux line")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=9)
    ax.grid(alpha=0.25)
    _save(fig, path)


def plot_trajectory(traj_rows, overlay_rows, path):
    """Quantum mean trajectory against the matched classical circle."""
    fig, ax = plt.subplots(figsize=(5.6, 5.6))
    ax.plot([r[1] for r in traj_rows], [r[2] for r in traj_rows],
            color="tab:red", lw=2.0, label="quantum mean")
    ax.plot([r[1] for r in overlay_rows], [r[2] for r in overlay_rows],
            color="tab:blue", lw=1.0, ls="--", label="classical orbit")
    ax.plot([0], [0], "o", color="black", ms=6, label="flux line")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=9)
    ax.grid(alpha=0.25)
    _save(fig, path)


def plot_spread(r_grid, phi_grid, density, radii, path):
    """Probability density snapshot on the transverse plane with the mean
    and classical radii overlaid."""
    phi_closed = np.concatenate([phi_grid, [phi_grid[0] + 2.0 * math.pi]])
    dens_closed = np.vstack([density, density[:1]])
    pp, rr = np.meshgrid(phi_closed, r_grid, indexing="ij")
    xx = rr * np.cos(pp)
    yy = rr * np.sin(pp)
    fig, ax = plt.subplots(figsize=(6.0, 5.4))
    mesh = ax.pcolormesh(xx, yy, dens_closed, shading="gouraud",
                         cmap="inferno")
    fig.colorbar(mesh, ax=ax, label=r"$|\Psi|^2$ (normalized)")
    theta = np.linspace(0.0, 2.0 * math.pi, 200)
    styles = {"R_mean": ("tab:cyan", "-"), "Rc_mean": ("tab:green", "-"),
              "classical_R": ("white", ":"), "classical_Rc": ("gray", ":")}
    for name, radius in radii.items():
        color, ls = styles.get(name, ("white", "-"))
        ax.plot(radius * np.cos(theta), radius * np.sin(theta),
                color=color, ls=ls, lw=1.0, label=name)
    ax.plot([0], [0], "w+", ms=8)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=8, loc="upper right")
    _save(fig, path)


def plot_lattice(lat, path):
    """Heatmap of squared coefficient magnitudes over the (m, l) grid."""
    fig, ax = plt.subplots(figsize=(6.0, 4.6))
    if lat.coeffs:
        ms = np.array([k[0] for k in lat.coeffs])
        ls = np.array([k[1] for k in lat.coeffs])
        w = np.array([abs(c) ** 2 for c in lat.coeffs.values()])
        w = w / w.max()
        sc = ax.scatter(ls, ms, c=np.log10(np.maximum(w, 1e-16)), s=14,
                        cmap="viridis", marker="s")
        fig.colorbar(sc, ax=ax, label=r"$\log_{10} |c|^2$ (relative)")
    ax.set_xlabel("angular index l")
    ax.set_ylabel("radial index m")
    ax.set_title(f"coefficient lattice, sector j={lat.j}")
    _save(fig, path)


def plot_sweep(parameter, rows, columns, path):
    """Key mean values against the swept parameter."""
    values = np.array([float(r[0]) for r in rows])
    table = {name: np.array([float(r[1 + i]) for r in rows])
             for i, name in enumerate(columns)}
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    for name, style in (("R_mean", "-o"), ("Rc_mean", "-s"),
                        ("var_position", "-^")):
        ax.plot(values, table[name], style, ms=4, label=name)
    ax.set_xlabel(parameter)
    ax.legend(fontsize=9)
    ax.grid(alpha=0.25)
    _save(fig, path)
