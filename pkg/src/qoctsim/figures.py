"""Matplotlib rendering of report figures, saved next to the data files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def save_ascan_figure(path, curve) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(curve.z_um, curve.values, "o-", ms=3, lw=1, color="#1f4e79")
    ax.axhline(1.0, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("delay position z (µm)")
    ax.set_ylabel("normalized coincidence rate")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_comparison_figure(path, z_um, qoct, oct_envelope) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.plot(z_um, qoct, lw=1.2, color="#1f4e79", label="coincidence dip")
    env = np.asarray(oct_envelope, dtype=float)
    peak = env.max()
    scaled = env / peak if peak > 0 else env
    ax.plot(z_um, scaled, lw=1.2, color="#c44e52", label="classical envelope (scaled)")
    ax.set_xlabel("delay position z (µm)")
    ax.set_ylabel("normalized signal")
    ax.legend(fontsize=9)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_section_figure(path, image, extent, xlabel, ylabel, vmin=None, vmax=None) -> None:
    """Grayscale section; low coincidence (strong signal) renders dark."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(
        np.asarray(image, dtype=float).T,
        origin="lower",
        extent=extent,
        cmap="gray",
        vmin=vmin,
        vmax=vmax,
        aspect="auto",
        interpolation="nearest",
    )
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04, label="normalized coincidence")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_topography_figure(path, x_um, y_um, depth_map) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(
        np.asarray(depth_map, dtype=float).T,
        origin="lower",
        extent=(x_um[0], x_um[-1], y_um[0], y_um[-1]),
        cmap="viridis_r",
        aspect="auto",
        interpolation="nearest",
    )
    ax.set_xlabel("x (µm)")
    ax.set_ylabel("y (µm)")
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04, label="surface depth z (µm)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
