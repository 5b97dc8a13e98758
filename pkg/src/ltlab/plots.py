"""Figure rendering for the report path: spectra in the complex plane,
exclusion-region rasters and sweep curves, written as PNG files next to
the delimited outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .eigensolve import FilteredSpectrum
from .inequalities import ExclusionRaster

_REJECT_COLORS = {
    "near_half_line": "0.7",
    "band_edge": "0.4",
    "delocalized": "tab:orange",
    "unstable": "tab:red",
}


def plot_spectrum(filtered: FilteredSpectrum, path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for reason, color in _REJECT_COLORS.items():
        pts = [r.value for r in filtered.rejected if r.reason == reason]
        if pts:
            arr = np.asarray(pts)
            ax.plot(arr.real, arr.imag, ".", ms=3, color=color, label=f"rejected: {reason}")
    if filtered.kept.size:
        ax.plot(filtered.kept.real, filtered.kept.imag, "o", ms=6,
                color="tab:blue", label="kept")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_region(
    raster: ExclusionRaster,
    path: str | Path,
    eigenvalues: Sequence[complex] = (),
) -> None:
    re_min, re_max, im_min, im_max = raster.window
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.imshow(
        raster.mask,
        extent=(re_min, re_max, im_min, im_max),
        origin="upper",
        cmap="Greys",
        vmin=0,
        vmax=1,
        aspect="auto",
    )
    if len(eigenvalues):
        arr = np.asarray(eigenvalues, dtype=complex)
        ax.plot(arr.real, arr.imag, "o", ms=5, color="tab:blue", label="eigenvalues")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel(r"Re $\mu$")
    ax.set_ylabel(r"Im $\mu$")
    ax.set_title(f"excluded region (dark), $\\gamma$={raster.gamma}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(rows: Sequence[dict], path: str | Path) -> None:
    ok = [r for r in rows if "best_ratio" in r]
    fig, ax = plt.subplots(figsize=(6, 4))
    proven = [r for r in ok if not r.get("conjectural")]
    conj = [r for r in ok if r.get("conjectural")]
    if proven:
        ax.plot([r["gamma"] for r in proven], [r["best_ratio"] for r in proven],
                "o-", color="tab:blue", label="proven range")
    if conj:
        ax.plot([r["gamma"] for r in conj], [r["best_ratio"] for r in conj],
                "s--", color="tab:orange", label="conjectural range")
    ax.axhline(1.0, color="k", lw=0.8, ls=":")
    ax.set_xlabel(r"$\gamma$")
    ax.set_ylabel("best lhs/rhs ratio")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
