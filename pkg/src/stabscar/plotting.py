"""PNG rendering of spectrum runs (eigenstate scatter, spacing histogram).

matplotlib is driven through the non-interactive Agg backend, so no
display is needed.  The CSV writers in :mod:`stabscar.spectral` remain
the canonical data output; these figures are a convenience.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .spectral import LevelStatistics, SpectrumReport  # noqa: E402

# deterministic PNG bytes: no timestamp or version chunk
_PNG_META = {"Software": None}


def _surmise(ensemble: str, s: np.ndarray) -> np.ndarray:
    if ensemble == "GOE":
        return 0.5 * math.pi * s * np.exp(-0.25 * math.pi * s**2)
    if ensemble == "GUE":
        return (32 / math.pi**2) * s**2 * np.exp(-4 * s**2 / math.pi)
    return np.exp(-s)


def scatter_png(path: str | Path, report: SpectrumReport, scar_index: int | None = None,
                title: str = "") -> None:
    """Eigenstate entropy against energy, coloured by overlap with the scar.

    Parameters
    ----------
    path : path-like
        Output PNG.
    report : SpectrumReport
        Needs ``entropies``; ``overlaps_with_scar`` is optional.
    scar_index : int, optional
        Eigenstate to highlight (usually the largest overlap).
    """
    if report.entropies is None:
        raise ValueError("report carries no entropies")
    fig, ax = plt.subplots(figsize=(5, 3.6), dpi=120)
    ov = report.overlaps_with_scar
    if ov is None:
        ax.scatter(report.eigenvalues, report.entropies, s=4, c="tab:blue", lw=0)
    else:
        sc = ax.scatter(report.eigenvalues, report.entropies, s=4, c=ov, cmap="viridis",
                        vmin=0, vmax=max(float(ov.max()), 1e-12), lw=0)
        fig.colorbar(sc, ax=ax, label=r"$|\langle E|\Psi\rangle|^2$")
    if scar_index is not None:
        ax.scatter([report.eigenvalues[scar_index]], [report.entropies[scar_index]],
                   s=40, facecolors="none", edgecolors="red", lw=1.2, label="scar")
        ax.legend(loc="lower center", frameon=False)
    ax.set_xlabel("energy $E$")
    ax.set_ylabel("entanglement entropy $S$")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def histogram_png(path: str | Path, stats: LevelStatistics, references=("GOE", "GUE", "Poisson"),
                  title: str = "") -> None:
    """Normalized spacing histogram with Wigner-surmise / Poisson curves."""
    fig, ax = plt.subplots(figsize=(5, 3.6), dpi=120)
    edges = stats.bin_edges
    ax.stairs(stats.histogram, edges, fill=True, alpha=0.5, color="tab:gray", label="data")
    s = np.linspace(edges[0], edges[-1], 400)
    for ens in references:
        ax.plot(s, _surmise(ens, s), lw=1.2, label=ens)
    ax.set_xlabel("normalized spacing $s$")
    ax.set_ylabel("$P(s)$")
    head = rf"$\bar r = {stats.mean_r:.4f}$"
    ax.set_title(f"{title}  {head}" if title else head, fontsize=9)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


__all__ = ["scatter_png", "histogram_png"]
