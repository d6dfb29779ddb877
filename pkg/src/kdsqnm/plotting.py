"""Figures for branch sweeps and order-convergence tables.

Rendering uses the non-interactive Agg backend and always writes to a file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "lines.markersize": 3.5,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "legend.frameon": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _figure(width=6.0, height=None):
    if height is None:
        height = width * (np.sqrt(5) - 1.0) / 2.0
    return plt.subplots(figsize=(width, height))


def plot_branches(branches, path, marks=(0.0, 0.05, 0.1, 0.15, 0.2, 0.25)):
    """QNM trajectories in the complex plane, one line per ``(m, l, k)`` branch.

    Points whose ``a`` is in ``marks`` get a marker.
    """
    with plt.rc_context(RC):
        fig, ax = _figure()
        cmap = plt.get_cmap("viridis")
        ks = sorted({pts[0].k for pts in branches if pts})
        kmax = max((abs(k) for k in ks), default=1) or 1
        for pts in branches:
            good = [p for p in pts if p.converged]
            if not good:
                continue
            w = np.array([p.omega for p in good])
            color = cmap(0.5 + 0.5 * good[0].k / kmax)
            ax.plot(w.real, w.imag, color=color)
            marked = [p.omega for p in good if any(abs(p.a - t) < 1e-9 for t in marks)]
            if marked:
                marked = np.array(marked)
                ax.plot(marked.real, marked.imag, "o", color=color)
        ax.set_xlabel(r"Re $\omega$")
        ax.set_ylabel(r"Im $\omega$")
        fig.savefig(path)
        plt.close(fig)


def plot_convergence(ls, differences, path):
    """Log-log plot of ``|omega_{J+1} - omega_J|`` against ``l``.

    ``differences[i][j]`` is the difference between orders ``j + 2`` and
    ``j + 1`` at ``ls[i]``.
    """
    d = np.asarray(differences, dtype=float)
    with plt.rc_context(RC):
        fig, ax = _figure()
        for j in range(d.shape[1]):
            ax.loglog(ls, d[:, j], "o-", label=rf"$|\omega_{j + 2}-\omega_{j + 1}|$")
        ax.set_xlabel(r"$l$")
        ax.set_ylabel("successive-order difference")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
