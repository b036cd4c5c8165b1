"""Matplotlib renderings of the tabulated curves and trajectory monitors."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (5.5, 3.6),
    "savefig.dpi": 150,
}


def render_curve(curve, path: Path) -> Path:
    """Plot every branch of a tabulated curve and save it to ``path``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        branches = list(dict.fromkeys(r[2] for r in curve.rows))
        for name in branches:
            x, y = curve.branch(name)
            ax.plot(x, y, lw=1.2, label=name)
        if curve.name == "fig4":
            ax.axvline(-0.25, color="0.5", ls=":", lw=0.8)
            ys = np.array([r[1] for r in curve.rows])
            lim = np.percentile(np.abs(ys), 95) * 1.2
            ax.set_ylim(-lim, lim)
        ax.set_xlabel(curve.x_label)
        ax.set_ylabel(curve.y_label)
        if len(branches) > 1:
            ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def render_trajectory(log, path: Path) -> Path:
    """Relative drift of the invariants and the deviation norm against time."""
    t = np.asarray(log.times)
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True, figsize=(5.5, 5.0))
        for name, label in (("H", "H"), ("total_enstrophy", r"$\Gamma[q]$"), ("ang_mom", "ang. mom.")):
            v = np.asarray(getattr(log, name))
            scale = abs(v[0]) if v[0] != 0 else 1.0
            ax0.plot(t, (v - v[0]) / scale, lw=1.0, label=label)
        ax0.set_ylabel("relative drift")
        ax0.legend(frameon=False)
        qq = log.q1_plus_q2
        if qq[0] > 0:
            ax1.plot(t, qq / qq[0], lw=1.0, color="k")
            ax1.set_ylabel(r"$(Q_1+Q_2)/(Q_1+Q_2)_0$")
        else:
            ax1.plot(t, qq, lw=1.0, color="k")
            ax1.set_ylabel(r"$Q_1+Q_2$")
        ax1.set_xlabel("t")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)
