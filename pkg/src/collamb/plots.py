"""Optional figure rendering for the sweep commands.

Kept out of the default path on purpose: the CLI emits data only unless
--plot is given, and nothing else in the package imports matplotlib.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

# per command: x column, (left panel column, label), (right panel column, label)
_PANELS = {
    "sweep-detuning": ("detuning", ("gamma11", "collective linewidth"),
                       ("delta11p", "collective shift")),
    "sweep-density": ("cooperativity", ("gamma11", "collective linewidth"),
                      ("delta11p", "collective shift")),
    "pair-sweep": ("r", ("gamma12", "cross damping"),
                   ("delta12", "cross shift")),
    "ensemble-sweep": ("size", ("gamma_eff", "effective linewidth"),
                       ("delta_eff", "effective shift")),
}


def render_plots(command: str, columns, rows, out_path: str) -> list[str]:
    """Render the two-panel summary figure next to the data file."""
    if command not in _PANELS:
        return []
    xcol, left, right = _PANELS[command]
    ix = list(columns).index(xcol)
    x = [row[ix] for row in rows]

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), constrained_layout=True)
    for ax, (col, label) in zip(axes, (left, right)):
        iy = list(columns).index(col)
        ax.plot(x, [row[iy] for row in rows], marker=".", lw=1.0)
        ax.set_xlabel(xcol)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)

    path = os.path.splitext(out_path)[0] + ".png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
