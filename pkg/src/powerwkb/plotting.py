"""PNG rendering of the figure data series (optional companion to the data files)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .reports import FigureData, FigureId  # noqa: E402

_TITLES = {
    FigureId.FIG1: "Relative deviation of the ground-state Bohr-Sommerfeld energy",
    FigureId.FIG2: "WKB correction of the two lowest states vs m",
    FigureId.FIG3: "WKB correction vs N, quartic and sextic",
    FigureId.FIG4: "WKB correction vs N, linear potential",
}


def render_figure(data: FigureData, path: str | Path) -> Path:
    """Draw ``data`` and save it to ``path`` (format from the suffix)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    cols = {c: [row[i] for row in data.rows] for i, c in enumerate(data.columns)}
    fid = data.figure_id
    if fid is FigureId.FIG1:
        ax.plot(cols["m"], cols["RD_ground"], "o", label="R.D., N=0")
        ax.axhline(data.meta["limit_m_to_infinity"], ls="--", color="gray", label="m -> infinity")
        ax.set_xlabel("m")
        ax.set_ylabel("relative deviation")
    elif fid is FigureId.FIG2:
        ax.plot(cols["m"], cols["gamma_0"], "o", label="gamma, N=0")
        ax.plot(cols["m"], cols["gamma_1"], "s", label="gamma, N=1")
        ax.plot(cols["m"], cols["gamma_0_fit"], "-", lw=1, label="N=0 interpolation")
        ax.axhline(0.5, ls="--", color="gray")
        ax.set_xlabel("m")
        ax.set_ylabel("gamma")
    elif fid is FigureId.FIG3:
        ax.plot(cols["N"], cols["gamma_m4"], "o", ms=3, label="m=4")
        ax.plot(cols["N"], cols["gamma_m6"], "s", ms=3, label="m=6")
        ax.set_xlabel("N")
        ax.set_ylabel("gamma")
    else:
        for parity, marker in (("even", "o"), ("odd", "s")):
            pts = [(n, g) for n, p, g in data.rows if p == parity]
            ax.plot([n for n, _ in pts], [g for _, g in pts], marker, ms=3, label=f"{parity} N")
        ax.axhline(0.0, color="gray", lw=0.5)
        ax.set_xlabel("N")
        ax.set_ylabel("gamma")
    ax.set_title(_TITLES[fid], fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
