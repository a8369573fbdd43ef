"""Figure rendering for scan, noise-sweep and tolerance-curve outputs.

Figures are a secondary view rendered next to the delimited output; the
CSV stays the primary, byte-exact artifact.  The Agg backend is forced so
rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .network import ThresholdSet
from .optimizer import ScanResult
from .simulator import NoiseSweepResult, ToleranceRow


def render_scan_heatmap(scan: ScanResult, path: str) -> None:
    """Mimicry threshold over the (theta, phi) grid as a heatmap."""
    thetas = sorted({p.theta for p in scan.points})
    phis = sorted({p.phi for p in scan.points})
    grid = np.full((len(phis), len(thetas)), np.nan)
    t_idx = {t: i for i, t in enumerate(thetas)}
    p_idx = {p: i for i, p in enumerate(phis)}
    for pt in scan.points:
        grid[p_idx[pt.phi], t_idx[pt.theta]] = pt.value

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh = ax.pcolormesh(thetas, phis, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="best classical-mimicry fidelity")
    if scan.min_points:
        xs = [t for t, _ in scan.min_points]
        ys = [p for _, p in scan.min_points]
        ax.plot(xs, ys, "r*", markersize=9, label=f"grid minimum {scan.min_value:.4f}")
        ax.legend(loc="upper right", framealpha=0.9)
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel(r"$\phi$ (rad)")
    ax.set_title("Classical-mimicry threshold vs observable rotation")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_noise_sweep(sweep: NoiseSweepResult, thresholds: ThresholdSet, path: str) -> None:
    """Two-link fidelities against noise, with the hierarchy thresholds."""
    ps = [r.p for r in sweep.rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(ps, [r.f_expt12 for r in sweep.rows], "o-", ms=3, label=r"$F_{\mathrm{expt}12}$")
    ax.plot(ps, [r.f_expt1given2 for r in sweep.rows], "s--", ms=3,
            label=r"$F_{\mathrm{expt}1|2}$")
    ax.plot(ps, [r.f_expt112 for r in sweep.rows], "^:", ms=3,
            label=r"$F_{\mathrm{expt}112}$")
    for value, label in (
        (thresholds.f_gc12, "Bell bound"),
        (thresholds.f_gc1given2, "bilocal bound"),
        (thresholds.f_c12, "steering bound"),
        (thresholds.f_gc1givenc2, "hybrid bound"),
    ):
        ax.axhline(value, color="gray", lw=0.8, ls="-")
        ax.annotate(label, xy=(ps[-1], value), fontsize=7,
                    ha="right", va="bottom", color="gray")
    for name, (p_star, saturated) in sweep.crossings.items():
        if not saturated:
            ax.axvline(p_star, color="red", lw=0.6, ls=":")
    ax.set_xlabel("white-noise intensity $p$")
    ax.set_ylabel("process fidelity")
    ax.set_title("Two-link fidelities under source noise")
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_tolerance_curve(rows: list[ToleranceRow], path: str) -> None:
    """Critical noise p* per link count, one line per criterion."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    by_criterion: dict[str, list[ToleranceRow]] = {}
    for row in rows:
        by_criterion.setdefault(row.criterion, []).append(row)
    markers = {"exptN": "o", "expt11N": "s"}
    for crit, crit_rows in sorted(by_criterion.items()):
        ns = [r.n for r in crit_rows]
        stars = [r.p_star for r in crit_rows]
        ax.plot(ns, stars, markers.get(crit, "o") + "-", label=crit)
    ax.set_xlabel("number of links $N$")
    ax.set_ylabel("critical noise $p^*$")
    ax.set_title("Noise tolerance of the N-link criteria")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
