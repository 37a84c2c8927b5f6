"""Matplotlib figures written to SVG files next to the tabular output."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from tripspan.lattice import line_profile  # noqa: E402

# fixed ids/metadata so repeated runs write byte-identical files
plt.rcParams["svg.hashsalt"] = "tripspan"
plt.rcParams["svg.fonttype"] = "none"
plt.rcParams["font.size"] = 9

_META = {"Date": None, "Creator": "tripspan"}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META, bbox_inches="tight")
    plt.close(fig)


def plot_point_set(points, path, title=""):
    """Points on the unit grid with their occupied rows, columns and anti-diagonals."""
    pts = sorted(points)
    prof = line_profile(pts)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    lo = min(xs + ys) - 1
    hi = max(xs + ys) + 1
    fig, ax = plt.subplots(figsize=(4, 4))
    for x in range(lo, hi + 1):
        ax.axvline(x, color="0.92", lw=0.5, zorder=0)
        ax.axhline(x, color="0.92", lw=0.5, zorder=0)
    for y in sorted(prof.rows):
        ax.axhline(y, color="tab:blue", lw=1.2, alpha=0.7)
    for x in sorted(prof.cols):
        ax.axvline(x, color="tab:green", lw=1.2, alpha=0.7)
    for c in sorted(prof.diags):
        # x + y = c runs at -45 degrees
        ax.plot([lo, hi], [c - lo, c - hi], color="tab:red", lw=1.2, alpha=0.7)
    ax.scatter(xs, ys, s=28, color="black", zorder=3)
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    ax.set_aspect("equal")
    ax.set_title(title or f"|P| = {len(pts)}, g = {prof.g}")
    _save(fig, path)


def plot_point_sets(sets, path, title=""):
    """Small multiples, one panel per point set."""
    sets = list(sets)
    cols = min(4, max(1, len(sets)))
    rows = max(1, math.ceil(len(sets) / cols))
    fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 2.2 * rows), squeeze=False)
    for ax in axes.ravel():
        ax.set_axis_off()
    for ax, pts in zip(axes.ravel(), sets):
        pts = sorted(pts)
        ax.set_axis_on()
        ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=18, color="black")
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
        ax.margins(0.25)
    if title:
        fig.suptitle(title)
    _save(fig, path)


def plot_g_ratio(rows, path):
    """g(k) / sqrt(12k) against k."""
    ks = [r[0] for r in rows]
    ratios = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(ks, ratios, marker="." if len(ks) < 60 else None, lw=1)
    ax.axhline(1.0, color="0.5", ls="--", lw=0.8)
    ax.set_xlabel("k")
    ax.set_ylabel("g(k) / sqrt(12k)")
    if len(ks) > 1 and ks[-1] / max(ks[0], 1) > 50:
        ax.set_xscale("log")
    _save(fig, path)


def plot_boundaries(rows, path):
    """Spiral prefix boundaries against the hexagon curve 2*ceil(sqrt(12k - 3))."""
    ks = [r["k"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.step(ks, [r["boundary"] for r in rows], where="mid", label="prefix boundary")
    ax.plot(ks, [2 * math.ceil(math.sqrt(12 * k - 3)) for k in ks], ls=":", color="0.4",
            label="2 ceil(sqrt(12k-3))")
    ax.set_xlabel("k")
    ax.set_ylabel("edge boundary")
    ax.legend(frameon=False)
    _save(fig, path)
