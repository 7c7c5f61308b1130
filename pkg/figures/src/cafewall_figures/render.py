"""Render box plots, deviation distributions, and mean +/- standard-error
charts from the experiment CSV files.

The renderers consume only the documented CSV schemas:

  stats.csv (per sample):  sampleId, scale, bucket, count, meanAbsDev, stdDev, stdErr
  stats.csv (whole image): scale, bucket, count, meanAbsDev, stdDev, stdErr
  distribution.csv:        scale, bucket, signedDeviationDeg, lengthPx, sampleId

Output is deterministic: fixed style, no timestamps or environment-derived
metadata in the image files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

BUCKETS = ("H", "V", "D1", "D2")
KINDS = ("boxplot", "distribution", "errorbar")

_SCALE_COLORS = plt.get_cmap("viridis")


@dataclass(frozen=True)
class FigureSpec:
    input_csvs: tuple[str, ...]
    kind: str
    out_path: str
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, expected one of {KINDS}")
        if not self.input_csvs:
            raise ValueError("at least one input CSV is required")


def _read_csv(path, required: tuple[str, ...]) -> list[dict[str, str]]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        cols = reader.fieldnames or []
        missing = [c for c in required if c not in cols]
        if missing:
            raise ValueError(f"{path}: missing required column(s) {missing}")
        return [row for row in reader]


def _series_label(path) -> str:
    """Label a CSV by its crop directory (out/exp1/crop4x5/stats.csv -> crop4x5)."""
    parent = Path(path).parent.name
    return parent if parent not in ("", ".") else Path(path).stem


def save(fig, out_path) -> None:
    fig.savefig(out_path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def render_boxplot(spec: FigureSpec):
    """One panel per bucket; x = DoG scale; one box per crop size holding
    the per-sample mean tilt."""
    per_input = []
    for path in spec.input_csvs:
        rows = _read_csv(path, ("sampleId", "scale", "bucket", "count", "meanAbsDev"))
        data: dict[tuple[float, str], list[float]] = {}
        for r in rows:
            if r["bucket"] not in BUCKETS or int(r["count"] or 0) == 0:
                continue
            v = float(r["meanAbsDev"])
            if math.isnan(v):
                continue
            data.setdefault((float(r["scale"]), r["bucket"]), []).append(v)
        per_input.append((_series_label(path), data))

    scales = sorted({s for _, d in per_input for s, _ in d})
    n_in = len(per_input)
    fig, axes = plt.subplots(2, 2, figsize=(11, 7), sharex=True)
    for ax, bucket in zip(axes.flat, BUCKETS):
        for i, (label, data) in enumerate(per_input):
            positions, values = [], []
            for j, scale in enumerate(scales):
                vals = data.get((scale, bucket))
                if vals:  # absent boxes stay absent, never drawn as zeros
                    positions.append(j + (i - (n_in - 1) / 2) * 0.8 / max(n_in, 1))
                    values.append(vals)
            if values:
                color = plt.get_cmap("tab10")(i)
                bp = ax.boxplot(values, positions=positions, widths=0.7 / max(n_in, 1),
                                patch_artist=True, manage_ticks=False)
                for box in bp["boxes"]:
                    box.set_facecolor(color)
                ax.plot([], [], color=color, label=label)
        ax.set_title(f"{bucket} bucket")
        ax.set_xticks(range(len(scales)))
        ax.set_xticklabels([f"{s:g}" for s in scales])
        ax.set_ylabel("mean tilt (deg)")
        ax.set_xlabel("DoG scale σc (px)")
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        if ax.get_legend_handles_labels()[1]:
            ax.legend(fontsize=8)
    fig.suptitle("Per-sample mean tilt by reference orientation")
    fig.tight_layout()
    return fig


def render_distribution(spec: FigureSpec):
    """Three columns (near-H, near-V, near-diagonal with D1/D2 co-plotted),
    one row per input; points colored by DoG scale."""
    panels = (("H",), ("V",), ("D1", "D2"))
    titles = ("near Horizontal", "near Vertical", "near Diagonal (D1 + D2)")
    n_in = len(spec.input_csvs)
    fig, axes = plt.subplots(n_in, 3, figsize=(13, 3.4 * n_in), squeeze=False)
    for row, path in enumerate(spec.input_csvs):
        rows = _read_csv(path, ("scale", "bucket", "signedDeviationDeg", "lengthPx"))
        scales = sorted({float(r["scale"]) for r in rows}) or [0.0]
        color_of = {s: _SCALE_COLORS(i / max(len(scales) - 1, 1))
                    for i, s in enumerate(scales)}
        for col, (buckets, title) in enumerate(zip(panels, titles)):
            ax = axes[row, col]
            for s in scales:
                pts = [(float(r["lengthPx"]), float(r["signedDeviationDeg"]))
                       for r in rows
                       if r["bucket"] in buckets and float(r["scale"]) == s]
                if pts:
                    xs, ys = zip(*pts)
                    ax.scatter(xs, ys, s=12, color=color_of[s], label=f"σc={s:g}")
            ax.set_title(f"{_series_label(path)}: {title}", fontsize=9)
            ax.set_xlabel("segment length (px)")
            ax.set_ylabel("deviation (deg)")
            ax.set_ylim(*(spec.ylim or (-22.5, 22.5)))
            ax.axhline(0.0, color="0.7", lw=0.6)
            if ax.has_data():
                ax.legend(fontsize=6)
    fig.tight_layout()
    return fig


def render_errorbar(spec: FigureSpec):
    """x = DoG scale, y = mean tilt with +/- stdErr whiskers, one series per
    bucket; count-0 cells are omitted."""
    rows = []
    for path in spec.input_csvs:
        rows += _read_csv(path, ("scale", "bucket", "count", "meanAbsDev", "stdErr"))
    fig, ax = plt.subplots(figsize=(8, 5))
    for i, bucket in enumerate(BUCKETS):
        pts = [(float(r["scale"]), float(r["meanAbsDev"]), float(r["stdErr"]))
               for r in rows
               if r["bucket"] == bucket and int(r["count"] or 0) > 0]
        pts = [(s, m, e) for s, m, e in pts if not math.isnan(m)]
        if not pts:
            continue
        pts.sort()
        xs, ms, es = zip(*pts)
        ax.errorbar(xs, ms, yerr=es, marker="o", capsize=3,
                    color=plt.get_cmap("tab10")(i), label=bucket)
    ax.set_xlabel("DoG scale σc (px)")
    ax.set_ylabel("mean tilt (deg)")
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    ax.legend()
    ax.set_title("Mean tilt and standard error by reference orientation")
    fig.tight_layout()
    return fig


_RENDERERS = {
    "boxplot": render_boxplot,
    "distribution": render_distribution,
    "errorbar": render_errorbar,
}


def render(spec: FigureSpec):
    """Render per spec.kind and write spec.out_path; returns the figure."""
    fig = _RENDERERS[spec.kind](spec)
    save(fig, spec.out_path)
    return fig
