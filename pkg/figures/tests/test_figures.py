"""Tests for the figure renderers and their CLI."""

import csv
import math
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from cafewall_figures import FigureSpec, render
from cafewall_figures.cli import main

PRIMARY_OUT = Path(__file__).resolve().parents[2] / "out"

SAMPLE_STATS_HEADER = ["sampleId", "scale", "bucket", "count",
                       "meanAbsDev", "stdDev", "stdErr"]
WHOLE_STATS_HEADER = ["scale", "bucket", "count", "meanAbsDev", "stdDev", "stdErr"]
DIST_HEADER = ["scale", "bucket", "signedDeviationDeg", "lengthPx", "sampleId"]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


@pytest.fixture
def sample_stats_csv(tmp_path):
    rows = []
    for sample in range(4):
        for scale in (4.0, 8.0, 12.0):
            rows.append([sample, scale, "H", 5, 2.5 + scale * 0.4 + sample * 0.1,
                         0.8, 0.36])
            rows.append([sample, scale, "V", 2, 1.5, 0.4, 0.28])
            rows.append([sample, scale, "D1", 0, "nan", "nan", "nan"])
            rows.append([sample, scale, "D2", 0, "nan", "nan", "nan"])
    d = tmp_path / "crop4x5"
    d.mkdir()
    return write_csv(d / "stats.csv", SAMPLE_STATS_HEADER, rows)


@pytest.fixture
def whole_stats_csv(tmp_path):
    rows = [
        [4.0, "H", 7, 3.7, 1.1, 0.42],
        [4.0, "V", 0, "nan", "nan", "nan"],
        [8.0, "H", 9, 7.9, 1.3, 0.43],
        [8.0, "V", 3, 1.6, 0.5, 0.29],
        [20.0, "D1", 4, 2.8, 0.9, 0.45],
        [20.0, "D2", 4, 3.0, 0.7, 0.35],
    ]
    return write_csv(tmp_path / "stats.csv", WHOLE_STATS_HEADER, rows)


@pytest.fixture
def dist_csv(tmp_path):
    rows = [
        [8.0, "H", 6.5, 480.0, 0],
        [8.0, "H", -7.1, 512.0, 1],
        [8.0, "V", 1.2, 455.0, 0],
        [20.0, "D1", 3.3, 470.0, 2],
        [20.0, "D2", -2.9, 460.0, 2],
    ]
    return write_csv(tmp_path / "distribution.csv", DIST_HEADER, rows)


def test_spec_rejects_unknown_kind(tmp_path):
    with pytest.raises(ValueError, match="unknown figure kind"):
        FigureSpec(("a.csv",), "piechart", str(tmp_path / "o.png"))


def test_spec_requires_inputs(tmp_path):
    with pytest.raises(ValueError, match="at least one"):
        FigureSpec((), "boxplot", str(tmp_path / "o.png"))


def test_missing_column_is_reported(tmp_path):
    bad = write_csv(tmp_path / "bad.csv", ["scale", "bucket"], [[4.0, "H"]])
    spec = FigureSpec((bad,), "errorbar", str(tmp_path / "o.png"))
    with pytest.raises(ValueError, match="missing required column"):
        render(spec)


def test_boxplot_panels_and_series(sample_stats_csv, tmp_path):
    out = tmp_path / "box.png"
    spec = FigureSpec((sample_stats_csv,), "boxplot", str(out))
    fig = render(spec)
    assert out.exists()
    titles = [ax.get_title() for ax in fig.axes]
    for bucket in ("H", "V", "D1", "D2"):
        assert f"{bucket} bucket" in titles
    h_ax = fig.axes[titles.index("H bucket")]
    lo, hi = h_ax.get_ylim()
    assert lo <= 4.5 and hi >= 7.0
    plt.close("all")


def test_boxplot_skips_empty_buckets(sample_stats_csv, tmp_path):
    out = tmp_path / "box.png"
    fig = render(FigureSpec((sample_stats_csv,), "boxplot", str(out)))
    titles = [ax.get_title() for ax in fig.axes]
    d1_ax = fig.axes[titles.index("D1 bucket")]
    assert not any(isinstance(p, plt.matplotlib.patches.PathPatch)
                   for p in d1_ax.patches)
    plt.close("all")


def test_distribution_grid(dist_csv, tmp_path):
    out = tmp_path / "dist.png"
    fig = render(FigureSpec((dist_csv,), "distribution", str(out)))
    assert out.exists()
    assert len(fig.axes) == 3
    for ax in fig.axes:
        lo, hi = ax.get_ylim()
        assert lo == pytest.approx(-22.5) and hi == pytest.approx(22.5)
    plt.close("all")


def test_errorbar_omits_zero_count(whole_stats_csv, tmp_path):
    out = tmp_path / "err.png"
    fig = render(FigureSpec((whole_stats_csv,), "errorbar", str(out)))
    assert out.exists()
    ax = fig.axes[0]
    labels = [c.get_label() for c in ax.containers]
    assert "H" in labels and "D1" in labels and "D2" in labels
    h_line = next(c for c in ax.containers if c.get_label() == "H")[0]
    assert len(h_line.get_xdata()) == 2
    v_line = next(c for c in ax.containers if c.get_label() == "V")[0]
    assert len(v_line.get_xdata()) == 1
    plt.close("all")


@pytest.mark.parametrize("kind,fixture", [
    ("boxplot", "sample_stats_csv"),
    ("distribution", "dist_csv"),
    ("errorbar", "whole_stats_csv"),
])
def test_rerender_is_byte_identical(kind, fixture, tmp_path, request):
    path = request.getfixturevalue(fixture)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(FigureSpec((path,), kind, str(a)))
    render(FigureSpec((path,), kind, str(b)))
    assert a.read_bytes() == b.read_bytes()
    plt.close("all")


def test_cli_renders(whole_stats_csv, tmp_path, capsys):
    out = tmp_path / "cli.png"
    rc = main(["--in", whole_stats_csv, "--kind", "errorbar", "--out", str(out)])
    assert rc == 0
    assert out.exists()
    plt.close("all")


def test_cli_missing_column(tmp_path, capsys):
    bad = write_csv(tmp_path / "bad.csv", ["scale"], [[4.0]])
    rc = main(["--in", bad, "--kind", "errorbar", "--out", str(tmp_path / "o.png")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "missing required column" in err


def test_cli_rejects_bad_kind(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["--in", "x.csv", "--kind", "nope", "--out", "o.png"])
    assert exc.value.code == 2


def _report(name, ok, detail):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} - {detail}",
          flush=True)
    assert ok, detail


def test_s1_acceptance(tmp_path, sample_stats_csv, whole_stats_csv, dist_csv):
    """Renders from the real experiment outputs when available, otherwise
    from schema-conformant synthetic CSVs; checks panel structure, that the
    horizontal panel's y-range covers the expected tilt magnitudes, and that
    re-rendering is byte identical."""
    crop_stats = sorted(str(p) for p in PRIMARY_OUT.glob("exp1/crop*/stats.csv"))
    whole = PRIMARY_OUT / "exp2" / "stats.csv"
    dists = sorted(str(p) for p in PRIMARY_OUT.glob("exp1/crop*/distribution.csv"))
    real = bool(crop_stats) and whole.exists() and bool(dists)
    if not real:
        crop_stats, whole, dists = [sample_stats_csv], Path(whole_stats_csv), [dist_csv]

    box_fig = render(FigureSpec(tuple(crop_stats), "boxplot",
                                str(tmp_path / "box.png")))
    titles = [ax.get_title() for ax in box_fig.axes]
    ok = all(f"{b} bucket" in titles for b in ("H", "V", "D1", "D2"))
    h_ax = box_fig.axes[titles.index("H bucket")]
    lo, hi = h_ax.get_ylim()
    ok = ok and lo <= 7.0 <= hi

    err_fig = render(FigureSpec((str(whole),), "errorbar",
                                str(tmp_path / "err.png")))
    series = {c.get_label() for c in err_fig.axes[0].containers}
    ok = ok and "H" in series

    dist_fig = render(FigureSpec(tuple(dists), "distribution",
                                 str(tmp_path / "dist.png")))
    ok = ok and len(dist_fig.axes) == 3 * len(dists)
    plt.close("all")

    for kind, inputs in (("boxplot", tuple(crop_stats)),
                         ("errorbar", (str(whole),)),
                         ("distribution", tuple(dists))):
        a, b = tmp_path / f"{kind}_a.png", tmp_path / f"{kind}_b.png"
        render(FigureSpec(inputs, kind, str(a)))
        render(FigureSpec(inputs, kind, str(b)))
        ok = ok and a.read_bytes() == b.read_bytes()
        plt.close("all")

    source = "experiment outputs" if real else "synthetic CSVs"
    _report("S1", ok, f"panel structure, H range, byte-identical re-render ({source})")
