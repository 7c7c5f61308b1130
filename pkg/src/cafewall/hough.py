"""Hough line-segment detection on binary edge maps.

Coordinates: x = column, y = row increasing downward, origin at the
top-left pixel center. A set pixel votes rho = x*cos(theta) + y*sin(theta)
for every theta bin; theta spans [0, 180) degrees, rho spans +/- the image
diagonal. Peaks are found by iterative maximum + neighborhood suppression,
and segments are recovered per peak by collecting the pixels whose rho
rounds into the peak's bin, splitting where the along-line gap exceeds
fill_gap and keeping runs at least min_length long.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class HoughParams:
    num_peaks: int = 100
    threshold: int = 3
    nhood_size: tuple[int, int] | None = None  # (rho bins, theta bins); None = derive
    fill_gap: float = 40.0
    min_length: float = 450.0

    def __post_init__(self):
        if self.num_peaks < 1:
            raise ValueError("num_peaks must be >= 1")
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.nhood_size is not None:
            nr, nt = self.nhood_size
            if nr < 1 or nt < 1 or nr % 2 == 0 or nt % 2 == 0:
                raise ValueError(f"nhood_size components must be odd and >= 1, got {self.nhood_size}")
        if self.fill_gap < 0 or self.min_length < 0:
            raise ValueError("fill_gap and min_length must be >= 0")


@dataclass(frozen=True)
class Peak:
    rho_bin: int
    theta_bin: int
    votes: int


@dataclass(frozen=True)
class LineSegment:
    p1: tuple[int, int]  # (x, y)
    p2: tuple[int, int]
    theta_deg: float     # normal angle of the generating Hough bin
    rho: float
    length_px: float


@dataclass
class HoughAccumulator:
    votes: np.ndarray          # (n_rho, n_theta) int64
    rho_step: float
    theta_step: float
    rho_offset: int            # bin index of rho == 0
    shape: tuple[int, int]     # source BinaryMap (h, w)

    @property
    def rhos(self) -> np.ndarray:
        n = self.votes.shape[0]
        return (np.arange(n) - self.rho_offset) * self.rho_step

    @property
    def thetas_deg(self) -> np.ndarray:
        return np.arange(self.votes.shape[1]) * self.theta_step

    def rho_of_bin(self, rho_bin: int) -> float:
        return (rho_bin - self.rho_offset) * self.rho_step

    def default_nhood(self) -> tuple[int, int]:
        """Odd suppression window near bins/50 per axis, >= 1."""
        nr, nt = self.votes.shape
        return 2 * int(np.ceil(nr / 100)) + 1, 2 * int(np.ceil(nt / 100)) + 1


def _set_pixels(bm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    bm = np.asarray(bm)
    if bm.ndim != 2 or bm.size == 0:
        raise ValueError(f"expected a nonempty 2-D binary map, got shape {bm.shape}")
    ys, xs = np.nonzero(bm)
    return xs.astype(np.float64), ys.astype(np.float64)


def hough_transform(bm: np.ndarray, rho_step: float = 1.0,
                    theta_step: float = 1.0) -> HoughAccumulator:
    """Vote every set pixel into every theta bin."""
    if rho_step <= 0 or theta_step <= 0:
        raise ValueError("rho_step and theta_step must be > 0")
    h, w = np.asarray(bm).shape
    xs, ys = _set_pixels(bm)
    diag = float(np.hypot(h - 1, w - 1))
    rho_offset = int(np.ceil(diag / rho_step))
    n_rho = 2 * rho_offset + 1
    thetas = np.deg2rad(np.arange(0.0, 180.0, theta_step))
    votes = np.zeros((n_rho, len(thetas)), dtype=np.int64)
    if xs.size:
        cos_t, sin_t = np.cos(thetas), np.sin(thetas)
        # chunk so the Nxn_theta rho matrix stays modest
        chunk = max(1, int(4e6 // len(thetas)))
        for i in range(0, xs.size, chunk):
            rho = np.outer(xs[i : i + chunk], cos_t) + np.outer(ys[i : i + chunk], sin_t)
            idx = np.rint(rho / rho_step).astype(np.int64) + rho_offset
            for t in range(len(thetas)):
                votes[:, t] += np.bincount(idx[:, t], minlength=n_rho)
    return HoughAccumulator(votes, rho_step, theta_step, rho_offset, (h, w))


def find_peaks(acc: HoughAccumulator, p: HoughParams) -> list[Peak]:
    """Iterative global-maximum selection with neighborhood suppression.
    Ties break toward the smaller theta bin, then the smaller rho bin."""
    votes = acc.votes.copy()
    n_rho, n_theta = votes.shape
    nr, nt = p.nhood_size if p.nhood_size is not None else acc.default_nhood()
    hr, ht = nr // 2, nt // 2
    peaks: list[Peak] = []
    while len(peaks) < p.num_peaks:
        best = int(votes.max(initial=0))
        if best < p.threshold:
            break
        r_idx, t_idx = np.nonzero(votes == best)
        order = np.lexsort((r_idx, t_idx))[0]
        r, t = int(r_idx[order]), int(t_idx[order])
        peaks.append(Peak(r, t, best))
        r0, r1 = max(0, r - hr), min(n_rho, r + hr + 1)
        t_cols = np.arange(t - ht, t + ht + 1) % n_theta  # theta wraps mod 180
        votes[r0:r1, t_cols] = 0
    return peaks


def _line_pixels(xs: np.ndarray, ys: np.ndarray, acc: HoughAccumulator,
                 rho_bin: int, theta_bin: int):
    """Members of a bin's line, ordered along the line direction."""
    theta = np.deg2rad(theta_bin * acc.theta_step)
    rho = xs * np.cos(theta) + ys * np.sin(theta)
    idx = np.rint(rho / acc.rho_step).astype(np.int64) + acc.rho_offset
    m = idx == rho_bin
    xm, ym = xs[m], ys[m]
    t = -xm * np.sin(theta) + ym * np.cos(theta)
    order = np.lexsort((ym, xm, t))
    return xm[order], ym[order], t[order]


def extract_segments(bm: np.ndarray, peaks, p: HoughParams,
                     acc: HoughAccumulator | None = None) -> list[LineSegment]:
    """Recover gap-merged segments for each peak's (rho, theta) bin."""
    if acc is None:
        h, w = np.asarray(bm).shape
        diag = float(np.hypot(h - 1, w - 1))
        acc = HoughAccumulator(np.zeros((0, 0), dtype=np.int64), 1.0, 1.0,
                               int(np.ceil(diag)), (h, w))
    xs, ys = _set_pixels(bm)
    segments: list[LineSegment] = []
    for pk in peaks:
        xm, ym, t = _line_pixels(xs, ys, acc, pk.rho_bin, pk.theta_bin)
        if xm.size == 0:
            continue
        breaks = np.nonzero(np.diff(t) > p.fill_gap)[0]
        starts = np.concatenate(([0], breaks + 1))
        ends = np.concatenate((breaks, [t.size - 1]))
        for i0, i1 in zip(starts, ends):
            length = float(np.hypot(xm[i1] - xm[i0], ym[i1] - ym[i0]))
            if length >= p.min_length:
                segments.append(LineSegment(
                    p1=(int(xm[i0]), int(ym[i0])),
                    p2=(int(xm[i1]), int(ym[i1])),
                    theta_deg=float(pk.theta_bin * acc.theta_step),
                    rho=acc.rho_of_bin(pk.rho_bin),
                    length_px=length,
                ))
    return segments


def detect_segments(bm: np.ndarray, p: HoughParams,
                    rho_step: float = 1.0, theta_step: float = 1.0) -> list[LineSegment]:
    """transform -> peaks -> segments in one call."""
    acc = hough_transform(bm, rho_step, theta_step)
    return extract_segments(bm, find_peaks(acc, p), p, acc)


def write_accumulator_csv(acc: HoughAccumulator, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["rhoBin", "thetaBin", "votes"])
        for r, t in zip(*np.nonzero(acc.votes)):
            writer.writerow([int(r), int(t), int(acc.votes[r, t])])


def write_segments_csv(segments, path, scale: float | None = None) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["scale", "x1", "y1", "x2", "y2", "thetaDeg", "rho", "lengthPx"])
        for item in segments:
            s_scale, seg = item if isinstance(item, tuple) else (scale, item)
            writer.writerow([
                "" if s_scale is None else f"{s_scale:g}",
                seg.p1[0], seg.p1[1], seg.p2[0], seg.p2[1],
                f"{seg.theta_deg:.4f}", f"{seg.rho:.4f}", f"{seg.length_px:.4f}",
            ])


def render_overlay(bm: np.ndarray, segments) -> np.ndarray:
    """Segments drawn in green over the edge map; longest in blue."""
    from PIL import Image, ImageDraw

    bm = np.asarray(bm)
    base = (bm > 0).astype(np.uint8) * 255
    im = Image.fromarray(base, mode="L").convert("RGB")
    draw = ImageDraw.Draw(im)
    segments = list(segments)
    longest = max(segments, key=lambda s: s.length_px, default=None)
    for seg in segments:
        if seg is longest:
            continue
        draw.line([seg.p1, seg.p2], fill=(0, 200, 0), width=2)
    if longest is not None:
        draw.line([longest.p1, longest.p2], fill=(40, 80, 255), width=3)
    return np.asarray(im)
