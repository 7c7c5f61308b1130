"""Orientation bucketing and per-scale tilt statistics.

Four reference orientations (H=0, D1=45, V=90, D2=135 degrees, y-down
image coordinates) with half-open +/-22.5 degree intervals tile [0, 180).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from cafewall.hough import LineSegment

HALF_WIDTH_DEG = 22.5

# reference order follows the interval layout around the half-circle
BUCKETS = {"H": 0.0, "D1": 45.0, "V": 90.0, "D2": 135.0}
_BUCKET_BY_INDEX = ("H", "D1", "V", "D2")
BUCKET_ORDER = ("H", "V", "D1", "D2")  # reporting order


@dataclass(frozen=True)
class TiltStats:
    scale: float
    bucket: str
    count: int
    mean_abs_dev: float  # nan when count == 0
    std_dev: float
    std_err: float
    deviations: tuple[float, ...] = ()


def segment_angle(seg: LineSegment) -> float:
    """Direction angle of p2-p1 in degrees, folded into [0, 180)."""
    dx = seg.p2[0] - seg.p1[0]
    dy = seg.p2[1] - seg.p1[1]
    if dx == 0 and dy == 0:
        raise ValueError(f"zero-length segment at {seg.p1}")
    return math.degrees(math.atan2(dy, dx)) % 180.0


def bucket_of(angle_deg: float) -> tuple[str, float]:
    """Bucket name and signed deviation in [-22.5, 22.5)."""
    if not 0.0 <= angle_deg < 180.0:
        raise ValueError(f"angle must be in [0, 180), got {angle_deg}")
    idx = int((angle_deg + HALF_WIDTH_DEG) % 180.0 // 45.0)
    name = _BUCKET_BY_INDEX[idx]
    dev = (angle_deg - BUCKETS[name] + HALF_WIDTH_DEG) % 180.0 - HALF_WIDTH_DEG
    return name, dev


def bucket_deviations(segments) -> dict[str, list[float]]:
    """Signed deviations grouped by bucket."""
    out: dict[str, list[float]] = {name: [] for name in BUCKET_ORDER}
    for seg in segments:
        name, dev = bucket_of(segment_angle(seg))
        out[name].append(dev)
    return out


def aggregate(segments_per_scale: dict[float, list[LineSegment]]) -> list[TiltStats]:
    """Count / mean|dev| / population std / standard error per
    (scale, bucket); empty buckets are explicit count-0 rows."""
    stats: list[TiltStats] = []
    for scale in sorted(segments_per_scale):
        devs = bucket_deviations(segments_per_scale[scale])
        for name in BUCKET_ORDER:
            d = np.abs(np.asarray(devs[name], dtype=np.float64))
            if d.size == 0:
                stats.append(TiltStats(scale, name, 0, math.nan, math.nan, math.nan))
            else:
                std = float(np.std(d))
                stats.append(TiltStats(
                    scale, name, int(d.size), float(np.mean(d)), std,
                    std / math.sqrt(d.size), tuple(devs[name]),
                ))
    return stats


def distribution_table(segments_per_scale: dict[float, list[LineSegment]]
                       ) -> list[tuple[float, str, float, float]]:
    """One (scale, bucket, signedDeviationDeg, lengthPx) row per segment."""
    rows = []
    for scale in sorted(segments_per_scale):
        for seg in segments_per_scale[scale]:
            name, dev = bucket_of(segment_angle(seg))
            rows.append((scale, name, dev, seg.length_px))
    return rows


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.4f}"


def write_stats_csv(stats, path, extra: dict[str, object] | None = None) -> None:
    """Stats CSV: scale, bucket, count, meanAbsDev, stdDev, stdErr
    (optionally prefixed by constant extra columns, e.g. sampleId)."""
    extra = extra or {}
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(list(extra) + ["scale", "bucket", "count", "meanAbsDev", "stdDev", "stdErr"])
        for s in stats:
            writer.writerow(
                list(extra.values())
                + [f"{s.scale:g}", s.bucket, s.count,
                   _fmt(s.mean_abs_dev), _fmt(s.std_dev), _fmt(s.std_err)]
            )


def write_distribution_csv(rows, path) -> None:
    """Distribution CSV: scale, bucket, signedDeviationDeg, lengthPx, sampleId."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["scale", "bucket", "signedDeviationDeg", "lengthPx", "sampleId"])
        for scale, bucket, dev, length, sample_id in rows:
            writer.writerow([f"{scale:g}", bucket, f"{dev:.4f}", f"{length:.4f}", sample_id])
