"""End-to-end experiment harness.

Experiment 1: three foveal crop sizes, 50 samples each, full pipeline
(DoG stack -> binarize -> Hough -> bucket stats) per sample and scale.
Experiment 2: the same pipeline on the whole stimulus.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import csv
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

import cafewall
from cafewall import analysis, dog, hough, image, stimulus
from cafewall.analysis import TiltStats
from cafewall.dog import sigma_stack
from cafewall.hough import HoughParams, LineSegment
from cafewall.stimulus import CropSpec, StimulusSpec


@dataclass(frozen=True)
class ExperimentConfig:
    stimulus: StimulusSpec = field(default_factory=StimulusSpec)
    sigmas: tuple[float, ...] | None = None  # None = 0.5M..3.5M from mortar
    surround_ratio: float = 2.0
    window_ratio: float = 8.0
    border: str = "replicate"
    binarize_threshold: float = 0.0
    hough: HoughParams = field(default_factory=HoughParams)
    crop_sizes: tuple[tuple[int, int], ...] = ((4, 5), (5, 5), (5, 6))
    samples: int = 50
    offset_px: int = 4
    seed: int = 0
    scale_numpeaks_by_area: bool = False

    def sigma_values(self) -> list[float]:
        if self.sigmas is not None:
            return list(self.sigmas)
        return sigma_stack(self.stimulus.mortar_size)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sigmas"] = self.sigma_values()
        return d


@dataclass
class SampleResult:
    crop_name: str
    sample_id: int
    stats: list[TiltStats]
    segments_per_scale: dict[float, list[LineSegment]] | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    per_sample: list[SampleResult] = field(default_factory=list)
    whole: list[TiltStats] | None = None
    manifest: dict = field(default_factory=dict)


def analyze_image(img: np.ndarray, sigmas, surround_ratio: float, window_ratio: float,
                  border: str, params: HoughParams, binarize_threshold: float = 0.0,
                  polarity: str = "on") -> dict[float, list[LineSegment]]:
    """Full per-image pipeline: one segment list per DoG scale."""
    responses = dog.apply_dog_stack(img, sigmas, surround_ratio, window_ratio, border)
    out: dict[float, list[LineSegment]] = {}
    for sigma, resp in zip(sigmas, responses):
        if polarity == "off":
            resp = dog.off_center(resp)
        bm = dog.binarize(resp, binarize_threshold)
        out[sigma] = hough.detect_segments(bm, params)
    return out


def _effective_hough(cfg: ExperimentConfig, img_shape: tuple[int, int]) -> HoughParams:
    """Optionally scale num_peaks with image area (reference: Crop4x5)."""
    if not cfg.scale_numpeaks_by_area:
        return cfg.hough
    ref_h, ref_w = CropSpec(4, 5, 1, 0).window(cfg.stimulus)
    factor = (img_shape[0] * img_shape[1]) / (ref_h * ref_w)
    scaled = max(1, round(cfg.hough.num_peaks * factor))
    return HoughParams(scaled, cfg.hough.threshold, cfg.hough.nhood_size,
                       cfg.hough.fill_gap, cfg.hough.min_length)


def _analyze_task(args):
    img, cfg = args
    params = _effective_hough(cfg, img.shape)
    return analyze_image(img, cfg.sigma_values(), cfg.surround_ratio, cfg.window_ratio,
                         cfg.border, params, cfg.binarize_threshold)


def _analyze_task_isolated(args):
    """Per-sample failure isolation: errors become a marker, not a crash."""
    try:
        return None, _analyze_task(args)
    except Exception as exc:  # noqa: BLE001 - recorded, experiment continues
        return f"{type(exc).__name__}: {exc}", None


def derived_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_manifest(outdir: Path, cfg: ExperimentConfig, files: list[Path]) -> dict:
    path = outdir / "manifest.json"
    previous = {}
    if path.exists():
        previous = json.loads(path.read_text()).get("files", {})
    manifest = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": {
            "cafewall": cafewall.__version__,
            "numpy": np.__version__,
        },
        "files": previous | {str(p.relative_to(outdir)): _sha256(p) for p in sorted(files)},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _fmt(x: float) -> str:
    return "nan" if np.isnan(x) else f"{x:.4f}"


def _run_tasks(tasks, jobs: int | None, progress=None):
    """Map _analyze_task over tasks, preserving order."""
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        results = []
        for i, t in enumerate(tasks):
            results.append(_analyze_task_isolated(t))
            if progress:
                progress(i + 1, len(tasks))
        return results
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        results = []
        for i, r in enumerate(pool.map(_analyze_task_isolated, tasks)):
            results.append(r)
            if progress:
                progress(i + 1, len(tasks))
        return results


def run_experiment1(cfg: ExperimentConfig, outdir=None, jobs: int | None = None,
                    overlays: bool = False, progress=None,
                    keep_segments: bool = False) -> ExperimentResult:
    """Crop-sample experiment; writes out/exp1/{cropsize}/{stats,distribution}.csv."""
    stim = stimulus.generate_cafe_wall(cfg.stimulus)
    result = ExperimentResult(cfg)
    files: list[Path] = []
    out = Path(outdir) if outdir is not None else None
    if out is not None:
        (out / "exp1").mkdir(parents=True, exist_ok=True)

    for set_idx, (cr, cc) in enumerate(cfg.crop_sizes):
        crop_name = f"crop{cr}x{cc}"
        cs = CropSpec(cr, cc, cfg.samples, cfg.offset_px,
                      seed=derived_seed(cfg.seed, set_idx))
        crops = stimulus.sample_crops(stim, cfg.stimulus, cs)
        tasks = [(img, cfg) for img in crops]
        seg_maps = _run_tasks(tasks, jobs,
                              progress=(lambda i, n, name=crop_name: progress(name, i, n))
                              if progress else None)

        stats_rows = []
        dist_rows = []
        for sample_id, (error, segs_per_scale) in enumerate(seg_maps):
            if error is not None:
                result.per_sample.append(SampleResult(crop_name, sample_id, []))
                stats_rows.append([sample_id, "", "error", 0, error, "", ""])
                continue
            stats = analysis.aggregate(segs_per_scale)
            result.per_sample.append(SampleResult(
                crop_name, sample_id, stats,
                segs_per_scale if keep_segments else None))
            for s in stats:
                stats_rows.append([sample_id, f"{s.scale:g}", s.bucket, s.count,
                                   _fmt(s.mean_abs_dev), _fmt(s.std_dev), _fmt(s.std_err)])
            for scale, bucket, devn, length in analysis.distribution_table(segs_per_scale):
                dist_rows.append((scale, bucket, devn, length, sample_id))

        if out is not None:
            d = out / "exp1" / crop_name
            d.mkdir(parents=True, exist_ok=True)
            stats_path = d / "stats.csv"
            with open(stats_path, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["sampleId", "scale", "bucket", "count",
                                 "meanAbsDev", "stdDev", "stdErr"])
                writer.writerows(stats_rows)
            dist_path = d / "distribution.csv"
            analysis.write_distribution_csv(dist_rows, dist_path)
            files += [stats_path, dist_path]
            if overlays and seg_maps[0][0] is None:
                files += _write_overlays(d / "overlays", crops[0], cfg, seg_maps[0][1])

    if out is not None:
        result.manifest = _write_manifest(out, cfg, files)
    return result


def run_experiment2(cfg: ExperimentConfig, outdir=None, overlays: bool = False,
                    keep_segments: bool = False) -> ExperimentResult:
    """Whole-pattern experiment; writes out/exp2/stats.csv."""
    stim = stimulus.generate_cafe_wall(cfg.stimulus)
    segs_per_scale = _analyze_task((stim, cfg))
    result = ExperimentResult(cfg, whole=analysis.aggregate(segs_per_scale))
    if keep_segments:
        result.per_sample.append(SampleResult("whole", 0, result.whole, segs_per_scale))
    if outdir is not None:
        out = Path(outdir)
        d = out / "exp2"
        d.mkdir(parents=True, exist_ok=True)
        stats_path = d / "stats.csv"
        analysis.write_stats_csv(result.whole, stats_path)
        files = [stats_path]
        if overlays:
            files += _write_overlays(d / "overlays", stim, cfg, segs_per_scale)
        result.manifest = _write_manifest(out, cfg, files)
    return result


def _write_overlays(outdir: Path, img: np.ndarray, cfg: ExperimentConfig,
                    segs_per_scale: dict[float, list[LineSegment]]) -> list[Path]:
    from PIL import Image

    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    responses = dog.apply_dog_stack(img, cfg.sigma_values(), cfg.surround_ratio,
                                    cfg.window_ratio, cfg.border)
    for sigma, resp in zip(cfg.sigma_values(), responses):
        bm = dog.binarize(resp, cfg.binarize_threshold)
        rgb = hough.render_overlay(bm, segs_per_scale[sigma])
        path = outdir / f"overlay_sigma{sigma:g}.png"
        Image.fromarray(rgb).save(path, format="PNG")
        written.append(path)
    return written
