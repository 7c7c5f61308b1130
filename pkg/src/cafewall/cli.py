"""Command-line entry point: stage-by-stage pipeline plus the experiment
harness. Machine output goes to files; progress ticks go to stderr."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from cafewall import analysis, dog, experiments, hough, image, stimulus
from cafewall.experiments import ExperimentConfig
from cafewall.hough import HoughParams
from cafewall.stimulus import StimulusSpec


def _parse_config_file(path: str) -> dict[str, str]:
    """Flat `key = value` file, '#' comments."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Precedence: explicit flag > config file > default."""
    if not getattr(args, "config", None):
        return
    file_values = _parse_config_file(args.config)
    explicit = {a.lstrip("-").replace("-", "_").split("=", 1)[0]
                for a in argv if a.startswith("--")}
    for key, raw in file_values.items():
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r} in {args.config}")
        if key in explicit:
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes", "on"))
        elif isinstance(current, int) and not isinstance(current, bool):
            setattr(args, key, int(raw))
        elif isinstance(current, float):
            setattr(args, key, float(raw))
        else:
            setattr(args, key, raw)


def _add_stimulus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rows", type=int, default=9, help="tile rows (default 9)")
    p.add_argument("--cols", type=int, default=14, help="tile columns (default 14)")
    p.add_argument("--tile", type=int, default=200, help="tile size px (default 200)")
    p.add_argument("--mortar", type=int, default=8, help="mortar thickness px (default 8)")
    p.add_argument("--row-shift", type=int, default=None,
                   help="horizontal shift per row px (default tile/2)")
    p.add_argument("--mortar-lum", type=float, default=0.5,
                   help="mortar luminance in [0,1] (default 0.5)")


def _add_dog_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigmas", type=str, default=None,
                   help="comma-separated DoG sigmas (default 0.5M..3.5M from --mortar)")
    p.add_argument("--surround-ratio", type=float, default=2.0,
                   help="surround/center sigma ratio (default 2)")
    p.add_argument("--window-ratio", type=float, default=8.0,
                   help="kernel window ratio (default 8)")
    p.add_argument("--border", choices=dog.BORDER_MODES, default="replicate",
                   help="convolution border mode (default replicate)")
    p.add_argument("--threshold-binarize", type=float, default=0.0,
                   help="edge-map binarization threshold (default 0)")
    p.add_argument("--off-center", action="store_true",
                   help="use OFF-center polarity (negated response)")


def _add_hough_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--numpeaks", type=int, default=100,
                   help="max Hough peaks (default 100)")
    p.add_argument("--threshold", type=int, default=3,
                   help="min votes for a peak (default 3)")
    p.add_argument("--nhood", type=str, default=None,
                   help="suppression window 'RHO,THETA' bins, odd (default bins/50)")
    p.add_argument("--fillgap", type=float, default=40.0,
                   help="max bridgeable along-line gap px (default 40)")
    p.add_argument("--minlength", type=float, default=450.0,
                   help="min kept segment length px (default 450)")


def _stimulus_spec(args) -> StimulusSpec:
    return StimulusSpec(rows=args.rows, cols=args.cols, tile_size=args.tile,
                        mortar_size=args.mortar, row_shift=args.row_shift,
                        mortar_lum=args.mortar_lum)


def _sigma_list(args) -> list[float]:
    if args.sigmas:
        return [float(s) for s in str(args.sigmas).split(",")]
    return dog.sigma_stack(args.mortar)


def _hough_params(args) -> HoughParams:
    nhood = None
    if args.nhood:
        parts = [int(v) for v in str(args.nhood).split(",")]
        if len(parts) != 2:
            raise ValueError(f"--nhood expects 'RHO,THETA', got {args.nhood!r}")
        nhood = (parts[0], parts[1])
    return HoughParams(num_peaks=args.numpeaks, threshold=args.threshold,
                       nhood_size=nhood, fill_gap=args.fillgap, min_length=args.minlength)


def cmd_generate(args) -> int:
    spec = _stimulus_spec(args)
    img = stimulus.generate_cafe_wall(spec)
    out = Path(args.output) if args.output else Path(f"{spec.name}.png")
    if out.suffix.lower() == ".pgm":
        image.write_pgm(img, out)
    else:
        image.write_png(img, out)
    print(out)
    return 0


def cmd_dogmap(args) -> int:
    img = image.read_image(args.input)
    sigmas = _sigma_list(args)
    outdir = Path(args.output) if args.output else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    responses = dog.apply_dog_stack(img, sigmas, args.surround_ratio,
                                    args.window_ratio, args.border)
    for sigma, resp in zip(sigmas, responses):
        if args.off_center:
            resp = dog.off_center(resp)
        if args.binary:
            bm = dog.binarize(resp, args.threshold_binarize)
            path = outdir / f"{stem}_dog{sigma:g}_binary.pgm"
            image.write_pgm(bm.astype(np.float64), path)
        else:
            path = outdir / f"{stem}_dog{sigma:g}.png"
            image.write_falsecolor_png(resp, path)
        if args.raw:
            image.write_response_raw(resp, sigma, outdir / f"{stem}_dog{sigma:g}.rmap")
        print(path)
    return 0


def cmd_analyze(args) -> int:
    img = image.read_image(args.input)
    sigmas = _sigma_list(args)
    params = _hough_params(args)
    outdir = Path(args.output) if args.output else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    segs_per_scale = {}
    responses = dog.apply_dog_stack(img, sigmas, args.surround_ratio,
                                    args.window_ratio, args.border)
    for sigma, resp in zip(sigmas, responses):
        if args.off_center:
            resp = dog.off_center(resp)
        bm = dog.binarize(resp, args.threshold_binarize)
        segs = hough.detect_segments(bm, params)
        segs_per_scale[sigma] = segs
        print(f"sigma {sigma:g}: {len(segs)} segments", file=sys.stderr)
        if args.overlay:
            from PIL import Image
            rgb = hough.render_overlay(bm, segs)
            Image.fromarray(rgb).save(outdir / f"overlay_sigma{sigma:g}.png", format="PNG")
    seg_rows = [(sigma, seg) for sigma in sigmas for seg in segs_per_scale[sigma]]
    hough.write_segments_csv(seg_rows, outdir / "segments.csv")
    analysis.write_stats_csv(analysis.aggregate(segs_per_scale), outdir / "stats.csv")
    print(outdir / "stats.csv")
    return 0


def _experiment_config(args) -> ExperimentConfig:
    sigmas = tuple(float(s) for s in str(args.sigmas).split(",")) if args.sigmas else None
    crop_sizes = ((4, 5), (5, 5), (5, 6))
    if getattr(args, "crop", None):
        crop_sizes = tuple(
            tuple(int(v) for v in c.lower().split("x")) for c in args.crop
        )
        if any(len(c) != 2 for c in crop_sizes):
            raise ValueError(f"--crop expects RxC entries, got {args.crop}")
    return ExperimentConfig(
        stimulus=_stimulus_spec(args),
        sigmas=sigmas,
        surround_ratio=args.surround_ratio,
        window_ratio=args.window_ratio,
        border=args.border,
        binarize_threshold=args.threshold_binarize,
        hough=_hough_params(args),
        crop_sizes=crop_sizes,
        samples=getattr(args, "samples", 50),
        offset_px=getattr(args, "offset", 4),
        seed=args.seed,
        scale_numpeaks_by_area=args.scale_numpeaks_by_area,
    )


def _tick(name: str, i: int, n: int) -> None:
    print(f"\r{name}: {i}/{n}", end="" if i < n else "\n", file=sys.stderr, flush=True)


def cmd_exp1(args) -> int:
    cfg = _experiment_config(args)
    outdir = Path(args.output) if args.output else Path("out")
    experiments.run_experiment1(cfg, outdir, jobs=args.jobs,
                                overlays=args.overlay, progress=_tick)
    print(outdir / "exp1")
    return 0


def cmd_exp2(args) -> int:
    cfg = _experiment_config(args)
    outdir = Path(args.output) if args.output else Path("out")
    experiments.run_experiment2(cfg, outdir, overlays=args.overlay)
    print(outdir / "exp2")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cafewall",
        description="Cafe Wall illusion tilt quantification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="render a Cafe Wall stimulus image")
    _add_stimulus_flags(p)
    p.add_argument("-o", "--output", default=None, help="output PNG/PGM path")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("dogmap", help="DoG response / edge maps per scale")
    p.add_argument("-i", "--input", required=True, help="input grayscale image")
    p.add_argument("--mortar", type=int, default=8,
                   help="mortar px, sets the default sigma stack (default 8)")
    _add_dog_flags(p)
    p.add_argument("--binary", action="store_true", help="write binarized PGM maps")
    p.add_argument("--raw", action="store_true", help="also dump raw float32 responses")
    p.add_argument("-o", "--output", default=None, help="output directory")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.set_defaults(func=cmd_dogmap)

    p = sub.add_parser("analyze", help="full tilt analysis of one image")
    p.add_argument("-i", "--input", required=True, help="input grayscale image")
    p.add_argument("--mortar", type=int, default=8,
                   help="mortar px, sets the default sigma stack (default 8)")
    _add_dog_flags(p)
    _add_hough_flags(p)
    p.add_argument("--overlay", action="store_true", help="write segment overlay PNGs")
    p.add_argument("-o", "--output", default=None, help="output directory")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.set_defaults(func=cmd_analyze)

    for name, fn, helptext in (
        ("exp1", cmd_exp1, "crop-sample experiment (50 samples x 3 crop sizes)"),
        ("exp2", cmd_exp2, "whole-pattern experiment"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_stimulus_flags(p)
        _add_dog_flags(p)
        _add_hough_flags(p)
        if name == "exp1":
            p.add_argument("--crop", action="append", default=None,
                           help="crop size RxC in tiles; repeatable (default 4x5 5x5 5x6)")
            p.add_argument("--samples", type=int, default=50,
                           help="samples per crop size (default 50)")
            p.add_argument("--offset", type=int, default=4,
                           help="horizontal offset between samples px (default 4)")
        p.add_argument("--seed", type=int, default=0, help="experiment RNG seed (default 0)")
        p.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default: available parallelism)")
        p.add_argument("--scale-numpeaks-by-area", action="store_true",
                       help="scale numpeaks with image area relative to Crop4x5")
        p.add_argument("--overlay", action="store_true", help="write segment overlay PNGs")
        p.add_argument("-o", "--output", default=None, help="output directory (default out/)")
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.set_defaults(func=fn)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, argv)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"cafewall: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
