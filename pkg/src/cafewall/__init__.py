"""Cafe Wall tilt quantification: stimulus generation, multiscale DoG
filtering, Hough line-segment extraction, and tilt statistics."""

__version__ = "0.1.0"

from cafewall.stimulus import StimulusSpec, CropSpec, generate_cafe_wall, crop, sample_crops
from cafewall.dog import (
    DoGParams,
    window_size,
    gaussian_kernel,
    dog_kernel,
    convolve,
    apply_dog_stack,
    off_center,
    binarize,
)
from cafewall.hough import (
    HoughParams,
    HoughAccumulator,
    Peak,
    LineSegment,
    hough_transform,
    find_peaks,
    extract_segments,
)
from cafewall.analysis import (
    BUCKETS,
    TiltStats,
    segment_angle,
    bucket_of,
    aggregate,
    distribution_table,
)
from cafewall.experiments import ExperimentConfig, run_experiment1, run_experiment2

__all__ = [
    "StimulusSpec", "CropSpec", "generate_cafe_wall", "crop", "sample_crops",
    "DoGParams", "window_size", "gaussian_kernel", "dog_kernel", "convolve",
    "apply_dog_stack", "off_center", "binarize",
    "HoughParams", "HoughAccumulator", "Peak", "LineSegment",
    "hough_transform", "find_peaks", "extract_segments",
    "BUCKETS", "TiltStats", "segment_angle", "bucket_of", "aggregate",
    "distribution_table",
    "ExperimentConfig", "run_experiment1", "run_experiment2",
]
