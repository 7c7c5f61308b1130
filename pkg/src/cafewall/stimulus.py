"""Cafe Wall stimulus generation and foveal crop sampling.

A stimulus is rows of square tiles alternating dark/light, with thin
horizontal mortar strips of intermediate luminance between tile rows.
Successive tile rows are shifted horizontally, alternating direction,
which produces the familiar staggered-brick look.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cafewall.image import as_image


@dataclass(frozen=True)
class StimulusSpec:
    rows: int = 9
    cols: int = 14
    tile_size: int = 200
    mortar_size: int = 8
    row_shift: int | None = None  # px; defaults to tile_size // 2
    mortar_lum: float = 0.5
    dark_lum: float = 0.0
    light_lum: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"rows/cols must be >= 1, got {self.rows}x{self.cols}")
        if self.tile_size < 1:
            raise ValueError(f"tile_size must be >= 1, got {self.tile_size}")
        if self.mortar_size < 0:
            raise ValueError(f"mortar_size must be >= 0, got {self.mortar_size}")
        if not (self.dark_lum < self.mortar_lum < self.light_lum):
            raise ValueError(
                "luminance ordering violated: need dark < mortar < light, got "
                f"{self.dark_lum}, {self.mortar_lum}, {self.light_lum}"
            )
        if not (0 <= self.shift < self.tile_size):
            raise ValueError(f"row_shift must be in [0, tile_size), got {self.row_shift}")

    @property
    def shift(self) -> int:
        return self.tile_size // 2 if self.row_shift is None else self.row_shift

    @property
    def height(self) -> int:
        return self.rows * self.tile_size + (self.rows - 1) * self.mortar_size

    @property
    def width(self) -> int:
        return self.cols * self.tile_size

    @property
    def name(self) -> str:
        return f"cafewall_{self.rows}x{self.cols}_T{self.tile_size}_M{self.mortar_size}"


@dataclass(frozen=True)
class CropSpec:
    crop_rows: int
    crop_cols: int
    sample_count: int = 50
    offset_px: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.crop_rows < 1 or self.crop_cols < 1:
            raise ValueError("crop window must span at least one tile")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.offset_px < 0:
            raise ValueError("offset_px must be >= 0")

    def window(self, spec: StimulusSpec) -> tuple[int, int]:
        """Pixel (height, width): crop_rows tile rows with interior mortar."""
        t, m = spec.tile_size, spec.mortar_size
        return self.crop_rows * t + (self.crop_rows - 1) * m, self.crop_cols * t


def generate_cafe_wall(spec: StimulusSpec) -> np.ndarray:
    """Render the stimulus. Tile rows alternate dark/light starting dark;
    row k is rolled horizontally by the cumulative alternating shift
    (0, +shift, 0, +shift, ...) with wrap-around."""
    t, m = spec.tile_size, spec.mortar_size
    img = np.full((spec.height, spec.width), spec.mortar_lum)

    # one unshifted tile row: dark, light, dark, ...
    tile_lums = np.where(np.arange(spec.cols) % 2 == 0, spec.dark_lum, spec.light_lum)
    base_row = np.repeat(tile_lums, t)

    offset = 0
    for r in range(spec.rows):
        y0 = r * (t + m)
        img[y0 : y0 + t, :] = np.roll(base_row, offset)[None, :]
        offset += spec.shift if r % 2 == 0 else -spec.shift
    return img


def crop(img: np.ndarray, top: int, left: int, h: int, w: int) -> np.ndarray:
    """Exact sub-raster, no resampling."""
    img = as_image(img)
    if top < 0 or left < 0 or h < 1 or w < 1:
        raise ValueError(f"invalid crop rectangle ({top}, {left}, {h}, {w})")
    if top + h > img.shape[0] or left + w > img.shape[1]:
        raise ValueError(
            f"crop ({top}, {left}, {h}, {w}) exceeds image {img.shape[0]}x{img.shape[1]}"
        )
    return img[top : top + h, left : left + w].copy()


def sample_crops(img: np.ndarray, spec: StimulusSpec, cs: CropSpec) -> list[np.ndarray]:
    """Draw a seeded random top-left, then slide the window right by
    offset_px per sample. All samples share the top edge."""
    img = as_image(img)
    if cs.sample_count > 1 and cs.offset_px < 1:
        raise ValueError("offset_px must be >= 1 when taking multiple samples")
    if cs.sample_count * cs.offset_px > spec.tile_size:
        raise ValueError(
            f"sample_count*offset_px = {cs.sample_count * cs.offset_px} exceeds "
            f"tile_size {spec.tile_size}; samples would leave the sampling convention"
        )
    h, w = cs.window(spec)
    travel = (cs.sample_count - 1) * cs.offset_px
    max_top = img.shape[0] - h
    max_left = img.shape[1] - w - travel
    if max_top < 0 or max_left < 0:
        raise ValueError(
            f"crop window {h}x{w} plus {travel}px travel does not fit in "
            f"image {img.shape[0]}x{img.shape[1]}"
        )
    rng = np.random.default_rng(cs.seed)
    top = int(rng.integers(0, max_top + 1))
    left = int(rng.integers(0, max_left + 1))
    return [crop(img, top, left + k * cs.offset_px, h, w) for k in range(cs.sample_count)]
