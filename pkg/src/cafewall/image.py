"""Grayscale image I/O and export helpers.

Images are plain 2-D float64 numpy arrays in row-major order. Stimulus
luminance lives in [0, 1]; DoG response maps are signed.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image


def as_image(arr) -> np.ndarray:
    """Validate and coerce an array-like into a 2-D float64 image."""
    img = np.asarray(arr, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a nonempty 2-D image, got shape {img.shape}")
    return img


def to_u8(img: np.ndarray) -> np.ndarray:
    """Map [0,1] luminance to 8-bit, round-half-up, clipping out-of-range."""
    scaled = np.clip(img, 0.0, 1.0) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def from_u8(raw: np.ndarray) -> np.ndarray:
    return raw.astype(np.float64) / 255.0


def write_pgm(img: np.ndarray, path) -> None:
    """Write a binary (P5) 8-bit PGM."""
    u8 = to_u8(as_image(img))
    h, w = u8.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(u8.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != ord("\n"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ValueError(f"not a binary PGM: magic {fields[0]!r}")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ValueError(f"only 8-bit PGM supported, maxval {maxval}")
    pos += 1  # single whitespace after maxval
    raw = np.frombuffer(data, dtype=np.uint8, count=h * w, offset=pos)
    return from_u8(raw.reshape(h, w))


def write_png(img: np.ndarray, path) -> None:
    Image.fromarray(to_u8(as_image(img)), mode="L").save(path, format="PNG")


def read_image(path) -> np.ndarray:
    """Read PNG/PGM (or anything Pillow handles) as [0,1] grayscale."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    with Image.open(path) as im:
        return from_u8(np.asarray(im.convert("L")))


# Diverging colormap for signed response maps: blue -> white -> red,
# white pinned at zero (jetwhite-style presentation).
_NEG = np.array([0.0, 0.2, 1.0])
_POS = np.array([1.0, 0.1, 0.0])


def falsecolor(resp: np.ndarray) -> np.ndarray:
    """Render a signed map as an HxWx3 uint8 diverging false-color image."""
    resp = as_image(resp)
    peak = np.max(np.abs(resp))
    t = resp / peak if peak > 0 else np.zeros_like(resp)
    rgb = np.ones(resp.shape + (3,))
    neg = t < 0
    pos = t > 0
    rgb[neg] = 1.0 + t[neg, None] * (1.0 - _NEG)[None, :]
    rgb[pos] = 1.0 - t[pos, None] * (1.0 - _POS)[None, :]
    return np.floor(np.clip(rgb, 0, 1) * 255.0 + 0.5).astype(np.uint8)


def write_falsecolor_png(resp: np.ndarray, path) -> None:
    Image.fromarray(falsecolor(resp), mode="RGB").save(path, format="PNG")


_RESP_MAGIC = b"CWRM"


def write_response_raw(resp: np.ndarray, scale: float, path) -> None:
    """Raw float32 dump: magic, height, width, scale header + data."""
    resp = as_image(resp)
    h, w = resp.shape
    with open(path, "wb") as f:
        f.write(_RESP_MAGIC)
        f.write(struct.pack("<IIf", h, w, float(scale)))
        f.write(resp.astype("<f4").tobytes())


def read_response_raw(path) -> tuple[np.ndarray, float]:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _RESP_MAGIC:
            raise ValueError(f"bad response-map magic {magic!r}")
        h, w, scale = struct.unpack("<IIf", f.read(12))
        data = np.frombuffer(f.read(4 * h * w), dtype="<f4")
    return data.astype(np.float64).reshape(h, w), scale
