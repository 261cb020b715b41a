"""Binary Netpbm I/O.

Formats written and read here:

* navigability / class-id images: ``P5`` PGM, maxval 255, one byte per pixel.
* depth images: ``P5`` PGM, maxval 65535, big-endian 16-bit millimeters,
  0 meaning "no return".
* overlay frames: ``P6`` PPM, maxval 255, RGB.
"""

from __future__ import annotations

import os
import re

import numpy as np

from .segmentation import NO_RETURN

_HEADER = re.compile(rb"(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def _write(path, magic: bytes, data: np.ndarray, maxval: int) -> None:
    h, w = data.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"%s\n%d %d\n%d\n" % (magic, w, h, maxval))
        fh.write(data.tobytes())


def write_pgm(path: str | os.PathLike, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("PGM image must be 2-D")
    if image.min(initial=0) < 0:
        raise ValueError("PGM values must be non-negative")
    if image.max(initial=0) <= 255:
        _write(path, b"P5", image.astype(np.uint8), 255)
    elif image.max() <= 65535:
        _write(path, b"P5", image.astype(">u2"), 65535)
    else:
        raise ValueError("PGM values must fit in 16 bits")


def write_ppm(path: str | os.PathLike, rgb: np.ndarray) -> None:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("PPM image must be (H, W, 3)")
    _write(path, b"P6", rgb.astype(np.uint8), 255)


def read_pnm(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    m = _HEADER.match(blob)
    if m is None:
        raise ValueError(f"{path}: not a binary PGM/PPM file")
    magic, w, h, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    channels = 3 if magic == b"P6" else 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    count = w * h * channels
    data = np.frombuffer(blob, dtype=dtype, count=count, offset=m.end())
    shape = (h, w, 3) if channels == 3 else (h, w)
    return data.reshape(shape).astype(np.uint16 if maxval > 255 else np.uint8)


def write_depth_pgm(path: str | os.PathLike, depth_m: np.ndarray) -> None:
    depth = np.asarray(depth_m, dtype=float)
    mm = np.where(np.isfinite(depth) & (depth > NO_RETURN), np.rint(depth * 1000.0), 0)
    if mm.max(initial=0) > 65535:
        raise ValueError("depth beyond 65.535 m cannot be stored as 16-bit millimeters")
    _write(path, b"P5", mm.astype(">u2"), 65535)


def read_depth_pgm(path: str | os.PathLike) -> np.ndarray:
    raw = read_pnm(path)
    if raw.dtype != np.uint16:
        raise ValueError(f"{path}: depth PGM must be 16-bit")
    return raw.astype(float) / 1000.0
