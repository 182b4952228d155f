"""PGM image I/O, flat index mapping, dataset enlargement, ground truth.

All interchange uses netpbm PGM: binary P5 and ASCII P2, with 8- or
16-bit samples (16-bit binary samples are big-endian). Comments starting
with '#' are skipped. Ground truth is a directory holding one binary mask
per tissue class: wm.pgm, gm.pgm, csf.pgm and background.pgm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatchError,
    MalformedHeaderError,
    MissingClassError,
    PgmValueError,
    TruncatedRasterError,
    UnsupportedMagicError,
)
from .metrics import BinaryMask
from .types import GrayImage, LabelMap

GROUND_TRUTH_CLASSES = ("wm", "gm", "csf", "background")

_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True)
class PgmImage:
    """Parsed PGM payload: dimensions, sample ceiling and integer raster."""

    width: int
    height: int
    maxval: int
    raster: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise MalformedHeaderError("image dimensions must be at least 1x1")
        if not 1 <= self.maxval <= 65535:
            raise MalformedHeaderError(f"maxval must lie in [1, 65535], got {self.maxval}")
        raster = np.ascontiguousarray(self.raster, dtype=np.uint16)
        if raster.ndim != 1 or raster.shape[0] != self.width * self.height:
            raise TruncatedRasterError("raster length must equal width*height")
        if raster.shape[0] and int(raster.max()) > self.maxval:
            raise PgmValueError(
                f"raster contains {int(raster.max())}, above maxval {self.maxval}"
            )
        object.__setattr__(self, "raster", raster)


def _skip_filler(data: bytes, pos: int) -> int:
    """Advance past whitespace and '#' comments."""
    size = len(data)
    while pos < size:
        if data[pos : pos + 1] == b"#":
            nl = data.find(b"\n", pos)
            pos = size if nl < 0 else nl + 1
        elif data[pos] in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _next_int(data: bytes, pos: int, what: str) -> tuple:
    pos = _skip_filler(data, pos)
    start = pos
    while pos < len(data) and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise MalformedHeaderError(f"expected an integer for {what}")
    return int(data[start:pos]), pos


def parse_pgm(data: bytes) -> PgmImage:
    """Decode P2 or P5 bytes into a PgmImage."""
    if len(data) < 2 or data[:1] != b"P":
        raise MalformedHeaderError("not a netpbm file (missing P magic)")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedMagicError(f"unsupported netpbm magic {magic!r}; only P2/P5 are read")
    width, pos = _next_int(data, 2, "width")
    height, pos = _next_int(data, pos, "height")
    maxval, pos = _next_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"dimensions must be positive, got {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise MalformedHeaderError(f"maxval must lie in [1, 65535], got {maxval}")
    count = width * height

    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise MalformedHeaderError("a single whitespace byte must follow maxval")
        pos += 1
        sample_bytes = 2 if maxval > 255 else 1
        needed = count * sample_bytes
        raw = data[pos : pos + needed]
        if len(raw) < needed:
            raise TruncatedRasterError(
                f"raster needs {needed} bytes, only {len(raw)} present"
            )
        dtype = ">u2" if sample_bytes == 2 else np.uint8
        raster = np.frombuffer(raw, dtype=dtype).astype(np.uint16)
    else:
        values = np.empty(count, dtype=np.uint16)
        for i in range(count):
            try:
                value, pos = _next_int(data, pos, f"sample {i}")
            except MalformedHeaderError:
                raise TruncatedRasterError(
                    f"raster needs {count} samples, only {i} present"
                ) from None
            if value > maxval:
                raise PgmValueError(f"sample {i} is {value}, above maxval {maxval}")
            values[i] = value
        raster = values

    return PgmImage(width, height, maxval, raster)


def read_pgm(path) -> GrayImage:
    """Read a P2 or P5 file into a GrayImage."""
    data = Path(path).read_bytes()
    pgm = parse_pgm(data)
    return GrayImage(pgm.width, pgm.height, pgm.raster.astype(np.float64))


def _serialize(pgm: PgmImage) -> bytes:
    header = f"P5\n{pgm.width} {pgm.height}\n{pgm.maxval}\n".encode("ascii")
    if pgm.maxval > 255:
        body = pgm.raster.astype(">u2").tobytes()
    else:
        body = pgm.raster.astype(np.uint8).tobytes()
    return header + body


def label_intensity(j: int, c: int) -> int:
    """Gray level used to export cluster j out of c: floor(j*255/(c-1))."""
    if c < 2:
        raise ValueError("label export needs at least 2 clusters")
    return (j * 255) // (c - 1)


def write_pgm(img, path) -> None:
    """Write a GrayImage or LabelMap as binary P5.

    GrayImage intensities must already be integers (maxval becomes 255 or
    65535 depending on the range). LabelMap entries are spread over
    distinct gray levels via label_intensity, so a 4-cluster map uses
    {0, 85, 170, 255}.
    """
    if isinstance(img, LabelMap):
        if img.c < 2:
            raise ValueError("label export needs at least 2 clusters")
        levels = (img.labels.astype(np.int64) * 255) // (img.c - 1)
        pgm = PgmImage(img.width, img.height, 255, levels.astype(np.uint16))
    elif isinstance(img, GrayImage):
        px = img.pixels
        rounded = np.rint(px)
        if not np.array_equal(rounded, px):
            raise ValueError("pixel intensities must be integers to write PGM")
        if px.size and px.max() > 65535:
            raise ValueError("pixel intensities above 65535 cannot be written")
        maxval = 255 if (px.size == 0 or px.max() <= 255) else 65535
        pgm = PgmImage(img.width, img.height, maxval, px.astype(np.uint16))
    else:
        raise TypeError(f"cannot write {type(img).__name__} as PGM")
    Path(path).write_bytes(_serialize(pgm))


def flatten_index(row: int, col: int, width: int, height: int | None = None) -> int:
    """Row-major flat index of (row, col) in an image of the given width."""
    if col < 0 or col >= width:
        raise IndexError(f"column {col} out of range [0, {width})")
    if row < 0 or (height is not None and row >= height):
        raise IndexError(f"row {row} out of range")
    return row * width + col


def membership_index(pixel: int, cluster: int, c: int) -> int:
    """Flat index of membership entry (pixel, cluster) with c clusters."""
    if cluster < 0 or cluster >= c:
        raise IndexError(f"cluster {cluster} out of range [0, {c})")
    if pixel < 0:
        raise IndexError(f"pixel {pixel} out of range")
    return pixel * c + cluster


def enlarge_dataset(img: GrayImage, target_bytes: int) -> GrayImage:
    """Tile whole copies of the image until pixel count reaches the target.

    One pixel counts as one byte. Copies are laid out in a near-square
    grid (gx = ceil(sqrt(tiles)) columns), so the result's width is an
    integer multiple of the original width and the intensity histogram is
    the original scaled by the number of copies.
    """
    current = img.pixel_count
    if target_bytes < current:
        raise ValueError(
            f"target of {target_bytes} bytes is below the current size {current}"
        )
    tiles = -(-target_bytes // current)
    if tiles == 1:
        return img
    gx = math.isqrt(tiles)
    if gx * gx < tiles:
        gx += 1
    gy = -(-tiles // gx)
    grid = np.tile(img.to_array(), (gy, gx))
    return GrayImage(img.width * gx, img.height * gy, grid.reshape(-1))


def read_ground_truth(directory) -> dict:
    """Load one binary mask per tissue class from a directory.

    Expects wm.pgm, gm.pgm, csf.pgm and background.pgm. A pixel is set
    when its intensity exceeds half the file's maxval. All masks must
    share dimensions; overlapping set pixels between two classes raise a
    warning because hard (exclusive) masks are expected.
    """
    directory = Path(directory)
    masks = {}
    for name in GROUND_TRUTH_CLASSES:
        path = directory / f"{name}.pgm"
        if not path.is_file():
            raise MissingClassError(f"ground truth class {name!r} missing: {path}")
        pgm = parse_pgm(path.read_bytes())
        bits = pgm.raster.astype(np.float64) > (pgm.maxval / 2.0)
        masks[name] = BinaryMask(pgm.width, pgm.height, bits)
    first = masks[GROUND_TRUTH_CLASSES[0]]
    for name, mask in masks.items():
        if (mask.width, mask.height) != (first.width, first.height):
            raise DimensionMismatchError(
                f"class {name!r} is {mask.width}x{mask.height}, "
                f"expected {first.width}x{first.height}"
            )
    names = list(masks)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if np.any(np.logical_and(masks[a].bits, masks[b].bits)):
                warnings.warn(
                    f"ground truth classes {a!r} and {b!r} overlap; hard masks expected",
                    stacklevel=2,
                )
    return masks
