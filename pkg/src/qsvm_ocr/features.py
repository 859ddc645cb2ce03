"""Glyph images to two-component feature vectors.

A glyph is binarized (dark ink on a light background), split by its middle
column and middle row, and reduced to

    v = ink(left half) / ink(right half)
    h = ink(upper half) / ink(lower half)

For an odd width (height) the central column (row) belongs to neither half.
An affine ConversionMap then moves the raw ratios into the range the
classifier was trained on.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# training anchors for the standard-font '6' and '9'
X1 = (0.9872, 0.1595)
X2 = (0.3544, 0.9351)


class FeatureError(ValueError):
    pass


class PgmFormatError(FeatureError):
    """Unsupported or malformed portable graymap."""


class TruncatedPgmError(PgmFormatError):
    pass


class BlankHalfError(FeatureError):
    """A half of the glyph has no ink, so a ratio is undefined."""


@dataclass(frozen=True)
class GlyphImage:
    width: int
    height: int
    max_value: int
    pixels: np.ndarray  # (height, width), row-major

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if self.width < 2 or self.height < 2:
            raise FeatureError(f"glyph must be at least 2x2, got {self.width}x{self.height}")
        if px.shape != (self.height, self.width):
            raise FeatureError(f"pixel array shape {px.shape} != ({self.height}, {self.width})")


@dataclass(frozen=True)
class InkMask:
    bits: np.ndarray  # bool, (height, width)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]


@dataclass(frozen=True)
class FeatureVector:
    v: float
    h: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.h])


@dataclass(frozen=True)
class ConversionMap:
    A: np.ndarray
    c: np.ndarray
    normalize: bool = False

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).reshape(2, 2)
        if abs(np.linalg.det(A)) < 1e-15:
            raise FeatureError("conversion matrix is singular")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(2))

    def __call__(self, fv: FeatureVector) -> FeatureVector:
        out = self.A @ fv.as_array() + self.c
        if self.normalize:
            out = out / np.linalg.norm(out)
        return FeatureVector(float(out[0]), float(out[1]))


# -- PGM ----------------------------------------------------------------------

_HEADER = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def load_image(data: bytes) -> GlyphImage:
    """Parse a P2 (plain) or P5 (raw) PGM with maxval <= 255."""
    if data[:2] not in (b"P2", b"P5"):
        raise PgmFormatError(f"unsupported magic number {data[:2]!r}; expected P2 or P5")
    magic = data[:2]
    pos = 2
    fields = []
    for _ in range(3):
        m = _HEADER.match(data, pos)
        if m is None:
            raise TruncatedPgmError("header ends before width, height and maxval")
        fields.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise PgmFormatError(f"non-integer header fields {fields}") from None
    if width <= 0 or height <= 0:
        raise PgmFormatError(f"zero image dimension {width}x{height}")
    if not 0 < maxval <= 255:
        raise PgmFormatError(f"maxval {maxval} outside 1..255")
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        raster = data[pos + 1:]
        if len(raster) < count:
            raise TruncatedPgmError(f"expected {count} raster bytes, found {len(raster)}")
        pixels = np.frombuffer(raster[:count], dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < count:
            raise TruncatedPgmError(f"expected {count} samples, found {len(body)}")
        try:
            pixels = np.array([int(t) for t in body[:count]])
        except ValueError:
            raise PgmFormatError("non-integer sample in plain PGM raster") from None
    if pixels.max() > maxval:
        raise PgmFormatError(f"sample {pixels.max()} exceeds maxval {maxval}")
    return GlyphImage(width, height, maxval, pixels.astype(np.int64).reshape(height, width))


def read_image(path) -> GlyphImage:
    return load_image(Path(path).read_bytes())


def binarize(img: GlyphImage, threshold_fraction: float = 0.5, invert: bool = False) -> InkMask:
    """Ink where intensity < threshold_fraction * max_value (light ink if ``invert``)."""
    if not 0 < threshold_fraction < 1:
        raise FeatureError(f"threshold_fraction must be in (0, 1), got {threshold_fraction}")
    cut = threshold_fraction * img.max_value
    bits = img.pixels >= cut if invert else img.pixels < cut
    return InkMask(np.asarray(bits, dtype=bool))


def _half_counts(bits: np.ndarray, axis: int) -> tuple[int, int]:
    n = bits.shape[axis]
    first = np.take(bits, range(n // 2), axis=axis).sum()
    second = np.take(bits, range((n + 1) // 2, n), axis=axis).sum()
    return int(first), int(second)


def ratios(mask: InkMask) -> FeatureVector:
    """Raw (vertical, horizontal) ink ratios."""
    if not mask.bits.any():
        raise BlankHalfError("glyph has no ink")
    left, right = _half_counts(mask.bits, axis=1)
    upper, lower = _half_counts(mask.bits, axis=0)
    for name, count in (("left", left), ("right", right), ("upper", upper), ("lower", lower)):
        if count == 0:
            raise BlankHalfError(f"{name} half of the glyph has no ink")
    return FeatureVector(left / right, upper / lower)


def featurize(img: GlyphImage, conversion: ConversionMap, threshold_fraction: float = 0.5) -> FeatureVector:
    return conversion(ratios(binarize(img, threshold_fraction)))


# -- calibration and presets --------------------------------------------------

def calibrate(raw_6: FeatureVector, raw_9: FeatureVector, target_6=X1, target_9=X2) -> ConversionMap:
    """Diagonal affine map sending raw_6 -> target_6 and raw_9 -> target_9 exactly."""
    r6, r9 = raw_6.as_array(), raw_9.as_array()
    t6, t9 = np.asarray(target_6, dtype=float), np.asarray(target_9, dtype=float)
    span = r6 - r9
    if np.any(np.abs(span) < 1e-12):
        raise FeatureError("standard glyphs share a ratio; a diagonal fit is undetermined")
    scale = (t6 - t9) / span
    return ConversionMap(np.diag(scale), t6 - scale * r6, normalize=False)


# fitted to the bundled standard_6.pgm / standard_9.pgm by calibrate()
_CALIBRATED_SCALE = (1.1874607287449392, 1.522939271255061)
_CALIBRATED_SHIFT = (-0.5691805668016195, -1.0588514170040488)

DEFAULT_PRESET = "paper"

PRESETS = {
    "identity": ConversionMap(np.eye(2), np.zeros(2), normalize=False),
    DEFAULT_PRESET: ConversionMap(np.diag(_CALIBRATED_SCALE), np.array(_CALIBRATED_SHIFT), normalize=False),
}


def asset_dir() -> Path:
    override = os.environ.get("QSVM_ASSET_DIR")
    return Path(override) if override else Path(__file__).parent / "assets"


STANDARD_GLYPHS = ("standard_6.pgm", "standard_9.pgm")
HANDWRITTEN_GLYPHS = tuple(f"hand_{i}_{'6' if i % 2 else '9'}.pgm" for i in range(1, 9))
