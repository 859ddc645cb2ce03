"""Regenerate the bundled glyph assets.

Standard glyphs are rendered from STIX General (a Times-style serif shipped
with matplotlib). Handwritten-style glyphs are drawn as jittered pen strokes
from a fixed seed. Output is deterministic for a given Pillow/font version;
the committed PGM files are the source of truth, this script only documents
how they were made.

    python3 tools/make_glyphs.py [outdir]
"""

import math
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

import matplotlib

FONT = Path(matplotlib.get_data_path()) / "fonts/ttf/STIXGeneral.ttf"
OUT = Path(__file__).resolve().parents[1] / "src/qsvm_ocr/assets"


def crop_to_ink(img, pad=2):
    arr = np.asarray(img)
    ys, xs = np.nonzero(arr < 128)
    box = (xs.min() - pad, ys.min() - pad, xs.max() + 1 + pad, ys.max() + 1 + pad)
    return img.crop(box)


def render_standard(char, size=48):
    font = ImageFont.truetype(str(FONT), size)
    img = Image.new("L", (size * 2, size * 2), 255)
    ImageDraw.Draw(img).text((size // 2, size // 4), char, font=font, fill=0)
    return crop_to_ink(img)


def six_stroke(rng):
    """Pen path for a '6': stem from the top right down the left side into a bottom loop."""
    cx, cy = 0.0, 0.45
    rx, ry = 0.42 + rng.uniform(-0.05, 0.05), 0.38 + rng.uniform(-0.04, 0.04)
    pts = []
    # stem: descending arc on the left side
    for t in np.linspace(0, 1, 30):
        ang = math.pi * (0.35 + 0.65 * t)
        pts.append((0.15 + 0.55 * math.cos(ang) * (1 - 0.3 * t), -0.9 + 1.35 * t - 0.1 * math.sin(ang)))
    # loop: full turn around the lower bowl, starting at its left edge
    for t in np.linspace(0, 2 * math.pi * 0.97, 60):
        pts.append((cx - rx * math.cos(t), cy + ry * math.sin(t)))
    return pts


def nine_stroke(rng):
    """A '9' is the '6' path turned half a revolution, redrawn with its own jitter."""
    return [(-x, -y) for x, y in six_stroke(rng)]


def render_handwritten(path_fn, rng, size=40):
    pts = path_fn(rng)
    shear = rng.uniform(-0.25, 0.25)
    scale = size * 0.45
    pts = [
        (
            size + scale * (x + shear * y) + rng.normal(0, 0.6),
            size + scale * y + rng.normal(0, 0.6),
        )
        for x, y in pts
    ]
    img = Image.new("L", (size * 2, size * 2), 255)
    draw = ImageDraw.Draw(img)
    width = int(rng.integers(3, 6))
    draw.line(pts, fill=int(rng.integers(0, 60)), width=width, joint="curve")
    return crop_to_ink(img)


def write_pgm(img, path, ascii_form=False):
    arr = np.asarray(img, dtype=np.uint8)
    h, w = arr.shape
    if ascii_form:
        rows = "\n".join(" ".join(str(v) for v in row) for row in arr)
        path.write_text(f"P2\n# {path.name}\n{w} {h}\n255\n{rows}\n")
    else:
        path.write_bytes(f"P5\n{w} {h}\n255\n".encode() + arr.tobytes())


def main(outdir=OUT):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_pgm(render_standard("6"), outdir / "standard_6.pgm")
    write_pgm(render_standard("9"), outdir / "standard_9.pgm")
    rng = np.random.default_rng(20150421)
    for i in range(4):
        write_pgm(render_handwritten(six_stroke, rng), outdir / f"hand_{2 * i + 1}_6.pgm", ascii_form=i % 2 == 0)
        write_pgm(render_handwritten(nine_stroke, rng), outdir / f"hand_{2 * i + 2}_9.pgm", ascii_form=i % 2 == 1)


if __name__ == "__main__":
    main(*sys.argv[1:])
