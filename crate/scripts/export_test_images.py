"""Export the bundled 256x256 grayscale test images.

Sources are the public-domain / CC0 sample images shipped with
scikit-image (see skimage.data). Each image is converted to grayscale,
center-cropped to 256x256 and written as binary PGM.
"""

import pathlib
import sys

import numpy as np
from skimage import data
from skimage.color import rgb2gray

NAMES = ["camera", "astronaut", "coffee", "chelsea", "brick"]
SIZE = 256


def load(name):
    img = getattr(data, name)()
    if img.ndim == 3:
        img = rgb2gray(img)
    img = np.asarray(img, dtype=np.float64)
    if img.max() > 1.0:
        img = img / 255.0
    h, w = img.shape
    r, c = (h - SIZE) // 2, (w - SIZE) // 2
    return img[r : r + SIZE, c : c + SIZE]


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in NAMES:
        px = np.floor(load(name) * 255.0 + 0.5).clip(0, 255).astype(np.uint8)
        header = f"P5\n{SIZE} {SIZE}\n255\n".encode()
        (out / f"{name}.pgm").write_bytes(header + px.tobytes())
        print(name, px.mean() / 255.0)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data")
