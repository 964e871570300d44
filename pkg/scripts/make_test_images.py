"""Export the 256x256 benchmark images used by the tests and scripts.

Sources are the images bundled with scikit-image, center-cropped to a square
and downsampled with a Lanczos filter.  Output goes to ``data/gray`` (PGM)
and ``data/color`` (PPM).
"""
import argparse
from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

GRAY = {"astronaut": data.astronaut, "camera": data.camera, "coffee": data.coffee}
COLOR = {"astronaut": data.astronaut, "coffee": data.coffee, "chelsea": data.chelsea}


def _square(arr, size):
    h, w = arr.shape[:2]
    s = min(h, w)
    y0, x0 = (h - s) // 2, (w - s) // 2
    img = Image.fromarray(arr[y0:y0 + s, x0:x0 + s])
    return img.resize((size, size), Image.LANCZOS)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    ap.add_argument("--size", type=int, default=256)
    args = ap.parse_args()

    (args.out / "gray").mkdir(parents=True, exist_ok=True)
    (args.out / "color").mkdir(parents=True, exist_ok=True)
    for name, fn in GRAY.items():
        img = _square(np.asarray(fn()), args.size).convert("L")
        img.save(args.out / "gray" / f"{name}.pgm")
    for name, fn in COLOR.items():
        img = _square(np.asarray(fn()), args.size).convert("RGB")
        img.save(args.out / "color" / f"{name}.ppm")
    print(f"wrote {len(GRAY)} gray and {len(COLOR)} color images to {args.out}")


if __name__ == "__main__":
    main()
