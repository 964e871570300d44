"""Image file IO: binary PGM (P5) / PPM (P6) with maxval 255, and 8-bit PNG."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .image import Image, from_u8, to_u8


class ImageFileError(IOError):
    pass


class UnsupportedFormat(ImageFileError):
    pass


_PNM_MAGIC = {b"P5": 1, b"P6": 3}
_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _parse_pnm(buf: bytes, name: str) -> Image:
    magic = buf[:2]
    if magic not in _PNM_MAGIC:
        raise UnsupportedFormat(f"{name}: unsupported PNM magic {magic!r} (only P5/P6)")
    channels = _PNM_MAGIC[magic]
    pos = 2
    fields = []
    for _ in range(3):
        m = _TOKEN.match(buf, pos)
        if m is None:
            raise ImageFileError(f"{name}: truncated header")
        try:
            fields.append(int(m.group(1)))
        except ValueError:
            raise ImageFileError(f"{name}: bad header field {m.group(1)!r}") from None
        pos = m.end()
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedFormat(f"{name}: maxval {maxval} not supported (need 255)")
    if pos >= len(buf) or not buf[pos:pos + 1].isspace():
        raise ImageFileError(f"{name}: missing whitespace after header")
    pos += 1
    size = width * height * channels
    body = buf[pos:pos + size]
    if len(body) != size:
        raise ImageFileError(f"{name}: truncated pixel data ({len(body)} of {size} bytes)")
    return from_u8(body, width, height, channels)


def _pnm_bytes(img: Image) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    return header + to_u8(img)


def load(path) -> Image:
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise ImageFileError(f"{path}: {exc.strerror or exc}") from exc
    if buf[:1] == b"P":
        return _parse_pnm(buf, str(path))
    if buf[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise UnsupportedFormat(f"{path}: unrecognized image format")


def _load_png(path: Path) -> Image:
    from PIL import Image as PILImage

    try:
        with PILImage.open(path) as im:
            im.load()
            if im.mode in ("L", "RGB"):
                arr = np.asarray(im, dtype=np.uint8)
            else:
                raise UnsupportedFormat(f"{path}: PNG mode {im.mode} not supported (8-bit gray/RGB only)")
    except UnsupportedFormat:
        raise
    except Exception as exc:
        raise ImageFileError(f"{path}: cannot decode PNG ({exc})") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return Image(arr / 255.0)


def save(path, img: Image) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        if suffix == ".pgm" and img.channels != 1:
            raise ImageFileError(f"{path}: PGM needs a gray image")
        if suffix == ".ppm" and img.channels != 3:
            raise ImageFileError(f"{path}: PPM needs a color image")
        path.write_bytes(_pnm_bytes(img))
    elif suffix == ".png":
        from PIL import Image as PILImage

        arr = np.frombuffer(to_u8(img), dtype=np.uint8).reshape(img.shape)
        PILImage.fromarray(arr[:, :, 0] if img.channels == 1 else arr).save(path)
    else:
        raise UnsupportedFormat(f"{path}: unknown extension {suffix!r}")
