"""Image container with normalized intensities.

Images hold a float64 array of shape ``(height, width, channels)`` with values
in ``[0, 1]``.  Pixel ``(x, y)`` is ``data[y, x]``: x is the column, y the row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised when buffer sizes or image shapes disagree."""


@dataclass(frozen=True, eq=False)
class Image:
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise DimensionError(f"expected (H, W, 1|3) array, got shape {arr.shape}")
        if arr.size and (np.isnan(arr).any() or arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("image intensities must lie in [0, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @classmethod
    def clamped(cls, arr) -> "Image":
        """Build an image from solver output, clamping into [0, 1]."""
        return cls(np.clip(np.asarray(arr, dtype=np.float64), 0.0, 1.0))

    @classmethod
    def constant(cls, width: int, height: int, value) -> "Image":
        value = np.atleast_1d(np.asarray(value, dtype=np.float64))
        return cls(np.broadcast_to(value, (height, width, value.size)))

    def pixel(self, x: int, y: int) -> np.ndarray:
        return self.data[y, x]

    def array(self) -> np.ndarray:
        """Writable copy of the intensity buffer."""
        return self.data.copy()

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"Image(width={self.width}, height={self.height}, channels={self.channels})"


def from_u8(raw, width: int, height: int, channels: int) -> Image:
    """Interpret a row-major, channel-interleaved byte buffer as an image."""
    buf = np.frombuffer(bytes(raw), dtype=np.uint8)
    if buf.size != width * height * channels:
        raise DimensionError(
            f"buffer has {buf.size} bytes, expected {width}x{height}x{channels}"
        )
    return Image(buf.reshape(height, width, channels) / 255.0)


def to_u8(img) -> bytes:
    """Quantize to bytes; accepts an Image or a raw (possibly out-of-range) array."""
    data = img.data if isinstance(img, Image) else np.asarray(img, dtype=np.float64)
    # np.rint rounds half to even; i*255 never lands on .5 for i = b/255
    scaled = np.rint(data * 255.0)
    return np.clip(scaled, 0, 255).astype(np.uint8).tobytes()


def channel_view(img: Image, c: int) -> Image:
    if not 0 <= c < img.channels:
        raise IndexError(f"channel {c} out of range for {img.channels}-channel image")
    return Image(img.data[:, :, c:c + 1])


def stack_channels(channels) -> Image:
    return Image(np.concatenate([ch.data for ch in channels], axis=2))
