import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerneltv.image import DimensionError, Image, channel_view, from_u8, stack_channels, to_u8


@pytest.mark.parametrize("byte, value", [(255, 1.0), (0, 0.0), (128, 128 / 255)])
def test_from_u8_scale(byte, value):
    img = from_u8(bytes([byte]), 1, 1, 1)
    assert img.data[0, 0, 0] == value


def test_from_u8_128_decimal():
    assert abs(from_u8(b"\x80", 1, 1, 1).data.item() - 0.50196) < 1e-5


@pytest.mark.parametrize("value, byte", [(1.0, 255), (0.4, 102), (0.0, 0)])
def test_to_u8_examples(value, byte):
    assert to_u8(Image(np.full((1, 1), value))) == bytes([byte])


def test_to_u8_clamps_overshoot():
    assert to_u8(np.array([[[1.2, -0.3]]])) == bytes([255, 0])


def test_u8_roundtrip_all_bytes():
    raw = bytes(range(256))
    assert to_u8(from_u8(raw, 16, 16, 1)) == raw
    assert to_u8(from_u8(raw * 3, 16, 16, 3)) == raw * 3


@given(st.binary(min_size=12, max_size=12))
def test_u8_roundtrip_color(raw):
    img = from_u8(raw, 2, 2, 3)
    assert img.pixel(1, 0).shape == (3,)
    assert to_u8(img) == raw


def test_row_major_interleaved_layout():
    img = from_u8(bytes([0, 51, 102, 153, 204, 255]), 2, 1, 3)
    assert img.width == 2 and img.height == 1
    np.testing.assert_allclose(img.pixel(1, 0), [0.6, 0.8, 1.0])


def test_from_u8_size_mismatch():
    with pytest.raises(DimensionError):
        from_u8(b"\x00\x01\x02", 2, 2, 1)


@pytest.mark.parametrize("bad", [np.full((2, 2), 1.5), np.full((2, 2), -0.1), np.full((2, 2), np.nan)])
def test_intensity_invariant(bad):
    with pytest.raises(ValueError):
        Image(bad)


def test_channel_count_invariant():
    with pytest.raises(DimensionError):
        Image(np.zeros((2, 2, 2)))


def test_image_is_read_only():
    img = Image(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        img.data[0, 0, 0] = 1.0
    arr = img.array()
    arr[0, 0, 0] = 1.0  # the copy is writable
    assert img.data[0, 0, 0] == 0.0


def test_channel_view_examples():
    img = Image.constant(4, 3, (0.2, 0.4, 0.6))
    g = channel_view(img, 1)
    assert g.channels == 1 and g.shape == (3, 4, 1)
    assert np.all(g.data == 0.4)
    gray = Image(np.random.default_rng(0).uniform(size=(3, 3)))
    assert channel_view(gray, 0) == gray
    with pytest.raises(IndexError):
        channel_view(img, 3)


def test_stack_channels_inverts_channel_view():
    img = Image(np.random.default_rng(1).uniform(size=(4, 5, 3)))
    assert stack_channels([channel_view(img, c) for c in range(3)]) == img


def test_clamped():
    img = Image.clamped(np.array([[-0.5, 0.25, 1.5]]))
    np.testing.assert_array_equal(img.data[0, :, 0], [0.0, 0.25, 1.0])
