import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kerneltv.image import DimensionError, Image
from kerneltv.kernels import Gaussian, Polynomial
from kerneltv.metrics import (
    ScoreFileError,
    area_ratio,
    external_scores,
    format_db,
    psnr,
    select_kernel_param,
    surface_area,
)

images = arrays(np.float64, st.tuples(st.integers(2, 6), st.integers(2, 6), st.sampled_from([1, 3])),
                elements=st.floats(0, 1)).map(Image)


def test_psnr_identical():
    img = Image(np.full((3, 3), 0.3))
    assert psnr(img, img) == math.inf
    assert format_db(psnr(img, img)) == "inf"


def test_psnr_uniform_error():
    assert psnr(Image(np.full((4, 4), 0.5)), Image(np.full((4, 4), 0.6))) == pytest.approx(20.0, abs=1e-12)


def test_psnr_single_wrong_pixel():
    a = Image(np.zeros((2, 2)))
    b = Image(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert psnr(a, b) == pytest.approx(10 * math.log10(4), rel=1e-15)
    assert psnr(a, b) == pytest.approx(6.0206, abs=1e-4)


def test_psnr_dimension_mismatch():
    with pytest.raises(DimensionError):
        psnr(Image(np.zeros((2, 2))), Image(np.zeros((2, 3))))


@settings(max_examples=25)
@given(arrays(np.float64, (4, 4, 3), elements=st.floats(0, 1)),
       arrays(np.float64, (4, 4, 3), elements=st.floats(0, 1)))
def test_psnr_symmetric_and_channel_invariant(a, b):
    perm = [2, 0, 1]
    assert psnr(Image(a), Image(b)) == psnr(Image(b), Image(a))
    assert psnr(Image(a[:, :, perm]), Image(b[:, :, perm])) == pytest.approx(psnr(Image(a), Image(b)))


@pytest.mark.parametrize("k", [None, Gaussian(0.3), Polynomial(1.7)])
def test_constant_area_is_flat(k):
    assert surface_area(Image.constant(7, 5, (0.3, 0.6, 0.9)), k) == 35.0


def test_checkerboard_area_hand_oracle():
    u = [[0.0, 1.0], [1.0, 0.0]]

    def at(y, x):
        return u[min(max(y, 0), 1)][min(max(x, 0), 1)]

    total = 0.0
    for y in range(2):
        for x in range(2):
            gx = 0.5 * (at(y, x + 1) - at(y, x - 1))
            gy = 0.5 * (at(y + 1, x) - at(y - 1, x))
            total += math.sqrt((1 + gx * gx) * (1 + gy * gy) - (gx * gy) ** 2)
    assert surface_area(Image(np.array(u))) == pytest.approx(total, rel=1e-15)
    assert total == pytest.approx(4 * math.sqrt(1.5))


@given(images)
def test_area_at_least_pixel_count(img):
    assert surface_area(img) >= img.width * img.height * (1 - 1e-15)


@given(arrays(np.float64, (5, 6), elements=st.floats(0, 1)).map(Image))
def test_linear_kernel_ratio_is_one(img):
    rep = area_ratio(img, Polynomial(1.0))
    assert rep.ratio == 1.0
    assert rep.param == 1.0


def test_ratio_monotone_on_bright_texture(rng):
    # d * a^(d-1) grows with d only for a > exp(-1/d); keep the texture bright
    img = Image(rng.uniform(0.7, 1.0, size=(24, 24)))
    _, poly = select_kernel_param(img, Polynomial, [1.1, 1.4, 1.7, 2.0])
    _, gauss = select_kernel_param(img, Gaussian, [0.1, 0.4, 0.7, 1.0])
    assert all(a.ratio < b.ratio for a, b in zip(poly, poly[1:]))
    assert all(a.ratio > b.ratio for a, b in zip(gauss, gauss[1:]))


def test_select_exact_match_and_ties(rng):
    img = Image(rng.uniform(size=(8, 8)))
    param, reports = select_kernel_param(img, Polynomial, [0.8, 1.0, 1.5])
    assert param == 1.0 and len(reports) == 3
    # a constant image gives ratio 1 everywhere: ties go to the smaller value
    param, _ = select_kernel_param(Image(np.full((4, 4), 0.5)), Gaussian, [0.5, 0.2, 0.9])
    assert param == 0.2
    with pytest.raises(ValueError):
        select_kernel_param(img, Gaussian, [])


@pytest.mark.parametrize("text, expected", [
    ("img01,4.72\n", {"img01": 4.72}),
    ("", {}),
    ("id,score\na,1\n\nb, 2.5\n", {"a": 1.0, "b": 2.5}),
])
def test_external_scores(tmp_path, text, expected):
    path = tmp_path / "s.csv"
    path.write_text(text)
    assert external_scores(path) == expected


@pytest.mark.parametrize("text, line", [("img01,abc\n", 1), ("a,1\nb,2,3\n", 2)])
def test_external_scores_errors(tmp_path, text, line):
    path = tmp_path / "s.csv"
    path.write_text(text)
    with pytest.raises(ScoreFileError, match=f"line {line}"):
        external_scores(path)
