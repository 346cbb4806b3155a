import numpy as np
import pytest

from evcorner import (
    GeometryViolation,
    HarrisParams,
    ImageTooSmall,
    InvalidParameter,
    harris_response_map,
    harris_response_patch,
    sobel_derivatives,
)

from oracles import naive_harris_map, naive_sobel


def corner_image(size=32, value=255):
    """Ideal 90-degree corner: bright quadrant on dark background."""
    img = np.zeros((size, size))
    img[size // 2 :, size // 2 :] = value
    return img


def rel_err(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def test_constant_image_zero_derivatives_and_response():
    img = np.full((16, 16), 137.0)
    p = HarrisParams()
    ix, iy = sobel_derivatives(img, p)
    assert np.allclose(ix, 0) and np.allclose(iy, 0)
    assert np.allclose(harris_response_map(img, p), 0)


def test_step_edge_derivative_signs():
    img = np.zeros((16, 16))
    img[:, 8:] = 255.0
    p = HarrisParams()
    ix, iy = sobel_derivatives(img, p)
    assert np.allclose(iy, 0)
    assert (ix[:, 7] > 0).all() and (ix[:, 8] > 0).all()
    assert np.allclose(ix[:, :5], 0) and np.allclose(ix[:, 11:], 0)


@pytest.mark.parametrize("aperture", [3, 5, 7])
def test_sobel_matches_naive_convolution(aperture):
    rng = np.random.default_rng(aperture)
    img = rng.integers(0, 256, (16, 16)).astype(np.float64)
    p = HarrisParams(sobel_aperture=aperture)
    ix, iy = sobel_derivatives(img, p)
    nix, niy = naive_sobel(img, aperture)
    assert rel_err(ix, nix).max() <= 1e-9
    assert rel_err(iy, niy).max() <= 1e-9


def test_map_matches_naive_map():
    rng = np.random.default_rng(7)
    img = rng.integers(0, 256, (14, 17)).astype(np.float64)
    p = HarrisParams(block_size=5, sobel_aperture=3)
    got = harris_response_map(img, p)
    want = naive_harris_map(img, 5, 3, p.kappa)
    assert rel_err(got, want).max() <= 1e-9


def test_ideal_corner_sign_pattern():
    img = corner_image(32)
    p = HarrisParams()
    r = harris_response_map(img, p)
    apex = r[16, 16]
    horiz_edge = r[16, 24]  # along one straight edge, away from the apex
    vert_edge = r[24, 16]
    assert apex > horiz_edge and apex > vert_edge
    assert horiz_edge < 0 and vert_edge < 0
    assert apex > 0


def test_patch_equals_map_everywhere():
    rng = np.random.default_rng(1)
    p = HarrisParams()
    img = rng.integers(0, 256, (20, 24)).astype(np.float64)
    m = harris_response_map(img, p)
    for y in range(20):
        for x in range(24):
            v = harris_response_patch(img, x, y, p)
            assert rel_err(np.array(v), m[y, x]).max() <= 1e-9


def test_patch_step_edge_negative():
    img = np.zeros((24, 24))
    img[:, 12:] = 255.0
    assert harris_response_patch(img, 12, 12) < 0


def test_rotation_covariance():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, (24, 24)).astype(np.float64)
    p = HarrisParams()
    r = harris_response_map(img, p)
    r_rot = harris_response_map(np.rot90(img), p)
    scale = np.maximum(1.0, np.abs(r_rot))
    assert (np.abs(r_rot - np.rot90(r)) / scale).max() <= 1e-9


def test_contrast_scaling_quartic():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 128, (20, 20)).astype(np.float64)
    p = HarrisParams()
    r1 = harris_response_map(img, p)
    r2 = harris_response_map(img * 2.0, p)
    mask = np.abs(r1) > 1e3  # exclude near-zero responses
    assert np.allclose(r2[mask] / r1[mask], 16.0, rtol=1e-9)


def test_errors():
    p = HarrisParams()
    with pytest.raises(ImageTooSmall):
        harris_response_map(np.zeros((4, 4)), p)
    with pytest.raises(GeometryViolation):
        harris_response_patch(np.zeros((20, 20)), 20, 0, p)
    with pytest.raises(InvalidParameter):
        HarrisParams(sobel_aperture=4)
    with pytest.raises(InvalidParameter):
        HarrisParams(block_size=2)
    with pytest.raises(InvalidParameter):
        HarrisParams(kappa=0.0)
