"""Harris response kernel: Sobel derivatives, windowed gradient products,
and the corner response, both full-frame and per-patch.

The two evaluation paths are deliberately different implementations of the
same arithmetic: the full-frame path runs separable filters over the whole
image, the patch path gathers a mirror-extended local region and evaluates
only the requested pixel. They agree to ~1e-12 relative everywhere,
including image borders.

Conventions (fixed, and what the tests pin down):

* correlation, not convolution — a dark-to-bright step left-to-right gives
  a positive x-derivative;
* derivative kernels are the classic binomial-smoothed central difference
  ([-1,0,1] for aperture 3, [-1,-2,0,2,1] for 5, ...), unnormalised;
* gradient products are aggregated with a block *mean* (box filter);
* borders are reflect-101 ("mirror") padded;
* scores are raw — thresholds are interpreted on unnormalised responses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.ndimage as ndi
from numpy.lib.stride_tricks import sliding_window_view

from .errors import GeometryViolation, ImageTooSmall, InvalidParameter


@dataclass(frozen=True)
class HarrisParams:
    block_size: int = 7
    sobel_aperture: int = 5
    kappa: float = 0.04

    def __post_init__(self):
        if self.sobel_aperture < 3 or self.sobel_aperture % 2 == 0:
            raise InvalidParameter(f"sobel_aperture must be odd and >= 3, got {self.sobel_aperture}")
        if self.block_size < 1 or self.block_size % 2 == 0:
            raise InvalidParameter(f"block_size must be odd and >= 1, got {self.block_size}")
        if not (self.kappa > 0 and np.isfinite(self.kappa)):
            raise InvalidParameter(f"kappa must be finite and > 0, got {self.kappa}")


def deriv_kernels(aperture: int) -> tuple[np.ndarray, np.ndarray]:
    """1-D (derivative, smoothing) kernel pair for a given Sobel aperture."""
    if aperture < 3 or aperture % 2 == 0:
        raise InvalidParameter(f"aperture must be odd and >= 3, got {aperture}")
    smooth = np.array([1.0])
    for _ in range(aperture - 1):
        smooth = np.convolve(smooth, [1.0, 1.0])  # binomial row, length = aperture
    deriv = np.array([-1.0, 0.0, 1.0])
    for _ in range((aperture - 3) // 2):
        deriv = np.convolve(deriv, [1.0, 2.0, 1.0])
    return deriv, smooth


def _check_image(image, aperture: int) -> np.ndarray:
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidParameter(f"expected 2-D image, got shape {img.shape}")
    if min(img.shape) < aperture:
        raise ImageTooSmall(f"image {img.shape} smaller than aperture {aperture}")
    return img


def sobel_derivatives(image, params: HarrisParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel partial derivatives d/dx, d/dy with reflect-101 borders."""
    img = _check_image(image, params.sobel_aperture)
    kd, ks = deriv_kernels(params.sobel_aperture)
    ix = ndi.correlate1d(ndi.correlate1d(img, kd, axis=1, mode="mirror"), ks, axis=0, mode="mirror")
    iy = ndi.correlate1d(ndi.correlate1d(img, kd, axis=0, mode="mirror"), ks, axis=1, mode="mirror")
    return ix, iy


def harris_response_map(image, params: HarrisParams = HarrisParams()) -> np.ndarray:
    """Full-frame Harris response R = det(M) - kappa * tr(M)^2."""
    ix, iy = sobel_derivatives(image, params)
    b = params.block_size
    gxx = ndi.uniform_filter(ix * ix, b, mode="mirror")
    gyy = ndi.uniform_filter(iy * iy, b, mode="mirror")
    gxy = ndi.uniform_filter(ix * iy, b, mode="mirror")
    tr = gxx + gyy
    return gxx * gyy - gxy * gxy - params.kappa * tr * tr


def _mirror_indices(n: int, pad: int) -> np.ndarray:
    """Reflect-101 index map for coordinates [-pad, n + pad)."""
    idx = np.abs(np.arange(-pad, n + pad))
    period = 2 * (n - 1) if n > 1 else 1
    idx = idx % period
    return np.where(idx >= n, period - idx, idx).astype(np.intp)


class PatchEvaluator:
    """Evaluates the Harris response at single pixels of a fixed-size image.

    Precomputes mirror index maps and flattened 2-D kernels so the per-call
    cost is a small gather plus two mat-vecs. Near the border the product
    Ix*Iy needs a sign fix: under reflect-101 the x-derivative is odd in x
    and even in y (vice versa for Iy), so a folded sample flips the sign of
    exactly one factor. Squares are unaffected; the cross term is corrected
    with a per-cell sign table.
    """

    def __init__(self, shape: tuple[int, int], params: HarrisParams = HarrisParams()):
        h, w = shape
        self.params = params
        bw = params.block_size // 2
        sr = params.sobel_aperture // 2
        self.reach = bw + sr
        if min(h, w) <= 2 * self.reach:
            raise ImageTooSmall(
                f"image {shape} too small for block {params.block_size} "
                f"+ aperture {params.sobel_aperture}"
            )
        self.h, self.w = h, w
        self.bw, self.sr = bw, sr
        self.mrow = _mirror_indices(h, self.reach)
        self.mcol = _mirror_indices(w, self.reach)
        kd, ks = deriv_kernels(params.sobel_aperture)
        self.kx = np.outer(ks, kd).ravel()  # smooth rows vertically, differentiate x
        self.ky = np.outer(kd, ks).ravel()
        b = params.block_size
        self.inv_bb = 1.0 / (b * b)
        # sign of a block-window cell's coordinate fold (x and y separately)
        folded_r = (np.arange(-self.reach, h + self.reach) < 0) | (
            np.arange(-self.reach, h + self.reach) >= h
        )
        folded_c = (np.arange(-self.reach, w + self.reach) < 0) | (
            np.arange(-self.reach, w + self.reach) >= w
        )
        self.sign_row = np.where(folded_r, -1.0, 1.0)
        self.sign_col = np.where(folded_c, -1.0, 1.0)
        self._span = 2 * self.reach + 1
        self._wshape = (params.sobel_aperture, params.sobel_aperture)
        self._bb = b * b

    def region(self, image: np.ndarray, x: int, y: int) -> np.ndarray:
        """Mirror-extended (block + aperture - 1)^2 region centred on (x, y)."""
        rows = self.mrow[y : y + self._span]
        cols = self.mcol[x : x + self._span]
        return image[np.ix_(rows, cols)]

    def response_from_region(self, region: np.ndarray, x: int, y: int) -> float:
        wv = sliding_window_view(region, self._wshape).reshape(self._bb, -1)
        gx = wv @ self.kx
        gy = wv @ self.ky
        gxx = (gx @ gx) * self.inv_bb
        gyy = (gy @ gy) * self.inv_bb
        bw = self.bw
        if bw <= x < self.w - bw and bw <= y < self.h - bw:
            gxy = (gx @ gy) * self.inv_bb
        else:
            s = np.outer(
                self.sign_row[y + self.sr : y + self.sr + 2 * bw + 1],
                self.sign_col[x + self.sr : x + self.sr + 2 * bw + 1],
            ).ravel()
            gxy = float(np.dot(gx * gy, s)) * self.inv_bb
        tr = gxx + gyy
        return gxx * gyy - gxy * gxy - self.params.kappa * tr * tr

    def response(self, image: np.ndarray, x: int, y: int) -> float:
        return self.response_from_region(self.region(image, x, y), x, y)


def harris_response_patch(image, x: int, y: int, params: HarrisParams = HarrisParams()) -> float:
    """Harris response at (x, y); identical value to the full-frame map."""
    img = _check_image(image, params.sobel_aperture)
    h, w = img.shape
    if not (0 <= x < w and 0 <= y < h):
        raise GeometryViolation(f"({x},{y}) outside image {w}x{h}")
    ev = PatchEvaluator(img.shape, params)
    return ev.response(img, int(x), int(y))
