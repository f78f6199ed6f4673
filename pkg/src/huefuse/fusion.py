"""Exposure fusion after Mertens et al.: per-pixel quality weights blended
through Laplacian/Gaussian pyramids."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve, correlate1d

from .core import LUMA_WEIGHTS, ExposureStack, LdrImage

logger = logging.getLogger(__name__)

WEIGHT_EPS = 1e-12

# 5-tap binomial filter; borders mirror without repeating the edge sample
_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
_LAPLACIAN = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class FusionWeights:
    """Exponents of the Mertens quality measures plus pyramid depth."""

    contrast: float = 1.0
    saturation: float = 1.0
    well_exposedness: float = 1.0
    sigma: float = 0.2
    depth: int | None = None  # downsampling steps; None = floor(log2(min side))

    def __post_init__(self):
        exps = (self.contrast, self.saturation, self.well_exposedness)
        if any(e < 0 for e in exps):
            raise ValueError("measure exponents must be non-negative")
        if not any(e > 0 for e in exps):
            raise ValueError("at least one measure exponent must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.depth is not None and self.depth < 0:
            raise ValueError("depth must be non-negative")


def _blur(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    out = correlate1d(img, kernel, axis=0, mode="mirror")
    return correlate1d(out, kernel, axis=1, mode="mirror")


def pyr_down(img: np.ndarray) -> np.ndarray:
    """Blur and keep every second row/column (ceil halving)."""
    return _blur(img, _KERNEL)[::2, ::2]


def pyr_up(img: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Zero-insert to `shape` and blur with the doubled kernel."""
    if tuple(img.shape[2:]) != tuple(shape[2:]) or any(
        -(-s // 2) != d for s, d in zip(shape[:2], img.shape[:2])
    ):
        raise ValueError(f"cannot upsample {img.shape} to {shape}")
    up = np.zeros(shape, dtype=np.float64)
    up[::2, ::2] = img
    return _blur(up, 2.0 * _KERNEL)


def auto_depth(height: int, width: int) -> int:
    """Default pyramid depth: halve until the short side reaches 1."""
    return int(math.floor(math.log2(min(height, width))))


def gaussian_pyramid(img: np.ndarray, depth: int) -> list[np.ndarray]:
    levels = [np.asarray(img, dtype=np.float64)]
    for _ in range(depth):
        levels.append(pyr_down(levels[-1]))
    return levels


def laplacian_pyramid(img: np.ndarray, depth: int) -> list[np.ndarray]:
    g = gaussian_pyramid(img, depth)
    return [g[i] - pyr_up(g[i + 1], g[i].shape) for i in range(depth)] + [g[-1]]


def collapse_pyramid(levels: list[np.ndarray]) -> np.ndarray:
    out = levels[-1]
    for lap in levels[-2::-1]:
        out = pyr_up(out, lap.shape) + lap
    return out


def quality_weights(stack: ExposureStack, w: FusionWeights = FusionWeights()) -> np.ndarray:
    """Normalized per-image weight maps, shape (N, h, w).

    Measures: contrast |Laplacian of luma|, saturation std over RGB,
    well-exposedness Gaussian around 0.5 multiplied over channels. The
    product gets a small floor so all-flat columns still normalize.
    """
    maps = []
    for im in stack.images:
        x = im.data
        contrast = np.abs(convolve(x @ LUMA_WEIGHTS, _LAPLACIAN, mode="mirror"))
        saturation = x.std(axis=-1)
        wellexp = np.exp(-((x - 0.5) ** 2) / (2.0 * w.sigma**2)).prod(axis=-1)
        maps.append(
            contrast**w.contrast * saturation**w.saturation * wellexp**w.well_exposedness
            + WEIGHT_EPS
        )
    m = np.stack(maps)
    return m / m.sum(axis=0)


def _blend_collapse(stack: ExposureStack, w: FusionWeights) -> np.ndarray:
    """Collapsed weighted pyramid blend, before the final gamut clamp."""
    h, width = stack.shape[:2]
    depth = auto_depth(h, width)
    if w.depth is not None:
        depth = min(depth, w.depth)
    weights = quality_weights(stack, w)
    blended: list[np.ndarray] | None = None
    for j, im in enumerate(stack.images):
        lap = laplacian_pyramid(im.data, depth)
        gw = gaussian_pyramid(weights[j], depth)
        terms = [l * g[..., None] for l, g in zip(lap, gw)]
        if blended is None:
            blended = terms
        else:
            blended = [acc + t for acc, t in zip(blended, terms)]
    return collapse_pyramid(blended)


def fuse(stack: ExposureStack, w: FusionWeights = FusionWeights()) -> LdrImage:
    """Fuse a bracketed stack into one display-referred image."""
    out = _blend_collapse(stack, w)
    overshoot = max(float(-out.min()), float(out.max() - 1.0), 0.0)
    logger.debug("fusion clamp magnitude: %.3g", overshoot)
    return LdrImage(np.clip(out, 0.0, 1.0))
