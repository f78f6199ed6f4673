"""Constant-hue-plane color algebra.

Every RGB pixel sits on a triangle spanned by white (1,1,1), black (0,0,0)
and the maximally saturated color of its hue; the decomposition here is
exact and the hue transplant stays inside the triangle, so compensated
pixels never leave the [0,1] gamut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LdrImage, RadianceMap

# Identities below are pure per-pixel arithmetic with no accumulation.
HUE_ATOL = 1e-9

DISPLAY_GAMMA = 2.2


@dataclass(frozen=True)
class HuePlaneCoords:
    """Convex weights of pixels on their white/black/chroma triangle.

    All fields are arrays shaped like the input minus the channel axis;
    for a single (3,) pixel they are scalars. Where `defined` is False the
    pixel is achromatic: a_c is 0 and c holds zeros.
    """

    a_w: np.ndarray  # white weight, min(x)
    a_k: np.ndarray  # black weight, 1 - max(x)
    a_c: np.ndarray  # chroma weight, max(x) - min(x)
    c: np.ndarray  # maximally saturated color, one channel 0 and one 1
    defined: np.ndarray


def max_sat_color(x) -> tuple[np.ndarray, np.ndarray]:
    """Maximally saturated color sharing the hue of each pixel.

    Works elementwise over (..., 3) arrays. Returns (c, defined); a pixel
    with equal channels has no hue, gets defined=False and c=0.
    """
    x = np.asarray(x, dtype=np.float64)
    hi = x.max(axis=-1)
    lo = x.min(axis=-1)
    spread = hi - lo
    defined = spread > 0.0
    c = (x - lo[..., None]) / np.where(defined, spread, 1.0)[..., None]
    c = np.where(defined[..., None], c, 0.0)
    return c, defined


def decompose(x) -> HuePlaneCoords:
    """Split pixels into white/black/chroma weights plus the hue color.

    The weights are the unique convex combination reproducing x exactly:
    a_w + a_c * c recomposes the pixel channel-wise.
    """
    x = np.asarray(x, dtype=np.float64)
    hi = x.max(axis=-1)
    lo = x.min(axis=-1)
    c, defined = max_sat_color(x)
    return HuePlaneCoords(a_w=lo, a_k=1.0 - hi, a_c=hi - lo, c=c, defined=defined)


def transplant_hue(x, c_new, c_defined) -> np.ndarray:
    """Rebuild pixels with their hue color replaced by c_new.

    Keeps each pixel's white and chroma weights, so min and max channels
    are preserved. Pixels where either hue is undefined pass through
    unchanged. Elementwise over (..., 3).
    """
    x = np.asarray(x, dtype=np.float64)
    c_new = np.asarray(c_new, dtype=np.float64)
    d = decompose(x)
    out = d.a_w[..., None] + d.a_c[..., None] * c_new
    keep = ~(d.defined & np.asarray(c_defined, dtype=bool))
    out = np.where(keep[..., None], x, out)
    # analytically inside [a_w, a_w + a_c] already; clip float dust only
    return np.clip(out, 0.0, 1.0)


def compensate_pixel(x_f, c_h) -> np.ndarray:
    """Single-pixel hue transplant; c_h is a (3,) color or None (no hue)."""
    x_f = np.asarray(x_f, dtype=np.float64)
    if c_h is None:
        return x_f.copy()
    return transplant_hue(x_f, c_h, True)


def radiance_hue(radiance: RadianceMap, gamma_encode: bool = False):
    """Hue color of each HDR pixel, from linear radiance by default.

    With gamma_encode the radiance is display-gamma encoded (1/2.2) before
    the hue is taken; the two give slightly different hues because the
    saturated-color map is not invariant under per-channel power curves.
    """
    y = radiance.data
    # hue is scale-free per pixel, so shift exponents to dodge exp overflow
    y = y - y.max(axis=-1, keepdims=True)
    if gamma_encode:
        y = y / DISPLAY_GAMMA
    return max_sat_color(np.exp(y))


def compensate_image(fused: LdrImage, radiance: RadianceMap, gamma_encode: bool = False) -> LdrImage:
    """Replace the hue of every fused pixel with the HDR radiance hue."""
    if fused.data.shape != radiance.data.shape:
        raise ValueError(
            f"fused image {fused.data.shape[:2]} and radiance map "
            f"{radiance.data.shape[:2]} differ in size"
        )
    c_h, h_defined = radiance_hue(radiance, gamma_encode)
    return LdrImage(transplant_hue(fused.data, c_h, h_defined))
