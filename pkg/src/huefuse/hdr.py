"""HDR radiance recovery and synthetic exposure-stack rendering."""

from __future__ import annotations

import numpy as np

from .core import LUMA_WEIGHTS, CrfTable, ExposureStack, LdrImage, RadianceMap, dequantize, quantize
from .crf import hat_weight

_CH = np.arange(3)


def recover_radiance(stack: ExposureStack, crf: CrfTable) -> RadianceMap:
    """Merge a stack into per-channel log radiance.

    Each pixel/channel is the hat-weighted average over exposures of
    g_inv(code) - ln(dt). Pixels saturated in every exposure get the
    middle exposure's single-image estimate instead.
    """
    log_dt = np.log(stack.times)
    num = np.zeros(stack.shape)
    den = np.zeros(stack.shape)
    fallback = None
    for j, im in enumerate(stack.images):
        z = quantize(im.data)
        g = crf.data[z, _CH]
        w = hat_weight(z)
        num += w * (g - log_dt[j])
        den += w
        if j == stack.middle_index:
            fallback = g - log_dt[j]
    covered = den > 0.0
    y = np.where(covered, num / np.where(covered, den, 1.0), fallback)
    return RadianceMap(y)


def anchor_scale(ground_truth: RadianceMap, gamma: float = 2.2, target_code: int = 118) -> float:
    """Exposure scale that sends the scene's median luminance to target_code.

    Pinning the 0-EV render this way makes synthetic experiments
    reproducible without any absolute radiometric calibration.
    """
    lum = np.exp(ground_truth.data) @ LUMA_WEIGHTS
    med = float(np.median(lum))
    if not (np.isfinite(med) and med > 0.0):
        raise ValueError("median luminance must be positive to anchor exposure")
    return (target_code / 255.0) ** gamma / med


def render_exposure(
    ground_truth: RadianceMap,
    ev: float = 0.0,
    gamma: float = 2.2,
    scale: float | None = None,
) -> LdrImage:
    """Display-referred render of an HDR map at one exposure offset.

    Simulates a capture: linear radiance scaled by 2**ev, a power-curve
    response clip(q ** (1/gamma)), then 8-bit quantization. scale=None
    applies the median-luminance anchor.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    s = anchor_scale(ground_truth, gamma) if scale is None else scale
    q = np.exp(ground_truth.data) * (s * 2.0**ev)
    v = np.clip(q ** (1.0 / gamma), 0.0, 1.0)
    return LdrImage(dequantize(quantize(v)))


def synth_stack(
    ground_truth: RadianceMap,
    evs,
    gamma: float = 2.2,
    scale: float | None = None,
    base_time: float = 1.0,
) -> ExposureStack:
    """Render a bracketed stack from ground-truth radiance."""
    evs = tuple(float(e) for e in evs)
    if not evs:
        raise ValueError("need at least one exposure value")
    s = anchor_scale(ground_truth, gamma) if scale is None else scale
    images = tuple(render_exposure(ground_truth, ev, gamma, s) for ev in evs)
    return ExposureStack(images, evs, base_time)
