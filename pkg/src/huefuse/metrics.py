"""Hue-difference scoring: the CIEDE2000 hue term averaged over an image."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LdrImage

VARIANTS = ("raw_dHp", "sh_normalized")

_D65 = np.array([0.95047, 1.0, 1.08883])
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_LAB_DELTA = 6.0 / 29.0


def srgb_to_lab(x) -> np.ndarray:
    """sRGB values in [0, 1] to CIE L*a*b* (D65 white), over (..., 3)."""
    x = np.asarray(x, dtype=np.float64)
    lin = np.where(x <= 0.04045, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)
    t = (lin @ _SRGB_TO_XYZ.T) / _D65
    f = np.where(t > _LAB_DELTA**3, np.cbrt(t), t / (3.0 * _LAB_DELTA**2) + 4.0 / 29.0)
    lum = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return np.stack([lum, a, b], axis=-1)


def ciede2000_hue_diff(lab1, lab2, variant: str = "raw_dHp") -> np.ndarray:
    """|dH'|, the hue-difference term of CIEDE2000, over (..., 3) Lab arrays.

    "raw_dHp" returns the bare term; "sh_normalized" divides by the S_H
    weighting function (k_H = 1). Angles follow the published hue rules,
    including the a* rescaling and wraparound; neutral pixels give 0.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    lab1 = np.asarray(lab1, dtype=np.float64)
    lab2 = np.asarray(lab2, dtype=np.float64)
    a1, b1 = lab1[..., 1], lab1[..., 2]
    a2, b2 = lab2[..., 1], lab2[..., 2]

    cbar = 0.5 * (np.hypot(a1, b1) + np.hypot(a2, b2))
    g = 0.5 * (1.0 - np.sqrt(cbar**7 / (cbar**7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = np.degrees(np.arctan2(b1, a1p)) % 360.0
    h2p = np.degrees(np.arctan2(b2, a2p)) % 360.0

    dh = h2p - h1p
    dh = np.where(dh > 180.0, dh - 360.0, dh)
    dh = np.where(dh < -180.0, dh + 360.0, dh)
    # the sqrt factor is 0 whenever either chroma is 0, so no neutral mask
    dhp = 2.0 * np.sqrt(c1p * c2p) * np.sin(np.radians(dh) / 2.0)
    out = np.abs(dhp)

    if variant == "sh_normalized":
        hsum = h1p + h2p
        habs = np.abs(h1p - h2p)
        hbar = np.where(
            c1p * c2p == 0.0,
            hsum,
            np.where(
                habs <= 180.0,
                0.5 * hsum,
                np.where(hsum < 360.0, 0.5 * (hsum + 360.0), 0.5 * (hsum - 360.0)),
            ),
        )
        t = (
            1.0
            - 0.17 * np.cos(np.radians(hbar - 30.0))
            + 0.24 * np.cos(np.radians(2.0 * hbar))
            + 0.32 * np.cos(np.radians(3.0 * hbar + 6.0))
            - 0.20 * np.cos(np.radians(4.0 * hbar - 63.0))
        )
        out = out / (1.0 + 0.015 * 0.5 * (c1p + c2p) * t)
    return out


@dataclass(frozen=True)
class HueDiffReport:
    """Mean hue difference over an image pair."""

    mean_dh: float
    pixels: int
    excluded: int
    variant: str

    def __post_init__(self):
        if not (np.isfinite(self.mean_dh) and self.mean_dh >= 0.0):
            raise ValueError("mean hue difference must be finite and non-negative")

    def as_dict(self) -> dict:
        return {
            "mean_dH": self.mean_dh,
            "pixels": self.pixels,
            "excluded": self.excluded,
            "variant": self.variant,
        }


def image_hue_diff(
    a: LdrImage,
    b: LdrImage,
    variant: str = "raw_dHp",
    exclude_clipped: bool = False,
) -> HueDiffReport:
    """Mean per-pixel hue difference between two display-referred images.

    exclude_clipped drops pixels with any channel at 0 or 1 in either
    image (their hue is unreliable after sensor clipping).
    """
    if a.data.shape != b.data.shape:
        raise ValueError(
            f"images differ in size: {a.data.shape[:2]} vs {b.data.shape[:2]}"
        )
    d = ciede2000_hue_diff(srgb_to_lab(a.data), srgb_to_lab(b.data), variant)
    if exclude_clipped:
        clipped = np.zeros(d.shape, dtype=bool)
        for img in (a, b):
            clipped |= ((img.data <= 0.0) | (img.data >= 1.0)).any(axis=-1)
        used = d[~clipped]
        excluded = int(clipped.sum())
    else:
        used = d.reshape(-1)
        excluded = 0
    if used.size == 0:
        raise ValueError("every pixel was excluded from the hue comparison")
    return HueDiffReport(
        mean_dh=float(used.mean()),
        pixels=int(used.size),
        excluded=excluded,
        variant=variant,
    )
