"""Inverse camera response estimation from an exposure stack.

Per channel, fits a 256-entry code -> log-exposure table by linear least
squares in the style of Debevec & Malik's calibration: hat-weighted data
equations over sampled pixels, a weighted curvature penalty, and the mid
code pinned to zero. The solution is then projected to be monotone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LEVELS, LUMA_WEIGHTS, MID_CODE, CrfTable, ExposureStack, quantize


class CrfEstimationError(RuntimeError):
    """The calibration system cannot be solved for this stack/config."""


@dataclass(frozen=True)
class CrfSolveConfig:
    """Solver knobs for inverse-response estimation."""

    sample_count: int = 100
    smoothness: float = 50.0
    seed: int = 0  # reserved for randomized samplers; the rank rule ignores it
    levels: int = LEVELS

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if not (np.isfinite(self.smoothness) and self.smoothness >= 0.0):
            raise ValueError("smoothness must be a finite non-negative value")
        if self.levels != LEVELS:
            raise ValueError(f"only {LEVELS}-level tables are supported")


def hat_weight(z, z_min: int = 0, z_max: int = LEVELS - 1):
    """Triangular code weight: zero at the saturated ends, peak mid-range."""
    z = np.asarray(z, dtype=np.float64)
    return np.where(z <= 0.5 * (z_min + z_max), z - z_min, z_max - z)


def sample_pixels(stack: ExposureStack, cfg: CrfSolveConfig = CrfSolveConfig()) -> np.ndarray:
    """Stratified spatial sample for the calibration system.

    Sorts the middle exposure's grayscale values and takes flat pixel
    indices at evenly spaced ranks, so the sample spans the intensity
    range and is identical on every run.
    """
    gray = stack.images[stack.middle_index].data @ LUMA_WEIGHTS
    flat = gray.reshape(-1)
    n = flat.size
    p = cfg.sample_count
    if p > n:
        raise ValueError(f"cannot draw {p} distinct pixels from an image with {n}")
    order = np.argsort(flat, kind="stable")
    ranks = ((2 * np.arange(p, dtype=np.int64) + 1) * n) // (2 * p)
    return order[ranks]


def estimate_inverse_crf(stack: ExposureStack, cfg: CrfSolveConfig = CrfSolveConfig()) -> CrfTable:
    """Estimate the per-channel inverse response table from a stack.

    Raises CrfEstimationError when the system is underdetermined or rank
    deficient (too little exposure variation to pin the curve down).
    """
    n_img = len(stack)
    if cfg.sample_count * (n_img - 1) <= cfg.levels - 2:
        raise CrfEstimationError(
            f"underdetermined system: sample_count*(N-1) = "
            f"{cfg.sample_count * (n_img - 1)} must exceed {cfg.levels - 2}; "
            "raise --samples or add exposures"
        )
    idx = sample_pixels(stack, cfg)
    log_dt = np.log(stack.times)
    # codes[i, j, ch]: sampled pixel i in exposure j
    codes = np.stack([quantize(im.data.reshape(-1, 3)[idx]) for im in stack.images], axis=1)
    table = np.empty((cfg.levels, 3))
    for ch in range(3):
        table[:, ch] = _solve_channel(codes[:, :, ch], log_dt, cfg)
    return CrfTable(table)


def _solve_channel(z: np.ndarray, log_dt: np.ndarray, cfg: CrfSolveConfig) -> np.ndarray:
    levels = cfg.levels
    w = hat_weight(z)
    usable = w.sum(axis=1) > 0.0
    z = z[usable]
    w = w[usable]
    n_px = z.shape[0]
    if n_px == 0:
        raise CrfEstimationError("every sampled pixel is saturated in all exposures")

    pix, exp = np.nonzero(w)
    n_data = pix.size
    n_cols = levels + n_px
    a = np.zeros((n_data + 1 + (levels - 2), n_cols))
    b = np.zeros(a.shape[0])

    rows = np.arange(n_data)
    wij = w[pix, exp]
    a[rows, z[pix, exp]] = wij
    a[rows, levels + pix] = -wij
    b[rows] = wij * log_dt[exp]

    a[n_data, MID_CODE] = 1.0  # pin the additive gauge

    zz = np.arange(1, levels - 1)
    wz = cfg.smoothness * hat_weight(zz)
    rows = n_data + 1 + np.arange(levels - 2)
    a[rows, zz - 1] = wz
    a[rows, zz] = -2.0 * wz
    a[rows, zz + 1] = wz

    sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < n_cols:
        raise CrfEstimationError(
            f"calibration system is rank deficient (rank {rank} of {n_cols}); "
            "the stack carries too little exposure variation"
        )
    g = monotone_projection(sol[:levels])
    return g - g[MID_CODE]


def monotone_projection(y) -> np.ndarray:
    """Nearest non-decreasing sequence in least squares (pool adjacent violators)."""
    vals: list[float] = []
    counts: list[int] = []
    for v in np.asarray(y, dtype=np.float64):
        vals.append(float(v))
        counts.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            v2, c2 = vals.pop(), counts.pop()
            v1, c1 = vals.pop(), counts.pop()
            vals.append((v1 * c1 + v2 * c2) / (c1 + c2))
            counts.append(c1 + c2)
    return np.repeat(vals, counts)
