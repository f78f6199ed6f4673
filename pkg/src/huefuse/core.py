"""Shared image and exposure-stack types. No algorithms live here."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEVELS = 256
MID_CODE = LEVELS // 2

# Rec. 709 luma coefficients, used wherever a grayscale view is needed.
LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])


def quantize(v, levels: int = LEVELS):
    """Map values in [0, 1] to integer codes in {0, ..., levels-1}.

    Rounds half up so results are identical across platforms.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.size and (v.min() < 0.0 or v.max() > 1.0):
        raise ValueError("quantize: values must lie in [0, 1]")
    return np.floor(v * (levels - 1) + 0.5).astype(np.int64)


def dequantize(z, levels: int = LEVELS):
    """Representative value of a code: z / (levels - 1)."""
    return np.asarray(z, dtype=np.float64) / (levels - 1)


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LdrImage:
    """Display-referred RGB image: (height, width, 3) floats in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"LdrImage needs a (h, w, 3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("LdrImage must contain at least one pixel")
        if not np.all(np.isfinite(arr)):
            raise ValueError("LdrImage values must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("LdrImage values must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class RadianceMap:
    """Scene-referred HDR image storing per-channel natural-log radiance."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"RadianceMap needs a (h, w, 3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("RadianceMap must contain at least one pixel")
        if not np.all(np.isfinite(arr)):
            raise ValueError("RadianceMap values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class ExposureStack:
    """EV-bracketed set of registered LDR images, sorted by increasing EV.

    Exposure time for image j is base_time * 2**ev[j]; only ratios matter
    downstream, so base_time defaults to 1 second.
    """

    images: tuple[LdrImage, ...]
    evs: tuple[float, ...]
    base_time: float = 1.0

    def __post_init__(self):
        images = tuple(self.images)
        evs = tuple(float(e) for e in self.evs)
        if len(images) != len(evs):
            raise ValueError(f"{len(images)} images but {len(evs)} exposure values")
        if len(images) < 2:
            raise ValueError("an exposure stack needs at least two images")
        if not all(np.isfinite(e) for e in evs):
            raise ValueError("exposure values must be finite")
        if not (np.isfinite(self.base_time) and self.base_time > 0):
            raise ValueError("base_time must be positive")
        shapes = {im.data.shape for im in images}
        if len(shapes) != 1:
            raise ValueError(f"stack images differ in size: {sorted(shapes)}")
        order = sorted(range(len(evs)), key=lambda i: evs[i])
        evs = tuple(evs[i] for i in order)
        if any(evs[i] == evs[i + 1] for i in range(len(evs) - 1)):
            raise ValueError("duplicate exposure values in stack")
        object.__setattr__(self, "images", tuple(images[i] for i in order))
        object.__setattr__(self, "evs", evs)
        object.__setattr__(self, "base_time", float(self.base_time))

    def __len__(self) -> int:
        return len(self.images)

    @property
    def times(self) -> tuple[float, ...]:
        """Exposure times in seconds, one per image."""
        return tuple(self.base_time * 2.0**e for e in self.evs)

    @property
    def middle_index(self) -> int:
        """Index of the middle exposure (upper median for even counts)."""
        return len(self.images) // 2

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.images[0].data.shape


@dataclass(frozen=True)
class CrfTable:
    """Per-channel inverse camera response: code z -> log exposure.

    data has shape (256, 3); each column is monotone non-decreasing and
    pinned to 0 at the mid code (the additive gauge of the solution family).
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.shape != (LEVELS, 3):
            raise ValueError(f"CrfTable needs shape ({LEVELS}, 3), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("CrfTable values must be finite")
        if not np.all(np.diff(arr, axis=0) >= 0.0):
            raise ValueError("CrfTable columns must be monotone non-decreasing")
        if not np.all(arr[MID_CODE] == 0.0):
            raise ValueError(f"CrfTable must be 0 at code {MID_CODE} (gauge)")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def levels(self) -> int:
        return self.data.shape[0]
