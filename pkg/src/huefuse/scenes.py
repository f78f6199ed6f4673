"""Procedural HDR test scenes.

Each generator returns a radiance map with strong chroma and several
decades of dynamic range, so bracketed renders clip at both ends the way
real captures do. All scenes are seeded and reproducible.
"""

from __future__ import annotations

import zlib

import numpy as np
from scipy.ndimage import map_coordinates

from .core import RadianceMap


def _smooth_field(rng, size: int, cells: int) -> np.ndarray:
    """Random low-res grid, bilinearly upsampled: smooth values in [0, 1]."""
    grid = rng.random((cells, cells))
    ii = np.linspace(0.0, cells - 1.0, size)
    rr, cc = np.meshgrid(ii, ii, indexing="ij")
    return map_coordinates(grid, [rr, cc], order=1, mode="nearest")


def _hue_rgb(h: np.ndarray) -> np.ndarray:
    """Fully saturated RGB around the hue hexagon; h in [0, 1)."""
    k = (h % 1.0) * 6.0
    r = np.clip(np.abs(k - 3.0) - 1.0, 0.0, 1.0)
    g = np.clip(2.0 - np.abs(k - 2.0), 0.0, 1.0)
    b = np.clip(2.0 - np.abs(k - 4.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1)


def _tint(hue: np.ndarray, sat) -> np.ndarray:
    """Unit-luminance-ish color direction with the given saturation."""
    sat = np.asarray(sat)[..., None]
    return (1.0 - sat) + sat * _hue_rgb(hue)


def _ramp_sweep(size, rng):
    u = np.linspace(0.0, 1.0, size)
    # cubic spacing keeps the partially clipped highlight band thin, and the
    # highlights desaturate toward white the way real light sources do
    t = np.linspace(-1.0, 1.0, size)
    lum = np.exp(1.1 * t + 1.5 * t**3)[None, :] * np.ones((size, 1))
    sat = (0.75 - 0.55 * np.clip(t, 0.0, 1.0))[None, :] * np.ones((size, 1))
    color = _tint(u[:, None] * np.ones((1, size)), sat)
    return lum[..., None] * color


def _sun_court(size, rng):
    base = 0.05 + 0.6 * np.stack(
        [_smooth_field(rng, size, 6) for _ in range(3)], axis=-1
    )
    yy, xx = np.mgrid[0:size, 0:size] / size
    cy, cx = rng.uniform(0.2, 0.5, size=2)
    sun = np.exp(-(((yy - cy) ** 2 + (xx - cx) ** 2) / 0.01))
    warm = np.array([1.0, 0.85, 0.55])
    return base + 220.0 * sun[..., None] * warm


def _stained_glass(size, rng):
    tiles = 8
    tile = size // tiles
    hue = rng.random((tiles, tiles))
    loglum = rng.uniform(-2.6, 1.2, size=(tiles, tiles))
    sat = rng.uniform(0.55, 0.95, size=(tiles, tiles))
    sat = np.where(loglum > 0.2, sat * 0.35, sat)  # bright panes run pale
    color = _tint(hue, sat)
    img = np.repeat(np.repeat(color * np.exp(loglum)[..., None], tile, 0), tile, 1)
    img = img[:size, :size]
    grout = np.ones((size, size), dtype=bool)
    for k in range(0, size, tile):
        grout[max(k - 1, 0) : k + 1, :] = False
        grout[:, max(k - 1, 0) : k + 1] = False
    return np.where(grout[..., None], img, 0.004)


def _nightscape(size, rng):
    base = 0.02 * (0.3 + _smooth_field(rng, size, 5))[..., None] * _tint(
        np.full((size, size), 0.62), 0.5
    )
    yy, xx = np.mgrid[0:size, 0:size] / size
    out = base
    for _ in range(8):
        cy, cx, hue = rng.random(3)
        blob = np.exp(-(((yy - cy) ** 2 + (xx - cx) ** 2) / 0.0004))
        out = out + 10.0 * blob[..., None] * _tint(np.full((size, size), hue), 0.8)
    return out


def _forest_mist(size, rng):
    hue = 0.28 + 0.12 * _smooth_field(rng, size, 7)
    sat = 0.35 + 0.5 * _smooth_field(rng, size, 5)
    lum = np.exp(np.linspace(-2.5, 2.0, size))[:, None] * (
        0.5 + _smooth_field(rng, size, 4)
    )
    warm = np.exp(-((np.linspace(0, 1, size)[None, :] - 0.75) ** 2) / 0.002)
    lum = lum * (1.0 + 14.0 * warm)
    sat = sat * (1.0 - 0.75 * warm)  # the bright shaft washes out
    return lum[..., None] * _tint(hue, sat)


def _plasma(size, rng):
    fields = np.stack([_smooth_field(rng, size, 9) for _ in range(3)], axis=-1)
    shared = _smooth_field(rng, size, 3)
    return np.exp(3.0 * (fields - 0.5) + 3.5 * (shared[..., None] - 0.5))


def _cavern(size, rng):
    """Built for linear (gamma 1) renders: every frame clips, recoverably.

    A textured pit floor sits just under the darkest frame's black point
    while the brighter frames keep it at usable codes; a moat around it
    keeps bright-edge ringing away from the floor. The lamp halo is
    graded so each brighter frame saturates one more band; only the
    small core saturates them all. The floor depth is calibrated against
    the scene's own median luminance, which anchors the renders.
    """
    yy, xx = np.mgrid[0:size, 0:size] / size
    hue = 0.5 + 0.3 * _smooth_field(rng, size, 6)
    lum = np.exp(1.0 * (_smooth_field(rng, size, 5) - 0.5))
    r_sun = np.hypot(yy - 0.3, xx - 0.66)
    sun = 25.0 * np.exp(-(r_sun**2) / 0.0144)
    linear = lum[..., None] * _tint(hue, 0.6) + sun[..., None] * np.array([1.0, 0.92, 0.75])
    # pit floor just under the darkest frame's black point; textured and
    # faintly tinted so the brightest frame's weights dominate the whole
    # pit and the blend reproduces its (unclipped) shadow rendering
    r_pit = np.hypot(yy - 0.68, xx - 0.32)
    profile = np.interp(r_pit, [0.16, 0.20, 0.30, 0.34], [-4.28, -2.2, -2.2, 0.0])
    blend = np.interp(r_pit, [0.30, 0.34], [0.0, 1.0])
    # per-pixel grain: flat patches would zero the fusion contrast measure
    noise = 0.10 * rng.uniform(-1.0, 1.0, (size, size))
    pit_tint = _tint(hue, 0.10 * (1.0 - blend))
    pristine = linear
    for _ in range(2):  # median moves once the pit is carved; settle it
        med = float(np.median(linear @ np.array([0.2126, 0.7152, 0.0722])))
        pit_ln = np.log(med) + profile + noise
        ln_mix = (1.0 - blend[..., None]) * (pit_ln[..., None] + np.log(pit_tint)) \
            + blend[..., None] * np.log(pristine)
        linear = np.where((r_pit < 0.34)[..., None], np.exp(ln_mix), pristine)
    return linear


_GENERATORS = {
    "ramp_sweep": _ramp_sweep,
    "sun_court": _sun_court,
    "stained_glass": _stained_glass,
    "nightscape": _nightscape,
    "forest_mist": _forest_mist,
    "plasma": _plasma,
    "cavern": _cavern,
}

# the two bracket protocols used by the benchmark experiments
EV_SETS = {
    "half": (0.0, 0.5, -0.5, 2.0, -2.0),
    "one": (0.0, 1.0, -1.0, 2.0, -2.0),
}


def scene_names() -> tuple[str, ...]:
    return tuple(_GENERATORS)


def make_scene(name: str, size: int = 256, seed: int = 0) -> RadianceMap:
    """Build one named scene at the given size, deterministically."""
    try:
        gen = _GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown scene {name!r}; choose from {scene_names()}") from None
    rng = np.random.default_rng([seed, zlib.crc32(name.encode())])
    linear = gen(size, rng)
    return RadianceMap(np.log(np.maximum(linear, 1e-9)))
