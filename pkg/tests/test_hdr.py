import numpy as np
import pytest

from huefuse.core import CrfTable, ExposureStack, LdrImage, RadianceMap, quantize
from huefuse.hdr import anchor_scale, recover_radiance, render_exposure, synth_stack


def _linear_table(slope=0.02):
    col = slope * (np.arange(256) - 128.0)
    return CrfTable(np.stack([col] * 3, axis=1))


def _const_img(v, shape=(4, 4, 3)):
    return LdrImage(np.full(shape, v))


def test_single_term_average_via_saturated_partner():
    # the second image is fully saturated, so its hat weight is zero and
    # the recovery reduces to the single unsaturated term at dt = 1
    table = _linear_table()
    z = 100
    stack = ExposureStack((_const_img(z / 255.0), _const_img(1.0)), (0.0, 1.0))
    rec = recover_radiance(stack, table)
    assert np.allclose(rec.data, table.data[z, 0] - np.log(1.0))


def test_two_exposures_identical_codes():
    # same codes at dt = 1 and dt = 2, equal weights: the recovered value
    # is g(z) minus the mean log exposure time
    table = _linear_table()
    z = 80
    stack = ExposureStack((_const_img(z / 255.0), _const_img(z / 255.0)), (0.0, 1.0))
    rec = recover_radiance(stack, table)
    expect = table.data[z, 0] - 0.5 * (np.log(1.0) + np.log(2.0))
    assert np.allclose(rec.data, expect)


def test_saturated_everywhere_falls_back_to_middle_exposure():
    table = _linear_table()
    data = np.full((2, 2, 3), 1.0)
    imgs = tuple(LdrImage(data) for _ in range(3))
    stack = ExposureStack(imgs, (-1.0, 0.0, 1.0))
    rec = recover_radiance(stack, table)
    # middle exposure (EV 0) through the table, minus its log time
    expect = table.data[255, 0] - np.log(1.0)
    assert np.allclose(rec.data, expect)
    assert np.all(np.isfinite(rec.data))


def test_recovery_is_finite_on_real_stack(gamma_stack, gamma_table):
    rec = recover_radiance(gamma_stack, gamma_table)
    assert np.all(np.isfinite(rec.data))


def test_time_rescale_shifts_log_radiance_exactly(gamma_stack, gamma_table):
    k = 3.0
    scaled = ExposureStack(gamma_stack.images, gamma_stack.evs, base_time=k)
    a = recover_radiance(gamma_stack, gamma_table)
    b = recover_radiance(scaled, gamma_table)
    assert np.allclose(b.data, a.data - np.log(k), atol=1e-12)


def test_synth_stack_ev_sets(ramp_scene):
    for evs in ([0, 0.5, -0.5, 2, -2], [0, 1, -1, 2, -2]):
        stack = synth_stack(ramp_scene, evs)
        assert len(stack) == 5
        assert stack.evs == tuple(sorted(evs))


def test_synth_stack_needs_evs(ramp_scene):
    with pytest.raises(ValueError):
        synth_stack(ramp_scene, [])


def test_flat_field_render():
    # constant radiance, gamma 1, scale chosen so the exposed value is 0.5
    rad = RadianceMap(np.full((4, 4, 3), np.log(2.0)))
    img = render_exposure(rad, ev=0.0, gamma=1.0, scale=0.25)
    assert np.allclose(img.data, 0.5, atol=1.0 / 255.0)


def test_anchor_scale_targets_mid_code(ramp_scene):
    s = anchor_scale(ramp_scene, gamma=2.2)
    lum = np.exp(ramp_scene.data) @ np.array([0.2126, 0.7152, 0.0722])
    med = np.median(lum)
    assert quantize(np.clip((med * s) ** (1 / 2.2), 0, 1)) == 118


def test_brighter_ev_is_never_darker(ramp_scene):
    stack = synth_stack(ramp_scene, [0, -2, 2])
    lo, mid, hi = (im.data for im in stack.images)
    assert np.all(lo <= mid + 1e-12)
    assert np.all(mid <= hi + 1e-12)
