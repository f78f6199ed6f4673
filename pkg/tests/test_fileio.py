import json
import struct

import numpy as np
import pytest
from PIL import Image

from huefuse.core import CrfTable, LdrImage, RadianceMap
from huefuse.fileio import (
    FileFormatError,
    StackManifest,
    load_stack,
    read_crf_json,
    read_hdr,
    read_ldr,
    read_manifest,
    write_crf_json,
    write_hdr,
    write_ldr,
    write_manifest,
)


def _random_ldr(rng, h=20, w=16):
    return LdrImage(rng.integers(0, 256, size=(h, w, 3)) / 255.0)


def _random_radiance(rng, h=16, w=12):
    scale = np.exp(rng.uniform(-10, 10, size=(h, w, 1)))
    chan = rng.uniform(0.5, 1.0, size=(h, w, 3))
    return RadianceMap(np.log(scale * chan))


# ---------------------------------------------------------------- PNG


def test_png_round_trip_is_code_exact(tmp_path, rng):
    img = _random_ldr(rng)
    path = tmp_path / "a.png"
    write_ldr(img, path)
    back = read_ldr(path)
    assert np.array_equal(back.data, img.data)


def test_grayscale_png_promoted(tmp_path):
    arr = np.arange(48, dtype=np.uint8).reshape(6, 8)
    Image.fromarray(arr, mode="L").save(tmp_path / "g.png")
    img = read_ldr(tmp_path / "g.png")
    assert np.array_equal(img.data[..., 0], img.data[..., 1])
    assert np.array_equal(img.data[..., 0], img.data[..., 2])
    assert np.array_equal(img.data[..., 0], arr / 255.0)


def test_sixteen_bit_png_rejected(tmp_path):
    arr = (np.arange(24, dtype=np.uint16) * 1000).reshape(4, 6)
    Image.fromarray(arr, mode="I;16").save(tmp_path / "deep.png")
    with pytest.raises(FileFormatError, match="bit depth"):
        read_ldr(tmp_path / "deep.png")


def test_rgba_png_rejected(tmp_path, rng):
    arr = rng.integers(0, 256, size=(4, 4, 4)).astype(np.uint8)
    Image.fromarray(arr, mode="RGBA").save(tmp_path / "a.png")
    with pytest.raises(FileFormatError, match="color type"):
        read_ldr(tmp_path / "a.png")


def test_non_png_rejected(tmp_path):
    path = tmp_path / "x.png"
    path.write_bytes(b"definitely not a png")
    with pytest.raises(FileFormatError, match="not a PNG"):
        read_ldr(path)


def test_missing_png_is_os_error(tmp_path):
    with pytest.raises(OSError):
        read_ldr(tmp_path / "missing.png")


# ---------------------------------------------------------------- PFM


def test_pfm_round_trip_exact_at_float32(tmp_path, rng):
    m = _random_radiance(rng)
    path = tmp_path / "m.pfm"
    write_hdr(m, path)
    back = read_hdr(path)
    assert np.array_equal(
        np.exp(back.data).astype(np.float32), np.exp(m.data).astype(np.float32)
    )


def test_pfm_gray_promoted(tmp_path):
    vals = np.arange(1.0, 13.0, dtype="<f4").reshape(4, 3)
    with open(tmp_path / "g.pfm", "wb") as f:
        f.write(b"Pf\n3 4\n-1.0\n")
        f.write(vals[::-1].tobytes())
    m = read_hdr(tmp_path / "g.pfm")
    assert m.data.shape == (4, 3, 3)
    assert np.allclose(np.exp(m.data[..., 0]), vals)
    assert np.array_equal(m.data[..., 0], m.data[..., 1])


def test_pfm_big_endian(tmp_path):
    vals = np.arange(1.0, 7.0, dtype=">f4").reshape(2, 1, 3)
    with open(tmp_path / "b.pfm", "wb") as f:
        f.write(b"PF\n1 2\n1.0\n")
        f.write(vals[::-1].tobytes())
    m = read_hdr(tmp_path / "b.pfm")
    assert np.allclose(np.exp(m.data), vals.astype(np.float64))


def test_pfm_nan_names_pixel(tmp_path):
    vals = np.ones((2, 2, 3), dtype="<f4")
    vals[1, 0, 1] = np.nan
    with open(tmp_path / "n.pfm", "wb") as f:
        f.write(b"PF\n2 2\n-1.0\n")
        f.write(vals[::-1].tobytes())
    with pytest.raises(FileFormatError, match="pixel index 2"):
        read_hdr(tmp_path / "n.pfm")


def test_pfm_truncated(tmp_path):
    with open(tmp_path / "t.pfm", "wb") as f:
        f.write(b"PF\n4 4\n-1.0\n")
        f.write(struct.pack("<f", 1.0) * 5)
    with pytest.raises(FileFormatError, match="truncated"):
        read_hdr(tmp_path / "t.pfm")


def test_pfm_bad_header(tmp_path):
    (tmp_path / "h.pfm").write_bytes(b"PF\nnot dims\n-1.0\n")
    with pytest.raises(FileFormatError):
        read_hdr(tmp_path / "h.pfm")


# ---------------------------------------------------------------- RGBE


def test_rgbe_round_trip_relative_error(tmp_path, rng):
    m = _random_radiance(rng)
    path = tmp_path / "m.hdr"
    write_hdr(m, path)
    back = read_hdr(path)
    rel = np.abs(np.exp(back.data) - np.exp(m.data)) / np.exp(m.data)
    assert rel.max() < 0.01


def test_rgbe_run_length_heavy_image(tmp_path):
    # constant rows exercise the run encoder; stripes exercise literals
    data = np.ones((10, 64, 3))
    data[::2] = np.linspace(0.5, 2.0, 64 * 3).reshape(1, 64, 3)
    m = RadianceMap(np.log(data))
    write_hdr(m, tmp_path / "r.hdr")
    back = read_hdr(tmp_path / "r.hdr")
    rel = np.abs(np.exp(back.data) - data) / data
    assert rel.max() < 0.01


def test_rgbe_narrow_image_flat_scanlines(tmp_path, rng):
    m = _random_radiance(rng, h=5, w=4)  # width < 8: no RLE allowed
    write_hdr(m, tmp_path / "n.hdr")
    back = read_hdr(tmp_path / "n.hdr")
    rel = np.abs(np.exp(back.data) - np.exp(m.data)) / np.exp(m.data)
    assert rel.max() < 0.01


def test_rgbe_zero_pixels_read_finite(tmp_path):
    m = RadianceMap(np.full((4, 12, 3), -200.0))  # underflows to rgbe zero
    write_hdr(m, tmp_path / "z.hdr")
    back = read_hdr(tmp_path / "z.hdr")
    assert np.all(np.isfinite(back.data))


def test_rgbe_bad_signature(tmp_path):
    (tmp_path / "bad.hdr").write_bytes(b"not radiance\n")
    with pytest.raises(FileFormatError, match="signature"):
        read_hdr(tmp_path / "bad.hdr")


def test_rgbe_truncated(tmp_path):
    (tmp_path / "t.hdr").write_bytes(b"#?RADIANCE\n\n-Y 4 +X 20\n\x02\x02\x00\x14")
    with pytest.raises(FileFormatError):
        read_hdr(tmp_path / "t.hdr")


def test_hdr_unknown_extension(tmp_path, rng):
    m = _random_radiance(rng)
    with pytest.raises(ValueError, match="extension"):
        write_hdr(m, tmp_path / "m.exr")
    with pytest.raises(ValueError, match="extension"):
        read_hdr(tmp_path / "m.exr")


# ------------------------------------------------------------- manifest


def _write_stack(tmp_path, rng, evs=(-2.0, -0.5, 0.0, 0.5, 2.0)):
    entries = []
    for i, ev in enumerate(evs):
        name = f"im{i}.png"
        write_ldr(_random_ldr(rng), tmp_path / name)
        entries.append((name, ev))
    write_manifest(entries, tmp_path / "manifest.json")
    return tmp_path / "manifest.json"


def test_manifest_round_trip_and_load(tmp_path, rng):
    path = _write_stack(tmp_path, rng)
    manifest = read_manifest(path)
    assert manifest.base_time == 1.0
    stack = load_stack(manifest)
    assert len(stack) == 5
    assert stack.evs == (-2.0, -0.5, 0.0, 0.5, 2.0)


def test_manifest_duplicate_path_rejected(tmp_path):
    with pytest.raises(ValueError, match="duplicate"):
        StackManifest((("a.png", 0.0), ("a.png", 1.0)))


def test_manifest_single_entry_fails_stack_invariant(tmp_path, rng):
    write_ldr(_random_ldr(rng), tmp_path / "only.png")
    write_manifest([("only.png", 0.0)], tmp_path / "m.json")
    with pytest.raises(ValueError, match="two images"):
        load_stack(read_manifest(tmp_path / "m.json"))


def test_manifest_dimension_mismatch_names_offender(tmp_path, rng):
    write_ldr(_random_ldr(rng, 8, 8), tmp_path / "a.png")
    write_ldr(_random_ldr(rng, 8, 9), tmp_path / "b.png")
    write_manifest([("a.png", 0.0), ("b.png", 1.0)], tmp_path / "m.json")
    with pytest.raises(ValueError, match="b.png"):
        load_stack(read_manifest(tmp_path / "m.json"))


def test_manifest_paths_resolve_relative_to_file(tmp_path, rng):
    sub = tmp_path / "nested"
    sub.mkdir()
    write_ldr(_random_ldr(rng), sub / "a.png")
    write_ldr(_random_ldr(rng), sub / "b.png")
    write_manifest([("a.png", 0.0), ("b.png", 1.0)], sub / "m.json")
    stack = load_stack(read_manifest(sub / "m.json"))
    assert len(stack) == 2


def test_manifest_malformed_json(tmp_path):
    (tmp_path / "m.json").write_text("{broken")
    with pytest.raises(FileFormatError):
        read_manifest(tmp_path / "m.json")


def test_manifest_base_time(tmp_path, rng):
    write_ldr(_random_ldr(rng), tmp_path / "a.png")
    write_ldr(_random_ldr(rng), tmp_path / "b.png")
    write_manifest([("a.png", 0.0), ("b.png", 1.0)], tmp_path / "m.json", base_time=0.25)
    stack = load_stack(read_manifest(tmp_path / "m.json"))
    assert stack.times == (0.25, 0.5)


# ------------------------------------------------------------ CRF JSON


def test_crf_json_round_trip(tmp_path, gamma_table):
    path = tmp_path / "crf.json"
    write_crf_json(gamma_table, path, metadata={"config": {"smoothness": 50.0}})
    back = read_crf_json(path)
    assert np.array_equal(back.data, gamma_table.data)
    doc = json.loads(path.read_text())
    assert doc["levels"] == 256
    assert doc["config"]["smoothness"] == 50.0


def test_crf_json_wrong_levels(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"levels": 16, "r": [], "g": [], "b": []}))
    with pytest.raises(FileFormatError, match="256"):
        read_crf_json(tmp_path / "c.json")


def test_crf_json_invalid_table(tmp_path):
    col = [0.0] * 256
    col[10] = -1.0  # non-monotone after a zero
    doc = {"levels": 256, "r": col, "g": [0.0] * 256, "b": [0.0] * 256}
    (tmp_path / "c.json").write_text(json.dumps(doc))
    with pytest.raises(FileFormatError, match="monotone"):
        read_crf_json(tmp_path / "c.json")


def test_crf_json_malformed(tmp_path):
    (tmp_path / "c.json").write_text("[1, 2")
    with pytest.raises(FileFormatError):
        read_crf_json(tmp_path / "c.json")
