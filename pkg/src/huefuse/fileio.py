"""File IO: 8-bit PNG for LDR images, Radiance RGBE and PFM for HDR maps,
JSON for stack manifests and response tables.

HDR files store linear radiance (both formats are linear by definition);
in memory maps hold natural-log radiance.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .core import LEVELS, CrfTable, ExposureStack, LdrImage, RadianceMap, quantize

# smallest linear value representable on read; keeps log radiance finite
TINY_RADIANCE = 1e-38

_PNG_SIG = b"\x89PNG\r\n\x1a\n"
_RLE_MIN_RUN = 4


class FileFormatError(ValueError):
    """Malformed or unsupported image/data file."""


# ---------------------------------------------------------------- PNG (LDR)


def read_ldr(path) -> LdrImage:
    """Read an 8-bit RGB or grayscale PNG; gray is promoted to equal RGB."""
    path = os.fspath(path)
    with open(path, "rb") as f:
        head = f.read(26)
    if len(head) < 26 or head[:8] != _PNG_SIG:
        raise FileFormatError(f"{path}: not a PNG file")
    if head[12:16] != b"IHDR":
        raise FileFormatError(f"{path}: malformed PNG header")
    depth, color_type = head[24], head[25]
    if depth != 8:
        raise FileFormatError(f"{path}: unsupported PNG bit depth {depth} (need 8)")
    if color_type not in (0, 2):
        raise FileFormatError(
            f"{path}: unsupported PNG color type {color_type} (need gray or RGB)"
        )
    with Image.open(path) as img:
        arr = np.asarray(img)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=-1)
    return LdrImage(arr.astype(np.float64) / (LEVELS - 1))


def write_ldr(image: LdrImage, path) -> None:
    """Write an LdrImage as an 8-bit RGB PNG (codes round half up)."""
    codes = quantize(image.data).astype(np.uint8)
    Image.fromarray(codes, mode="RGB").save(os.fspath(path), format="PNG")


# ------------------------------------------------------------- RGBE (.hdr)


def _rgbe_encode(linear: np.ndarray) -> np.ndarray:
    v = linear.max(axis=-1)
    if v.max() >= np.ldexp(1.0, 127):
        raise ValueError("radiance too large for the RGBE shared exponent")
    mant, exp = np.frexp(v)
    lit = v >= 1e-32
    scale = np.where(lit, mant * 255.9999 / np.where(v > 0.0, v, 1.0), 0.0)
    rgbe = np.zeros(linear.shape[:2] + (4,), dtype=np.uint8)
    rgbe[..., :3] = (linear * scale[..., None]).astype(np.uint8)
    rgbe[..., 3] = np.where(lit, exp + 128, 0).astype(np.uint8)
    rgbe[~lit] = 0
    return rgbe


def _rgbe_decode(rgbe: np.ndarray) -> np.ndarray:
    e = rgbe[..., 3].astype(np.int64)
    f = np.ldexp(1.0, e - (128 + 8))
    rgb = (rgbe[..., :3].astype(np.float64) + 0.5) * f[..., None]
    return np.where((e == 0)[..., None], 0.0, rgb)


def _rle_encode(comp: np.ndarray) -> bytes:
    out = bytearray()
    n = comp.size
    i = 0
    while i < n:
        pos = i
        run_pos, run_len = n, 0
        while pos < n:
            length = 1
            while length < 127 and pos + length < n and comp[pos + length] == comp[pos]:
                length += 1
            if length >= _RLE_MIN_RUN:
                run_pos, run_len = pos, length
                break
            pos += length
        while i < run_pos:
            chunk = min(128, run_pos - i)
            out.append(chunk)
            out.extend(comp[i : i + chunk].tobytes())
            i += chunk
        if run_len:
            out.append(128 + run_len)
            out.append(int(comp[run_pos]))
            i = run_pos + run_len
    return bytes(out)


def _rle_decode(f, path: str, width: int) -> np.ndarray:
    comp = np.empty(width, dtype=np.uint8)
    filled = 0
    while filled < width:
        code = f.read(1)
        if not code:
            raise FileFormatError(f"{path}: truncated RLE scanline")
        code = code[0]
        if code > 128:
            count = code - 128
            value = f.read(1)
            if not value or filled + count > width:
                raise FileFormatError(f"{path}: corrupt RLE run")
            comp[filled : filled + count] = value[0]
        else:
            count = code
            data = f.read(count)
            if len(data) < count or filled + count > width:
                raise FileFormatError(f"{path}: corrupt RLE literals")
            comp[filled : filled + count] = np.frombuffer(data, dtype=np.uint8)
        filled += count
    return comp


def _write_rgbe(linear: np.ndarray, path: str) -> None:
    h, w = linear.shape[:2]
    rgbe = _rgbe_encode(linear)
    with open(path, "wb") as f:
        f.write(b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n")
        f.write(f"-Y {h} +X {w}\n".encode("ascii"))
        if 8 <= w <= 32767:
            for row in rgbe:
                f.write(bytes([2, 2, w >> 8, w & 0xFF]))
                for comp in range(4):
                    f.write(_rle_encode(np.ascontiguousarray(row[:, comp])))
        else:
            f.write(rgbe.tobytes())


def _read_rgbe(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.readline()
        if not magic.startswith((b"#?RADIANCE", b"#?RGBE")):
            raise FileFormatError(f"{path}: missing Radiance signature")
        while True:
            line = f.readline()
            if not line:
                raise FileFormatError(f"{path}: truncated header")
            if line.strip() == b"":
                break
            # FORMAT=/EXPOSURE=/comment lines; only the format is checked
            if line.startswith(b"FORMAT=") and b"32-bit_rle_rgbe" not in line:
                raise FileFormatError(f"{path}: unsupported format {line!r}")
        res = f.readline().split()
        if len(res) != 4 or res[0] != b"-Y" or res[2] != b"+X":
            raise FileFormatError(f"{path}: unsupported resolution line")
        h, w = int(res[1]), int(res[3])
        if h < 1 or w < 1:
            raise FileFormatError(f"{path}: bad image size {w}x{h}")
        rgbe = np.empty((h, w, 4), dtype=np.uint8)
        for row in range(h):
            rgbe[row] = _read_rgbe_scanline(f, path, w)
    return _rgbe_decode(rgbe)


def _read_rgbe_scanline(f, path: str, width: int) -> np.ndarray:
    if 8 <= width <= 32767:
        head = f.read(4)
        if len(head) < 4:
            raise FileFormatError(f"{path}: truncated scanline")
        if head[0] == 2 and head[1] == 2 and head[2] & 0x80 == 0:
            if ((head[2] << 8) | head[3]) != width:
                raise FileFormatError(f"{path}: scanline length mismatch")
            scan = np.empty((width, 4), dtype=np.uint8)
            for comp in range(4):
                scan[:, comp] = _rle_decode(f, path, width)
            return scan
        body = head + f.read(4 * (width - 1))
    else:
        body = f.read(4 * width)
    if len(body) < 4 * width:
        raise FileFormatError(f"{path}: truncated scanline")
    return np.frombuffer(body, dtype=np.uint8).reshape(width, 4)


# -------------------------------------------------------------------- PFM


def _write_pfm(linear: np.ndarray, path: str) -> None:
    h, w = linear.shape[:2]
    data = linear.astype("<f4")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: radiance overflows 32-bit float range")
    with open(path, "wb") as f:
        f.write(b"PF\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(data[::-1].tobytes())  # PFM scanlines run bottom to top


def _read_pfm(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic not in (b"PF", b"Pf"):
            raise FileFormatError(f"{path}: not a PFM file")
        channels = 3 if magic == b"PF" else 1
        try:
            dims = f.readline().split()
            w, h = int(dims[0]), int(dims[1])
            scale = float(f.readline().strip())
        except (ValueError, IndexError) as exc:
            raise FileFormatError(f"{path}: malformed PFM header") from exc
        if w < 1 or h < 1 or scale == 0.0:
            raise FileFormatError(f"{path}: malformed PFM header")
        dtype = "<f4" if scale < 0 else ">f4"
        raw = f.read(4 * w * h * channels)
    if len(raw) < 4 * w * h * channels:
        raise FileFormatError(f"{path}: truncated PFM data")
    data = np.frombuffer(raw, dtype=dtype).reshape(h, w, channels)[::-1]
    if channels == 1:
        data = np.repeat(data, 3, axis=-1)
    return data.astype(np.float64)


# -------------------------------------------------------------- HDR facade


def write_hdr(radiance: RadianceMap, path) -> None:
    """Write a RadianceMap as linear Radiance RGBE (.hdr/.pic) or PFM (.pfm)."""
    path = os.fspath(path)
    linear = np.exp(radiance.data)
    ext = os.path.splitext(path)[1].lower()
    if ext in (".hdr", ".pic"):
        _write_rgbe(linear, path)
    elif ext == ".pfm":
        _write_pfm(linear, path)
    else:
        raise ValueError(f"{path}: unsupported HDR extension {ext!r} (use .hdr or .pfm)")


def read_hdr(path) -> RadianceMap:
    """Read a linear HDR file into a log-radiance map.

    NaN or infinite samples are an error. Non-positive samples (e.g. RGBE
    zero pixels) are floored to a tiny positive value so the log stays
    finite.
    """
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    if ext in (".hdr", ".pic"):
        linear = _read_rgbe(path)
    elif ext == ".pfm":
        linear = _read_pfm(path)
    else:
        raise ValueError(f"{path}: unsupported HDR extension {ext!r} (use .hdr or .pfm)")
    bad = ~np.isfinite(linear)
    if bad.any():
        idx = int(np.flatnonzero(bad.any(axis=-1))[0])
        raise FileFormatError(f"{path}: non-finite radiance at pixel index {idx}")
    return RadianceMap(np.log(np.maximum(linear, TINY_RADIANCE)))


# ---------------------------------------------------------------- manifest


@dataclass(frozen=True)
class StackManifest:
    """Paths and exposure values of a bracketed capture."""

    entries: tuple[tuple[str, float], ...]  # (resolved path, ev)
    base_time: float = 1.0

    def __post_init__(self):
        entries = tuple((str(p), float(e)) for p, e in self.entries)
        paths = [p for p, _ in entries]
        if len(set(paths)) != len(paths):
            dup = sorted({p for p in paths if paths.count(p) > 1})
            raise ValueError(f"duplicate image paths in manifest: {dup}")
        if not all(np.isfinite(e) for _, e in entries):
            raise ValueError("manifest exposure values must be finite")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "base_time", float(self.base_time))


def read_manifest(path) -> StackManifest:
    """Load a manifest JSON; image paths resolve relative to the manifest."""
    path = os.fspath(path)
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc
    try:
        images = doc["images"]
        entries = [(str(item["path"]), float(item["ev"])) for item in images]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: malformed manifest ({exc})") from exc
    base = os.path.dirname(os.path.abspath(path))
    resolved = [(os.path.normpath(os.path.join(base, p)), ev) for p, ev in entries]
    return StackManifest(tuple(resolved), base_time=float(doc.get("base_time", 1.0)))


def write_manifest(entries, path, base_time: float = 1.0) -> None:
    """Write a manifest JSON; entries are (path, ev) pairs as given."""
    doc = {
        "base_time": base_time,
        "images": [{"path": str(p), "ev": float(e)} for p, e in entries],
    }
    with open(os.fspath(path), "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_stack(manifest: StackManifest) -> ExposureStack:
    """Load every manifest image and assemble the exposure stack."""
    images = []
    for p, _ in manifest.entries:
        images.append(read_ldr(p))
    shapes = {im.data.shape for im in images}
    if len(shapes) > 1:
        detail = ", ".join(
            f"{p} is {im.width}x{im.height}"
            for (p, _), im in zip(manifest.entries, images)
        )
        raise ValueError(f"manifest images differ in size: {detail}")
    evs = tuple(e for _, e in manifest.entries)
    return ExposureStack(tuple(images), evs, base_time=manifest.base_time)


# ------------------------------------------------------------- CRF tables


def write_crf_json(table: CrfTable, path, metadata: dict | None = None) -> None:
    """Serialize a response table, optionally with provenance metadata."""
    doc = {
        "levels": table.levels,
        "r": table.data[:, 0].tolist(),
        "g": table.data[:, 1].tolist(),
        "b": table.data[:, 2].tolist(),
    }
    if metadata:
        doc.update(metadata)
    with open(os.fspath(path), "w") as f:
        json.dump(doc, f)
        f.write("\n")


def read_crf_json(path) -> CrfTable:
    path = os.fspath(path)
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc
    try:
        levels = int(doc["levels"])
        cols = [doc["r"], doc["g"], doc["b"]]
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"{path}: malformed CRF table ({exc})") from exc
    if levels != LEVELS or any(len(c) != levels for c in cols):
        raise FileFormatError(f"{path}: CRF table must have {LEVELS} entries per channel")
    try:
        return CrfTable(np.array(cols, dtype=np.float64).T)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
