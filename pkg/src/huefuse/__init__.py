"""huefuse: multi-exposure fusion with radiance-based hue compensation.

Pipeline: fuse a bracketed stack (Mertens-style), estimate the inverse
camera response and recover an HDR radiance map, then transplant the
radiance hue onto the fused image via the constant-hue-plane
decomposition. Results are scored with the CIEDE2000 hue term.
"""

from .core import CrfTable, ExposureStack, LdrImage, RadianceMap, dequantize, quantize
from .crf import CrfEstimationError, CrfSolveConfig, estimate_inverse_crf
from .fileio import (
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
from .fusion import FusionWeights, fuse
from .hdr import anchor_scale, recover_radiance, render_exposure, synth_stack
from .hueplane import (
    HuePlaneCoords,
    compensate_image,
    compensate_pixel,
    decompose,
    max_sat_color,
    transplant_hue,
)
from .metrics import HueDiffReport, ciede2000_hue_diff, image_hue_diff, srgb_to_lab

__version__ = "0.1.0"

__all__ = [
    "CrfEstimationError",
    "CrfSolveConfig",
    "CrfTable",
    "ExposureStack",
    "FusionWeights",
    "HueDiffReport",
    "HuePlaneCoords",
    "LdrImage",
    "RadianceMap",
    "StackManifest",
    "anchor_scale",
    "ciede2000_hue_diff",
    "compensate_image",
    "compensate_pixel",
    "decompose",
    "dequantize",
    "estimate_inverse_crf",
    "fuse",
    "image_hue_diff",
    "load_stack",
    "max_sat_color",
    "quantize",
    "read_crf_json",
    "read_hdr",
    "read_ldr",
    "read_manifest",
    "recover_radiance",
    "render_exposure",
    "srgb_to_lab",
    "synth_stack",
    "transplant_hue",
    "write_crf_json",
    "write_hdr",
    "write_ldr",
    "write_manifest",
]
