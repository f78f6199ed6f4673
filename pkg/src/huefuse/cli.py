"""Command-line interface wiring the pipeline end to end.

Subcommands: fuse, estimate-crf, merge-hdr, compensate, synth-stack,
evaluate, pipeline. Exit codes: 0 success, 2 input/usage error,
3 numerical/solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .core import ExposureStack
from .crf import CrfEstimationError, CrfSolveConfig, estimate_inverse_crf
from .fileio import (
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
from .hdr import anchor_scale, recover_radiance, render_exposure
from .hueplane import compensate_image
from .metrics import VARIANTS, image_hue_diff


@dataclass(frozen=True)
class RunConfig:
    """Effective settings for one command, echoed into JSON outputs."""

    smoothness: float = 50.0
    samples: int = 100
    seed: int = 0
    gamma: float = 2.2
    hdr_gamma: bool = False
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    metric_variant: str = "raw_dHp"
    exclude_clipped: bool = False

    def as_dict(self) -> dict:
        return {
            "smoothness": self.smoothness,
            "samples": self.samples,
            "seed": self.seed,
            "gamma": self.gamma,
            "hdr_gamma": self.hdr_gamma,
            "weights": list(self.weights),
            "metric_variant": self.metric_variant,
            "exclude_clipped": self.exclude_clipped,
        }

    def crf_config(self) -> CrfSolveConfig:
        return CrfSolveConfig(
            sample_count=self.samples, smoothness=self.smoothness, seed=self.seed
        )

    def fusion_weights(self) -> FusionWeights:
        c, s, e = self.weights
        return FusionWeights(contrast=c, saturation=s, well_exposedness=e)


def _parse_weights(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated exponents c,s,e")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight list {text!r}") from None


def _parse_evs(text: str) -> tuple[float, ...]:
    try:
        evs = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad EV list {text!r}: expected comma-separated numbers"
        ) from None
    if not evs:
        raise argparse.ArgumentTypeError("empty EV list")
    return evs


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, an optional JSON config file, and explicit flags."""
    cfg = RunConfig()
    path = getattr(args, "config", None)
    if path:
        with open(path) as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: invalid config JSON ({exc})") from exc
        known = {k: doc[k] for k in cfg.as_dict() if k in doc}
        if "weights" in known:
            known["weights"] = tuple(float(w) for w in known["weights"])
        cfg = replace(cfg, **known)
    for key in cfg.as_dict():
        val = getattr(args, key, None)
        if val is not None:
            cfg = replace(cfg, **{key: val})
    if cfg.metric_variant not in VARIANTS:
        raise ValueError(
            f"unknown metric variant {cfg.metric_variant!r}; expected one of {VARIANTS}"
        )
    return cfg


def _load_stack(manifest_path) -> ExposureStack:
    return load_stack(read_manifest(manifest_path))


def _run_fuse(manifest_path, out_path, cfg: RunConfig) -> None:
    stack = _load_stack(manifest_path)
    write_ldr(fuse(stack, cfg.fusion_weights()), out_path)


def _run_estimate_crf(manifest_path, out_path, cfg: RunConfig) -> None:
    stack = _load_stack(manifest_path)
    table = estimate_inverse_crf(stack, cfg.crf_config())
    write_crf_json(table, out_path, metadata={"config": cfg.as_dict()})


def _run_merge_hdr(manifest_path, out_path, cfg: RunConfig, crf_path=None) -> None:
    stack = _load_stack(manifest_path)
    if crf_path is None:
        table = estimate_inverse_crf(stack, cfg.crf_config())
    else:
        table = read_crf_json(crf_path)
    write_hdr(recover_radiance(stack, table), out_path)


def _run_compensate(fused_path, radiance_path, out_path, cfg: RunConfig) -> None:
    fused = read_ldr(fused_path)
    radiance = read_hdr(radiance_path)
    write_ldr(compensate_image(fused, radiance, gamma_encode=cfg.hdr_gamma), out_path)


def _run_synth(ground_path, outdir, evs, cfg: RunConfig) -> None:
    ground = read_hdr(ground_path)
    os.makedirs(outdir, exist_ok=True)
    scale = anchor_scale(ground, cfg.gamma)
    entries = []
    for ev in sorted(evs):
        name = f"ev{ev:+.2f}.png"
        write_ldr(render_exposure(ground, ev, cfg.gamma, scale), os.path.join(outdir, name))
        entries.append((name, ev))
    write_manifest(entries, os.path.join(outdir, "manifest.json"))
    write_ldr(render_exposure(ground, 0.0, cfg.gamma, scale), os.path.join(outdir, "reference.png"))


def _run_evaluate(a_path, b_path, report_path, cfg: RunConfig) -> dict:
    report = image_hue_diff(
        read_ldr(a_path),
        read_ldr(b_path),
        variant=cfg.metric_variant,
        exclude_clipped=cfg.exclude_clipped,
    )
    doc = report.as_dict()
    doc["config"] = cfg.as_dict()
    with open(report_path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    return doc


def _run_pipeline(manifest_path, outdir, cfg: RunConfig, reference=None) -> None:
    os.makedirs(outdir, exist_ok=True)
    crf_path = os.path.join(outdir, "crf.json")
    radiance_path = os.path.join(outdir, "radiance.hdr")
    fused_path = os.path.join(outdir, "fused.png")
    compensated_path = os.path.join(outdir, "compensated.png")
    _run_estimate_crf(manifest_path, crf_path, cfg)
    _run_merge_hdr(manifest_path, radiance_path, cfg, crf_path=crf_path)
    _run_fuse(manifest_path, fused_path, cfg)
    _run_compensate(fused_path, radiance_path, compensated_path, cfg)
    if reference is not None:
        _run_evaluate(fused_path, reference, os.path.join(outdir, "report_fused.json"), cfg)
        _run_evaluate(
            compensated_path, reference, os.path.join(outdir, "report_compensated.json"), cfg
        )


def cmd_fuse(args) -> int:
    _run_fuse(args.manifest, args.out, resolve_config(args))
    return 0


def cmd_estimate_crf(args) -> int:
    _run_estimate_crf(args.manifest, args.out, resolve_config(args))
    return 0


def cmd_merge_hdr(args) -> int:
    crf_path = None if args.auto_crf else args.crf
    _run_merge_hdr(args.manifest, args.out, resolve_config(args), crf_path=crf_path)
    return 0


def cmd_compensate(args) -> int:
    _run_compensate(args.fused, args.radiance, args.out, resolve_config(args))
    return 0


def cmd_synth(args) -> int:
    _run_synth(args.ground, args.outdir, args.evs, resolve_config(args))
    return 0


def cmd_evaluate(args) -> int:
    doc = _run_evaluate(args.image_a, args.image_b, args.report, resolve_config(args))
    print(f"mean_dH {doc['mean_dH']:.6f} over {doc['pixels']} pixels")
    return 0


def cmd_pipeline(args) -> int:
    _run_pipeline(args.manifest, args.outdir, resolve_config(args), reference=args.reference)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags override it")


def _add_crf_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="smoothness", type=float, default=None,
                   help="curvature penalty weight (default 50)")
    p.add_argument("--samples", type=int, default=None,
                   help="calibration pixel count (default 100)")
    p.add_argument("--seed", type=int, default=None, help="sampler seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="huefuse",
        description="Multi-exposure fusion with radiance-based hue compensation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse a bracketed stack into one PNG")
    p.add_argument("manifest")
    p.add_argument("out")
    p.add_argument("--weights", type=_parse_weights, default=None,
                   help="measure exponents c,s,e (default 1,1,1)")
    _add_common(p)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("estimate-crf", help="fit the inverse response table")
    p.add_argument("manifest")
    p.add_argument("out")
    _add_crf_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_estimate_crf)

    p = sub.add_parser("merge-hdr", help="recover a radiance map from a stack")
    p.add_argument("manifest")
    p.add_argument("out")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--crf", help="inverse response table JSON")
    g.add_argument("--auto-crf", action="store_true", help="estimate the table inline")
    _add_crf_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_merge_hdr)

    p = sub.add_parser("compensate", help="transplant HDR hue into a fused image")
    p.add_argument("fused")
    p.add_argument("radiance")
    p.add_argument("out")
    p.add_argument("--hdr-gamma", dest="hdr_gamma", action="store_const", const=True,
                   default=None, help="take hue from gamma-encoded radiance")
    _add_common(p)
    p.set_defaults(func=cmd_compensate)

    p = sub.add_parser("synth-stack", help="render a bracketed stack from an HDR file")
    p.add_argument("ground")
    p.add_argument("outdir")
    p.add_argument("--evs", type=_parse_evs, required=True,
                   help="comma-separated EV offsets, e.g. 0,0.5,-0.5,2,-2")
    p.add_argument("--gamma", type=float, default=None, help="render gamma (default 2.2)")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evaluate", help="mean CIEDE2000 hue difference of two PNGs")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("report")
    p.add_argument("--metric-variant", dest="metric_variant", choices=VARIANTS,
                   default=None)
    p.add_argument("--exclude-clipped", dest="exclude_clipped", action="store_const",
                   const=True, default=None, help="skip pixels clipped in either image")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="manifest -> fused, radiance, compensated (+reports)")
    p.add_argument("manifest")
    p.add_argument("outdir")
    p.add_argument("--reference", default=None,
                   help="reference PNG; adds hue-difference reports for fused and compensated")
    p.add_argument("--weights", type=_parse_weights, default=None)
    p.add_argument("--hdr-gamma", dest="hdr_gamma", action="store_const", const=True,
                   default=None)
    p.add_argument("--metric-variant", dest="metric_variant", choices=VARIANTS,
                   default=None)
    _add_crf_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CrfEstimationError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
