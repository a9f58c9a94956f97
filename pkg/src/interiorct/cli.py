"""Command-line front end: simulate, recon, dataset, eval.

Exit codes: 0 success, 2 validation/usage error, 3 iterative divergence.
The default output directory is the current directory or the
``INTERIORCT_OUTDIR`` environment variable.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .dataset import augment, build_pairs, write_dataset
from .dbp import bpf_reconstruct
from .errors import DivergenceError, ValidationError
from .fbp import FilterSpec, export_png, fbp_reconstruct
from .geometry import make_geometry
from .metrics import evaluate
from .phantom import Phantom, analytic_sinogram, random_phantom, rasterize
from .projector import (Image, Sinogram, disk_mask, forward_project,
                        read_image, read_sinogram, subsample_views, truncate,
                        write_image, write_sinogram)
from .tv import TvParams, tv_pocs_reconstruct

__all__ = ["main"]


def _outdir(args) -> Path:
    out = args.outdir or os.environ.get("INTERIORCT_OUTDIR", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_geometry_flags(p: argparse.ArgumentParser):
    p.add_argument("--n-det", type=int, default=1440)
    p.add_argument("--pitch", type=float, default=1.0)
    p.add_argument("--n-views", type=int, default=1200)
    p.add_argument("--dso", type=float, default=800.0)
    p.add_argument("--dsd", type=float, default=1400.0)
    p.add_argument("--n-pix", type=int, default=256)
    p.add_argument("--fov", type=float, default=None,
                   help="image side [mm]; default spans the full-detector ROI")
    p.add_argument("--scan-range", type=float, default=2.0 * math.pi)
    p.add_argument("--start-angle", type=float, default=0.0)


def _geometry_from(args):
    return make_geometry(args.n_det, args.pitch, args.n_views, args.dso,
                         args.dsd, args.n_pix, args.fov, args.scan_range,
                         args.start_angle)


def cmd_simulate(args) -> int:
    path = Path(args.phantom)
    if not path.exists():
        raise ValidationError(f"phantom file not found: {path}")
    phantom = Phantom.from_json(path.read_text())
    geom = _geometry_from(args)
    if args.analytic:
        sino = analytic_sinogram(phantom, geom)
    else:
        img = Image(rasterize(phantom, geom.n_pix, geom.fov,
                              supersample=2), geom.fov)
        sino = forward_project(img, geom)
    if args.truncate is not None:
        sino = truncate(sino, args.truncate)
    stem = _outdir(args) / args.output
    write_sinogram(sino, stem)
    print(f"wrote {stem}.json / {stem}.raw "
          f"({geom.n_views} views x {geom.n_det} det)")
    return 0


def cmd_recon(args) -> int:
    stem = Path(args.sinogram)
    if not stem.with_suffix(".json").exists():
        raise ValidationError(f"sinogram not found: {stem}.json")
    sino = read_sinogram(stem)
    geom = sino.geom
    if args.views is not None:
        sino = subsample_views(sino, args.views)
        geom = sino.geom
    if args.truncate is not None:
        sino = truncate(sino, args.truncate)
    if args.start_angle is not None:
        geom = replace(geom, start_angle=args.start_angle)
        sino = Sinogram(sino.data, geom, sino.mask)
    if args.pixel_size is not None:
        n_pix = max(int(round(geom.fov / args.pixel_size)), 1)
        geom = replace(geom, n_pix=n_pix)
        sino = Sinogram(sino.data, geom, sino.mask)

    result = None
    if args.method == "fbp":
        img = fbp_reconstruct(sino, geom, FilterSpec(kind=args.filter))
    elif args.method == "bpf":
        if sino.is_truncated and not args.allow_illposed:
            raise ValidationError(
                "bpf on truncated data is ill-posed; pass --allow-illposed "
                "to run it anyway, or use --method tv")
        if sino.is_truncated:
            sino = Sinogram(sino.data, geom, np.ones(geom.n_det, dtype=bool))
        img = bpf_reconstruct(sino, geom)
    else:
        params = TvParams(n_outer=args.tv_outer, tv_step=args.tv_step,
                          tv_inner=args.tv_inner, relax=args.tv_relax,
                          nonneg=args.tv_nonneg)
        result = tv_pocs_reconstruct(sino, geom, params)
        img = result.image

    out = _outdir(args) / args.output
    write_image(img, out, {"method": args.method})
    export_png(img, out.with_suffix(".png"),
               window=(args.window[0], args.window[1]))
    msgs = [f"wrote {out}.json / {out}.raw / {out}.png"]
    if result is not None:
        result.residuals_to_csv(out.parent / (out.name + "_residuals.csv"))
        msgs.append(f"residual log: {out}_residuals.csv")
    if args.profile_row is not None:
        iy = int(round(args.profile_row / img.pixel_size
                       + img.n_pix / 2.0 - 0.5))
        iy = min(max(iy, 0), img.n_pix - 1)
        x = (np.arange(img.n_pix) + 0.5 - img.n_pix / 2.0) * img.pixel_size
        ppath = out.parent / (out.name + "_profile.csv")
        np.savetxt(ppath, np.column_stack([x, img.data[iy]]), delimiter=",",
                   header="position_mm,value", comments="")
        msgs.append(f"profile: {ppath}")
    if args.ref is not None:
        ref = read_image(Path(args.ref))
        mask = None
        if args.roi is not None:
            mask = disk_mask(img.n_pix, img.fov, args.roi)
        report = evaluate(img, ref, mask)
        rpath = out.parent / (out.name + "_metrics.json")
        rpath.write_text(report.to_json())
        msgs.append(f"metrics: {rpath} "
                    f"(psnr_standard={report.psnr_standard:.2f} dB)")
    print("\n".join(msgs))
    return 0


def cmd_dataset(args) -> int:
    detectors = [int(tok) for tok in args.detectors.split(",") if tok]
    geom = _geometry_from(args)
    rng = np.random.default_rng(args.seed)
    phantoms = [random_phantom(rng, body_radius=0.42 * geom.fov)
                for _ in range(args.n_phantoms)]
    pairs = build_pairs(phantoms, geom, detectors, args.type)
    if args.augment:
        pairs = augment(pairs, geom, flips=args.flips)
    out = _outdir(args) / args.output
    manifest = write_dataset(pairs, geom, out)
    print(f"wrote {out}.json / {out}.raw ({manifest.n_pairs} pairs, "
          f"type {args.type}, detectors {detectors})")
    return 0


def cmd_eval(args) -> int:
    est = read_image(Path(args.estimate))
    ref = read_image(Path(args.reference))
    mask = None
    if args.roi is not None:
        mask = disk_mask(est.n_pix, est.fov, args.roi)
    report = evaluate(est, ref, mask)
    out = _outdir(args) / args.output
    out.with_suffix(".json").write_text(report.to_json())
    out.with_suffix(".csv").write_text(
        report.csv_header() + "\n" + report.to_csv_row() + "\n")
    print(f"psnr_paper={report.psnr_paper:.4f} dB  "
          f"psnr_standard={report.psnr_standard:.4f} dB  "
          f"ssim={report.ssim:.4f}  nmse={report.nmse:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="interiorct",
        description="Fan-beam interior tomography toolkit")
    ap.add_argument("--outdir", default=None,
                    help="output directory (default: $INTERIORCT_OUTDIR or .)")
    ap.add_argument("--threads", type=int, default=None,
                    help="cap the numba worker count")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="project a phantom to a sinogram")
    ps.add_argument("phantom", help="phantom description (JSON)")
    _add_geometry_flags(ps)
    ps.add_argument("--analytic", action="store_true",
                    help="use the exact closed-form sinogram")
    ps.add_argument("--truncate", type=int, default=None, metavar="N",
                    help="keep only the central N detector channels")
    ps.add_argument("-o", "--output", default="sino")
    ps.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("recon", help="reconstruct an image from a sinogram")
    pr.add_argument("sinogram", help="sinogram stem (without extension)")
    pr.add_argument("--method", choices=("fbp", "bpf", "tv"), default="fbp")
    pr.add_argument("--truncate", type=int, default=None, metavar="N")
    pr.add_argument("--views", type=int, default=None,
                    help="subsample to this many views (must divide)")
    pr.add_argument("--start-angle", type=float, default=None)
    pr.add_argument("--pixel-size", type=float, default=None,
                    help="reconstruction pixel size [mm]")
    pr.add_argument("--filter", choices=("ramp", "ramp-hann"), default="ramp")
    pr.add_argument("--allow-illposed", action="store_true")
    pr.add_argument("--window", type=float, nargs=2, default=(-150.0, 300.0),
                    metavar=("LO", "HI"), help="PNG display window")
    pr.add_argument("--profile-row", type=float, default=None, metavar="Y_MM",
                    help="export a horizontal profile CSV at this y [mm]")
    pr.add_argument("--ref", default=None,
                    help="reference image stem for a metric report")
    pr.add_argument("--roi", type=float, default=None,
                    help="restrict metrics to this ROI radius [mm]")
    pr.add_argument("--tv-outer", type=int, default=20)
    pr.add_argument("--tv-inner", type=int, default=20)
    pr.add_argument("--tv-step", type=float, default=0.2)
    pr.add_argument("--tv-relax", type=float, default=0.9)
    pr.add_argument("--tv-nonneg", action=argparse.BooleanOptionalAction,
                    default=True)
    pr.add_argument("-o", "--output", default="recon")
    pr.set_defaults(func=cmd_recon)

    pd = sub.add_parser("dataset", help="build a training dataset")
    pd.add_argument("--type", type=int, choices=(1, 2), required=True)
    pd.add_argument("--detectors", required=True,
                    help="comma-separated kept-detector counts")
    pd.add_argument("--n-phantoms", type=int, default=10)
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--augment", action="store_true",
                    help="add 45/90/135 degree rotated, re-simulated copies")
    pd.add_argument("--flips", choices=("none", "append", "replace"),
                    default="none")
    _add_geometry_flags(pd)
    pd.add_argument("-o", "--output", default="dataset")
    pd.set_defaults(func=cmd_dataset)

    pe = sub.add_parser("eval", help="metric report for an image pair")
    pe.add_argument("estimate", help="estimate image stem")
    pe.add_argument("reference", help="reference image stem")
    pe.add_argument("--roi", type=float, default=None)
    pe.add_argument("-o", "--output", default="metrics")
    pe.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        import numba
        numba.set_num_threads(max(1, args.threads))
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
