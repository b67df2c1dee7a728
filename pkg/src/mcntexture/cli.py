"""Command-line pipeline: split -> thresholds -> extract -> classify, plus render.

Every subcommand validates its flags up front, writes outputs atomically, and
echoes the effective configuration into its artifacts. Exit status is nonzero
on any error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from ._util import atomic_write_text, resolve_jobs
from .classify import loo_evaluate
from .dataset import (
    Manifest,
    load_image,
    load_manifest,
    save_png,
    tile_tree,
    write_manifest,
)
from .descriptor import (
    ExtractionConfig,
    extract_batch,
    feature_layout,
    load_features_csv,
    write_features_csv,
)
from .measures import export_field_csv, measure_fields, render_measure_map
from .thresholds import (
    edge_weight_histogram,
    lower_limit,
    threshold_set,
    upper_limit_mean_degree,
    upper_limit_quantile,
    write_histogram_csv,
)


def _parse_radii(text):
    radii = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-")
            radii.extend(range(int(lo), int(hi) + 1))
        elif part:
            radii.append(int(part))
    return tuple(radii)


def _parse_variants(text):
    text = text.replace(",", "").replace(" ", "").upper()
    return tuple(text)


def _config_from_args(args):
    return ExtractionConfig(
        radii=_parse_radii(args.radii),
        m=args.thresholds_m,
        variants=_parse_variants(args.variants),
        sigma_mode=args.sigma_mode,
        histogram_radius=args.histogram_radius,
        rule=args.rule,
        quantile=args.quantile,
    )


def _add_extraction_flags(p, radii_default="1-5"):
    p.add_argument("--radii", default=radii_default,
                   help="comma list or span, e.g. 1,2,3 or 1-5")
    p.add_argument("--thresholds-m", type=int, default=10,
                   help="number of equidistant thresholds")
    p.add_argument("--variants", default="NWB",
                   help="network variants to characterize (subset of NWB)")
    p.add_argument("--rule", choices=("quantile", "mean-degree"),
                   default="quantile", help="upper threshold limit rule")
    p.add_argument("--quantile", type=float, default=0.9,
                   help="mass fraction for the quantile rule")
    p.add_argument("--sigma-mode", choices=("normalized", "verbatim"),
                   default="normalized", help="standard deviation normalization")
    p.add_argument("--histogram-radius", type=int, default=1,
                   help="radius of the networks pooled into the histogram")


def cmd_split(args):
    out_manifest = os.path.join(args.out_dir, "manifest.csv")
    if os.path.exists(out_manifest) and not args.force:
        raise FileExistsError(
            f"{out_manifest} already exists (pass --force to overwrite)"
        )
    manifest = tile_tree(args.dataset_dir, args.out_dir, args.tile_w, args.tile_h)
    write_manifest(manifest, out_manifest)
    print(f"wrote {len(manifest)} tiles and {out_manifest}")
    return 0


def cmd_thresholds(args):
    manifest = load_manifest(args.manifest)
    root = os.path.dirname(os.path.abspath(args.manifest))
    images = manifest.load_images(root=root)
    if len(images) == 1:
        print("warning: single-image corpus; threshold limits may be unstable",
              file=sys.stderr)
    hist = edge_weight_histogram(images, r=args.histogram_radius)
    t1 = lower_limit(hist)
    if args.rule == "quantile":
        t_m = upper_limit_quantile(hist, q=args.quantile)
    else:
        t_m = upper_limit_mean_degree(images, args.histogram_radius, hist)
    plan = threshold_set(t1, max(t_m, t1), args.thresholds_m)
    payload = plan.to_dict()
    payload["config"] = {
        "rule": args.rule,
        "quantile": args.quantile,
        "histogram_radius": args.histogram_radius,
        "n_images": len(images),
    }
    atomic_write_text(args.out_plan, json.dumps(payload, indent=2, sort_keys=True))
    if args.out_hist:
        write_histogram_csv(hist, args.out_hist)
    print(f"t1={plan.t1:.6g} t_m={plan.t_m:.6g} m={plan.m} -> {args.out_plan}")
    return 0


def _load_plan(path, m):
    with open(path) as fh:
        payload = json.load(fh)
    thresholds = np.asarray(payload["thresholds"], dtype=np.float64)
    plan = threshold_set(payload["t1"], payload["t_m"], payload["m"])
    if not np.allclose(plan.thresholds, thresholds, rtol=0, atol=1e-15):
        plan.thresholds[:] = thresholds
    if plan.m != m:
        raise ValueError(f"plan {path} has m={plan.m}, --thresholds-m is {m}")
    return plan


def cmd_extract(args):
    config = _config_from_args(args)
    manifest = load_manifest(args.manifest)
    root = os.path.dirname(os.path.abspath(args.manifest))
    images = manifest.load_images(root=root)
    plan = _load_plan(args.plan, config.m) if args.plan else None
    jobs = resolve_jobs(args.jobs)
    matrix, plan = extract_batch(images, config, plan=plan, n_jobs=jobs)
    echo = config.to_dict()
    echo["t1"] = plan.t1
    echo["t_m"] = plan.t_m
    write_features_csv(
        args.out,
        matrix,
        manifest.paths(),
        manifest.labels().tolist(),
        feature_layout(config),
        config_echo=echo,
    )
    print(f"extracted {matrix.shape[0]} x {matrix.shape[1]} features -> {args.out}")
    return 0


def cmd_classify(args):
    ids, labels, matrix, names, config = load_features_csv(args.features)
    echo = dict(config or {})
    echo["lambda"] = args.lam
    report = loo_evaluate(matrix, labels, shrinkage=args.lam, config=echo)
    if args.out_json:
        atomic_write_text(args.out_json, report.to_json())
    print(report.to_text())
    return 0


def cmd_render(args):
    image = load_image(args.image)
    fields = measure_fields(image, args.radius, [args.threshold],
                            variants=(args.variant,))
    field = fields[args.variant][0]
    save_png(render_measure_map(field, measure=args.measure), args.out)
    if args.csv:
        export_field_csv(field, args.csv)
    print(f"rendered {args.variant}/{args.measure} map -> {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="mcn",
        description="Multilayer complex-network color-texture descriptors",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("split", help="tile a class tree and write a manifest")
    sp.add_argument("dataset_dir")
    sp.add_argument("out_dir")
    sp.add_argument("--tile-w", type=int, default=128)
    sp.add_argument("--tile-h", type=int, default=128)
    sp.add_argument("--force", action="store_true",
                    help="overwrite an existing manifest")
    sp.set_defaults(func=cmd_split)

    tp = sub.add_parser("thresholds", help="estimate the threshold plan")
    tp.add_argument("manifest")
    tp.add_argument("--out-plan", required=True, help="plan JSON output path")
    tp.add_argument("--out-hist", default=None, help="histogram CSV output path")
    tp.add_argument("--thresholds-m", type=int, default=10)
    tp.add_argument("--rule", choices=("quantile", "mean-degree"),
                    default="quantile")
    tp.add_argument("--quantile", type=float, default=0.9)
    tp.add_argument("--histogram-radius", type=int, default=1)
    tp.set_defaults(func=cmd_thresholds)

    ep = sub.add_parser("extract", help="extract the feature matrix")
    ep.add_argument("manifest")
    ep.add_argument("--plan", default=None,
                    help="plan JSON (defaults to estimating from the manifest)")
    ep.add_argument("--out", required=True, help="features CSV output path")
    ep.add_argument("--jobs", type=int, default=None,
                    help="image-level parallelism (MCN_NUM_THREADS as fallback)")
    _add_extraction_flags(ep)
    ep.set_defaults(func=cmd_extract)

    cp = sub.add_parser("classify", help="leave-one-out LDA on a feature CSV")
    cp.add_argument("features")
    cp.add_argument("--lambda", dest="lam", type=float, default=1e-4,
                    help="covariance shrinkage")
    cp.add_argument("--out-json", default=None)
    cp.set_defaults(func=cmd_classify)

    rp = sub.add_parser("render", help="render a measure map as PNG")
    rp.add_argument("image")
    rp.add_argument("--out", required=True)
    rp.add_argument("--radius", type=int, default=4)
    rp.add_argument("--threshold", type=float, default=0.08)
    rp.add_argument("--variant", choices=("N", "W", "B"), default="N")
    rp.add_argument("--measure", choices=("degree", "clustering"),
                    default="degree")
    rp.add_argument("--csv", default=None,
                    help="also export the raw field as CSV")
    rp.set_defaults(func=cmd_render)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
