"""Command-line surface for the pansharpening evaluation pipeline.

Exit codes: 0 success, 2 input error, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import glcm3 as glcm3_mod
from . import quantizer as quant_mod
from .errors import DegeneracyError, InputError, PanqaError
from .fusion import FUSION_METHODS, FusionConfig, pansharpen
from .pipeline import (EvalOptions, RunManifest, classic_metrics,
                       evaluate_candidate, run_manifest)
from .protocol import srcc
from .raster import MultibandImage, load_image, save_image
from .resample import (DEFAULT_MTF_GAIN_MS, UPSAMPLE_METHODS, degrade,
                       mtf_gaussian_kernel)
from .spectral import BlockSpec, qnr
from .synth import synth_scene


def _radii(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def cmd_synth(args) -> int:
    ms, pan = synth_scene(args.seed, args.width, args.height)
    save_image(ms, args.out_ms)
    save_image(MultibandImage(pan), args.out_pan)
    return 0


def cmd_degrade(args) -> int:
    img = load_image(args.input)
    kernel = mtf_gaussian_kernel(args.ratio, args.mtf_gain)
    save_image(degrade(img, args.ratio, kernel), args.out)
    return 0


def cmd_fuse(args) -> int:
    ms = load_image(args.ms)
    pan = load_image(args.pan)
    if pan.bands != 1:
        raise InputError("pan image must have exactly one band")
    cfg = FusionConfig(method=args.method, resampler=args.resample,
                       wavelet_levels=args.levels)
    fused, meta = pansharpen(ms, pan.band(0), cfg)
    save_image(fused, args.out)
    if args.process_meta:
        with open(args.process_meta, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_eval(args) -> int:
    reference = load_image(args.reference)
    candidate = load_image(args.candidate)
    opts = EvalOptions(ratio=args.ratio, ergas_factor=args.ergas_factor,
                       block_size=args.block_size, gl=args.gl,
                       radii=args.radii)
    record = evaluate_candidate(reference, candidate, opts,
                                candidate_id=args.candidate)
    doc = {
        "category1": record.category1,
        "category2": record.category2,
        "category3": record.category3,
        "category4": record.category4,
        "classic": classic_metrics(reference, candidate, opts),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_qnr(args) -> int:
    ms = load_image(args.ms)
    pan = load_image(args.pan)
    fused = load_image(args.fused)
    kernel = mtf_gaussian_kernel(args.ratio, args.mtf_gain)
    pan_l = degrade(pan, args.ratio, kernel).band(0)
    value, d_lambda, d_s = qnr(ms, fused, pan.band(0), pan_l,
                               blocks=BlockSpec(args.block_size))
    doc = {"qnr": value, "d_lambda": d_lambda, "d_s": d_s}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_glcm3(args) -> int:
    img = load_image(args.input)
    labels = glcm3_mod.quantize_gray_levels(img.band(args.band), args.gl)
    matrix = glcm3_mod.tims_glcm(labels, glcm3_mod.RingSpec(args.radii),
                                 gl=args.gl)
    contrast, energy, lne = glcm3_mod.glcm3_features(matrix)
    doc = {"contrast": contrast, "energy": energy, "lne": lne,
           "total_tuples": matrix.total_tuples}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    if args.dump_matrix:
        d, r, c = np.nonzero(matrix.counts)
        with open(args.dump_matrix, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["depth", "row", "col", "count"])
            for row in zip(d, r, c, matrix.counts[d, r, c]):
                writer.writerow([int(v) for v in row])
    return 0


def cmd_quantize(args) -> int:
    img = load_image(args.input)
    stack = quant_mod.quantize_spectral(img)
    planes = np.stack([stack.fine, stack.intermediate, stack.coarse], axis=2)
    save_image(MultibandImage(planes.astype(np.float64),
                              band_names=["fine", "intermediate", "coarse"]),
               args.out, sample_type="u16")
    return 0


def _load_stack(path) -> quant_mod.LabelMapStack:
    img = load_image(path)
    if img.bands != 3:
        raise InputError("label stack image must have 3 bands")
    fine = img.band(0).astype(np.int64)
    inter = img.band(1).astype(np.int64)
    coarse = img.band(2).astype(np.int64)
    # level counts are fixed by the reference quantizer's code books
    return quant_mod.LabelMapStack(
        fine=fine, intermediate=inter, coarse=coarse,
        level_counts=(64, 8, 2),
        merge_fine_to_intermediate=np.zeros(0, dtype=np.int64),
        merge_intermediate_to_coarse=np.zeros(0, dtype=np.int64))


def cmd_contours(args) -> int:
    stack_a = _load_stack(args.a)
    stack_b = _load_stack(args.b)
    _, mean_a = quant_mod.cross_aura(stack_a)
    _, mean_b = quant_mod.cross_aura(stack_b)
    doc = {
        "cross_aura_mean_a": mean_a,
        "cross_aura_mean_b": mean_b,
        "cross_aura_cost": abs(mean_a - mean_b),
        "binary_contour_cost": quant_mod.binary_contour_cost(stack_a,
                                                             stack_b),
        "post_class_change_coarse": quant_mod.post_classification_change_count(
            stack_a, stack_b, "coarse"),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_rank(args) -> int:
    manifest = RunManifest.from_json(args.manifest)
    run_manifest(manifest, args.out_dir)
    return 0


def cmd_srcc(args) -> int:
    with open(args.table, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    try:
        col_a = [float(r[args.col_a]) for r in rows]
        col_b = [float(r[args.col_b]) for r in rows]
    except KeyError as exc:
        raise InputError(f"column {exc} not in table") from exc
    print(f"{srcc(col_a, col_b):.4f}")
    return 0


def cmd_mos(args) -> int:
    from .protocol import bin_subjective_scores
    with open(args.scores, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    ids = [r[0] for r in rows]
    matrix = [[float(v) for v in r[1:]] for r in rows]
    labels = bin_subjective_scores(matrix)
    for cid, label in zip(ids, labels):
        print(f"{cid},{label}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panqa",
        description="Quantitative quality assessment for pansharpening")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--out-ms", required=True)
    p.add_argument("--out-pan", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("degrade", help="MTF-matched low-pass and decimate")
    p.add_argument("--input", required=True)
    p.add_argument("--ratio", type=int, required=True)
    p.add_argument("--mtf-gain", type=float, default=DEFAULT_MTF_GAIN_MS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("fuse", help="run a reference pansharpener")
    p.add_argument("--method", choices=FUSION_METHODS, required=True)
    p.add_argument("--ms", required=True)
    p.add_argument("--pan", required=True)
    p.add_argument("--resample", choices=UPSAMPLE_METHODS, default="bicubic")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--out", required=True)
    p.add_argument("--process-meta", default="")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval", help="all product costs + classic metrics")
    p.add_argument("--reference", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--ratio", type=int, default=4)
    p.add_argument("--ergas-factor", type=float, default=None)
    p.add_argument("--block-size", type=int, default=8)
    p.add_argument("--gl", type=int, default=32)
    p.add_argument("--radii", type=_radii, default=(1, 2, 3))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("qnr", help="no-reference QNR / D_lambda / D_s")
    p.add_argument("--ms", required=True)
    p.add_argument("--pan", required=True)
    p.add_argument("--fused", required=True)
    p.add_argument("--ratio", type=int, default=4)
    p.add_argument("--mtf-gain", type=float, default=DEFAULT_MTF_GAIN_MS)
    p.add_argument("--block-size", type=int, default=8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_qnr)

    p = sub.add_parser("glcm3", help="third-order texture features")
    p.add_argument("--input", required=True)
    p.add_argument("--band", type=int, default=0)
    p.add_argument("--gl", type=int, default=32)
    p.add_argument("--radii", type=_radii, default=(1, 2, 3))
    p.add_argument("--out", required=True)
    p.add_argument("--dump-matrix", default="")
    p.set_defaults(func=cmd_glcm3)

    p = sub.add_parser("quantize", help="three-level spectral label maps")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("contours", help="contour costs between label stacks")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_contours)

    p = sub.add_parser("rank", help="full pipeline from a run manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("srcc", help="Spearman correlation of two columns")
    p.add_argument("--table", required=True)
    p.add_argument("--col-a", required=True)
    p.add_argument("--col-b", required=True)
    p.set_defaults(func=cmd_srcc)

    p = sub.add_parser("mos", help="bin subjective scores into letter labels")
    p.add_argument("--scores", required=True,
                   help="CSV: candidate id followed by per-subject scores")
    p.set_defaults(func=cmd_mos)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, PanqaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
