"""Candidate evaluation and the degrade -> fuse -> evaluate -> rank run.

evaluate_candidate() turns a (reference, candidate) image pair into the
full battery of scalar costs; run_manifest() evaluates every candidate of
a run manifest, aggregates the costs into rank tables for cases A-D and
serializes ranks.csv / report.json.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError
from .glcm3 import DEFAULT_GL, RingSpec, glcm3_cost
from .protocol import QiRecord, RankTable, aggregate
from .quantizer import (binary_contour_cost, cross_aura,
                        post_classification_change_count, quantize_spectral)
from .raster import MultibandImage, load_image
from .spectral import (BlockSpec, ergas, inverse_pcc_cost, mdb_cost, q4,
                       sam_mean, summary_stats)


@dataclass
class EvalOptions:
    ratio: int = 4
    ergas_factor: float | None = None
    block_size: int = 8
    gl: int = DEFAULT_GL
    radii: tuple[int, ...] = (1, 2, 3)
    category2_level: str = "coarse"


@dataclass
class Candidate:
    id: str
    path: str
    method: str = ""
    wall_seconds: float = 0.0
    n_free_parameters: int = 1


@dataclass
class RunManifest:
    reference: str
    ratio: int
    candidates: list[Candidate]
    options: EvalOptions = field(default_factory=EvalOptions)

    @classmethod
    def from_json(cls, path) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        opts = doc.get("options", {})
        options = EvalOptions(
            ratio=int(doc["ratio"]),
            ergas_factor=opts.get("ergas_factor"),
            block_size=int(opts.get("block_size", 8)),
            gl=int(opts.get("gl", DEFAULT_GL)),
            radii=tuple(opts.get("radii", (1, 2, 3))),
            category2_level=opts.get("category2_case", "coarse"),
        )
        cands = [Candidate(
            id=c["id"], path=c["path"], method=c.get("method", ""),
            wall_seconds=float(c.get("wall_seconds", 0.0)),
            n_free_parameters=int(c.get("n_free_parameters", 1)),
        ) for c in doc["candidates"]]
        ids = [c.id for c in cands]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate candidate ids in manifest")
        return cls(reference=doc["reference"], ratio=int(doc["ratio"]),
                   candidates=cands, options=options)


def evaluate_candidate(reference: MultibandImage, candidate: MultibandImage,
                       opts: EvalOptions, candidate_id: str = "",
                       process: dict | None = None) -> QiRecord:
    """Collect every product cost for one candidate against the reference."""
    if reference.samples.shape != candidate.samples.shape:
        raise InputError("reference/candidate shape mismatch")
    rings = RingSpec(opts.radii)

    cat1 = {}
    ref_stats = [summary_stats(reference.band(b), opts.gl).as_tuple()
                 for b in range(reference.bands)]
    cand_stats = [summary_stats(candidate.band(b), opts.gl).as_tuple()
                  for b in range(candidate.bands)]
    names = ("mean", "std", "skewness", "kurtosis", "entropy")
    for i, name in enumerate(names):
        cat1[name] = mdb_cost([s[i] for s in ref_stats],
                              [s[i] for s in cand_stats])

    stack_ref = quantize_spectral(reference)
    stack_cand = quantize_spectral(candidate)
    cat2 = {
        "post_class_change": float(post_classification_change_count(
            stack_ref, stack_cand, opts.category2_level)),
        "inverse_pcc": inverse_pcc_cost(reference, candidate),
    }

    contrast = energy = lne = 0.0
    for b in range(reference.bands):
        dc, de, dl = glcm3_cost(reference.band(b), candidate.band(b),
                                gl=opts.gl, rings=rings)
        contrast += dc
        energy += de
        lne += dl
    nb = reference.bands
    cat3 = {
        "glcm_contrast": contrast / nb,
        "glcm_energy": energy / nb,
        "glcm_lne": lne / nb,
        "cross_aura": abs(cross_aura(stack_ref)[1]
                          - cross_aura(stack_cand)[1]),
    }

    cat4 = {"binary_contour": binary_contour_cost(stack_ref, stack_cand)}
    process = process or {}
    return QiRecord(
        candidate_id=candidate_id, category1=cat1, category2=cat2,
        category3=cat3, category4=cat4,
        process={"wall_seconds": float(process.get("wall_seconds", 0.0)),
                 "n_free_parameters": int(process.get("n_free_parameters",
                                                      1))})


def classic_metrics(reference: MultibandImage, candidate: MultibandImage,
                    opts: EvalOptions) -> dict:
    """SAM / ERGAS / Q4 comparison report entries."""
    sam_deg, _ = sam_mean(reference, candidate)
    out = {
        "sam_degrees": sam_deg,
        "ergas": ergas(reference, candidate, opts.ratio, opts.ergas_factor),
    }
    if reference.bands == 4:
        out["q4"] = q4(reference, candidate, BlockSpec(opts.block_size))
    return out


def _max_workers() -> int:
    env = os.environ.get("PANQA_THREADS", "")
    try:
        n = int(env)
    except ValueError:
        n = 0
    return max(1, n) if n else 1


def run_manifest(manifest: RunManifest, out_dir) -> RankTable:
    """Evaluate all candidates, aggregate, write ranks.csv + report.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reference = load_image(manifest.reference)
    opts = manifest.options
    opts.ratio = manifest.ratio

    def one(cand: Candidate) -> QiRecord:
        img = load_image(cand.path)
        return evaluate_candidate(
            reference, img, opts, candidate_id=cand.id,
            process={"wall_seconds": cand.wall_seconds,
                     "n_free_parameters": cand.n_free_parameters})

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, manifest.candidates))
    else:
        records = [one(c) for c in manifest.candidates]

    table = aggregate(records, include_process=True)
    write_rank_csv(table, out_dir / "ranks.csv")
    write_report(records, table, out_dir / "report.json")
    return table


_CSV_COLUMNS = (
    ("SPCTRL PDPR", lambda t, i: t.pdpr["category1"][i]),
    ("SPCTRL&SPTL1(i) PDPR", lambda t, i: t.pdpr["category2_i"][i]),
    ("SPCTRL&SPTL1(ii) PDPR", lambda t, i: t.pdpr["category2_ii"][i]),
    ("SPCTRL&SPTL2 PDPR", lambda t, i: t.pdpr["category3"][i]),
    ("SPCTRL&SPTL1&SPTL2 PDPR", lambda t, i: t.pdpr["category4"][i]),
    ("PSPR1", lambda t, i: t.pspr1[i] if t.pspr1 else ""),
    ("PSPR2", lambda t, i: t.pspr2[i] if t.pspr2 else ""),
    ("Sum case A", lambda t, i: t.sum_case_a[i]),
    ("PDFR case A", lambda t, i: t.pdfr_case_a[i]),
    ("Sum case C", lambda t, i: t.sum_case_c[i]),
    ("PDFR case C", lambda t, i: t.pdfr_case_c[i]),
    ("Sum case B", lambda t, i: t.sum_case_b[i] if t.sum_case_b else ""),
    ("PPFR case B", lambda t, i: t.ppfr_case_b[i] if t.ppfr_case_b else ""),
    ("Sum case D", lambda t, i: t.sum_case_d[i] if t.sum_case_d else ""),
    ("PPFR case D", lambda t, i: t.ppfr_case_d[i] if t.ppfr_case_d else ""),
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_rank_csv(table: RankTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["candidate"] + [name for name, _ in _CSV_COLUMNS])
        for i in range(len(table.candidate_ids)):
            writer.writerow([table.candidate_ids[i]]
                            + [_fmt(fn(table, i)) for _, fn in _CSV_COLUMNS])


def write_report(records: list[QiRecord], table: RankTable, path) -> None:
    doc = {
        "candidates": [{
            "id": r.candidate_id,
            "category1": r.category1,
            "category2": r.category2,
            "category3": r.category3,
            "category4": r.category4,
            "process": r.process,
        } for r in records],
        "ranks": {
            "pdpr": table.pdpr,
            "pspr1": table.pspr1,
            "pspr2": table.pspr2,
            "sum_case_a": table.sum_case_a,
            "pdfr_case_a": table.pdfr_case_a,
            "sum_case_c": table.sum_case_c,
            "pdfr_case_c": table.pdfr_case_c,
            "sum_case_b": table.sum_case_b,
            "ppfr_case_b": table.ppfr_case_b,
            "sum_case_d": table.sum_case_d,
            "ppfr_case_d": table.ppfr_case_d,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
