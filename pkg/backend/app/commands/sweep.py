import argparse
import itertools
import logging
from collections import Counter
from typing import Any, Dict, List

from app import config
from app.services.criteria import CLASS_TAGS, OVERGENERATED, ClassificationReport, classify
from app.services.galois_models import ModelParams, Variant, build_model
from app.services.plocal import check_prime
from app.utils.emit import EMIT_FORMATS, to_csv, to_json, to_table, write_output

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "class_tag",
    "dim",
    "detA_res",
    "detK_res",
    "knot_trivial",
    "condition_iii",
    "case",
    "x_tilde_trivial",
    "constraints_ok",
]


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="Classify every residue tuple mod p")
    parser.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--emit", choices=EMIT_FORMATS, default="csv")
    parser.add_argument("--output", help="Write to this file instead of stdout")
    parser.set_defaults(handler=run)


def columns_for(variant: Variant) -> List[str]:
    names = ["a", "b", "c"] if variant is Variant.DEG6 else ["a", "b"]
    return names + RESULT_COLUMNS


def row_of(report: ClassificationReport) -> Dict[str, Any]:
    row = {"a": report.a, "b": report.b}
    if report.c is not None:
        row["c"] = report.c
    row.update(
        class_tag=report.class_group.tag,
        dim=report.class_group.dim,
        detA_res=report.det_A.residue,
        detK_res=report.det_K.residue,
        knot_trivial=report.knot_trivial,
        condition_iii=report.condition_iii,
        case=report.case,
        x_tilde_trivial=report.x_tilde_trivial,
        constraints_ok=report.constraints_ok,
    )
    return row


def sweep_rows(variant: Variant, p: int) -> List[Dict[str, Any]]:
    """One row per residue tuple in lexicographic order, from unchecked models."""
    check_prime(p)
    limit = config.sweep_max_prime()
    if p > limit:
        raise ValueError(f"p = {p} exceeds the sweep limit {limit} (KNOT_SWEEP_MAX_P)")
    arity = 3 if variant is Variant.DEG6 else 2
    logger.info(f"Sweeping {variant.value} over {p ** arity} residue tuples at p={p}")
    rows = []
    for values in itertools.product(range(p), repeat=arity):
        params = ModelParams(variant=variant, p=p, **dict(zip("abc", values)))
        rows.append(row_of(classify(build_model(params, checked=False))))
    logger.info(f"Sweep of {variant.value} at p={p} finished")
    return rows


def summarize(rows: List[Dict[str, Any]]) -> Dict[str, int]:
    tags = Counter(row["class_tag"] for row in rows)
    summary = {"rows": len(rows)}
    for tag in list(CLASS_TAGS.values()) + [OVERGENERATED]:
        summary[tag] = tags.get(tag, 0)
    for flag in ("knot_trivial", "condition_iii", "x_tilde_trivial", "constraints_ok"):
        summary[flag] = sum(1 for row in rows if row[flag] is True)
    return summary


def run(args: argparse.Namespace) -> int:
    variant = Variant(args.variant)
    rows = sweep_rows(variant, args.p)
    summary = summarize(rows)
    footer = "summary: " + " ".join(f"{key}={value}" for key, value in summary.items())
    columns = columns_for(variant)
    if args.emit == "json":
        text = to_json({"variant": variant.value, "p": args.p, "rows": rows, "summary": summary})
    elif args.emit == "csv":
        text = to_csv(columns, rows, footer)
    else:
        text = to_table(columns, rows, footer)
    write_output(text, args.output)
    return 0
