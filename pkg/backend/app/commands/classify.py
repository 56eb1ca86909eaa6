import argparse
import logging

from app.services.criteria import classify
from app.services.galois_models import ModelParams, Variant, build_model
from app.utils.emit import EMIT_FORMATS, cell, payload, to_csv, to_json, to_table, write_output

logger = logging.getLogger(__name__)

DEG2_STATEMENT = "X(k̃) = 0 if and only if X(k_cyc) ≅ Z_p (no parameters)"
VARIANT_CHOICES = ["deg2"] + [v.value for v in Variant]


def register(subparsers) -> None:
    parser = subparsers.add_parser("classify", help="Classify one parameter tuple")
    parser.add_argument("--variant", required=True, choices=VARIANT_CHOICES)
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--a", type=int)
    parser.add_argument("--b", type=int)
    parser.add_argument("--c", type=int)
    parser.add_argument("--unchecked", action="store_true", help="Allow tuples violating the existence constraints")
    parser.add_argument("--emit", choices=EMIT_FORMATS, default="json")
    parser.add_argument("--output", help="Write to this file instead of stdout")
    parser.set_defaults(handler=run)


def _report_rows(report) -> list:
    data = payload(report)
    rows = []
    for key in ("variant", "p", "a", "b", "c", "constraints_ok", "knot_trivial", "condition_iii", "case", "x_tilde_trivial"):
        if key == "c" and data[key] is None:
            continue
        rows.append({"field": key, "value": data[key]})
    rows.append({"field": "class_group", "value": f"{report.class_group.tag} (dim {report.class_group.dim})"})
    for key in ("det_A", "det_K"):
        s = data[key]
        valuation = cell(s["valuation"], "inf")
        rows.append({"field": key, "value": f"{s['value']} (residue {s['residue']}, valuation {valuation})"})
    return rows


def run(args: argparse.Namespace) -> int:
    if args.variant == "deg2":
        write_output(DEG2_STATEMENT + "\n", args.output)
        return 0
    if args.a is None or args.b is None:
        raise ValueError("classify needs --a and --b")
    params = ModelParams(variant=Variant(args.variant), p=args.p, a=args.a, b=args.b, c=args.c)
    model = build_model(params, checked=not args.unchecked)
    report = classify(model)
    if args.emit == "json":
        text = to_json(report)
    else:
        rows = _report_rows(report)
        if args.emit == "csv":
            text = to_csv(["field", "value"], rows)
        else:
            text = to_table(["field", "value"], rows)
    write_output(text, args.output)
    return 0
