"""Command-line front-end.

Every subcommand reads model files, writes a JSON result to stdout and
exits with 0 on success, 1 when the decided property is false (invalid
model, not bisimilar, no spurious witness) and 2 on errors.  Model-producing
commands can additionally write a Graphviz rendering with `--dot PATH`.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bisim import BisimResult, compare, minimize
from .compose import imdp_interleaved_product, imdp_sync_product, pa_sync_product
from .model import Imdp, ModelError, Pa, Partition, validate
from .serialize import (
    FormatError,
    _fmt,
    model_to_doc,
    parse_model,
    serialize_model,
    to_dot,
)
from .transform import fold, spurious_witness, unfold


def _load(path: str) -> Imdp | Pa:
    return parse_model(Path(path).read_bytes())


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False))


def _emit_model(model: Imdp | Pa) -> None:
    sys.stdout.write(serialize_model(model).decode("utf-8"))


def _maybe_dot(args, model: Imdp | Pa) -> None:
    if getattr(args, "dot", None):
        Path(args.dot).write_text(to_dot(model), encoding="utf-8")


def _expect(model: Imdp | Pa, kind: type, what: str) -> None:
    if not isinstance(model, kind):
        raise ModelError(f"{what} expects a {kind.kind} model, got {model.kind}")


def _partition_doc(p: Partition, model: Imdp | Pa) -> list[list[str]]:
    return [sorted(model.state_names[s] for s in block) for block in p.blocks]


def _witness_doc(result: BisimResult) -> dict:
    witness = result.witness
    union = result.union
    doc: dict = {
        "reason": witness.reason,
        "state": union.state_names[witness.state],
        "other": union.state_names[witness.other],
    }
    if witness.reason == "labels":
        doc["labels"] = sorted(union.labels[witness.state])
        doc["other_labels"] = sorted(union.labels[witness.other])
        return doc
    doc["class_distribution"] = {
        str(block): _fmt(mass) for block, mass in witness.distribution.items()
    }
    if witness.hyperplane is not None:
        plane = witness.hyperplane
        doc["separating_hyperplane"] = {
            "normal": {
                str(d): _fmt(c) for d, c in zip(plane.dims, plane.normal) if c
            },
            "offset": _fmt(plane.offset),
        }
    return doc


def _cmd_validate(args) -> int:
    try:
        model = _load(args.model)
    except FormatError:
        raise
    except ModelError as exc:
        _emit({"valid": False, "violations": [str(exc)]})
        return 1
    violations = validate(model)
    _emit({"valid": not violations, "violations": violations})
    return 0 if not violations else 1


def _cmd_unfold(args) -> int:
    model = _load(args.model)
    _expect(model, Imdp, "unfold")
    result = unfold(model)
    _maybe_dot(args, result)
    _emit_model(result)
    return 0


def _cmd_fold(args) -> int:
    model = _load(args.model)
    _expect(model, Pa, "fold")
    result = fold(model)
    _maybe_dot(args, result)
    _emit_model(result)
    return 0


def _cmd_product(args) -> int:
    m1 = _load(args.left)
    m2 = _load(args.right)
    if type(m1) is not type(m2):
        raise ModelError("product needs two models of the same kind")
    if args.interleave:
        _expect(m1, Imdp, "product --interleave")
        result: Imdp | Pa = imdp_interleaved_product(m1, m2)
    elif isinstance(m1, Imdp):
        result = imdp_sync_product(m1, m2)
    else:
        result = pa_sync_product(m1, m2)
    _maybe_dot(args, result)
    _emit_model(result)
    return 0


def _cmd_bisim(args) -> int:
    m1 = _load(args.left)
    m2 = _load(args.right)
    if type(m1) is not type(m2):
        raise ModelError("bisim needs two models of the same kind")
    result = compare(m1, m2)
    doc = {
        "bisimilar": result.bisimilar,
        "partition": _partition_doc(result.partition, result.union),
    }
    if result.witness is not None:
        doc["witness"] = _witness_doc(result)
    _emit(doc)
    return 0 if result.bisimilar else 1


def _cmd_minimize(args) -> int:
    model = _load(args.model)
    quotiented, partition = minimize(model)
    _maybe_dot(args, quotiented)
    _emit(
        {
            "model": model_to_doc(quotiented),
            "partition": _partition_doc(partition, model),
        }
    )
    return 0


def _cmd_incompleteness(args) -> int:
    model = _load(args.model)
    _expect(model, Pa, "incompleteness")
    found = spurious_witness(model)
    if found is None:
        _emit({"witness": None})
        return 1
    state, dist = found
    _emit(
        {
            "state": model.state_names[state],
            "witness": {
                model.state_names[t]: _fmt(mass) for t, mass in dist.items()
            },
        }
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imdp",
        description=(
            "Interval MDP and probabilistic automaton toolkit: validation, "
            "unfolding/folding, products, bisimulation and minimization "
            "with exact rational arithmetic."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check model invariants")
    p.add_argument("model")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("unfold", help="interval MDP to PA (extreme points)")
    p.add_argument("model")
    p.add_argument("--dot", metavar="PATH", help="also write a Graphviz file")
    p.set_defaults(handler=_cmd_unfold)

    p = sub.add_parser("fold", help="PA to interval MDP (hull projections)")
    p.add_argument("model")
    p.add_argument("--dot", metavar="PATH", help="also write a Graphviz file")
    p.set_defaults(handler=_cmd_fold)

    p = sub.add_parser("product", help="parallel composition of two models")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--sync", action="store_true", help="synchronous product")
    mode.add_argument(
        "--interleave", action="store_true", help="interleaved composition (IMDPs)"
    )
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--dot", metavar="PATH", help="also write a Graphviz file")
    p.set_defaults(handler=_cmd_product)

    p = sub.add_parser("bisim", help="decide probabilistic bisimilarity")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=_cmd_bisim)

    p = sub.add_parser("minimize", help="quotient by the coarsest bisimulation")
    p.add_argument("model")
    p.add_argument("--dot", metavar="PATH", help="also write a Graphviz file")
    p.set_defaults(handler=_cmd_minimize)

    p = sub.add_parser(
        "incompleteness",
        help="search for a distribution the fold adds beyond the original hull",
    )
    p.add_argument("model")
    p.set_defaults(handler=_cmd_incompleteness)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
