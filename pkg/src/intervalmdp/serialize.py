"""JSON interchange format and DOT export.

The format is sparse and exact: probabilities and interval bounds are
accepted as integers, "p/q" strings or decimal strings ("0.3" parses to
exactly 3/10; JSON decimal literals are converted without going through
binary floats).  Serialization is canonical: keys sorted, state and
transition lists sorted, rationals always rendered as "p/q" strings, so
serialize-parse-serialize is a byte-level fixpoint.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .model import Imdp, Interval, ModelError, Pa, to_rational


class FormatError(ModelError):
    """File-level problem: not JSON, or not shaped like a model document."""


def _fmt(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_model(data: bytes | str) -> Imdp | Pa:
    """Parse a model file; raises ModelError on malformed input."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(data, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("top-level JSON value must be an object")
    kind = doc.get("kind")
    if kind == "imdp":
        return _parse_imdp(doc)
    if kind == "pa":
        return _parse_pa(doc)
    raise FormatError(f"unknown kind {kind!r} (expected 'imdp' or 'pa')")


def _field(doc: dict, name: str, types) -> object:
    if name not in doc:
        raise FormatError(f"missing field {name!r}")
    value = doc[name]
    if not isinstance(value, types):
        raise FormatError(f"field {name!r} has the wrong type")
    return value


def _parse_labels(doc: dict, states: list[str]) -> dict[str, list[str]]:
    labels = _field(doc, "labels", dict)
    known = set(states)
    for state, props in labels.items():
        if state not in known:
            raise ModelError(f"labels reference unknown state {state!r}")
        if not isinstance(props, list):
            raise ModelError(f"labels of {state!r} must be a list")
    return labels


def _parse_imdp(doc: dict) -> Imdp:
    states = _field(doc, "states", list)
    actions = _field(doc, "actions", list)
    ap = _field(doc, "ap", list)
    initial = _field(doc, "initial", str)
    labels = _parse_labels(doc, states)
    intervals = {}
    for entry in _field(doc, "transitions", list):
        if not isinstance(entry, dict):
            raise ModelError("imdp transitions must be objects")
        try:
            key = (entry["from"], entry["action"], entry["to"])
            iv = Interval(to_rational(entry["lo"]), to_rational(entry["hi"]))
        except KeyError as exc:
            raise ModelError(f"transition missing field {exc}") from exc
        if key in intervals:
            raise ModelError(f"duplicate transition entry {key!r}")
        intervals[key] = iv
    return Imdp.build(
        states=states,
        initial=initial,
        actions=actions,
        atomic_props=ap,
        labels=labels,
        intervals=intervals,
    )


def _parse_pa(doc: dict) -> Pa:
    states = _field(doc, "states", list)
    ap = _field(doc, "ap", list)
    initial = _field(doc, "initial", str)
    labels = _parse_labels(doc, states)
    transitions = []
    for entry in _field(doc, "transitions", list):
        if not isinstance(entry, dict):
            raise ModelError("pa transitions must be objects")
        try:
            src = entry["from"]
            dist = entry["dist"]
        except KeyError as exc:
            raise ModelError(f"transition missing field {exc}") from exc
        if not isinstance(dist, dict):
            raise ModelError(f"distribution of {src!r} must be an object")
        transitions.append(
            (src, {t: to_rational(mass) for t, mass in dist.items()})
        )
    return Pa.build(
        states=states,
        initial=initial,
        atomic_props=ap,
        labels=labels,
        transitions=transitions,
    )


def model_to_doc(model: Imdp | Pa) -> dict:
    """Canonical plain-JSON document for a model."""
    order = sorted(range(model.n_states), key=lambda s: model.state_names[s])
    doc: dict = {
        "kind": model.kind,
        "states": [model.state_names[s] for s in order],
        "initial": model.state_names[model.initial],
        "ap": sorted(model.atomic_props),
        "labels": {
            model.state_names[s]: sorted(model.labels[s])
            for s in range(model.n_states)
        },
    }
    if isinstance(model, Imdp):
        doc["actions"] = sorted(model.actions)
        rows = [
            {
                "from": model.state_names[s],
                "action": a,
                "to": model.state_names[t],
                "lo": _fmt(iv.lo),
                "hi": _fmt(iv.hi),
            }
            for s, a, t, iv in model.transitions
        ]
        rows.sort(key=lambda r: (r["from"], r["action"], r["to"]))
        doc["transitions"] = rows
    else:
        entries = []
        for s, dist in model.transitions:
            named = sorted(
                (model.state_names[t], mass) for t, mass in dist.items()
            )
            entries.append((model.state_names[s], named))
        entries.sort()
        doc["transitions"] = [
            {
                "from": src,
                "dist": {name: _fmt(mass) for name, mass in named},
            }
            for src, named in entries
        ]
    return doc


def serialize_model(model: Imdp | Pa) -> bytes:
    text = json.dumps(model_to_doc(model), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(model: Imdp | Pa) -> str:
    """Graphviz text: junction dots fan each transition out to its targets."""
    lines = ["digraph model {", "  rankdir=LR;", "  node [shape=circle];"]
    for s, name in enumerate(model.state_names):
        props = ",".join(sorted(model.labels[s]))
        shape = ' peripheries=2' if s == model.initial else ""
        lines.append(f"  {_quote(name)} [label={_quote(name + chr(10) + '{' + props + '}')}{shape}];")
    if isinstance(model, Imdp):
        junctions = sorted({(s, a) for s, a, _, _ in model.transitions})
        for j, (s, a) in enumerate(junctions):
            jid = f"j{j}"
            lines.append(f"  {jid} [shape=point label=\"\"];")
            lines.append(f"  {_quote(model.state_names[s])} -> {jid} [label={_quote(a)}];")
            for t, iv in model.row(s, a).items():
                lines.append(
                    f"  {jid} -> {_quote(model.state_names[t])} "
                    f"[label={_quote(f'[{iv.lo},{iv.hi}]')}];"
                )
    else:
        ordered = sorted(
            model.transitions,
            key=lambda e: (model.state_names[e[0]], e[1].entries),
        )
        for j, (s, dist) in enumerate(ordered):
            jid = f"j{j}"
            lines.append(f"  {jid} [shape=point label=\"\"];")
            lines.append(f"  {_quote(model.state_names[s])} -> {jid};")
            for t, mass in dist.items():
                lines.append(
                    f"  {jid} -> {_quote(model.state_names[t])} [label={_quote(_fmt(mass))}];"
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
