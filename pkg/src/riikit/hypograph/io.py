"""JSON round-trip for fields and partitions; every number is written as an integer pair."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

from .field import Component, Domain1D, FieldError, PiecewiseScalarField
from .tree import HypographPartition


def ratio(x) -> list[int]:
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("cannot serialize a non-finite number")
    q = Fraction(x)
    return [q.numerator, q.denominator]


def from_ratio(pair) -> Fraction:
    if isinstance(pair, (int, float, str)):
        return Fraction(pair)
    num, den = pair
    if not isinstance(num, int) or not isinstance(den, int) or den == 0:
        raise FieldError(f"bad rational pair {pair!r}")
    return Fraction(num, den)


def field_to_dict(f: PiecewiseScalarField) -> dict:
    comps = []
    for comp, pts in zip(f.domain.components, f.breakpoints):
        comps.append({
            "kind": comp.kind,
            "length": ratio(comp.length),
            "breakpoints": [ratio(p) + ratio(v) for p, v in pts],
        })
    return {"components": comps, "xi": ratio(f.xi)}


def field_from_dict(doc: dict) -> PiecewiseScalarField:
    try:
        comps, rows = [], []
        for c in doc["components"]:
            comps.append(Component(c["kind"], from_ratio(c["length"])))
            row = []
            for bp in c["breakpoints"]:
                if len(bp) != 4:
                    raise FieldError("breakpoints are [pos_num, pos_den, val_num, val_den]")
                row.append((from_ratio(bp[:2]), from_ratio(bp[2:])))
            rows.append(tuple(row))
        return PiecewiseScalarField(Domain1D(tuple(comps)), tuple(rows), from_ratio(doc["xi"]))
    except (KeyError, TypeError) as exc:
        raise FieldError(f"malformed field document: {exc}") from exc


def load_field(path: str | Path) -> PiecewiseScalarField:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FieldError(f"invalid JSON in {path}: {exc}") from exc
    return field_from_dict(doc)


def dump_field(f: PiecewiseScalarField, path: str | Path) -> None:
    Path(path).write_text(json.dumps(field_to_dict(f), indent=1) + "\n")


def _interval(iv) -> dict:
    return {"lo": ratio(iv.lo), "hi": ratio(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}


def _arc(a) -> dict:
    return {"start": ratio(a.start), "end": ratio(a.end), "full": a.full}


def partition_to_dict(p: HypographPartition) -> dict:
    classes = []
    for c in p.classes:
        classes.append({
            "id": c.id,
            "component": c.component,
            "parent": c.parent,
            "levels": _interval(c.levels),
            "anchor": ratio(c.anchor),
            "slabs": [{"levels": _interval(s.levels), "top_arc": _arc(s.top_arc)} for s in c.slabs],
            "thin": [_interval(iv) for iv in (p.thin_intervals or {}).get(c.id, ())],
        })
    return {
        "field": field_to_dict(p.field),
        "classes": classes,
        "forest": {str(c.id): c.parent for c in p.classes},
        "thin_necks": [{"class": n.class_id, "levels": _interval(n.levels), "exceptional": n.exceptional}
                       for n in p.thin_necks],
    }
