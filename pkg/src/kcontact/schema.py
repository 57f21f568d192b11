"""JSON (de)serialisation of orbifold models, schema version 1.

Rationals travel as ``"p/q"`` strings and big integers as decimal strings,
so nothing is lost to floating point.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .cyclic import LocalAction
from .enclosure import Interval
from .errors import ParseError, SchemaError
from .lattice import DivisorClass, FiniteAbelianGroup, SymmetricForm
from .seifert import IsotropySurface, OrbifoldModel, SeifertBundle, SingularPoint

SCHEMA_VERSION = 1
_SAFE_INT = 2**53


def rat_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_jsonable(obj):
    """Exact JSON form: Fractions as strings, integers beyond 2^53 as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < _SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, Interval):
        return {"lo": rat_str(obj.lo), "hi": rat_str(obj.hi), "approx": float(obj.mid)}
    if isinstance(obj, DivisorClass):
        return [rat_str(c) for c in obj.coords]
    if isinstance(obj, FiniteAbelianGroup):
        return group_to_dict(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def group_to_dict(g: FiniteAbelianGroup) -> dict:
    return {
        "free_rank": g.free_rank,
        "primary": [{"prime": p, "exponent": e, "multiplicity": c} for p, e, c in g.torsion],
        "invariant_factors": [to_jsonable(k) for k in g.invariant_factors()],
        "order_of_torsion": to_jsonable(g.torsion_order),
        "text": str(g),
    }


# ---------------------------------------------------------------------------
# parsing helpers


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field '{key}'", field=f"{where}.{key}" if where else key)
    return obj[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool):
        raise SchemaError("expected an integer", field=where)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            pass
    raise SchemaError(f"expected an integer, got {value!r}", field=where)


def _rat(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("expected a rational", field=where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise SchemaError(f"expected a rational 'p/q' string, got {value!r}", field=where)


def _vector(value, dim: int, where: str) -> DivisorClass:
    if not isinstance(value, list) or len(value) != dim:
        raise SchemaError(f"expected a list of {dim} rationals", field=where)
    return DivisorClass(tuple(_rat(v, f"{where}[{i}]") for i, v in enumerate(value)))


def model_from_dict(data: dict) -> tuple[OrbifoldModel, DivisorClass | None]:
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", field="$")
    version = _need(data, "schema", "")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {version!r}", field="schema")
    gram_raw = _need(data, "gram", "")
    if not isinstance(gram_raw, list) or any(not isinstance(r, list) for r in gram_raw):
        raise SchemaError("gram must be an array of arrays", field="gram")
    dim = len(gram_raw)
    rows = [[_rat(v, f"gram[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(gram_raw)]
    if any(len(r) != dim for r in rows):
        raise SchemaError("gram must be square", field="gram")
    if any(rows[i][j] != rows[j][i] for i in range(dim) for j in range(i)):
        raise SchemaError("gram must be symmetric", field="gram")
    form = SymmetricForm.from_rows(rows)
    basis = data.get("basis", [])
    if not isinstance(basis, list) or (basis and len(basis) != dim):
        raise SchemaError("basis must list one name per gram row", field="basis")
    flags = data.get("flags", {})
    if not isinstance(flags, dict):
        raise SchemaError("flags must be an object", field="flags")
    b1_zero = flags.get("b1_zero", False)
    w2_zero = flags.get("w2_zero")
    for key, val in (("b1_zero", b1_zero), ("w2_zero", w2_zero)):
        if val is not None and not isinstance(val, bool):
            raise SchemaError("expected a boolean", field=f"flags.{key}")
    canon = flags.get("canonical_class")
    canon = None if canon is None else _vector(canon, dim, "flags.canonical_class")
    surfaces = []
    for k, s in enumerate(data.get("surfaces", [])):
        where = f"surfaces[{k}]"
        surfaces.append(IsotropySurface(
            label=str(_need(s, "label", where)), genus=_int(_need(s, "genus", where), f"{where}.genus"),
            m=_int(_need(s, "m", where), f"{where}.m"), j=_int(_need(s, "j", where), f"{where}.j"),
            b=_int(_need(s, "b", where), f"{where}.b"),
            homology_class=_vector(_need(s, "class", where), dim, f"{where}.class")))
    points = []
    for k, p in enumerate(data.get("points", [])):
        where = f"points[{k}]"
        inc = p.get("incident", [])
        if not isinstance(inc, list):
            raise SchemaError("incident must be a list of surface labels", field=f"{where}.incident")
        try:
            action = LocalAction(_int(_need(p, "m", where), f"{where}.m"), _int(_need(p, "j1", where), f"{where}.j1"),
                                 _int(_need(p, "j2", where), f"{where}.j2"))
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(str(exc), field=where) from None
        points.append(SingularPoint(str(_need(p, "label", where)), action, tuple(str(x) for x in inc)))
    gens = tuple(_vector(g, dim, f"generators[{k}]") for k, g in enumerate(data.get("generators", [])))
    model = OrbifoldModel(b2=dim, intersection=form, b1_zero=b1_zero, surfaces=tuple(surfaces),
                          points=tuple(points), canonical_class=canon, w2_zero=w2_zero, generators=gens,
                          basis=tuple(str(b) for b in basis))
    bg = data.get("background_class")
    return model, (None if bg is None else _vector(bg, dim, "background_class"))


def model_to_dict(model: OrbifoldModel, background: DivisorClass | None = None) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "basis": list(model.basis),
        "gram": [[rat_str(x) for x in row] for row in model.intersection.gram],
        "surfaces": [{"label": s.label, "genus": s.genus, "m": str(s.m), "j": str(s.j), "b": str(s.b),
                      "class": [rat_str(c) for c in s.homology_class.coords]} for s in model.surfaces],
        "points": [{"label": p.label, "m": p.action.m, "j1": p.action.j1, "j2": p.action.j2,
                    "incident": list(p.incident_surfaces)} for p in model.points],
        "flags": {"b1_zero": model.b1_zero, "w2_zero": model.w2_zero,
                  "canonical_class": None if model.canonical_class is None
                  else [rat_str(c) for c in model.canonical_class.coords]},
        "generators": [[rat_str(c) for c in g.coords] for g in model.generators],
        "background_class": None if background is None else [rat_str(c) for c in background.coords],
    }


def read_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_orbifold(path) -> OrbifoldModel:
    return model_from_dict(read_json(path))[0]


def load_bundle(path) -> SeifertBundle:
    model, bg = model_from_dict(read_json(path))
    return SeifertBundle(model, bg)


def emit_orbifold(model: OrbifoldModel, path, background: DivisorClass | None = None) -> None:
    Path(path).write_text(dumps(model_to_dict(model, background)), encoding="utf-8")
