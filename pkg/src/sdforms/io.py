"""JSON file formats for forms, curvature matrices and reports.

Form::

    {"dim": 8, "degree": 2, "terms": [{"i": [1, 2], "c": 1.0}, ...]}

Curvature::

    {"dim": 8, "N": 4, "entries": [{"a": 1, "b": 2, "form": {...}}, ...]}

Index lists are 1-based and strictly increasing; repeated index sets are
summed on load; fiber pairs need ``a < b`` and missing pairs are zero.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .curvature import CurvatureMatrix, fiber_pairs
from .errors import FormError
from .exterior import KForm


def form_to_json(form: KForm) -> dict:
    return {"dim": form.dim, "degree": form.degree,
            "terms": [{"i": list(I), "c": c} for I, c in form.terms().items()]}


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise FormError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise FormError(f"{where}: missing key {key!r}")
    return obj[key]


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormError(f"{where}: expected an integer, got {value!r}")
    return value


def form_from_json(obj: dict, where: str = "form") -> KForm:
    dim = _integer(_require(obj, "dim", where), f"{where}.dim")
    degree = _integer(obj.get("degree", 2), f"{where}.degree")
    terms = _require(obj, "terms", where)
    if not isinstance(terms, list):
        raise FormError(f"{where}.terms: expected a list")
    items = []
    for k, term in enumerate(terms):
        loc = f"{where}.terms[{k}]"
        idx = _require(term, "i", loc)
        c = _require(term, "c", loc)
        if not isinstance(idx, list):
            raise FormError(f"{loc}.i: expected a list of indices")
        idx = [_integer(i, f"{loc}.i") for i in idx]
        if isinstance(dim, int) and any(not 1 <= i <= dim for i in idx):
            raise FormError(f"{loc}.i: index {idx} out of range 1..{dim}")
        if any(x >= y for x, y in zip(idx, idx[1:])):
            raise FormError(f"{loc}.i: index {idx} is not strictly increasing")
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise FormError(f"{loc}.c: expected a finite number, got {c!r}")
        items.append((idx, float(c)))
    try:
        return KForm.from_terms(dim, degree, items)
    except FormError as exc:
        raise FormError(f"{where}: {exc}") from None


def curvature_to_json(F: CurvatureMatrix) -> dict:
    entries = []
    for (a, b), row in zip(fiber_pairs(F.N), F.coeffs):
        if np.any(row):
            entries.append({"a": a, "b": b, "form": form_to_json(KForm(F.dim, 2, row))})
    return {"dim": F.dim, "N": F.N, "entries": entries}


def curvature_from_json(obj: dict, where: str = "curvature") -> CurvatureMatrix:
    dim = _integer(_require(obj, "dim", where), f"{where}.dim")
    N = _integer(_require(obj, "N", where), f"{where}.N")
    raw = _require(obj, "entries", where)
    if not isinstance(raw, list):
        raise FormError(f"{where}.entries: expected a list")
    entries: dict[tuple[int, int], KForm] = {}
    for k, item in enumerate(raw):
        loc = f"{where}.entries[{k}]"
        a = _integer(_require(item, "a", loc), f"{loc}.a")
        b = _integer(_require(item, "b", loc), f"{loc}.b")
        if not 1 <= a < b <= N:
            raise FormError(f"{loc}: need 1 <= a < b <= N, got a={a}, b={b}, N={N}")
        form = form_from_json(_require(item, "form", loc), f"{loc}.form")
        if form.dim != dim or form.degree != 2:
            raise FormError(f"{loc}.form: expected a 2-form in dim {dim}")
        entries[(a, b)] = entries[(a, b)] + form if (a, b) in entries else form
    try:
        return CurvatureMatrix.from_entries(dim, N, entries)
    except FormError as exc:
        raise FormError(f"{where}: {exc}") from None


def read_json(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def load_form(path) -> KForm:
    return form_from_json(read_json(path), where=str(path))


def load_curvature(path) -> CurvatureMatrix:
    return curvature_from_json(read_json(path), where=str(path))


def to_jsonable(value: Any) -> Any:
    """Recursively convert reports to plain JSON types; NaN becomes null."""
    if isinstance(value, KForm):
        return form_to_json(value)
    if isinstance(value, CurvatureMatrix):
        return curvature_to_json(value)
    if isinstance(value, enum.Enum):
        return value.value
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(obj: Any) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))
