"""JSON algebra definition files.

Rationals are strings (``"p"`` or ``"p/q"``), indices are 0-based, and each
unordered bracket pair is listed once.  Parse errors name the offending field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedInputError
from .exact_core import format_rational, parse_rational
from .gda import FiniteGDA, parse_finite_gda, serialize_finite_gda
from .lie import LieAlgebraModel


@dataclass
class AlgebraFile:
    algebra: LieAlgebraModel
    finite_gda: FiniteGDA | None = None


def _rational(value, where: str):
    if not isinstance(value, str):
        raise MalformedInputError(f"{where}: rationals must be JSON strings, got {value!r}")
    try:
        return parse_rational(value)
    except MalformedInputError as exc:
        raise MalformedInputError(f"{where}: {exc}") from None


def _index(value, n: int, where: str) -> int:
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        value = int(value)
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < n:
        raise MalformedInputError(f"{where}: expected an index in 0..{n - 1}, got {value!r}")
    return value


def _require(doc: dict, key: str, kind, where: str = ""):
    if key not in doc:
        raise MalformedInputError(f"{where}missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise MalformedInputError(f"{where}{key}: expected {getattr(kind, '__name__', kind)}")
    return value


def parse_algebra(doc) -> AlgebraFile:
    if not isinstance(doc, dict):
        raise MalformedInputError("top level: expected a JSON object")
    name = _require(doc, "name", str)
    dim = _require(doc, "dim", int)
    if dim < 0:
        raise MalformedInputError("dim: must be non-negative")
    basis = doc.get("basis") or [f"e{i}" for i in range(dim)]
    if not isinstance(basis, list) or len(basis) != dim or not all(isinstance(b, str) for b in basis):
        raise MalformedInputError(f"basis: expected {dim} strings")
    rows = _require(doc, "bilinear_form", list)
    if len(rows) != dim:
        raise MalformedInputError(f"bilinear_form: expected {dim} rows")
    form = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise MalformedInputError(f"bilinear_form[{i}]: expected {dim} entries")
        form.append([_rational(v, f"bilinear_form[{i}][{j}]") for j, v in enumerate(row)])
    pairs: dict = {}
    for t, entry in enumerate(doc.get("brackets", [])):
        where = f"brackets[{t}]"
        if not isinstance(entry, dict):
            raise MalformedInputError(f"{where}: expected an object")
        a = _index(entry.get("a"), dim, f"{where}.a")
        b = _index(entry.get("b"), dim, f"{where}.b")
        if a == b:
            raise MalformedInputError(f"{where}: a and b must differ")
        if (a, b) in pairs or (b, a) in pairs:
            raise MalformedInputError(f"{where}: pair ({a}, {b}) listed twice")
        coeffs = entry.get("coeffs", {})
        if not isinstance(coeffs, dict):
            raise MalformedInputError(f"{where}.coeffs: expected an object")
        pairs[(a, b)] = {
            _index(k, dim, f"{where}.coeffs key {k!r}"): _rational(v, f"{where}.coeffs[{k!r}]") for k, v in coeffs.items()
        }
    L = LieAlgebraModel.from_pairs(name, basis, form, pairs)
    gda = None
    if doc.get("finite_gda") is not None:
        try:
            gda = parse_finite_gda(doc["finite_gda"], L)
        except MalformedInputError as exc:
            raise MalformedInputError(f"finite_gda: {exc}") from None
    return AlgebraFile(L, gda)


def loads(text: str) -> AlgebraFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_algebra(doc)


def load(path) -> AlgebraFile:
    return loads(Path(path).read_text())


def to_document(L: LieAlgebraModel, gda: FiniteGDA | None = None) -> dict:
    n = L.dim
    brackets = []
    for a in range(n):
        for b in range(a + 1, n):
            coeffs = {str(k): format_rational(v) for k, v in enumerate(L.c[a][b]) if v}
            if coeffs:
                brackets.append({"a": a, "b": b, "coeffs": coeffs})
    doc = {
        "name": L.name,
        "dim": n,
        "basis": list(L.basis_names),
        "bilinear_form": [[format_rational(x) for x in row] for row in L.B],
        "brackets": brackets,
    }
    if gda is not None:
        doc["finite_gda"] = serialize_finite_gda(gda)
    return doc


def dumps(L: LieAlgebraModel, gda: FiniteGDA | None = None) -> str:
    return json.dumps(to_document(L, gda), indent=2) + "\n"
