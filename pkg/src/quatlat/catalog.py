"""Preset orders shipped with the package, and the order document format.

An order document is a JSON object with fields ``a``, ``b`` (rationals as
``"p/q"`` strings) and ``basis`` (four rows of four rational strings, the
coordinates of the basis in ``1, i, j, k``).  Optional fields: ``name``,
``pi`` (one coordinate row) and ``lambdas`` (name -> coordinate row).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import QuatlatError
from .quat import Order, QuatElement, algebra_from_pair, order_from_basis


class OrderDocumentError(QuatlatError, ValueError):
    """An order document is malformed; the message names the field."""


@dataclass
class Preset:
    name: str
    order: Order
    pi: QuatElement | None = None
    lambdas: dict[str, QuatElement] = field(default_factory=dict)


def _rational(value, where: str) -> Fraction:
    if not isinstance(value, (str, int)):
        raise OrderDocumentError(f"{where}: expected a rational string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise OrderDocumentError(f"{where}: cannot parse {value!r} as a rational") from None


def _row(value, where: str) -> list[Fraction]:
    if not isinstance(value, list) or len(value) != 4:
        raise OrderDocumentError(f"{where}: expected 4 coordinates")
    return [_rational(x, f"{where}[{k}]") for k, x in enumerate(value)]


def preset_from_dict(doc: dict, name: str = "") -> Preset:
    if not isinstance(doc, dict):
        raise OrderDocumentError("document: expected an object")
    for key in ("a", "b", "basis"):
        if key not in doc:
            raise OrderDocumentError(f"{key}: missing field")
    name = doc.get("name", name)
    a = _rational(doc["a"], "a")
    b = _rational(doc["b"], "b")
    basis = doc["basis"]
    if not isinstance(basis, list) or len(basis) != 4:
        raise OrderDocumentError("basis: expected 4 rows")
    rows = [_row(r, f"basis[{k}]") for k, r in enumerate(basis)]
    try:
        alg = algebra_from_pair(a, b)
        order = order_from_basis(alg, [alg.elt(*r) for r in rows], name)
    except QuatlatError as exc:
        raise OrderDocumentError(f"basis: {exc}") from None
    pi = alg.elt(*_row(doc["pi"], "pi")) if "pi" in doc else None
    lams = {k: alg.elt(*_row(v, f"lambdas.{k}")) for k, v in doc.get("lambdas", {}).items()}
    return Preset(name, order, pi, lams)


def parse_order_document(text: str, name: str = "") -> Preset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OrderDocumentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return preset_from_dict(doc, name)


def _raw() -> dict:
    text = resources.files("quatlat").joinpath("data/catalog.json").read_text()
    return json.loads(text)


def preset_names() -> list[str]:
    return list(_raw())


_CACHE: dict[str, Preset] = {}


def load_preset(name: str) -> Preset:
    if name not in _CACHE:
        raw = _raw()
        if name not in raw:
            raise KeyError(f"unknown preset {name!r}; choose from {', '.join(raw)}")
        _CACHE[name] = preset_from_dict(raw[name], name)
    return _CACHE[name]
