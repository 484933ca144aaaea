"""Operator configuration files (JSON).

A file holds exactly one of four shapes::

    {"coeffs": {"0": [...], "2": [...]}}
    {"classical": {"alphas": [...], "gammas": [...]}}
    {"sandwich": {"p_roots": [...], "p_leading": 1.0, "m": 1, "n": 2}}
    {"pencil": {"a": [[...]], "b": [[...]], "c": [[...]]}}

Coefficient arrays are ascending. Any deviation raises ``ConfigError``
naming the offending key path.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .hpop import (
    DifferentialOperator,
    OperatorError,
    classical_operator,
    pencil_operator,
    sandwich_operator,
)
from .realpoly import RealPolynomial, from_roots

_NUMBER = {"type": "number"}
_VECTOR = {"type": "array", "items": _NUMBER}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _NUMBER}}

SCHEMA = {
    "type": "object",
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
    "properties": {
        "coeffs": {
            "type": "object",
            "minProperties": 1,
            "propertyNames": {"pattern": "^[0-9]+$"},
            "additionalProperties": _VECTOR,
        },
        "classical": {
            "type": "object",
            "required": ["alphas", "gammas"],
            "additionalProperties": False,
            "properties": {"alphas": {**_VECTOR, "minItems": 1}, "gammas": {**_VECTOR, "minItems": 1}},
        },
        "sandwich": {
            "type": "object",
            "required": ["p_roots", "m", "n"],
            "additionalProperties": False,
            "properties": {
                "p_roots": _VECTOR,
                "p_leading": _NUMBER,
                "m": {"type": "integer", "minimum": 0},
                "n": {"type": "integer", "minimum": 0},
            },
        },
        "pencil": {
            "type": "object",
            "required": ["a", "b", "c"],
            "additionalProperties": False,
            "properties": {"a": _MATRIX, "b": _MATRIX, "c": _MATRIX},
        },
    },
}


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def operator_from_dict(data) -> DifferentialOperator:
    """Validate ``data`` and build the operator it describes."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise ConfigError(err.message, _path(err.absolute_path))
    (shape, body), = data.items()
    try:
        if shape == "coeffs":
            return DifferentialOperator({int(k): RealPolynomial(v) for k, v in body.items()})
        if shape == "classical":
            return classical_operator(body["alphas"], body["gammas"])
        if shape == "sandwich":
            P = from_roots(body["p_roots"], body.get("p_leading", 1.0))
            return sandwich_operator(P, body["m"], body["n"])
        return pencil_operator(body["a"], body["b"], body["c"])
    except (OperatorError, ValueError) as exc:
        raise ConfigError(str(exc), f"$.{shape}") from exc


def load_operator(path: str | Path) -> DifferentialOperator:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return operator_from_dict(data)
