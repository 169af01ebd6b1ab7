"""JSON space configurations: schema validation with line-numbered errors.

A configuration is a single JSON object.  The space description sits at the
top level next to the run settings::

    {
      "schema": "flatfactor/space-v1",
      "kind": "l2product",
      "left": {"kind": "graph", "vertices": ["c", "a", "b", "d"],
               "edges": [["c", "a", 1], ["c", "b", 1], ["c", "d", 1]]},
      "right": {"kind": "euclidean", "dimension": 1},
      "seed": 7,
      "bounds": [-5, 5],
      "tolerances": {"isometry": 1e-12}
    }

Factor documents of products use the same layout minus the run settings.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields
from json.decoder import scanstring
from pathlib import Path
from typing import Optional

import jsonschema

from .spaces import MAX_PRODUCT_DEPTH, InvalidSpaceError, Space, build_space
from .tolerances import DEFAULT, Tolerances

__all__ = ["ConfigError", "SCHEMA_ID", "SpaceConfig", "config_schema", "load_config", "parse_config"]

SCHEMA_ID = "flatfactor/space-v1"

_RUN_KEYS = ("schema", "seed", "samples", "kappa", "bounds", "tolerances")
_KIND_KEYS = {
    "graph": ("vertices", "edges"),
    "euclidean": ("dimension", "bounds"),
    "l2product": ("left", "right"),
    "normedproduct": ("left", "right", "p"),
}


class ConfigError(ValueError):
    """Invalid configuration, located by line and column when possible."""

    def __init__(self, message: str, source: str = "<config>", line: Optional[int] = None, column: Optional[int] = None, path: tuple = ()):
        self.message, self.source, self.line, self.column, self.path = message, source, line, column, tuple(path)
        where = source if line is None else f"{source}:{line}:{column}"
        at = f" (at /{'/'.join(str(p) for p in path)})" if path else ""
        super().__init__(f"{where}: {message}{at}")


def _space_schema(root: bool) -> dict:
    point = {"$ref": "#/$defs/point"}
    blocks = []
    for kind, keys in _KIND_KEYS.items():
        allowed = ["kind", "basepoint", *keys] + (list(_RUN_KEYS) if root else [])
        then = {"propertyNames": {"enum": sorted(set(allowed))}, "required": [k for k in keys if k not in ("bounds",)]}
        blocks.append({"if": {"properties": {"kind": {"const": kind}}, "required": ["kind"]}, "then": then})
    return {
        "type": "object",
        "required": ["kind"],
        "properties": {
            "kind": {"enum": list(_KIND_KEYS)},
            "vertices": {
                "type": "array",
                "minItems": 1,
                "items": {"type": ["string", "integer"]},
            },
            "edges": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "prefixItems": [
                        {"type": ["string", "integer"]},
                        {"type": ["string", "integer"]},
                        {"type": "number", "exclusiveMinimum": 0},
                    ],
                    "minItems": 3,
                    "maxItems": 3,
                },
            },
            "dimension": {"type": "integer", "minimum": 1},
            "bounds": {"$ref": "#/$defs/bounds"},
            "left": {"$ref": "#/$defs/factor"},
            "right": {"$ref": "#/$defs/factor"},
            "p": {"type": "number", "exclusiveMinimum": 1},
            "basepoint": point,
        },
        "allOf": blocks,
    }


def config_schema() -> dict:
    """The JSON Schema (draft 2020-12) of a configuration document."""
    root = _space_schema(root=True)
    root["properties"].update(
        {
            "schema": {"const": SCHEMA_ID},
            "seed": {"type": "integer", "minimum": 0},
            "samples": {"type": "integer", "minimum": 1},
            "kappa": {"type": "number"},
            "tolerances": {
                "type": "object",
                "propertyNames": {"enum": [f.name for f in fields(Tolerances)]},
                "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
            },
        }
    )
    root["required"] = ["schema", "kind"]
    root["$schema"] = "https://json-schema.org/draft/2020-12/schema"
    root["$defs"] = {
        "factor": _space_schema(root=False),
        "bounds": {
            "type": "array",
            "prefixItems": [{"type": "number"}, {"type": "number"}],
            "minItems": 2,
            "maxItems": 2,
        },
        "point": {
            "anyOf": [
                {"type": "object", "required": ["vertex"], "properties": {"vertex": {"type": ["string", "integer"]}}},
                {"type": "object", "required": ["edge", "offset"], "properties": {"edge": {"type": "integer", "minimum": 0}, "offset": {"type": "number", "minimum": 0}}},
                {"type": "object", "required": ["left", "right"]},
                {"type": "array", "items": {"type": "number"}},
            ]
        },
    }
    return root


_VALIDATOR = jsonschema.Draft202012Validator(config_schema())


# --------------------------------------------------------------------------
# locating JSON values by path


def _skip(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def value_positions(text: str) -> dict:
    """Offsets of every value in a valid JSON document, keyed by path tuple."""
    decoder = json.JSONDecoder()
    out: dict = {}

    def walk(i, path):
        i = _skip(text, i)
        out[path] = i
        ch = text[i]
        if ch == "{":
            i = _skip(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = scanstring(text, _skip(text, i) + 1)
                i = _skip(text, i) + 1  # the colon
                i = _skip(text, walk(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1
        if ch == "[":
            i = _skip(text, i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = _skip(text, walk(i, path + (k,)))
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = decoder.raw_decode(text, i)
        return end

    walk(0, ())
    return out


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _locate(text: str, positions: dict, path: tuple) -> tuple[Optional[int], Optional[int]]:
    path = tuple(path)
    while path not in positions and path:
        path = path[:-1]
    if path not in positions:
        return None, None
    return _line_col(text, positions[path])


# --------------------------------------------------------------------------
# the configuration object


@dataclass
class SpaceConfig:
    """A parsed configuration: the space description plus run settings."""

    space: dict
    seed: Optional[int] = None
    samples: Optional[int] = None
    kappa: Optional[float] = None
    bounds: Optional[list] = None
    tolerances: dict = field(default_factory=dict)
    source: str = field(default="<config>", compare=False)

    def build(self, bounds=None) -> Space:
        """Build the space; ``bounds`` overrides every Euclidean sampling box."""
        desc = copy.deepcopy(self.space)
        _apply_bounds(desc, bounds, self.bounds)
        return build_space(desc)

    def tolerance_set(self, override: Optional[float] = None) -> Tolerances:
        tol = DEFAULT.updated(**self.tolerances)
        return tol.override(override) if override is not None else tol

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_ID, **copy.deepcopy(self.space)}
        for key in ("seed", "samples", "kappa", "bounds"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _apply_bounds(desc: dict, forced, default) -> None:
    if desc.get("kind") == "euclidean":
        if forced is not None:
            desc["bounds"] = list(forced)
        elif "bounds" not in desc and default is not None:
            desc["bounds"] = list(default)
    for side in ("left", "right"):
        if isinstance(desc.get(side), dict):
            _apply_bounds(desc[side], forced, default)


def _depth(desc, path=()) -> tuple[int, tuple]:
    best = (0, path)
    for side in ("left", "right"):
        sub = desc.get(side) if isinstance(desc, dict) else None
        if isinstance(sub, dict):
            d, p = _depth(sub, path + (side,))
            best = max(best, (d + 1, p), key=lambda t: t[0])
    return best


def parse_config(text: str, source: str = "<config>") -> SpaceConfig:
    """Parse and fully validate a configuration document.

    Every failure is a :class:`ConfigError` naming the line and column of the
    offending value.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", source, exc.lineno, exc.colno) from None
    positions = value_positions(text)
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", source, *_locate(text, positions, ()))
    depth, deepest = _depth(doc)
    if depth > MAX_PRODUCT_DEPTH:
        raise ConfigError(
            f"product nesting depth {depth} exceeds {MAX_PRODUCT_DEPTH}",
            source,
            *_locate(text, positions, deepest),
            path=deepest,
        )
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = _most_specific(errors)
        path = tuple(err.absolute_path)
        raise ConfigError(err.message, source, *_locate(text, positions, path), path=path)
    space_doc = {k: v for k, v in doc.items() if k not in _RUN_KEYS or (k == "bounds" and doc.get("kind") == "euclidean")}
    cfg = SpaceConfig(
        space=space_doc,
        seed=doc.get("seed"),
        samples=doc.get("samples"),
        kappa=doc.get("kappa"),
        bounds=None if doc.get("kind") == "euclidean" else doc.get("bounds"),
        tolerances=dict(doc.get("tolerances", {})),
        source=source,
    )
    try:
        cfg.build()
    except InvalidSpaceError as exc:
        raise ConfigError(str(exc), source, *_locate(text, positions, exc.field), path=exc.field) from None
    return cfg


def _most_specific(errors):
    """The error deepest in the document, descending into if/then branches."""
    def leaves(err):
        if err.context:
            for sub in err.context:
                yield from leaves(sub)
        else:
            yield err

    flat = [leaf for e in errors for leaf in leaves(e)]
    return max(flat, key=lambda e: len(e.absolute_path))


def load_config(path) -> SpaceConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror}", str(path)) from None
    return parse_config(text, str(path))
