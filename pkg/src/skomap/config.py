"""Experiment configs: JSON/YAML loading, schema validation, typed results."""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml
from jsonschema import Draft202012Validator

from .cusp import BoundarySpec
from .errors import ConfigError, SkomapError
from .suites import SUITES
from .thorn import ThornSpec
from .trend import Thresholds

logger = logging.getLogger(__name__)

SEED_RANGE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")

_SEEDS = {
    "oneOf": [
        {"type": "string", "pattern": r"^\s*\d+\s*(\.\.\s*\d+\s*)?(,\s*\d+\s*(\.\.\s*\d+\s*)?)*$"},
        {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
    ]
}
_RESOLUTIONS = {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 2}
_THRESHOLDS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "diverging": {"type": "number", "exclusiveMinimum": 1},
        "plateauing": {"type": "number", "exclusiveMinimum": 0},
        "span": {"enum": ["full", "adjacent"]},
    },
}
_BOUNDARY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["closing_cusp", "opening_cusp", "symmetric_cusp", "constant_gap"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "gap": {"type": "number", "exclusiveMinimum": 0},
        "center": {"type": "number"},
    },
}

CUSP_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["spec", "alphas", "resolutions", "seeds"],
    "properties": {
        "spec": _BOUNDARY,
        "alphas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "resolutions": _RESOLUTIONS,
        "seeds": _SEEDS,
        "x0": {"type": ["number", "null"]},
        "thresholds": _THRESHOLDS,
    },
}

THORN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["profiles", "resolutions", "seeds"],
    "properties": {
        "profiles": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["gamma"],
                "properties": {
                    "gamma": {"type": "number", "exclusiveMinimum": 0},
                    "epsilon": {"type": "number", "exclusiveMinimum": 0},
                    "base_width": {"type": "number", "minimum": 0},
                    "slope_cap": {"type": "number", "minimum": 0},
                    "lipschitz": {"type": "boolean"},
                },
            },
        },
        "T": {"type": "number", "exclusiveMinimum": 0},
        "resolutions": _RESOLUTIONS,
        "seeds": _SEEDS,
        "threshold": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"factor": {"type": "number", "exclusiveMinimum": 0}},
        },
        "experiments": {
            "type": "array",
            "items": {"enum": ["excursion", "horizon"]},
            "minItems": 1,
            "uniqueItems": True,
        },
        "thresholds": _THRESHOLDS,
    },
}

CONDITIONS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["spec"],
    "properties": {
        "spec": _BOUNDARY,
        "checks": {"type": "array", "items": {"enum": ["comb", "box"]}, "minItems": 1, "uniqueItems": True},
        "c1": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"comb": {"type": "number"}, "box": {"type": "number", "exclusiveMinimum": 1}},
        },
        "max_points": {"type": "integer", "minimum": 2},
        "min_step": {"type": "number", "exclusiveMinimum": 0},
        "tol": {"type": "number", "minimum": 0},
    },
}

VERIFY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["suite"],
    "properties": {
        "suite": {"enum": sorted(SUITES)},
        "seeds": _SEEDS,
        "tol": {"type": "number", "minimum": 0},
    },
}


def parse_seeds(text: str | list[int]) -> list[int]:
    """'0..999' (inclusive), '7', or comma lists of both; lists pass through."""
    if isinstance(text, list):
        return [int(s) for s in text]
    seeds: list[int] = []
    for part in str(text).split(","):
        m = SEED_RANGE.match(part)
        if not m:
            raise ValueError(f"bad seed range {part!r}; use N, N..M or a comma list")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) is not None else lo
        if hi < lo:
            raise ValueError(f"empty seed range {part.strip()!r}")
        seeds.extend(range(lo, hi + 1))
    return seeds


def load_document(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("/", f"cannot read {path}: {e.strerror}") from e
    try:
        if path.suffix in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError("/", f"cannot parse {path}: {e}") from e


def validate(doc: Any, schema: dict) -> None:
    """Raise ConfigError for the first schema violation (by document position)."""
    errors = sorted(Draft202012Validator(schema).iter_errors(doc),
                    key=lambda e: ([str(p) for p in e.absolute_path], e.message))
    if errors:
        e = errors[0]
        raise ConfigError("/" + "/".join(str(p) for p in e.absolute_path), e.message)


def _thresholds(doc: dict) -> Thresholds:
    raw = doc.get("thresholds", {})
    try:
        return Thresholds(**raw)
    except ValueError as e:
        raise ConfigError("/thresholds", str(e)) from e


def _resolutions(doc: dict) -> list[int]:
    res = doc["resolutions"]
    for i, r in enumerate(res):
        if r & (r - 1):
            raise ConfigError(f"/resolutions/{i}", f"{r} is not a power of two")
        if i and r <= res[i - 1]:
            raise ConfigError(f"/resolutions/{i}", "resolutions must be strictly increasing")
    return list(res)


def _boundary(raw: dict, pointer: str = "/spec") -> BoundarySpec:
    try:
        return BoundarySpec(**raw)
    except SkomapError as e:
        raise ConfigError(pointer, str(e)) from e


@dataclass
class CuspConfig:
    spec: BoundarySpec
    alphas: list[float]
    resolutions: list[int]
    seeds: list[int]
    thresholds: Thresholds = field(default_factory=Thresholds)
    x0: float | None = None


@dataclass
class ThornConfig:
    profiles: list[ThornSpec]
    resolutions: list[int]
    seeds: list[int]
    T: float = 1.0
    threshold_factor: float = 2.0
    experiments: list[str] = field(default_factory=lambda: ["excursion", "horizon"])
    thresholds: Thresholds = field(default_factory=Thresholds)


@dataclass
class ConditionsConfig:
    spec: BoundarySpec
    checks: list[str] = field(default_factory=lambda: ["comb", "box"])
    c1_comb: float = 1.0
    c1_box: float = 4.0
    max_points: int = 10**6
    min_step: float = 2.0**-40
    tol: float = 1e-9


@dataclass
class VerifyConfig:
    suite: str
    seeds: list[int] = field(default_factory=lambda: list(range(100)))
    tol: float | None = None


def cusp_config(doc: Any) -> CuspConfig:
    validate(doc, CUSP_SCHEMA)
    return CuspConfig(
        spec=_boundary(doc["spec"]),
        alphas=[float(a) for a in doc["alphas"]],
        resolutions=_resolutions(doc),
        seeds=parse_seeds(doc["seeds"]),
        thresholds=_thresholds(doc),
        x0=doc.get("x0"),
    )


def thorn_config(doc: Any) -> ThornConfig:
    validate(doc, THORN_SCHEMA)
    profiles = []
    for i, raw in enumerate(doc["profiles"]):
        try:
            profiles.append(ThornSpec(**raw))
        except SkomapError as e:
            raise ConfigError(f"/profiles/{i}", str(e)) from e
    return ThornConfig(
        profiles=profiles,
        resolutions=_resolutions(doc),
        seeds=parse_seeds(doc["seeds"]),
        T=float(doc.get("T", 1.0)),
        threshold_factor=float(doc.get("threshold", {}).get("factor", 2.0)),
        experiments=list(doc.get("experiments", ["excursion", "horizon"])),
        thresholds=_thresholds(doc),
    )


def conditions_config(doc: Any) -> ConditionsConfig:
    validate(doc, CONDITIONS_SCHEMA)
    c1 = doc.get("c1", {})
    return ConditionsConfig(
        spec=_boundary(doc["spec"]),
        checks=list(doc.get("checks", ["comb", "box"])),
        c1_comb=float(c1.get("comb", 1.0)),
        c1_box=float(c1.get("box", 4.0)),
        max_points=int(doc.get("max_points", 10**6)),
        min_step=float(doc.get("min_step", 2.0**-40)),
        tol=float(doc.get("tol", 1e-9)),
    )


def verify_config(doc: Any) -> VerifyConfig:
    validate(doc, VERIFY_SCHEMA)
    return VerifyConfig(
        suite=doc["suite"],
        seeds=parse_seeds(doc.get("seeds", "0..99")),
        tol=doc.get("tol"),
    )
