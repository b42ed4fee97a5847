"""JSON run configurations and the built-in figure fixtures.

A run configuration mirrors :class:`~nls_scatter.sweep.SweepSpec`::

    {
      "potential":    {"kind": "gaussian", "V0": -3.0},
      "nonlinearity": {"kind": "saturating", "gamma": 1.0},
      "geometry":     {"kind": "symmetric", "L": 5.0},
      "integrator":   {"mode": "adaptive", "abs_tol": 1e-13, "rel_tol": 1e-13},
      "grid":         {"e_min": 0.1, "e_max": 10.0, "n_points": 200, "spacing": "linear"}
    }

Unknown keys are rejected. ``CONFIG_SCHEMA`` is the published JSON Schema.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, replace
from typing import Optional

import jsonschema

from .models import (ConfinementGeometry, Gaussian, NonlinearitySpec, PiecewiseGaussian,
                     Rectangular, ShiftedGaussian, Tabulated)
from .ode import DEFAULT_MAX_STEPS, DEFAULT_STEP, DEFAULT_TOL, IntegratorConfig, Mode
from .scattering import K_MIN, RIGHT_MIRROR, RIGHT_SHARED_BASIS, ScatterConfig
from .sweep import SweepSpec

TOL_ENV = "NLS_SEED_TOL"


class ConfigError(ValueError):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}


def _kind(name, props, required=()):
    return {
        "if": {"properties": {"kind": {"const": name}}, "required": ["kind"]},
        "then": {
            "properties": {"kind": {"const": name}, **props},
            "required": ["kind", *required],
            "additionalProperties": False,
        },
    }


CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "nls-scatter run configuration",
    "type": "object",
    "required": ["potential", "nonlinearity", "geometry"],
    "additionalProperties": False,
    "properties": {
        "potential": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["gaussian", "shifted_gaussian", "piecewise_gaussian",
                                             "rectangular", "tabulated"]}},
            "allOf": [
                _kind("gaussian", {"V0": _num, "width": _pos, "center": _num}, ["V0"]),
                _kind("shifted_gaussian", {"V0": _num, "mu": _num, "L": _pos, "width": _pos},
                      ["V0", "mu"]),
                _kind("piecewise_gaussian",
                      {"V0": _num, "width_left": _pos, "width_right": _pos,
                       "alpha_left": _pos, "alpha_right": _pos, "center": _num}, ["V0"]),
                _kind("rectangular", {"V0": _num, "a": _num, "b": _num}, ["V0", "a", "b"]),
                _kind("tabulated", {"x": {"type": "array", "items": _num, "minItems": 2},
                                    "V": {"type": "array", "items": _num, "minItems": 2}},
                      ["x", "V"]),
            ],
        },
        "nonlinearity": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["none", "kerr", "saturating"]},
                "gamma": _num,
                "saturation_amplitude": _pos,
            },
        },
        "geometry": {
            "type": "object",
            "required": ["kind", "L"],
            "additionalProperties": False,
            "properties": {"kind": {"enum": ["symmetric", "half_interval"]}, "L": _pos},
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["adaptive", "fixed"]},
                "step": _pos,
                "abs_tol": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "rel_tol": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "max_steps": {"type": "integer", "minimum": 1},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "e_min": _pos,
                "e_max": _pos,
                "n_points": {"type": "integer", "minimum": 2},
                "spacing": {"enum": ["linear", "log"]},
            },
        },
        "verify_convergence": {"type": "boolean"},
        "annotate_theorems": {"type": "boolean"},
        "half_interval_right": {"enum": [RIGHT_MIRROR, RIGHT_SHARED_BASIS]},
        "workers": {"type": "integer", "minimum": 1},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"csv": {"type": "string"}, "plot_script": {"type": "string"}},
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(CONFIG_SCHEMA)


@dataclass(frozen=True)
class RunConfig:
    sweep: SweepSpec
    workers: int = 1
    csv_path: Optional[str] = None
    plot_script_path: Optional[str] = None


def _key(path):
    return ".".join(str(p) for p in path) or "<root>"


def validate(doc: dict) -> None:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (len(e.path), list(map(str, e.path))))
    # if/then failures are reported from inside the branch; drop the generic wrapper errors
    errors = [e for e in errors if e.validator not in ("if", "allOf")] or errors
    if errors:
        raise ConfigError("; ".join(f"{_key(e.absolute_path)}: {e.message}" for e in errors))


def _potential(doc, geometry_L):
    kind = doc["kind"]
    if kind == "gaussian":
        return Gaussian(doc["V0"], doc.get("width", 1.0), doc.get("center", 0.0))
    if kind == "shifted_gaussian":
        return ShiftedGaussian(doc["V0"], doc["mu"], doc.get("L", geometry_L), doc.get("width", 1.0))
    if kind == "piecewise_gaussian":
        widths = []
        for side in ("left", "right"):
            w, alpha = doc.get(f"width_{side}"), doc.get(f"alpha_{side}")
            if w is not None and alpha is not None:
                raise ConfigError(f"potential: give width_{side} or alpha_{side}, not both")
            widths.append(w if w is not None else 1.0 / math.sqrt(alpha) if alpha is not None else 1.0)
        return PiecewiseGaussian(doc["V0"], widths[0], widths[1], doc.get("center", 0.0))
    if kind == "rectangular":
        return Rectangular(doc["V0"], doc["a"], doc["b"])
    return Tabulated(tuple(doc["x"]), tuple(doc["V"]))


def seed_tolerance() -> Optional[float]:
    """Tolerance override from ``NLS_SEED_TOL`` (verification experiments only)."""
    raw = os.environ.get(TOL_ENV)
    if not raw:
        return None
    try:
        tol = float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not 0 < tol < 1:
        raise ConfigError(f"{TOL_ENV} must lie in (0, 1), got {tol}")
    return tol


def _integrator(doc):
    cfg = IntegratorConfig(
        mode=Mode(doc.get("mode", "adaptive")),
        step=doc.get("step", DEFAULT_STEP),
        abs_tol=doc.get("abs_tol", DEFAULT_TOL),
        rel_tol=doc.get("rel_tol", DEFAULT_TOL),
        max_steps=doc.get("max_steps", DEFAULT_MAX_STEPS),
    )
    return apply_seed_tolerance(cfg)


def apply_seed_tolerance(cfg: IntegratorConfig) -> IntegratorConfig:
    tol = seed_tolerance()
    if tol is None or cfg.mode is not Mode.ADAPTIVE:
        return cfg
    return replace(cfg, abs_tol=tol, rel_tol=tol)


def parse_config(doc: dict, *, force_linear: bool = False) -> RunConfig:
    """Validate and convert a configuration document; raises :class:`ConfigError`."""
    validate(doc)
    geometry = ConfinementGeometry(doc["geometry"]["kind"], doc["geometry"]["L"])
    nl = doc["nonlinearity"]
    gamma = 0.0 if force_linear else nl.get("gamma", 0.0)
    grid = doc.get("grid", {})
    try:
        scatter = ScatterConfig(
            potential=_potential(doc["potential"], geometry.L),
            nonlinearity=NonlinearitySpec(nl["kind"], gamma, nl.get("saturation_amplitude", 1.0)),
            geometry=geometry,
            integrator=_integrator(doc.get("integrator", {})),
            half_interval_right=doc.get("half_interval_right", RIGHT_MIRROR),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid model: {exc}") from None

    e_min, e_max = grid.get("e_min", 0.1), grid.get("e_max", 10.0)
    if e_min < K_MIN ** 2:
        raise ConfigError(f"grid.e_min: {e_min} is below k_min^2 = {K_MIN ** 2}")
    if e_max <= e_min:
        raise ConfigError(f"grid.e_max: {e_max} must exceed grid.e_min = {e_min}")
    try:
        spec = SweepSpec(
            config=scatter,
            e_min=e_min,
            e_max=e_max,
            n_points=grid.get("n_points", 200),
            grid=grid.get("spacing", "linear"),
            verify_convergence=doc.get("verify_convergence", False),
            annotate_theorems=doc.get("annotate_theorems", True),
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None
    out = doc.get("output", {})
    return RunConfig(spec, doc.get("workers", 1), out.get("csv"), out.get("plot_script"))


def load_config(path, **kw) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(doc, **kw)


# ---------------------------------------------------------------------------
# figure fixtures: all gamma = 1, L = 5, default grid 200 linear points on [0.1, 10]

_GRID = {"e_min": 0.1, "e_max": 10.0, "n_points": 200, "spacing": "linear"}

FIGURES = {
    1: {
        "potential": {"kind": "gaussian", "V0": -3},
        "nonlinearity": {"kind": "saturating", "gamma": 1},
        "geometry": {"kind": "symmetric", "L": 5},
    },
    2: {
        "potential": {"kind": "piecewise_gaussian", "V0": -3, "alpha_left": 1, "alpha_right": 1.5},
        "nonlinearity": {"kind": "saturating", "gamma": 1},
        "geometry": {"kind": "symmetric", "L": 5},
    },
    3: {
        "potential": {"kind": "piecewise_gaussian", "V0": -3, "alpha_left": 1, "alpha_right": 1.5},
        "nonlinearity": {"kind": "kerr", "gamma": 1},
        "geometry": {"kind": "symmetric", "L": 5},
    },
    4: {
        "potential": {"kind": "shifted_gaussian", "V0": 3, "mu": 0.5},
        "nonlinearity": {"kind": "kerr", "gamma": 1},
        "geometry": {"kind": "half_interval", "L": 5},
    },
    5: {
        "potential": {"kind": "shifted_gaussian", "V0": 3, "mu": 0.4},
        "nonlinearity": {"kind": "kerr", "gamma": 1},
        "geometry": {"kind": "half_interval", "L": 5},
    },
}


def figure_document(n: int) -> dict:
    if n not in FIGURES:
        raise ConfigError(f"figure must be one of 1-5, got {n}")
    doc = copy.deepcopy(FIGURES[n])
    doc["grid"] = dict(_GRID)
    return doc


def figure_config(n: int, **kw) -> RunConfig:
    return parse_config(figure_document(n), **kw)
