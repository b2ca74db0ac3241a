"""Scan configuration: JSON parsing, validation and the built-in presets.

Config layout (all keys optional unless noted)::

    {
      "name": "gauss-comb",
      "state_kind": "comb_pair" | "entangled_pair",       # required
      "omega_spacing": 1.0,                                # required, rad/s
      "line_shape": {"kind": "gaussian", "width": 0.05, "center": 0.0},   # required
      "envelope":   {"kind": "gaussian", "width": 20.0},                  # required
      "tooth_cutoff": 1e-6,
      "scan": "time" | "frequency" | "2d",                 # required
      "time":      {"range": [-0.2, 0.2], "points": 201},  # default +-T/2, 101 points
      "frequency": {"range": [-0.5, 0.5], "points": 101},  # default +-Omega/2, 101 points
      "grid": {"span_factor": 8.0, "step_factor": 8.0},
      "methods": ["exact", "approx"],                      # subset of exact/approx/oracle
      "output": "out",
      "verify": false,
      "oracle": {"count": 1024, "span_factor": 10.0}
    }
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .shapes import InvalidShapeError, ShapeKind, ShapeSpec
from .states import CombSpec, EntangledSpec

STATE_KINDS = ("comb_pair", "entangled_pair")
SCANS = ("time", "frequency", "2d")
METHODS = ("exact", "approx", "oracle")

_TOP_KEYS = {
    "name", "state_kind", "omega_spacing", "line_shape", "envelope", "tooth_cutoff", "scan",
    "time", "frequency", "grid", "methods", "output", "verify", "oracle",
}
_SHAPE_KEYS = {"kind", "width", "center"}
_AXIS_KEYS = {"range", "points"}
_GRID_KEYS = {"span_factor", "step_factor"}
_ORACLE_KEYS = {"count", "span_factor"}


class ConfigParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigValidationError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class AxisRange:
    lo: float
    hi: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ScanConfig:
    state_kind: str
    omega_spacing: float
    line_shape: ShapeSpec
    envelope: ShapeSpec
    scan: str
    time: AxisRange | None
    frequency: AxisRange | None
    methods: tuple[str, ...] = ("exact",)
    span_factor: float = 8.0
    step_factor: float = 8.0
    tooth_cutoff: float = 1e-6
    output: str = "out"
    verify: bool = False
    oracle_count: int = 1024
    oracle_span_factor: float = 10.0
    name: str = "custom"
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def state(self) -> CombSpec | EntangledSpec:
        if self.state_kind == "comb_pair":
            return CombSpec(self.omega_spacing, self.line_shape, self.envelope, self.tooth_cutoff)
        return EntangledSpec(self.line_shape, self.envelope, self.omega_spacing)

    @property
    def t_shifts(self):
        return self.time.values() if self.scan in ("time", "2d") else None

    @property
    def w_shifts(self):
        return self.frequency.values() if self.scan in ("frequency", "2d") else None


def _reject_unknown(obj: dict, allowed: set, where: str):
    extra = sorted(set(obj) - allowed)
    if extra:
        prefix = f"{where}." if where else ""
        raise ConfigValidationError(prefix + extra[0], "unknown key")


def _number(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(name, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigValidationError(name, "must be finite")
    if positive and value <= 0:
        raise ConfigValidationError(name, f"must be positive, got {value!r}")
    return value


def _shape(obj, name) -> ShapeSpec:
    if not isinstance(obj, dict):
        raise ConfigValidationError(name, "expected an object with kind/width/center")
    _reject_unknown(obj, _SHAPE_KEYS, name)
    kinds = [k.value for k in ShapeKind]
    if obj.get("kind") not in kinds:
        raise ConfigValidationError(f"{name}.kind", f"must be one of {kinds}")
    width = _number(obj.get("width"), f"{name}.width", positive=True)
    center = _number(obj.get("center", 0.0), f"{name}.center")
    try:
        return ShapeSpec(obj["kind"], width, center)
    except InvalidShapeError as exc:
        raise ConfigValidationError(f"{name}.width", str(exc)) from exc


def _axis(obj, name, default_half) -> AxisRange:
    if obj is None:
        return AxisRange(-default_half, default_half, 101)
    if not isinstance(obj, dict):
        raise ConfigValidationError(name, "expected an object with range/points")
    _reject_unknown(obj, _AXIS_KEYS, name)
    rng = obj.get("range", [-default_half, default_half])
    if not isinstance(rng, list) or len(rng) != 2:
        raise ConfigValidationError(f"{name}.range", "expected [lo, hi]")
    lo = _number(rng[0], f"{name}.range")
    hi = _number(rng[1], f"{name}.range")
    if not hi > lo:
        raise ConfigValidationError(f"{name}.range", "empty range (need lo < hi)")
    points = obj.get("points", 101)
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        raise ConfigValidationError(f"{name}.points", "must be an integer >= 2")
    return AxisRange(lo, hi, points)


def config_from_dict(obj: dict) -> ScanConfig:
    if not isinstance(obj, dict):
        raise ConfigValidationError("<root>", "expected a JSON object")
    _reject_unknown(obj, _TOP_KEYS, "")
    for key in ("state_kind", "omega_spacing", "line_shape", "envelope", "scan"):
        if key not in obj:
            raise ConfigValidationError(key, "missing required key")
    if obj["state_kind"] not in STATE_KINDS:
        raise ConfigValidationError("state_kind", f"must be one of {list(STATE_KINDS)}")
    if obj["scan"] not in SCANS:
        raise ConfigValidationError("scan", f"must be one of {list(SCANS)}")
    omega = _number(obj["omega_spacing"], "omega_spacing", positive=True)
    line = _shape(obj["line_shape"], "line_shape")
    env = _shape(obj["envelope"], "envelope")
    cutoff = _number(obj.get("tooth_cutoff", 1e-6), "tooth_cutoff", positive=True)
    if cutoff >= 1:
        raise ConfigValidationError("tooth_cutoff", "must be below 1")
    period = 2.0 * math.pi / omega
    t_axis = _axis(obj.get("time"), "time", period / 2.0)
    w_axis = _axis(obj.get("frequency"), "frequency", omega / 2.0)

    grid = obj.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigValidationError("grid", "expected an object")
    _reject_unknown(grid, _GRID_KEYS, "grid")
    span_factor = _number(grid.get("span_factor", 8.0), "grid.span_factor", positive=True)
    step_factor = _number(grid.get("step_factor", 8.0), "grid.step_factor", positive=True)

    methods = obj.get("methods", ["exact"])
    if not isinstance(methods, list) or not methods:
        raise ConfigValidationError("methods", "expected a non-empty list")
    for m in methods:
        if m not in METHODS:
            raise ConfigValidationError("methods", f"unknown method {m!r}")
    output = obj.get("output", "out")
    if not isinstance(output, str) or not output:
        raise ConfigValidationError("output", "expected a path string")
    verify = obj.get("verify", False)
    if not isinstance(verify, bool):
        raise ConfigValidationError("verify", "expected true or false")
    oracle = obj.get("oracle", {})
    if not isinstance(oracle, dict):
        raise ConfigValidationError("oracle", "expected an object")
    _reject_unknown(oracle, _ORACLE_KEYS, "oracle")
    count = oracle.get("count", 1024)
    if isinstance(count, bool) or not isinstance(count, int) or count < 16 or count & (count - 1) or count > 2048:
        raise ConfigValidationError("oracle.count", "must be a power of two in [16, 2048]")
    name = obj.get("name", "custom")
    if not isinstance(name, str) or not name:
        raise ConfigValidationError("name", "expected a non-empty string")

    return ScanConfig(
        state_kind=obj["state_kind"],
        omega_spacing=omega,
        line_shape=line,
        envelope=env,
        scan=obj["scan"],
        time=t_axis,
        frequency=w_axis,
        methods=tuple(dict.fromkeys(methods)),
        span_factor=span_factor,
        step_factor=step_factor,
        tooth_cutoff=cutoff,
        output=output,
        verify=verify,
        oracle_count=count,
        oracle_span_factor=_number(oracle.get("span_factor", 10.0), "oracle.span_factor", positive=True),
        name=name,
        raw=copy.deepcopy(obj),
    )


def parse_config(text: str, base: dict | None = None) -> ScanConfig:
    """Parse JSON ``text``; keys override those of ``base`` (e.g. a preset)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", exc.lineno, exc.colno
        ) from exc
    if base is not None and isinstance(obj, dict):
        obj = {**copy.deepcopy(base), **obj}
    return config_from_dict(obj)


_T = 2.0 * math.pi

PRESETS: dict[str, dict] = {
    # rectangular envelope and Gaussian lines: sinc pulses under a Gaussian envelope
    "fig1": {
        "name": "fig1",
        "state_kind": "comb_pair",
        "omega_spacing": 1.0,
        "line_shape": {"kind": "gaussian", "width": 0.05},
        "envelope": {"kind": "rectangle", "width": 20.0},
        "scan": "time",
        "time": {"range": [-math.pi, math.pi], "points": 201},
        "methods": ["exact", "approx"],
    },
    "gauss-comb": {
        "name": "gauss-comb",
        "state_kind": "comb_pair",
        "omega_spacing": 1.0,
        "line_shape": {"kind": "gaussian", "width": 0.05},
        "envelope": {"kind": "gaussian", "width": 20.0},
        "scan": "time",
        "time": {"range": [-0.2, 0.2], "points": 201},
        "methods": ["exact", "approx"],
    },
    "entangled": {
        "name": "entangled",
        "state_kind": "entangled_pair",
        "omega_spacing": 1.0,
        "line_shape": {"kind": "gaussian", "width": 0.05},
        "envelope": {"kind": "gaussian", "width": 20.0},
        "scan": "frequency",
        "frequency": {"range": [-0.5, 0.5], "points": 101},
        "methods": ["exact", "approx"],
    },
    "2d-comb": {
        "name": "2d-comb",
        "state_kind": "comb_pair",
        "omega_spacing": 1.0,
        "line_shape": {"kind": "gaussian", "width": 0.0625},
        "envelope": {"kind": "gaussian", "width": 10.0},
        "scan": "2d",
        "time": {"range": [-_T / 8.0, _T / 8.0], "points": 12},
        "frequency": {"range": [-0.125, 0.125], "points": 12},
        "methods": ["exact", "approx"],
        "oracle": {"count": 2048, "span_factor": 10.0},
    },
}


def preset_config(name: str) -> ScanConfig:
    if name not in PRESETS:
        raise ConfigValidationError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return config_from_dict(copy.deepcopy(PRESETS[name]))
