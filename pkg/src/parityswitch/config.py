"""Run configurations: schemas, unit-aware coercion and deterministic serialization.

A configuration is a nested mapping. Each subcommand has a schema whose
leaves are ``Field`` records; a leaf name ending in a unit suffix
(``_ghz``, ``_mhz``, ``_khz``, ``_ns``, ``_us``, ``_mk``) takes either a bare
number in that unit or a string such as ``"4800 MHz"``. Angular units
(rad/s) are rejected explicitly.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence

import yaml

from .errors import ValidationError, UnitError

RESERVED = ("subcommand", "seed")


@dataclass(frozen=True)
class Field:
    default: Any
    kind: type = float
    optional: bool = False
    choices: Optional[Sequence[Any]] = None
    length: Optional[int] = None  # for list fields


def _circuit(levels: int = 5):
    return {
        "omega_q2_ghz": Field(4.8),
        "alpha_q2_mhz": Field(-270.0),
        "ratio_q2": Field(None, float, optional=True),
        "omega_c_max_ghz": Field(8.0),
        "alpha_c_mhz": Field(-110.0),
        "beta": {"q1c": Field(0.015), "q2c": Field(0.015), "q1q2": Field(0.001)},
        "levels": Field(levels, int),
        "n_g": {"q1": Field(0.0), "c": Field(0.0), "q2": Field(0.0)},
    }


def _design():
    return {
        "t1_ref_us": Field(500.0),
        "tphi_ref_us": Field(500.0),
        "ref_ej_ghz": Field(12.0),
        "ref_ec_ghz": Field(0.2),
        "temperature_mk": Field(50.0),
        "model": Field("basic", str, choices=("basic", "advanced")),
        "leakage_gamma": Field(5.5, str),
        "junction_asymmetry_d": Field(0.9),
        "t_sqg_ns": Field(16.0),
        "t_tqg_ns": Field(50.0),
        "grid": {
            "ej_min_ghz": Field(4.0), "ej_max_ghz": Field(40.0),
            "ec_min_ghz": Field(0.1), "ec_max_ghz": Field(0.5), "n": Field(60, int),
        },
        "percentile": Field(0.1),
    }


_PULSE = {
    "amplitude_ghz": Field(1.1807259),
    "tau_c_ns": Field(58.7247),
    "sigma_ns": Field(5.0),
}

SCHEMAS: Dict[str, Dict[str, Any]] = {
    "spectrum": {
        "e_j_ghz": Field(13.5),
        "e_c_ghz": Field(0.27),
        "n_g": Field(0.0),
        "n_levels": Field(4, int),
        "charge_cutoff": Field(30, int),
    },
    "zz": {
        "circuit": _circuit(),
        "sweep": {"omega_c_min_ghz": Field(5.4), "omega_c_max_ghz": Field(8.0), "n": Field(53, int)},
    },
    "idle": {
        "circuit": _circuit(),
        "window": {"min_ghz": Field(None, float, optional=True),
                   "max_ghz": Field(None, float, optional=True)},
        "scan_step_mhz": Field(5.0),
    },
    "parity-zz": {
        "circuit": _circuit(),
        "omega_c_ghz": Field(None, float, optional=True),
        "dispersion_mode": Field("asymptotic", str, choices=("asymptotic", "exact")),
        "exact_rediagonalization": Field(True, bool),
    },
    "effective": {
        "circuit": _circuit(),
        "omega_c_ghz": Field(None, float, optional=True),
        "t_g_ns": Field(None, float, optional=True),
        "threshold": Field(0.1),
    },
    "gate-simulate": {
        "circuit": _circuit(4),
        "pulse": copy.deepcopy(_PULSE),
        "omega_idle_ghz": Field(None, float, optional=True),
        "dt_ns": Field(0.1),
        "target_phase": Field(math.pi),
        "dispersion_mode": Field("asymptotic", str, choices=("asymptotic", "exact")),
        "trajectory": {
            "enabled": Field(False, bool),
            "samples": Field(401, int),
            "initial_state": Field("11", str, choices=("00", "01", "10", "11")),
            "parity_state": Field(None, int, optional=True, length=3),
        },
    },
    "gate-calibrate": {
        "circuit": _circuit(4),
        "sigma_ns": Field(5.0),
        "omega_idle_ghz": Field(None, float, optional=True),
        "target_phase": Field(math.pi),
        "amplitude_bounds_ghz": Field([0.5, 1.6], float, length=2),
        "tau_c_bounds_ns": Field([10.0, 120.0], float, length=2),
        "grid_shape": Field([5, 5], int, length=2),
        "dt_ns": Field(0.1),
        "maxiter": Field(200, int),
        "parity_refine": Field(True, bool),
        "success_threshold": Field(1e-3),
    },
    "channel": {
        "delta_phi": Field(0.02),
        "delta_p11": Field(0.0),
        "phi0": Field(math.pi),
        "p_plus": Field(0.5),
        "n": Field(100, int),
    },
    "landscape": _design(),
    "optimize-step": dict(
        _design(),
        current={"e_j_ghz": Field(6.0), "e_c_ghz": Field(0.3)},
        measured={"t1_us": Field(None, float, optional=True),
                  "tphi_us": Field(None, float, optional=True),
                  "temperature_mk": Field(None, float, optional=True)},
    ),
}

# --------------------------------------------------------------------------
# units

_FREQ = {"ghz": 1.0, "mhz": 1e-3, "khz": 1e-6, "hz": 1e-9}
_TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9}
_TEMP = {"k": 1.0, "mk": 1e-3}
_ANGULAR = re.compile(r"rad|2\s*pi|2π", re.IGNORECASE)
_SUFFIX = {"_ghz": ("freq", 1.0), "_mhz": ("freq", 1e-3), "_khz": ("freq", 1e-6),
           "_ns": ("time", 1e-9), "_us": ("time", 1e-6), "_mk": ("temp", 1e-3)}
# bare numbers beyond these magnitudes are taken as a unit slip (e.g. rad/s)
_PLAUSIBLE = {"_ghz": 1e3, "_mhz": 1e6, "_khz": 1e9, "_ns": 1e9, "_us": 1e9, "_mk": 1e6}


def _unit_of(name: str):
    for suf, spec in _SUFFIX.items():
        if name.endswith(suf):
            return suf, spec
    return None, None


def _parse_quantity(path: str, value: str, dim: str, scale: float) -> float:
    if _ANGULAR.search(value):
        raise UnitError(f"{path}: angular units are not accepted ({value!r}); "
                        f"give a frequency in {path.rsplit('_', 1)[-1]}")
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*([A-Za-zµ]+)\s*", value)
    if not m:
        raise ValidationError(f"{path}: cannot parse quantity {value!r}")
    num, unit = float(m.group(1)), m.group(2).lower()
    table = {"freq": _FREQ, "time": _TIME, "temp": _TEMP}[dim]
    if unit not in table:
        raise UnitError(f"{path}: unit {m.group(2)!r} is not a {dim} unit")
    return num * table[unit] / scale


def _coerce_scalar(path: str, name: str, f: Field, value: Any):
    if value is None:
        if f.optional:
            return None
        raise ValidationError(f"{path}: value required")
    kind = f.kind
    if kind is bool:
        if isinstance(value, bool):
            return value
        raise ValidationError(f"{path}: expected true/false, got {value!r}")
    if kind is str:
        if f.choices is None and name == "leakage_gamma":
            if value == "table":
                return "table"
            try:
                return float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"{path}: expected a number or 'table', got {value!r}")
        if not isinstance(value, str):
            raise ValidationError(f"{path}: expected a string, got {value!r}")
        if f.choices is not None and value not in f.choices:
            raise ValidationError(f"{path}: {value!r} not in {list(f.choices)}")
        return value
    suf, spec = _unit_of(name)
    if isinstance(value, bool):
        raise ValidationError(f"{path}: expected a number, got {value!r}")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            if spec is None:
                raise ValidationError(f"{path}: expected a number, got {value!r}")
            value = _parse_quantity(path, value, *spec)
    elif not isinstance(value, (int, float)):
        raise ValidationError(f"{path}: expected a number, got {value!r}")
    if suf is not None and abs(value) > _PLAUSIBLE[suf]:
        raise UnitError(f"{path}: {value!r} is implausible in {suf[1:]}; "
                        "was an angular frequency or SI value given?")
    if kind is int:
        if float(value) != int(value):
            raise ValidationError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{path}: value must be finite")
    return value


def _coerce(path: str, name: str, f: Field, value: Any):
    if f.length is not None and value is not None:
        if not isinstance(value, (list, tuple)) or len(value) != f.length:
            raise ValidationError(f"{path}: expected a list of {f.length} values")
        return [_coerce_scalar(f"{path}[{i}]", name, Field(None, f.kind), v)
                for i, v in enumerate(value)]
    return _coerce_scalar(path, name, f, value)


def resolve(schema: Mapping[str, Any], given: Optional[Mapping[str, Any]], prefix: str = "") -> dict:
    """Merge ``given`` into the schema defaults; unknown keys raise with their path."""
    given = {} if given is None else given
    if not isinstance(given, Mapping):
        raise ValidationError(f"{prefix or '<root>'}: expected a mapping")
    unknown = sorted(set(given) - set(schema))
    if unknown:
        where = ", ".join(f"{prefix}{k}" for k in unknown)
        raise ValidationError(f"unknown configuration key(s): {where}")
    out = {}
    for key, spec in schema.items():
        path = f"{prefix}{key}"
        if isinstance(spec, dict):
            out[key] = resolve(spec, given.get(key), path + ".")
        else:
            val = given.get(key, copy.deepcopy(spec.default))
            out[key] = _coerce(path, key, spec, val)
    return out


def load_file(path: str) -> dict:
    """Read a YAML (or JSON) configuration; a run manifest yields its ``config`` block."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValidationError(f"{path}: not valid YAML ({exc})")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top level must be a mapping")
    if "manifest_version" in data and "config" in data:
        cfg = dict(data["config"])
        cfg.setdefault("subcommand", data.get("subcommand"))
        return cfg
    return data


def set_path(cfg: dict, dotted: str, value: Any) -> None:
    """Assign ``value`` at a dotted key path, creating mappings on the way."""
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ValidationError(f"{dotted}: {k} is not a mapping")
    node[keys[-1]] = value


def split_reserved(cfg: Mapping[str, Any]):
    params = {k: v for k, v in cfg.items() if k not in RESERVED}
    meta = {k: cfg[k] for k in RESERVED if k in cfg}
    return params, meta


# --------------------------------------------------------------------------
# deterministic serialization

def fmt_float(x: float) -> str:
    """17 significant digits (round-trip safe); nan/inf spelled out."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def _json_scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "null"
        return fmt_float(x)
    if isinstance(x, str):
        import json

        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and stable key order."""
    try:
        import numpy as np

        if isinstance(obj, np.generic):
            obj = obj.item()
        elif isinstance(obj, np.ndarray):
            obj = obj.tolist()
    except ImportError:  # pragma: no cover
        pass
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_scalar(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (Mapping, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _json_scalar(obj)
