"""Run configuration: a flat ``key = value`` format with optional sections.

::

    # comment
    scenario = simulate

    [lattice]
    dims = 64, 4, 4
    spacing = 1.0

Keys before the first ``[section]`` header are top-level.  Values are
parsed as int, float, bool, comma-separated number lists, or left as text.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ParseError, ValidationError
from .lattice import LatticeSpec

SCENARIOS = ("simulate", "legendre-check", "bracket-audit", "dispersion")
GAUGES = ("temporal", "coulomb")
INITIAL_KINDS = ("plane_wave", "gaussian_pulse", "crossed_uniform", "random_transverse")

DEFAULT_CFL = 0.25
DEFAULT_DIAG_STRIDE = 10
DEFAULT_N_STEPS = 100

_DEFAULT_OUTPUT = {
    "simulate": "diagnostics.csv",
    "legendre-check": "legendre.csv",
    "bracket-audit": "audit.json",
    "dispersion": "dispersion.csv",
}

# section -> allowed keys (``initial`` accepts anything and forwards it)
_KNOWN = {
    "": {"scenario", "seed", "output_path"},
    "lattice": {"dims", "spacing"},
    "physics": {"theta", "gauge"},
    "initial": None,
    "run": {"dt", "n_steps", "diag_stride", "seed", "output_path"},
    "legendre": {"theta_max", "theta_min", "factor", "field_scale", "tolerance"},
    "audit": {"dense_limit", "tolerance", "corrupt_constraint"},
    "dispersion": {"background_scales"},
}


@dataclass
class RunConfig:
    scenario: str
    dims: tuple[int, int, int] = (64, 4, 4)
    spacing: float = 1.0
    theta: tuple[float, float, float] = (0.0, 0.0, 0.0)
    gauge: str = "temporal"
    initial_kind: str = "plane_wave"
    initial_params: dict = field(default_factory=dict)
    dt: Optional[float] = None
    n_steps: int = DEFAULT_N_STEPS
    diag_stride: int = DEFAULT_DIAG_STRIDE
    seed: int = 0
    output_path: str = ""
    legendre: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)
    dispersion: dict = field(default_factory=dict)

    @property
    def lattice(self) -> LatticeSpec:
        return LatticeSpec(self.dims, self.spacing)


def parse_value(text: str) -> Any:
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
        try:
            return [_number(p) for p in parts]
        except ValueError:
            return parts
    try:
        return _number(text)
    except ValueError:
        return text


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_sections(text: str) -> dict[str, dict[str, tuple[Any, int]]]:
    """Split config text into ``{section: {key: (value, line)}}``."""
    sections: dict[str, dict[str, tuple[Any, int]]] = {"": {}}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ParseError(f"malformed section header {raw.strip()!r}", lineno)
            current = line[1:-1].strip().lower()
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", lineno)
            sections[current] = {}
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", lineno)
        if key in sections[current]:
            raise ParseError(f"duplicate key {key!r}", lineno)
        sections[current][key] = (parse_value(value), lineno)
    return sections


def _triple(value, name, kind=float):
    if not isinstance(value, list) or len(value) != 3:
        raise ValidationError(name, "expected three comma-separated values")
    try:
        out = tuple(kind(v) for v in value)
    except (TypeError, ValueError):
        raise ValidationError(name, "non-numeric entry") from None
    if kind is int and any(float(v) != int(v) for v in value):
        raise ValidationError(name, "entries must be integers")
    return out


def _positive(value, name, kind=float):
    try:
        v = kind(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a number, got {value!r}") from None
    if not (np.isfinite(v) and v > 0):
        raise ValidationError(name, "must be positive")
    return v


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises :class:`ParseError` (with line number) for syntax problems and
    :class:`ValidationError` naming the offending field otherwise.
    """
    sections = parse_sections(text)
    for name, entries in sections.items():
        if name not in _KNOWN:
            raise ValidationError(f"[{name}]", "unknown section")
        allowed = _KNOWN[name]
        if allowed is not None:
            for key in entries:
                if key not in allowed:
                    raise ValidationError(f"{name}.{key}" if name else key, "unknown key")

    get = lambda sec, key, default=None: sections.get(sec, {}).get(key, (default, None))[0]

    scenario = get("", "scenario")
    if scenario in (None, "") or not isinstance(scenario, str):
        raise ValidationError("scenario", "missing or empty")
    if scenario not in SCENARIOS:
        raise ValidationError("scenario", f"must be one of {', '.join(SCENARIOS)}")
    cfg = RunConfig(scenario=scenario)

    dims = get("lattice", "dims")
    if dims is not None:
        cfg.dims = _triple(dims, "dims", int)
    spacing = get("lattice", "spacing")
    if spacing is not None:
        cfg.spacing = _positive(spacing, "spacing")
    try:
        LatticeSpec(cfg.dims, cfg.spacing)
    except ValueError as exc:
        raise ValidationError("dims", str(exc)) from None

    theta = get("physics", "theta")
    if theta is not None:
        cfg.theta = _triple(theta, "theta")
        if not all(np.isfinite(cfg.theta)):
            raise ValidationError("theta", "must be finite")
    gauge = get("physics", "gauge")
    if gauge is not None:
        if str(gauge).lower() not in GAUGES:
            raise ValidationError("gauge", f"must be one of {', '.join(GAUGES)}")
        cfg.gauge = str(gauge).lower()

    initial = {k: v for k, (v, _) in sections.get("initial", {}).items()}
    kind = initial.pop("kind", cfg.initial_kind)
    if kind not in INITIAL_KINDS:
        raise ValidationError("kind", f"must be one of {', '.join(INITIAL_KINDS)}")
    cfg.initial_kind = kind
    cfg.initial_params = initial

    dt = get("run", "dt")
    cfg.dt = DEFAULT_CFL * cfg.spacing if dt is None else _positive(dt, "dt")
    n_steps = get("run", "n_steps")
    if n_steps is not None:
        if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 0:
            raise ValidationError("n_steps", "must be a non-negative integer")
        cfg.n_steps = n_steps
    stride = get("run", "diag_stride")
    if stride is not None:
        if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
            raise ValidationError("diag_stride", "must be a positive integer")
        cfg.diag_stride = stride
    seed = get("run", "seed", get("", "seed"))
    if seed is not None:
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ValidationError("seed", "must be a 64-bit non-negative integer")
        cfg.seed = seed
    out = get("run", "output_path", get("", "output_path"))
    cfg.output_path = str(out) if out not in (None, "") else _DEFAULT_OUTPUT[scenario]

    cfg.legendre = {k: v for k, (v, _) in sections.get("legendre", {}).items()}
    cfg.audit = {k: v for k, (v, _) in sections.get("audit", {}).items()}
    cfg.dispersion = {k: v for k, (v, _) in sections.get("dispersion", {}).items()}
    return cfg


def load_config(path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)
