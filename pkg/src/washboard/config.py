"""Run configuration: flat key-value files plus command-line overrides.

The file format is one `key = value` pair per line, `#` comments, blank
lines ignored.  Later assignments win, and --set overrides applied after
the file win over it.  Keys and defaults mirror the RunConfig fields.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .errors import ConfigError
from .params import PhysicalInputs, SystemParams, build_system

_NONE_STRINGS = {"none", "null", ""}


@dataclass
class RunConfig:
    # physical inputs (k_B kelvin / ampere)
    e_j: float = 0.86
    e_c: float = 0.68
    e_c0: float = 0.0037
    e_j0: float = 18.4
    e_b_ratio: float = 0.97
    i_bias: float | None = None
    e_j_factor: float = 1.0
    # run selection
    mode: str = "irreversible"          # reversible | irreversible | both
    t_max_t0: float | None = 2.0        # horizon in units of t0 ...
    t_max_ns: float | None = None       # ... or in nanoseconds (wins if set)
    t_t0: float | None = None           # single snapshot time (surfaces)
    t_ns: float | None = None
    samples: int = 801
    # surface grids
    grid_points: int = 401
    grid_pad: float = 6.0
    # integrator tolerances
    rtol: float = 1e-10
    atol: float = 1e-12
    # sweep
    sweep_max_points: int = 1000
    jobs: int = 1
    # output
    outdir: str = ""
    deterministic: bool = False

    def __post_init__(self):
        if not self.outdir:
            self.outdir = os.environ.get("WASHBOARD_OUTDIR", "out")

    def validate(self) -> None:
        if self.mode not in ("reversible", "irreversible", "both"):
            raise ConfigError(f"mode must be reversible|irreversible|both, got {self.mode!r}")
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if self.t_max_ns is not None and self.t_max_ns <= 0:
            raise ConfigError("t_max_ns must be positive")
        if self.t_max_ns is None and (self.t_max_t0 is None or self.t_max_t0 <= 0):
            raise ConfigError("need a positive horizon (t_max_t0 or t_max_ns)")
        if self.grid_points < 2:
            raise ConfigError("grid_points must be >= 2")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def physical_inputs(self) -> PhysicalInputs:
        return PhysicalInputs(
            e_j=self.e_j * self.e_j_factor,
            e_c=self.e_c,
            e_c0=self.e_c0,
            e_j0=self.e_j0,
            e_b_ratio=self.e_b_ratio,
            i_bias=self.i_bias,
        )

    def system(self) -> SystemParams:
        return build_system(self.physical_inputs())

    def modes(self) -> tuple[str, ...]:
        return ("reversible", "irreversible") if self.mode == "both" else (self.mode,)

    def horizon_seconds(self, params: SystemParams) -> float:
        if self.t_max_ns is not None:
            return self.t_max_ns * 1e-9
        if params.t0 == float("inf"):
            raise ConfigError("t0 is infinite (mu = 0); give the horizon as t_max_ns")
        return self.t_max_t0 * params.t0

    def snapshot_seconds(self, params: SystemParams) -> float:
        if self.t_ns is not None:
            return self.t_ns * 1e-9
        if self.t_t0 is not None:
            if params.t0 == float("inf"):
                raise ConfigError("t0 is infinite (mu = 0); give the time as t_ns")
            return self.t_t0 * params.t0
        raise ConfigError("surface output needs a snapshot time (t_ns or t_t0)")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str, where: str):
    ftype = _FIELD_TYPES.get(key)
    if ftype is None:
        raise ConfigError(f"{where}: unknown config key {key!r}")
    raw = raw.strip()
    try:
        if ftype == "float":
            return float(raw)
        if ftype == "int":
            return int(raw)
        if ftype == "bool":
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if ftype == "float | None":
            return None if raw.lower() in _NONE_STRINGS else float(raw)
        return raw  # str
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {key} = {raw!r} ({exc})") from exc


def load_config(path: str | None = None, overrides: list[str] | None = None) -> RunConfig:
    """Build a RunConfig from an optional file and key=value overrides."""
    cfg = RunConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, raw = stripped.split("=", 1)
            key = key.strip()
            setattr(cfg, key, _coerce(key, raw, f"{path}:{lineno}"))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        setattr(cfg, key, _coerce(key, raw, f"--set {item}"))
    cfg.validate()
    return cfg
