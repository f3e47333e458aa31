"""Flat key = value run configuration.

Configs are meant to be archived next to the outputs they produced, so the
format is deliberately dull: one `key = value` per line, `#` comments,
no sections, no interpolation.  Parsing is strict — unknown keys and keys
that don't belong to the requested command are errors, not warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

COMMANDS = ("solve", "sweep-detuning", "sweep-density", "pair-sweep",
            "ensemble-sweep", "validate")


class ConfigError(Exception):
    """Field-level configuration error."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    # model inputs: dimensionless density, or a physical pair
    cooperativity: float | None = None
    number_density: float | None = None
    wavelength: float | None = None
    detuning: float = 0.0
    rabi: float = 1e-3
    # sweep grids
    detuning_min: float | None = None
    detuning_max: float | None = None
    detuning_steps: int | None = None
    coop_min: float | None = None
    coop_max: float | None = None
    coop_steps: int | None = None
    r_min: float | None = None
    r_max: float | None = None
    r_steps: int | None = None
    # ensemble geometry
    geometry: str | None = None
    size_min: float | None = None
    size_max: float | None = None
    size_steps: int | None = None
    cylinder_radius: float = 0.2
    n_samples: int = 100000
    seed: int | None = None
    # solver knobs
    tol: float = 1e-12
    max_iter: int = 10000
    damping: float = 1.0
    # output
    out: str | None = None
    format: str = "csv"
    precision: int = 11
    plot: bool = False
    quiet: bool = False


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}

_INT_KEYS = {"detuning_steps", "coop_steps", "r_steps", "size_steps",
             "n_samples", "seed", "max_iter", "precision"}
_FLOAT_KEYS = {"cooperativity", "number_density", "wavelength", "detuning",
               "rabi", "detuning_min", "detuning_max", "coop_min", "coop_max",
               "r_min", "r_max", "size_min", "size_max", "cylinder_radius",
               "tol", "damping"}
_BOOL_KEYS = {"plot", "quiet"}
_STR_KEYS = {"command", "geometry", "out", "format"}

_COMMON = {"command", "out", "format", "precision", "quiet"}
_SOLVER = {"tol", "max_iter", "damping"}
_DENSITY = {"cooperativity", "number_density", "wavelength"}

# strict per-command allowlists
ALLOWED_KEYS = {
    "solve": _COMMON | _SOLVER | _DENSITY | {"detuning"},
    "sweep-detuning": _COMMON | _SOLVER | _DENSITY
                      | {"detuning_min", "detuning_max", "detuning_steps", "plot"},
    "sweep-density": _COMMON | _SOLVER
                     | {"detuning", "coop_min", "coop_max", "coop_steps", "plot"},
    "pair-sweep": _COMMON | _SOLVER | _DENSITY
                  | {"detuning", "r_min", "r_max", "r_steps", "plot"},
    "ensemble-sweep": _COMMON | _SOLVER | _DENSITY
                      | {"detuning", "rabi", "geometry", "size_min", "size_max",
                         "size_steps", "cylinder_radius", "n_samples", "seed",
                         "plot"},
    "validate": _COMMON,
}


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    if key in _FLOAT_KEYS:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {raw!r}") from None
        if value != value or value in (float("inf"), float("-inf")):
            raise ConfigError(key, "must be finite")
        return value
    if key in _BOOL_KEYS:
        if raw == "true":
            return True
        if raw == "false":
            return False
        raise ConfigError(key, f"expected true or false, got {raw!r}")
    return raw


def _require_grid(kv, prefix):
    lo, hi, steps = (kv.get(f"{prefix}_min"), kv.get(f"{prefix}_max"),
                     kv.get(f"{prefix}_steps"))
    for suffix, v in (("min", lo), ("max", hi), ("steps", steps)):
        if v is None:
            raise ConfigError(f"{prefix}_{suffix}", "required for this command")
    if steps < 1:
        raise ConfigError(f"{prefix}_steps", "must be >= 1")
    if hi < lo:
        raise ConfigError(f"{prefix}_max", "must be >= the grid minimum")


def _check_density_inputs(kv, required: bool):
    has_coop = kv.get("cooperativity") is not None
    has_phys = (kv.get("number_density") is not None
                or kv.get("wavelength") is not None)
    if has_coop and has_phys:
        raise ConfigError("cooperativity",
                          "mutually exclusive with number_density/wavelength")
    if has_phys:
        if kv.get("number_density") is None:
            raise ConfigError("number_density", "required with wavelength")
        if kv.get("wavelength") is None:
            raise ConfigError("wavelength", "required with number_density")
        for key in ("number_density", "wavelength"):
            if kv[key] <= 0:
                raise ConfigError(key, "must be > 0")
    if has_coop and kv["cooperativity"] < 0:
        raise ConfigError("cooperativity", "must be ≥ 0")
    if required and not has_coop and not has_phys:
        raise ConfigError("cooperativity",
                          "required (or give number_density + wavelength)")


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse config text into a RunConfig; total — raises ConfigError only.

    command, if given, must agree with a `command` key in the text (the
    CLI passes its subcommand here); with no key present it is injected.
    """
    kv: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}",
                              f"expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown key")
        if key in kv:
            raise ConfigError(key, "duplicate key")
        if not raw:
            raise ConfigError(key, "empty value")
        kv[key] = _convert(key, raw)

    cmd = kv.get("command", command)
    if cmd is None:
        raise ConfigError("command", "required")
    if cmd not in COMMANDS:
        raise ConfigError("command",
                          f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    if command is not None and cmd != command:
        raise ConfigError("command",
                          f"config says {cmd!r} but {command!r} was invoked")
    kv["command"] = cmd

    allowed = ALLOWED_KEYS[cmd]
    for key in kv:
        if key not in allowed:
            raise ConfigError(key, f"not valid for command {cmd!r}")

    # per-command requirements and cross-field rules
    if cmd in ("solve", "sweep-detuning", "pair-sweep"):
        _check_density_inputs(kv, required=True)
    elif cmd == "ensemble-sweep":
        _check_density_inputs(kv, required=True)
        if kv.get("geometry") not in ("sphere", "cylinder"):
            raise ConfigError("geometry", "must be sphere or cylinder")
        _require_grid(kv, "size")
        if kv.get("size_min", 1.0) <= 0:
            raise ConfigError("size_min", "must be > 0")
        if kv.get("seed") is None:
            raise ConfigError("seed", "required for ensemble commands")
        if kv.get("cylinder_radius", 0.2) <= 0:
            raise ConfigError("cylinder_radius", "must be > 0")
        if kv.get("n_samples", 1) < 1:
            raise ConfigError("n_samples", "must be >= 1")
        if kv.get("rabi", 1e-3) <= 0:
            raise ConfigError("rabi", "must be > 0")
    if cmd == "sweep-detuning":
        _require_grid(kv, "detuning")
    elif cmd == "sweep-density":
        _require_grid(kv, "coop")
        if kv.get("coop_min", 0.0) < 0:
            raise ConfigError("coop_min", "cooperativity must be ≥ 0")
    elif cmd == "pair-sweep":
        _require_grid(kv, "r")
        if kv.get("r_min", 1.0) <= 0:
            raise ConfigError("r_min", "must be > 0")

    if kv.get("format", "csv") not in ("csv", "json"):
        raise ConfigError("format", "must be csv or json")
    if not 1 <= kv.get("precision", 11) <= 17:
        raise ConfigError("precision", "must be between 1 and 17")
    if kv.get("tol", 1e-12) <= 0:
        raise ConfigError("tol", "must be > 0")
    if kv.get("max_iter", 1) < 1:
        raise ConfigError("max_iter", "must be >= 1")
    if not 0 < kv.get("damping", 1.0) <= 1:
        raise ConfigError("damping", "must be in (0, 1]")
    if kv.get("seed") is not None and kv["seed"] < 0:
        raise ConfigError("seed", "must be a non-negative integer")

    return RunConfig(**kv)


def emit_config(cfg: RunConfig) -> str:
    """Render a RunConfig back to config text (parse_config inverse)."""
    lines = []
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name not in ALLOWED_KEYS[cfg.command] and f.name != "command":
            continue
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def default_output_name(cfg: RunConfig) -> str:
    return cfg.out if cfg.out is not None else f"{cfg.command}.{cfg.format}"
