"""Run configuration and the flat key=value config format.

Grammar (one statement per line):

    # comment, blank lines ignored
    [section]          optional headers, purely organizational
    key = value

Recognized keys (sections do not namespace them):

    case               1 | 2 | 3 | 4 | custom
    nx, ny             cell counts (>= 2)
    xmin, xmax, ymin, ymax
    tend               final time (> 0)
    cfl                CFL factor in (0, 1]
    g, G, lambda, K, zeta
    outdir             output directory
    snap_every         snapshot interval in simulation time (0 = final only)
    vtk                true/false, also write VTK snapshots
    project_every      cell-projection period in steps (>= 1)
    h0, ux0, uy0       uniform initial state for case = custom
    slice              'x COORD' or 'y COORD', repeatable

Unknown keys are rejected with their line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .params import PhysicalParams


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


@dataclass
class SimConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    case: str = "1"
    nx: int = 128
    ny: int = 128
    xmin: float = 0.0
    xmax: float = 8.0
    ymin: float = 0.0
    ymax: float = 8.0
    t_end: float = 0.2
    cfl_factor: float = 0.5
    outdir: str = "out"
    snap_every: float = 0.0
    vtk: bool = False
    project_every: int = 1
    slices: list[tuple[str, float]] = field(default_factory=list)
    h0: float = 1.0
    ux0: float = 0.0
    uy0: float = 0.0

    def validate(self) -> "SimConfig":
        if self.case not in ("1", "2", "3", "4", "custom"):
            raise ConfigError(f"case must be 1..4 or custom, got {self.case!r}")
        if self.nx < 2 or self.ny < 2:
            raise ConfigError("nx and ny must be at least 2")
        if not self.xmax > self.xmin or not self.ymax > self.ymin:
            raise ConfigError("domain extents must be increasing")
        if not self.t_end > 0.0:
            raise ConfigError(f"tend must be positive, got {self.t_end}")
        if not 0.0 < self.cfl_factor <= 1.0:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl_factor}")
        if self.snap_every < 0.0:
            raise ConfigError("snap_every must be nonnegative")
        if self.project_every < 1:
            raise ConfigError("project_every must be at least 1")
        if self.h0 <= 0.0:
            raise ConfigError("h0 must be positive")
        for axis, coord in self.slices:
            if axis not in ("x", "y"):
                raise ConfigError(f"slice axis must be x or y, got {axis!r}")
            # the named axis is held fixed at the coordinate
            lo, hi = (self.xmin, self.xmax) if axis == "x" else (self.ymin, self.ymax)
            if not lo <= coord <= hi:
                raise ConfigError(f"slice coordinate {coord} outside domain")
        return self


_FLOAT_KEYS = {
    "xmin": "xmin", "xmax": "xmax", "ymin": "ymin", "ymax": "ymax",
    "tend": "t_end", "cfl": "cfl_factor", "snap_every": "snap_every",
    "h0": "h0", "ux0": "ux0", "uy0": "uy0",
}
_INT_KEYS = {"nx": "nx", "ny": "ny", "project_every": "project_every"}
_PARAM_KEYS = {"g": "g", "G": "G", "lambda": "lam", "K": "K", "zeta": "zeta"}


def parse_config_text(text: str) -> SimConfig:
    """Parse the documented key=value format into a validated SimConfig."""
    cfg = SimConfig()
    param_kw: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key == "case":
                cfg.case = value
            elif key == "outdir":
                cfg.outdir = value
            elif key == "vtk":
                if value.lower() not in ("true", "false", "0", "1"):
                    raise ValueError("expected boolean")
                cfg.vtk = value.lower() in ("true", "1")
            elif key == "slice":
                axis, coord = value.split()
                cfg.slices.append((axis, float(coord)))
            elif key in _FLOAT_KEYS:
                setattr(cfg, _FLOAT_KEYS[key], float(value))
            elif key in _INT_KEYS:
                setattr(cfg, _INT_KEYS[key], int(value))
            elif key in _PARAM_KEYS:
                param_kw[_PARAM_KEYS[key]] = float(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc

    if cfg.case in ("1", "2", "3", "4"):
        from .presets import default_config
        base = default_config(cfg.case)
        if "tend" not in _keys_present(text):
            cfg.t_end = base.t_end
    if param_kw:
        try:
            cfg.params = PhysicalParams(**{**cfg.params.__dict__, **param_kw})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg.validate()


def _keys_present(text: str) -> set[str]:
    keys = set()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line and "=" in line and not line.startswith("["):
            keys.add(line.partition("=")[0].strip())
    return keys


def load_config(path: str) -> SimConfig:
    """Read and validate a configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
