"""Run configuration: a single TOML file validated before any heavy work."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .evolution import IntegratorConfig
from .propagator import FluidParams
from .scenarios import SCENARIOS
from .spectral import GridSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["RunConfig", "ConfigError", "load_config"]

MODES = ("simulate", "linear-decay", "check", "fit", "report")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    grid: GridSpec
    params: FluidParams
    integrator: IntegratorConfig
    scenario: str = "mixed-small"
    amplitude: float = 1e-3
    norm_order: int = 3
    out_dir: str = "out"
    seed: int = 0
    eta: float = 0.125
    fit_window: tuple = (10.0, 1e4)
    checkpoint_every: int = 0
    include_time_derivatives: bool = False
    # decay-study section
    decay_t_min: float = 1e2
    decay_t_max: float = 1e4
    decay_k_list: tuple = (0, 1, 2)
    decay_points_per_decade: int = 20
    decay_rel_tol: float = 1e-9
    decay_profile_width: float = 1.0
    # check-suite section
    check_fields: int = 200

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")
        if self.amplitude <= 0:
            raise ConfigError(f"amplitude must be positive, got {self.amplitude}")
        if self.norm_order < 1:
            raise ConfigError(f"norm_order must be >= 1, got {self.norm_order}")
        if self.checkpoint_every < 0:
            raise ConfigError("checkpoint_every must be >= 0")


def _build(table: dict, mode: str | None = None) -> RunConfig:
    # fluid parameters are validated before the grid so an inadmissible
    # viscosity pair is rejected before any allocation-heavy work
    fluid = table.get("fluid", {})
    try:
        params = FluidParams(
            mu=float(fluid.get("mu", 1.0)),
            nu=float(fluid.get("nu", 0.0)),
            pressure_law=fluid.get("pressure_law", "linear"),
            gamma_exponent=float(fluid.get("gamma_exponent", 1.4)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [fluid] section: {exc}") from exc

    gtab = table.get("grid", {})
    try:
        grid = GridSpec(
            dim=int(gtab.get("dim", 2)),
            points_per_axis=int(gtab.get("points_per_axis", 64)),
            period=float(gtab.get("period", 6.283185307179586)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [grid] section: {exc}") from exc

    itab = table.get("integrator", {})
    try:
        integ = IntegratorConfig(
            scheme=itab.get("scheme", "ETD2RK"),
            dt=float(itab.get("dt", 1e-2)),
            t_end=float(itab.get("t_end", 10.0)),
            renormalize_every=int(itab.get("renormalize_every", 0)),
            diagnostics_every=int(itab.get("diagnostics_every", 10)),
            include_nonlinear=bool(itab.get("include_nonlinear", True)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [integrator] section: {exc}") from exc

    dtab = table.get("decay_study", {})
    ftab = table.get("fit", {})
    ctab = table.get("check", {})
    window = ftab.get("window", [10.0, 1e4])

    return RunConfig(
        mode=mode or table.get("mode", "simulate"),
        grid=grid,
        params=params,
        integrator=integ,
        scenario=table.get("scenario", "mixed-small"),
        amplitude=float(table.get("amplitude", 1e-3)),
        norm_order=int(table.get("norm_order", 3)),
        out_dir=str(table.get("out", "out")),
        seed=int(table.get("seed", 0)),
        eta=float(table.get("eta", 0.125)),
        fit_window=(float(window[0]), float(window[1])),
        checkpoint_every=int(table.get("checkpoint_every", 0)),
        include_time_derivatives=bool(table.get("include_time_derivatives", False)),
        decay_t_min=float(dtab.get("t_min", 1e2)),
        decay_t_max=float(dtab.get("t_max", 1e4)),
        decay_k_list=tuple(int(k) for k in dtab.get("k_list", [0, 1, 2])),
        decay_points_per_decade=int(dtab.get("points_per_decade", 20)),
        decay_rel_tol=float(dtab.get("rel_tol", 1e-9)),
        decay_profile_width=float(dtab.get("profile_width", 1.0)),
        check_fields=int(ctab.get("fields", 200)),
    )


def load_config(path, mode: str | None = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        table = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return _build(table, mode=mode)
