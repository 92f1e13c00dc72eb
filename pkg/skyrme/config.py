"""Run configuration: flat `group.key=value` files validated by pydantic."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .logging_config import get_logger

logger = get_logger(__name__)

OUTPUT_DIR = os.getenv("SKYRME_OUTPUT_DIR", "runs")


class _Group(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridConfig(_Group):
    N: int = Field(4096, ge=16, description="number of radial cells")
    R: float = Field(64.0, gt=0, description="outer radius")


class ModelConfig(_Group):
    N1: int = Field(0, ge=0, description="winding: f(0, t) = N1*pi")
    contrast: bool = Field(False, description="drop the quasilinear terms for r < 1")


class DataConfig(_Group):
    a: float = Field(5.0, description="amplitude of g at t = 0")
    r_c: float = Field(2.0, ge=0)
    sigma: float = Field(0.5, gt=0)
    a1: float = Field(0.0, description="amplitude of dg/dt at t = 0")
    r_c1: float = Field(2.0, ge=0)
    sigma1: float = Field(0.5, gt=0)


class EvolutionConfig(_Group):
    cfl: float = Field(0.25, gt=0, le=0.5, description="dt = cfl * h")
    t_end: float = Field(10.0, ge=0)
    record_every: int = Field(16, ge=1, description="diagnostic cadence in steps")
    blowup_threshold: float = Field(1e6, gt=0)
    dissipation: float = Field(0.0, ge=0, le=1.0, description="Kreiss-Oliger strength, 0 disables")


class QuadratureConfig(_Group):
    order: int = Field(16, ge=2, le=64)
    abs_tol: float = Field(1e-12, gt=0)
    rel_tol: float = Field(1e-10, gt=0)
    max_panels: int = Field(2 ** 14, ge=2)


class OutputConfig(_Group):
    dir: str = Field(OUTPUT_DIR)
    snapshot_times: List[float] = Field(default_factory=list)
    plots: bool = False

    @field_validator("snapshot_times", mode="before")
    @classmethod
    def _split(cls, v: Any) -> Any:
        if isinstance(v, str):
            return [float(x) for x in v.replace(";", ",").split(",") if x.strip()]
        return v


class DiagnosticsConfig(_Group):
    r0: float = Field(0.25, gt=0, le=0.5, description="radius of the small-r bound on G1")
    boundary_cells: Optional[int] = Field(None, ge=4)
    boundary_fraction: float = Field(1e-10, gt=0)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    grid: GridConfig = Field(default_factory=GridConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)
    seed: int = 0

    @model_validator(mode="after")
    def _room_for_propagation(self) -> "RunConfig":
        d, t_end, R = self.data, self.evolution.t_end, self.grid.R
        reach = d.r_c + t_end + 3.0 * d.sigma
        if d.a1 != 0.0:
            reach = max(reach, d.r_c1 + t_end + 3.0 * d.sigma1)
        if self.model.N1:
            reach = max(reach, 2.0 + t_end)
        if (d.a != 0.0 or d.a1 != 0.0 or self.model.N1) and not R > reach:
            raise ValueError(f"grid.R={R} must exceed {reach} (data support + t_end)")
        return self


def _group_flat(values: Dict[str, Optional[str]]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"line '{key}' has no value")
        if "." in key:
            group, name = key.split(".", 1)
            if "." in name:
                raise ConfigError(f"key '{key}' is nested too deeply")
            nested.setdefault(group, {})[name] = value
        else:
            nested[key] = value
    return nested


def parse_run_config(values: Dict[str, Optional[str]]) -> RunConfig:
    try:
        return RunConfig.model_validate(_group_flat(values))
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        values = dotenv_values(path, interpolate=False)
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    config = parse_run_config(values)
    logger.info("loaded run config from %s", path)
    return config


def dump_run_config(config: RunConfig) -> Dict[str, Any]:
    """Flat key/value view, the same shape as the config file."""
    flat: Dict[str, Any] = {}
    for group, body in config.model_dump().items():
        if isinstance(body, dict):
            for k, v in body.items():
                flat[f"{group}.{k}"] = v
        else:
            flat[group] = body
    return flat
