#!/usr/bin/env python3
"""
Pydantic models for run configuration documents
"""

import json
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from chodim.core.exceptions import ConfigurationError
from chodim.services.cho_model import (
    ForcingSpec, GridSpec, NonlinearitySpec, PhysParams, State, build_phys_params,
)
from chodim.services.metric3 import MetricParams, tune_metric_params

SEED_LIMIT = 2 ** 64


class PhysConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(1.0, gt=0, description="Oono damping coefficient")
    nonlinearity: NonlinearitySpec = Field(default_factory=NonlinearitySpec)
    forcing: ForcingSpec = Field(default_factory=ForcingSpec)

    def build(self, grid: GridSpec) -> PhysParams:
        return build_phys_params(grid, self.alpha, self.nonlinearity, self.forcing)


class MetricConfig(BaseModel):
    """Metric parameters; a missing Lweight is tuned on the attractor sample"""

    model_config = ConfigDict(extra="forbid")

    delta: Optional[float] = Field(None, ge=0, description="None selects min(0.1, alpha/4)")
    Lweight: Optional[float] = Field(None, ge=0, description="None tunes the smallest power of two")
    R: Optional[float] = Field(None, gt=1, description="None selects half-period - 1")
    cutoff_profile: Literal["smoothstep", "none"] = "smoothstep"
    tune_threshold: float = Field(0.1, gt=0, description="lambda_min the tuned metric must exceed")

    def resolve(self, samples: Sequence[State], p: PhysParams, grid: GridSpec) -> MetricParams:
        if self.Lweight is None:
            return tune_metric_params(samples, p, grid, self.delta, self.R, self.cutoff_profile, self.tune_threshold)
        delta = MetricParams.default_delta(p.alpha) if self.delta is None else self.delta
        return MetricParams(delta=delta, Lweight=self.Lweight, R=self.R, cutoff_profile=self.cutoff_profile)


class IntegrateConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dt: float = Field(1e-3, gt=0)
    t_transient: float = Field(20.0, gt=0)
    t_sample: float = Field(10.0, ge=0)
    n_samples: int = Field(4, ge=1)
    amplitude: float = Field(1.0, gt=0, description="Size of the seeded initial data")
    snapshot_every: float = Field(5.0, gt=0, description="Time between state snapshots in simulate")


class LiouvilleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d_max: int = Field(8, ge=1)
    reorth_every: int = Field(10, ge=1)
    T_contract: float = Field(5.0, gt=0)
    lyapunov_T: float = Field(20.0, gt=0, description="Base trajectory length for the Lyapunov spectrum")
    n_exponents: Optional[int] = Field(None, ge=1, description="None selects d_max")
    lyapunov_basis: Literal["modal", "energy"] = Field(
        "modal", description="Coordinates for the Lyapunov QR; modal makes the linear part a scaled rotation"
    )


class CheckConfig(BaseModel):
    """Residual thresholds and the run length of the residual suites"""

    model_config = ConfigDict(extra="forbid")

    T: float = Field(1.0, gt=0)
    energy: float = Field(1e-6, gt=0)
    tangent: float = Field(1e-4, gt=0)
    liouville: float = Field(1e-5, gt=0)
    metric_identity: float = Field(1e-5, gt=0)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid: GridSpec = Field(default_factory=GridSpec)
    phys: PhysConfig = Field(default_factory=PhysConfig)
    metric: MetricConfig = Field(default_factory=MetricConfig)
    integrate: IntegrateConfig = Field(default_factory=IntegrateConfig)
    liouville: LiouvilleConfig = Field(default_factory=LiouvilleConfig)
    checks: CheckConfig = Field(default_factory=CheckConfig)
    seed: int = Field(0, ge=0, lt=SEED_LIMIT)
    output_dir: Optional[str] = Field(None, description="None selects CHODIM_OUTPUT_DIR")

    @model_validator(mode="after")
    def validate_cross_fields(self) -> "RunConfig":
        grid, metric = self.grid, self.metric
        if metric.R is not None and metric.cutoff_profile == "smoothstep" and metric.R >= grid.half_period:
            raise ValueError(f"metric.R={metric.R:g} must be below the half-period {grid.half_period:g}")
        dim = 2 * grid.n_coords
        if self.liouville.d_max > dim:
            raise ValueError(f"liouville.d_max={self.liouville.d_max} exceeds the state dimension {dim}")
        if self.liouville.n_exponents is not None and self.liouville.n_exponents > dim:
            raise ValueError(f"liouville.n_exponents={self.liouville.n_exponents} exceeds the state dimension {dim}")
        if self.integrate.dt >= min(self.liouville.T_contract, self.checks.T, self.integrate.t_transient):
            raise ValueError(f"integrate.dt={self.integrate.dt:g} must be shorter than every run length")
        return self

    @property
    def n_exponents(self) -> int:
        return self.liouville.n_exponents or self.liouville.d_max

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            field_errors = {".".join(str(part) for part in err["loc"]) or "config": err["msg"] for err in e.errors()}
            raise ConfigurationError(
                "Invalid run configuration:\n" + "\n".join(f"{k}: {v}" for k, v in field_errors.items()),
                field_errors=field_errors,
            )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigurationError(f"Config file {path} not found")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config file {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file {path} must hold a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, seed: Optional[int] = None, output_dir: Optional[str] = None) -> "RunConfig":
        """Copy with command-line overrides applied and revalidated"""
        data = self.model_dump()
        if seed is not None:
            data["seed"] = seed
        if output_dir is not None:
            data["output_dir"] = output_dir
        return RunConfig.from_dict(data)
