#!/usr/bin/env python3
"""
Time-dependent metric types: parameters, splitting and dimension reports
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid

from chodim.core.exceptions import ConfigurationError, DimensionMismatchError
from chodim.services.cho_model.models import GridSpec, State

DISCRETE_CONSTANTS_NOTE = (
    "gamma, C1 and c are constants of the discretized problem on this grid, "
    "not certified constants of the continuum equation"
)


class MetricParams(BaseModel):
    """delta couples w_t and w, Lweight weighs the cut-off corrector, R is the cut-off radius"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    delta: float = Field(0.1, ge=0)
    Lweight: float = Field(0.0, ge=0)
    R: Optional[float] = Field(None, gt=1, description="None selects half-period - 1")
    cutoff_profile: Literal["smoothstep", "none"] = "smoothstep"

    @classmethod
    def default_delta(cls, alpha: float) -> float:
        return min(0.1, alpha / 4.0)

    def radius(self, grid: GridSpec) -> float:
        """Resolved cut-off radius; must stay below the half-period"""
        R = grid.half_period - 1.0 if self.R is None else self.R
        if self.cutoff_profile == "smoothstep" and not 1.0 < R < grid.half_period:
            raise ConfigurationError(f"Cut-off radius R={R:g} must lie in (1, {grid.half_period:g})")
        return R


class SplittingReport(BaseModel):
    """(M xi, xi) <= -gamma |xi|_E^2 + C1 |psi_R w|_{L^2}^2 on the sampled base states"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: float = Field(..., gt=0)
    C1: float = Field(..., ge=0)
    worst_direction: State
    worst_sample: int
    K_spectrum: List[float]
    probe_slack: float = Field(..., description="min over probes of the inequality slack per |xi|_E^2")
    n_probes: int
    note: str = DISCRETE_CONSTANTS_NOTE


@dataclass
class TraceCurves:
    """Tr_d of the symmetrized M(t) in E(t), d = 1..d_max, along one base trajectory"""

    times: np.ndarray
    traces: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.traces = np.asarray(self.traces, dtype=float)
        if self.traces.ndim != 2 or self.traces.shape[0] != self.times.size:
            raise DimensionMismatchError(
                f"Trace table has shape {self.traces.shape} for {self.times.size} times",
                expected=self.times.size, actual=self.traces.shape[0],
            )

    @property
    def d_max(self) -> int:
        return self.traces.shape[1]

    def integrals(self) -> np.ndarray:
        """Integral of Tr_d over the sampled span, per d"""
        if self.times.size < 2:
            return np.zeros(self.d_max)
        return trapezoid(self.traces, self.times, axis=0)

    def averaged(self) -> np.ndarray:
        """Time-averaged Tr_d, per d"""
        if self.times.size < 2:
            return self.traces[0].copy()
        return self.integrals() / (self.times[-1] - self.times[0])


class DimensionReport(BaseModel):
    """Outcome of the dimension pipeline"""

    schema_version: int = 1
    params: Dict[str, Any]
    c: float
    gamma: float
    C1: float
    trace_curves: Dict[str, List[float]] = Field(..., description="worst-sample averaged Tr_d, per-sample curves")
    chosen_d: Optional[int]
    T: Optional[float]
    omega_d_measured: Optional[float]
    bound_formula_rhs: Optional[float] = Field(None, description="d ln c + integral of Tr_d, bound for log omega_d")
    bound_holds: Optional[bool] = Field(None, description="log omega_d <= bound_formula_rhs + 1e-6")
    theorem_log_bound: Optional[float] = None
    theorem_hypothesis_holds: Optional[bool] = Field(None, description="splitting holds along the base trajectory")
    theorem_holds: Optional[bool] = Field(None, description="log omega_d <= theorem_log_bound + 1e-6; None when not applicable")
    sandwich_holds: Optional[bool] = None
    failed_checks: List[str] = Field(default_factory=list)
    metric_liouville_residual: Optional[float] = None
    inconclusive: bool = False
    note: str = DISCRETE_CONSTANTS_NOTE
