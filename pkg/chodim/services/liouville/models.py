#!/usr/bin/env python3
"""
Linear flows, time-dependent metrics and volume traces
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from chodim.core.exceptions import ConfigurationError, DimensionMismatchError
from chodim.services.multilinear import DenseOperator, InnerProduct, equivalence_constant

# (t, h, W) -> W advanced from t to t + h, columnwise linear
StepFn = Callable[[float, float, np.ndarray], np.ndarray]


def as_matrix(value) -> np.ndarray:
    if isinstance(value, DenseOperator):
        return value.entries
    return np.asarray(value, dtype=float)


@dataclass(frozen=True)
class LinearFlow:
    """dphi/dt = L(t) phi on [0, t_end]

    With ``step`` set, vectors are advanced by that one-step map and the
    generator is only queried on the integration grid (for traces).
    """

    generator: Callable[[float], object]
    t_end: float
    dim: int
    step: Optional[StepFn] = None

    def __post_init__(self):
        if self.t_end <= 0:
            raise ConfigurationError(f"Flow time span must be positive, got {self.t_end}")
        if self.dim < 1:
            raise DimensionMismatchError(f"Flow dimension must be positive, got {self.dim}")

    @classmethod
    def constant(cls, L, t_end: float) -> "LinearFlow":
        matrix = as_matrix(L).copy()
        return cls(lambda t: matrix, t_end, matrix.shape[0])

    def at(self, t: float) -> np.ndarray:
        matrix = as_matrix(self.generator(t))
        if matrix.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"Generator returned shape {matrix.shape} at t={t}", expected=self.dim, actual=matrix.shape[0]
            )
        return matrix


@dataclass(frozen=True)
class MetricFamily:
    """t -> V(t), the Gram matrix of |.|_{E(t)} in the fixed coordinates

    ``form_rate`` gives dV/dt; when absent it is taken by centered
    differences with step ``rate_step``. ``c`` bounds the squared-norm
    equivalence with the fixed form.
    """

    form_at: Callable[[float], np.ndarray]
    c: float
    form_rate: Optional[Callable[[float], np.ndarray]] = None
    rate_step: float = 1e-3

    def __post_init__(self):
        if self.c < 1.0:
            raise ConfigurationError(f"Equivalence constant must be >= 1, got {self.c}")

    @classmethod
    def constant(cls, V) -> "MetricFamily":
        matrix = np.array(as_matrix(V), copy=True)
        zero = np.zeros_like(matrix)
        c = equivalence_constant(InnerProduct.identity(matrix.shape[0]), InnerProduct.from_matrix(matrix))
        return cls(lambda t: matrix, c, lambda t: zero)

    @classmethod
    def from_matrices(cls, times: Sequence[float], matrices: Sequence[np.ndarray]) -> "MetricFamily":
        """Piecewise-linear family through sampled Gram matrices

        c is the worst sampled equivalence constant, exact for the
        interpolant since the form is convex in its samples.
        """
        times = np.asarray(times, dtype=float)
        stack = np.stack([as_matrix(m) for m in matrices])
        if times.ndim != 1 or times.size != stack.shape[0] or times.size < 2:
            raise ConfigurationError("from_matrices needs matching times and at least two matrices")
        if np.any(np.diff(times) <= 0):
            raise ConfigurationError("Metric sample times must be increasing")
        identity = InnerProduct.identity(stack.shape[1])
        c = max(equivalence_constant(identity, InnerProduct.from_matrix(m)) for m in stack)

        def locate(t: float) -> int:
            return int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2))

        def form_at(t: float) -> np.ndarray:
            i = locate(t)
            theta = (t - times[i]) / (times[i + 1] - times[i])
            return (1.0 - theta) * stack[i] + theta * stack[i + 1]

        def form_rate(t: float) -> np.ndarray:
            i = locate(t)
            return (stack[i + 1] - stack[i]) / (times[i + 1] - times[i])

        return cls(form_at, c, form_rate)

    def at(self, t: float) -> np.ndarray:
        return as_matrix(self.form_at(t))

    def rate(self, t: float) -> np.ndarray:
        if self.form_rate is not None:
            return as_matrix(self.form_rate(t))
        h = self.rate_step
        return (self.at(t + h) - self.at(t - h)) / (2.0 * h)


@dataclass
class VolumeTrace:
    """Both sides of the Liouville identity sampled on the integration grid

    log_volume holds log |phi_1 ^ ... ^ phi_d|^2.
    """

    d: int
    times: np.ndarray
    log_volume: np.ndarray
    trace_QLQ: np.ndarray
    trace_d: np.ndarray
    trace_integral: np.ndarray
    trace_d_integral: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(s) for s in (self.times, self.log_volume, self.trace_QLQ, self.trace_d,
                                    self.trace_integral, self.trace_d_integral)}
        if len(lengths) != 1:
            raise DimensionMismatchError(f"VolumeTrace series lengths differ: {sorted(lengths)}")

    @property
    def bound_rhs(self) -> np.ndarray:
        """Upper bound for log_volume from the d-trace integral"""
        return self.log_volume[0] + 2.0 * self.trace_d_integral

    def __len__(self) -> int:
        return len(self.times)

    def columns(self) -> List[str]:
        return ["time", "log_volume", "trace_QLQ", "trace_d", "bound_rhs"]


# Report Models
class VolumeBoundCheck(BaseModel):
    holds: bool
    slack: float = Field(..., description="integral of Tr_d minus log omega_d(U(T,0))")
    log_omega: float
    trace_d_integral: float
    d: int


class SplittingHypothesis(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    alpha: float = Field(..., gt=0)
    K: np.ndarray
    C_K: Optional[float] = Field(None, description="None selects the tightest admissible constant")


class TheoremBound(BaseModel):
    log_bound: float
    d: int
    T: float
    c: float
    alpha: float
    C_K: float
    rate: float = Field(..., description="c C_K - alpha d / (2c)")
    minimal_d: int
    t0: Optional[float] = Field(None, description="time after which omega_d <= 1/2; None when the rate is >= 0")
    hypothesis_slack: float = Field(..., description="max over sampled t of lambda_max(M(t) + alpha - K), <= 0 when it holds")


class SandwichPoint(BaseModel):
    time: float
    lower: float
    value: float
    upper: float


class LyapunovResult(BaseModel):
    exponents: List[float]
    kaplan_yorke: float
    T: float
    reorth_every: int
