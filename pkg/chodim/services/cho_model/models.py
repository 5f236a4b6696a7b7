#!/usr/bin/env python3
"""
Hyperbolic Cahn-Hilliard-Oono model types

Fields are stored in real coordinates over the retained half set of
wavevectors: u_hat_k = (x_re + i x_im) / sqrt(2 vol), so the L^2 norm of a
field is the Euclidean norm of its coordinates.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from chodim.core.exceptions import ConfigurationError, DimensionMismatchError


# Configuration Models
class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(1, ge=1, le=3, description="Spatial dimension")
    N: int = Field(32, description="Modes per axis, a power of two >= 8")
    ell: float = Field(8.0, gt=0, description="Torus period is 2 pi ell")
    dealias: bool = Field(True, description="Pad the quadrature grid for nonlinear products")

    @field_validator("N")
    @classmethod
    def validate_modes(cls, value: int) -> int:
        if value < 8 or value & (value - 1):
            raise ValueError(f"N must be a power of two >= 8, got {value}")
        return value

    @property
    def half_period(self) -> float:
        return math.pi * self.ell

    @property
    def volume(self) -> float:
        return (2.0 * math.pi * self.ell) ** self.n

    @property
    def n_coords(self) -> int:
        """Real coordinates of a mean-zero Nyquist-free field"""
        return (self.N - 1) ** self.n - 1


class NonlinearitySpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Literal["cubic", "power", "linear"] = "cubic"
    p: float = Field(3.0, description="Exponent of the power family")
    lam: float = Field(0.0, ge=0, description="Linear coefficient")

    @model_validator(mode="after")
    def validate_exponent(self) -> "NonlinearitySpec":
        if self.family == "power" and not 1.0 < self.p < 5.0:
            raise ValueError(f"Power family needs 1 < p < 5, got {self.p}")
        return self


class ForcingMode(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    k: List[int]
    amplitude: float
    phase: Literal["cos", "sin"] = "cos"


class ForcingSpec(BaseModel):
    """g(x) = sum of amplitude * cos(k.x / ell) (or sin) over the listed modes"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    modes: List[ForcingMode] = Field(default_factory=list)


@dataclass(frozen=True)
class Nonlinearity:
    """f with its first two derivatives and antiderivative F (F(0) = 0)

    ``degree`` is the polynomial degree of f, None when f is not a polynomial.
    """

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    fp: Callable[[np.ndarray], np.ndarray]
    fpp: Callable[[np.ndarray], np.ndarray]
    F: Callable[[np.ndarray], np.ndarray]
    kappa: float
    degree: Optional[int]

    @classmethod
    def cubic(cls, lam: float = 0.0) -> "Nonlinearity":
        return cls(
            name="cubic",
            f=lambda u: u ** 3 + lam * u,
            fp=lambda u: 3.0 * u ** 2 + lam,
            fpp=lambda u: 6.0 * u,
            F=lambda u: 0.25 * u ** 4 + 0.5 * lam * u ** 2,
            kappa=2.0,
            degree=3,
        )

    @classmethod
    def power(cls, p: float, lam: float = 0.0) -> "Nonlinearity":
        def fpp(u):
            u = np.asarray(u, dtype=float)
            out = np.zeros_like(u)
            nonzero = u != 0
            out[nonzero] = p * (p - 1.0) * np.abs(u[nonzero]) ** (p - 3.0) * u[nonzero]
            return out

        return cls(
            name=f"power(p={p:g})",
            f=lambda u: u * np.abs(u) ** (p - 1.0) + lam * u,
            fp=lambda u: p * np.abs(u) ** (p - 1.0) + lam,
            fpp=fpp,
            F=lambda u: np.abs(u) ** (p + 1.0) / (p + 1.0) + 0.5 * lam * u ** 2,
            kappa=min(3.0, 5.0 - p),
            degree=None,
        )

    @classmethod
    def linear(cls, lam: float = 0.0) -> "Nonlinearity":
        return cls(
            name="linear",
            f=lambda u: lam * u,
            fp=lambda u: lam * np.ones_like(u),
            fpp=lambda u: np.zeros_like(u),
            F=lambda u: 0.5 * lam * u ** 2,
            kappa=3.0,
            degree=1,
        )

    @classmethod
    def from_spec(cls, spec: NonlinearitySpec) -> "Nonlinearity":
        if spec.family == "cubic":
            return cls.cubic(spec.lam)
        if spec.family == "power":
            return cls.power(spec.p, spec.lam)
        return cls.linear(spec.lam)

    @property
    def pad(self) -> int:
        """Quadrature padding factor that keeps every product of the model alias-free"""
        if self.degree is None:
            return 2
        return max(1, math.ceil((self.degree + 1) / 2))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Real mean-zero field on the torus in real Fourier coordinates"""

    grid: GridSpec
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float, copy=True)
        if coords.shape != (self.grid.n_coords,):
            raise DimensionMismatchError(
                f"Field needs {self.grid.n_coords} coordinates, got shape {coords.shape}",
                expected=self.grid.n_coords, actual=coords.size,
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, np.zeros(grid.n_coords))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coords + other.coords)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coords - other.coords)

    def scaled(self, factor: float) -> "SpectralField":
        return SpectralField(self.grid, factor * self.coords)


@dataclass(frozen=True, eq=False)
class State:
    """xi = (u, du/dt) in the energy space"""

    u: SpectralField
    ut: SpectralField

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: GridSpec) -> "State":
        return cls(SpectralField.zeros(grid), SpectralField.zeros(grid))

    @classmethod
    def from_vector(cls, grid: GridSpec, y: np.ndarray) -> "State":
        m = grid.n_coords
        return cls(SpectralField(grid, y[:m]), SpectralField(grid, y[m:]))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.u.coords, self.ut.coords])

    def __add__(self, other: "State") -> "State":
        return State(self.u + other.u, self.ut + other.ut)

    def __sub__(self, other: "State") -> "State":
        return State(self.u - other.u, self.ut - other.ut)

    def scaled(self, factor: float) -> "State":
        return State(self.u.scaled(factor), self.ut.scaled(factor))


@dataclass(frozen=True, eq=False)
class PhysParams:
    """alpha, f and the mean-zero external force g"""

    alpha: float
    nonlinearity: Nonlinearity
    g: SpectralField
    nonlinearity_spec: Optional[NonlinearitySpec] = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
