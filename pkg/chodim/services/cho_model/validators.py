#!/usr/bin/env python3
"""
Structural checks on the nonlinearity f
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from chodim.services.cho_model.models import Nonlinearity

SAMPLE_RANGE = 10.0
SAMPLE_POINTS = 4096


class NonlinearityReport(BaseModel):
    """Sampled constants of the dissipativity and growth conditions"""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    L: float = Field(description="Witnessed constant in F(u) <= L f(u) u + K u^2")
    K: float
    C: float = Field(description="Witnessed constant in |f''(u)| <= C (1 + |u|^(3 - kappa))")
    kappa: float
    violations: List[str] = Field(default_factory=list)
    violation_point: Optional[float] = None


def validate_nonlinearity(nl: Nonlinearity, u_max: float = SAMPLE_RANGE, n_points: int = SAMPLE_POINTS) -> NonlinearityReport:
    """Sample the sign, antiderivative and growth conditions on [-u_max, u_max]

    Never raises; failures are listed in the report.
    """
    u = np.linspace(-u_max, u_max, n_points)
    u = u[u != 0.0]
    fu = nl.f(u) * u
    F = nl.F(u)
    violations = []
    violation_point = None

    negative = fu < 0
    if negative.any():
        violation_point = float(u[np.argmax(negative)])
        violations.append(f"f(u) u < 0 at u = {violation_point:.6g}")

    positive = fu > 0
    L = float(np.max(F[positive] / fu[positive])) if positive.any() else 0.0
    L = max(L, 0.0)
    K = float(max(0.0, np.max((F - L * fu) / u ** 2)))

    fpp = np.abs(nl.fpp(u))
    C = float(np.max(fpp / (1.0 + np.abs(u) ** (3.0 - nl.kappa))))
    if not np.isfinite(C):
        violations.append("f'' is not finite on the sample grid")
    if not 0.0 < nl.kappa <= 3.0:
        violations.append(f"growth exponent kappa = {nl.kappa:g} outside (0, 3]")

    return NonlinearityReport(
        name=nl.name, passed=not violations, L=L, K=K, C=C, kappa=nl.kappa,
        violations=violations, violation_point=violation_point,
    )
