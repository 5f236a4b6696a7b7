#!/usr/bin/env python3
"""
Out-of-sample validation of splitting reports
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from chodim.services.cho_model import PhysParams, State
from chodim.services.metric3.models import MetricParams, SplittingReport
from chodim.services.metric3.service import MetricAssembler, splitting_slack


class SplittingValidator:
    """Re-checks a splitting report on directions it was not fitted on"""

    def __init__(self, p: PhysParams, mp: MetricParams, tol: float = 1e-8):
        self.p = p
        self.mp = mp
        self.tol = tol

    def validate(
        self,
        report: SplittingReport,
        samples: Sequence[State],
        n_directions: int = 1000,
        seed: int = 1,
        rates: Optional[Sequence[State]] = None,
    ) -> Tuple[bool, List[str], str]:
        """
        Check C1 |psi_R w|^2 - gamma |xi|^2_E - (M xi, xi) >= -tol |xi|^2_E on fresh random directions

        Returns:
            Tuple of (is_valid, errors, message)
        """
        if not samples:
            return False, ["no samples"], "Nothing to validate"
        assembler = MetricAssembler(samples[0].grid, self.p, self.mp)
        rates = rates if rates is not None else [assembler.rate_of(s) for s in samples]
        K = assembler.compact_matrix()
        rng = np.random.default_rng(seed)
        errors = []
        for i, (base, rate) in enumerate(zip(samples, rates)):
            M = assembler.m_matrix(base, rate)
            probes = rng.standard_normal((M.shape[0], n_directions))
            slack = splitting_slack(M, K, report.gamma, report.C1, probes)
            if slack.min() < -self.tol:
                errors.append(f"sample {i}: slack {slack.min():.3e} on direction {int(np.argmin(slack))}")
        if errors:
            return False, errors, "Splitting inequality fails out of sample"
        return True, [], "Validation passed"


def validate_splitting(
    report: SplittingReport,
    samples: Sequence[State],
    p: PhysParams,
    mp: MetricParams,
    n_directions: int = 1000,
    seed: int = 1,
) -> Tuple[bool, List[str], str]:
    return SplittingValidator(p, mp).validate(report, samples, n_directions, seed)
