#!/usr/bin/env python3
"""
Validation helpers for frames, Gram matrices and form equivalence
"""

from typing import List, Tuple

import numpy as np
import scipy.linalg

from chodim.services.multilinear.models import GramMatrix, InnerProduct, TOL_PSD


def equivalence_constant(form_a: InnerProduct, form_b: InnerProduct) -> float:
    """Smallest c with c^{-1}|x|_a^2 <= |x|_b^2 <= c|x|_a^2"""
    values = scipy.linalg.eigh(form_b.dense(), form_a.dense(), eigvals_only=True)
    return float(max(values.max(), 1.0 / values.min(), 1.0))


class MultilinearValidator:
    """Validation helpers for exterior-algebra inputs"""

    def validate_gram(self, G: GramMatrix, tol: float = TOL_PSD) -> Tuple[bool, List[str], str]:
        """
        Validate that a Gram matrix is positive semidefinite

        Returns:
            Tuple of (is_valid, errors, message)
        """
        lam_min = float(np.linalg.eigvalsh(G.entries).min())
        if lam_min < -tol:
            return False, [f"smallest eigenvalue {lam_min:.3e} < -{tol:.1e}"], "Gram matrix is not PSD"
        return True, [], "Validation passed"

    def validate_equivalence(
        self, form_a: InnerProduct, form_b: InnerProduct, c: float
    ) -> Tuple[bool, List[str], str]:
        """
        Check c^{-1}|x|_a^2 <= |x|_b^2 <= c|x|_a^2 through the generalized spectrum

        Returns:
            Tuple of (is_valid, errors, message)
        """
        if form_a.dim != form_b.dim:
            return False, [f"dimensions {form_a.dim} and {form_b.dim} differ"], "Forms are incomparable"
        needed = equivalence_constant(form_a, form_b)
        if needed > c * (1.0 + 1e-12):
            return False, [f"equivalence needs c = {needed:.6g} > {c:.6g}"], "Equivalence constant too small"
        return True, [], "Validation passed"
