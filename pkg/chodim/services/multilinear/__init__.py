# Exterior-algebra engine: wedge volumes, traces, volume expansion factors
from chodim.services.multilinear.models import (
    DenseOperator, VectorFrame, GramMatrix, InnerProduct, TOL_PSD, TOL_RANK,
)
from chodim.services.multilinear.service import (
    gram, wedge_norm, log_wedge_norm, gram_orthogonalize, orthogonalize_with_pivots,
    omega_d, lambda_d_apply, trace_form, projected_trace, projector, mu_spectrum,
    trace_d, symmetric_part, form_sqrt, random_orthonormal_frame, sampled_omega_d,
    generalized_trace_d, generalized_spectrum,
)
from chodim.services.multilinear.validators import MultilinearValidator, equivalence_constant

__all__ = [
    "DenseOperator", "VectorFrame", "GramMatrix", "InnerProduct", "TOL_PSD", "TOL_RANK",
    "gram", "wedge_norm", "log_wedge_norm", "gram_orthogonalize", "orthogonalize_with_pivots",
    "omega_d", "lambda_d_apply", "trace_form", "projected_trace", "projector", "mu_spectrum",
    "trace_d", "symmetric_part", "form_sqrt", "random_orthonormal_frame", "sampled_omega_d",
    "generalized_trace_d", "generalized_spectrum", "MultilinearValidator", "equivalence_constant",
]
