# Time-dependent energy metric, splitting and the dimension pipeline
from chodim.services.metric3.models import (
    MetricParams, SplittingReport, TraceCurves, DimensionReport, DISCRETE_CONSTANTS_NOTE,
)
from chodim.services.metric3.service import (
    MetricAssembler, cutoff_field, metric_norm, m_form, equivalence_constants, compact_form_spectrum,
    tune_metric_params, splitting_estimate, splitting_slack, trace_d_along, metric_energy_residual,
)
from chodim.services.metric3.validators import SplittingValidator, validate_splitting
from chodim.services.metric3.dimension import dimension_bound, dimension_pipeline
from chodim.services.metric3.repository import (
    write_dimension_report, read_dimension_report, write_trace_curves_csv, read_trace_curves_csv,
)

__all__ = [
    "MetricParams", "SplittingReport", "TraceCurves", "DimensionReport", "DISCRETE_CONSTANTS_NOTE",
    "MetricAssembler", "cutoff_field", "metric_norm", "m_form", "equivalence_constants",
    "compact_form_spectrum", "tune_metric_params", "splitting_estimate", "splitting_slack",
    "trace_d_along", "metric_energy_residual", "SplittingValidator", "validate_splitting",
    "dimension_bound", "dimension_pipeline", "write_dimension_report", "read_dimension_report",
    "write_trace_curves_csv", "read_trace_curves_csv",
]
