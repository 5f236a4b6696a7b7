# Frame evolution, Liouville identity and volume-bound pipeline
from chodim.services.liouville.models import (
    LinearFlow, MetricFamily, VolumeTrace, VolumeBoundCheck, SplittingHypothesis,
    TheoremBound, SandwichPoint, LyapunovResult,
)
from chodim.services.liouville.service import (
    REORTH_EVERY, evolve_frame, evolve_frame_metric, liouville_residual, propagator,
    volume_bound_check, theorem_main_bound, tightest_c_k, metric_m_matrix, metric_sandwich,
    lyapunov_spectrum, kaplan_yorke_dimension,
)
from chodim.services.liouville.repository import (
    write_volume_trace_csv, read_volume_trace_csv, write_lyapunov_csv, read_lyapunov_csv,
)

__all__ = [
    "LinearFlow", "MetricFamily", "VolumeTrace", "VolumeBoundCheck", "SplittingHypothesis",
    "TheoremBound", "SandwichPoint", "LyapunovResult",
    "REORTH_EVERY", "evolve_frame", "evolve_frame_metric", "liouville_residual", "propagator",
    "volume_bound_check", "theorem_main_bound", "tightest_c_k", "metric_m_matrix", "metric_sandwich",
    "lyapunov_spectrum", "kaplan_yorke_dimension",
    "write_volume_trace_csv", "read_volume_trace_csv", "write_lyapunov_csv", "read_lyapunov_csv",
]
