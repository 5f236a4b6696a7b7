# Discretized hyperbolic Cahn-Hilliard-Oono model
from chodim.services.cho_model.models import (
    GridSpec, NonlinearitySpec, ForcingMode, ForcingSpec, Nonlinearity, SpectralField, State, PhysParams,
)
from chodim.services.cho_model.basis import SpectralBasis, get_basis
from chodim.services.cho_model.validators import NonlinearityReport, validate_nonlinearity
from chodim.services.cho_model.service import (
    ChoModel, Stepper, Trajectory, DissipationReport, AttractorSample, QuasidifferentialReport,
    simulate, dissipation_monitor, random_smooth_state, forcing_field, build_phys_params,
    attractor_sample, apply_mode_blocks, tangent_linear_flow, tangent_propagator, tangent_energy_residual,
    quasidifferential_test,
    sobolev_norm, energy, energy_space_norm, rhs, tangent_rhs, tangent_generator, step,
)
from chodim.services.cho_model.repository import (
    write_snapshot, read_snapshot, write_trajectory_csv, read_trajectory_csv,
)

__all__ = [
    "GridSpec", "NonlinearitySpec", "ForcingMode", "ForcingSpec", "Nonlinearity", "SpectralField", "State",
    "PhysParams", "SpectralBasis", "get_basis", "NonlinearityReport", "validate_nonlinearity",
    "ChoModel", "Stepper", "Trajectory", "DissipationReport", "AttractorSample", "QuasidifferentialReport",
    "simulate", "dissipation_monitor", "random_smooth_state", "forcing_field", "build_phys_params",
    "attractor_sample", "apply_mode_blocks", "tangent_linear_flow", "tangent_propagator", "tangent_energy_residual",
    "quasidifferential_test",
    "sobolev_norm", "energy", "energy_space_norm", "rhs", "tangent_rhs", "tangent_generator", "step",
    "write_snapshot", "read_snapshot", "write_trajectory_csv", "read_trajectory_csv",
]
