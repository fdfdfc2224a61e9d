"""Biaxial nematic frame hydrodynamics on a periodic 2D grid.

A pseudo-spectral solver for an orthonormal-frame liquid-crystal model
coupled to incompressible flow, plus a dyadic (Littlewood-Paley) toolkit
for measuring how fast two nearby solutions separate.
"""

from .spectral import DimensionError, Grid2D
from .frame_algebra import (InvalidFrameError, decompose, frame_determinant,
                            lk_apply, local_basis, orthonormality_defect,
                            reconstruct, tangent_bases, validate_frame)
from .elasticity import (ElasticParams, ParameterError, VariationalForces,
                         body_force, distortion_stress, elastic_density_direct,
                         elastic_density_split, elastic_energy, frame_gradients,
                         split_constants, variational_forces)
from .hydrodynamics import (CoefficientError, EnergyLedger, HydroParams,
                            corotational_rates, energy_report, frame_rhs,
                            kinematics, momentum_rhs, viscous_stress)
from .littlewood_paley import (ConfigurationError, DyadicPartition, TwinDiff,
                               UndefinedRatioError, bernstein_ratio, besov_norm,
                               build_partition, delta_j, h_delta_diag,
                               regularity_functional, s_j, weak_metrics,
                               wj_functional, wj_lower_bound_constant)
from .simulation import (DegeneracyError, DivergenceError, RunResult, SimState,
                         StabilityError, TwinResult, cfl_dt, reorthonormalize,
                         rhs, run, step, twin_metrics, twin_run)
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .config import ConfigError, RunConfig, parse_config, resolve_config

__version__ = "0.1.0"
