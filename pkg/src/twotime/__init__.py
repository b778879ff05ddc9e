"""Two-body, two-time quantum wavefunctions for a particle and a moving
infinite well, finite well, or barrier.

Exact eigenstates carry separate time labels for the particle (t1) and the
well/barrier (t2); Gaussian superpositions of them give correlated
wavegroups whose joint PDF |Psi(x1, t1, x2, t2)|^2 predicts synchronous and
asynchronous position measurements, including correlated interference and
the measurement-induced splitting of the well/barrier substate.
"""

from .analysis import (FringeReport, Peak, classical_recoil, coherence_length,
                       find_peaks, find_peaks_1d, fringe_spacing, smoothed,
                       two_surface_oscillation_period, type2_visibility)
from .eigen import (BarrierEigenstate, BranchKinematics, ScatteringCoefficients,
                    WellEigenstate, barrier_coefficients, branch_kinematics,
                    solve_coefficients, well_mode_velocity)
from .errors import (DivisionByZeroWidth, InvalidMode, ParseError,
                     SingularMatch, StepTooCoarse, TooFewFringes, TwotimeError,
                     ValidationError, ZeroRelativeMotion)
from .field import (FieldGrid, GridSpec, asynchronous_slice, conservation_grid,
                    conservation_residual, current_snapshot, currents,
                    default_fd_step, joint_pdf, pde_residual, segment_residual,
                    snapshot, snapshot_series)
from .config import RunConfig, load_config, parse_config, preset
from .system import (Channel, CmRelPoint, LabPoint, SystemParams, VelocityPair,
                     channel_wavevectors, from_cm_rel, to_cm_rel)
from .wavegroup import (BarrierWavegroup, BarrierWavegroupConfig,
                        WellWavegroup, WellWavegroupConfig)

__version__ = "0.1.0"

__all__ = [
    "BarrierEigenstate", "BarrierWavegroup", "BarrierWavegroupConfig",
    "BranchKinematics", "Channel", "CmRelPoint", "DivisionByZeroWidth",
    "FieldGrid", "FringeReport", "GridSpec", "InvalidMode", "LabPoint",
    "ParseError", "Peak", "RunConfig", "ScatteringCoefficients",
    "SingularMatch", "StepTooCoarse", "SystemParams", "TooFewFringes",
    "TwotimeError", "ValidationError", "VelocityPair", "WellEigenstate",
    "WellWavegroup", "WellWavegroupConfig", "ZeroRelativeMotion",
    "asynchronous_slice", "barrier_coefficients", "branch_kinematics",
    "channel_wavevectors", "classical_recoil", "coherence_length",
    "conservation_grid", "conservation_residual", "current_snapshot",
    "currents", "default_fd_step", "find_peaks", "find_peaks_1d",
    "fringe_spacing", "from_cm_rel", "joint_pdf", "load_config",
    "parse_config", "pde_residual", "preset", "segment_residual", "smoothed",
    "snapshot", "snapshot_series", "solve_coefficients",
    "two_surface_oscillation_period", "type2_visibility", "to_cm_rel",
    "well_mode_velocity",
]
