"""Hydrogenic donor oscillator in AlGaAs/GaAs and its single-electron-transistor readout."""

from .device_coupling import CouplingConfig, calibrate_lever_arm, coupled_sweep, occupancy, shifted_levels
from .hydrogenic import (
    DonorModel,
    QhoLadder,
    binding_energy,
    bohr_radius,
    build_donor_model,
    build_ladder,
    harmonic_potential,
    isolation_check,
    restoring_force,
)
from .materials import MaterialParams, material_at
from .set_orthodox import SetParams, Trace, current, gate_sweep, stationary_distribution, tunneling_rate
from .trace_analysis import (
    PeakSet,
    capacitance_from_period,
    energy_to_frequency,
    find_peaks,
    import_trace,
    spacing_stats,
)

__version__ = "0.1.0"
