"""Gate-tuned donor ladder read out by the SET.

A positive gate voltage pulls the (normally empty) ladder levels down
linearly in V_g until they cross the 2DEG Fermi level and fill one electron
at a time.  Every captured electron shifts the SET island offset charge by
``kappa``, which shows up as a fast feature on top of the ordinary
Coulomb-blockade oscillation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .hydrogenic import QhoLadder
from .materials import K_B_MEV
from .set_orthodox import SetParams, Trace, current, gate_offset, sweep_points


@dataclass(frozen=True)
class CouplingConfig:
    lever_arm: float = 1.0  # meV per mV
    v_threshold: float = 500.0  # mV
    kappa: float = 0.1  # e per captured electron
    fermi_broadening_T: float = 0.3  # K

    def __post_init__(self):
        if not self.lever_arm > 0:
            raise ValueError(f"lever_arm must be positive, got {self.lever_arm}")
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")
        if not np.isfinite(self.v_threshold):
            raise ValueError("v_threshold must be finite")
        if not self.fermi_broadening_T > 0:
            raise ValueError("fermi_broadening_T must be positive")

    def to_dict(self) -> dict:
        return {
            "lever_arm": self.lever_arm,
            "v_threshold": self.v_threshold,
            "kappa": self.kappa,
            "fermi_broadening_T": self.fermi_broadening_T,
        }


@dataclass(frozen=True)
class OccupancyProfile:
    v_g: np.ndarray  # mV
    n_occupied: np.ndarray


def shifted_levels(ladder: QhoLadder, cfg: CouplingConfig, v_g: float) -> np.ndarray:
    """Ladder energies relative to E_f at gate voltage ``v_g`` (meV)."""
    return np.asarray(ladder.levels) + cfg.lever_arm * (cfg.v_threshold - v_g)


def crossing_voltages(ladder: QhoLadder, cfg: CouplingConfig) -> np.ndarray:
    """Gate voltages where each level reaches E_f."""
    return cfg.v_threshold + np.asarray(ladder.levels) / cfg.lever_arm


def occupancy(ladder: QhoLadder, cfg: CouplingConfig, v_g) -> OccupancyProfile:
    """Thermally smeared electron count in the ladder along ``v_g``.

    Levels only move toward E_f for positive bias; at v_g <= 0 the ladder is
    empty.
    """
    v_g = np.atleast_1d(np.asarray(v_g, dtype=float))
    kt = K_B_MEV * cfg.fermi_broadening_T
    levels = np.asarray(ladder.levels)[:, None]
    detuning = levels + cfg.lever_arm * (cfg.v_threshold - v_g[None, :])
    n = expit(-detuning / kt).sum(axis=0)
    n = np.where(v_g > 0, n, 0.0)
    return OccupancyProfile(v_g, n)


def coupled_sweep(
    set_params: SetParams,
    ladder: QhoLadder,
    cfg: CouplingConfig,
    v_ds: float,
    v_g_range: tuple[float, float],
    step: float,
) -> Trace:
    """SET current versus gate voltage with the ladder charge added to q0."""
    if not 0 < step <= 1.0:
        raise ValueError(f"step must be in (0, 1] mV to resolve fast features, got {step}")
    v_g = sweep_points(v_g_range[0], v_g_range[1], step)
    occ = occupancy(ladder, cfg, v_g)
    q0 = gate_offset(set_params, v_g) + cfg.kappa * occ.n_occupied
    y = np.array([current(set_params, v_ds, q) for q in q0])
    meta = {
        "sweep": "gate",
        "coupled": True,
        "v_ds_mV": v_ds,
        "step_mV": step,
        "set": set_params.to_dict(),
        "coupling": cfg.to_dict(),
        "ladder": ladder.to_dict(),
    }
    return Trace(v_g, y, meta)


def calibrate_lever_arm(measured_period: float, dE: float) -> float:
    """Lever arm (meV/mV) mapping a ladder spacing onto an observed gate period."""
    if not measured_period > 0 or not dE > 0:
        raise ValueError("measured period and level spacing must both be positive")
    return dE / measured_period
