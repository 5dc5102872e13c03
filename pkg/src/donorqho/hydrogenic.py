"""Closed-form hydrogenic donor and its harmonic-oscillator ladder."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .materials import (
    E_CHARGE,
    E_H_MEV,
    EPS0,
    HBAR,
    MEV,
    NM,
    R_H_NM,
    MaterialParams,
)

CLOUD_RADIUS_FACTOR = 1.5  # <r> of the 1s state in units of R1


def binding_energy(mat: MaterialParams) -> float:
    """Donor ground-state energy E1 = (m*/m_e) E_H / eps_r**2, in meV (negative)."""
    return mat.m_eff_ratio * E_H_MEV / mat.eps_r**2


def bohr_radius(mat: MaterialParams) -> float:
    """Effective Bohr radius R1 = eps_r (m_e/m*) R_H, in nm."""
    return mat.eps_r * R_H_NM / mat.m_eff_ratio


def spring_constant(mat: MaterialParams, radius_nm: float) -> float:
    """Hooke constant e^2 / (4 pi eps_r eps0 R^3) in N/m for a cloud of radius R."""
    r = radius_nm * NM
    return E_CHARGE**2 / (4.0 * math.pi * mat.eps_r * EPS0 * r**3)


@dataclass(frozen=True)
class DonorModel:
    material: MaterialParams
    E1: float  # meV
    R1: float  # nm
    R_cloud: float  # nm
    k_spring: float  # N/m
    omega0: float  # rad/s
    dE: float  # meV

    def to_dict(self) -> dict:
        return {
            "material": self.material.to_dict(),
            "E1_meV": self.E1,
            "R1_nm": self.R1,
            "R_cloud_nm": self.R_cloud,
            "k_spring_N_per_m": self.k_spring,
            "omega0_rad_per_s": self.omega0,
            "dE_meV": self.dE,
        }


def build_donor_model(mat: MaterialParams) -> DonorModel:
    r1 = bohr_radius(mat)
    r_cloud = CLOUD_RADIUS_FACTOR * r1
    k = spring_constant(mat, r_cloud)
    omega0 = math.sqrt(k / mat.m_eff)
    return DonorModel(
        material=mat,
        E1=binding_energy(mat),
        R1=r1,
        R_cloud=r_cloud,
        k_spring=k,
        omega0=omega0,
        dE=HBAR * omega0 / MEV,
    )


class ForceResult(NamedTuple):
    force: np.ndarray  # N
    beyond_linear: bool


def restoring_force(model: DonorModel, displacement: Sequence[float]) -> ForceResult:
    """Restoring force on the displaced electron cloud, F = -k r.

    ``displacement`` is a 3-vector in nm.  The linear force law only holds
    inside the cloud; past ``R_cloud`` the value is still returned but
    ``beyond_linear`` is set.
    """
    r = np.asarray(displacement, dtype=float)
    if r.shape != (3,):
        raise ValueError("displacement must be a 3-vector")
    force = -model.k_spring * r * NM
    return ForceResult(force, bool(np.linalg.norm(r) > model.R_cloud))


def harmonic_potential(model: DonorModel, r):
    """Parabolic potential k r^2 / 2 in meV at radial displacement r (nm)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radial displacement must be non-negative")
    v = 0.5 * model.k_spring * (r * NM) ** 2 / MEV
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class QhoLadder:
    levels: tuple[float, ...]  # meV above the parabolic minimum
    dE: float  # meV

    def __len__(self):
        return len(self.levels)

    def to_dict(self) -> dict:
        return {"levels_meV": list(self.levels), "dE_meV": self.dE}


def ladder_levels(dE: float, n_levels: int) -> QhoLadder:
    """Ladder [0, 1.5 dE, 2.5 dE, ...] for a given spacing."""
    if int(n_levels) != n_levels or n_levels < 1:
        raise ValueError(f"n_levels must be a positive integer, got {n_levels}")
    if not dE > 0:
        raise ValueError("level spacing must be positive")
    levels = [0.0] + [(n + 0.5) * dE for n in range(1, int(n_levels))]
    return QhoLadder(levels=tuple(levels), dE=dE)


def build_ladder(model: DonorModel, n_levels: int) -> QhoLadder:
    """Level ladder measured from the potential minimum.

    Level 0 is the lowest hydrogen-like orbital sitting at the minimum; the
    first harmonic state lies 3/2 hbar*omega0 above it and the rest follow
    at hbar*omega0 spacing.
    """
    return ladder_levels(model.dE, n_levels)


class IsolationResult(NamedTuple):
    mean_spacing: float  # nm
    isolated: bool


def isolation_check(model: DonorModel, sheet_density: float) -> IsolationResult:
    """Mean donor spacing for a sheet density (cm^-2) against 2*R1."""
    if not sheet_density > 0:
        raise ValueError(f"sheet density must be positive, got {sheet_density}")
    spacing_nm = sheet_density**-0.5 * 1e7
    return IsolationResult(spacing_nm, spacing_nm > 2.0 * model.R1)
