"""Physical constants and Al(x)Ga(1-x)As material parameters.

Internal unit convention used across the package: energies in meV, lengths
in nm, capacitances in aF, voltages in mV, temperatures in K.  Conversion to
SI happens inside the formula evaluations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

# CODATA 2018 (SI)
HBAR = 1.054_571_817e-34  # J s
H_PLANCK = 6.626_070_15e-34  # J s
E_CHARGE = 1.602_176_634e-19  # C
EPS0 = 8.854_187_8128e-12  # F/m
M_ELECTRON = 9.109_383_7015e-31  # kg
K_BOLTZMANN = 1.380_649e-23  # J/K

MEV = 1.0e-3 * E_CHARGE  # J per meV
NM = 1.0e-9
AF = 1.0e-18
MV = 1.0e-3
KOHM = 1.0e3
PA = 1.0e-12

K_B_MEV = K_BOLTZMANN / MEV  # meV/K

# Hydrogen ionization energy (negative, as a bound-state energy) and Bohr radius.
E_H_MEV = -M_ELECTRON * E_CHARGE**4 / (32.0 * math.pi**2 * EPS0**2 * HBAR**2) / MEV
R_H_NM = 4.0 * math.pi * EPS0 * HBAR**2 / (M_ELECTRON * E_CHARGE**2) / NM


@dataclass(frozen=True)
class PhysConstants:
    hbar: float = HBAR
    e_charge: float = E_CHARGE
    eps0: float = EPS0
    m_electron: float = M_ELECTRON
    k_boltzmann: float = K_BOLTZMANN
    E_H: float = E_H_MEV * 1e-3  # eV
    R_H: float = R_H_NM * NM  # m


CONSTANTS = PhysConstants()

X_MAX = 0.45  # direct-gap limit

# Linear fits through the GaAs, Al0.25 and Al0.3 points.
EPS_R_GAAS = 12.90
EPS_R_SLOPE = -2.84
M_EFF_GAAS = 0.063
M_EFF_SLOPE = 0.083


class MaterialError(ValueError):
    """Invalid material composition or parameters."""


@dataclass(frozen=True)
class MaterialParams:
    x: float
    eps_r: float
    m_eff_ratio: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise MaterialError(f"alloy fraction x={self.x} outside [0, 1]")
        if not self.eps_r > 1.0:
            raise MaterialError(f"eps_r={self.eps_r} must be > 1")
        if not 0.0 < self.m_eff_ratio < 1.0:
            raise MaterialError(f"m_eff_ratio={self.m_eff_ratio} must lie in (0, 1)")

    @property
    def m_eff(self) -> float:
        """Effective mass in kg."""
        return self.m_eff_ratio * M_ELECTRON

    @property
    def label(self) -> str:
        if self.x == 0.0:
            return "GaAs"
        return f"Al{self.x:g}Ga{1.0 - self.x:g}As"

    def to_dict(self) -> dict:
        return {"x": self.x, "eps_r": self.eps_r, "m_eff_ratio": self.m_eff_ratio}


def material_at(
    x: float,
    eps_r0: float = EPS_R_GAAS,
    eps_r_slope: float = EPS_R_SLOPE,
    m0: float = M_EFF_GAAS,
    m_slope: float = M_EFF_SLOPE,
) -> MaterialParams:
    """Material parameters of Al(x)Ga(1-x)As from linear interpolation in x.

    Only the direct-gap range 0 <= x <= 0.45 is accepted.  The default
    coefficients reproduce eps_r = 12.90/12.19/12.05 and
    m*/m_e = 0.063/0.084/0.088 at x = 0/0.25/0.3 to within 0.5%.
    """
    x = float(x)
    if not (0.0 <= x <= X_MAX) or math.isnan(x):
        raise MaterialError(f"alloy fraction x={x} outside valid interval [0, {X_MAX}]")
    return MaterialParams(x=x, eps_r=eps_r0 + eps_r_slope * x, m_eff_ratio=m0 + m_slope * x)


def load_material_file(path: str | Path) -> MaterialParams:
    """Read a JSON material override with fields ``x``, ``eps_r``, ``m_eff_ratio``.

    ``x`` alone falls back to :func:`material_at`; explicit ``eps_r`` and
    ``m_eff_ratio`` override the interpolation.
    """
    with open(path) as fh:
        data = json.load(fh)
    return material_from_mapping(data)


def material_from_mapping(data: dict) -> MaterialParams:
    allowed = {"x", "eps_r", "m_eff_ratio"}
    unknown = set(data) - allowed
    if unknown:
        raise MaterialError(f"unknown material key(s): {', '.join(sorted(unknown))}")
    if "eps_r" in data or "m_eff_ratio" in data:
        if "eps_r" not in data or "m_eff_ratio" not in data:
            raise MaterialError("explicit material needs both 'eps_r' and 'm_eff_ratio'")
        return MaterialParams(
            x=float(data.get("x", 0.0)),
            eps_r=float(data["eps_r"]),
            m_eff_ratio=float(data["m_eff_ratio"]),
        )
    if "x" not in data:
        raise MaterialError("material needs 'x' or explicit 'eps_r'/'m_eff_ratio'")
    return material_at(data["x"])
