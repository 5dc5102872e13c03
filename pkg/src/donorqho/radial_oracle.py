"""Finite-difference radial Schrodinger solver.

Used as a brute-force check on the closed forms in :mod:`donorqho.hydrogenic`.
The reduced radial function u(r) = r psi(r) is discretized on a uniform grid
with u(0) = u(r_max) = 0 and a three-point Laplacian; the resulting symmetric
tridiagonal matrix is diagonalized with LAPACK (``stemr`` via scipy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal

from .hydrogenic import DonorModel, bohr_radius
from .materials import E_CHARGE, EPS0, HBAR, MEV, NM, MaterialParams

CONVERGENCE_RTOL = 5e-3
NORM_TOL = 1e-8


class ConvergenceError(RuntimeError):
    """Grid too coarse: energies move by more than the tolerance on refinement."""


@dataclass(frozen=True)
class RadialGrid:
    r_max: float  # nm
    n_points: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.n_points < 3:
            raise ValueError("need at least 3 grid points")

    @property
    def spacing(self) -> float:
        return self.r_max / self.n_points

    @property
    def r(self) -> np.ndarray:
        """Grid nodes from 0 to r_max inclusive."""
        return np.arange(self.n_points + 1) * self.spacing

    def refined(self) -> "RadialGrid":
        return RadialGrid(self.r_max, 2 * self.n_points)

    @classmethod
    def for_material(cls, mat: MaterialParams, n_points: int = 8000, extent: float = 40.0):
        """Grid reaching ``extent`` effective Bohr radii."""
        return cls(extent * bohr_radius(mat), n_points)


@dataclass(frozen=True)
class RadialSolution:
    energy: float  # meV
    r: np.ndarray  # nm, including both end nodes
    u_values: np.ndarray  # normalized so that sum(u^2) dr = 1 (nm^-1/2)
    l: int

    @property
    def norm(self) -> float:
        return float(trapezoid(self.u_values**2, self.r))


def _kinetic_coefficient(mat: MaterialParams) -> float:
    """hbar^2 / 2m* in meV nm^2."""
    return HBAR**2 / (2.0 * mat.m_eff) / MEV / NM**2


def _coulomb_coefficient(mat: MaterialParams) -> float:
    """e^2 / (4 pi eps_r eps0) in meV nm."""
    return E_CHARGE**2 / (4.0 * math.pi * mat.eps_r * EPS0) / MEV / NM


def _solve(grid: RadialGrid, c_kin: float, potential, l: int, n_states: int):
    h = grid.spacing
    r = grid.r[1:-1]
    v = potential(r) + c_kin * l * (l + 1) / r**2
    diag = 2.0 * c_kin / h**2 + v
    off = np.full(r.size - 1, -c_kin / h**2)
    w, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_states - 1))
    return w, vecs


def _solutions(grid, c_kin, potential, l, n_states, check=True) -> list[RadialSolution]:
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    if l < 0:
        raise ValueError("l must be >= 0")
    energies, vecs = _solve(grid, c_kin, potential, l, n_states)
    if check:
        fine, _ = _solve(grid.refined(), c_kin, potential, l, n_states)
        shift = np.abs(fine - energies) / np.abs(fine)
        if np.any(shift > CONVERGENCE_RTOL):
            worst = int(np.argmax(shift))
            raise ConvergenceError(
                f"state {worst} (l={l}) moved by {shift[worst]:.2%} on grid refinement "
                f"(n_points={grid.n_points}); use a finer grid"
            )
    h = grid.spacing
    out = []
    for k in range(n_states):
        u = np.zeros(grid.n_points + 1)
        u[1:-1] = vecs[:, k]
        u /= math.sqrt(np.sum(u**2) * h)
        if u[np.argmax(np.abs(u))] < 0:
            u = -u
        out.append(RadialSolution(float(energies[k]), grid.r, u, l))
    return out


def solve_coulomb(
    mat: MaterialParams,
    grid: RadialGrid | None = None,
    l: int = 0,
    n_states: int = 1,
    check: bool = True,
) -> list[RadialSolution]:
    """Lowest ``n_states`` bound states of the screened Coulomb problem.

    Energies ascend.  With ``check`` set the solve is repeated on a grid of
    twice the resolution and :class:`ConvergenceError` is raised when any
    energy moves by more than 0.5%.
    """
    grid = grid or RadialGrid.for_material(mat)
    c = _coulomb_coefficient(mat)
    return _solutions(grid, _kinetic_coefficient(mat), lambda r: -c / r, l, n_states, check)


def expected_radius(sol: RadialSolution) -> float:
    """<r> = integral r |u|^2 dr in nm."""
    norm = sol.norm
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"solution is not normalized (norm = {norm!r})")
    return float(trapezoid(sol.r * sol.u_values**2, sol.r))


class HarmonicLevel(NamedTuple):
    energy: float  # meV above the parabolic minimum
    l: int


def oscillator_length(model: DonorModel) -> float:
    """sqrt(hbar / m* omega0) in nm."""
    return math.sqrt(HBAR / (model.material.m_eff * model.omega0)) / NM


def default_harmonic_grid(model: DonorModel, n_points: int = 4000) -> RadialGrid:
    return RadialGrid(max(10.0 * model.R1, 12.0 * oscillator_length(model)), n_points)


def solve_harmonic(
    model: DonorModel,
    grid: RadialGrid | None = None,
    l_max: int = 2,
    n_states: int | None = None,
    check: bool = True,
) -> list[HarmonicLevel]:
    """Spectrum of the isotropic parabolic well k r^2 / 2, merged over l.

    Each l in 0..l_max is solved for ``n_states`` radial states.  The merged
    list is cut below the lowest l_max + 1 state and below the top computed
    state of every l, so every level returned belongs to a complete shell.
    """
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    if n_states is None:
        n_states = l_max // 2 + 2
    grid = grid or default_harmonic_grid(model)
    mat = model.material
    c_kin = _kinetic_coefficient(mat)
    half_k = 0.5 * model.k_spring * NM**2 / MEV  # meV / nm^2

    def potential(r):
        return half_k * r**2

    merged: list[HarmonicLevel] = []
    cutoff = math.inf
    for l in range(l_max + 1):
        sols = _solutions(grid, c_kin, potential, l, n_states, check)
        merged.extend(HarmonicLevel(s.energy, l) for s in sols)
        cutoff = min(cutoff, sols[-1].energy)
    cap = _solutions(grid, c_kin, potential, l_max + 1, 1, check)[0].energy
    cutoff = min(cutoff, cap)

    top = max(lv.energy for lv in merged)
    turning = math.sqrt(top / half_k)
    if grid.r_max < turning + 4.0 * oscillator_length(model):
        raise ConvergenceError(
            f"r_max = {grid.r_max:.3g} nm does not cover the turning point "
            f"{turning:.3g} nm of the highest state"
        )
    tol = 1e-3 * abs(cutoff)
    merged = [lv for lv in merged if lv.energy < cutoff - tol]
    merged.sort()
    return merged


class DistinctLevel(NamedTuple):
    energy: float
    multiplicity: int  # counts the 2l+1 magnetic substates


def distinct_levels(levels: list[HarmonicLevel], tol: float) -> list[DistinctLevel]:
    """Group sorted levels closer than ``tol`` (meV) into degenerate shells."""
    groups: list[list[HarmonicLevel]] = []
    for lv in sorted(levels):
        if groups and lv.energy - groups[-1][-1].energy <= tol:
            groups[-1].append(lv)
        else:
            groups.append([lv])
    return [
        DistinctLevel(float(np.mean([g.energy for g in grp])), sum(2 * g.l + 1 for g in grp))
        for grp in groups
    ]
