"""Finite-difference solver checks against the closed-form donor model."""

from __future__ import annotations

from dataclasses import dataclass

from .hydrogenic import build_donor_model
from .materials import material_at
from .radial_oracle import (
    RadialGrid,
    default_harmonic_grid,
    distinct_levels,
    expected_radius,
    solve_coulomb,
    solve_harmonic,
)

REFERENCE_COMPOSITIONS = (0.0, 0.25, 0.3)


@dataclass(frozen=True)
class Check:
    name: str
    x: float
    value: float
    expected: float
    tolerance: float  # relative

    @property
    def rel_error(self) -> float:
        return abs(self.value - self.expected) / abs(self.expected)

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "x": self.x,
            "value": self.value,
            "expected": self.expected,
            "rel_error": self.rel_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def verify_material(x: float, grid_points: int | None = None) -> list[Check]:
    """Oracle checks for one composition.

    Raises :class:`~donorqho.radial_oracle.ConvergenceError` when the grid
    is too coarse.
    """
    mat = material_at(x)
    model = build_donor_model(mat)
    cgrid = RadialGrid.for_material(mat, grid_points) if grid_points else None
    hgrid = default_harmonic_grid(model, grid_points) if grid_points else None

    s1, s2 = solve_coulomb(mat, cgrid, l=0, n_states=2)
    shells = distinct_levels(solve_harmonic(model, hgrid, l_max=2), 1e-3 * model.dE)
    checks = [
        Check("coulomb_ground_meV", x, s1.energy, model.E1, 5e-3),
        Check("coulomb_2s_meV", x, s2.energy, model.E1 / 4.0, 1e-2),
        Check("mean_radius_nm", x, expected_radius(s1), model.R_cloud, 1e-2),
        Check("harmonic_lowest_meV", x, shells[0].energy, 1.5 * model.dE, 5e-3),
    ]
    for i, (a, b) in enumerate(zip(shells, shells[1:])):
        checks.append(Check(f"harmonic_spacing_{i}_meV", x, b.energy - a.energy, model.dE, 5e-3))
    for i, shell in enumerate(shells):
        expected = (i + 1) * (i + 2) // 2
        checks.append(Check(f"harmonic_multiplicity_{i}", x, shell.multiplicity, expected, 0.0))
    return checks


def verify_all(xs=REFERENCE_COMPOSITIONS, grid_points: int | None = None) -> list[Check]:
    out: list[Check] = []
    for x in xs:
        out.extend(verify_material(x, grid_points))
    return out
