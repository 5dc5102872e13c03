"""Orthodox-theory single-electron transistor.

Sequential tunneling through two junctions onto a metallic island, solved as
a stationary master equation over island charge states.  The island is
treated in the normal state.

Sign conventions
----------------
``n`` counts excess electrons on the island.  ``q0`` is the offset charge in
units of e induced by the gate (and any other polarizing source); positive
``q0`` favours adding electrons.  ``v_ds`` is the drain potential minus the
source potential, applied symmetrically (source at -v_ds/2, drain at
+v_ds/2).  Positive current is conventional current from drain to source,
i.e. electrons leaving the island through the drain, so I > 0 for v_ds > 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .materials import AF, E_CHARGE, K_B_MEV, KOHM, MEV, PA

SOURCE, DRAIN = "source", "drain"
ON, OFF = "on", "off"  # electron tunnels onto / off the island

BOUNDARY_TOL = 1e-8
HALF_WINDOW = 5


class NumericalError(RuntimeError):
    """Stationary master equation could not be solved reliably."""


@dataclass(frozen=True)
class SetParams:
    c_source: float  # aF
    c_drain: float  # aF
    c_gate: float  # aF
    r_source: float  # kOhm
    r_drain: float  # kOhm
    temperature: float  # K

    def __post_init__(self):
        for name in ("c_source", "c_drain", "c_gate", "r_source", "r_drain", "temperature"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.charging_energy <= K_B_MEV * self.temperature:
            warnings.warn(
                f"charging energy {self.charging_energy:.4g} meV does not exceed "
                f"k_B T = {K_B_MEV * self.temperature:.4g} meV; blockade will be washed out",
                stacklevel=2,
            )

    @property
    def c_total(self) -> float:
        return self.c_source + self.c_drain + self.c_gate

    @property
    def charging_energy(self) -> float:
        """E_C = e^2 / 2 C_total in meV."""
        return charging_energy(self.c_total)

    @property
    def gate_period(self) -> float:
        """Coulomb-blockade gate period e / C_g in mV."""
        return E_CHARGE / (self.c_gate * AF) / 1e-3

    @classmethod
    def symmetric(cls, c_total: float, c_gate: float, r_total: float, temperature: float):
        """Symmetric junctions sharing ``c_total - c_gate`` and ``r_total`` equally."""
        c_j = (c_total - c_gate) / 2.0
        return cls(c_j, c_j, c_gate, r_total / 2.0, r_total / 2.0, temperature)

    def to_dict(self) -> dict:
        return {
            "c_source": self.c_source,
            "c_drain": self.c_drain,
            "c_gate": self.c_gate,
            "r_source": self.r_source,
            "r_drain": self.r_drain,
            "temperature": self.temperature,
        }


def charging_energy(c_total_af: float) -> float:
    """e^2 / 2C in meV for a capacitance in aF."""
    return E_CHARGE**2 / (2.0 * c_total_af * AF) / MEV


def tunneling_rate(dF, r_junction: float, temperature: float):
    """Golden-rule rate (1/s) for a tunnel event with free-energy change dF (meV).

    Gamma = (-dF) / (e^2 R (1 - exp(dF / k_B T))).  Negative dF is downhill.
    Evaluated as kT/(e^2 R) * x / expm1(x) with x = -dF/kT, which is finite at
    dF = 0 and does not overflow for |dF| >> kT.
    """
    if not r_junction > 0 or not temperature > 0:
        raise ValueError("junction resistance and temperature must be positive")
    kt = K_B_MEV * temperature
    x = -np.asarray(dF, dtype=float) / kt
    prefactor = kt * MEV / (E_CHARGE**2 * r_junction * KOHM)
    with np.errstate(over="ignore"):
        ax = np.abs(x)
        small = ax < 1e-8
        # x/(1-e^-x) for x>0 and |x| e^-|x|/(1-e^-|x|) for x<0
        safe = np.where(small, 1.0, ax)
        g = np.where(x > 0, safe / -np.expm1(-safe), safe * np.exp(-safe) / -np.expm1(-safe))
        g = np.where(small, 1.0 + 0.5 * x, g)
    out = prefactor * g
    return float(out) if out.ndim == 0 else out


def _lead_potentials(v_ds):
    return -0.5 * v_ds, 0.5 * v_ds


def _total_offset(params: SetParams, v_ds, q0):
    """Polarization charge (units of e) from gate offset plus both leads."""
    v_s, v_d = _lead_potentials(v_ds)
    return q0 + (params.c_source * v_s + params.c_drain * v_d) * AF * 1e-3 / E_CHARGE


def free_energy_change(params: SetParams, n, junction: str, direction: str, v_ds, q0):
    """Free-energy change (meV) when one electron crosses ``junction``.

    ``direction`` is ``"on"`` (lead to island, n -> n+1) or ``"off"``
    (island to lead, n -> n-1).  Broadcasts over ``n``.
    """
    ec = params.charging_energy
    q = _total_offset(params, v_ds, q0)
    v_s, v_d = _lead_potentials(v_ds)
    if junction == SOURCE:
        v_lead = v_s
    elif junction == DRAIN:
        v_lead = v_d
    else:
        raise ValueError(f"junction must be 'source' or 'drain', got {junction!r}")
    n = np.asarray(n, dtype=float)
    # e*V in meV equals V in mV for one electron charge
    if direction == ON:
        out = 2.0 * ec * (n + 0.5 - q) + v_lead
    elif direction == OFF:
        out = -2.0 * ec * (n - 0.5 - q) - v_lead
    else:
        raise ValueError(f"direction must be 'on' or 'off', got {direction!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ChargeStateDistribution:
    n_min: int
    n_max: int
    probabilities: np.ndarray = field(repr=False)

    @property
    def states(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def mean(self) -> float:
        return float(np.dot(self.states, self.probabilities))

    def prob(self, n: int) -> float:
        if self.n_min <= n <= self.n_max:
            return float(self.probabilities[n - self.n_min])
        return 0.0


def _rates(params: SetParams, states, v_ds, q0):
    t = params.temperature
    return {
        (j, d): tunneling_rate(
            free_energy_change(params, states, j, d, v_ds, q0),
            params.r_source if j == SOURCE else params.r_drain,
            t,
        )
        for j in (SOURCE, DRAIN)
        for d in (ON, OFF)
    }


def _solve_window(params, n_min, n_max, v_ds, q0):
    states = np.arange(n_min, n_max + 1)
    rates = _rates(params, states, v_ds, q0)
    up = rates[SOURCE, ON] + rates[DRAIN, ON]
    down = rates[SOURCE, OFF] + rates[DRAIN, OFF]
    size = states.size
    # generator: column k holds outflow from state k
    m = np.zeros((size, size))
    idx = np.arange(size)
    m[idx[:-1] + 1, idx[:-1]] += up[:-1]
    m[idx[1:] - 1, idx[1:]] += down[1:]
    m[idx, idx] -= up * (idx < size - 1) + down * (idx > 0)
    # Row scaling keeps the system well conditioned when rates span decades.
    scale = np.max(np.abs(m))
    if not np.isfinite(scale) or scale == 0.0:
        raise NumericalError(f"degenerate rate matrix (max |rate| = {scale}) at q0={q0}, v_ds={v_ds}")
    a = m / scale
    a[-1, :] = 1.0
    b = np.zeros(size)
    b[-1] = 1.0
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericalError(
            f"ill-conditioned master equation (cond = {cond:.3g}) for window "
            f"[{n_min}, {n_max}] at q0={q0}, v_ds={v_ds}"
        )
    p = np.linalg.solve(a, b)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    return p, rates


def stationary_distribution(params: SetParams, v_ds: float, q0: float) -> ChargeStateDistribution:
    """Stationary island charge distribution.

    The window starts at +-5 states around the electrostatically preferred
    charge and grows until both boundary probabilities fall below 1e-8.
    """
    center = int(round(_total_offset(params, v_ds, q0)))
    half = HALF_WINDOW
    for _ in range(20):
        n_min, n_max = center - half, center + half
        p, _ = _solve_window(params, n_min, n_max, v_ds, q0)
        if p[0] < BOUNDARY_TOL and p[-1] < BOUNDARY_TOL:
            return ChargeStateDistribution(n_min, n_max, p)
        half *= 2
    raise NumericalError(f"charge window did not converge (last half-width {half // 2})")


def _junction_currents(params: SetParams, v_ds, q0):
    dist = stationary_distribution(params, v_ds, q0)
    p, rates = _solve_window(params, dist.n_min, dist.n_max, v_ds, q0)
    drain = E_CHARGE * np.dot(p, rates[DRAIN, OFF] - rates[DRAIN, ON]) / PA
    source = E_CHARGE * np.dot(p, rates[SOURCE, ON] - rates[SOURCE, OFF]) / PA
    return float(source), float(drain)


def current(params: SetParams, v_ds: float, q0: float) -> float:
    """Stationary current in pA (net electron flow out through the drain)."""
    return _junction_currents(params, v_ds, q0)[1]


def source_current(params: SetParams, v_ds: float, q0: float) -> float:
    """Same current evaluated at the source junction; equals :func:`current`."""
    return _junction_currents(params, v_ds, q0)[0]


@dataclass(frozen=True)
class Trace:
    x_values: np.ndarray  # mV
    y_values: np.ndarray  # pA
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x_values, dtype=float)
        y = np.asarray(self.y_values, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x_values and y_values must be 1-D and of equal length")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise ValueError("x_values must be strictly increasing")
        object.__setattr__(self, "x_values", x)
        object.__setattr__(self, "y_values", y)

    def __len__(self):
        return self.x_values.size


def sweep_points(v_start: float, v_stop: float, step: float) -> np.ndarray:
    """Inclusive grid from v_start to v_stop with the given step."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if v_stop < v_start:
        raise ValueError("sweep range must be ascending")
    n = int(math.floor((v_stop - v_start) / step + 1e-9)) + 1
    return v_start + step * np.arange(n)


def gate_offset(params: SetParams, v_g):
    """Gate-induced offset charge C_g V_g / e (units of e)."""
    return params.c_gate * AF * np.asarray(v_g, dtype=float) * 1e-3 / E_CHARGE


def gate_sweep(
    params: SetParams, v_ds: float, v_g_range: tuple[float, float], step: float
) -> Trace:
    """Current versus gate voltage with q0 = C_g V_g / e."""
    v_g = sweep_points(v_g_range[0], v_g_range[1], step)
    q0 = gate_offset(params, v_g)
    y = np.array([current(params, v_ds, q) for q in q0])
    meta = {"sweep": "gate", "v_ds_mV": v_ds, "step_mV": step, "set": params.to_dict()}
    return Trace(v_g, y, meta)


def bias_sweep(
    params: SetParams, q0: float, v_ds_range: tuple[float, float], step: float
) -> Trace:
    """Current versus drain-source voltage at fixed offset charge."""
    v = sweep_points(v_ds_range[0], v_ds_range[1], step)
    y = np.array([current(params, vd, q0) for vd in v])
    meta = {"sweep": "bias", "q0_e": q0, "step_mV": step, "set": params.to_dict()}
    return Trace(v, y, meta)
