"""Scenario files for coupled-device sweeps.

A scenario is a JSON object with the sections below; unknown keys are
rejected by name.

``material``
    ``{"x": 0.25}`` or explicit ``{"eps_r": .., "m_eff_ratio": ..}``.
``ladder``
    ``{"n_levels": 8}``.
``set``
    Explicit ``c_source, c_drain, c_gate`` (aF), ``r_source, r_drain`` (kOhm),
    ``temperature`` (K); or the symmetric shorthand ``c_total`` and
    ``r_total``.  ``cb_period_mV`` may replace ``c_gate`` (C_g = e/period).
``coupling``
    ``lever_arm`` (meV/mV) or ``fast_period_mV`` (lever arm = dE/period),
    ``v_threshold`` (mV), ``kappa`` (e), ``fermi_broadening_T`` (K).
``sweep``
    ``v_g_start``, ``v_g_stop``, ``step`` (mV), ``v_ds`` (mV).
``analysis``
    ``min_prominence``, ``min_separation`` (mV), ``max_width`` (mV),
    ``detrend_window`` (mV or null).
``output``
    ``trace_csv``, ``peaks_json`` file names, ``dir`` (optional).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .device_coupling import CouplingConfig, calibrate_lever_arm
from .hydrogenic import QhoLadder, build_donor_model, build_ladder, DonorModel
from .materials import MaterialError, MaterialParams, material_from_mapping
from .set_orthodox import SetParams
from .trace_analysis import capacitance_from_period


class ConfigError(ValueError):
    """Invalid scenario file."""


SECTIONS = {
    "material": {"x", "eps_r", "m_eff_ratio"},
    "ladder": {"n_levels"},
    "set": {
        "c_source", "c_drain", "c_gate", "r_source", "r_drain", "temperature",
        "c_total", "r_total", "cb_period_mV",
    },
    "coupling": {"lever_arm", "fast_period_mV", "v_threshold", "kappa", "fermi_broadening_T"},
    "sweep": {"v_g_start", "v_g_stop", "step", "v_ds"},
    "analysis": {"min_prominence", "min_separation", "max_width", "detrend_window"},
    "output": {"trace_csv", "peaks_json", "dir"},
}
REQUIRED = ("material", "set", "sweep")


@dataclass(frozen=True)
class AnalysisConfig:
    min_prominence: float = 0.05
    min_separation: float = 1.0
    max_width: float = 2.0
    detrend_window: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    material: MaterialParams
    donor: DonorModel
    ladder: QhoLadder
    set_params: SetParams
    coupling: CouplingConfig
    v_g_range: tuple[float, float]
    step: float
    v_ds: float
    analysis: AnalysisConfig = AnalysisConfig()
    output: dict = field(default_factory=dict)


def _check_keys(data: dict) -> None:
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    for key, value in data.items():
        if key not in SECTIONS:
            raise ConfigError(f"unknown section {key!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"section {key!r} must be an object")
        for sub in value:
            if sub not in SECTIONS[key]:
                raise ConfigError(f"unknown key {key}.{sub!r}")
    for key in REQUIRED:
        if key not in data:
            raise ConfigError(f"missing section {key!r}")


def _set_params(sec: dict) -> SetParams:
    sec = dict(sec)
    if "cb_period_mV" in sec:
        if "c_gate" in sec:
            raise ConfigError("give either set.c_gate or set.cb_period_mV, not both")
        sec["c_gate"] = capacitance_from_period(sec.pop("cb_period_mV"))
    if "c_total" in sec or "r_total" in sec:
        extra = {"c_source", "c_drain", "r_source", "r_drain"} & set(sec)
        if extra:
            raise ConfigError(f"symmetric shorthand cannot be mixed with {sorted(extra)}")
        try:
            return SetParams.symmetric(
                sec["c_total"], sec["c_gate"], sec["r_total"], sec["temperature"]
            )
        except KeyError as exc:
            raise ConfigError(f"set section missing {exc.args[0]!r}") from None
    try:
        return SetParams(**sec)
    except TypeError as exc:
        raise ConfigError(f"set section: {exc}") from None


def _coupling(sec: dict, donor: DonorModel) -> CouplingConfig:
    sec = dict(sec)
    if "fast_period_mV" in sec:
        if "lever_arm" in sec:
            raise ConfigError("give either coupling.lever_arm or coupling.fast_period_mV")
        sec["lever_arm"] = calibrate_lever_arm(sec.pop("fast_period_mV"), donor.dE)
    return CouplingConfig(**sec)


def scenario_from_dict(data: dict, name: str = "scenario") -> ScenarioConfig:
    _check_keys(data)
    try:
        mat = material_from_mapping(data["material"])
        donor = build_donor_model(mat)
        ladder = build_ladder(donor, data.get("ladder", {}).get("n_levels", 8))
        set_params = _set_params(data["set"])
        coupling = _coupling(data.get("coupling", {}), donor)
        sw = data["sweep"]
        missing = {"v_g_start", "v_g_stop", "step"} - set(sw)
        if missing:
            raise ConfigError(f"sweep section missing {sorted(missing)}")
        if not sw["v_g_stop"] > sw["v_g_start"]:
            raise ConfigError("sweep.v_g_stop must exceed sweep.v_g_start")
        if not 0 < sw["step"]:
            raise ConfigError("sweep.step must be positive")
        analysis = AnalysisConfig(**data.get("analysis", {}))
    except (MaterialError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return ScenarioConfig(
        name=name,
        material=mat,
        donor=donor,
        ladder=ladder,
        set_params=set_params,
        coupling=coupling,
        v_g_range=(float(sw["v_g_start"]), float(sw["v_g_stop"])),
        step=float(sw["step"]),
        v_ds=float(sw.get("v_ds", 0.2)),
        analysis=analysis,
        output=dict(data.get("output", {})),
    )


def bundled_scenarios() -> list[str]:
    files = resources.files("donorqho").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_scenario(path_or_name: str | Path) -> ScenarioConfig:
    """Load a scenario file, or a bundled one by name (``paper_fig3``)."""
    path = Path(path_or_name)
    if path.exists():
        text = path.read_text()
        name = path.stem
    else:
        name = path.name[:-5] if path.name.endswith(".json") else path.name
        res = resources.files("donorqho").joinpath("scenarios", f"{name}.json")
        if not res.is_file():
            raise ConfigError(f"no scenario file or bundled scenario named {str(path_or_name)!r}")
        text = res.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path_or_name}: invalid JSON: {exc}") from None
    return scenario_from_dict(data, name)
