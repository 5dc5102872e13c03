"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary (see conftest.py).
"""

import pathlib
import subprocess
import sys
import time

import numpy as np

from donorqho.config import load_scenario
from donorqho.device_coupling import coupled_sweep
from donorqho.hydrogenic import binding_energy, bohr_radius, build_donor_model
from donorqho.materials import material_at
from donorqho.set_orthodox import SetParams, charging_energy, gate_sweep
from donorqho.trace_analysis import (
    CURRENT,
    capacitance_from_period,
    energy_to_frequency,
    find_peaks,
    sweep_summary,
)
from donorqho.verification import verify_all

RESULTS: list[str] = []


def record(number, title, checks):
    """checks: list of (label, ok) pairs."""
    ok = all(c for _, c in checks)
    detail = "; ".join(f"{label}{'' if c else ' [FAIL]'}" for label, c in checks)
    RESULTS.append(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title} -- {detail}")
    print(RESULTS[-1])
    assert ok, detail


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_1_closed_form_table():
    t0 = time.perf_counter()
    rows = []
    for x, e1, r1 in [(0.0, -5.15, 10.83), (0.25, -7.63, 7.70), (0.3, -8.24, 7.24)]:
        mat = material_at(x)
        rows.append((x, binding_energy(mat), e1, bohr_radius(mat), r1))
    elapsed = time.perf_counter() - t0
    checks = []
    for x, e, e_ref, r, r_ref in rows:
        checks.append((f"E1(x={x})={e:.3f} meV", rel(e, e_ref) <= 1e-2))
        checks.append((f"R1(x={x})={r:.3f} nm", rel(r, r_ref) <= 1e-2))
    checks.append((f"runtime {elapsed * 1e3:.1f} ms", elapsed < 1.0))
    record(1, "closed-form E1/R1 within 1%", checks)


def test_criterion_2_ladder_spacing():
    t0 = time.perf_counter()
    d25 = build_donor_model(material_at(0.25)).dE
    d30 = build_donor_model(material_at(0.3)).dE
    elapsed = time.perf_counter() - t0
    record(
        2,
        "ladder spacing within 1%",
        [
            (f"dE(0.25)={d25:.3f} meV", rel(d25, 8.34) <= 1e-2),
            (f"dE(0.3)={d30:.3f} meV", rel(d30, 8.98) <= 1e-2),
            (f"runtime {elapsed * 1e3:.1f} ms", elapsed < 1.0),
        ],
    )


def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    checks = verify_all()
    elapsed = time.perf_counter() - t0
    tol = {
        "coulomb_ground_meV": 5e-3,
        "mean_radius_nm": 1e-2,
        "harmonic_lowest_meV": 5e-3,
    }
    out = []
    for c in checks:
        limit = tol.get(c.name, 5e-3 if c.name.startswith("harmonic_spacing") else None)
        if limit is None:
            continue
        out.append((f"{c.name}(x={c.x}) err={c.rel_error:.1e}", c.rel_error <= limit))
    names = {c.name for c in checks}
    out.append(("all four check kinds present", {"coulomb_ground_meV", "mean_radius_nm",
                                                 "harmonic_lowest_meV", "harmonic_spacing_0_meV"} <= names))
    out.append((f"runtime {elapsed:.2f} s", elapsed < 60.0))
    record(3, "finite-difference solver vs closed forms", out)


def _cb_spacings(c_gate):
    p = SetParams.symmetric(890.0, c_gate, 200.8, 0.3)
    tr = gate_sweep(p, 0.2, (-4.3 * p.gate_period, 0.0), 1.0)
    return find_peaks(tr, 0.3, 50.0, CURRENT).spacings


def test_criterion_4_set_periodicity():
    t0 = time.perf_counter()
    s440 = _cb_spacings(0.364)
    s490 = _cb_spacings(0.327)
    ec = charging_energy(890.0)
    elapsed = time.perf_counter() - t0
    record(
        4,
        "SET gate periodicity",
        [
            (f"{len(s440)} periods, mean {np.mean(s440):.1f} mV", len(s440) >= 3
             and np.all(np.abs(s440 - 440.0) <= 0.02 * 440.0)),
            (f"{len(s490)} periods, mean {np.mean(s490):.1f} mV", len(s490) >= 3
             and np.all(np.abs(s490 - 490.0) <= 0.02 * 490.0)),
            (f"E_C={ec:.4f} meV", round(ec, 3) == 0.090),
            (f"runtime {elapsed:.1f} s", elapsed < 120.0),
        ],
    )


def test_criterion_5_coupled_device():
    sc = load_scenario("paper_fig3")
    assert sc.step == 0.25
    t0 = time.perf_counter()
    tr = coupled_sweep(sc.set_params, sc.ladder, sc.coupling, sc.v_ds, sc.v_g_range, sc.step)
    a = sc.analysis
    s = sweep_summary(tr, a.min_prominence, a.min_separation, a.max_width, a.detrend_window)
    elapsed = time.perf_counter() - t0
    stats = s["stats"] or {}
    mean = stats.get("mean_mV", np.nan)
    ratio = stats.get("ratio", np.nan)
    onset = s["onset_mV"] if s["onset_mV"] is not None else np.nan
    record(
        5,
        "coupled-device phenomenology (paper_fig3)",
        [
            (f"{s['fast_features_negative']} features at V_g<0", s["fast_features_negative"] == 0),
            (f"onset {onset:.2f} mV", abs(onset - 500.0) <= 5.0),
            (f"fast spacing {mean:.2f} mV", abs(mean - 7.4) <= 0.3),
            (f"first-gap ratio {ratio:.3f}", abs(ratio - 1.5) <= 0.05),
            (f"runtime {elapsed:.1f} s", elapsed < 300.0),
        ],
    )


def test_criterion_6_property_suites():
    """Runs the named property tests in a separate pytest process."""
    here = pathlib.Path(__file__).parent
    targets = [
        "test_set_orthodox.py::TestTunnelingRate::test_detailed_balance",
        "test_set_orthodox.py::TestStationary::test_period_one_in_q0",
        "test_set_orthodox.py::TestCurrent::test_antisymmetry",
        "test_device_coupling.py::TestOccupancy::test_monotone_and_zero_for_nonpositive",
        "test_trace_analysis.py::TestFindPeaks::test_affine_invariance",
        "test_hydrogenic.py::test_de_scaling_with_cloud_radius",
    ]
    checks = []
    for t in targets:
        proc = subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here / t)],
            capture_output=True,
            text=True,
            cwd=here.parent,
        )
        checks.append((t.split("::")[-1], proc.returncode == 0))
    record(6, "property suites", checks)


def test_criterion_7_conversions():
    f = energy_to_frequency(7.5)
    c = capacitance_from_period(440.0) * 1e-18
    record(
        7,
        "conversions",
        [
            (f"7.5 meV -> {f:.3f} THz", rel(f, 1.81) <= 1e-2),
            (f"C_g(440 mV) = {c:.3e} F", rel(c, 3.6e-19) <= 2e-2),
        ],
    )
