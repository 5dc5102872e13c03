import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from donorqho.set_orthodox import Trace
from donorqho.trace_analysis import (
    CURRENT,
    DERIVATIVE,
    InsufficientDataError,
    PeakSet,
    TraceParseError,
    capacitance_from_period,
    cb_period,
    energy_to_frequency,
    export_trace,
    fast_features,
    find_peaks,
    import_trace,
    spacing_stats,
)


def gaussians(centers, x, sigma=3.0, heights=None):
    heights = np.ones(len(centers)) if heights is None else heights
    return sum(h * np.exp(-((x - c) ** 2) / (2 * sigma**2)) for c, h in zip(centers, heights))


def staircase(x, edges, height=1.0):
    return height * sum((x > e).astype(float) for e in edges)


class TestFindPeaks:
    def test_monotone(self):
        x = np.linspace(0, 100, 401)
        for kind in (CURRENT, DERIVATIVE):
            assert len(find_peaks(Trace(x, x**2), kind=kind)) == 0
            assert len(find_peaks(Trace(x, np.zeros_like(x)), kind=kind)) == 0

    @given(st.lists(st.floats(0, 1), min_size=4, max_size=4))
    def test_gaussian_centers(self, offsets):
        step = 0.5
        x = np.arange(0, 200, step)
        centers = 25.0 + 40.0 * np.arange(4) + 10.0 * np.array(offsets)
        tr = Trace(x, gaussians(centers, x))
        peaks = find_peaks(tr, 0.1, 5.0, CURRENT)
        assert len(peaks) == 4
        assert np.all(np.abs(peaks.positions - centers) < 0.1 * step)

    def test_staircase_derivative(self):
        step = 0.25
        x = np.arange(0, 60, step)
        edges = [10.1, 21.2, 28.6, 36.0]
        peaks = find_peaks(Trace(x, staircase(x, edges)))
        assert np.allclose(peaks.positions, edges, atol=step / 2)

    def test_plateau_leftmost(self):
        x = np.arange(10.0)
        y = np.array([0, 0, 1, 3, 3, 3, 1, 0, 0, 0], float)
        peaks = find_peaks(Trace(x, y), 0.1, 0.5, CURRENT)
        # leftmost plateau sample is x=3; parabola through (2,3,4) peaks at 3.5
        assert len(peaks) == 1
        assert 3.0 <= peaks.positions[0] <= 3.5
        assert peaks.positions[0] == pytest.approx(3.5)

    def test_min_separation(self):
        x = np.arange(0, 100, 0.5)
        tr = Trace(x, gaussians([40, 44, 80], x, sigma=1.0))
        assert len(find_peaks(tr, 0.1, 2.0, CURRENT)) == 3
        assert len(find_peaks(tr, 0.1, 10.0, CURRENT)) == 2

    @given(st.floats(0.01, 100), st.floats(-1e3, 1e3))
    @settings(max_examples=40)
    def test_affine_invariance(self, a, b):
        x = np.arange(0, 60, 0.25)
        y = staircase(x, [10.1, 21.2, 28.6, 36.0]) + 0.3 * np.sin(x / 7)
        ref = find_peaks(Trace(x, y))
        got = find_peaks(Trace(x, a * y + b))
        assert np.allclose(ref.positions, got.positions, rtol=0, atol=1e-9)
        ref = find_peaks(Trace(x, y), kind=CURRENT)
        got = find_peaks(Trace(x, a * y + b), kind=CURRENT)
        assert np.allclose(ref.positions, got.positions, rtol=0, atol=1e-9)

    def test_reversal_invariance(self):
        x = np.arange(0, 60, 0.25)
        y = staircase(x, [10.1, 21.2, 28.6, 36.0])
        rx, ry = x[::-1], y[::-1]
        order = np.argsort(rx)
        again = Trace(rx[order], ry[order])
        assert np.array_equal(find_peaks(Trace(x, y)).positions, find_peaks(again).positions)

    def test_detrend_suppresses_background(self):
        x = np.arange(0, 200, 0.25)
        centers = [50.1, 61.2, 68.6, 76.0, 83.4]
        y = 20 * np.sin(2 * np.pi * x / 2000) + gaussians(centers, x, sigma=1.0)
        raw = find_peaks(Trace(x, y), 0.2, 2.0, CURRENT)
        assert len(raw) < len(centers)
        peaks = find_peaks(Trace(x, y), 0.2, 2.0, CURRENT, detrend_window=37.0)
        assert np.allclose(peaks.positions, centers, atol=0.1)

    def test_fast_features_reject_broad(self):
        x = np.arange(-1000, 0, 0.5)
        y = np.cos(2 * np.pi * x / 440)
        assert len(find_peaks(Trace(x, y))) > 0
        assert len(fast_features(Trace(x, y))) == 0

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            find_peaks(Trace([0, 1], [0, 1]))


class TestSpacingStats:
    def test_ladder_positions(self):
        s = spacing_stats(PeakSet([0, 11.1, 18.5, 25.9]))
        assert s.mean == pytest.approx(7.4)
        assert s.first_gap == pytest.approx(11.1)
        assert s.ratio == pytest.approx(1.5)

    def test_equal_spacing(self):
        s = spacing_stats(PeakSet(np.arange(6) * 3.0))
        assert s.stddev == 0 and s.ratio == 1

    def test_quoted_fig4_ratio(self):
        # first gap 11.7 mV over an average of 7.5 mV
        s = spacing_stats(PeakSet([0, 11.7, 19.2, 26.7, 34.2]))
        assert s.ratio == pytest.approx(1.56)

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            spacing_stats(PeakSet([0, 1]))
        assert PeakSet([0, 1]).first_gap_ratio is None

    def test_peakset_invariants(self):
        ps = PeakSet([1.0, 2.0, 4.0])
        assert len(ps.spacings) == len(ps) - 1
        with pytest.raises(ValueError):
            PeakSet([2.0, 1.0])


class TestConversions:
    def test_capacitance(self):
        assert capacitance_from_period(440.0) == pytest.approx(0.364, abs=5e-4)
        assert capacitance_from_period(440.0) * 1e-18 == pytest.approx(3.6e-19, rel=2e-2)
        assert capacitance_from_period(490.0) == pytest.approx(0.327, abs=5e-4)
        assert capacitance_from_period(880.0) == pytest.approx(capacitance_from_period(440.0) / 2)
        with pytest.raises(ValueError):
            capacitance_from_period(0)

    def test_frequency(self):
        assert energy_to_frequency(7.5) == pytest.approx(1.81, rel=1e-2)
        # h = 4.135667696 meV ps
        assert energy_to_frequency(4.1357) == pytest.approx(1.0, rel=1e-3)
        assert energy_to_frequency(9.0) == pytest.approx(2 * energy_to_frequency(4.5))
        with pytest.raises(ValueError):
            energy_to_frequency(-1.0)


class TestTraceIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        x = np.cumsum(rng.uniform(0.1, 1.0, 50)) - 20.123456789012345
        y = rng.normal(size=50) * 1e3
        tr = Trace(x, y, {"sweep": "gate", "v_ds_mV": 0.2})
        path = tmp_path / "t.csv"
        export_trace(tr, path)
        assert path.read_text().splitlines()[1] == "v_g_mv,current_pa"
        back = import_trace(path)
        assert np.array_equal(back.x_values, x) and np.array_equal(back.y_values, y)
        assert back.metadata["v_ds_mV"] == 0.2

    def test_headerless_and_units(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("0,1\n1,2\n2,3\n")
        assert np.array_equal(import_trace(p).y_values, [1, 2, 3])
        p.write_text("v_g_v,current_na\n0.1,1\n0.2,2\n0.3,3\n")
        tr = import_trace(p)
        assert np.allclose(tr.x_values, [100, 200, 300])
        assert np.allclose(tr.y_values, [1000, 2000, 3000])
        assert np.allclose(import_trace(p, x_scale=1.0, y_scale=1.0).x_values, [0.1, 0.2, 0.3])

    def test_unsorted_warns(self, tmp_path):
        p = tmp_path / "u.csv"
        p.write_text("v_g_mv,current_pa\n2,20\n0,0\n1,10\n")
        with pytest.warns(UserWarning, match="sorted"):
            tr = import_trace(p)
        assert np.array_equal(tr.x_values, [0, 1, 2])
        assert np.array_equal(tr.y_values, [0, 10, 20])

    def test_malformed_line_number(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("v_g_mv,current_pa\n0,1\n1,abc\n2,3\n")
        with pytest.raises(TraceParseError, match=":3:"):
            import_trace(p)
        p.write_text("0,1\n1,2,3\n")
        with pytest.raises(TraceParseError, match=":2:"):
            import_trace(p)

    def test_too_few_points(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("v_g_mv,current_pa\n0,1\n1,2\n")
        with pytest.raises(InsufficientDataError):
            import_trace(p)

    def test_peakset_json(self):
        d = PeakSet([0, 11.1, 18.5, 25.9]).to_dict()
        text = json.dumps(d)
        assert json.loads(text)["first_gap_ratio"] == pytest.approx(1.5)


def test_cb_period_from_cosine():
    x = np.arange(-2000, 0, 1.0)
    tr = Trace(x, 1 + np.cos(2 * np.pi * (x + 220) / 440))
    assert cb_period(tr) == pytest.approx(440, abs=1.0)
