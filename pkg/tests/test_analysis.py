import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdcav.analysis import (
    PeaksNotFound,
    classify_triplet,
    f_factor,
    find_peaks,
    predict_cavity_intensity,
    vrs_splitting,
)
from qdcav.params import ModelParams
from qdcav.spectra import FrequencyGrid, SpectrumSeries


def lorentzian(omegas, center, hwhm, amplitude=1.0):
    return amplitude * hwhm ** 2 / ((omegas - center) ** 2 + hwhm ** 2)


def make_series(omegas, values):
    return SpectrumSeries(FrequencyGrid(np.asarray(omegas, dtype=float)),
                          np.asarray(values, dtype=float), channel="total")


class TestFFactor:
    def test_spot_value_at_detuning(self):
        p = ModelParams()
        # independent arithmetic in half-rate ueV units
        gs, gp, gc, g = 0.022, 15.0, 34.5, 105.0
        expected = (gs + gp) / (gs * (2500.0 / g) ** 2 + gc + gs + gp)
        got = f_factor(p, 2500.0)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(0.242, abs=5e-4)

    def test_spot_value_on_resonance(self):
        p = ModelParams()
        gs, gp, gc = 0.022, 15.0, 34.5
        expected = (gs + gp) / (gc + gs + gp)
        got = f_factor(p, 0.0)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(0.303, abs=5e-4)

    def test_vanishes_without_dephasing_or_emission(self):
        p = ModelParams(two_hbar_gamma_phase_e=0.0, two_hbar_gamma_phase_h=0.0,
                        two_hbar_Gamma_spon=1e-6)
        assert f_factor(p, 1000.0) < 1e-7

    def test_requires_coupling(self):
        with pytest.raises(ValueError):
            f_factor(ModelParams(p_max=0, two_hbar_g=0.0), 100.0)

    def test_monotonicity(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            det = rng.uniform(50.0, 5000.0)
            gp = rng.uniform(1.0, 80.0)
            p = ModelParams(two_hbar_gamma_phase_e=gp / 2, two_hbar_gamma_phase_h=gp / 2)
            # decreasing in |detuning|
            assert f_factor(p, det * 1.05) < f_factor(p, det)
            assert f_factor(p, -det) == pytest.approx(f_factor(p, det))
            # increasing in the dephasing rate
            p_more = ModelParams(two_hbar_gamma_phase_e=gp / 2 * 1.1,
                                 two_hbar_gamma_phase_h=gp / 2 * 1.1)
            assert f_factor(p_more, det) > f_factor(p, det)


class TestPrediction:
    def test_empty_line_list(self):
        assert predict_cavity_intensity(ModelParams(), []) == 0.0

    def test_half_feeding_single_line(self):
        # choose rates so the on-resonance feeding fraction is exactly 1/2
        total_phase = 69.0 - 0.044
        p = ModelParams(two_hbar_gamma_phase_e=total_phase / 2,
                        two_hbar_gamma_phase_h=total_phase / 2)
        assert f_factor(p, 0.0) == pytest.approx(0.5, rel=1e-12)
        assert predict_cavity_intensity(p, [(0.0, 2.0)]) == pytest.approx(1.0, rel=1e-12)


class TestFindPeaks:
    def test_single_lorentzian(self):
        omegas = np.linspace(-100.0, 100.0, 2001)
        hwhm = 7.0
        s = make_series(omegas, lorentzian(omegas, 12.0, hwhm))
        peaks = find_peaks(s, 0.05)
        assert len(peaks) == 1
        pk = peaks.peaks[0]
        assert pk.center == pytest.approx(12.0, abs=0.1)
        assert pk.hwhm == pytest.approx(hwhm, rel=0.02)

    def test_two_separated_lorentzians(self):
        omegas = np.linspace(-200.0, 200.0, 4001)
        hwhm = 5.0
        v = lorentzian(omegas, -50.0, hwhm) + lorentzian(omegas, 50.0, hwhm, 0.8)
        peaks = find_peaks(make_series(omegas, v), 0.05)
        assert len(peaks) == 2
        assert peaks.peaks[0].center == pytest.approx(-50.0, abs=omegas[1] - omegas[0])
        assert peaks.peaks[1].center == pytest.approx(50.0, abs=omegas[1] - omegas[0])
        # integrated intensity of an isolated Lorentzian is pi * A * hwhm
        assert peaks.peaks[0].intensity == pytest.approx(np.pi * hwhm, rel=0.05)

    def test_flat_series_empty(self):
        omegas = np.linspace(0.0, 1.0, 50)
        assert len(find_peaks(make_series(omegas, np.zeros(50)), 0.1)) == 0

    def test_prominence_validation(self):
        omegas = np.linspace(0.0, 1.0, 50)
        s = make_series(omegas, np.ones(50))
        for bad in (0.0, 1.0, -0.2, 3.0):
            with pytest.raises(ValueError):
                find_peaks(s, bad)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=1e-6, max_value=1e6))
    def test_scaling_invariance(self, scale):
        omegas = np.linspace(-100.0, 100.0, 1001)
        v = lorentzian(omegas, -30.0, 6.0) + lorentzian(omegas, 40.0, 9.0, 0.5)
        base = find_peaks(make_series(omegas, v), 0.05)
        scaled = find_peaks(make_series(omegas, v * scale), 0.05)
        assert len(base) == len(scaled)
        for a, b in zip(base, scaled):
            # rounding in the sub-grid refinement is the only wiggle room
            assert b.center == pytest.approx(a.center, abs=1e-9)
            assert b.hwhm == pytest.approx(a.hwhm, rel=1e-9)
            assert b.intensity == pytest.approx(a.intensity * scale, rel=1e-9)


class TestVrsSplitting:
    def test_synthetic_doublet(self):
        omegas = np.linspace(-300.0, 300.0, 3001)
        v = lorentzian(omegas, -105.0, 20.0) + lorentzian(omegas, 105.0, 20.0)
        got = vrs_splitting(make_series(omegas, v), 0.0)
        assert got == pytest.approx(210.0, abs=0.5)

    def test_dominant_peaks_selected(self):
        omegas = np.linspace(-300.0, 300.0, 3001)
        v = (lorentzian(omegas, -105.0, 10.0) + lorentzian(omegas, 105.0, 10.0)
             + lorentzian(omegas, -200.0, 10.0, 0.3) + lorentzian(omegas, 0.0, 10.0, 0.4))
        got = vrs_splitting(make_series(omegas, v), 0.0)
        assert got == pytest.approx(210.0, abs=0.5)

    def test_single_peak_raises(self):
        omegas = np.linspace(-300.0, 300.0, 3001)
        v = lorentzian(omegas, 10.0, 20.0)
        with pytest.raises(PeaksNotFound):
            vrs_splitting(make_series(omegas, v), 0.0)


class TestClassifyTriplet:
    def test_symmetric_triplet(self):
        omegas = np.linspace(-300.0, 300.0, 3001)
        v = (lorentzian(omegas, -150.0, 15.0) + lorentzian(omegas, 150.0, 15.0)
             + lorentzian(omegas, 0.0, 15.0, 0.7))
        labeled = classify_triplet(make_series(omegas, v), 0.0)
        labels = [p.label for p in labeled]
        assert labels == ["R-", "center", "R+"]

    def test_doublet_has_no_center(self):
        omegas = np.linspace(-300.0, 300.0, 3001)
        v = lorentzian(omegas, -150.0, 15.0) + lorentzian(omegas, 150.0, 15.0)
        labeled = classify_triplet(make_series(omegas, v), 0.0)
        assert labeled.labeled("center") is None
        assert labeled.labeled("R-") is not None
        assert labeled.labeled("R+") is not None

    def test_grid_refinement_stability(self):
        def centers(n):
            omegas = np.linspace(-300.0, 300.0, n)
            v = (lorentzian(omegas, -151.0, 15.0) + lorentzian(omegas, 149.0, 15.0)
                 + lorentzian(omegas, 2.0, 15.0, 0.6))
            labeled = classify_triplet(make_series(omegas, v), 0.0)
            return {p.label: p.center for p in labeled if p.label != "unassigned"}

        coarse = centers(601)
        fine = centers(1201)
        coarse_spacing = 600.0 / 600.0
        for label in ("R-", "center", "R+"):
            assert abs(fine[label] - coarse[label]) <= coarse_spacing

    def test_flat_series(self):
        omegas = np.linspace(-1.0, 1.0, 101)
        labeled = classify_triplet(make_series(omegas, np.zeros(101)), 0.0)
        assert len(labeled) == 0
