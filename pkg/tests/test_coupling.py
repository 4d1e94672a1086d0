import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgmlab.coupling import (
    DielectricMedium,
    InconsistentRatioError,
    MesaPerturber,
    UnsupportedPolarizationError,
    count_peaks,
    fresnel_evanescent,
    fresnel_evanescent_te,
    gap_factor,
    gap_scaling,
    gaussian_fwhm,
    loading_report,
    mesa_scan_profile,
    profile_fwhm,
    scattering_efficiency,
    shift_and_broadening,
)
from wgmlab.modes import ModeIndex, SphereGeometry, describe_mode, evanescent_decay

GAAS = DielectricMedium("GaAs", 3.36)


def numeric_conv_fwhm(radius, kappa, width, step=0.001, half_range=20.0):
    """Independent oracle: sampled box (x) Gaussian via np.convolve, crossing by bisection."""
    y = np.arange(-half_range, half_range + step / 2, step)
    gauss = np.exp(-kappa * y**2 / radius)
    n = int(round(width / step))
    trace = np.convolve(gauss, np.ones(n), mode="same") if n > 0 else gauss
    trace = trace / trace.max()
    f = lambda x: np.interp(x, y, trace) - 0.5
    lo, hi = 0.0, half_range - 1
    for _ in range(100):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 2 * lo


def mode_at(wavelength, p=0, radius=70.0):
    sphere = SphereGeometry(radius, 1.45)
    l = math.floor(2 * math.pi * radius * 1.45 / wavelength)
    return sphere, describe_mode(sphere, ModeIndex(l=l, m=l - p), wavelength)


class TestFresnel:
    def test_prism(self):
        r = fresnel_evanescent_te(1.45, 1.76)
        assert r.real == pytest.approx(0.0513, abs=5e-4)
        assert r.imag == pytest.approx(0.9987, abs=5e-4)

    def test_gaas(self):
        r = fresnel_evanescent_te(1.45, 3.36)
        assert r.real == pytest.approx(-0.786, abs=5e-4)
        assert r.imag == pytest.approx(0.619, abs=5e-4)
        assert abs(r.real) == pytest.approx(0.77, abs=0.02)
        assert r.imag == pytest.approx(0.63, abs=0.02)

    def test_index_matched_limit(self):
        r = fresnel_evanescent_te(1.45, 1.450001)
        assert r.real == pytest.approx(1.0, abs=2e-3)
        assert r.imag == pytest.approx(0.0, abs=5e-2)

    def test_high_index_limit(self):
        r = fresnel_evanescent_te(1.45, 1e6)
        assert r == pytest.approx(-1.0, abs=1e-5)

    def test_manual_complex_arithmetic(self):
        # written out independently: a = i sqrt(Neff^2-1), b = sqrt(N_D^2-Neff^2)
        ne, nd = 1.45, 2.0 + 0.1j
        a = complex(0, math.sqrt(ne * ne - 1))
        b = cmath.sqrt(nd * nd - ne * ne)
        assert fresnel_evanescent_te(ne, nd) == pytest.approx((a - b) / (a + b), rel=1e-14)

    def test_lower_index_medium_is_real(self):
        r = fresnel_evanescent_te(1.45, 1.2)
        assert r.imag == pytest.approx(0.0, abs=1e-15)
        assert 0 < r.real < 1

    def test_domain(self):
        with pytest.raises(ValueError):
            fresnel_evanescent_te(1.0, 3.36)

    def test_tm_unsupported(self):
        with pytest.raises(UnsupportedPolarizationError):
            fresnel_evanescent(1.45, 3.36, "TM")

    @settings(max_examples=1000)
    @given(st.floats(1.001, 3.0), st.floats(0.0, 5.0))
    def test_unimodular(self, n_eff, excess):
        n_d = n_eff + excess + 1e-9
        assert abs(fresnel_evanescent_te(n_eff, n_d)) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=300)
    @given(st.floats(1.001, 3.0), st.floats(0.5, 5.0), st.floats(1e-4, 2.0))
    def test_absorbing_below_one(self, n_eff, n_re, k):
        assert abs(fresnel_evanescent_te(n_eff, complex(n_re, k))) < 1.0

    def test_real_part_monotone(self):
        nd = np.linspace(1.4501, 50, 2000)
        re = [fresnel_evanescent_te(1.45, x).real for x in nd]
        assert np.all(np.diff(re) < 0)


class TestShiftBroadening:
    def test_gaas_half_space(self):
        r = fresnel_evanescent_te(1.45, 3.36)
        res = shift_and_broadening(r, 10.0, 6.224, 0.0)
        assert res.broadening == pytest.approx(6.19, abs=0.005)
        assert res.shift == pytest.approx(7.86, abs=0.005)
        assert res.shift_sign == -1
        assert res.ideal_ratio == pytest.approx(0.787, abs=5e-4)
        assert res.ideal_ratio == pytest.approx(0.78, abs=0.01)

    def test_gap_step_of_half_decay_length(self):
        r = fresnel_evanescent_te(1.45, 3.36)
        kappa = 6.224
        base = shift_and_broadening(r, 10.0, kappa, 100.0)
        moved = shift_and_broadening(r, 10.0, kappa, 100.0 + 1e3 / (2 * kappa))
        assert moved.broadening / base.broadening == pytest.approx(math.exp(-1), rel=1e-12)
        assert moved.shift / base.shift == pytest.approx(math.exp(-1), rel=1e-12)

    def test_negative_calibration(self):
        with pytest.raises(ValueError):
            shift_and_broadening(0.5 + 0.5j, -1.0, 6.0, 0.0)


class TestScatteringEfficiency:
    def test_about_one_third(self):
        assert scattering_efficiency(0.28, 0.78) == pytest.approx(0.36, abs=0.005)

    def test_no_excess(self):
        assert scattering_efficiency(0.5, 0.5) == 1.0

    def test_exact_ratio(self):
        assert scattering_efficiency(0.28, 0.787) == pytest.approx(0.356, abs=5e-4)

    def test_inconsistent(self):
        with pytest.raises(InconsistentRatioError):
            scattering_efficiency(0.9, 0.78)


class TestGapScaling:
    def test_zero(self):
        assert gap_scaling(3.3, 6.224, 0.0) == 3.3

    def test_decay_length(self):
        assert gap_factor(6.224, 160.7) == pytest.approx(math.exp(-2), abs=5e-4)
        assert gap_factor(6.224, 160.7) == pytest.approx(0.135, abs=5e-4)

    def test_500nm(self):
        assert gap_factor(6.224, 500.0) == pytest.approx(2.0e-3, abs=5e-5)

    @given(st.floats(0.1, 20), st.floats(0, 500), st.floats(0, 500))
    def test_composition(self, kappa, g1, g2):
        two_step = gap_scaling(gap_scaling(1.0, kappa, g1), kappa, g2)
        assert two_step == pytest.approx(gap_scaling(1.0, kappa, g1 + g2), rel=1e-12)


class TestScanProfile:
    def test_delta_mesa_is_gaussian(self):
        sphere, mode = mode_at(1.06)
        y = np.arange(-15, 15 + 1e-9, 0.01)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=0.0), sphere, mode, "y", y)
        np.testing.assert_allclose(prof.coupling, np.exp(-mode.kappa * y**2 / 70), rtol=1e-12, atol=1e-300)
        assert profile_fwhm(prof) == pytest.approx(gaussian_fwhm(70, mode.kappa), rel=0.01)

    def test_gaussian_closed_form(self):
        assert gaussian_fwhm(70, 6.224) == pytest.approx(5.58, abs=0.005)

    def test_probe_wavelength_fwhm(self):
        sphere, mode = mode_at(0.772)
        assert mode.kappa == pytest.approx(8.546, abs=0.01)
        y = np.arange(-15, 15 + 1e-9, 0.01)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0), sphere, mode, "y", y)
        oracle = numeric_conv_fwhm(70, mode.kappa, 4.0)
        assert oracle == pytest.approx(5.6, abs=0.05)
        assert profile_fwhm(prof) == pytest.approx(oracle, abs=0.01)
        assert 5.0 <= profile_fwhm(prof) <= 6.0

    def test_emission_wavelength_fwhm(self):
        sphere, mode = mode_at(1.06)
        y = np.arange(-15, 15 + 1e-9, 0.01)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0), sphere, mode, "y", y)
        oracle = numeric_conv_fwhm(70, mode.kappa, 4.0)
        assert oracle == pytest.approx(6.3, abs=0.05)
        assert profile_fwhm(prof) == pytest.approx(oracle, abs=0.01)

    def test_z_scan_first_order_double_humped(self):
        sphere, mode = mode_at(1.06, p=1)
        z = np.arange(-15, 15 + 1e-9, 0.01)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0), sphere, mode, "z", z)
        assert count_peaks(prof.coupling) == 2
        assert prof.multi_peak
        assert prof.coupling[len(z) // 2] < 0.9 * prof.coupling.max()

    def test_z_scan_fundamental_single_peak(self):
        sphere, mode = mode_at(1.06, p=0)
        z = np.arange(-15, 15 + 1e-9, 0.01)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0), sphere, mode, "z", z)
        assert count_peaks(prof.coupling) == 1
        assert prof.coupling.max() == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("axis", ["y", "z"])
    def test_symmetry_and_shape_identity(self, axis):
        sphere, mode = mode_at(0.772, p=3)
        grid = np.linspace(-12, 12, 2401)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0, gap=30.0), sphere, mode, axis, grid)
        np.testing.assert_allclose(prof.coupling, prof.coupling[::-1], rtol=0, atol=1e-9)
        mask = prof.coupling > 1e-200
        ratio_b = prof.broadening[mask] / prof.coupling[mask]
        ratio_s = prof.shift[mask] / prof.coupling[mask]
        assert np.ptp(ratio_b) <= 1e-9 * ratio_b[0]
        assert np.ptp(ratio_s) <= 1e-9 * ratio_s[0]
        assert np.all((prof.coupling >= 0) & (prof.coupling <= 1 + 1e-12))

    def test_reversal_invariance(self):
        sphere, mode = mode_at(1.06)
        y = np.linspace(-15, 15, 3001)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=2.0), sphere, mode, "y", y)
        from wgmlab.coupling import fwhm

        assert fwhm(-y[::-1], prof.coupling[::-1]) == pytest.approx(profile_fwhm(prof), abs=1e-12)

    def test_fwhm_monotone_in_width(self):
        sphere, mode = mode_at(1.06)
        y = np.arange(-20, 20 + 1e-9, 0.01)
        widths = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0]
        fw = [profile_fwhm(mesa_scan_profile(MesaPerturber(GAAS, width=w), sphere, mode, "y", y)) for w in widths]
        assert all(b >= a for a, b in zip(fw, fw[1:]))

    def test_offset_lowers_peak(self):
        sphere, mode = mode_at(1.06)
        y = np.linspace(-10, 10, 201)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0, offset_z=3.0), sphere, mode, "y", y)
        assert prof.coupling.max() < 1.0

    def test_traces_scale_with_perturbation(self):
        sphere, mode = mode_at(1.06)
        y = np.linspace(-10, 10, 201)
        prof = mesa_scan_profile(MesaPerturber(GAAS, width=4.0), sphere, mode, "y", y, gamma_cal=10.0)
        r = fresnel_evanescent_te(mode.n_eff, 3.36)
        assert prof.broadening.max() == pytest.approx(10.0 * r.imag, rel=1e-12)
        assert prof.shift.max() == pytest.approx(10.0 * abs(r.real), rel=1e-12)

    def test_empty_grid(self):
        sphere, mode = mode_at(1.06)
        with pytest.raises(ValueError):
            mesa_scan_profile(MesaPerturber(GAAS), sphere, mode, "y", [])

    def test_flat_mesa_warns(self):
        sphere, mode = mode_at(1.06)
        with pytest.warns(UserWarning):
            mesa_scan_profile(MesaPerturber(GAAS, height=50.0), sphere, mode, "y", [0.0, 1.0])

    def test_tm_mode_rejected(self):
        sphere = SphereGeometry(70, 1.45)
        mode = describe_mode(sphere, ModeIndex(l=600, m=600, polarization="TM"), 1.06)
        with pytest.raises(UnsupportedPolarizationError):
            mesa_scan_profile(MesaPerturber(GAAS), sphere, mode, "y", [0.0, 1.0])

    def test_all_zero_profile(self):
        from wgmlab.coupling import fwhm

        with pytest.raises(ValueError):
            fwhm([0, 1, 2], [0, 0, 0])


class TestMedia:
    def test_validation(self):
        with pytest.raises(ValueError):
            DielectricMedium("x", complex(1.5, -0.1))
        with pytest.raises(ValueError):
            MesaPerturber(GAAS, gap=-1.0)

    def test_tall_flag(self):
        assert MesaPerturber(GAAS, height=200.0).is_tall(6.224)
        assert not MesaPerturber(GAAS, height=100.0).is_tall(6.224)


class TestLoading:
    NU = 299_792_458.0 / 1.06e-6

    def test_equal_weight_critical(self):
        rep = loading_report(0.0, 0.5, 0.5, self.NU)
        assert rep.q == pytest.approx(2.83e5, abs=0.005e5)
        assert rep.critical

    def test_prism_only_definition(self):
        assert loading_report(0.2, 0.5, 0.3, self.NU).critical
        assert not loading_report(0.0, 0.5, 0.0, self.NU).critical

    def test_unbalanced(self):
        rep = loading_report(0.03, 0.6, 0.4, self.NU)
        assert rep.budget.total == pytest.approx(1.03)
        assert not rep.critical

    def test_accepts_perturbation_results(self):
        sample = shift_and_broadening(fresnel_evanescent_te(1.45, 3.36), 1.0, 6.2, 0.0)
        rep = loading_report(0.0, sample.broadening, sample, self.NU)
        assert rep.critical
        assert rep.budget.total == pytest.approx(2 * sample.broadening)
