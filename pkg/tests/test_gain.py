import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from wgmlab.gain import (
    QDEnsemble,
    coupled_dot_count,
    coupled_dot_count_gaussian,
    expected_mode_count,
    fsr_coverage,
    homogeneous_regime,
    homogeneous_width,
    inhomogeneous_width,
    inhomogeneous_width_nm,
    layer_absorption_efficiency,
    pump_chain,
    pump_sufficiency,
)

H = 6.62607015e-34
C = 299_792_458.0


class TestInhomogeneousWidth:
    def test_paper_ensemble(self):
        assert inhomogeneous_width(1075, 100) == pytest.approx(2.60e4, rel=5e-3)

    def test_narrower_ensemble(self):
        assert inhomogeneous_width(1060, 50) == pytest.approx(1.33e4, rel=5e-3)

    def test_independent_formula(self):
        # c * d(lambda) / lambda^2 written out in SI
        expected = C * 100e-9 / (1075e-9) ** 2 / 1e9
        assert inhomogeneous_width(1075, 100) == pytest.approx(expected, rel=1e-14)

    @given(st.floats(500, 2000), st.floats(0.1, 300))
    def test_round_trip(self, center, width):
        assert inhomogeneous_width_nm(center, inhomogeneous_width(center, width)) == pytest.approx(width, rel=1e-12)

    def test_linear_in_width(self):
        assert inhomogeneous_width(1075, 200) == pytest.approx(2 * inhomogeneous_width(1075, 100), rel=1e-14)


class TestHomogeneousWidth:
    def test_anchors(self):
        assert homogeneous_width(300) == 2500
        assert homogeneous_width(8) == pytest.approx(2.5, rel=1e-12)

    def test_held_outside_anchors(self):
        assert homogeneous_width(4) == pytest.approx(2.5, rel=1e-12)
        assert homogeneous_width(400) == 2500
        assert homogeneous_regime(4).startswith("held")
        assert homogeneous_regime(300) == "room-temperature anchor"
        assert "placeholder" in homogeneous_regime(100)

    def test_fixed_point_without_cryo_reduction(self):
        for t in (8, 50, 150, 300):
            assert homogeneous_width(t, gamma_room=100.0, cryo_factor=1.0) == pytest.approx(100.0, rel=1e-12)

    @given(st.floats(8, 300), st.floats(8, 300))
    def test_monotone(self, t1, t2):
        lo, hi = sorted((t1, t2))
        assert homogeneous_width(lo) <= homogeneous_width(hi) * (1 + 1e-12)

    def test_rejects_nonpositive_temperature(self):
        with pytest.raises(ValueError):
            homogeneous_width(0)


class TestCoupledDots:
    def test_paper(self):
        assert coupled_dot_count(600, 2500, 25000) == 60

    def test_capped(self):
        assert coupled_dot_count(600, 30000, 25000) == 600

    def test_cryo(self):
        assert coupled_dot_count(600, 2.5, 25000) == pytest.approx(0.06, rel=1e-12)

    def test_gaussian_cross_check(self):
        # for gamma_hom << gamma_inh the two estimates agree to within a few percent
        ratio = coupled_dot_count_gaussian(600, 2500, 25000) / coupled_dot_count(600, 2500, 25000)
        assert ratio == pytest.approx(2 * math.sqrt(math.log(2) / math.pi), rel=1e-2)

    def test_ensemble_property(self):
        ens = QDEnsemble(600, 1075, 100, 2500)
        assert ens.coupled_dots == pytest.approx(600 * 2500 / ens.gamma_inh, rel=1e-14)

    def test_ensemble_validation(self):
        with pytest.raises(ValueError):
            QDEnsemble(0, 1075, 100, 2500)
        with pytest.warns(UserWarning):
            QDEnsemble(10, 1075, 1, 2500)


class TestCoverage:
    def test_examples(self):
        assert fsr_coverage(25000, 500) == 50
        assert fsr_coverage(470, 470) == 1
        assert fsr_coverage(26000, 470) == pytest.approx(55.3, abs=0.05)

    def test_mode_count(self):
        assert expected_mode_count(25000, 2500) == 10
        assert expected_mode_count(2500, 2500) == 1
        assert expected_mode_count(26000, 2500) == pytest.approx(10.4, abs=1e-9)


class TestLayerEfficiency:
    def test_linearized(self):
        assert layer_absorption_efficiency(0.07, 1.0) == pytest.approx(0.07, rel=1e-14)

    def test_cap(self):
        assert layer_absorption_efficiency(2.0, 1.0) == 1.0

    def test_beer_lambert(self):
        assert layer_absorption_efficiency(0.07, 1.0, beer_lambert=True) == pytest.approx(0.0676, abs=5e-5)

    @given(st.floats(1e-3, 10), st.floats(1e-3, 10))
    def test_beer_lambert_below_linear(self, t, length):
        assert layer_absorption_efficiency(t, length, True) <= layer_absorption_efficiency(t, length) + 1e-15


class TestPumpChain:
    def test_paper_budget(self):
        b = pump_chain(200, 778, [("scattering", 0.30), ("layer", 0.07)])
        assert b.overall_efficiency == pytest.approx(0.021, rel=1e-12)
        assert b.pair_rate == pytest.approx(1.65e13, rel=5e-3)
        assert 1.5e13 <= b.pair_rate <= 1.8e13

    def test_no_stages_is_photon_flux(self):
        b = pump_chain(200, 778, [])
        assert b.pair_rate == pytest.approx(200e-6 / (H * C / 778e-9), rel=1e-12)

    def test_alternative_scattering(self):
        assert pump_chain(200, 778, [("a", 0.36), ("b", 0.07)]).pair_rate == pytest.approx(1.97e13, rel=5e-3)

    @pytest.mark.parametrize("eff", [-0.1, 1.2])
    def test_efficiency_range(self, eff):
        with pytest.raises(ValueError):
            pump_chain(200, 778, [("bad", eff)])

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=4), st.floats(0, 1000))
    def test_permutation_and_linearity(self, effs, power):
        stages = [(str(i), e) for i, e in enumerate(effs)]
        rates = [pump_chain(power, 778, list(p)).pair_rate for p in itertools.permutations(stages)]
        assert max(rates) == pytest.approx(min(rates), rel=1e-12, abs=1e-300)
        doubled = pump_chain(2 * power, 778, stages).pair_rate
        assert doubled == pytest.approx(2 * rates[0], rel=1e-12, abs=1e-300)

    def test_as_dict(self):
        d = pump_chain(200, 778, [("scattering", 0.3)]).as_dict()
        assert d["stages"] == [{"label": "scattering", "efficiency": 0.3}]


class TestSufficiency:
    def test_examples(self):
        assert pump_sufficiency(1.56e13, 600, 100) == pytest.approx(2.6, abs=0.005)
        assert pump_sufficiency(6e12, 600, 100) == pytest.approx(1.0, rel=1e-12)
        rate = pump_chain(200, 778, [("scattering", 0.30), ("layer", 0.07)]).pair_rate
        assert pump_sufficiency(rate, 600, 100) == pytest.approx(2.75, abs=0.02)

    def test_domain(self):
        with pytest.raises(ValueError):
            pump_sufficiency(1e13, 0, 100)
