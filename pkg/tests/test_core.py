import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kickedbec.core import (KickKind, PhysicalParams, RingGrid,
                            mode_coefficients, mode_frequency, mode_spectrum,
                            predict_single_mode_resonances,
                            predict_two_mode_resonances)


def params(g=1.0, K=0.2, T=10.0, **kw):
    return PhysicalParams(g=g, kick_strength=K, period=T, **kw)


class TestPhysicalParams:
    def test_double_pair_needs_epsilon_in_period(self):
        with pytest.raises(ValueError):
            PhysicalParams(g=1, kick_strength=1, period=2, epsilon=0.0,
                           kick_kind=KickKind.DOUBLE_PAIR)
        with pytest.raises(ValueError):
            PhysicalParams(g=1, kick_strength=1, period=2, epsilon=2.5,
                           kick_kind=KickKind.DOUBLE_PAIR)

    def test_rejects_nonfinite_and_negative(self):
        for bad in (dict(g=-1), dict(T=0.0), dict(K=-0.1), dict(g=math.inf)):
            with pytest.raises(ValueError):
                params(**{k: v for k, v in bad.items()})


class TestRingGrid:
    def test_quadrature_exactness(self):
        grid = RingGrid(256)
        assert grid.n_points * grid.d_theta == pytest.approx(2 * math.pi, rel=1e-15)

    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            RingGrid(100)


class TestModeFrequency:
    def test_free_particle_limit(self):
        assert mode_frequency(1, params(g=0.0)) == pytest.approx(0.5)

    def test_interacting_value(self):
        # sqrt(0.5 * (0.5 + 1/pi)); its 2 pi / omega_1 = 9.823 locates the
        # fundamental driven resonance
        w1 = mode_frequency(1, params(g=1.0))
        assert w1 == pytest.approx(0.6396522047893647, rel=1e-12)
        assert 2 * math.pi / w1 == pytest.approx(9.8228, abs=2e-4)

    def test_mode_two_reaches_pi(self):
        gstar = math.pi * (math.pi**2 / 2 - 2)
        assert mode_frequency(2, params(g=gstar)) == pytest.approx(math.pi, abs=1e-9)

    def test_zero_and_negative_k(self):
        assert mode_frequency(0, params()) == 0.0
        assert mode_frequency(-3, params()) == mode_frequency(3, params())

    @given(st.integers(1, 40), st.floats(0, 50))
    def test_monotone_in_k_and_g(self, k, g):
        p = params(g=g)
        assert mode_frequency(k + 1, p) > mode_frequency(k, p)
        p2 = params(g=g + 1.0)
        assert mode_frequency(k, p2) > mode_frequency(k, p)


class TestModeCoefficients:
    def test_values_at_g1(self):
        # frozen from the quartic-root normalization A = (eps/(eps+2gn))^(1/4)
        a, u, v = mode_coefficients(1, params(g=1.0))
        assert a == pytest.approx(0.8841237388181004, rel=1e-12)
        assert u == pytest.approx(1.0075935682506645, rel=1e-12)
        assert v == pytest.approx(-0.12346982943256418, rel=1e-12)

    def test_free_limit(self):
        a, u, v = mode_coefficients(3, params(g=0.0))
        assert (a, u, v) == (1.0, 1.0, 0.0)

    def test_high_k_quasiparticles_become_free(self):
        _, _, v10 = mode_coefficients(10, params(g=1.0))
        assert abs(v10) < 2e-3

    @given(st.integers(1, 60), st.floats(0, 30))
    def test_normalization_identity(self, k, g):
        a, u, v = mode_coefficients(k, params(g=g))
        assert u**2 - v**2 == pytest.approx(1.0, abs=1e-12)
        assert u + v == pytest.approx(a, rel=1e-12)
        assert u - v == pytest.approx(1.0 / a, rel=1e-12)

    def test_spectrum_arrays(self):
        spec = mode_spectrum(params(g=2.0), 16)
        assert np.all(np.diff(spec.omega) > 0)
        assert np.max(np.abs(spec.u**2 - spec.v**2 - 1.0)) < 1e-12


class TestSingleModePredictions:
    def test_fundamental_period(self):
        preds = predict_single_mode_resonances(params(g=1.0), 1, 1, "T", 5, 20)
        assert len(preds) == 1
        assert preds[0].value == pytest.approx(9.822815055016683, rel=1e-9)

    def test_free_particle_period(self):
        preds = predict_single_mode_resonances(params(g=0.0), 1, 1, "T", 1, 20)
        assert preds[0].value == pytest.approx(4 * math.pi, rel=1e-12)

    def test_g_inversion(self):
        preds = predict_single_mode_resonances(params(g=1.0, T=2.0), 2, 1, "g", 0, 20)
        vals = [p.value for p in preds if p.l == 2]
        assert any(abs(v - 9.219953032970322) < 1e-9 for v in vals)

    def test_round_trip(self):
        p = params(g=1.0, T=2.0)
        for pred in predict_single_mode_resonances(p, 4, 3, "g", 0.0, 40.0):
            p2 = PhysicalParams(g=pred.value, kick_strength=p.kick_strength,
                                period=p.period)
            resid = mode_frequency(pred.l, p2) * p.period - 2 * math.pi * pred.order
            assert abs(resid) < 1e-9

    def test_over_t_round_trip(self):
        p = params(g=3.0)
        for pred in predict_single_mode_resonances(p, 3, 2, "T", 0.5, 30.0):
            resid = mode_frequency(pred.l, p) * pred.value - 2 * math.pi * pred.order
            assert abs(resid) < 1e-9


class TestTwoModePredictions:
    def test_pair_12_at_antiresonance_period(self):
        p = params(g=1.0, T=2 * math.pi)
        preds = predict_two_mode_resonances(p, [(1, 2)], 3, 0.1, 10.0)
        roots = [r.value for r in preds if r.order == 3]
        assert len(roots) == 1
        assert roots[0] == pytest.approx(1.7963525311128357, abs=1e-6)

    def test_pair_23_matches_shifted_border(self):
        p = params(g=1.0, T=2 * math.pi)
        preds = predict_two_mode_resonances(p, [(2, 3)], 7, 0.1, 10.0)
        roots = [r.value for r in preds if r.order == 7]
        assert any(abs(r - 1.65) < 0.1 for r in roots)

    def test_empty_when_no_root(self):
        # omega_1 + omega_2 >= 2.5 for all g >= 0, so M = 1 has no root
        p = params(g=1.0, T=2 * math.pi)
        preds = predict_two_mode_resonances(p, [(1, 2)], 1, 0.0, 50.0)
        assert preds == []

    def test_residual_below_tolerance(self):
        p = params(g=1.0, T=2 * math.pi)
        for pred in predict_two_mode_resonances(p, [(1, 2), (2, 3)], 8, 0.1, 6.0):
            p2 = PhysicalParams(g=pred.value, kick_strength=0.2, period=p.period)
            resid = (mode_frequency(pred.l, p2) + mode_frequency(pred.lprime, p2)) \
                * p.period - 2 * math.pi * pred.order
            assert abs(resid) < 1e-9
