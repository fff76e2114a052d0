import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import iv, jv

from kickedbec.special import bessel_i_array, bessel_j_array, phi_function


class TestPhiFunction:
    def test_resonant_limit_is_n(self):
        assert phi_function(7, math.pi) == 7.0

    def test_zero_at_half_period(self):
        assert abs(phi_function(4, math.pi / 2)) < 1e-12

    def test_generic_value(self):
        # sin(1.5)/sin(0.3), cross-checked by the explicit phasor sum
        assert phi_function(5, 0.3) == pytest.approx(3.375386738772704, rel=1e-12)
        s = sum(np.exp(2j * n * 0.3) for n in range(5))
        assert abs(s) == pytest.approx(abs(phi_function(5, 0.3)), rel=1e-12)

    @pytest.mark.parametrize("n,m", [(1, 0), (5, 1), (6, 2), (9, 3), (4, -1)])
    def test_limit_at_multiples_of_pi(self, n, m):
        expected = n * (-1) ** ((m * (n - 1)) % 2)
        assert phi_function(n, m * math.pi) == expected

    @given(st.integers(1, 50), st.floats(-20, 20))
    def test_bounded_by_n(self, n, x):
        assert phi_function(n, x) ** 2 <= n**2 * (1 + 1e-12)

    @given(st.integers(2, 30), st.integers(-6, 6))
    def test_equality_only_on_lattice(self, n, m):
        x = m * math.pi
        assert phi_function(n, x) ** 2 == pytest.approx(n**2)
        assert phi_function(n, x + 0.3) ** 2 < n**2


class TestBesselJ:
    def test_at_zero_is_kronecker(self):
        j = bessel_j_array(10, 0.0)
        assert j[0] == 1.0
        assert np.all(j[1:] == 0.0)

    @pytest.mark.parametrize("z", [0.04, 0.2, 1.0, 3.3, 5.0, 10.0])
    def test_against_scipy(self, z):
        j = bessel_j_array(50, z)
        ref = jv(np.arange(51), z)
        assert np.max(np.abs(j - ref)) < 1e-12

    def test_negative_argument_parity(self):
        j = bessel_j_array(12, -2.5)
        ref = jv(np.arange(13), -2.5)
        assert np.max(np.abs(j - ref)) < 1e-12

    @pytest.mark.parametrize("z", [0.5, 2.0, 5.0])
    def test_sum_rule(self, z):
        # sum_n J_n(z)^2 = 1, truncated at |n| <= 40
        j = bessel_j_array(40, z)
        total = j[0] ** 2 + 2.0 * np.sum(j[1:] ** 2)
        assert total == pytest.approx(1.0, abs=1e-10)


class TestBesselI:
    def test_at_zero_is_kronecker(self):
        i = bessel_i_array(10, 0.0)
        assert i[0] == 1.0
        assert np.all(i[1:] == 0.0)

    @pytest.mark.parametrize("z", [0.02, 0.4, 2.0, 10.0])
    def test_against_scipy(self, z):
        mine = bessel_i_array(50, z)
        ref = iv(np.arange(51), z)
        scale = np.maximum(1.0, np.abs(ref))
        assert np.max(np.abs(mine - ref) / scale) < 1e-12

    def test_negative_argument_parity(self):
        mine = bessel_i_array(9, -1.2)
        ref = iv(np.arange(10), -1.2)
        assert np.max(np.abs(mine - ref)) < 1e-12
