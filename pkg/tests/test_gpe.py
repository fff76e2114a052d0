import math

import numpy as np
import pytest

from kickedbec.core import KickKind, PhysicalParams, RingGrid
from kickedbec.gpe import (CondensateField, EvolutionConfig, apply_kick_phase,
                           average_energy, condensate_energy, evolve_kicked,
                           init_homogeneous, mode_population, strang_step)
from kickedbec.special import bessel_j_array


@pytest.fixture
def grid():
    return RingGrid(256)


def params(g=1.0, K=0.2, T=10.0, **kw):
    return PhysicalParams(g=g, kick_strength=K, period=T, **kw)


class TestInitHomogeneous:
    def test_amplitude(self, grid):
        f = init_homogeneous(grid)
        assert np.allclose(f.psi, 1.0 / math.sqrt(2 * math.pi))

    def test_unit_norm(self, grid):
        assert init_homogeneous(grid).norm() == pytest.approx(1.0, abs=1e-12)

    def test_energy_is_pure_interaction(self, grid):
        f = init_homogeneous(grid)
        assert condensate_energy(f, params(g=1.0)) == pytest.approx(
            1.0 / (4 * math.pi), rel=1e-12)


class TestStrangStep:
    def test_homogeneous_gets_chemical_potential_phase(self, grid):
        f = init_homogeneous(grid)
        p = params(g=1.3)
        f2 = strang_step(f, p, 0.05)
        expected = f.psi * np.exp(-1j * 1.3 * 0.05 / (2 * math.pi))
        assert np.max(np.abs(f2.psi - expected)) < 1e-14

    def test_plane_wave_free_phase(self, grid):
        l = 3
        psi = np.exp(1j * l * grid.theta) / math.sqrt(2 * math.pi)
        f = CondensateField(grid, psi)
        f2 = strang_step(f, params(g=0.0), 0.02)
        assert np.max(np.abs(f2.psi - psi * np.exp(-0.5j * l**2 * 0.02))) < 1e-13

    def test_norm_exact_per_step(self, grid):
        rng = np.random.default_rng(1)
        psi = init_homogeneous(grid).psi * (
            1 + 0.1 * np.cos(grid.theta) + 0.05j * np.cos(2 * grid.theta))
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.d_theta)
        f = CondensateField(grid, psi)
        f2 = strang_step(f, params(g=2.0), 0.01)
        assert f2.norm() == pytest.approx(1.0, abs=1e-12)

    def test_energy_drift_shrinks_as_dt_squared(self, grid):
        # oracle: the same trajectory at dt/10 is effectively exact
        psi = init_homogeneous(grid).psi * (1 + 0.05 * np.cos(grid.theta))
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.d_theta)
        p = params(g=1.0)
        e0 = condensate_energy(CondensateField(grid, psi), p)

        def drift(dt, n):
            f = CondensateField(grid, psi.copy())
            for _ in range(n):
                f = strang_step(f, p, dt)
            return abs(condensate_energy(f, p) - e0)

        d1 = drift(0.02, 500)
        d2 = drift(0.002, 5000)
        assert d1 < 1e-8
        assert d2 < d1 / 50  # second-order scaling


class TestKickPhase:
    def test_zero_strength_identity(self, grid):
        f = init_homogeneous(grid)
        f2 = apply_kick_phase(f, 0.0, 1.0)
        assert np.array_equal(f.psi, f2.psi)

    def test_jacobi_anger_populations(self, grid):
        # |<l|psi>| = |J_l(K)| after one kick on the uniform state;
        # oracle: direct quadrature of the projection integral
        K = 0.7
        f = apply_kick_phase(init_homogeneous(grid), K, 1.0)
        j = bessel_j_array(4, K)
        for l in range(4):
            proj = np.mean(np.exp(-1j * l * grid.theta) *
                           f.psi * math.sqrt(2 * math.pi))
            assert abs(proj) == pytest.approx(abs(j[l]), abs=1e-12)
            assert mode_population(f, l) == pytest.approx(j[l] ** 2, abs=1e-12)

    def test_opposite_kicks_cancel(self, grid):
        f = init_homogeneous(grid)
        f2 = apply_kick_phase(apply_kick_phase(f, 0.8, 1.0), -0.8, 1.0)
        assert np.max(np.abs(f2.psi - f.psi)) < 1e-12

    def test_density_unchanged(self, grid):
        psi = init_homogeneous(grid).psi * (1 + 0.2 * np.cos(grid.theta))
        f = CondensateField(grid, psi)
        f2 = apply_kick_phase(f, 1.3, 1.0)
        assert np.max(np.abs(np.abs(f2.psi) - np.abs(f.psi))) < 1e-15


class TestCondensateEnergy:
    def test_pure_cosine_mode(self, grid):
        psi = np.cos(grid.theta) / math.sqrt(math.pi)
        f = CondensateField(grid, psi.astype(complex))
        assert condensate_energy(f, params(g=0.0)) == pytest.approx(0.5, rel=1e-12)

    def test_perturbed_state_quadratic_expansion(self, grid):
        # E = g/(4 pi) + d^2 (1/2 + 3 g/(2 pi)) + O(d^4), against quadrature
        g, d = 1.0, 0.01
        psi = (1 / math.sqrt(2 * math.pi)
               + d * np.cos(grid.theta) / math.sqrt(math.pi)).astype(complex)
        f = CondensateField(grid, psi)
        expected = g / (4 * math.pi) + d**2 * (0.5 + 3 * g / (2 * math.pi))
        assert condensate_energy(f, params(g=g)) == pytest.approx(expected, abs=5e-9)


class TestEvolveKicked:
    def test_unkicked_energy_constant(self, grid):
        p = params(g=1.0, K=0.0, T=2.0)
        f, recs = evolve_kicked(init_homogeneous(grid), p,
                                EvolutionConfig(dt=2e-3, n_kicks=100))
        energies = [r.energy for r in recs]
        assert max(abs(e - 1 / (4 * math.pi)) for e in energies) < 1e-10

    def test_norm_conservation_long_run(self, grid):
        p = params(g=1.0, K=0.2, T=1.0)
        f, _ = evolve_kicked(init_homogeneous(grid), p,
                             EvolutionConfig(dt=1e-3, n_kicks=1000,
                                             record_stride=1000))
        assert abs(f.norm() - 1.0) < 1e-10

    def test_parity_conservation(self, grid):
        p = params(g=1.0, K=0.3, T=4.0)
        f, _ = evolve_kicked(init_homogeneous(grid), p,
                             EvolutionConfig(dt=4e-3, n_kicks=50,
                                             record_stride=50))
        c = np.fft.fft(f.psi) / grid.n_points
        asym = sum(abs(c[l] - c[-l % 256]) ** 2 for l in range(1, 128))
        assert asym < 1e-20

    def test_double_pair_near_cancellation(self, grid):
        # weak effective kicks: after one pair the populations follow the
        # effective impulse K*eps, far below a single-kick response
        p = params(g=0.0, K=1.0, T=2.0, epsilon=1 / 25,
                   kick_kind=KickKind.DOUBLE_PAIR)
        f, recs = evolve_kicked(init_homogeneous(grid), p,
                                EvolutionConfig(dt=2e-3, n_kicks=1))
        a1 = recs[0].a1_sq
        assert a1 == pytest.approx((1.0 * p.epsilon / 4) ** 2, rel=0.05)

    def test_nonresonant_energy_stays_bounded(self, grid):
        p = params(g=1.0, K=0.2, T=13.0)
        f, recs = evolve_kicked(init_homogeneous(grid), p,
                                EvolutionConfig(dt=13e-3, n_kicks=60))
        e = np.array([r.energy for r in recs])
        e0 = 1 / (4 * math.pi)
        assert np.max(e) - e0 < 0.05  # weak quasi-periodic response only


class TestAverageEnergy:
    def test_constant_series(self):
        recs = [type("R", (), {"kick": k, "energy": 0.25})() for k in range(1, 11)]
        assert average_energy(recs, 10) == pytest.approx(0.25)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            average_energy([], 1)

    def test_sine_squared_mean(self):
        delta = 0.02
        ks = np.arange(1, 1001)
        recs = [type("R", (), {"kick": int(k),
                               "energy": math.sin(delta * k) ** 2 / delta**2})()
                for k in ks]
        mean = average_energy(recs, 1000)
        assert mean == pytest.approx(0.5 / delta**2, rel=0.05)
