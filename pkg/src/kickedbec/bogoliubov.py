"""Time-dependent Bogoliubov (Castin-Dum) evolution of quasiparticle
modes alongside the condensate.

Each quasiparticle pair (u_k, v_k) obeys the linearized equations with
projectors Q = 1 - |psi><psi| that keep the modes orthogonal to the
instantaneous condensate; the non-condensate number is
N_ex(t) = sum_k <v_k|v_k>.

The ring with an even condensate and cos(theta) kicks conserves parity,
so the +k and -k modes stay exact mirror images; only k = 1..l_max is
propagated and every sum over modes carries the pair degeneracy 2.

Numerical scheme: split the generator into the exact analytic backbone
of the homogeneous condensate (a 2x2 Bogoliubov rotation per Fourier
wavenumber at the exact dispersion) and the ripple remainder driven by
deviations of |psi|^2 and psi^2 from their uniform values. The backbone
is a closed-form matrix exponential applied in Fourier space; the
remainder, which vanishes identically for the unkicked condensate, is
integrated with a midpoint step. Coupled runs work in the frame
rotating at the chemical potential mu = g/(2 pi), where the unkicked
condensate is strictly static, so K = 0 stationarity is exact.

The ripple step is the innermost loop of every sweep; a numba kernel
accelerates it when available, with an equivalent numpy fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

from .core import PhysicalParams, RingGrid, mode_coefficients
from .gpe import (CondensateField, EnergyRecord, EvolutionConfig,
                  _kick_schedule, condensate_energy, mode_population)

__all__ = [
    "BogoliubovModeSet",
    "NexSeries",
    "init_modes",
    "bogoliubov_step",
    "apply_kick_to_modes",
    "noncondensed_number",
    "evolve_coupled",
    "NEX_CUTOFF",
]

# hard validity cutoff: beyond this the linearization has failed
NEX_CUTOFF = 1.0e3

_N_MEAN = 1.0 / (2.0 * math.pi)  # uniform density of the unit-norm ring state
_U0 = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BogoliubovModeSet:
    """Quasiparticle amplitudes (u_k, v_k) on the grid for k = 1..l_max.

    Each row represents the degenerate +-k pair of the even-parity
    system; observables summing over modes count both signs.
    """

    grid: RingGrid
    ks: np.ndarray
    u: np.ndarray
    v: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        L, n = len(self.ks), self.grid.n_points
        if self.u.shape != (L, n) or self.v.shape != (L, n):
            raise ValueError("u, v must have shape (n_modes, n_points)")
        for arr in (self.ks, self.u, self.v):
            arr.setflags(write=False)

    @property
    def l_max(self) -> int:
        return int(self.ks[-1])

    def symplectic_norms(self) -> np.ndarray:
        """<u_k|u_k> - <v_k|v_k> per tracked mode (1 exactly, conserved)."""
        dth = self.grid.d_theta
        return dth * (np.sum(np.abs(self.u) ** 2, axis=1)
                      - np.sum(np.abs(self.v) ** 2, axis=1))

    def condensate_overlaps(self, field: CondensateField) -> np.ndarray:
        """|<psi|u_k>| per tracked mode."""
        return np.abs(self.grid.d_theta * (self.u @ np.conj(field.psi)))


@dataclass(frozen=True)
class NexSeries:
    """Non-condensate number after each kick, with the validity cutoff flag."""

    kicks: np.ndarray
    nex: np.ndarray
    nex_initial: float
    exceeded_cutoff: bool = False
    crossing_kick: int | None = None

    def __post_init__(self):
        self.kicks.setflags(write=False)
        self.nex.setflags(write=False)


def init_modes(params: PhysicalParams, grid: RingGrid, l_max: int) -> BogoliubovModeSet:
    """Quasiparticle modes of the homogeneous condensate.

    (u_k, v_k)(0) = (U_k, V_k) e^{i k theta} / sqrt(2 pi); the symplectic
    norm is exactly 1 per mode and N_ex(0) = 2 sum_k V_k^2.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    if grid.n_points < 8 * l_max:
        raise ValueError("need n_points >= 8 * l_max (anti-aliasing margin)")
    ks = np.arange(1, l_max + 1)
    plane = np.exp(1j * np.outer(ks, grid.theta)) / math.sqrt(2.0 * math.pi)
    coef = np.array([mode_coefficients(int(k), params) for k in ks])
    u = coef[:, 1][:, None] * plane
    v = coef[:, 2][:, None] * plane
    return BogoliubovModeSet(grid, ks, u, v, 0.0)


def noncondensed_number(modes: BogoliubovModeSet) -> float:
    """N_ex = sum over all modes of <v_k|v_k> (both k signs)."""
    return 2.0 * modes.grid.d_theta * float(np.sum(np.abs(modes.v) ** 2))


def apply_kick_to_modes(modes: BogoliubovModeSet, strength: float,
                        kbar: float) -> BogoliubovModeSet:
    """Instantaneous kick: u <- e^{-i s cos/kbar} u, v <- e^{+i s cos/kbar} v.

    The conjugate phase on v follows from the -H block of the linearized
    equations; pointwise unimodular phases preserve the symplectic norm
    exactly.
    """
    phase = np.exp(-1j * (strength / kbar) * np.cos(modes.grid.theta))
    return BogoliubovModeSet(modes.grid, modes.ks, modes.u * phase,
                             modes.v * np.conj(phase), modes.time)


# ---------------------------------------------------------------------------
# backbone: exact homogeneous propagator per Fourier wavenumber
# ---------------------------------------------------------------------------

def _backbone(grid: RingGrid, params: PhysicalParams, dt: float,
              rotating_frame: bool,
              s_mean: complex = _N_MEAN) -> tuple[np.ndarray, np.ndarray]:
    """Exact 2x2 propagator of the mean-field Bogoliubov backbone.

    Per wavenumber l the backbone generator is
    [[eps_l + d0, c], [-conj(c), -(eps_l + d0)]] with
    eps_l = kbar^2 l^2/2, d0 = g n (chemical-potential frame) or 2 g n
    (lab frame), and anomalous coupling c = g * s_mean built from the
    instantaneous spatial mean of psi^2. Carrying the current mean keeps
    the fast u-v rotation of every wavenumber inside this exact
    exponential, so the residual integrated separately cannot alias the
    splitting stroboscope. Returns (E11, E12); the full block is
    [[E11, E12], [conj(E12), conj(E11)]].
    """
    l = grid.wavenumbers()
    eps = 0.5 * params.kbar**2 * l**2
    gn = params.g * _N_MEAN
    c = params.g * s_mean
    d = eps + (gn if rotating_frame else 2.0 * gn)
    hw = np.sqrt(np.maximum(d * d - abs(c) ** 2, 0.0))
    ang = hw * dt / params.kbar
    snc = np.sinc(ang / np.pi) * (dt / params.kbar)
    e11 = np.cos(ang) - 1j * snc * d
    e12 = -1j * snc * c + 0.0j
    i0 = int(np.nonzero(l == 0)[0][0])
    if rotating_frame:
        e11[i0], e12[i0] = 1.0, 0.0
    else:
        e11[i0], e12[i0] = np.exp(-1j * gn * dt / params.kbar), 0.0
    return e11, e12


def _apply_backbone_np(uk, vk, e11, e12):
    tmp = uk * e11
    tmp += vk * e12
    tmp2 = vk * np.conj(e11)
    tmp2 += np.conj(e12) * uk
    uk[:] = tmp
    vk[:] = tmp2


# ---------------------------------------------------------------------------
# ripple remainder: generator minus backbone, vanishes for the uniform state
# ---------------------------------------------------------------------------

def _mean_anomalous(psi: np.ndarray) -> complex:
    """Spatial mean of psi^2 (the q = 0 anomalous-coupling component)."""
    return complex(np.mean(psi * psi))


def _ripple_prep(psi: np.ndarray, params: PhysicalParams, s_mean: complex):
    """Per-substep arrays for the ripple generator (psi frozen)."""
    P = np.abs(psi) ** 2
    w = P * psi
    dP2 = 2.0 * (P - _N_MEAN)
    dS = psi * psi - s_mean
    dth = 2.0 * math.pi / psi.shape[0]
    c3 = dth * float(np.sum(P * P))
    fac = -1j * params.g / params.kbar
    return (psi, np.conj(psi), w, np.conj(w), dP2, dS, np.conj(dS),
            c3, fac, dth, s_mean)


def _ripple_rhs_np(u, v, prep):
    """Reference implementation of the ripple generator action.

    du = fac * [2 dP u + dS v - s1 w - s2 psi + (n s0u + s_mean s0v) u0]
    dv = -fac * [2 dP v + dS* u - s1 w* - s2 psi* + (s_mean* s0u + n s0v) u0]
    with the per-mode functionals s1 = <psi|u> + <psi*|v>,
    s2 = <w|u> + <w*|v> - s1 c3, and uniform-mode reinjection scalars
    s0u = <0|u>, s0v = <0|v> from the fixed l=0 projector of the
    backbone.
    """
    psi, psic, w, wc, dP2, dS, dSc, c3, fac, dth, s_mean = prep
    s1 = dth * (u @ psic + v @ psi)
    s2 = dth * (u @ wc + v @ w) - s1 * c3
    s0u = dth * _U0 * np.sum(u, axis=1)
    s0v = dth * _U0 * np.sum(v, axis=1)
    du = dP2 * u
    du += dS * v
    du -= np.outer(s1, w)
    du -= np.outer(s2, psi)
    du += ((_N_MEAN * s0u + s_mean * s0v) * _U0)[:, None]
    dv = dP2 * v
    dv += dSc * u
    dv -= np.outer(s1, wc)
    dv -= np.outer(s2, psic)
    dv += ((np.conj(s_mean) * s0u + _N_MEAN * s0v) * _U0)[:, None]
    return fac * du, -fac * dv


def _ripple_midpoint_np(u, v, prep, dt, _buffers=None):
    du1, dv1 = _ripple_rhs_np(u, v, prep)
    um = u + (0.5 * dt) * du1
    vm = v + (0.5 * dt) * dv1
    du2, dv2 = _ripple_rhs_np(um, vm, prep)
    u += dt * du2
    v += dt * dv2


if _HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=True)
    def _ripple_rhs_nb(u, v, psi, psic, w, wc, dP2, dS, dSc, c3, fac, dth,
                       s_mean, du, dv):  # pragma: no cover - via wrapper
        L, n = u.shape
        s0f = dth * _U0 * _U0
        for i in range(L):
            sa = 0.0j
            sb = 0.0j
            scu = 0.0j
            scv = 0.0j
            for j in range(n):
                sa += u[i, j] * psic[j] + v[i, j] * psi[j]
                sb += u[i, j] * wc[j] + v[i, j] * w[j]
                scu += u[i, j]
                scv += v[i, j]
            s1 = dth * sa
            s2 = dth * sb - s1 * c3
            r0u = s0f * (_N_MEAN * scu + s_mean * scv)
            r0v = s0f * (np.conj(s_mean) * scu + _N_MEAN * scv)
            for j in range(n):
                ru = (dP2[j] * u[i, j] + dS[j] * v[i, j]
                      - s1 * w[j] - s2 * psi[j] + r0u)
                rv = (dP2[j] * v[i, j] + dSc[j] * u[i, j]
                      - s1 * wc[j] - s2 * psic[j] + r0v)
                du[i, j] = fac * ru
                dv[i, j] = -fac * rv

    @numba.njit(cache=True, fastmath=True)
    def _ripple_midpoint_nb(u, v, psi, psic, w, wc, dP2, dS, dSc, c3, fac,
                            dth, s_mean, dt, um, vm, du, dv):  # pragma: no cover
        L, n = u.shape
        _ripple_rhs_nb(u, v, psi, psic, w, wc, dP2, dS, dSc, c3, fac, dth,
                       s_mean, du, dv)
        h = 0.5 * dt
        for i in range(L):
            for j in range(n):
                um[i, j] = u[i, j] + h * du[i, j]
                vm[i, j] = v[i, j] + h * dv[i, j]
        _ripple_rhs_nb(um, vm, psi, psic, w, wc, dP2, dS, dSc, c3, fac, dth,
                       s_mean, du, dv)
        for i in range(L):
            for j in range(n):
                u[i, j] += dt * du[i, j]
                v[i, j] += dt * dv[i, j]

    @numba.njit(cache=True, fastmath=True)
    def _fourier_apply_nb(Zk, L, e11, e12, kin_field):  # pragma: no cover
        n = Zk.shape[1]
        for i in range(L):
            for j in range(n):
                a = Zk[i, j]
                b = Zk[L + i, j]
                Zk[i, j] = e11[j] * a + e12[j] * b
                Zk[L + i, j] = np.conj(e11[j]) * b + np.conj(e12[j]) * a
        for j in range(n):
            Zk[2 * L, j] = Zk[2 * L, j] * kin_field[j]


def _ripple_step(u, v, psi, params, dt, s_mean=None, buffers=None):
    """Midpoint step of the ripple remainder (in place)."""
    if params.g == 0.0:
        return
    if s_mean is None:
        s_mean = _mean_anomalous(psi)
    prep = _ripple_prep(psi, params, s_mean)
    if _HAVE_NUMBA:
        if buffers is None:
            buffers = tuple(np.empty_like(u) for _ in range(4))
        um, vm, du, dv = buffers
        psi_, psic, w, wc, dP2, dS, dSc, c3, fac, dth, sm = prep
        _ripple_midpoint_nb(u, v, psi_, psic, w, wc, dP2, dS, dSc, c3, fac,
                            dth, sm, dt, um, vm, du, dv)
    else:
        _ripple_midpoint_np(u, v, prep, dt)


def bogoliubov_step(modes: BogoliubovModeSet, field: CondensateField,
                    params: PhysicalParams, dt: float) -> BogoliubovModeSet:
    """Advance the modes by dt with the instantaneous condensate frozen.

    Strang split: midpoint ripple half-steps around the exact lab-frame
    backbone rotation in Fourier space.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if field.grid.n_points != modes.grid.n_points:
        raise ValueError("field and modes must share a grid")
    u = modes.u.copy()
    v = modes.v.copy()
    psi = field.psi.copy()
    s_mean = _mean_anomalous(psi)
    _ripple_step(u, v, psi, params, 0.5 * dt, s_mean)
    e11, e12 = _backbone(modes.grid, params, dt, rotating_frame=False,
                         s_mean=s_mean)
    uk = np.fft.fft(u, axis=1)
    vk = np.fft.fft(v, axis=1)
    _apply_backbone_np(uk, vk, e11, e12)
    u = np.fft.ifft(uk, axis=1)
    v = np.fft.ifft(vk, axis=1)
    _ripple_step(u, v, psi, params, 0.5 * dt, s_mean)
    if not (np.isfinite(u[0, 0]) and np.isfinite(v[0, 0])):
        raise RuntimeError("non-finite quasiparticle amplitudes; reduce dt")
    return BogoliubovModeSet(modes.grid, modes.ks, u, v, modes.time + dt)


def _reorthogonalize(u, v, psi, dth):
    """Project u against psi and v against psi* (secular drift control)."""
    ov_u = dth * (u @ np.conj(psi))
    u -= np.outer(ov_u, psi)
    ov_v = dth * (v @ psi)
    v -= np.outer(ov_v, np.conj(psi))


def _coupled_leg(Z, L, grid, params, tau, n_sub, buffers):
    """Advance the stacked state (u rows, v rows, psi last row) by tau.

    Works in the mu-rotating frame: the condensate row evolves under the
    GP flow minus mu, the mode backbone is the frame variant, and an
    unkicked run is strictly stationary. One stacked FFT pair per
    substep serves field and modes alike.
    """
    dt = tau / n_sub
    u, v, psi = Z[:L], Z[L:2 * L], Z[2 * L]
    l = grid.wavenumbers()
    kin_field = np.exp(-0.5j * params.kbar * l**2 * dt)
    gh = params.g / params.kbar
    mu_h = params.g * _N_MEAN / params.kbar

    def _position(step):
        half = np.exp(-1j * (gh * np.abs(psi) ** 2 - mu_h) * 0.5 * step)
        np.multiply(psi, half, out=psi)
        _ripple_step(u, v, psi, params, step, None, buffers)
        np.multiply(psi, half, out=psi)

    _position(0.5 * dt)
    for i in range(n_sub):
        e11, e12 = _backbone(grid, params, dt, rotating_frame=True,
                             s_mean=_mean_anomalous(psi))
        Zk = np.fft.fft(Z, axis=1)
        if _HAVE_NUMBA:
            _fourier_apply_nb(Zk, L, e11, e12, kin_field)
        else:
            _apply_backbone_np(Zk[:L], Zk[L:2 * L], e11, e12)
            Zk[2 * L] *= kin_field
        Z[:] = np.fft.ifft(Zk, axis=1)
        _position(dt if i < n_sub - 1 else 0.5 * dt)


def evolve_coupled(field: CondensateField, modes: BogoliubovModeSet,
                   params: PhysicalParams, config: EvolutionConfig,
                   cutoff: float = NEX_CUTOFF) -> tuple[NexSeries, list[EnergyRecord]]:
    """Co-evolve condensate and quasiparticle modes through kicked driving.

    Records N_ex and the condensate energy just after every kick; stops
    early once N_ex exceeds the cutoff (the linearization is no longer
    valid there) and flags the crossing.
    """
    if config.dt > params.period / 100.0:
        raise ValueError("dt must be <= period/100")
    if field.grid.n_points != modes.grid.n_points:
        raise ValueError("field and modes must share a grid")
    grid = field.grid
    L = len(modes.ks)
    n = grid.n_points
    Z = np.empty((2 * L + 1, n), dtype=complex)
    Z[:L] = modes.u
    Z[L:2 * L] = modes.v
    Z[2 * L] = field.psi
    u, v, psi = Z[:L], Z[L:2 * L], Z[2 * L]
    buffers = tuple(np.empty((L, n), dtype=complex) for _ in range(4))
    dth = grid.d_theta
    nex0 = noncondensed_number(modes)
    legs = _kick_schedule(params, config.dt)
    kick_phases = [np.exp(-1j * (s / params.kbar) * np.cos(grid.theta))
                   for (_, _, s) in legs]
    kicks, nex_vals, records = [], [], []
    exceeded = False
    crossing = None
    t0 = field.time
    for nkick in range(1, config.n_kicks + 1):
        for (tau, n_sub, _), phase in zip(legs, kick_phases):
            _coupled_leg(Z, L, grid, params, tau, n_sub, buffers)
            psi *= phase
            u *= phase
            v *= np.conj(phase)
        t = t0 + nkick * params.period
        if not (np.isfinite(psi[0]) and np.isfinite(u[0, 0])):
            raise RuntimeError(f"non-finite state at kick {nkick}; reduce dt")
        _reorthogonalize(u, v, psi, dth)
        nex = 2.0 * dth * float(np.sum(np.abs(v) ** 2))
        kicks.append(nkick)
        nex_vals.append(nex)
        if nkick % config.record_stride == 0 or nkick == config.n_kicks:
            f = CondensateField(grid, psi.copy(), t)
            records.append(EnergyRecord(
                kick=nkick, time=t,
                energy=condensate_energy(f, params),
                a1_sq=mode_population(f, 1),
                a2_sq=mode_population(f, 2),
            ))
        if nex > cutoff:
            exceeded = True
            crossing = nkick
            break
    series = NexSeries(np.array(kicks), np.array(nex_vals), nex0,
                       exceeded, crossing)
    return series, records
