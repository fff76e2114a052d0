"""Dimensionless parameters, ring grid, homogeneous Bogoliubov spectrum,
and closed-form parametric-resonance predictors.

Units: rescaled 1D ring units, theta in [0, 2pi), unit condensate norm.
The homogeneous state is psi0 = 1/sqrt(2pi) so the mean density is
n = 1/(2pi) and 2 g n = g/pi enters the dispersion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KickKind",
    "PhysicalParams",
    "RingGrid",
    "ModeSpectrum",
    "ResonancePrediction",
    "mode_frequency",
    "mode_coefficients",
    "mode_spectrum",
    "predict_single_mode_resonances",
    "predict_two_mode_resonances",
]


class KickKind(enum.Enum):
    SINGLE = "single"
    DOUBLE_PAIR = "double_pair"


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensionless system constants.

    g: mean-field nonlinearity (>= 0)
    kbar: effective Planck constant (> 0)
    kick_strength: impulse amplitude K (>= 0)
    period: driving period T (> 0)
    epsilon: intra-pair delay for double kicks (0 < epsilon < period)
    """

    g: float
    kick_strength: float
    period: float
    kbar: float = 1.0
    epsilon: float = 0.0
    kick_kind: KickKind = KickKind.SINGLE

    def __post_init__(self):
        vals = (self.g, self.kick_strength, self.period, self.kbar, self.epsilon)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("all parameters must be finite")
        if self.g < 0:
            raise ValueError("g must be >= 0")
        if self.kbar <= 0:
            raise ValueError("kbar must be > 0")
        if self.kick_strength < 0:
            raise ValueError("kick_strength must be >= 0")
        if self.period <= 0:
            raise ValueError("period must be > 0")
        if self.kick_kind is KickKind.DOUBLE_PAIR:
            if not (0.0 < self.epsilon < self.period):
                raise ValueError("double kicks need 0 < epsilon < period")
        elif self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass(frozen=True)
class RingGrid:
    """Uniform angular grid on the ring, theta_j = 2 pi j / n_points."""

    n_points: int
    theta: np.ndarray = field(repr=False, default=None)
    d_theta: float = 0.0

    def __post_init__(self):
        n = self.n_points
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be a power of two, >= 8")
        object.__setattr__(self, "theta", 2.0 * np.pi * np.arange(n) / n)
        object.__setattr__(self, "d_theta", 2.0 * np.pi / n)
        self.theta.setflags(write=False)

    def wavenumbers(self) -> np.ndarray:
        """Integer Fourier wavenumbers in FFT ordering."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points)


def mode_frequency(k: int, params: PhysicalParams) -> float:
    """Eigenfrequency of ring mode k for the homogeneous condensate.

    omega_k = sqrt( (k^2/2) * (kbar^2 k^2/2 + g/pi) ); omega_0 = 0.
    Negative k is treated as |k|.
    """
    k = abs(int(k))
    if k == 0:
        return 0.0
    eps = params.kbar**2 * k**2 / 2.0
    return math.sqrt((k**2 / 2.0) * (eps + params.g / math.pi))


def mode_coefficients(k: int, params: PhysicalParams) -> tuple[float, float, float]:
    """Quasiparticle amplitudes (A_k, U_k, V_k) of the homogeneous condensate.

    A_k = [ eps_k / (eps_k + 2 g n) ]^{1/4} with eps_k = kbar^2 k^2/2 and
    2 g n = g/pi; U_k = (A_k + 1/A_k)/2, V_k = (A_k - 1/A_k)/2, so that
    U_k + V_k = A_k, U_k - V_k = 1/A_k and U_k^2 - V_k^2 = 1 exactly.
    At g = 0: A_k = 1 and V_k = 0 (free-particle limit).
    """
    k = abs(int(k))
    if k < 1:
        raise ValueError("k must be >= 1")
    eps = params.kbar**2 * k**2 / 2.0
    a = (eps / (eps + params.g / math.pi)) ** 0.25
    u = 0.5 * (a + 1.0 / a)
    v = 0.5 * (a - 1.0 / a)
    return a, u, v


@dataclass(frozen=True)
class ModeSpectrum:
    """Analytic coefficients and frequencies for modes k = 1..l_max."""

    l_max: int
    a: np.ndarray
    u: np.ndarray
    v: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        for arr in (self.a, self.u, self.v, self.omega):
            arr.setflags(write=False)


def mode_spectrum(params: PhysicalParams, l_max: int) -> ModeSpectrum:
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    ks = np.arange(1, l_max + 1)
    coef = np.array([mode_coefficients(k, params) for k in ks])
    omega = np.array([mode_frequency(k, params) for k in ks])
    return ModeSpectrum(l_max, coef[:, 0], coef[:, 1], coef[:, 2], omega)


class ResonanceKind(enum.Enum):
    SINGLE_MODE = "single_mode"
    TWO_MODE = "two_mode"


@dataclass(frozen=True)
class ResonancePrediction:
    """One resonance: mode index/pair, harmonic order, and the parameter value."""

    kind: ResonanceKind
    l: int
    order: int
    value: float
    lprime: int | None = None


def _omega_of_g(k: int, g: float, kbar: float) -> float:
    eps = kbar**2 * k**2 / 2.0
    return math.sqrt((k**2 / 2.0) * (eps + g / math.pi))


def predict_single_mode_resonances(
    params: PhysicalParams,
    l_max: int,
    n_max: int,
    sweep: str,
    lo: float,
    hi: float,
) -> list[ResonancePrediction]:
    """Single-mode resonances omega_l = 2 pi n / T inside [lo, hi].

    sweep="T": closed form T* = 2 pi n / omega_l(g).
    sweep="g": invert the dispersion, g* = pi * (2 W^2/l^2 - kbar^2 l^2/2)
    with W = 2 pi n / T; negative g* are discarded.
    """
    if l_max < 1 or n_max < 1:
        raise ValueError("l_max and n_max must be >= 1")
    if not lo < hi:
        raise ValueError("empty sweep range")
    if sweep not in ("T", "g"):
        raise ValueError("sweep must be 'T' or 'g'")
    out = []
    for l in range(1, l_max + 1):
        for n in range(1, n_max + 1):
            if sweep == "T":
                w = mode_frequency(l, params)
                val = 2.0 * math.pi * n / w
            else:
                w_target = 2.0 * math.pi * n / params.period
                val = math.pi * (2.0 * w_target**2 / l**2 - params.kbar**2 * l**2 / 2.0)
                if val < 0:
                    continue
            if lo <= val <= hi:
                out.append(ResonancePrediction(ResonanceKind.SINGLE_MODE, l, n, val))
    out.sort(key=lambda r: r.value)
    return out


def predict_two_mode_resonances(
    params: PhysicalParams,
    pairs: list[tuple[int, int]],
    m_max: int,
    g_lo: float,
    g_hi: float,
    n_grid: int = 1000,
) -> list[ResonancePrediction]:
    """Two-mode resonances (omega_l + omega_l')(g) * T = 2 pi M, solved for g.

    The frequency sum is strictly increasing in g, so each bracket found on
    a uniform grid holds a simple root; bisection refines it to |residual|
    below 1e-9 in the phase condition.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if not 0 <= g_lo < g_hi:
        raise ValueError("need 0 <= g_lo < g_hi")
    for l, lp in pairs:
        if not (1 <= l < lp):
            raise ValueError("pairs must satisfy 1 <= l < l'")
    T, kbar = params.period, params.kbar
    out = []
    gs = np.linspace(g_lo, g_hi, n_grid + 1)
    for l, lp in pairs:
        wsum = np.array([_omega_of_g(l, g, kbar) + _omega_of_g(lp, g, kbar) for g in gs])
        for m in range(1, m_max + 1):
            h = wsum * T - 2.0 * math.pi * m
            sign_change = np.nonzero(np.diff(np.sign(h)) != 0)[0]
            for i in sign_change:
                a, b = gs[i], gs[i + 1]
                fa = h[i]
                for _ in range(200):
                    mid = 0.5 * (a + b)
                    fm = (_omega_of_g(l, mid, kbar) + _omega_of_g(lp, mid, kbar)) * T \
                        - 2.0 * math.pi * m
                    if abs(fm) < 1e-10 or (b - a) < 1e-15:
                        break
                    if (fa < 0) == (fm < 0):
                        a, fa = mid, fm
                    else:
                        b = mid
                out.append(ResonancePrediction(ResonanceKind.TWO_MODE, l, m, mid, lprime=lp))
    out.sort(key=lambda r: r.value)
    return out
