"""Analytic weak-drive machinery: momentum<->quasiparticle basis
transforms, Bessel kick matrices for single and paired kicks, the
one-period linear map over the doubled amplitude space, its iteration,
and closed-form amplitudes near isolated resonances.

All operators act on the symmetric subspace a_l = a_{-l} (parity is
conserved), folded so that a vector (a_0, a_1, .., a_L) carries the
physical norm |a_0|^2 + sum_{l>0} 2 |a_l|^2. The condensate amplitude
a_0 is pinned at 1 and enters the map as an affine drive.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import KickKind, ModeSpectrum, PhysicalParams, RingGrid
from .gpe import CondensateField
from .special import bessel_i_array, bessel_j_array, phi_function

__all__ = [
    "Basis",
    "PerturbationState",
    "KickMatrix",
    "OnePeriodMap",
    "b_from_a",
    "a_from_b",
    "free_ringing",
    "kick_matrix_single",
    "kick_matrix_double",
    "one_period_map",
    "iterate_map",
    "closed_form_amplitude",
    "qkr2_closed_form_wavefunction",
    "floquet_growth_rate",
]


class Basis(enum.Enum):
    MOMENTUM = "momentum"
    BOGOLIUBOV = "bogoliubov"


class KickMatrixKind(enum.Enum):
    SINGLE_KICK = "single"
    DOUBLE_KICK_EFFECTIVE = "double_effective"


@dataclass(frozen=True)
class PerturbationState:
    """Symmetric-subspace amplitudes a_l (or b_l), l = 0..l_max."""

    l_max: int
    amps: np.ndarray
    basis: Basis = Basis.MOMENTUM
    n_kicks: int = 0

    def __post_init__(self):
        if self.amps.shape != (self.l_max + 1,):
            raise ValueError("amps must have length l_max + 1")
        self.amps.setflags(write=False)

    @classmethod
    def condensate(cls, l_max: int) -> "PerturbationState":
        amps = np.zeros(l_max + 1, dtype=complex)
        amps[0] = 1.0
        return cls(l_max, amps)


@dataclass(frozen=True)
class KickMatrix:
    """Folded symmetric-subspace kick matrix on l = 0..l_max."""

    l_max: int
    mat: np.ndarray
    kind: KickMatrixKind

    def __post_init__(self):
        self.mat.setflags(write=False)


def b_from_a(state: PerturbationState, spectrum: ModeSpectrum) -> PerturbationState:
    """Momentum -> quasiparticle basis: b_l = U_l a_l - V_l a_l*."""
    if state.basis is not Basis.MOMENTUM:
        raise ValueError("state is not in the momentum basis")
    a = state.amps
    b = a.copy()
    b[1:] = spectrum.u * a[1:] - spectrum.v * np.conj(a[1:])
    return PerturbationState(state.l_max, b, Basis.BOGOLIUBOV, state.n_kicks)


def a_from_b(state: PerturbationState, spectrum: ModeSpectrum) -> PerturbationState:
    """Quasiparticle -> momentum basis: a_l = U_l b_l + V_l b_l*."""
    if state.basis is not Basis.BOGOLIUBOV:
        raise ValueError("state is not in the quasiparticle basis")
    b = state.amps
    a = b.copy()
    a[1:] = spectrum.u * b[1:] + spectrum.v * np.conj(b[1:])
    return PerturbationState(state.l_max, a, Basis.MOMENTUM, state.n_kicks)


def free_ringing(state: PerturbationState, spectrum: ModeSpectrum, T: float) -> PerturbationState:
    """Ring each quasiparticle mode for time T: b_l <- b_l exp(-i omega_l T)."""
    if state.basis is not Basis.BOGOLIUBOV:
        raise ValueError("free ringing acts in the quasiparticle basis")
    b = state.amps.copy()
    b[1:] = b[1:] * np.exp(-1j * spectrum.omega * T)
    return PerturbationState(state.l_max, b, Basis.BOGOLIUBOV, state.n_kicks)


def _fold(toeplitz_col: np.ndarray, l_max: int) -> np.ndarray:
    """Fold a matrix W[n, l] = w[n - l] on l = -l_max..l_max onto symmetric vectors."""
    n_idx = np.arange(l_max + 1)
    mat = np.empty((l_max + 1, l_max + 1), dtype=complex)
    for l in range(l_max + 1):
        mat[:, l] = toeplitz_col[n_idx - l]
        if l > 0:
            mat[:, l] = mat[:, l] + toeplitz_col[n_idx + l]
    return mat


def kick_matrix_single(params: PhysicalParams, l_max: int,
                       strength: float | None = None) -> KickMatrix:
    """Matrix of exp(-i s cos(theta)/kbar) in the folded momentum basis.

    Unfolded elements are <n|exp(-i z cos)|l> = (-i)^(n-l) J_(n-l)(z)
    with z = s/kbar (Jacobi-Anger); the sign branch follows the kick sign
    through J_n(-z) = (-1)^n J_n(z).
    """
    s = params.kick_strength if strength is None else strength
    z = s / params.kbar
    span = 2 * l_max
    j = bessel_j_array(span, abs(z))
    d = np.arange(-span, span + 1)
    w = np.where(d >= 0, 1.0, (-1.0) ** (np.abs(d) % 2)) * j[np.abs(d)]
    w = w * (-1j) ** (d % 4)
    if z < 0:
        w = w * (-1.0) ** (np.abs(d) % 2)
    col = np.zeros(4 * l_max + 1, dtype=complex)
    col[d + span] = w  # index by offset n - l
    lookup = np.concatenate([col[span:], col[:span]])  # lookup[j] = w_j, j in -2L..2L
    return KickMatrix(l_max, _fold(lookup, l_max), KickMatrixKind.SINGLE_KICK)


def kick_matrix_double(params: PhysicalParams, l_max: int, m_tol: float = 1e-16) -> KickMatrix:
    """Effective one-kick matrix for a closely spaced +K/-K pair.

    Conjugating the short free flight epsilon by the two kick phases and
    dropping terms of order p*epsilon leaves a single effective kick with
    potential (K^2 eps/2) sin^2(theta) - i (K eps kbar/2) cos(theta); the
    imaginary part originates from the commutator [K sin(theta), p] =
    i K kbar cos(theta). Elements are sums over products of J and
    (modified) I Bessel functions of small arguments,
    w_j = (-1)^j sum_m i^m J_m(K^2 eps/(4 kbar)) I_(j-2m)(K eps / 2),
    truncated once terms fall below m_tol.
    """
    K, eps, kbar = params.kick_strength, params.epsilon, params.kbar
    if K * eps > 1.0:
        warnings.warn("K*epsilon > 1: effective pair-kick expansion is inaccurate")
    alpha = K**2 * eps / (4.0 * kbar)
    beta = K * eps / 2.0
    span = 2 * l_max
    m_max = 2
    while m_max < 60 and abs(bessel_j_array(m_max, alpha)[-1]) > m_tol:
        m_max += 2
    i_vals = bessel_i_array(span + 2 * m_max, beta)
    j_vals = bessel_j_array(m_max, alpha)
    w = np.zeros(2 * span + 1, dtype=complex)
    for j_off in range(-span, span + 1):
        acc = 0.0 + 0.0j
        for m in range(-m_max, m_max + 1):
            jm = j_vals[abs(m)] * ((-1.0) ** (abs(m) % 2) if m < 0 else 1.0)
            q = j_off - 2 * m
            iq = i_vals[abs(q)]
            acc += (1j) ** (m % 4) * jm * iq
        w[j_off + span] = (-1.0) ** (abs(j_off) % 2) * acc
    lookup = np.concatenate([w[span:], w[:span]])
    return KickMatrix(l_max, _fold(lookup, l_max), KickMatrixKind.DOUBLE_KICK_EFFECTIVE)


def _period_kick_matrix(params: PhysicalParams, l_max: int) -> KickMatrix:
    if params.kick_kind is KickKind.SINGLE:
        return kick_matrix_single(params, l_max)
    return kick_matrix_double(params, l_max)


@dataclass(frozen=True)
class OnePeriodMap:
    """Linear map over (delta a, delta a*) for one driving period.

    One period acts as kick (momentum basis, with an affine drive from the
    pinned condensate amplitude) followed by quasiparticle ringing over T.
    The composed operator is generally non-unitary.
    """

    l_max: int
    matrix: np.ndarray          # (2L, 2L) over stacked (delta a, delta a*)
    drive: np.ndarray           # (2L,) affine drive per period, after ringing
    kick_block: np.ndarray      # (L, L) kick acting on delta a
    kick_drive: np.ndarray      # (L,) kick column from a_0 = 1
    spectrum: ModeSpectrum
    params: PhysicalParams

    def __post_init__(self):
        for arr in (self.matrix, self.drive, self.kick_block, self.kick_drive):
            arr.setflags(write=False)


def one_period_map(params: PhysicalParams, spectrum: ModeSpectrum, l_max: int) -> OnePeriodMap:
    if l_max != spectrum.l_max:
        raise ValueError("l_max must match the spectrum")
    km = _period_kick_matrix(params, l_max).mat
    m11 = km[1:, 1:]
    u0 = km[1:, 0]
    L = l_max
    U, V = spectrum.u, spectrum.v
    phase = np.exp(-1j * spectrum.omega * params.period)
    # ring = Binv F B on (delta a, delta a*)
    B = np.block([[np.diag(U), -np.diag(V)], [-np.diag(V), np.diag(U)]])
    Binv = np.block([[np.diag(U), np.diag(V)], [np.diag(V), np.diag(U)]])
    F = np.diag(np.concatenate([phase, np.conj(phase)]))
    ring = Binv @ F @ B
    kick2 = np.block([[m11, np.zeros((L, L))], [np.zeros((L, L)), np.conj(m11)]])
    drive2 = np.concatenate([u0, np.conj(u0)])
    return OnePeriodMap(
        l_max=l_max,
        matrix=ring @ kick2,
        drive=ring @ drive2,
        kick_block=m11,
        kick_drive=u0,
        spectrum=spectrum,
        params=params,
    )


def perturbative_energy(amps: np.ndarray, params: PhysicalParams) -> float:
    """Condensate energy of a weakly excited symmetric state, to second order.

    Expansion of the energy functional around the uniform state with
    a_0 = 1: E = g/(4 pi) + sum_{l>=1} [ kbar^2 l^2 |a_l|^2
    + (g/pi)(|a_l|^2 + 2 Re(a_l)^2) ].
    """
    l = np.arange(1, len(amps))
    a = amps[1:]
    e0 = params.g / (4.0 * math.pi)
    kin = float(np.sum(params.kbar**2 * l**2 * np.abs(a) ** 2))
    inter = params.g / math.pi * float(np.sum(np.abs(a) ** 2 + 2.0 * np.real(a) ** 2))
    return e0 + kin + inter


def iterate_map(pmap: OnePeriodMap, state: PerturbationState,
                n_kicks: int) -> tuple[PerturbationState, dict]:
    """Apply the one-period map N times, recording just after each kick.

    Records |a_l(N)|^2 and the perturbative energy at t = N T^+ (after the
    kick, before the subsequent ringing), matching the mean-field recording
    convention. Warns when the excited fraction exceeds 0.1 (model leaves
    its validity window).
    """
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    if state.basis is not Basis.MOMENTUM:
        raise ValueError("state must be in the momentum basis")
    if state.l_max != pmap.l_max:
        raise ValueError("state size must match the map")
    spec, params = pmap.spectrum, pmap.params
    U, V = spec.u, spec.v
    phase = np.exp(-1j * spec.omega * params.period)
    x = state.amps[1:].astype(complex)
    a0 = state.amps[0]
    a_sq = np.empty((n_kicks, pmap.l_max))
    energy = np.empty(n_kicks)
    warned = False
    for n in range(n_kicks):
        x = pmap.kick_block @ x + pmap.kick_drive * a0
        a_sq[n] = np.abs(x) ** 2
        amps = np.concatenate([[a0], x])
        energy[n] = perturbative_energy(amps, params)
        if not warned and float(np.sum(a_sq[n])) > 0.1:
            warnings.warn("excited fraction exceeds 0.1; perturbative map "
                          "is outside its validity window")
            warned = True
        b = U * x - V * np.conj(x)
        b *= phase
        x = U * b + V * np.conj(b)
    amps = np.concatenate([[a0], x])
    out = PerturbationState(pmap.l_max, amps, Basis.MOMENTUM, state.n_kicks + n_kicks)
    return out, {"a_sq": a_sq, "energy": energy}


def _drive_coefficient(l: int, params: PhysicalParams, spectrum: ModeSpectrum) -> complex:
    """Per-kick quasiparticle increment coefficient U_l U_l0 - V_l U_l0*."""
    U, V = spectrum.u[l - 1], spectrum.v[l - 1]
    if params.kick_kind is KickKind.SINGLE:
        ul0 = kick_matrix_single(params, max(l, 2)).mat[l, 0]
    else:
        K, eps, kbar = params.kick_strength, params.epsilon, params.kbar
        if l == 1:
            return -(K * eps / 4.0) * (U - V)
        if l == 2:
            return 1j * (K**2 * eps / (8.0 * kbar)) * (U + V)
        ul0 = kick_matrix_double(params, max(l, 2)).mat[l, 0]
    return U * ul0 - V * np.conj(ul0)


def closed_form_amplitude(l: int, n_kicks: int, params: PhysicalParams,
                          spectrum: ModeSpectrum) -> complex:
    """Quasiparticle amplitude b_l after N kicks in the single-coupling limit.

    Each kick deposits the same increment which then rings freely, so
    b_l(N) = (U_l U_l0 - V_l U_l0*) sum_{n=0}^{N-1} exp(-i n omega_l T),
    a geometric sum with modulus
    |Phi(N omega_l T / 2)| = |sin(N omega_l T/2)/sin(omega_l T/2)|.
    On resonance (omega_l T = 2 pi n) the terms add in phase and
    |b_l(N)| = N |b_l(1)|.
    """
    if not 1 <= l <= spectrum.l_max:
        raise ValueError("l out of range")
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    coef = _drive_coefficient(l, params, spectrum)
    half = 0.5 * spectrum.omega[l - 1] * params.period
    geom = np.exp(-1j * (n_kicks - 1) * half) * phi_function(n_kicks, half)
    return complex(coef * geom)


def qkr2_closed_form_wavefunction(n_kicks: int, params: PhysicalParams,
                                  spectrum: ModeSpectrum, grid: RingGrid) -> CondensateField:
    """Closed-form condensate after N weak kick pairs (modes 1 and 2 only).

    psi(N) = (1/sqrt(2 pi)) [1 + C1 (K eps/2) cos(theta)
                               + C2 (K^2 eps/(4 kbar)) cos(2 theta)]
    with
    C1 = -Phi(N w1)[cos((N-1) w1) - i A1^-2 sin((N-1) w1)],
    C2 =  Phi(N w2)[A2^2 sin((N-1) w2) + i cos((N-1) w2)],
    where w_j = omega_j T / 2. The quadratures |a_1|^2 and |a_2|^2 scale
    as K^2 and K^4 respectively.
    """
    if params.kick_kind is not KickKind.DOUBLE_PAIR:
        raise ValueError("closed-form wavefunction applies to double kicks")
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    K, eps, kbar, T = (params.kick_strength, params.epsilon,
                       params.kbar, params.period)
    w1 = 0.5 * spectrum.omega[0] * T
    w2 = 0.5 * spectrum.omega[1] * T
    a1sq, a2sq = spectrum.a[0] ** 2, spectrum.a[1] ** 2
    ph1, ph2 = (n_kicks - 1) * w1, (n_kicks - 1) * w2
    c1 = -phi_function(n_kicks, w1) * (math.cos(ph1) - 1j * math.sin(ph1) / a1sq)
    c2 = phi_function(n_kicks, w2) * (a2sq * math.sin(ph2) + 1j * math.cos(ph2))
    theta = grid.theta
    psi = (1.0 + c1 * (K * eps / 2.0) * np.cos(theta)
           + c2 * (K**2 * eps / (4.0 * kbar)) * np.cos(2.0 * theta))
    psi = psi / math.sqrt(2.0 * math.pi)
    return CondensateField(grid, psi.astype(complex), n_kicks * T)


def floquet_growth_rate(pmap: OnePeriodMap, tol: float = 1e-12, max_iter: int = 500) -> float:
    """log of the spectral radius of the one-period map (per-kick rate).

    Power iteration first; the frequent marginally stable case has many
    eigenvalues of equal modulus and falls back to a full eigenvalue
    decomposition.
    """
    m = pmap.matrix
    n = m.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
    rho_prev = 0.0
    for _ in range(max_iter):
        y = m @ x
        rho = float(np.linalg.norm(y))
        if rho == 0.0:
            return -math.inf
        x = y / rho
        if abs(rho - rho_prev) < tol * max(1.0, rho):
            z = m @ x
            lam = abs(np.vdot(x, z))
            resid = float(np.linalg.norm(z - np.vdot(x, z) * x))
            if resid < 1e-8 * max(1.0, lam):
                return math.log(lam)
            break
        rho_prev = rho
    rho = float(np.max(np.abs(np.linalg.eigvals(m))))
    return math.log(rho)
