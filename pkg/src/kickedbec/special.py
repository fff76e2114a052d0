"""Special functions for kick matrices and resonance envelopes.

Bessel functions are generated by downward Miller recurrence with
sum-rule normalization; only modest orders and arguments are needed
(kick strengths K <~ a few, orders up to ~60), where the recurrence
is accurate to ~1e-13.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["phi_function", "bessel_j_array", "bessel_i_array"]

# extra orders above n_max before starting the downward recurrence
_MILLER_PAD = 30


def phi_function(n_kicks: int, x: float) -> float:
    """Coherent-sum kernel sin(N x)/sin(x), with removable singularities filled.

    At x = m*pi the analytic limit is N*(-1)**(m*(N-1)): all N phasors
    exp(2i n x) align and the sum attains its extremal modulus.
    """
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    s = math.sin(x)
    if abs(s) < 1e-12:
        m = round(x / math.pi)
        return float(n_kicks * (-1) ** ((m * (n_kicks - 1)) % 2))
    return math.sin(n_kicks * x) / s


def bessel_j_array(n_max: int, z: float) -> np.ndarray:
    """Bessel J_n(z) for n = 0..n_max at real z, via Miller's algorithm.

    Downward recurrence J_{n-1} = (2n/z) J_n - J_{n+1} from a padded
    starting order, normalized with J_0 + 2*sum_k J_{2k} = 1.
    Negative z uses J_n(-z) = (-1)^n J_n(z).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if z == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    az = abs(z)
    start = n_max + _MILLER_PAD + int(1.5 * az)
    # two-term downward recurrence with overflow rescaling
    jp, jc = 0.0, 1e-30
    vals = np.empty(start + 1)
    vals[start] = jc
    for n in range(start, 0, -1):
        jm = (2.0 * n / az) * jc - jp
        jp, jc = jc, jm
        vals[n - 1] = jc
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            vals *= 1e-250
    norm = vals[0] + 2.0 * vals[2::2].sum()
    vals /= norm
    out = vals[: n_max + 1].copy()
    if z < 0:
        out[1::2] *= -1.0
    return out


def bessel_i_array(n_max: int, z: float) -> np.ndarray:
    """Modified Bessel I_n(z) for n = 0..n_max at real z, Miller recurrence.

    Downward recurrence I_{n-1} = (2n/z) I_n + I_{n+1}, normalized with
    I_0 + 2*sum_{k>=1} I_k = e^z. Negative z: I_n(-z) = (-1)^n I_n(z).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if z == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    az = abs(z)
    start = n_max + _MILLER_PAD + int(1.5 * az)
    ip, ic = 0.0, 1e-30
    vals = np.empty(start + 1)
    vals[start] = ic
    for n in range(start, 0, -1):
        im = (2.0 * n / az) * ic + ip
        ip, ic = ic, im
        vals[n - 1] = ic
        if abs(ic) > 1e250:
            ip *= 1e-250
            ic *= 1e-250
            vals *= 1e-250
    norm = (vals[0] + 2.0 * vals[1:].sum()) / math.exp(az)
    vals /= norm
    out = vals[: n_max + 1].copy()
    if z < 0:
        out[1::2] *= -1.0
    return out
