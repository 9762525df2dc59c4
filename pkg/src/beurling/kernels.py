"""Low-level coefficient kernels for the truncated convolution algebra.

Everything here works on plain float64 arrays indexed by lattice position;
the Measure wrapper and grid bookkeeping live one layer up.  Two exponential
algorithms are provided: the O(n^2) weighted-coefficient recurrence (the
derivation identity L exp* = (L a) * exp* read as a triangular solve) and an
O(n log n) Newton iteration on top of FFT products.

Conditioning note: the exponential of a signed sequence can be dominated by
cancellation; relative accuracy is only meaningful when the positive
envelope exp*(|a|) stays within a few orders of magnitude of the result.
For the nonnegative inputs arising from prime densities both paths are
stable, and rapidly growing inputs are handled by an exact exponential
"tilt" e^{-s k h} that commutes with exp* (it is the algebra homomorphism
induced by the measure weight u^{-s}).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

_DIRECT_WORK_LIMIT = 1 << 16


def mul_trunc(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Cauchy product of a and b truncated to m coefficients (length exactly m)."""
    la = min(len(a), m)
    lb = min(len(b), m)
    if la * lb <= _DIRECT_WORK_LIMIT:
        full = np.convolve(a[:la], b[:lb])[:m]
    else:
        size = next_fast_len(la + lb - 1)
        full = irfft(rfft(a[:la], size) * rfft(b[:lb], size), size)[:m]
    if len(full) < m:
        full = np.concatenate([full, np.zeros(m - len(full))])
    return full


def exp_recurrence(a: np.ndarray) -> np.ndarray:
    """exp* by the triangular recurrence m e_m = sum_{k=1..m} k a_k e_{m-k}."""
    n = len(a)
    e = np.zeros(n)
    e[0] = math.exp(a[0])
    w = np.arange(n) * a
    for m in range(1, n):
        e[m] = np.dot(w[1 : m + 1], e[m - 1 :: -1]) / m
    return e


def log_recurrence(e: np.ndarray) -> np.ndarray:
    """Inverse of exp_recurrence; requires e[0] > 0."""
    if not e[0] > 0.0:
        raise ValueError("log* needs a positive mass at u = 1")
    n = len(e)
    a = np.zeros(n)
    a[0] = math.log(e[0])
    ka = np.zeros(n)
    for m in range(1, n):
        s = np.dot(ka[1:m], e[m - 1 : 0 : -1]) if m > 1 else 0.0
        a[m] = (m * e[m] - s) / (m * e[0])
        ka[m] = m * a[m]
    return a


def invert_recurrence(a: np.ndarray) -> np.ndarray:
    """Convolution inverse; requires a[0] != 0."""
    if a[0] == 0.0:
        raise ValueError("inverse needs nonzero mass at u = 1")
    n = len(a)
    b = np.zeros(n)
    b[0] = 1.0 / a[0]
    for m in range(1, n):
        b[m] = -np.dot(a[1 : m + 1], b[m - 1 :: -1]) / a[0]
    return b


def _exp_newton_monic(a: np.ndarray) -> np.ndarray:
    # Doubling iteration with a[0] = 0.  Invariant entering each round:
    # e = exp(a) mod x^m and r = e^{-1} mod x^{ceil(m/2)}; r is refined twice
    # per round so the logarithm below sees a full-precision reciprocal.
    n = len(a)
    e = np.array([1.0])
    r = np.array([1.0])
    m = 1
    while m < n:
        m2 = min(2 * m, n)
        r = 2.0 * np.concatenate([r, np.zeros(m - len(r))]) - mul_trunc(mul_trunc(e, r, m), r, m)
        r = 2.0 * np.concatenate([r, np.zeros(m2 - len(r))]) - mul_trunc(mul_trunc(e, r, m2), r, m2)
        de = e * np.arange(len(e))
        t = mul_trunc(de, r, m2)
        lg = np.zeros(m2)
        lg[1:] = t[1:] / np.arange(1, m2)
        corr = -lg
        top = min(len(a), m2)
        corr[:top] += a[:top]
        corr[0] += 1.0
        e = mul_trunc(e, corr, m2)
        m = m2
    return e


def estimate_tilt(a: np.ndarray, h: float) -> float:
    """Growth-rate guess for a nonnegative coefficient profile, clipped to [0, 2].

    The log-slope between the dominant head and tail entries approximates s
    when a_k ~ e^{s k h}; tilting by it keeps Newton intermediates O(1).
    """
    n = len(a)
    q = n // 4
    if q < 1:
        return 0.0
    head = np.abs(a[:q])
    tail = np.abs(a[-q:])
    mh = float(head.max())
    mt = float(tail.max())
    if mh == 0.0 or mt == 0.0:
        return 0.0
    ih = int(np.argmax(head))
    it = n - q + int(np.argmax(tail))
    if it <= ih:
        return 0.0
    slope = math.log(mt / mh) / ((it - ih) * h)
    return float(min(2.0, max(0.0, slope)))


def exp_newton(a: np.ndarray, h: float, tilt: float | None = None) -> np.ndarray:
    """exp* via Newton/FFT with an automatic conditioning tilt.

    tilt = s replaces a_k by a_k e^{-s k h}, exponentiates, and scales back;
    exactness of the tilt homomorphism makes the round trip free of model
    error.  Signed inputs default to s = 0, nonnegative ones to a slope
    estimate.  Raises OverflowError when the untilted result cannot be
    represented in double precision.
    """
    n = len(a)
    if tilt is None:
        tilt = estimate_tilt(a, h) if np.all(a >= 0.0) else 0.0
    k = np.arange(n)
    if tilt != 0.0:
        az = a * np.exp(-tilt * h * k)
    else:
        az = a.astype(float, copy=True)
    a0 = az[0]
    az[0] = 0.0
    e = _exp_newton_monic(az)
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(e))
    worst = float(np.max(log_mag + tilt * h * k) + a0)
    if worst > 708.0:
        raise OverflowError(
            "exp* result exceeds the double range; keep the computation in a "
            "weighted (tilted) representation instead"
        )
    e *= math.exp(a0)
    if tilt != 0.0:
        e *= np.exp(tilt * h * k)
    return e
