"""Signed measures on [1, e^{nh}) and their convolution algebra.

A Measure stores one coefficient per lattice point u_k = e^{kh}; c_0 is the
exact mass at u = 1, so the Dirac delta at 1 (the convolution identity) is
(1, 0, 0, ...).  Because every support point is a lattice point, the
multiplicative convolution

    (dA * dB){u_k} = sum_{i+j=k} a_i b_j

is an exact truncated Cauchy product: no smearing rule is needed, and the
ring laws (commutativity, associativity, identity) hold to roundoff.  Mass
pushed beyond the last point is dropped, which is exact for any primitive
evaluated below the grid end since convolution only moves mass upward.

The derivation operator L multiplies a measure by log u, i.e. c_k by kh.
It satisfies the product rule over convolution, and exp* obeys
L exp*(dA) = (L dA) * exp*(dA); read as a triangular system this identity
is the O(n^2) exponential algorithm used below.

All functions treat measures as immutable values and return new objects.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import RangeError
from .grid import LogGrid

FORMAT_TAG = "beurling-measure-v1"


@dataclass(frozen=True, eq=False)
class Measure:
    grid: LogGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=float)
        if arr.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} coefficients, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("measure coefficients must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __repr__(self):
        return f"Measure(h={self.grid.h}, n={self.grid.n})"


def delta_one(grid: LogGrid) -> Measure:
    """The Dirac mass at u = 1, the convolution identity."""
    c = np.zeros(grid.n)
    c[0] = 1.0
    return Measure(grid, c)


def zero(grid: LogGrid) -> Measure:
    return Measure(grid, np.zeros(grid.n))


def add(a: Measure, b: Measure) -> Measure:
    a.grid.require_same(b.grid)
    return Measure(a.grid, a.coeffs + b.coeffs)


def subtract(a: Measure, b: Measure) -> Measure:
    a.grid.require_same(b.grid)
    return Measure(a.grid, a.coeffs - b.coeffs)


def scale(a: Measure, factor: float) -> Measure:
    return Measure(a.grid, a.coeffs * factor)


def negate(a: Measure) -> Measure:
    return scale(a, -1.0)


def variation(a: Measure) -> Measure:
    """The total-variation measure |dA|, coefficient-wise absolute value."""
    return Measure(a.grid, np.abs(a.coeffs))


def convolve(a: Measure, b: Measure) -> Measure:
    """Multiplicative convolution, truncated at the grid end.

    Operands are ordered by a fixed byte key before multiplying, so the
    summation order (and hence the floating-point result) is identical for
    convolve(a, b) and convolve(b, a).
    """
    a.grid.require_same(b.grid)
    x, y = a.coeffs, b.coeffs
    if y.tobytes() < x.tobytes():
        x, y = y, x
    return Measure(a.grid, kernels.mul_trunc(x, y, a.grid.n))


def apply_log(a: Measure) -> Measure:
    """The derivation L: multiply the measure by log u (coefficient k by kh)."""
    k = np.arange(a.grid.n)
    return Measure(a.grid, a.coeffs * (k * a.grid.h))


def tilt(a: Measure, sigma: float) -> Measure:
    """Reweight by u^{-sigma}: coefficient k becomes c_k e^{-sigma k h}.

    Tilting is an exact homomorphism of the truncated algebra: it commutes
    with convolve, exp_star, log_star and invert, and fixes delta_one.  It
    is the standard device for keeping rapidly growing systems inside the
    double-precision range; see the pipeline code for usage.
    """
    k = np.arange(a.grid.n)
    return Measure(a.grid, a.coeffs * np.exp(-sigma * a.grid.h * k))


def exp_star(a: Measure, method: str = "auto", tilt: float | None = None) -> Measure:
    """The convolution exponential exp*(dA) = sum dA^{*m} / m!.

    method "recurrence" is the derivation-identity triangular solve, the
    reference algorithm; "fft" is the Newton iteration in kernels (used
    automatically from n = 2^15 up).  tilt is passed through to the fft
    path; the recurrence always works on raw coefficients.
    """
    if method == "auto":
        method = "fft" if a.grid.n >= (1 << 15) else "recurrence"
    if method == "recurrence":
        e = kernels.exp_recurrence(a.coeffs)
    elif method == "fft":
        e = kernels.exp_newton(a.coeffs, a.grid.h, tilt=tilt)
    else:
        raise ValueError(f"unknown exp* method {method!r}")
    return Measure(a.grid, e)


def log_star(a: Measure) -> Measure:
    """Inverse of exp_star; requires positive mass at u = 1."""
    return Measure(a.grid, kernels.log_recurrence(a.coeffs))


def invert(a: Measure) -> Measure:
    """Convolution inverse: convolve(a, invert(a)) = delta_one."""
    return Measure(a.grid, kernels.invert_recurrence(a.coeffs))


def cancellation_envelope(a: Measure) -> Measure:
    """exp*(|dA|), the positive envelope dominating exp*(dA) coefficient-wise.

    When eps times the envelope is comparable to the exponential itself the
    signed result is cancellation-dominated and should not be trusted.
    """
    return exp_star(variation(a))


def primitive(a: Measure, x: float) -> float:
    """A(x) = integral over [1, x], i.e. the coefficient sum through index
    floor(log x / h).  The lattice point at index K carries the mass of the
    half-open cell ending at e^{(K+1/2)h}; comparisons against continuum
    formulas should use that cell-end abscissa."""
    k = a.grid.index_of(x)
    return float(np.add.reduce(a.coeffs[: k + 1]))


def harmonic_primitive(a: Measure, x: float) -> float:
    """integral over [1, x] of dA(u)/u: sum of c_k e^{-kh} through log x."""
    k = a.grid.index_of(x)
    w = np.exp(-a.grid.h * np.arange(k + 1))
    return float(np.dot(a.coeffs[: k + 1], w))


def mellin(a: Measure, sigma: float) -> float:
    """Truncated Mellin transform sum_k c_k e^{-sigma k h}.

    The sum stops at the grid end; callers probing sigma near 1 must pick a
    grid whose log-length makes the dropped tail negligible (the fitting
    code enforces (sigma - 1) * n * h >= 14).
    """
    k = np.arange(a.grid.n)
    return float(np.dot(a.coeffs, np.exp(-sigma * a.grid.h * k)))


def save_measure(a: Measure, path) -> None:
    """Versioned plain-text format: tag comment, header h=...,n=..., then one
    coefficient per line with exact float round-trip (repr)."""
    with open(path, "w") as fh:
        fh.write(f"# {FORMAT_TAG}\n")
        fh.write(f"h={a.grid.h!r},n={a.grid.n}\n")
        fh.write("\n".join(map(repr, a.coeffs.tolist())))
        fh.write("\n")


def load_measure(path) -> Measure:
    with open(path) as fh:
        return _read_measure(fh)


def _read_measure(fh: io.TextIOBase) -> Measure:
    header = fh.readline().strip()
    while header.startswith("#"):
        header = fh.readline().strip()
    fields = dict(part.split("=", 1) for part in header.split(","))
    grid = LogGrid(h=float(fields["h"]), n=int(fields["n"]))
    coeffs = np.array([float(line) for line in fh if line.strip()])
    return Measure(grid, coeffs)


def relative_gap(a, b) -> float:
    """max |a-b| / max(|a|, |b|) with a floor, the comparison used in tests.

    Accepts measures or plain coefficient arrays.
    """
    x = a.coeffs if isinstance(a, Measure) else np.asarray(a, dtype=float)
    y = b.coeffs if isinstance(b, Measure) else np.asarray(b, dtype=float)
    num = float(np.max(np.abs(x - y)))
    den = max(float(np.max(np.abs(x))), float(np.max(np.abs(y))), 1e-300)
    return num / den
