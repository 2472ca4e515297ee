"""Position and momentum representations of generalized-momentum eigenstates.

A generalized-momentum eigenstate is a superposition of three canonical plane
waves, one per root of the cubic:

    <x|P> = (2 pi hbar)**-1/2 * sum_k c_k exp(i p_k x / hbar)

and its canonical-momentum representation is a comb of deltas at the roots.
The complex roots make two of the plane waves grow or decay exponentially in
``x``; this is evaluated as is, with an explicit overflow guard.

Note on the integration measure: :func:`measure_weight` uses
``1 / (1 + beta P**2)`` while the commutator quoted alongside it,
``[x, P] = i hbar (1 + 3 beta P**2)``, carries a factor 3.  Both are kept as
written; no reconciliation is attempted.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import GupParams, RootTriple, forward_map
from .errors import DegenerateInputError, DomainError, RangeError

#: Largest ``|Im(p) x / hbar|`` evaluated before raising :class:`RangeError`.
EXPONENT_LIMIT = 700.0

NORM_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientVector:
    """Three complex expansion amplitudes, one per root."""

    c1: complex
    c2: complex
    c3: complex

    @classmethod
    def of(cls, values) -> "CoefficientVector":
        values = tuple(complex(v) for v in values)
        if len(values) != 3:
            raise DomainError(f"expected 3 coefficients, got {len(values)}")
        return cls(*values)

    @classmethod
    def uniform(cls) -> "CoefficientVector":
        c = 1.0 / math.sqrt(3.0)
        return cls(c, c, c)

    def __iter__(self):
        return iter((self.c1, self.c2, self.c3))

    def as_array(self) -> np.ndarray:
        return np.array(tuple(self), dtype=complex)

    @property
    def norm_squared(self) -> float:
        return sum(abs(c) ** 2 for c in self)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOL


@dataclass(frozen=True)
class Normalized:
    coeffs: CoefficientVector
    scale: float


def validate_coefficients(coeffs) -> Normalized:
    """Rescale to unit norm; ``scale`` is the factor that was applied.

    Vectors already normalized within ``NORM_TOL`` are returned untouched with
    ``scale == 1``, which makes the operation idempotent.
    """
    if not isinstance(coeffs, CoefficientVector):
        coeffs = CoefficientVector.of(coeffs)
    if not all(cmath.isfinite(c) for c in coeffs):
        raise DomainError("coefficients must be finite")
    norm = math.sqrt(coeffs.norm_squared)
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize the zero vector")
    if abs(norm * norm - 1.0) <= NORM_TOL:
        return Normalized(coeffs, 1.0)
    scale = 1.0 / norm
    return Normalized(CoefficientVector(*(c * scale for c in coeffs)), scale)


@dataclass(frozen=True)
class EigenfunctionSpec:
    roots: RootTriple
    coeffs: CoefficientVector
    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise DomainError("hbar must be > 0")


def plane_wave(x: float, p: complex, hbar: float = 1.0) -> complex:
    """``exp(i p x / hbar) / sqrt(2 pi hbar)`` for real ``x`` and complex ``p``."""
    p = complex(p)
    growth = -p.imag * x / hbar
    if abs(growth) > EXPONENT_LIMIT:
        raise RangeError(f"plane wave exponent {growth:.6g} exceeds +-{EXPONENT_LIMIT:g}")
    return cmath.exp(1j * p * x / hbar) / math.sqrt(2.0 * math.pi * hbar)


def eigenfunction(x: float, spec: EigenfunctionSpec) -> complex:
    return sum(c * plane_wave(x, p, spec.hbar) for c, p in zip(spec.coeffs, spec.roots))


def _central_d1(f, x, h, order):
    if order == 2:
        return (f(x + h) - f(x - h)) / (2 * h)
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def _central_d3(f, x, h, order):
    if order == 2:
        return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)
    return (
        -f(x + 3 * h) + 8 * f(x + 2 * h) - 13 * f(x + h) + 13 * f(x - h) - 8 * f(x - 2 * h) + f(x - 3 * h)
    ) / (8 * h**3)


def ode_residual(
    spec: EigenfunctionSpec,
    P: float,
    x: float,
    mode: str = "analytic",
    h: float | None = None,
    order: int = 2,
) -> float:
    """``|-i hbar psi' + i beta hbar**3 psi''' - P psi|`` at ``x``.

    ``mode="analytic"`` differentiates each plane wave exactly, so the residual
    reduces to ``sum_k c_k (p_k (1 + beta p_k**2) - P) wave_k``.
    ``mode="finite_difference"`` uses central stencils of step ``h`` and the
    given ``order`` (2 or 4) for both derivatives.
    """
    hbar = spec.hbar
    beta = spec.roots.beta
    params = GupParams(beta, hbar)
    if mode == "analytic":
        total = 0j
        for c, p in zip(spec.coeffs, spec.roots):
            total += c * (forward_map(p, params) - P) * plane_wave(x, p, hbar)
        return abs(total)
    if mode != "finite_difference":
        raise DomainError(f"unknown mode {mode!r}")
    if h is None or not h > 0:
        raise DomainError("finite_difference mode needs a step h > 0")
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")

    def psi(y):
        return eigenfunction(y, spec)

    d1 = _central_d1(psi, x, h, order)
    d3 = _central_d3(psi, x, h, order)
    return abs(-1j * hbar * d1 + 1j * beta * hbar**3 * d3 - P * psi(x))


def term_residual(p: complex, x: float, hbar: float = 1.0) -> float:
    """``|-i hbar d/dx w - p w|`` for a single plane wave ``w``, derivative taken exactly."""
    w = plane_wave(x, p, hbar)
    return abs(-1j * hbar * (1j * p / hbar) * w - p * w)


def gaussian(u: float, width: float) -> float:
    """Unit-mass Gaussian of standard deviation ``width``."""
    return math.exp(-0.5 * (u / width) ** 2) / (width * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class CombTerm:
    center: float
    imag_offset: float
    coefficient: complex
    value: complex


@dataclass(frozen=True)
class CombValue:
    amplitude: complex
    terms: tuple[CombTerm, ...]


def momentum_comb(p_query: float, spec: EigenfunctionSpec, width: float) -> CombValue:
    """Gaussian-regularized ``<p|P> = sum_k c_k delta(p - p_k)``.

    Each delta is replaced by a unit-mass Gaussian of standard deviation
    ``width`` centred at ``Re(p_k)``.  The imaginary part of each root is not
    representable on the real ``p`` axis and is returned as ``imag_offset``.
    """
    if not width > 0:
        raise DomainError("width must be > 0")
    terms = []
    for c, p in zip(spec.coeffs, spec.roots):
        v = c * gaussian(p_query - p.real, width)
        terms.append(CombTerm(p.real, p.imag, c, v))
    return CombValue(sum(t.value for t in terms), tuple(terms))


def measure_weight(P: float, params: GupParams) -> float:
    """Identity-resolution weight ``1 / (1 + beta P**2)``."""
    return 1.0 / (1.0 + params.beta * P * P)


def measure_integral(params: GupParams, lo: float = -math.inf, hi: float = math.inf) -> float:
    """Closed-form integral of :func:`measure_weight` via ``arctan``."""
    s = math.sqrt(params.beta)
    return (math.atan(s * hi) - math.atan(s * lo)) / s


def measure_quadrature(params: GupParams, lo: float = -math.inf, hi: float = math.inf) -> float:
    """Adaptive quadrature of :func:`measure_weight` over ``[lo, hi]``."""
    opts = dict(args=(params,), epsabs=0.0, epsrel=1e-12, limit=200)
    if math.isinf(lo) or math.isinf(hi):
        val, _ = integrate.quad(measure_weight, lo, hi, **opts)
        return val
    # breakpoints around the peak of width 1/sqrt(beta)
    w = 1.0 / math.sqrt(params.beta)
    pts = [p for p in (-100 * w, -w, 0.0, w, 100 * w) if lo < p < hi]
    val, _ = integrate.quad(measure_weight, lo, hi, points=pts or None, **opts)
    return val
