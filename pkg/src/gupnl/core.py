"""Roots of the generalized-momentum cubic and uncertainty relations.

The generalized momentum is ``P = p (1 + beta p**2)``.  For a given real ``P``
the canonical momenta mapping onto it are the roots of

    beta p**3 + p - P = 0,

one real root and a complex-conjugate pair whenever ``beta > 0``.  Two
independent solvers are provided:

* :func:`cardano_roots` evaluates the closed form built on the intermediate

      A = ([108 P + 12 sqrt(3) sqrt((27 P**2 beta + 4) / beta)] beta**2)**(1/3)

  with a series/Newton fallback where the closed form cancels.
* :func:`oracle_roots` takes companion-matrix eigenvalues of the rescaled cubic
  and polishes them with Newton's method.

Both have vectorised counterparts (:func:`solve_cardano`, :func:`solve_oracle`)
working on numpy arrays; the scalar functions are thin wrappers around them.

Roots are always stored in canonical order: real root, conjugate with
``Im > 0``, conjugate with ``Im < 0``.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, NumericError

#: Below this value of ``beta * P**2`` the closed form is replaced by a series.
SERIES_THRESHOLD = 1e-8

RTOL = 1e-9
ATOL = 1e-12

_SQRT3 = math.sqrt(3.0)
_EPS = np.finfo(float).eps


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    ORACLE = "oracle"
    SERIES = "series"


@dataclass(frozen=True)
class GupParams:
    """Deformation parameter ``beta`` (momentum**-2) and ``hbar``.

    ``beta0`` is the Planck-unit parameter defined through
    ``sqrt(3 beta) hbar == sqrt(beta0) l_p`` with ``l_p = 1``.
    """

    beta: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be finite and > 0, got {self.beta!r}")
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise DomainError(f"hbar must be finite and > 0, got {self.hbar!r}")

    @property
    def beta0(self) -> float:
        return 3.0 * self.beta * self.hbar**2


@dataclass(frozen=True)
class RootTriple:
    """The three canonical momenta mapping onto one generalized momentum."""

    p1: float
    p2: complex
    p3: complex
    source_P: float
    beta: float
    method: Method = Method.CLOSED_FORM

    @property
    def roots(self) -> tuple[complex, complex, complex]:
        return (complex(self.p1), self.p2, self.p3)

    def __iter__(self):
        return iter(self.roots)

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)

    @property
    def is_conjugate_pair(self) -> bool:
        return self.p2 == self.p3.conjugate()


def _check_inputs(P, beta):
    P = np.asarray(P, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if not np.all(np.isfinite(P)):
        raise DomainError("P must be finite")
    if not np.all(np.isfinite(beta)) or np.any(beta <= 0):
        raise DomainError("beta must be finite and > 0")
    return np.broadcast_arrays(P, beta)


def solve_cardano(P, beta):
    """Vectorised closed-form roots.

    Returns ``(p1, p2, series)``: the real root, the upper conjugate root and a
    boolean mask flagging entries computed on the series path.  ``p3`` is
    ``conj(p2)``.
    """
    P, beta = _check_inputs(P, beta)
    sign = np.where(P < 0, -1.0, 1.0)
    # the roots of -P are the negated roots of P; working with |P| keeps the
    # radicand of A free of cancellation
    absP = np.abs(P)
    x = beta * absP**2
    series = (x < SERIES_THRESHOLD) & (absP > 0)
    closed = x >= SERIES_THRESHOLD

    p1 = np.zeros_like(absP)

    with np.errstate(divide="ignore", invalid="ignore"):
        b, q = beta[closed], absP[closed]
        A = np.cbrt((108.0 * q + 12.0 * _SQRT3 * np.sqrt((27.0 * q**2 * b + 4.0) / b)) * b**2)
        u = A / (6.0 * b)
        v = 2.0 / A
        # u - v rewritten as (u**3 - v**3) / (u**2 + u v + v**2) with
        # u**3 - v**3 == P / beta and u v == 1 / (3 beta)
        p1[closed] = (q / b) / (u * u + 1.0 / (3.0 * b) + v * v)

    if np.any(series):
        p1[series] = _series_p1(absP[series], beta[series])

    # pairwise Vieta sum: Im**2 - 3 p1**2 / 4 == 1 / beta.  Summing positives
    # here is better conditioned than sqrt(3)/2 (u + v) once beta P**2 >> 1.
    im = np.sqrt(1.0 / beta + 0.75 * p1**2)
    p1 = sign * p1
    p2 = -0.5 * p1 + 1j * im
    return p1, p2, series


def _series_p1(P, beta):
    x = beta * P**2
    p = P * (1.0 - x + 3.0 * x**2)
    for _ in range(2):
        f = (p - P) + beta * p**3
        p = p - f / (1.0 + 3.0 * beta * p**2)
    return p


def cardano_roots(P: float, params: GupParams) -> RootTriple:
    """Closed-form roots of ``beta p**3 + p - P = 0``.

    ``P == 0`` is handled exactly as ``{0, +i/sqrt(beta), -i/sqrt(beta)}``.
    For ``beta P**2 < SERIES_THRESHOLD`` the real root comes from
    ``P - beta P**3 + 3 beta**2 P**5`` plus two Newton steps and ``method`` is
    reported as ``series``.  On both paths the conjugate pair is rebuilt from
    the real root: ``Re = -p1/2`` and ``Im = sqrt(1/beta + 3 p1**2 / 4)``.
    """
    if not math.isfinite(P):
        raise DomainError(f"P must be finite, got {P!r}")
    if P == 0:
        im = 1.0 / math.sqrt(params.beta)
        return RootTriple(0.0, complex(0.0, im), complex(0.0, -im), 0.0, params.beta, Method.CLOSED_FORM)
    p1, p2, series = solve_cardano(P, params.beta)
    p1, p2 = float(p1), complex(p2)
    method = Method.SERIES if bool(series) else Method.CLOSED_FORM
    return RootTriple(p1, p2, p2.conjugate(), float(P), params.beta, method)


def printed_pair_imaginary(P: float, params: GupParams) -> tuple[float, float]:
    """Imaginary part of the upper conjugate root, two ways.

    Returns ``(printed, vieta)`` where ``printed`` is the frequently quoted
    bracket ``sqrt(3)/2 * (p1/2 + 4/A)`` and ``vieta`` is
    ``sqrt(3)/2 * (p1 + 4/A)``, the value that actually satisfies the cubic.
    They differ by ``sqrt(3)/4 * p1``, so the printed bracket is only correct
    at ``P == 0``.
    """
    b = params.beta
    q = abs(P)
    A = ((108.0 * q + 12.0 * _SQRT3 * math.sqrt((27.0 * q * q * b + 4.0) / b)) * b * b) ** (1.0 / 3.0)
    p1 = A / (6.0 * b) - 2.0 / A
    return 0.5 * _SQRT3 * (p1 / 2.0 + 4.0 / A), 0.5 * _SQRT3 * (p1 + 4.0 / A)


def _companion_eigvals(Q):
    n = Q.shape[0]
    C = np.zeros((n, 3, 3))
    C[:, 0, 1] = -1.0
    C[:, 0, 2] = Q
    C[:, 1, 0] = 1.0
    C[:, 2, 1] = 1.0
    return np.linalg.eigvals(C)


def _newton_polish(q, Q, max_iter):
    q = q.copy()
    for _ in range(max_iter):
        f = q * (q * q + 1.0) - Q
        step = f / (3.0 * q * q + 1.0)
        q = q - step
        if np.all(np.abs(step) <= 4 * _EPS * np.maximum(np.abs(q), 1e-300)):
            break
    f = q * (q * q + 1.0) - Q
    scale = np.abs(q) ** 3 + np.abs(q) + np.abs(Q)
    return q, np.abs(f), scale


def solve_oracle(P, beta, max_iter: int = 60):
    """Vectorised companion-matrix roots with Newton polishing.

    The cubic is rescaled with ``p = q / sqrt(beta)`` to the parameter-free
    form ``q**3 + q - P sqrt(beta) = 0`` before taking eigenvalues.  Returns
    ``(p1, p2)`` as :func:`solve_cardano` does.
    """
    P, beta = _check_inputs(P, beta)
    shape = P.shape
    P, beta = P.ravel(), beta.ravel()
    s = np.sqrt(beta)
    Q = P * s
    ev = _companion_eigvals(Q)

    order = np.argsort(np.abs(ev.imag), axis=1)
    rows = np.arange(len(Q))
    real0 = ev[rows, order[:, 0]].real
    other = np.stack([ev[rows, order[:, 1]], ev[rows, order[:, 2]]], axis=1)
    upper0 = np.where(other[:, 0].imag >= other[:, 1].imag, other[:, 0], other[:, 1])
    upper0 = upper0.real + 1j * np.abs(upper0.imag)

    qr, fr, sr = _newton_polish(real0, Q, max_iter)
    qc, fc, sc = _newton_polish(upper0, Q, max_iter)
    bad = (fr > 16 * _EPS * sr) | (fc > 16 * _EPS * sc) | (qc.imag <= 0)
    if np.any(bad):
        raise NumericError(
            f"oracle failed to converge for {int(bad.sum())} input(s)",
            residuals={"real": fr[bad], "complex": fc[bad]},
        )
    return (qr / s).reshape(shape), (qc / s).reshape(shape)


def oracle_roots(P: float, params: GupParams) -> RootTriple:
    """Roots from companion-matrix eigenvalues, independent of the closed form."""
    if not math.isfinite(P):
        raise DomainError(f"P must be finite, got {P!r}")
    p1, p2 = solve_oracle(P, params.beta)
    p1, p2 = float(p1), complex(p2)
    return RootTriple(p1, p2, p2.conjugate(), float(P), params.beta, Method.ORACLE)


def forward_map(p, params: GupParams):
    """Generalized momentum ``p (1 + beta p**2)`` of a canonical momentum."""
    if not cmath.isfinite(p):
        raise DomainError(f"p must be finite, got {p!r}")
    return p * (1.0 + params.beta * p * p)


def negate_spectrum(roots: RootTriple) -> RootTriple:
    """Root triple of ``-P``: every root negated, canonical order restored."""
    # -p2 has negative imaginary part, so -p3 becomes the new upper root
    return RootTriple(-roots.p1, -roots.p3, -roots.p2, -roots.source_P, roots.beta, roots.method)


def root_sum_identity(roots: RootTriple) -> float:
    """``max_k |p_k + p_l + p_m|`` over the three assignments of ``-p_k = p_l + p_m``."""
    r = roots.roots
    return max(abs(r[k] + r[(k + 1) % 3] + r[(k + 2) % 3]) for k in range(3))


def vieta_residuals(roots: RootTriple) -> dict[str, float]:
    """Absolute residuals of the three Vieta relations of ``beta p**3 + p - P``."""
    a, b, c = roots.roots
    beta, P = roots.beta, roots.source_P
    return {
        "sum": abs(a + b + c),
        "pairwise": abs(a * b + a * c + b * c - 1.0 / beta),
        "product": abs(a * b * c - P / beta),
    }


def vieta_ok(roots: RootTriple) -> bool:
    r = vieta_residuals(roots)
    P, beta = roots.source_P, roots.beta
    return (
        r["sum"] <= 1e-10 * max(1.0, abs(P))
        and r["product"] <= 1e-9 * max(1.0, abs(P / beta))
        and r["pairwise"] <= 1e-9 / beta
    )


def isclose(x, y, rtol: float = RTOL, atol: float = ATOL) -> bool:
    return abs(x - y) <= atol + rtol * max(abs(x), abs(y))


def match_roots(a: RootTriple, b: RootTriple, rtol: float = RTOL, atol: float = ATOL):
    """Best permutation of ``b`` onto ``a``.

    Returns ``(perm, diffs, ok)``: ``b.roots[perm[k]]`` is paired with
    ``a.roots[k]``, ``diffs`` are the paired absolute differences and ``ok``
    tells whether every pair is within the hybrid tolerance.
    """
    ra, rb = a.roots, b.roots
    best = None
    for perm in itertools.permutations(range(3)):
        excess = max(abs(ra[k] - rb[j]) - (atol + rtol * max(abs(ra[k]), abs(rb[j]))) for k, j in enumerate(perm))
        if best is None or excess < best[0]:
            best = (excess, perm)
    perm = best[1]
    diffs = tuple(abs(ra[k] - rb[j]) for k, j in enumerate(perm))
    return perm, diffs, best[0] <= 0


def same_root_set(a: RootTriple, b: RootTriple, rtol: float = RTOL, atol: float = ATOL) -> bool:
    return match_roots(a, b, rtol, atol)[2]


def uncertainty_product(deltaP: float, params: GupParams) -> float:
    """Position uncertainty saturating ``dx dP = hbar/2 (1 + 3 beta dP**2)``."""
    if not deltaP > 0:
        raise DomainError(f"deltaP must be > 0, got {deltaP!r}")
    return 0.5 * params.hbar * (1.0 / deltaP + 3.0 * params.beta * deltaP)


def minimal_length(params: GupParams) -> float:
    return math.sqrt(3.0 * params.beta) * params.hbar


def numerical_minimal_length(params: GupParams) -> tuple[float, float]:
    """Golden-section minimum of :func:`uncertainty_product`.

    The search runs over ``t = log(dP)``; returns ``(dP_min, dx_min)``.
    """
    t0 = -0.5 * math.log(3.0 * params.beta)
    res = optimize.minimize_scalar(
        lambda t: uncertainty_product(math.exp(t), params),
        bracket=(t0 - 5.0, t0 + 0.3, t0 + 5.0),
        method="golden",
        tol=1e-12,
    )
    return math.exp(res.x), float(res.fun)


def dispersion(P: float, mass: float) -> float:
    """Kinetic energy ``P**2 / 2m``."""
    if not mass > 0:
        raise DomainError(f"mass must be > 0, got {mass!r}")
    return P * P / (2.0 * mass)
