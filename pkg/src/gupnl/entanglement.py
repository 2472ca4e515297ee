"""Two-particle zero-total-momentum state and its entanglement.

Particle 1 carries generalized momentum ``P`` and particle 2 carries ``-P``.
Expanding each in canonical momenta gives the correlated state

    sum_i alpha_i gamma_i |p_i, -p_i>  (normalized),

which is diagonal in the product basis of the three branches.  The branches
are treated as an orthonormal three-level basis even though two of the labels
are complex.  No measure or degeneracy weighting is applied to
``alpha_i gamma_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GupParams, RootTriple, cardano_roots, forward_map, negate_spectrum
from .errors import DegenerateInputError, DomainError, InvariantViolation
from .representations import CoefficientVector

LN3 = math.log(3.0)
LN2 = math.log(2.0)


@dataclass(frozen=True)
class TwoParticleState:
    roots: RootTriple
    alpha: CoefficientVector
    gamma: CoefficientVector
    c: tuple[complex, complex, complex]
    norm_constant: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(np.array(self.c)) ** 2

    def coefficient_matrix(self) -> np.ndarray:
        """3x3 amplitudes in the product basis ``|p_i> (x) |-p_j>``."""
        return np.diag(np.array(self.c, dtype=complex))

    @property
    def partner_roots(self) -> RootTriple:
        return negate_spectrum(self.roots)


@dataclass(frozen=True)
class SchmidtData:
    lambdas: tuple[float, ...]
    entropy_nats: float

    @property
    def entropy_bits(self) -> float:
        return self.entropy_nats / LN2


def shannon_entropy(probs) -> float:
    """``-sum p ln p`` in nats with ``0 ln 0 = 0``."""
    return max(0.0, -float(sum(p * math.log(p) for p in probs if p > 0)))


def build_entangled_state(P: float, alpha, gamma, params: GupParams) -> TwoParticleState:
    """Correlated state ``c_i = alpha_i gamma_i / N`` over the roots of ``P``."""
    alpha = alpha if isinstance(alpha, CoefficientVector) else CoefficientVector.of(alpha)
    gamma = gamma if isinstance(gamma, CoefficientVector) else CoefficientVector.of(gamma)
    for name, v in (("alpha", alpha), ("gamma", gamma)):
        if not v.is_normalized:
            raise DomainError(f"{name} must be normalized (sum |c|^2 = 1), got {v.norm_squared!r}")
    roots = cardano_roots(P, params)
    raw = [a * g for a, g in zip(alpha, gamma)]
    norm = math.sqrt(sum(abs(r) ** 2 for r in raw))
    if norm == 0.0:
        raise DegenerateInputError("all products alpha_i gamma_i vanish; the correlated state does not exist")
    c = tuple(r / norm for r in raw)
    return TwoParticleState(roots, alpha, gamma, c, norm)


def schmidt(state: TwoParticleState) -> SchmidtData:
    """Schmidt spectrum of a diagonal state: ``lambda_i = |c_i|**2``, sorted descending."""
    probs = state.probabilities
    lam = tuple(sorted((float(p) for p in probs / probs.sum()), reverse=True))
    return SchmidtData(lam, shannon_entropy(lam))


def schmidt_svd(matrix) -> SchmidtData:
    """Schmidt spectrum of an arbitrary bipartite coefficient matrix by SVD."""
    s = np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)
    lam = s**2
    lam = lam / lam.sum()
    return SchmidtData(tuple(float(x) for x in lam), shannon_entropy(lam))


def bell_benchmark() -> SchmidtData:
    """Schmidt data of ``(|+,-> + |-,+>) / sqrt(2)``."""
    amp = 1.0 / math.sqrt(2.0)
    # rows: particle 1 in {+, -}; columns: particle 2 in {+, -}
    return schmidt_svd([[0.0, amp], [amp, 0.0]])


@dataclass(frozen=True)
class CorrelationReport:
    partner_is_negated: bool
    conditional_entropy: float
    mutual_information: float
    marginal_entropy: float
    branch_conservation: tuple[complex, complex, complex]
    partner_forward_residual: float


def correlation_structure(state: TwoParticleState) -> CorrelationReport:
    """Check that particle 2 always sits on ``-p_i`` when particle 1 is on ``p_i``.

    Raises :class:`InvariantViolation` if the coefficient matrix has
    off-diagonal support.
    """
    M = state.coefficient_matrix()
    if np.any(M[~np.eye(3, dtype=bool)] != 0):
        raise InvariantViolation("state has off-diagonal support")
    joint = np.abs(M) ** 2
    p1 = joint.sum(axis=1)
    p2 = joint.sum(axis=0)
    h_joint = shannon_entropy(joint.ravel())
    h1 = shannon_entropy(p1)
    h2 = shannon_entropy(p2)

    partner = state.partner_roots
    # partner root of branch i, taken from the canonical order of -P
    pairs = (complex(partner.p1), partner.p3, partner.p2)
    negated = all(q == -r for q, r in zip(pairs, state.roots.roots))
    conservation = tuple(r + q for r, q in zip(state.roots.roots, pairs))
    params = GupParams(state.roots.beta)
    fwd = max(abs(forward_map(q, params) + state.roots.source_P) for q in pairs)
    return CorrelationReport(
        partner_is_negated=negated,
        conditional_entropy=h_joint - h1,
        mutual_information=h1 + h2 - h_joint,
        marginal_entropy=h1,
        branch_conservation=conservation,
        partner_forward_residual=fwd,
    )
