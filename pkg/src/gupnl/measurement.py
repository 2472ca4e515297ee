"""Seeded Born-rule sampling of correlated outcome pairs.

Generator
---------
Draws come from Philox4x64-10 (``numpy.random.Philox``), a counter-based
generator.  The 128-bit key is ``SeedSequence(seed).generate_state(2,
uint64)``.  Draw ``i`` is the ``i % 4``-th 64-bit word of counter block
``i // 4``; it is turned into a double with ``u = (x >> 11) * 2**-53`` and the
branch is the first index whose cumulative probability exceeds ``u``.  Draw
``i`` therefore depends only on ``(seed, i)``, and any partition of
``range(n)`` reproduces the serial stream exactly.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Philox, SeedSequence

from .entanglement import TwoParticleState, shannon_entropy
from .errors import DomainError

MIN_EXPECTED_COUNT = 5


class SmallSampleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MeasurementRecord:
    branch_index: int
    outcome_1: complex
    outcome_2: complex
    draw_ordinal: int


def _key(seed: int) -> np.ndarray:
    return SeedSequence(int(seed)).generate_state(2, np.uint64)


def uniforms(seed: int, n: int, start: int = 0) -> np.ndarray:
    """Doubles in ``[0, 1)`` for draws ``start .. start + n - 1``."""
    block, lane = divmod(start, 4)
    bg = Philox(key=_key(seed), counter=[block, 0, 0, 0])
    raw = bg.random_raw(n + lane)[lane:]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def draw_branches(state: TwoParticleState, n: int, seed: int, start: int = 0) -> np.ndarray:
    """Zero-based branch indices for draws ``start .. start + n - 1``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cdf = np.cumsum(state.probabilities)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, uniforms(seed, n, start), side="right")


@dataclass(frozen=True)
class SampleSummary:
    counts: tuple[int, int, int]
    expected_probs: tuple[float, float, float]
    seed: int
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", int(sum(self.counts)))

    @property
    def empirical_freqs(self) -> tuple[float, ...]:
        return tuple(c / self.n for c in self.counts)

    @property
    def chi_square(self) -> float:
        stat = 0.0
        for obs, p in zip(self.counts, self.expected_probs):
            exp = p * self.n
            if exp > 0:
                stat += (obs - exp) ** 2 / exp
            elif obs > 0:
                return math.inf
        return stat

    @property
    def empirical_entropy(self) -> float:
        return shannon_entropy(self.empirical_freqs)

    def merge(self, other: "SampleSummary") -> "SampleSummary":
        if self.expected_probs != other.expected_probs or self.seed != other.seed:
            raise DomainError("can only merge summaries of the same state and seed")
        return SampleSummary(tuple(a + b for a, b in zip(self.counts, other.counts)), self.expected_probs, self.seed)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "counts": list(self.counts),
            "empirical_freqs": list(self.empirical_freqs),
            "expected_probs": list(self.expected_probs),
            "chi_square": self.chi_square,
        }


def summarize(state: TwoParticleState, indices: np.ndarray, seed: int) -> SampleSummary:
    counts = tuple(int(c) for c in np.bincount(indices, minlength=3))
    probs = tuple(float(p) for p in state.probabilities)
    summary = SampleSummary(counts, probs, seed)
    small = [i + 1 for i, p in enumerate(probs) if 0 < p * summary.n < MIN_EXPECTED_COUNT]
    if small:
        warnings.warn(f"expected count below {MIN_EXPECTED_COUNT} for branch(es) {small}", SmallSampleWarning)
    return summary


@dataclass(frozen=True)
class Sample:
    state: TwoParticleState
    indices: np.ndarray
    summary: SampleSummary
    start: int = 0

    def records(self) -> Iterator[MeasurementRecord]:
        roots = self.state.roots.roots
        for k, i in enumerate(self.indices.tolist()):
            p = roots[i]
            yield MeasurementRecord(i + 1, p, -p, self.start + k)


def sample(state: TwoParticleState, n: int, seed: int, start: int = 0) -> Sample:
    """Draw ``n`` branch outcomes with Born probabilities ``|c_i|**2``."""
    idx = draw_branches(state, n, seed, start)
    return Sample(state, idx, summarize(state, idx, seed), start)


def sample_partitioned(state: TwoParticleState, n: int, seed: int, parts: int) -> Sample:
    """Same draws as :func:`sample`, produced as ``parts`` independent substreams."""
    if parts < 1:
        raise DomainError("parts must be >= 1")
    bounds = np.linspace(0, n, parts + 1).astype(int)
    chunks = [draw_branches(state, int(b - a), seed, int(a)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    summaries = [summarize(state, c, seed) for c in chunks]
    summary = summaries[0]
    for s in summaries[1:]:
        summary = summary.merge(s)
    return Sample(state, np.concatenate(chunks), summary)


@dataclass(frozen=True)
class BasisContrast:
    P_basis_outcomes: tuple[tuple[float, float], ...]
    P_basis_entropy: float
    p_basis_outcomes: tuple[tuple[complex, complex], ...]
    p_basis_probs: tuple[float, float, float]
    p_basis_entropy: float


def p_basis_vs_P_basis(state: TwoParticleState) -> BasisContrast:
    """One certain outcome ``(P, -P)`` against the three-way canonical split."""
    P = state.roots.source_P
    roots = state.roots.roots
    probs = tuple(float(p) for p in state.probabilities)
    return BasisContrast(
        P_basis_outcomes=((P, -P),),
        P_basis_entropy=0.0,
        p_basis_outcomes=tuple((p, -p) for p in roots),
        p_basis_probs=probs,
        p_basis_entropy=shannon_entropy(probs),
    )


def verify_correlation(records: Iterable[MeasurementRecord]) -> tuple[bool, MeasurementRecord | None]:
    """``(True, None)`` if every record has ``outcome_2 == -outcome_1``, else the first offender."""
    seen = False
    for rec in records:
        seen = True
        if rec.outcome_2 != -rec.outcome_1:
            return False, rec
    if not seen:
        raise DomainError("empty record stream")
    return True, None
