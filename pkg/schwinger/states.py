"""
Flat-phase states: unit vectors whose nonzero amplitudes share one magnitude.

Every ket of the position, momentum, kq, KQ, q1q2, k1k2 and completely
factorized bases has this form, which keeps overlaps and eigenvalue checks
exact.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Mapping, Optional, Tuple
import cmath
import math

from schwinger.numtheory import factorize
from schwinger.phase_algebra import MonomialOperator, PhaseExp, check_dimension

TOLERANCE = 1e-9


@dataclass(frozen=True)
class FlatPhaseState:
    """
    sum over x in support of w^phase[x] |x> / sqrt(|support|).

    support is sorted and phase is aligned with it, so two states compare
    equal exactly when they are the same vector.
    """
    M: int
    support: Tuple[int, ...]
    phase: Tuple[int, ...]

    def __post_init__(self):
        if not self.support:
            raise ValueError("A state needs a non-empty support.")
        if len(self.support) != len(self.phase):
            raise ValueError("Support and phase tables differ in length.")
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("Support positions must be distinct and sorted.")
        if self.support[0] < 0 or self.support[-1] >= self.M:
            raise ValueError(f"Support positions must lie in [0, {self.M}).")
        object.__setattr__(self, 'phase', tuple(e % self.M for e in self.phase))

    @classmethod
    def from_terms(cls, M: int, terms: Mapping[int, int]) -> 'FlatPhaseState':
        """Build from a {position: exponent} map in any order."""
        support = tuple(sorted(terms))
        return cls(M, support, tuple(terms[x] for x in support))

    @cached_property
    def terms(self) -> Dict[int, int]:
        return dict(zip(self.support, self.phase))

    def phase_at(self, x: int) -> Optional[int]:
        return self.terms.get(x)

    def canonical(self) -> 'FlatPhaseState':
        """Same ray with the phase of the smallest support position set to zero."""
        shift = self.phase[0]
        return FlatPhaseState(self.M, self.support, tuple(e - shift for e in self.phase))

    def equals_up_to_phase(self, other: 'FlatPhaseState') -> bool:
        return self.canonical() == other.canonical()


@dataclass(frozen=True)
class Overlap:
    """
    <a|b> for two flat-phase states.

    When exact, the value is sqrt(magnitude_squared) * w^exponent; otherwise
    only the floating-point value is known.
    """
    M: int
    value: complex
    exact: bool
    magnitude_squared: Optional[Fraction] = None
    exponent: Optional[PhaseExp] = None
    position: Optional[int] = None

    @property
    def magnitude(self) -> float:
        if self.exact:
            return math.sqrt(self.magnitude_squared)
        return abs(self.value)

    @property
    def is_zero(self) -> bool:
        if self.exact:
            return self.magnitude_squared == 0
        return abs(self.value) < TOLERANCE


def position_state(M: int, x: int) -> FlatPhaseState:
    if not 0 <= x < M:
        raise ValueError(f"Position {x} outside [0, {M}).")
    return FlatPhaseState(M, (x,), (0,))


def momentum_state(M: int, k: int) -> FlatPhaseState:
    """Eigenstate of the shift V with eigenvalue w^k: phase(x) = k*x."""
    if not 0 <= k < M:
        raise ValueError(f"Momentum {k} outside [0, {M}).")
    return FlatPhaseState(M, tuple(range(M)), tuple(k * x for x in range(M)))


@lru_cache(maxsize=None)
def _prime_divisors(M: int) -> Tuple[int, ...]:
    return factorize(M).primes


def _shift_invariant(histogram: Counter, M: int) -> bool:
    # A nontrivial shift symmetry forces the sum of roots to vanish; any such
    # symmetry contains one of order p, i.e. a shift by M/p.
    for p in _prime_divisors(M):
        c = M // p
        if all(histogram.get((e + c) % M, 0) == n for e, n in histogram.items()):
            return True
    return False


def overlap(a: FlatPhaseState, b: FlatPhaseState) -> Overlap:
    """
    Inner product <a|b>, conjugate-linear in a.

    Exact cases: disjoint supports, a single shared exponent over the whole
    intersection, and exponent multisets with a shift symmetry (exact zero).
    """
    check_dimension(a.M, b.M)
    M = a.M
    small, large = (a, b) if len(a.support) <= len(b.support) else (b, a)
    large_terms = large.terms
    a_terms, b_terms = a.terms, b.terms
    histogram: Counter = Counter()
    matched = None
    for x in small.support:
        if x not in large_terms:
            continue
        histogram[(b_terms[x] - a_terms[x]) % M] += 1
        matched = x
    norm = len(a.support) * len(b.support)
    if not histogram:
        return Overlap(M, 0j, True, Fraction(0), None)
    if len(histogram) == 1:
        (e, count), = histogram.items()
        phase = PhaseExp(M, e)
        magnitude_squared = Fraction(count * count, norm)
        value = math.sqrt(magnitude_squared) * phase.value
        return Overlap(M, value, True, magnitude_squared, phase,
                       matched if count == 1 else None)
    if _shift_invariant(histogram, M):
        return Overlap(M, 0j, True, Fraction(0), None)
    total = sum(n * cmath.exp(2j * cmath.pi * e / M) for e, n in histogram.items())
    return Overlap(M, total / math.sqrt(norm), False)


def apply(A: MonomialOperator, s: FlatPhaseState) -> FlatPhaseState:
    """Exact image A|s>."""
    check_dimension(A.M, s.M)
    return FlatPhaseState.from_terms(
        s.M, {A.perm[x]: e + A.phase[x] for x, e in zip(s.support, s.phase)}
    )


def is_eigenstate(A: MonomialOperator, s: FlatPhaseState) -> Optional[PhaseExp]:
    """The eigenvalue exponent e with A|s> = w^e |s>, or None."""
    image = apply(A, s)
    if image.support != s.support:
        return None
    diffs = {(e1 - e0) % s.M for e0, e1 in zip(s.phase, image.phase)}
    if len(diffs) != 1:
        return None
    return PhaseExp(s.M, diffs.pop())
