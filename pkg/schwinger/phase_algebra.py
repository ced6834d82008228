"""
Exact arithmetic for M-th roots of unity and monomial operators.

Every operator in scope maps a position ket to a phased position ket,
A|x> = w^phase(x) |perm(x)>, with w = exp(2*pi*i/M). Phases of sub-period
operators live in the same exponent group Z_M (w_d = w^(M/d)).
"""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple
import cmath
import logging

from schwinger.numtheory import Factorization

logger = logging.getLogger(__name__)


class DimensionMismatch(ValueError):
    """Raised when operands live in spaces of different dimension."""


class NotCentral(ValueError):
    """Raised when a group commutator is not a multiple of the identity."""


@dataclass(frozen=True)
class PhaseExp:
    """The root of unity w_M^e with 0 <= e < M."""
    M: int
    e: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("Dimension must be positive.")
        object.__setattr__(self, 'e', self.e % self.M)

    def __add__(self, other: 'PhaseExp') -> 'PhaseExp':
        check_dimension(self.M, other.M)
        return PhaseExp(self.M, self.e + other.e)

    def __neg__(self) -> 'PhaseExp':
        return PhaseExp(self.M, -self.e)

    def __sub__(self, other: 'PhaseExp') -> 'PhaseExp':
        return self + (-other)

    @property
    def fraction(self) -> Fraction:
        """Turns of 2*pi, reduced."""
        return Fraction(self.e, self.M)

    @property
    def value(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.e / self.M)

    @property
    def label(self) -> str:
        return f"{self.e}/{self.M}"


def check_dimension(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"Dimension mismatch: {a} != {b}.")


@dataclass(frozen=True)
class MonomialOperator:
    """
    M x M unitary with one unit-modulus entry per row and column.

    perm[x] is the image position of |x> and phase[x] the exponent it picks up.
    """
    M: int
    perm: Tuple[int, ...]
    phase: Tuple[int, ...]

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("Dimension must be positive.")
        if len(self.perm) != self.M or len(self.phase) != self.M:
            raise ValueError("Permutation and phase tables must have M entries.")
        if sorted(self.perm) != list(range(self.M)):
            raise ValueError("perm is not a bijection on [0, M).")
        object.__setattr__(self, 'phase', tuple(e % self.M for e in self.phase))

    @property
    def is_identity(self) -> bool:
        return all(p == x for x, p in enumerate(self.perm)) and not any(self.phase)

    @property
    def is_diagonal(self) -> bool:
        return all(p == x for x, p in enumerate(self.perm))

    def scalar_exponent(self):
        """e when the operator equals w^e times the identity, else None."""
        if not self.is_diagonal or len(set(self.phase)) != 1:
            return None
        return self.phase[0]

    def __matmul__(self, other: 'MonomialOperator') -> 'MonomialOperator':
        return compose(self, other)


def identity(M: int) -> MonomialOperator:
    return MonomialOperator(M, tuple(range(M)), (0,) * M)


def make_tau(M: int, d: int) -> MonomialOperator:
    """
    Clock operator tau(d) = exp(i 2pi x / d) for a divisor d of M.

    tau(d)|x> = w_d^x |x>, stored as the exponent x*M/d in Z_M. tau(M) is the
    clock U; tau(m_j) = tau(M)^(L_j) is the constituent clock U_j.
    """
    if d < 1 or M % d:
        raise ValueError(f"{d} is not a divisor of {M}.")
    step = M // d
    return MonomialOperator(M, tuple(range(M)), tuple(x * step for x in range(M)))


def make_shift(M: int, s: int) -> MonomialOperator:
    """Translation T(s)|x> = |x - s>; T(1) is the shift V and T(N1*L1) shifts by N1*L1."""
    if M < 1:
        raise ValueError("Dimension must be positive.")
    return MonomialOperator(M, tuple((x - s) % M for x in range(M)), (0,) * M)


def compose(A: MonomialOperator, B: MonomialOperator) -> MonomialOperator:
    """The product A*B (B acts first)."""
    check_dimension(A.M, B.M)
    perm = tuple(A.perm[B.perm[x]] for x in range(A.M))
    phase = tuple(B.phase[x] + A.phase[B.perm[x]] for x in range(A.M))
    return MonomialOperator(A.M, perm, phase)


def inverse(A: MonomialOperator) -> MonomialOperator:
    perm = [0] * A.M
    phase = [0] * A.M
    for x, y in enumerate(A.perm):
        perm[y] = x
        phase[y] = -A.phase[x]
    return MonomialOperator(A.M, tuple(perm), tuple(phase))


def power(A: MonomialOperator, n: int) -> MonomialOperator:
    """A^n by repeated squaring; negative n powers the inverse."""
    if n < 0:
        A, n = inverse(A), -n
    result = identity(A.M)
    base = A
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def _cycles(perm: Sequence[int]) -> List[List[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = perm[x]
        cycles.append(cycle)
    return cycles


def period(A: MonomialOperator) -> int:
    """
    Smallest n >= 1 with A^n = 1.

    Going once around a permutation cycle of length l multiplies each of its
    kets by w^sigma, sigma being the summed phases along the cycle, so the
    cycle's order is l * M / gcd(sigma, M).
    """
    n = 1
    for cycle in _cycles(A.perm):
        sigma = sum(A.phase[x] for x in cycle) % A.M
        order = len(cycle) * (A.M // gcd(sigma, A.M))
        n = n * order // gcd(n, order)
    return n


def commutation_exponent(A: MonomialOperator, B: MonomialOperator) -> PhaseExp:
    """
    The exponent c with A*B = B*A*w^c.

    Raises:
        NotCentral: A*B*A^-1*B^-1 is not a multiple of the identity
    """
    check_dimension(A.M, B.M)
    commutator = compose(compose(A, B), compose(inverse(A), inverse(B)))
    c = commutator.scalar_exponent()
    if c is None:
        logger.debug(f"Commutator in dimension {A.M} is not a multiple of the identity")
        raise NotCentral("The commutator of the two operators is not a scalar.")
    return PhaseExp(A.M, c)


def factor_operators(f: Factorization) -> List[Tuple[MonomialOperator, MonomialOperator]]:
    """The per-constituent pairs (U_j, V_j) = (tau(m_j), T(N_j*L_j))."""
    return [
        (make_tau(f.M, c.m), make_shift(f.M, c.N * c.L))
        for c in f.constituents
    ]
