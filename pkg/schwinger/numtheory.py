"""
Integer machinery for factorization-reflecting representations.

Factorization into prime-power constituents, modular inverses, the Chinese
Remainder Theorem, coprime bi-factorizations of M and the roots of
x^2 = 1 [mod M].
"""
from dataclasses import dataclass
from functools import reduce
from itertools import combinations, product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import operator

logger = logging.getLogger(__name__)

MAX_MODULUS = 2 ** 63 - 1

# Wheel increments over 7, 11, 13, ... skipping multiples of 2, 3 and 5.
_WHEEL = (4, 2, 4, 2, 4, 6, 2, 6)


class NoInverse(ValueError):
    """Raised when a residue has no inverse modulo m."""


class NotCoprime(ValueError):
    """Raised when moduli that must be pairwise coprime share a factor."""


class NotSignRoot(ValueError):
    """Raised when a root of x^2 = 1 is not +-1 modulo every constituent."""


@dataclass(frozen=True)
class Constituent:
    """One prime-power factor m = p^n of M together with L = M/m and N = L^-1 mod m."""
    p: int
    n: int
    m: int
    L: int
    N: int


@dataclass(frozen=True)
class Factorization:
    M: int
    constituents: Tuple[Constituent, ...]

    @property
    def moduli(self) -> Tuple[int, ...]:
        return tuple(c.m for c in self.constituents)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(c.p for c in self.constituents)

    def __len__(self) -> int:
        return len(self.constituents)


@dataclass(frozen=True)
class BiFactorization:
    """
    A coprime split M = M1 * M2.

    L1 = M/M1, L2 = M/M2, N1 = L1^-1 mod M1 and N2 = L2^-1 mod M2, so that
    N1*L1 + N2*L2 = 1 [mod M].
    """
    M: int
    M1: int
    M2: int
    L1: int
    L2: int
    N1: int
    N2: int

    @property
    def is_canonical(self) -> bool:
        return self.M1 <= self.M2

    @property
    def is_trivial(self) -> bool:
        return self.M1 == 1 or self.M2 == 1

    @property
    def e1(self) -> int:
        """N1*L1 mod M: 1 mod M1 and 0 mod M2."""
        return (self.N1 * self.L1) % self.M

    @property
    def e2(self) -> int:
        """N2*L2 mod M: 0 mod M1 and 1 mod M2."""
        return (self.N2 * self.L2) % self.M

    def canonical(self) -> 'BiFactorization':
        if self.is_canonical:
            return self
        return bifactorization(self.M, self.M2)

    def swapped(self) -> 'BiFactorization':
        return bifactorization(self.M, self.M2)


@dataclass(frozen=True)
class UnitRoot:
    """A root a of a^2 = 1 [mod M] with its residue modulo every constituent."""
    M: int
    a: int
    sign_pattern: Tuple[int, ...]
    moduli: Tuple[int, ...]

    @property
    def is_sign_root(self) -> bool:
        return all(q == 1 % m or q == m - 1 for q, m in zip(self.sign_pattern, self.moduli))

    @property
    def signs(self) -> Tuple[Optional[int], ...]:
        """+1 / -1 per constituent, None where the residue is neither (exotic)."""
        out = []
        for q, m in zip(self.sign_pattern, self.moduli):
            if q == 1 % m:
                out.append(1)
            elif q == m - 1:
                out.append(-1)
            else:
                out.append(None)
        return tuple(out)


def _check_modulus(M: int, name: str = "M") -> None:
    if isinstance(M, bool) or not isinstance(M, int):
        raise ValueError(f"{name} must be an integer.")
    if M < 1:
        raise ValueError(f"{name} must be a positive integer, got {M}.")
    if M > MAX_MODULUS:
        raise ValueError(f"{name} must not exceed 2^63 - 1.")


def _prime_powers(M: int) -> List[Tuple[int, int]]:
    """Trial division with a 2,3,5 wheel. Returns [(p, n), ...] by increasing p."""
    found = []
    rest = M
    for p in (2, 3, 5):
        n = 0
        while rest % p == 0:
            rest //= p
            n += 1
        if n:
            found.append((p, n))
    p = 7
    step = 0
    while p * p <= rest:
        if rest % p == 0:
            n = 0
            while rest % p == 0:
                rest //= p
                n += 1
            found.append((p, n))
        p += _WHEEL[step]
        step = (step + 1) % len(_WHEEL)
    if rest > 1:
        found.append((rest, 1))
    return found


def mod_inverse(a: int, m: int) -> int:
    """
    Inverse of a modulo m.

    Args:
        a: Residue to invert (any integer; reduced mod m)
        m: Modulus, m >= 1

    Returns:
        The residue b in [0, m) with a*b = 1 [mod m]; 0 when m = 1.

    Raises:
        NoInverse: gcd(a, m) != 1
    """
    _check_modulus(m, "m")
    if m == 1:
        return 0
    if gcd(a % m, m) != 1:
        raise NoInverse(f"{a} has no inverse modulo {m}.")
    return pow(a, -1, m)


def factorize(M: int) -> Factorization:
    """
    Decompose M into its prime-power constituents m_j = p_j^n_j.

    Args:
        M: Positive integer, at most 2^63 - 1

    Returns:
        Factorization with L_j = M/m_j and N_j = L_j^-1 mod m_j for every
        constituent; empty for M = 1.
    """
    _check_modulus(M)
    constituents = []
    for p, n in _prime_powers(M):
        m = p ** n
        L = M // m
        constituents.append(Constituent(p=p, n=n, m=m, L=L, N=mod_inverse(L, m)))
    return Factorization(M=M, constituents=tuple(constituents))


def crt_solve(congruences: Sequence[Tuple[int, int]]) -> int:
    """
    Solve x = r_j [mod m_j] for pairwise coprime moduli.

    Args:
        congruences: List of (r_j, m_j) pairs

    Returns:
        x in [0, prod m_j), computed as sum r_j N_j L_j mod M.

    Raises:
        NotCoprime: Two moduli share a factor
    """
    moduli = [m for _, m in congruences]
    for m in moduli:
        _check_modulus(m, "modulus")
    for mi, mj in combinations(moduli, 2):
        if gcd(mi, mj) != 1:
            raise NotCoprime(f"Moduli {mi} and {mj} are not coprime.")
    M = reduce(operator.mul, moduli, 1)
    x = 0
    for r, m in congruences:
        L = M // m
        x += r * mod_inverse(L, m) * L
    return x % M


def bifactorization(M: int, M1: int) -> BiFactorization:
    """
    Build the split M = M1 * (M/M1), keeping the given orientation.

    Raises:
        ValueError: M1 does not divide M
        NotCoprime: M1 and M/M1 are not relatively prime
    """
    _check_modulus(M)
    _check_modulus(M1, "M1")
    if M % M1 != 0:
        raise ValueError(f"{M1} does not divide {M}.")
    M2 = M // M1
    if gcd(M1, M2) != 1:
        raise NotCoprime(
            f"Split {M1}*{M2} is not allowed: the factors must be relatively prime."
        )
    L1, L2 = M // M1, M // M2
    return BiFactorization(
        M=M, M1=M1, M2=M2, L1=L1, L2=L2,
        N1=mod_inverse(L1, M1), N2=mod_inverse(L2, M2),
    )


def enumerate_bifactorizations(f: Factorization) -> List[BiFactorization]:
    """
    All coprime bi-factorizations of M, one per unordered split.

    Each prime-power constituent lies wholly inside M1 or M2, so the splits
    correspond to subsets of constituents modulo complement: 2^(N-1) of them.

    Returns:
        Canonical splits (M1 <= M2) sorted by M1.
    """
    moduli = f.moduli
    seen = set()
    splits = []
    for mask in range(1 << max(len(moduli) - 1, 0)):
        # The last constituent always goes to the complement, fixing one representative per pair.
        M1 = 1
        for j, m in enumerate(moduli[:-1]):
            if mask >> j & 1:
                M1 *= m
        bi = bifactorization(f.M, M1).canonical()
        if bi.M1 not in seen:
            seen.add(bi.M1)
            splits.append(bi)
    splits.sort(key=lambda b: b.M1)
    return splits


def chi(f: Factorization) -> int:
    """Number of coprime bi-factorizations, 2^(N-1); 1 for M = 1."""
    return 1 << max(len(f) - 1, 0)


def relatively_prime_mod(bi: BiFactorization) -> Optional[Tuple[int, int]]:
    """
    Check that s*L1 + t*L2 = 0 [mod M] holds on [1, M1] x [1, M2] only at (M1, M2).

    Returns:
        None when only the trivial solution exists, otherwise the first
        non-trivial (s, t) found.
    """
    M = bi.M
    for s in range(1, bi.M1 + 1):
        need = (-s * bi.L1) % M
        # t*L2 = t*M1 ranges over multiples of M1 below M for t in [1, M2].
        if need % bi.L2:
            continue
        t = need // bi.L2 or bi.M2
        if (s, t) != (bi.M1, bi.M2):
            return (s, t)
    return None


def split_label_map(bi: BiFactorization, s: int, t: int) -> int:
    """x = s*N1*L1 + t*N2*L2 [mod M], the CRT solution of x = s [M1], x = t [M2]."""
    return (s * bi.e1 + t * bi.e2) % bi.M


def _constituent_unit_roots(c: Constituent) -> List[int]:
    m = c.m
    if c.p != 2:
        return sorted({1 % m, m - 1})
    if c.n == 1:
        return [1]
    if c.n == 2:
        return [1, 3]
    half = m // 2
    return [1, half - 1, half + 1, m - 1]


def unit_square_roots(M: int, f: Optional[Factorization] = None) -> List[UnitRoot]:
    """
    Every a in [0, M) with a^2 = 1 [mod M].

    Roots are assembled by CRT from the square roots of 1 modulo each
    constituent, so powers of two beyond 4 contribute four roots each rather
    than two.

    Args:
        M: Positive modulus
        f: Optional precomputed factorization of M

    Returns:
        Roots sorted by a, each carrying its per-constituent residues.
    """
    f = f or factorize(M)
    if f.M != M:
        raise ValueError("Factorization does not belong to M.")
    moduli = f.moduli
    per_constituent = [_constituent_unit_roots(c) for c in f.constituents]
    roots = []
    for pattern in product(*per_constituent):
        a = crt_solve(list(zip(pattern, moduli)))
        roots.append(UnitRoot(M=M, a=a, sign_pattern=tuple(pattern), moduli=moduli))
    roots.sort(key=lambda r: r.a)
    exotic = sum(1 for r in roots if not r.is_sign_root)
    if exotic:
        logger.info(f"M={M} has {exotic} roots of unity squared that are not sign roots")
    return roots


def root_pairs(roots: Sequence[UnitRoot]) -> List[Tuple[UnitRoot, UnitRoot]]:
    """Group roots into {a, M - a} pairs, smaller root first."""
    by_value: Dict[int, UnitRoot] = {r.a: r for r in roots}
    pairs = []
    for r in roots:
        partner = by_value[(r.M - r.a) % r.M]
        if r.a <= partner.a:
            pairs.append((r, partner))
    return pairs


def root_to_bifactorization(root: UnitRoot, f: Factorization,
                            canonical: bool = True) -> BiFactorization:
    """
    Map a sign root to the split M1 = prod{m_r : q_r = +1}, M2 = prod{m_r : q_r = -1}.

    The constituent 2 has the single root 1 and is placed on the +1 side.

    Raises:
        NotSignRoot: Some residue q_r is not +-1 modulo m_r
    """
    if root.M != f.M:
        raise ValueError("Root and factorization belong to different moduli.")
    if not root.is_sign_root:
        raise NotSignRoot(
            f"Root {root.a} mod {root.M} has residues {root.sign_pattern} that are not all +-1."
        )
    M1 = 1
    for q, m in zip(root.sign_pattern, root.moduli):
        if q == 1 % m:
            M1 *= m
    bi = bifactorization(f.M, M1)
    return bi.canonical() if canonical else bi
