"""
Test suite for the integer machinery: factorization, CRT, bi-factorizations
and the roots of x^2 = 1 mod M.
"""
import random
import unittest
from math import gcd
from pathlib import Path
import sys

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from schwinger.numtheory import (
    NoInverse,
    NotCoprime,
    NotSignRoot,
    bifactorization,
    chi,
    crt_solve,
    enumerate_bifactorizations,
    factorize,
    mod_inverse,
    relatively_prime_mod,
    root_pairs,
    root_to_bifactorization,
    split_label_map,
    unit_square_roots,
)
from schwinger.oracles import brute_force_unit_roots


class TestFactorize(unittest.TestCase):
    """Prime-power constituents with L and N"""

    def test_factorize_105(self):
        f = factorize(105)
        rows = [(c.p, c.n, c.m, c.L, c.N) for c in f.constituents]
        self.assertEqual(rows, [(3, 1, 3, 35, 2), (5, 1, 5, 21, 1), (7, 1, 7, 15, 1)])
        self.assertEqual(f.moduli, (3, 5, 7))
        self.assertEqual(len(f), 3)

    def test_factorize_prime_powers(self):
        f = factorize(360)
        self.assertEqual(f.moduli, (8, 9, 5))
        self.assertEqual(f.primes, (2, 3, 5))
        for c in f.constituents:
            self.assertEqual((c.N * c.L) % c.m, 1)

    def test_factorize_one_is_empty(self):
        self.assertEqual(factorize(1).constituents, ())

    def test_factorize_large_prime(self):
        f = factorize(999983)
        self.assertEqual(f.moduli, (999983,))
        self.assertEqual(f.constituents[0].L, 1)

    def test_invalid_modulus(self):
        for bad in (0, -5, True, 2.5):
            with self.assertRaises(ValueError):
                factorize(bad)
        with self.assertRaises(ValueError):
            factorize(2 ** 63)


class TestModularArithmetic(unittest.TestCase):
    """Inverses and the Chinese Remainder Theorem"""

    def test_mod_inverse(self):
        self.assertEqual(mod_inverse(3, 7), 5)
        self.assertEqual(mod_inverse(-1, 10), 9)
        self.assertEqual(mod_inverse(5, 1), 0)
        self.assertEqual(mod_inverse(35, 3), 2)
        self.assertEqual(mod_inverse(21, 5), 1)
        self.assertEqual(mod_inverse(1, 9), 1)

    def test_no_inverse(self):
        with self.assertRaises(NoInverse):
            mod_inverse(6, 9)
        # Domain signals stay catchable as plain validation errors
        with self.assertRaises(ValueError):
            mod_inverse(6, 9)

    def test_crt_solve(self):
        self.assertEqual(crt_solve([(1, 3), (1, 5), (6, 7)]), 76)
        self.assertEqual(crt_solve([(1, 3), (4, 5), (6, 7)]), 34)
        self.assertEqual(crt_solve([]), 0)
        self.assertEqual(crt_solve([(17, 5)]), 2)

    def test_crt_solve_rejects_shared_factor(self):
        with self.assertRaises(NotCoprime):
            crt_solve([(1, 4), (1, 6)])

    def test_crt_matches_residues(self):
        moduli = (8, 9, 5, 7)
        for x in (0, 1, 17, 999, 2519):
            self.assertEqual(crt_solve([(x % m, m) for m in moduli]), x)

    def test_crt_solve_random_instances(self):
        rng = random.Random(2310)
        for _ in range(1000):
            M = rng.randrange(2, 10 ** 6)
            x = rng.randrange(M)
            congruences = [(x % m + rng.randrange(3) * m, m) for m in factorize(M).moduli]
            self.assertEqual(crt_solve(congruences), x, M)


class TestBiFactorization(unittest.TestCase):
    """Coprime splits M = M1 * M2"""

    def test_split_parameters(self):
        bi = bifactorization(105, 15)
        self.assertEqual((bi.M1, bi.M2, bi.L1, bi.L2, bi.N1, bi.N2), (15, 7, 7, 15, 13, 1))
        self.assertEqual((bi.e1 + bi.e2) % 105, 1)
        self.assertFalse(bi.is_canonical)
        self.assertEqual((bi.canonical().M1, bi.canonical().M2), (7, 15))

    def test_non_coprime_split_rejected(self):
        with self.assertRaises(NotCoprime) as ctx:
            bifactorization(12, 2)
        self.assertIn('relatively prime', str(ctx.exception))

    def test_non_divisor_rejected(self):
        with self.assertRaises(ValueError):
            bifactorization(12, 5)

    def test_enumerate_small(self):
        self.assertEqual([(b.M1, b.M2) for b in enumerate_bifactorizations(factorize(12))],
                         [(1, 12), (3, 4)])
        self.assertEqual([(b.M1, b.M2) for b in enumerate_bifactorizations(factorize(105))],
                         [(1, 105), (3, 35), (5, 21), (7, 15)])
        self.assertEqual([(b.M1, b.M2) for b in enumerate_bifactorizations(factorize(1))],
                         [(1, 1)])

    def test_count_law(self):
        f = factorize(2310)
        self.assertEqual(chi(f), 16)
        self.assertEqual(len(enumerate_bifactorizations(f)), 16)
        for M in range(1, 400):
            f = factorize(M)
            expected = sum(1 for d in range(1, M + 1)
                           if M % d == 0 and d * d <= M and gcd(d, M // d) == 1)
            self.assertEqual(len(enumerate_bifactorizations(f)), expected, M)

    def test_relative_primality(self):
        for M in (6, 12, 105, 360, 2310):
            for bi in enumerate_bifactorizations(factorize(M)):
                self.assertIsNone(relatively_prime_mod(bi))
                self.assertIsNone(relatively_prime_mod(bi.swapped()))

    def test_relative_primality_against_scan(self):
        for M in range(1, 10001):
            for bi in enumerate_bifactorizations(factorize(M)):
                self.assertIsNone(relatively_prime_mod(bi), M)
                s_side = (np.arange(1, bi.M1 + 1) * bi.L1) % M
                t_side = (-np.arange(1, bi.M2 + 1) * bi.L2) % M
                self.assertEqual(np.intersect1d(s_side, t_side).tolist(), [0], (M, bi.M1))

    def test_split_label_map(self):
        bi = bifactorization(105, 7)
        images = {split_label_map(bi, s, t) for s in range(7) for t in range(15)}
        self.assertEqual(images, set(range(105)))
        self.assertEqual(split_label_map(bi, 1, 1), 1)
        self.assertEqual(split_label_map(bi, 3, 0) % 7, 3)
        self.assertEqual(split_label_map(bi, 3, 0) % 15, 0)


class TestUnitRoots(unittest.TestCase):
    """Roots of x^2 = 1 mod M and their bi-factorizations"""

    def test_roots_of_105(self):
        self.assertEqual([r.a for r in unit_square_roots(105)],
                         [1, 29, 34, 41, 64, 71, 76, 104])

    def test_roots_of_24_include_exotic(self):
        roots = unit_square_roots(24)
        self.assertEqual([r.a for r in roots], [1, 5, 7, 11, 13, 17, 19, 23])
        self.assertEqual([r.a for r in roots if not r.is_sign_root], [5, 11, 13, 19])

    def test_against_brute_force(self):
        for M in range(1, 10001):
            self.assertEqual([r.a for r in unit_square_roots(M)], brute_force_unit_roots(M), M)

    def test_counting_law_for_odd_moduli(self):
        for M in range(3, 10001, 2):
            f = factorize(M)
            self.assertEqual(len(unit_square_roots(M, f)), 2 ** len(f), M)

    def test_root_to_bifactorization(self):
        f = factorize(105)
        by_value = {r.a: r for r in unit_square_roots(105, f)}
        expected = {1: (1, 105), 76: (7, 15), 34: (3, 35), 64: (5, 21)}
        for a, split in expected.items():
            bi = root_to_bifactorization(by_value[a], f)
            self.assertEqual((bi.M1, bi.M2), split)
        oriented = root_to_bifactorization(by_value[76], f, canonical=False)
        self.assertEqual((oriented.M1, oriented.M2), (15, 7))

    def test_pairs_share_a_split(self):
        f = factorize(105)
        pairs = root_pairs(unit_square_roots(105, f))
        self.assertEqual(len(pairs), 4)
        for low, high in pairs:
            self.assertEqual(low.a + high.a, 105)
            self.assertEqual(root_to_bifactorization(low, f), root_to_bifactorization(high, f))

    def test_root_pairs_cover_every_split_of_odd_moduli(self):
        for M in range(3, 10001, 2):
            f = factorize(M)
            pairs = root_pairs(unit_square_roots(M, f))
            splits = [(b.M1, b.M2) for b in enumerate_bifactorizations(f)]
            mapped = [root_to_bifactorization(low, f) for low, _ in pairs]
            self.assertEqual(len(mapped), len(splits), M)
            self.assertEqual(sorted((b.M1, b.M2) for b in mapped), sorted(splits), M)

    def test_factor_two_gives_distinct_splits(self):
        f = factorize(6)
        roots = unit_square_roots(6, f)
        splits = [(b.M1, b.M2) for b in (root_to_bifactorization(r, f) for r in roots)]
        self.assertEqual(splits, [(1, 6), (2, 3)])

    def test_exotic_root_rejected(self):
        f = factorize(24)
        exotic = [r for r in unit_square_roots(24, f) if r.a == 5][0]
        self.assertEqual(exotic.signs[0], None)
        with self.assertRaises(NotSignRoot):
            root_to_bifactorization(exotic, f)


if __name__ == '__main__':
    unittest.main()
