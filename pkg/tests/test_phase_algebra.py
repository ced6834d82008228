"""
Test suite for roots of unity and monomial operators (clock, shift,
commutation phases and periods).
"""
import unittest
from itertools import permutations
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).parent.parent))

from schwinger.numtheory import bifactorization, enumerate_bifactorizations, factorize
from schwinger.phase_algebra import (
    DimensionMismatch,
    MonomialOperator,
    NotCentral,
    PhaseExp,
    commutation_exponent,
    compose,
    factor_operators,
    identity,
    inverse,
    make_shift,
    make_tau,
    period,
    power,
)


class TestPhaseExp(unittest.TestCase):

    def test_reduction_and_label(self):
        p = PhaseExp(6, -1)
        self.assertEqual(p.e, 5)
        self.assertEqual(p.label, "5/6")
        self.assertEqual(p.fraction.denominator, 6)

    def test_group_operations(self):
        a, b = PhaseExp(12, 7), PhaseExp(12, 9)
        self.assertEqual((a + b).e, 4)
        self.assertEqual((a - b).e, 10)
        self.assertEqual((-a).e, 5)

    def test_value(self):
        self.assertAlmostEqual(PhaseExp(4, 1).value, 1j)

    def test_mismatched_dimensions(self):
        with self.assertRaises(DimensionMismatch):
            PhaseExp(4, 1) + PhaseExp(6, 1)


class TestMonomialOperator(unittest.TestCase):

    def test_rejects_non_permutation(self):
        with self.assertRaises(ValueError):
            MonomialOperator(3, (0, 0, 1), (0, 0, 0))
        with self.assertRaises(ValueError):
            make_tau(12, 5)

    def test_compose_applies_right_operand_first(self):
        # (tau(5) T(1))|x> = tau(5)|x - 1> = w^(x - 1) |x - 1>
        product = compose(make_tau(5, 5), make_shift(5, 1))
        self.assertEqual(product.perm, (4, 0, 1, 2, 3))
        self.assertEqual(product.phase, (4, 0, 1, 2, 3))
        self.assertEqual(make_tau(5, 5) @ make_shift(5, 1), product)

    def test_inverse_and_power(self):
        A = compose(make_tau(12, 4), make_shift(12, 5))
        self.assertTrue(compose(A, inverse(A)).is_identity)
        self.assertEqual(power(A, -1), inverse(A))
        self.assertEqual(power(A, 3), compose(A, compose(A, A)))
        self.assertTrue(power(A, period(A)).is_identity)
        self.assertEqual(power(A, 0), identity(12))

    def test_scalar_exponent(self):
        self.assertEqual(identity(7).scalar_exponent(), 0)
        self.assertIsNone(make_tau(7, 7).scalar_exponent())


class TestPeriods(unittest.TestCase):

    def test_clock_and_shift_periods(self):
        for M in range(1, 40):
            self.assertEqual(period(make_tau(M, M)), M)
            self.assertEqual(period(make_shift(M, 1)), M)

    def test_tau_phases(self):
        self.assertEqual(make_tau(6, 3).phase, (0, 2, 4, 0, 2, 4))
        self.assertTrue(make_tau(6, 1).is_identity)

    def test_sub_periods(self):
        self.assertEqual(period(make_tau(12, 4)), 4)
        self.assertEqual(period(make_shift(12, 3)), 4)
        self.assertEqual(period(make_shift(12, 0)), 1)

    def test_phased_cycle_period(self):
        # One cycle of length 3 carrying a total phase of order 2
        A = MonomialOperator(6, (1, 2, 0, 3, 4, 5), (3, 0, 0, 0, 0, 0))
        self.assertEqual(period(A), 6)
        self.assertFalse(power(A, 3).is_identity)

    def test_split_operator_periods(self):
        for bi in enumerate_bifactorizations(factorize(105)):
            self.assertEqual(period(make_tau(105, bi.M1)), bi.M1)
            self.assertEqual(period(make_shift(105, bi.e1)), bi.M1)
            self.assertEqual(period(make_shift(105, bi.e2)), bi.M2)


class TestCommutation(unittest.TestCase):

    def test_clock_shift(self):
        for M in range(1, 31):
            c = commutation_exponent(make_tau(M, M), make_shift(M, 1))
            self.assertEqual(c.e, (-1) % M)

    def test_split_commutator_orientation(self):
        bi = bifactorization(15, 3)
        T1, tau1 = make_shift(15, bi.e1), make_tau(15, bi.M1)
        self.assertEqual(commutation_exponent(T1, tau1).e, bi.L1)
        self.assertEqual(commutation_exponent(tau1, T1).e, (-bi.L1) % 15)
        self.assertEqual(commutation_exponent(make_tau(15, bi.M2), T1).e, 0)

    def test_factor_operators(self):
        f = factorize(105)
        ops = factor_operators(f)
        for (U, V), c in zip(ops, f.constituents):
            self.assertEqual(period(U), c.m)
            self.assertEqual(period(V), c.m)
            self.assertEqual(commutation_exponent(V, U).e, c.L)
        for i in range(3):
            for j in range(3):
                if i != j:
                    self.assertEqual(commutation_exponent(ops[i][1], ops[j][0]).e, 0)
                    self.assertEqual(commutation_exponent(ops[i][0], ops[j][0]).e, 0)

    def test_factor_operators_up_to_512(self):
        for M in range(2, 513):
            f = factorize(M)
            ops = factor_operators(f)
            for (U, V), c in zip(ops, f.constituents):
                self.assertEqual(period(U), c.m, M)
                self.assertEqual(period(V), c.m, M)
                self.assertEqual(commutation_exponent(V, U).e, c.L, M)
            for i, j in permutations(range(len(ops)), 2):
                self.assertEqual(commutation_exponent(ops[i][1], ops[j][0]).e, 0, M)
                self.assertEqual(commutation_exponent(ops[i][1], ops[j][1]).e, 0, M)

    def test_non_central_commutator(self):
        swap = MonomialOperator(3, (1, 0, 2), (0, 0, 0))
        with self.assertLogs('schwinger.phase_algebra', level='DEBUG') as logs:
            with self.assertRaises(NotCentral):
                commutation_exponent(swap, make_tau(3, 3))
        self.assertIn('not a multiple of the identity', logs.output[0])


if __name__ == '__main__':
    unittest.main()
