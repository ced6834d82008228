"""
Verification suite: every structural claim about the representations as an
executable check with a machine-readable result.

Checks are registered under stable ids (the CLI contract) and always reported
in id order, so two runs over the same M produce identical reports.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, isqrt
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple
import logging
import random

import numpy as np

from schwinger.config import Settings, load_settings
from schwinger.numtheory import (
    BiFactorization,
    NotSignRoot,
    chi,
    enumerate_bifactorizations,
    factorize,
    relatively_prime_mod,
    root_pairs,
    root_to_bifactorization,
    split_label_map,
    unit_square_roots,
)
from schwinger.oracles import (
    brute_force_unit_roots,
    gram_matrix,
    is_bijection,
    overlap_matrix,
    to_dense,
)
from schwinger.phase_algebra import (
    commutation_exponent,
    compose,
    factor_operators,
    make_shift,
    make_tau,
    period,
    power,
)
from schwinger.representations import (
    CrtLabelMap,
    Label,
    LabeledBasis,
    build_complete_basis,
    build_conjugate_kq_basis,
    build_k1k2_basis,
    build_kq_basis,
    build_q1q2_basis,
    complete_overlap_exponent,
    kq_overlap_exponent,
    localization_demo,
    momentum_delta,
    position_delta,
    q1q2_overlap_exponent,
)
from schwinger.states import apply, is_eigenstate, momentum_state, overlap, position_state

logger = logging.getLogger(__name__)

PASS, FAIL, SKIPPED = 'pass', 'fail', 'skipped'
DENSE_TOLERANCE = 1e-9
GRAM_TOLERANCE = 1e-12


@dataclass
class CheckResult:
    check_id: str
    M: int
    status: str
    parameters: Dict = field(default_factory=dict)
    reason: Optional[str] = None
    witness: Optional[Dict] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'check_id': self.check_id,
            'M': self.M,
            'status': self.status,
            'parameters': self.parameters,
            'reason': self.reason,
            'witness': self.witness,
            'notes': self.notes,
        }


class _Failure(Exception):
    """Carries the witness of the first violated expectation out of a check."""

    def __init__(self, witness: Dict):
        super().__init__(str(witness))
        self.witness = witness


class _Skip(Exception):
    pass


def _expect(condition: bool, **witness) -> None:
    if not condition:
        raise _Failure(witness)


class SuiteContext:
    """Shared, lazily built inputs of one suite run."""

    def __init__(self, M: int, settings: Settings):
        self.M = M
        self.settings = settings
        self.factorization = factorize(M)

    @cached_property
    def splits(self) -> List[BiFactorization]:
        return enumerate_bifactorizations(self.factorization)

    @cached_property
    def oriented_splits(self) -> List[BiFactorization]:
        """Each canonical split in both orientations (once when M1 = M2 = 1)."""
        out = []
        for bi in self.splits:
            out.append(bi)
            if bi.M1 != bi.M2:
                out.append(bi.swapped())
        return out

    def require(self, budget: int, name: str, size: Optional[int] = None) -> None:
        size = self.M if size is None else size
        if size > budget:
            raise _Skip(f"{name} budget {budget} exceeded by {size}")

    def label_pairs(self, check_id: str, left: LabeledBasis,
                    right: LabeledBasis) -> Tuple[List[Tuple[Label, Label]], bool]:
        """All label pairs when within budget, otherwise a seeded sample."""
        if self.M * self.M <= self.settings.max_pairs:
            return list(product(list(left.labels()), list(right.labels()))), False
        rng = random.Random(f"{check_id}:{self.M}:{left.kind}:{right.scheme}")
        pairs = []
        for _ in range(self.settings.sample_pairs):
            pairs.append((
                tuple(rng.randrange(m) for m in left.scheme),
                tuple(rng.randrange(m) for m in right.scheme),
            ))
        return pairs, True

    def labels(self, check_id: str, basis: LabeledBasis) -> Tuple[List[Label], bool]:
        if self.M <= self.settings.max_pairs:
            return list(basis.labels()), False
        rng = random.Random(f"{check_id}:{self.M}:{basis.kind}:{basis.scheme}")
        return [tuple(rng.randrange(m) for m in basis.scheme)
                for _ in range(self.settings.sample_pairs)], True


def _plain_basis(M: int, kind: str) -> LabeledBasis:
    builder = position_state if kind == 'position' else momentum_state
    return LabeledBasis(M, kind, (M,), lambda label: builder(M, label[0]))


def _split_name(bi: BiFactorization) -> str:
    return f"{bi.M1}*{bi.M2}"


# ---------------------------------------------------------------------------
# Operator algebra


def check_period_minimality(ctx: SuiteContext) -> Dict:
    M = ctx.M
    ctx.require(ctx.settings.max_scan, 'operator size')
    expected = [('U', make_tau(M, M), M), ('V', make_shift(M, 1), M)]
    for c in ctx.factorization.constituents:
        expected.append((f'tau({c.m})', make_tau(M, c.m), c.m))
        expected.append((f'T({c.N * c.L})', make_shift(M, c.N * c.L), c.m))
    for bi in ctx.splits:
        expected.append((f'tau({bi.M1})', make_tau(M, bi.M1), bi.M1))
        expected.append((f'T({bi.e1})', make_shift(M, bi.e1), bi.M1))
        expected.append((f'tau({bi.M2})', make_tau(M, bi.M2), bi.M2))
        expected.append((f'T({bi.e2})', make_shift(M, bi.e2), bi.M2))
    for name, op, want in expected:
        got = period(op)
        _expect(got == want, operator=name, expected=want, got=got)
    return {'operators': len(expected)}


def check_clock_shift_commutator(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'operator size')
    c = commutation_exponent(make_tau(ctx.M, ctx.M), make_shift(ctx.M, 1))
    _expect(c.e == (-1) % ctx.M, pair=['U', 'V'], expected=(-1) % ctx.M, got=c.e)
    return {'exponent': c.label}


def check_split_commutators(ctx: SuiteContext) -> Dict:
    M = ctx.M
    ctx.require(ctx.settings.max_scan, 'operator size')
    checked = 0
    for bi in ctx.oriented_splits:
        tau1, tau2 = make_tau(M, bi.M1), make_tau(M, bi.M2)
        T1, T2 = make_shift(M, bi.e1), make_shift(M, bi.e2)
        cases = [
            ('T(N1L1)', T1, 'tau(M1)', tau1, bi.L1),
            ('T(N2L2)', T2, 'tau(M2)', tau2, bi.L2),
            ('tau(M2)', tau2, 'T(N1L1)', T1, 0),
            ('tau(M1)', tau1, 'T(N2L2)', T2, 0),
            ('tau(M1)', tau1, 'tau(M2)', tau2, 0),
            ('T(N1L1)', T1, 'T(N2L2)', T2, 0),
        ]
        for a_name, A, b_name, B, want in cases:
            got = commutation_exponent(A, B).e
            _expect(got == want % M, split=_split_name(bi), pair=[a_name, b_name],
                    expected=want % M, got=got)
            checked += 1
    return {'pairs': checked, 'splits': len(ctx.oriented_splits)}


def check_factor_operator_algebra(ctx: SuiteContext) -> Dict:
    M = ctx.M
    ctx.require(ctx.settings.max_scan, 'operator size')
    f = ctx.factorization
    ops = factor_operators(f)
    for j, ((U, V), c) in enumerate(zip(ops, f.constituents)):
        for name, op in (('U', U), ('V', V)):
            got = period(op)
            _expect(got == c.m, operator=f'{name}_{j + 1}', expected=c.m, got=got)
        got = commutation_exponent(V, U).e
        _expect(got == c.L % M, pair=[f'V_{j + 1}', f'U_{j + 1}'], expected=c.L % M, got=got)
    for i, j in product(range(len(ops)), repeat=2):
        if i == j:
            continue
        for a_name, A, b_name, B in (
            (f'U_{i + 1}', ops[i][0], f'U_{j + 1}', ops[j][0]),
            (f'V_{i + 1}', ops[i][1], f'V_{j + 1}', ops[j][1]),
            (f'V_{i + 1}', ops[i][1], f'U_{j + 1}', ops[j][0]),
        ):
            got = commutation_exponent(A, B).e
            _expect(got == 0, pair=[a_name, b_name], expected=0, got=got)
    return {'constituents': len(ops)}


def check_dense_operator_oracle(ctx: SuiteContext) -> Dict:
    M = ctx.M
    ctx.require(ctx.settings.max_operator_dense, 'dense operator')
    generators = [('U', make_tau(M, M)), ('V', make_shift(M, 1))]
    for bi in ctx.splits:
        generators.append((f'tau({bi.M1})', make_tau(M, bi.M1)))
        generators.append((f'T({bi.e2})', make_shift(M, bi.e2)))
    rng = random.Random(f"dense-operator-oracle:{M}")
    trials = 40
    for _ in range(trials):
        (na, A), (nb, B), (nc, C) = (rng.choice(generators) for _ in range(3))
        n = rng.randrange(-2 * M, 2 * M + 1)
        AB = compose(A, B)
        err = float(np.max(np.abs(to_dense(AB) - to_dense(A) @ to_dense(B))))
        _expect(err < GRAM_TOLERANCE, operation='compose', operands=[na, nb], error=err)
        An = power(A, n)
        dense_power = np.linalg.matrix_power(to_dense(A) if n >= 0 else to_dense(A).conj().T, abs(n))
        err = float(np.max(np.abs(to_dense(An) - dense_power)))
        _expect(err < GRAM_TOLERANCE * max(1, abs(n)), operation='power', operands=[na, n], error=err)
        _expect(compose(AB, C) == compose(A, compose(B, C)),
                operation='associativity', operands=[na, nb, nc])
    return {'trials': trials, 'generators': len(generators)}


# ---------------------------------------------------------------------------
# Number theory


def _coprime_divisor_splits(M: int) -> int:
    # Independent count: divisors d <= M/d with gcd(d, M/d) = 1.
    count = 0
    for d in range(1, isqrt(M) + 1):
        if M % d == 0 and gcd(d, M // d) == 1:
            count += 1
    return count


def check_bifactorization_count(ctx: SuiteContext) -> Dict:
    f = ctx.factorization
    want = chi(f)
    got = len(ctx.splits)
    _expect(got == want, expected=want, got=got, constituents=len(f))
    _expect(len({bi.M1 for bi in ctx.splits}) == got, duplicates=[bi.M1 for bi in ctx.splits])
    for bi in ctx.splits:
        _expect(bi.is_canonical and gcd(bi.M1, bi.M2) == 1, split=_split_name(bi))
    if isqrt(ctx.M) <= ctx.settings.max_scan:
        oracle = _coprime_divisor_splits(ctx.M)
        _expect(oracle == got, divisor_oracle=oracle, got=got)
    return {'chi': want, 'splits': [[bi.M1, bi.M2] for bi in ctx.splits]}


def check_relative_primality(ctx: SuiteContext) -> Dict:
    brute = ctx.M <= ctx.settings.max_pairs
    for bi in ctx.splits:
        found = relatively_prime_mod(bi)
        _expect(found is None, split=_split_name(bi), solution=found)
        if brute:
            hits = [(s, t) for s in range(1, bi.M1 + 1) for t in range(1, bi.M2 + 1)
                    if (s * bi.L1 + t * bi.L2) % ctx.M == 0]
            _expect(hits == [(bi.M1, bi.M2)], split=_split_name(bi), solutions=hits)
    return {'splits': len(ctx.splits), 'brute_force': brute}


def check_split_label_bijection(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'residue scan')
    for bi in ctx.splits:
        images = [split_label_map(bi, s, t) for s in range(bi.M1) for t in range(bi.M2)]
        _expect(is_bijection(images, ctx.M), split=_split_name(bi))
        one = split_label_map(bi, 1, 1)
        _expect(one == 1 % ctx.M, split=_split_name(bi), label=[1, 1], got=one)
    return {'splits': len(ctx.splits)}


def check_crt_label_bijection(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'residue scan')
    label_map = CrtLabelMap.for_factorization(ctx.factorization)
    for x in range(ctx.M):
        labels = label_map.forward(x)
        back = label_map.backward(labels)
        _expect(back == x, residue=x, labels=list(labels), got=back)
    ones = label_map.backward([1] * len(label_map.moduli))
    _expect(ones == 1 % ctx.M, labels='all ones', got=ones)
    return {'moduli': list(label_map.moduli)}


def check_unit_root_set(ctx: SuiteContext) -> Dict:
    M = ctx.M
    ctx.require(ctx.settings.max_scan, 'residue scan')
    roots = unit_square_roots(M, ctx.factorization)
    values = [r.a for r in roots]
    oracle = brute_force_unit_roots(M)
    _expect(values == oracle, crt_roots=values, brute_force=oracle)
    for a in values:
        _expect((M - a) % M in values, root=a, missing=(M - a) % M)
    return {'roots': values, 'exotic': [r.a for r in roots if not r.is_sign_root]}


def check_root_bifactorization_correspondence(ctx: SuiteContext) -> Dict:
    M, f = ctx.M, ctx.factorization
    roots = unit_square_roots(M, f)
    sign_roots = [r for r in roots if r.is_sign_root]
    exotic = [r for r in roots if not r.is_sign_root]
    for r in exotic:
        try:
            root_to_bifactorization(r, f)
        except NotSignRoot:
            continue
        raise _Failure({'root': r.a, 'problem': 'exotic root was accepted'})

    splits = {(bi.M1, bi.M2) for bi in ctx.splits}
    has_two = 2 in f.moduli
    if has_two:
        images = [root_to_bifactorization(r, f) for r in sign_roots]
        keys = [(bi.M1, bi.M2) for bi in images]
        _expect(len(set(keys)) == len(keys) and set(keys) == splits,
                roots=[r.a for r in sign_roots], images=keys)
    else:
        pairs = root_pairs(sign_roots)
        keys = []
        for low, high in pairs:
            a_split = root_to_bifactorization(low, f)
            b_split = root_to_bifactorization(high, f)
            _expect(a_split == b_split, roots=[low.a, high.a],
                    images=[[a_split.M1, a_split.M2], [b_split.M1, b_split.M2]])
            keys.append((a_split.M1, a_split.M2))
        _expect(len(set(keys)) == len(keys) and set(keys) == splits,
                pairs=[[p.a, q.a] for p, q in pairs], images=keys)
        if M % 2 == 1 and M > 1:
            _expect(len(roots) == 2 * chi(f), roots=len(roots), expected=2 * chi(f))
            for r in roots:
                by_gcd = tuple(sorted((gcd(r.a - 1, M), gcd(r.a + 1, M))))
                bi = root_to_bifactorization(r, f)
                _expect(by_gcd == (bi.M1, bi.M2), root=r.a, gcd_split=list(by_gcd),
                        split=[bi.M1, bi.M2])

    representatives = []
    for r in sign_roots:
        if not r.sign_pattern or r.sign_pattern[0] == 1 % r.moduli[0]:
            bi = root_to_bifactorization(r, f)
            representatives.append({'a': r.a, 'split': [bi.M1, bi.M2]})
    return {
        'sign_roots': [r.a for r in sign_roots],
        'representatives': representatives,
        '_notes': _root_notes(M, f, exotic, has_two),
    }


def _root_notes(M: int, f, exotic, has_two: bool) -> List[str]:
    notes = []
    if exotic:
        notes.append(
            f"{len(exotic)} roots of x^2 = 1 mod {M} are not +-1 modulo every prime power "
            f"(a factor 2^n with n >= 3 has four square roots of 1): "
            f"{[r.a for r in exotic]}; they have no bi-factorization counterpart."
        )
    if has_two:
        notes.append(
            f"M = {M} contains the single factor 2, whose only square root of 1 is 1; "
            f"each sign root (not each pair a, M - a) maps to its own bi-factorization."
        )
    return notes


# ---------------------------------------------------------------------------
# Bases


def _split_bases(ctx: SuiteContext) -> Iterable[Tuple[BiFactorization, Dict[str, LabeledBasis]]]:
    for bi in ctx.oriented_splits:
        yield bi, {
            'kq': build_kq_basis(bi),
            'KQ': build_conjugate_kq_basis(bi),
            'q1q2': build_q1q2_basis(bi),
            'k1k2': build_k1k2_basis(bi),
        }


def _check_relations(ctx: SuiteContext, check_id: str, basis: LabeledBasis,
                     where: Dict) -> Tuple[int, bool]:
    labels, sampled = ctx.labels(check_id, basis)
    for label in labels:
        s = basis.state(label)
        for rel in basis.defining_relations():
            got = is_eigenstate(rel.operator, s)
            want = rel.expected_exponent(label)
            _expect(got is not None and got.e == want, basis=basis.kind,
                    label=list(label), operator=rel.name, expected=want,
                    got=None if got is None else got.e, **where)
    return len(labels), sampled


def check_kq_eigen_relations(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    total, sampled = 0, False
    for bi, bases in _split_bases(ctx):
        for kind in ('kq', 'KQ'):
            n, s = _check_relations(ctx, 'kq-eigen-relations', bases[kind],
                                    {'split': _split_name(bi)})
            total, sampled = total + n, sampled or s
    return {'states': total, 'sampled': sampled}


def check_q1q2_eigen_relations(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    total, sampled = 0, False
    for bi, bases in _split_bases(ctx):
        where = {'split': _split_name(bi)}
        for kind in ('q1q2', 'k1k2'):
            n, s = _check_relations(ctx, 'q1q2-eigen-relations', bases[kind], where)
            total, sampled = total + n, sampled or s
        labels, _ = ctx.labels('q1q2-eigen-relations', bases['q1q2'])
        for q1, q2 in labels:
            want = (q1 * bi.e1 + q2 * bi.e2) % ctx.M
            got = position_delta(bases['q1q2'], (q1, q2))
            _expect(got == want, basis='q1q2', label=[q1, q2], expected=want, got=got, **where)
            want = (q1 * bi.L1 + q2 * bi.L2) % ctx.M
            got = momentum_delta(bases['k1k2'], (q1, q2))
            _expect(got == want, basis='k1k2', label=[q1, q2], expected=want, got=got, **where)
    return {'states': total, 'sampled': sampled}


def check_complete_eigen_relations(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    f = ctx.factorization
    qs = build_complete_basis(f, 'position')
    ks = build_complete_basis(f, 'momentum')
    total, sampled = 0, False
    for basis in (qs, ks):
        n, s = _check_relations(ctx, 'complete-eigen-relations', basis, {})
        total, sampled = total + n, sampled or s
    label_map = CrtLabelMap.for_factorization(f)
    labels, _ = ctx.labels('complete-eigen-relations', qs)
    for label in labels:
        want = label_map.backward(label)
        got = position_delta(qs, label)
        _expect(got == want, basis='complete', label=list(label), expected=want, got=got)
    ones = position_delta(qs, (1,) * len(f))
    _expect(ones == 1 % ctx.M, basis='complete', label='all ones', got=ones)
    return {'states': total, 'sampled': sampled}


def check_kq_shift_relations(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    total = 0
    sampled = False
    for bi, bases in _split_bases(ctx):
        for kind in ('kq', 'KQ'):
            basis = bases[kind]
            labels, s = ctx.labels('kq-shift-relations', basis)
            sampled = sampled or s
            for label in labels:
                for rel in basis.shifts:
                    target = tuple(v + d for v, d in zip(label, rel.delta))
                    got = apply(rel.operator, basis.state(label))
                    _expect(got == basis.state(target), split=_split_name(bi), basis=kind,
                            label=list(label), operator=rel.name,
                            expected_label=list(basis.normalize_label(target)))
                total += 1
    return {'states': total, 'sampled': sampled}


def check_kq_generation(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_pairs, 'generation')
    for bi, bases in _split_bases(ctx):
        kq = bases['kq']
        raise_k = make_tau(ctx.M, bi.M1)
        lower_q = make_shift(ctx.M, bi.e2)
        generated = set()
        row = kq.state((0, 0))
        for i in range(bi.M1):
            current = row
            for j in range(bi.M2):
                _expect(current == kq.state((i, -j)), split=_split_name(bi),
                        steps=[i, j], expected_label=list(kq.normalize_label((i, -j))))
                generated.add(current)
                current = apply(lower_q, current)
            row = apply(raise_k, row)
        _expect(len(generated) == ctx.M, split=_split_name(bi), generated=len(generated))
    return {'splits': len(ctx.oriented_splits)}


def _closed_form(ctx: SuiteContext, check_id: str, left: LabeledBasis, right: LabeledBasis,
                 exponent: Callable[[Label, Label], int], where: Dict) -> Tuple[int, bool]:
    pairs, sampled = ctx.label_pairs(check_id, left, right)
    unbiased = Fraction(1, ctx.M)
    for a, b in pairs:
        ov = overlap(left.state(a), right.state(b))
        want = exponent(a, b)
        _expect(ov.exact and ov.magnitude_squared == unbiased and ov.exponent.e == want,
                left=[left.kind, list(a)], right=[right.kind, list(b)], expected=want,
                got=ov.exponent.e if ov.exponent is not None else None,
                magnitude_squared=str(ov.magnitude_squared), **where)
    return len(pairs), sampled


def check_kq_overlap_closed_form(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    total, sampled = 0, False
    for bi, bases in _split_bases(ctx):
        n, s = _closed_form(ctx, 'kq-overlap-closed-form', bases['kq'], bases['KQ'],
                            lambda a, b, bi=bi: kq_overlap_exponent(bi, a, b),
                            {'split': _split_name(bi)})
        total, sampled = total + n, sampled or s
    return {'pairs': total, 'sampled': sampled}


def check_q1q2_overlap_closed_form(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    total, sampled = 0, False
    for bi, bases in _split_bases(ctx):
        n, s = _closed_form(ctx, 'q1q2-overlap-closed-form', bases['q1q2'], bases['k1k2'],
                            lambda a, b, bi=bi: q1q2_overlap_exponent(bi, a, b),
                            {'split': _split_name(bi)})
        total, sampled = total + n, sampled or s
    return {'pairs': total, 'sampled': sampled}


def check_complete_overlap_closed_form(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    f = ctx.factorization
    n, sampled = _closed_form(ctx, 'complete-overlap-closed-form',
                              build_complete_basis(f, 'position'),
                              build_complete_basis(f, 'momentum'),
                              lambda q, k: complete_overlap_exponent(f, q, k), {})
    return {'pairs': n, 'sampled': sampled}


def check_kq_overlap_consistency(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    M = ctx.M
    total = 0
    sampled = False
    for bi, bases in _split_bases(ctx):
        kq, KQ = bases['kq'], bases['KQ']
        seen: Dict[Tuple[Label, Label], Tuple[Fraction, Optional[int]]] = {}

        def exp(a: Label, b: Label) -> Tuple[Fraction, Optional[int]]:
            key = (kq.normalize_label(a), KQ.normalize_label(b))
            if key not in seen:
                ov = overlap(kq.state(key[0]), KQ.state(key[1]))
                seen[key] = (ov.magnitude_squared,
                             ov.exponent.e if ov.exponent is not None else None)
            return seen[key]

        pairs, s = ctx.label_pairs('kq-overlap-consistency', kq, KQ)
        sampled = sampled or s
        for (k, q), (K, Q) in pairs:
            mag, base = exp((k, q), (K, Q))
            recurrences = (
                ('K+1', (k, q), (K + 1, Q), q * bi.L2),
                ('k-1', (k - 1, q), (K, Q), Q * bi.L1),
                ('Q-1', (k, q), (K, Q - 1), k * bi.L1),
                ('q+1', (k, q + 1), (K, Q), K * bi.L2),
            )
            for name, a, b, step in recurrences:
                got_mag, got = exp(a, b)
                want = (base + step) % M
                _expect(got_mag == mag and got == want, split=_split_name(bi),
                        recurrence=name, kq=[k, q], KQ=[K, Q], expected=want, got=got)
            total += 1
    return {'pairs': total, 'sampled': sampled}


Couple = Tuple[Dict, LabeledBasis, LabeledBasis, Callable[[Label, Label], int]]


def _conjugate_couples(ctx: SuiteContext) -> Iterator[Couple]:
    """Conjugate basis pairs with their closed-form overlap exponents, built one at a time."""
    M = ctx.M
    yield ({'pair': 'position/momentum'}, _plain_basis(M, 'position'),
           _plain_basis(M, 'momentum'), lambda x, k: (x[0] * k[0]) % M)
    for bi in ctx.oriented_splits:
        yield ({'split': _split_name(bi), 'pair': 'kq/KQ'},
               build_kq_basis(bi), build_conjugate_kq_basis(bi),
               lambda a, b, bi=bi: kq_overlap_exponent(bi, a, b))
        yield ({'split': _split_name(bi), 'pair': 'q1q2/k1k2'},
               build_q1q2_basis(bi), build_k1k2_basis(bi),
               lambda a, b, bi=bi: q1q2_overlap_exponent(bi, a, b))
    f = ctx.factorization
    yield ({'pair': 'complete'}, build_complete_basis(f, 'position'),
           build_complete_basis(f, 'momentum'), lambda q, k: complete_overlap_exponent(f, q, k))


def _dense_deviation(left: LabeledBasis, right: LabeledBasis,
                     pairs: Sequence[Tuple[Label, Label]],
                     exponent: Callable[[Label, Label], int]) -> Tuple[float, int]:
    """Largest |dense <a|b> - w^e(a, b)/sqrt(M)| over `pairs`, and where it occurs."""
    M = left.M
    rows = {a: i for i, a in enumerate(dict.fromkeys(a for a, _ in pairs))}
    cols = {b: j for j, b in enumerate(dict.fromkeys(b for _, b in pairs))}
    G = overlap_matrix([left.state(a) for a in rows], [right.state(b) for b in cols])
    n = len(pairs)
    ri = np.fromiter((rows[a] for a, _ in pairs), dtype=np.intp, count=n)
    ci = np.fromiter((cols[b] for _, b in pairs), dtype=np.intp, count=n)
    e = np.fromiter((exponent(a, b) for a, b in pairs), dtype=np.int64, count=n)
    deviation = np.abs(G[ri, ci] - np.exp(2j * np.pi * e / M) / np.sqrt(M))
    worst = int(np.argmax(deviation))
    return float(deviation[worst]), worst


def check_basis_conjugacy(ctx: SuiteContext) -> Dict:
    """
    Unbiasedness of every conjugate pair of bases.

    With the dense oracle available every label pair is compared against
    w^e/sqrt(M) for the closed-form e, and exact overlaps run on a seeded
    sample; without it every (sampled) pair is checked exactly.
    """
    ctx.require(ctx.settings.max_scan, 'state size')
    M = ctx.M
    dense = M <= ctx.settings.max_dense
    unbiased = Fraction(1, M)
    total, exact_total, sampled = 0, 0, False
    for where, left, right, exponent in _conjugate_couples(ctx):
        pairs, s = ctx.label_pairs('basis-conjugacy', left, right)
        sampled = sampled or s
        exact_pairs = pairs
        if dense and len(pairs) > ctx.settings.sample_pairs:
            rng = random.Random(f"basis-conjugacy:{M}:{sorted(where.items())}")
            exact_pairs = rng.sample(pairs, ctx.settings.sample_pairs)
        for a, b in exact_pairs:
            ov = overlap(left.state(a), right.state(b))
            want = exponent(a, b)
            _expect(ov.exact and ov.magnitude_squared == unbiased and ov.exponent.e == want,
                    left=list(a), right=list(b), expected=want,
                    got=ov.exponent.e if ov.exponent is not None else None,
                    magnitude_squared=str(ov.magnitude_squared), **where)
        if dense:
            error, worst = _dense_deviation(left, right, pairs, exponent)
            a, b = pairs[worst]
            _expect(error < DENSE_TOLERANCE, left=list(a), right=list(b), error=error,
                    oracle='dense', **where)
        total += len(pairs)
        exact_total += len(exact_pairs)
    notes = [] if dense else [f"dense oracle skipped: M exceeds {ctx.settings.max_dense}"]
    return {'pairs': total, 'exact_pairs': exact_total, 'sampled': sampled,
            'dense': dense, '_notes': notes}


def check_position_momentum_conjugacy(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_scan, 'state size')
    n, sampled = _closed_form(ctx, 'position-momentum-conjugacy',
                              _plain_basis(ctx.M, 'position'), _plain_basis(ctx.M, 'momentum'),
                              lambda x, k: (x[0] * k[0]) % ctx.M, {})
    return {'pairs': n, 'sampled': sampled}


def check_gram_orthonormality(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_gram, 'Gram matrix')
    f = ctx.factorization
    bases = [('complete', build_complete_basis(f, 'position'), True),
             ('complete-momentum', build_complete_basis(f, 'momentum'), False)]
    for bi, split_bases in _split_bases(ctx):
        for kind, basis in split_bases.items():
            bases.append((f'{kind} {_split_name(bi)}', basis, kind == 'q1q2'))
    identity = np.eye(ctx.M)
    for name, basis, delta in bases:
        states = [basis.state(label) for label in basis.labels()]
        if delta:
            positions = [position_delta(basis, label) for label in basis.labels()]
            _expect(is_bijection(positions, ctx.M), basis=name, positions=positions)
        err = float(np.max(np.abs(gram_matrix(states) - identity)))
        _expect(err < GRAM_TOLERANCE, basis=name, error=err)
    return {'bases': len(bases)}


def check_localization(ctx: SuiteContext) -> Dict:
    ctx.require(ctx.settings.max_pairs, 'localization')
    for bi in ctx.oriented_splits:
        report = localization_demo(bi)
        _expect(report.exact_delta_structure, split=_split_name(bi),
                deviations=report.failures[:5])
    return {'splits': len(ctx.oriented_splits)}


CHECKS: Dict[str, Callable[[SuiteContext], Dict]] = {
    'basis-conjugacy': check_basis_conjugacy,
    'bifactorization-count': check_bifactorization_count,
    'clock-shift-commutator': check_clock_shift_commutator,
    'complete-eigen-relations': check_complete_eigen_relations,
    'complete-overlap-closed-form': check_complete_overlap_closed_form,
    'crt-label-bijection': check_crt_label_bijection,
    'dense-operator-oracle': check_dense_operator_oracle,
    'factor-operator-algebra': check_factor_operator_algebra,
    'gram-orthonormality': check_gram_orthonormality,
    'kq-eigen-relations': check_kq_eigen_relations,
    'kq-generation': check_kq_generation,
    'kq-overlap-closed-form': check_kq_overlap_closed_form,
    'kq-overlap-consistency': check_kq_overlap_consistency,
    'kq-shift-relations': check_kq_shift_relations,
    'localization': check_localization,
    'period-minimality': check_period_minimality,
    'position-momentum-conjugacy': check_position_momentum_conjugacy,
    'q1q2-eigen-relations': check_q1q2_eigen_relations,
    'q1q2-overlap-closed-form': check_q1q2_overlap_closed_form,
    'relative-primality': check_relative_primality,
    'root-bifactorization-correspondence': check_root_bifactorization_correspondence,
    'split-commutators': check_split_commutators,
    'split-label-bijection': check_split_label_bijection,
    'unit-root-set': check_unit_root_set,
}

CHECK_IDS = tuple(sorted(CHECKS))


def _run_one(ctx: SuiteContext, check_id: str) -> CheckResult:
    try:
        parameters = CHECKS[check_id](ctx)
    except _Skip as skip:
        logger.warning(f"Check {check_id} skipped for M={ctx.M}: {skip}")
        return CheckResult(check_id, ctx.M, SKIPPED, reason=str(skip))
    except _Failure as failure:
        logger.warning(f"Check {check_id} failed for M={ctx.M}: {failure.witness}")
        return CheckResult(check_id, ctx.M, FAIL, witness=failure.witness)
    except ValueError as e:
        logger.error(f"Check {check_id} raised for M={ctx.M}: {e}")
        return CheckResult(check_id, ctx.M, FAIL,
                           witness={'error': type(e).__name__, 'message': str(e)})
    notes = parameters.pop('_notes', [])
    return CheckResult(check_id, ctx.M, PASS, parameters=parameters, notes=notes)


def run_suite(M: int, selection: Optional[Iterable[str]] = None,
              settings: Optional[Settings] = None, jobs: int = 1) -> List[CheckResult]:
    """
    Run the selected checks for dimension M.

    Args:
        M: Dimension, M >= 1
        selection: Check ids to run; all checks when None or empty
        settings: Oracle budgets; environment defaults when None
        jobs: Worker threads; results keep check-id order regardless

    Returns:
        One CheckResult per selected check, sorted by check id.
    """
    if isinstance(M, bool) or not isinstance(M, int) or M < 1:
        raise ValueError("M must be a positive integer.")
    chosen = sorted(set(selection)) if selection else list(CHECK_IDS)
    unknown = [c for c in chosen if c not in CHECKS]
    if unknown:
        raise ValueError(f"Unknown check ids: {', '.join(unknown)}.")
    ctx = SuiteContext(M, settings or load_settings())
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: _run_one(ctx, c), chosen))
    else:
        results = [_run_one(ctx, c) for c in chosen]
    summary = summarize(results)
    logger.info(f"Suite for M={M}: {summary}")
    return results


def summarize(results: Sequence[CheckResult]) -> Dict[str, int]:
    return {
        PASS: sum(r.status == PASS for r in results),
        FAIL: sum(r.status == FAIL for r in results),
        SKIPPED: sum(r.status == SKIPPED for r in results),
    }


def report_to_dict(M: int, results: Sequence[CheckResult]) -> Dict:
    return {
        'M': M,
        'results': [r.to_dict() for r in results],
        'summary': summarize(results),
    }


def root_products_report(M: int) -> List[Dict]:
    """
    For every sign root a of x^2 = 1 [mod M], how (a - 1)(a + 1) splits M.

    Each entry gives a - 1 and a + 1, their gcds with M and the remaining
    cofactors, e.g. M = 105, a = 76: 75 = 5*15 and 77 = 11*7.
    """
    if isinstance(M, bool) or not isinstance(M, int) or M < 2:
        raise ValueError("M must be an integer of at least 2.")
    f = factorize(M)
    rows = []
    for r in unit_square_roots(M, f):
        if not r.is_sign_root:
            continue
        a = r.a
        lower, upper = a - 1, a + 1
        g_lower, g_upper = gcd(lower, M), gcd(upper, M)
        bi = root_to_bifactorization(r, f)
        rows.append({
            'a': a,
            'signs': list(r.signs),
            'representative': r.sign_pattern[0] == 1 % r.moduli[0],
            'a_minus_1': lower,
            'a_plus_1': upper,
            'gcd_minus': g_lower,
            'gcd_plus': g_upper,
            'cofactor_minus': lower // g_lower,
            'cofactor_plus': upper // g_upper,
            'product_mod_M': (lower * upper) % M,
            'split': [bi.M1, bi.M2],
        })
    return rows
