"""
Labeled bases reflecting the factorization of M.

kq / KQ and q1q2 / k1k2 bases belong to a coprime split M = M1*M2; the
completely factorized bases carry one quantum number per prime-power
constituent. Labels are 0-based residues; the conventional 1-based ranges
(value m printed for residue 0) are produced only at serialization time.
"""
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple
import logging

from schwinger.numtheory import (
    BiFactorization,
    Factorization,
    bifactorization,
    factorize,
    mod_inverse,
)
from schwinger.phase_algebra import MonomialOperator, make_shift, make_tau
from schwinger.states import (
    FlatPhaseState,
    Overlap,
    momentum_state,
    overlap,
    position_state,
)

logger = logging.getLogger(__name__)

Label = Tuple[int, ...]

SPLIT_KINDS = ('kq', 'KQ', 'q1q2', 'k1k2')
COMPLETE_KINDS = ('complete', 'complete-momentum')
KINDS = SPLIT_KINDS + COMPLETE_KINDS

MAX_MATERIALIZE = 4096
STATE_CACHE_SIZE = 128


@dataclass(frozen=True)
class DefiningRelation:
    """operator|label> = w^(label[slot] * step) |label>."""
    name: str
    operator: MonomialOperator
    slot: int
    step: int

    def expected_exponent(self, label: Label) -> int:
        return (label[self.slot] * self.step) % self.operator.M


@dataclass(frozen=True)
class ShiftRelation:
    """operator|label> = |label + delta> with no extra phase."""
    name: str
    operator: MonomialOperator
    delta: Label


class CrtLabelMap:
    """
    x <-> (x mod m_1, ..., x mod m_N) for pairwise coprime moduli.

    The backward map is x = sum q_j N_j L_j mod M.
    """

    def __init__(self, moduli: Sequence[int]):
        self.moduli = tuple(moduli)
        self.M = 1
        for m in self.moduli:
            self.M *= m
        self.weights = tuple(
            ((self.M // m) * mod_inverse(self.M // m, m)) % self.M for m in self.moduli
        )

    @classmethod
    def for_factorization(cls, f: Factorization) -> 'CrtLabelMap':
        return cls(f.moduli)

    def forward(self, x: int) -> Label:
        return tuple(x % m for m in self.moduli)

    def backward(self, labels: Sequence[int]) -> int:
        if len(labels) != len(self.moduli):
            raise ValueError(f"Expected {len(self.moduli)} labels, got {len(labels)}.")
        return sum(q * w for q, w in zip(labels, self.weights)) % self.M


class LabeledBasis:
    """
    M states indexed by label tuples, generated lazily per label.

    Args:
        M: Dimension
        kind: One of KINDS, or 'loaded' for a deserialized basis
        scheme: Per-slot label modulus
        builder: Maps a 0-based label tuple to its state
        relations: Eigenvalue equations every state satisfies
        shifts: Operators moving one label to another without extra phase
        split: The bi-factorization, for split-based kinds
    """

    def __init__(self, M: int, kind: str, scheme: Sequence[int],
                 builder: Callable[[Label], FlatPhaseState],
                 relations: Sequence[DefiningRelation] = (),
                 shifts: Sequence[ShiftRelation] = (),
                 split: Optional[BiFactorization] = None):
        size = 1
        for m in scheme:
            size *= m
        if size != M:
            raise ValueError(f"Label scheme {tuple(scheme)} does not index {M} states.")
        self.M = M
        self.kind = kind
        self.scheme = tuple(scheme)
        self.relations = tuple(relations)
        self.shifts = tuple(shifts)
        self.split = split
        self._builder = builder
        self._cache: 'OrderedDict[Label, FlatPhaseState]' = OrderedDict()

    def __len__(self) -> int:
        return self.M

    def __iter__(self) -> Iterator[Label]:
        return self.labels()

    def __repr__(self) -> str:
        return f"LabeledBasis(M={self.M}, kind={self.kind!r}, scheme={self.scheme})"

    def defining_relations(self) -> Tuple[DefiningRelation, ...]:
        """(operator, slot, step) triples: label l has eigenvalue w^(l[slot] * step)."""
        return self.relations

    def labels(self) -> Iterator[Label]:
        return product(*(range(m) for m in self.scheme))

    def normalize_label(self, label: Sequence[int]) -> Label:
        if len(label) != len(self.scheme):
            raise ValueError(f"Label {tuple(label)} does not match scheme {self.scheme}.")
        return tuple(q % m for q, m in zip(label, self.scheme))

    def state(self, label: Sequence[int]) -> FlatPhaseState:
        """The state for `label`; the most recently used STATE_CACHE_SIZE stay cached."""
        label = self.normalize_label(label)
        cached = self._cache.get(label)
        if cached is not None:
            self._cache.move_to_end(label)
            return cached
        cached = self._builder(label)
        self._cache[label] = cached
        if len(self._cache) > STATE_CACHE_SIZE:
            self._cache.popitem(last=False)
        return cached

    @property
    def cached_states(self) -> int:
        return len(self._cache)

    def states(self, limit: int = MAX_MATERIALIZE) -> Dict[Label, FlatPhaseState]:
        """Every state keyed by label; refused above `limit` states."""
        if self.M > limit:
            raise ValueError(f"Refusing to materialize {self.M} states (limit {limit}).")
        return {label: self.state(label) for label in self.labels()}

    def to_dict(self, one_based: bool = True, limit: int = MAX_MATERIALIZE) -> Dict:
        """
        JSON-ready structure {M, kind, scheme, split, one_based, states}.

        With one_based, residue 0 of a slot with modulus m is written as m and
        position 0 as M. States are listed in order of their displayed labels.
        """
        states = []
        for label, s in self.states(limit).items():
            states.append({
                'label': [display_label(q, m, one_based) for q, m in zip(label, self.scheme)],
                'support': [display_label(x, self.M, one_based) for x in s.support],
                'phase_exponents': list(s.phase),
            })
        states.sort(key=lambda entry: entry['label'])
        return {
            'M': self.M,
            'kind': self.kind,
            'scheme': list(self.scheme),
            'split': [self.split.M1, self.split.M2] if self.split else None,
            'one_based': one_based,
            'states': states,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'LabeledBasis':
        """Rebuild a materialized basis from `to_dict` output."""
        M = int(data['M'])
        scheme = tuple(int(m) for m in data['scheme'])
        table: Dict[Label, FlatPhaseState] = {}
        for entry in data['states']:
            label = tuple(int(q) % m for q, m in zip(entry['label'], scheme))
            terms = {int(x) % M: int(e) for x, e in zip(entry['support'], entry['phase_exponents'])}
            table[label] = FlatPhaseState.from_terms(M, terms)
        if len(table) != M:
            raise ValueError(f"Serialized basis lists {len(table)} states, expected {M}.")
        split = None
        if data.get('split'):
            split = bifactorization(M, int(data['split'][0]))

        def lookup(label: Label) -> FlatPhaseState:
            return table[label]

        return cls(M, data.get('kind', 'loaded'), scheme, lookup, split=split)


def display_label(value: int, modulus: int, one_based: bool) -> int:
    if one_based and value == 0:
        return modulus
    return value


def build_kq_basis(bi: BiFactorization) -> LabeledBasis:
    """
    |k,q> = M1^-1/2 sum_s w_M1^(k s) |q N2 L2 + s N1 L1>, k mod M1, q mod M2.

    Simultaneous eigenstates of tau(M2) (w_M2^q) and T(N1 L1) (w_M1^k);
    tau(M1) raises k and T(N2 L2) lowers q with no extra phase.
    """
    M, e1, e2, L1 = bi.M, bi.e1, bi.e2, bi.L1

    def build(label: Label) -> FlatPhaseState:
        k, q = label
        return FlatPhaseState.from_terms(
            M, {(q * e2 + s * e1) % M: k * s * L1 for s in range(bi.M1)}
        )

    return LabeledBasis(
        M, 'kq', (bi.M1, bi.M2), build,
        relations=(
            DefiningRelation('tau(M2)', make_tau(M, bi.M2), 1, bi.L2),
            DefiningRelation('T(N1L1)', make_shift(M, e1), 0, bi.L1),
        ),
        shifts=(
            ShiftRelation('tau(M1)', make_tau(M, bi.M1), (1, 0)),
            ShiftRelation('T(N2L2)', make_shift(M, e2), (0, -1)),
        ),
        split=bi,
    )


def build_conjugate_kq_basis(bi: BiFactorization) -> LabeledBasis:
    """
    |K,Q> = M2^-1/2 sum_t w_M2^(K t) |Q N1 L1 + t N2 L2>, K mod M2, Q mod M1.

    Eigenstates of tau(M1) (w_M1^Q) and T(N2 L2) (w_M2^K).
    """
    M, e1, e2, L2 = bi.M, bi.e1, bi.e2, bi.L2

    def build(label: Label) -> FlatPhaseState:
        K, Q = label
        return FlatPhaseState.from_terms(
            M, {(Q * e1 + t * e2) % M: K * t * L2 for t in range(bi.M2)}
        )

    return LabeledBasis(
        M, 'KQ', (bi.M2, bi.M1), build,
        relations=(
            DefiningRelation('tau(M1)', make_tau(M, bi.M1), 1, bi.L1),
            DefiningRelation('T(N2L2)', make_shift(M, e2), 0, bi.L2),
        ),
        shifts=(
            ShiftRelation('tau(M2)', make_tau(M, bi.M2), (1, 0)),
            ShiftRelation('T(N1L1)', make_shift(M, e1), (0, -1)),
        ),
        split=bi,
    )


def build_q1q2_basis(bi: BiFactorization) -> LabeledBasis:
    """|q1,q2> is the position ket at x = q1 N1 L1 + q2 N2 L2 [mod M]."""
    M = bi.M

    def build(label: Label) -> FlatPhaseState:
        q1, q2 = label
        return position_state(M, (q1 * bi.e1 + q2 * bi.e2) % M)

    return LabeledBasis(
        M, 'q1q2', (bi.M1, bi.M2), build,
        relations=(
            DefiningRelation('tau(M1)', make_tau(M, bi.M1), 0, bi.L1),
            DefiningRelation('tau(M2)', make_tau(M, bi.M2), 1, bi.L2),
        ),
        split=bi,
    )


def build_k1k2_basis(bi: BiFactorization) -> LabeledBasis:
    """|k1,k2> is the momentum ket at k = k1 L1 + k2 L2 [mod M]."""
    M = bi.M

    def build(label: Label) -> FlatPhaseState:
        k1, k2 = label
        return momentum_state(M, (k1 * bi.L1 + k2 * bi.L2) % M)

    return LabeledBasis(
        M, 'k1k2', (bi.M1, bi.M2), build,
        relations=(
            DefiningRelation('T(N1L1)', make_shift(M, bi.e1), 0, bi.L1),
            DefiningRelation('T(N2L2)', make_shift(M, bi.e2), 1, bi.L2),
        ),
        split=bi,
    )


def build_complete_basis(f: Factorization, kind: str = 'position') -> LabeledBasis:
    """
    One label per prime-power constituent m_j.

    Args:
        f: Factorization of M
        kind: 'position' for |q_1..q_N> (position ket at sum q_j N_j L_j),
              'momentum' for |k_1..k_N> (momentum ket at sum k_j L_j)
    """
    M = f.M
    label_map = CrtLabelMap.for_factorization(f)
    if kind in ('position', 'complete'):
        def build(label: Label) -> FlatPhaseState:
            return position_state(M, label_map.backward(label))

        relations = tuple(
            DefiningRelation(f'U_{j + 1}', make_tau(M, c.m), j, c.L)
            for j, c in enumerate(f.constituents)
        )
        return LabeledBasis(M, 'complete', f.moduli, build, relations=relations)
    if kind in ('momentum', 'complete-momentum'):
        def build(label: Label) -> FlatPhaseState:
            k = sum(kj * c.L for kj, c in zip(label, f.constituents)) % M
            return momentum_state(M, k)

        relations = tuple(
            DefiningRelation(f'V_{j + 1}', make_shift(M, c.N * c.L), j, c.L)
            for j, c in enumerate(f.constituents)
        )
        return LabeledBasis(M, 'complete-momentum', f.moduli, build, relations=relations)
    raise ValueError(f"Unknown complete basis kind: {kind}.")


def build_basis(M: int, kind: str, split: Optional[Sequence[int]] = None) -> LabeledBasis:
    """
    Build any supported basis by name.

    Args:
        M: Dimension
        kind: One of kq, KQ, q1q2, k1k2, complete, complete-momentum
        split: (M1, M2) for the split-based kinds
    """
    if kind in COMPLETE_KINDS:
        return build_complete_basis(factorize(M), kind)
    if kind not in SPLIT_KINDS:
        raise ValueError(f"Unknown basis type '{kind}'. Choose from {', '.join(KINDS)}.")
    bi = parse_split(M, split)
    builders = {
        'kq': build_kq_basis,
        'KQ': build_conjugate_kq_basis,
        'q1q2': build_q1q2_basis,
        'k1k2': build_k1k2_basis,
    }
    return builders[kind](bi)


def parse_split(M: int, split: Optional[Sequence[int]]) -> BiFactorization:
    if split is None:
        raise ValueError("A split M1,M2 is required for this basis type.")
    if len(split) != 2:
        raise ValueError("A split must name exactly two factors.")
    M1, M2 = (int(v) for v in split)
    if M1 * M2 != M:
        raise ValueError(f"Split {M1}*{M2} does not multiply to {M}.")
    return bifactorization(M, M1)


def kq_overlap_exponent(bi: BiFactorization, kq: Label, KQ: Label) -> int:
    """<k,q|K,Q> = w_M^(K q M1 - k Q M2) / sqrt(M)."""
    (k, q), (K, Q) = kq, KQ
    return (K * q * bi.M1 - k * Q * bi.M2) % bi.M


def q1q2_overlap_exponent(bi: BiFactorization, qq: Label, kk: Label) -> int:
    """<q1,q2|k1,k2> = w_M^(q1 k1 M2 + q2 k2 M1) / sqrt(M)."""
    (q1, q2), (k1, k2) = qq, kk
    return (q1 * k1 * bi.M2 + q2 * k2 * bi.M1) % bi.M


def complete_overlap_exponent(f: Factorization, qs: Label, ks: Label) -> int:
    """<q_1..q_N|k_1..k_N> = w_M^(sum k_j q_j L_j) / sqrt(M); the reverse bra-ket is its conjugate."""
    return sum(k * q * c.L for q, k, c in zip(qs, ks, f.constituents)) % f.M


def position_delta(basis: LabeledBasis, label: Sequence[int]) -> Optional[int]:
    """The x with <x|label> = Delta(0), or None when the state is not a position ket."""
    s = basis.state(label)
    if len(s.support) != 1:
        return None
    return s.support[0]


def momentum_delta(basis: LabeledBasis, label: Sequence[int]) -> Optional[int]:
    """The k with <k|label> = Delta(0), or None when the state is not a momentum ket."""
    s = basis.state(label)
    if len(s.support) != s.M:
        return None
    k = s.phase[1] if s.M > 1 else 0
    if s != momentum_state(s.M, k):
        return None
    return k


@dataclass
class LocalizationReport:
    """
    A state localized at one q1 and spread over q2, written in both the
    q1q2 and the k1k2 basis.
    """
    split: BiFactorization
    q1: int
    psi: FlatPhaseState
    position_side: Dict[Label, Overlap] = field(default_factory=dict)
    momentum_side: Dict[Label, Overlap] = field(default_factory=dict)
    failures: List[Dict] = field(default_factory=list)

    @property
    def exact_delta_structure(self) -> bool:
        return not self.failures

    def to_dict(self, one_based: bool = True) -> Dict:
        bi = self.split
        scheme = (bi.M1, bi.M2)

        def rows(table: Dict[Label, Overlap]) -> List[Dict]:
            out = [
                {
                    'label': [display_label(v, m, one_based) for v, m in zip(label, scheme)],
                    'magnitude_squared': str(ov.magnitude_squared) if ov.exact else None,
                    'phase': ov.exponent.label if ov.exponent is not None else None,
                    'exact': ov.exact,
                }
                for label, ov in table.items()
            ]
            return sorted(out, key=lambda row: row['label'])

        return {
            'M': bi.M,
            'split': [bi.M1, bi.M2],
            'q1': display_label(self.q1, bi.M1, one_based),
            'psi': {
                'support': [display_label(x, bi.M, one_based) for x in self.psi.support],
                'phase_exponents': list(self.psi.phase),
            },
            'position_side': rows(self.position_side),
            'momentum_side': rows(self.momentum_side),
            'exact_delta_structure': self.exact_delta_structure,
            'failures': self.failures,
        }


def localization_demo(bi: BiFactorization, q1: int = 0) -> LocalizationReport:
    """
    Expand psi = M2^-1/2 sum_q2 |q1, q2> in the q1q2 and k1k2 bases.

    Expected: <q1',q2|psi> = delta(q1', q1) / sqrt(M2) and
    <k1,k2|psi> = delta(k2, 0) w_M^(-k1 q1 L1) / sqrt(M1).
    """
    M = bi.M
    q1 = q1 % bi.M1
    positions = {(q1 * bi.e1 + q2 * bi.e2) % M: 0 for q2 in range(bi.M2)}
    psi = FlatPhaseState.from_terms(M, positions)
    report = LocalizationReport(split=bi, q1=q1, psi=psi)

    qq = build_q1q2_basis(bi)
    for label in qq.labels():
        ov = overlap(qq.state(label), psi)
        report.position_side[label] = ov
        want = Fraction(1, bi.M2) if label[0] == q1 else Fraction(0)
        if not ov.exact or ov.magnitude_squared != want or (want and ov.exponent.e != 0):
            report.failures.append({'side': 'position', 'label': list(label)})

    kk = build_k1k2_basis(bi)
    for label in kk.labels():
        k1, k2 = label
        ov = overlap(kk.state(label), psi)
        report.momentum_side[label] = ov
        want = Fraction(1, bi.M1) if k2 == 0 else Fraction(0)
        phase_ok = not want or ov.exponent.e == (-k1 * q1 * bi.L1) % M
        if not ov.exact or ov.magnitude_squared != want or not phase_ok:
            report.failures.append({'side': 'momentum', 'label': list(label)})

    logger.info(f"Localization demo for {bi.M1}*{bi.M2}: {len(report.failures)} deviations")
    return report
