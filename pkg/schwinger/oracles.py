"""
Independent reference computations used to cross-check the exact code paths:
dense complex matrices and vectors (numpy) and brute-force residue scans.
"""
from typing import Iterable, List, Sequence
import logging

import numpy as np

from schwinger.phase_algebra import MonomialOperator
from schwinger.states import FlatPhaseState

logger = logging.getLogger(__name__)


def to_dense(A: MonomialOperator) -> np.ndarray:
    """Column x holds the image of |x>, so D[perm(x), x] = w^phase(x)."""
    M = A.M
    D = np.zeros((M, M), dtype=complex)
    cols = np.arange(M)
    D[np.asarray(A.perm), cols] = np.exp(2j * np.pi * np.asarray(A.phase) / M)
    return D


def to_vector(s: FlatPhaseState) -> np.ndarray:
    v = np.zeros(s.M, dtype=complex)
    v[np.asarray(s.support)] = np.exp(2j * np.pi * np.asarray(s.phase) / s.M)
    return v / np.sqrt(len(s.support))


def dense_overlap(a: FlatPhaseState, b: FlatPhaseState) -> complex:
    return complex(np.vdot(to_vector(a), to_vector(b)))


def overlap_matrix(bras: Sequence[FlatPhaseState], kets: Sequence[FlatPhaseState]) -> np.ndarray:
    """G[i, j] = <bras_i|kets_j>."""
    L = np.stack([to_vector(s) for s in bras], axis=1)
    R = np.stack([to_vector(s) for s in kets], axis=1)
    logger.debug(f"Dense overlap block {L.shape[1]}x{R.shape[1]} in dimension {L.shape[0]}")
    return L.conj().T @ R


def gram_matrix(states: Sequence[FlatPhaseState]) -> np.ndarray:
    """Rows are bras: G[i, j] = <s_i|s_j>."""
    return overlap_matrix(states, states)


def brute_force_unit_roots(M: int) -> List[int]:
    """Scan every residue for a^2 = 1 [mod M]."""
    if M == 1:
        return [0]
    x = np.arange(M, dtype=object if M > 3_000_000_000 else np.int64)
    hits = np.nonzero((x * x) % M == 1)[0]
    return [int(a) for a in hits]


def is_bijection(images: Iterable[int], size: int) -> bool:
    values = list(images)
    return len(values) == size and sorted(values) == list(range(size))
