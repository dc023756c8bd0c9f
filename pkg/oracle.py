"""Brute-force reference computations used to check the sparse engine.

Dense numpy arithmetic only; nothing here touches the sparse, morse or persistence
modules, so agreement between the two paths means something.
"""

import logging
import math
from typing import Optional

import numpy as np

from field import inverse

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 2000


def dense_rank(A, p: int) -> int:
    """Rank over GF(p) by Gaussian elimination."""
    M = np.array(A, dtype=np.int64) % p
    if M.ndim != 2 or M.size == 0:
        return 0
    n_rows, n_cols = M.shape
    rank = 0
    for c in range(n_cols):
        if rank == n_rows:
            break
        nz = np.flatnonzero(M[rank:, c])
        if nz.size == 0:
            continue
        r = rank + int(nz[0])
        M[[rank, r]] = M[[r, rank]]
        M[rank] = M[rank] * inverse(int(M[rank, c]), p) % p
        factors = M[:, c].copy()
        factors[rank] = 0
        M = (M - np.outer(factors, M[rank])) % p
        rank += 1
    return rank


def dense_inverse(A, p: int) -> np.ndarray:
    """Gauss-Jordan inverse over GF(p)."""
    M = np.array(A, dtype=np.int64) % p
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix must be square")
    W = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        nz = np.flatnonzero(W[c:, c])
        if nz.size == 0:
            raise ValueError("matrix is singular")
        r = c + int(nz[0])
        W[[c, r]] = W[[r, c]]
        W[c] = W[c] * inverse(int(W[c, c]), p) % p
        factors = W[:, c].copy()
        factors[c] = 0
        W = (W - np.outer(factors, W[c])) % p
    return W[:, n:]


# --- Complexes ---

def _faces(simplex):
    for i in range(len(simplex)):
        yield simplex[:i] + simplex[i + 1:], (-1) ** (i + 1)


def _dense_block(rows, cols, p: int) -> np.ndarray:
    index = {s: i for i, s in enumerate(rows)}
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, s in enumerate(cols):
        for face, sign in _faces(s):
            if face in index:
                M[index[face], j] = sign % p
    return M


def betti(K, dim: int, p: int, reduced: bool = False) -> int:
    """nullity(∂_dim) - rank(∂_{dim+1}) on the whole complex."""
    return _betti(K.grades, dim, p, reduced)


def _betti(grades, dim: int, p: int, reduced: bool = False) -> int:
    by_dim = lambda d: sorted(s for s in grades if len(s) == d + 1)
    cells = by_dim(dim)
    if dim == 0:
        lower = [()] if reduced else []
    else:
        lower = by_dim(dim - 1)
    nullity = len(cells) - dense_rank(_dense_block(lower, cells, p), p)
    return nullity - dense_rank(_dense_block(cells, by_dim(dim + 1), p), p)


def sublevel_betti(K, dim: int, grade: float, p: int) -> int:
    """Betti number of the subcomplex of simplices with grade <= grade."""
    return _betti({s: g for s, g in K.grades.items() if g <= grade}, dim, p)


def standard_reduction_barcode(K, p: int, max_dim: Optional[int] = None,
                               keep_zero: bool = False, reduced: bool = False) -> dict[int, list[tuple[float, float]]]:
    """Classical left-to-right column reduction of the full boundary matrix."""
    grades = K.grades
    top = max((len(s) for s in grades), default=1) - 1 if max_dim is None else max_dim
    cells = sorted((s for s in grades if len(s) - 1 <= top + 1), key=lambda s: (grades[s], len(s), s))
    if reduced:
        grades = {**grades, (): min(grades.values(), default=0.0)}
        cells = [()] + cells
    n = len(cells)
    if n > ORACLE_LIMIT:
        raise ValueError("complex too large for the dense oracle")
    R = _dense_block(cells, cells, p)

    pivot_of = {}
    for j in range(n):
        while True:
            nz = np.flatnonzero(R[:, j])
            if nz.size == 0:
                break
            low = int(nz[-1])
            k = pivot_of.get(low)
            if k is None:
                pivot_of[low] = j
                break
            f = int(R[low, j]) * inverse(int(R[low, k]), p) % p
            R[:, j] = (R[:, j] - f * R[:, k]) % p

    intervals: dict[int, list[tuple[float, float]]] = {d: [] for d in range(top + 1)}
    for low, j in pivot_of.items():
        d = len(cells[low]) - 1
        birth, death = grades[cells[low]], grades[cells[j]]
        if 0 <= d <= top and (birth < death or keep_zero):
            intervals[d].append((birth, death))
    paired = set(pivot_of) | set(pivot_of.values())
    for j, s in enumerate(cells):
        if j not in paired and 0 <= len(s) - 1 <= top:
            intervals[len(s) - 1].append((grades[s], math.inf))
    for d in intervals:
        intervals[d].sort()
    logger.debug("oracle reduced %d cells, %d pairs", n, len(pivot_of))
    return intervals
