"""Jordan decompositions of differentials and the barcodes they carry.

filtered_jordan pairs every column that does not vanish with the latest row it
reaches after clearing against earlier columns. For a square-zero operator these
pairs, together with the unpaired cycles, give an F-minimal Jordan basis; its
orbits are the persistence intervals.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Optional, Sequence, Union

import numpy as np

from errors import InvariantViolation, LabelMismatch, NotNilpotentError
from field import inverse
from morse import reduce as morse_reduce
from schemas import BarcodeFile
from simplicial import FilteredBoundary, FilteredComplex, filtered_boundary
from sparse import IndexedMatrix, SparseEchelon, add_scaled, kernel_basis

logger = logging.getLogger(__name__)

Label = Hashable
Interval = tuple[float, float]
DimensionOf = Union[Callable[[Label], int], Mapping[Label, int]]


@dataclass(frozen=True)
class GradedJordanBasis:
    pairs: tuple                                  # (σ, τ): the basis vector of τ maps onto that of σ
    essentials: tuple
    change_of_basis: Optional[IndexedMatrix] = None

    @property
    def rank(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Barcode:
    intervals: Mapping[int, tuple]

    def __post_init__(self):
        normalized = {int(d): tuple(sorted((float(b), float(e)) for b, e in bars))
                      for d, bars in sorted(self.intervals.items())}
        object.__setattr__(self, "intervals", normalized)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Barcode):
            return NotImplemented
        return self._nonempty() == other._nonempty()

    __hash__ = None

    def _nonempty(self) -> dict:
        return {d: bars for d, bars in self.intervals.items() if bars}

    def __getitem__(self, dim: int) -> tuple:
        return self.intervals.get(dim, ())

    def betti(self, dim: int, grade: float) -> int:
        """Intervals of dimension dim alive at grade."""
        return sum(1 for birth, death in self[dim] if birth <= grade < death)

    def to_file(self, field: int) -> BarcodeFile:
        return BarcodeFile(field=field, dims={
            str(d): [[b, "inf" if math.isinf(e) else e] for b, e in bars]
            for d, bars in self.intervals.items()
        })

    def to_json(self, field: int) -> str:
        return json.dumps(self.to_file(field).model_dump(), indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["dim,birth,death"]
        for d, bars in self.intervals.items():
            lines.extend(f"{d},{b!r},{'inf' if math.isinf(e) else repr(e)}" for b, e in bars)
        return "\n".join(lines) + "\n"


# --- Filtered Jordan decomposition ---

def _dimension_function(dims: Optional[DimensionOf]) -> Callable[[Label], int]:
    if dims is None:
        return lambda cell: len(cell) - 1
    if callable(dims):
        return dims
    return dims.__getitem__


def _check_square(A: IndexedMatrix):
    if set(A.row_labels) != set(A.col_labels) or len(A.row_labels) != len(A.col_labels):
        raise LabelMismatch("expected an operator on a single label set")


def _jordan_pairs(A: IndexedMatrix, order: Mapping, sequence: Sequence, with_basis: bool,
                  clear: bool) -> GradedJordanBasis:
    """Column reduction in the given sequence; rows compared by order."""
    p = A.modulus
    low_key = order.__getitem__
    pivot_of: dict = {}      # low row -> column
    reduced: dict = {}       # column -> reduced column
    transform: dict = {}     # column -> combination of original columns
    cleared: set = set()
    additions = 0
    for tau in sequence:
        if tau in cleared:
            continue
        col = dict(A.column(tau))
        vec = {tau: 1}
        while col:
            low = max(col, key=low_key)
            other = pivot_of.get(low)
            if other is None:
                pivot_of[low] = tau
                reduced[tau] = col
                if clear:
                    cleared.add(low)
                break
            pcol = reduced[other]
            f = col[low] * inverse(pcol[low], p)
            add_scaled(col, pcol, -f, p)
            if with_basis:
                add_scaled(vec, transform[other], -f, p)
            additions += 1
        if with_basis:
            transform[tau] = vec

    pairs = tuple(sorted(pivot_of.items(), key=lambda pair: order[pair[1]]))
    paired = set(pivot_of) | set(pivot_of.values())
    essentials = tuple(sorted((x for x in A.col_labels if x not in paired), key=low_key))
    logger.debug("Jordan reduction: %d pairs, %d essentials, %d column additions",
                 len(pairs), len(essentials), additions)

    change = None
    if with_basis:
        columns = {}
        for sigma, tau in pairs:
            w = inverse(reduced[tau][sigma], p)
            columns[tau] = {x: v * w % p for x, v in transform[tau].items()}
            columns[sigma] = {x: v * w % p for x, v in reduced[tau].items()}
        for e in essentials:
            columns[e] = transform[e]
        change = IndexedMatrix.from_columns(A.col_labels, A.col_labels, columns, p)
    return GradedJordanBasis(pairs, essentials, change)


def filtered_jordan(A: IndexedMatrix, grades: Mapping[Label, float], order: Optional[Mapping] = None,
                    dims: Optional[DimensionOf] = None, with_basis: bool = True) -> GradedJordanBasis:
    """F-minimal Jordan basis of a square-zero graded differential.

    order is the linear refinement of grades used to break ties (default: grade, then
    label position). With dims, dimensions are processed top-down and columns already
    known to be pivot rows are skipped.
    """
    _check_square(A)
    missing = [x for x in A.col_labels if x not in grades]
    if missing:
        raise LabelMismatch(f"no grade for {missing[0]!r}")
    for r, c, _ in A.entries():
        if grades[r] > grades[c]:
            raise InvariantViolation(f"grades are not monotone along the boundary at ({r!r}, {c!r})")
    if not (A @ A).is_zero():
        raise InvariantViolation("boundary does not square to zero")

    if order is None:
        order = {x: i for i, x in enumerate(sorted(A.col_labels, key=lambda x: (grades[x], A.col_position(x))))}
    if dims is None:
        sequence = sorted(A.col_labels, key=order.__getitem__)
        basis = _jordan_pairs(A, order, sequence, with_basis, clear=False)
    else:
        dim_of = _dimension_function(dims)
        sequence = sorted(A.col_labels, key=lambda x: (-dim_of(x), order[x]))
        basis = _jordan_pairs(A, order, sequence, with_basis, clear=True)
    logger.info("filtered Jordan basis: %d pairs, %d essential classes", basis.rank, len(basis.essentials))
    return basis


def barcode(basis: GradedJordanBasis, grades: Mapping[Label, float], dims: Optional[DimensionOf] = None,
            keep_zero: bool = False, max_dim: Optional[int] = None) -> Barcode:
    """Intervals [grade(σ), grade(τ)) per pair and [grade(σ), inf) per essential cycle."""
    dim_of = _dimension_function(dims)
    intervals: dict[int, list[Interval]] = {d: [] for d in range(max_dim + 1)} if max_dim is not None else {}

    def keep(d: int) -> bool:
        return d >= 0 and (max_dim is None or d <= max_dim)

    for sigma, tau in basis.pairs:
        d = dim_of(sigma)
        birth, death = grades[sigma], grades[tau]
        if keep(d) and (birth < death or keep_zero):
            intervals.setdefault(d, []).append((birth, death))
    for sigma in basis.essentials:
        d = dim_of(sigma)
        if keep(d):
            intervals.setdefault(d, []).append((grades[sigma], math.inf))
    return Barcode(intervals)


def jordan_unfiltered(T: IndexedMatrix) -> GradedJordanBasis:
    """Jordan pairing of a square-zero operator with no filtration.

    Columns are visited sparsest first (ties by label order); rows are compared in the
    same order, which is all the reduction needs.
    """
    _check_square(T)
    if not (T @ T).is_zero():
        raise NotNilpotentError("only 2-nilpotent supported")
    sequence = sorted(T.col_labels, key=lambda x: (len(T.column(x)), T.col_position(x)))
    order = {x: i for i, x in enumerate(sequence)}
    return _jordan_pairs(T, order, sequence, with_basis=True, clear=False)


# --- General nilpotent operators ---

@dataclass(frozen=True)
class JordanOrbits:
    labels: tuple
    modulus: int
    orbits: tuple      # each orbit (v, Tv, ..., T^{m-1} v) as sparse vectors

    def lengths(self) -> list[int]:
        return sorted((len(orbit) for orbit in self.orbits), reverse=True)

    def change_of_basis(self) -> IndexedMatrix:
        """Columns labeled (orbit, step)."""
        columns = {(k, i): v for k, orbit in enumerate(self.orbits) for i, v in enumerate(orbit)}
        return IndexedMatrix.from_columns(self.labels, list(columns), columns, self.modulus)

    def shift(self) -> IndexedMatrix:
        """Jordan form: (k, i) maps to (k, i+1), the last step of each orbit to zero."""
        cols = [(k, i) for k, orbit in enumerate(self.orbits) for i in range(len(orbit))]
        columns = {(k, i): {(k, i + 1): 1} for k, i in cols if i + 1 < len(self.orbits[k])}
        return IndexedMatrix.from_columns(cols, cols, columns, self.modulus)


def nilpotent_jordan_via_qbasis(T: IndexedMatrix, seed: Optional[int] = None) -> JordanOrbits:
    """Jordan basis of a nilpotent operator as orbits of a minimum-weight q-basis.

    The weight of v is the least m with T^m v = 0. For each m, new tops are chosen in
    Ker(T^m), independent modulo Im(T) + Ker(T^(m-1)); their orbits have length m.
    """
    _check_square(T)
    p = T.modulus
    rng = np.random.default_rng(seed) if seed is not None else None
    n = len(T.col_labels)
    power = T
    kernels = []
    for _ in range(n + 1):
        kernels.append(kernel_basis(power))
        if power.is_zero():
            break
        power = T @ power
    else:
        raise NotNilpotentError("operator is not nilpotent")

    echelon = SparseEchelon(p)
    for c in T.col_labels:
        echelon.add(T.column(c))
    tops = []
    for m, kernel in enumerate(kernels, start=1):
        if rng is not None:
            kernel = [kernel[i] for i in rng.permutation(len(kernel))]
        for v in kernel:
            if echelon.add(v):
                tops.append((m, v))

    orbits = []
    for m, v in sorted(tops, key=lambda top: -top[0]):
        orbit = [v]
        for _ in range(m - 1):
            orbit.append(T.matvec(orbit[-1]))
        orbits.append(tuple(orbit))
    return JordanOrbits(T.col_labels, p, tuple(orbits))


def decompose_module(maps: Sequence[IndexedMatrix], seed: Optional[int] = None) -> list[tuple[int, int]]:
    """Interval decomposition of V_0 -> V_1 -> ... -> V_L given by the maps.

    Returns (start, end) index pairs, inclusive, one per orbit of a graded Jordan basis
    of the degree-one operator on the direct sum.
    """
    if not maps:
        return []
    p = maps[0].modulus
    for earlier, later in zip(maps, maps[1:]):
        if later.modulus != p:
            raise LabelMismatch("maps are over different fields")
        if set(earlier.row_labels) != set(later.col_labels):
            raise LabelMismatch("dimension mismatch between consecutive maps")
    rng = np.random.default_rng(seed) if seed is not None else None
    spaces = [maps[0].col_labels] + [m.row_labels for m in maps]
    last = len(maps)

    intervals = []
    for start, space in enumerate(spaces):
        echelon = SparseEchelon(p)
        if start > 0:
            incoming = maps[start - 1]
            for c in incoming.col_labels:
                echelon.add(incoming.column(c))
        composite = None
        for length in range(1, last - start + 2):
            step = start + length - 1
            if step < last:
                composite = maps[step] if composite is None else maps[step] @ composite
                kernel = kernel_basis(composite)
            else:
                kernel = [{x: 1} for x in space]
            if rng is not None:
                kernel = [kernel[i] for i in rng.permutation(len(kernel))]
            for v in kernel:
                if echelon.add(v):
                    intervals.append((start, start + length - 1))
    return sorted(intervals)


# --- Engine pipeline ---

@dataclass(frozen=True)
class PersistenceResult:
    barcode: Barcode
    basis: GradedJordanBasis
    boundary: FilteredBoundary


def compute_barcode(K: FilteredComplex, p: int, max_dim: Optional[int] = None, reduce: bool = True,
                    reduced: bool = False, keep_zero: bool = False, seed: Optional[int] = None,
                    rounds: int = 1, with_basis: bool = False) -> PersistenceResult:
    """Barcode of K in dimensions 0..max_dim, optionally after Morse reduction."""
    top = max(K.dimension, 0) if max_dim is None else max_dim
    if reduce:
        boundary = morse_reduce(K, p, top, reduced=reduced, seed=seed, rounds=rounds).boundary
    else:
        boundary = filtered_boundary(K, p, max_dim=top + 1, reduced=reduced, seed=seed)
    basis = filtered_jordan(boundary.matrix, boundary.grades, order=boundary.order,
                            dims=boundary.dim, with_basis=with_basis)
    bars = barcode(basis, boundary.grades, dims=boundary.dim, keep_zero=keep_zero, max_dim=top)
    return PersistenceResult(bars, basis, boundary)
