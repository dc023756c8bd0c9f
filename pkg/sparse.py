"""Sparse exact matrices over GF(p) with labeled rows and columns.

Entry A(i, j) is stored in a column-major map: column label -> {row label -> residue}.
Zeros are never stored. Matrices are treated as immutable values; every operation
below returns a new matrix. Pivoting happens on a private mutable workspace.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from enums import PivotRule
from errors import CyclicSupportError, FieldError, InputError, LabelMismatch, SingularPivotError
from field import FieldElement, check_modulus, inverse

logger = logging.getLogger(__name__)

Label = Hashable
Vector = dict  # label -> nonzero residue


def _positions(labels: Sequence[Label], kind: str) -> dict:
    positions = {label: i for i, label in enumerate(labels)}
    if len(positions) != len(labels):
        raise LabelMismatch(f"duplicate {kind} labels")
    return positions


def add_scaled(target: Vector, source: Mapping, coeff: int, p: int) -> Vector:
    """target += coeff * source, in place, dropping entries that cancel."""
    coeff %= p
    if not coeff:
        return target
    for label, x in source.items():
        v = (target.get(label, 0) + coeff * x) % p
        if v:
            target[label] = v
        else:
            target.pop(label, None)
    return target


class IndexedMatrix:
    __slots__ = ("row_labels", "col_labels", "modulus", "_cols", "_row_pos", "_col_pos", "_rows")

    def __init__(self, row_labels: Iterable[Label], col_labels: Iterable[Label],
                 entries: Optional[Mapping] = None, modulus: int = 2):
        self.row_labels = tuple(row_labels)
        self.col_labels = tuple(col_labels)
        self.modulus = modulus = check_modulus(modulus)
        self._row_pos = _positions(self.row_labels, "row")
        self._col_pos = _positions(self.col_labels, "column")
        self._rows = None
        cols: dict = {}
        for (r, c), value in (entries or {}).items():
            if r not in self._row_pos or c not in self._col_pos:
                raise LabelMismatch(f"entry ({r!r}, {c!r}) lies outside the label sets")
            v = int(value) % modulus
            if v:
                cols.setdefault(c, {})[r] = v
        self._cols = cols

    @classmethod
    def from_columns(cls, row_labels, col_labels, columns: Mapping, modulus: int) -> "IndexedMatrix":
        """Trusted constructor: columns must already hold reduced nonzero residues on known labels."""
        m = cls.__new__(cls)
        m.row_labels = tuple(row_labels)
        m.col_labels = tuple(col_labels)
        m.modulus = check_modulus(modulus)
        m._row_pos = _positions(m.row_labels, "row")
        m._col_pos = _positions(m.col_labels, "column")
        m._rows = None
        m._cols = {c: dict(col) for c, col in columns.items() if col}
        return m

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], modulus: int = 2,
                   row_labels: Optional[Sequence] = None, col_labels: Optional[Sequence] = None) -> "IndexedMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else len(col_labels or ())
        row_labels = tuple(range(n_rows)) if row_labels is None else tuple(row_labels)
        col_labels = tuple(range(n_cols)) if col_labels is None else tuple(col_labels)
        entries = {}
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                if int(value) % modulus:
                    entries[(row_labels[i], col_labels[j])] = value
        return cls(row_labels, col_labels, entries, modulus)

    @classmethod
    def identity(cls, labels: Iterable[Label], modulus: int = 2) -> "IndexedMatrix":
        labels = tuple(labels)
        return cls.from_columns(labels, labels, {x: {x: 1} for x in labels}, modulus)

    @classmethod
    def zeros(cls, row_labels, col_labels, modulus: int = 2) -> "IndexedMatrix":
        return cls.from_columns(row_labels, col_labels, {}, modulus)

    # --- Read access ---

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self._cols.values())

    def __getitem__(self, key) -> int:
        r, c = key
        if r not in self._row_pos or c not in self._col_pos:
            raise LabelMismatch(f"unknown entry ({r!r}, {c!r})")
        return self._cols.get(c, {}).get(r, 0)

    def element(self, r: Label, c: Label) -> FieldElement:
        return FieldElement(self[r, c], self.modulus)

    def column(self, c: Label) -> Mapping:
        if c not in self._col_pos:
            raise LabelMismatch(f"unknown column {c!r}")
        return MappingProxyType(self._cols.get(c, {}))

    def row(self, r: Label) -> Mapping:
        if r not in self._row_pos:
            raise LabelMismatch(f"unknown row {r!r}")
        return MappingProxyType(self._row_index().get(r, {}))

    def _row_index(self) -> dict:
        if self._rows is None:
            rows: dict = {}
            for c, col in self._cols.items():
                for r, v in col.items():
                    rows.setdefault(r, {})[c] = v
            self._rows = rows
        return self._rows

    def row_position(self, r: Label) -> int:
        return self._row_pos[r]

    def col_position(self, c: Label) -> int:
        return self._col_pos[c]

    def entries(self) -> Iterator[tuple[Label, Label, int]]:
        """(row, col, value) in column order, rows ascending within a column."""
        for c in self.col_labels:
            col = self._cols.get(c)
            if col:
                for r in sorted(col, key=self._row_pos.__getitem__):
                    yield r, c, col[r]

    def support(self) -> set:
        return {(r, c) for c, col in self._cols.items() for r in col}

    def is_zero(self) -> bool:
        return not self._cols

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * len(self.col_labels) for _ in self.row_labels]
        for c, col in self._cols.items():
            j = self._col_pos[c]
            for r, v in col.items():
                dense[self._row_pos[r]][j] = v
        return dense

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_dense(), dtype=np.int64).reshape(self.shape)

    # --- Derived matrices ---

    def transpose(self) -> "IndexedMatrix":
        return IndexedMatrix.from_columns(self.col_labels, self.row_labels, self._row_index(), self.modulus)

    def scaled(self, factor: int) -> "IndexedMatrix":
        p = self.modulus
        factor %= p
        columns = {c: {r: v * factor % p for r, v in col.items()} for c, col in self._cols.items()} if factor else {}
        return IndexedMatrix.from_columns(self.row_labels, self.col_labels, columns, p)

    def submatrix(self, rows: Iterable[Label], cols: Iterable[Label]) -> "IndexedMatrix":
        rows, cols = tuple(rows), tuple(cols)
        for r in rows:
            if r not in self._row_pos:
                raise LabelMismatch(f"unknown row {r!r}")
        keep = set(rows)
        columns = {}
        for c in cols:
            if c not in self._col_pos:
                raise LabelMismatch(f"unknown column {c!r}")
            col = self._cols.get(c)
            if col:
                columns[c] = {r: v for r, v in col.items() if r in keep}
        return IndexedMatrix.from_columns(rows, cols, columns, self.modulus)

    def relabeled(self, row_map: Optional[Mapping] = None, col_map: Optional[Mapping] = None) -> "IndexedMatrix":
        """Rename labels through the given maps; unmapped labels keep their names."""
        row_map, col_map = row_map or {}, col_map or {}
        rows = [row_map.get(r, r) for r in self.row_labels]
        cols = [col_map.get(c, c) for c in self.col_labels]
        columns = {col_map.get(c, c): {row_map.get(r, r): v for r, v in col.items()}
                   for c, col in self._cols.items()}
        return IndexedMatrix.from_columns(rows, cols, columns, self.modulus)

    def matvec(self, vector: Mapping) -> Vector:
        p = self.modulus
        out: Vector = {}
        for c, x in vector.items():
            if c not in self._col_pos:
                raise LabelMismatch(f"unknown column {c!r}")
            col = self._cols.get(c)
            if col:
                add_scaled(out, col, int(x), p)
        return out

    def __matmul__(self, other: "IndexedMatrix") -> "IndexedMatrix":
        if not isinstance(other, IndexedMatrix):
            return NotImplemented
        if other.modulus != self.modulus:
            raise FieldError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
        if set(self.col_labels) != set(other.row_labels):
            raise LabelMismatch("column labels of the left factor must equal row labels of the right factor")
        columns = {}
        for c, col in other._cols.items():
            out = self.matvec(col)
            if out:
                columns[c] = out
        return IndexedMatrix.from_columns(self.row_labels, other.col_labels, columns, self.modulus)

    def __add__(self, other: "IndexedMatrix") -> "IndexedMatrix":
        self._check_compatible(other)
        columns = {c: dict(col) for c, col in self._cols.items()}
        for c, col in other._cols.items():
            add_scaled(columns.setdefault(c, {}), col, 1, self.modulus)
        return IndexedMatrix.from_columns(self.row_labels, self.col_labels, columns, self.modulus)

    def __sub__(self, other: "IndexedMatrix") -> "IndexedMatrix":
        return self + other.scaled(-1)

    def _check_compatible(self, other: "IndexedMatrix"):
        if other.modulus != self.modulus:
            raise FieldError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
        if set(self.row_labels) != set(other.row_labels) or set(self.col_labels) != set(other.col_labels):
            raise LabelMismatch("matrices are indexed by different label sets")

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexedMatrix):
            return NotImplemented
        return (self.modulus == other.modulus
                and set(self.row_labels) == set(other.row_labels)
                and set(self.col_labels) == set(other.col_labels)
                and self._cols == other._cols)

    __hash__ = None

    def __repr__(self) -> str:
        return (f"IndexedMatrix({len(self.row_labels)}x{len(self.col_labels)}, "
                f"nnz={self.nnz}, modulus={self.modulus})")


# --- Pivoting workspace ---

class _Workspace:
    """Mutable copy of a matrix with row adjacency, for Schur-complement pivoting."""

    def __init__(self, matrix: IndexedMatrix):
        self.p = matrix.modulus
        self.row_pos = matrix._row_pos
        self.col_pos = matrix._col_pos
        self.cols = {c: dict(col) for c, col in matrix._cols.items()}
        self.rows: dict = {}
        for c, col in self.cols.items():
            for r in col:
                self.rows.setdefault(r, set()).add(c)

    def pivot(self, a: Label, b: Label) -> tuple[dict, dict]:
        """Eliminate on (a, b). Returns the pivot column and pivot row as they were before elimination."""
        p = self.p
        col_b = self.cols.pop(b)
        pivot_value = col_b[a]
        inv = inverse(pivot_value, p)
        row_a = {b: pivot_value}
        for r in col_b:
            self.rows[r].discard(b)
        for c in list(self.rows.get(a, ())):
            col_c = self.cols[c]
            x_ac = col_c.pop(a)
            row_a[c] = x_ac
            f = x_ac * inv % p
            for r, x in col_b.items():
                if r == a:
                    continue
                v = (col_c.get(r, 0) - x * f) % p
                if v:
                    if r not in col_c:
                        self.rows.setdefault(r, set()).add(c)
                    col_c[r] = v
                elif r in col_c:
                    del col_c[r]
                    self.rows[r].discard(c)
            if not col_c:
                del self.cols[c]
        self.rows.pop(a, None)
        return col_b, row_a

    def choose(self, rule: PivotRule, rows: Optional[set] = None, cols: Optional[set] = None,
               rng: Optional[np.random.Generator] = None) -> Optional[tuple[Label, Label]]:
        """Pick a nonzero pivot inside rows x cols (everything when None)."""
        candidates = []
        for c, col in self.cols.items():
            if cols is not None and c not in cols:
                continue
            live = [r for r in col if rows is None or r in rows]
            if live:
                candidates.append((c, live))
        if not candidates:
            return None
        if rule == PivotRule.MARKOWITZ:
            c, live = min(candidates, key=lambda item: (len(item[1]), self.col_pos[item[0]]))
            r = min(live, key=lambda x: (len(self.rows[x]), self.row_pos[x]))
            return r, c
        if rule == PivotRule.FIRST:
            c, live = min(candidates, key=lambda item: self.col_pos[item[0]])
            return min(live, key=self.row_pos.__getitem__), c
        if rule == PivotRule.RANDOM:
            pairs = sorted(((r, c) for c, live in candidates for r in live),
                           key=lambda rc: (self.col_pos[rc[1]], self.row_pos[rc[0]]))
            rng = rng if rng is not None else np.random.default_rng()
            return pairs[int(rng.integers(len(pairs)))]
        raise ValueError(f"unknown pivot rule {rule!r}")

    def to_matrix(self, row_labels, col_labels) -> IndexedMatrix:
        return IndexedMatrix.from_columns(row_labels, col_labels, self.cols, self.p)


# --- Schur complements and clearing ---

def schur_complement(A: IndexedMatrix, rows: Iterable[Label], cols: Iterable[Label]) -> IndexedMatrix:
    """a22 - a21 a11^-1 a12 for the pivot block A(rows, cols), on the remaining labels.

    Eliminates one entry of the block at a time; the result does not depend on the order.
    """
    rows, cols = list(rows), list(cols)
    row_set, col_set = set(rows), set(cols)
    for r in rows:
        A.row_position(r)
    for c in cols:
        A.col_position(c)
    if len(row_set) != len(col_set):
        raise SingularPivotError("pivot block singular: block is not square")
    ws = _Workspace(A)
    while row_set:
        pick = ws.choose(PivotRule.MARKOWITZ, row_set, col_set)
        if pick is None:
            raise SingularPivotError("pivot block singular")
        a, b = pick
        ws.pivot(a, b)
        row_set.discard(a)
        col_set.discard(b)
    pivot_rows, pivot_cols = set(rows), set(cols)
    return ws.to_matrix([r for r in A.row_labels if r not in pivot_rows],
                        [c for c in A.col_labels if c not in pivot_cols])


def _pivot_value(A: IndexedMatrix, pivot: tuple[Label, Label]) -> int:
    a, b = pivot
    v = A[a, b]
    if not v:
        raise SingularPivotError(f"zero pivot at ({a!r}, {b!r})")
    return v


def clear_column(A: IndexedMatrix, pivot: tuple[Label, Label]) -> IndexedMatrix:
    """A·U: column operations that zero the pivot's row away from the pivot."""
    a, b = pivot
    p = A.modulus
    inv = inverse(_pivot_value(A, pivot), p)
    col_b = A._cols[b]
    columns = {c: dict(col) for c, col in A._cols.items()}
    for c, x in A._row_index()[a].items():
        if c != b:
            add_scaled(columns[c], col_b, -x * inv, p)
    return IndexedMatrix.from_columns(A.row_labels, A.col_labels, columns, p)


def clear_row(A: IndexedMatrix, pivot: tuple[Label, Label]) -> IndexedMatrix:
    """L·A: row operations that zero the pivot's column away from the pivot."""
    a, b = pivot
    p = A.modulus
    inv = inverse(_pivot_value(A, pivot), p)
    multipliers = {r: x * inv % p for r, x in A._cols[b].items() if r != a}
    columns = {c: dict(col) for c, col in A._cols.items()}
    for c, x in A._row_index()[a].items():
        add_scaled(columns[c], multipliers, -x, p)
    return IndexedMatrix.from_columns(A.row_labels, A.col_labels, columns, p)


# --- LU factorization ---

@dataclass(frozen=True)
class LUFactorization:
    L: IndexedMatrix
    D: IndexedMatrix
    U: IndexedMatrix
    pivot_sequence: tuple

    @property
    def rank(self) -> int:
        return len(self.pivot_sequence)


def _factor(A: IndexedMatrix, choose: Callable[[_Workspace], Optional[tuple]]) -> LUFactorization:
    p = A.modulus
    ws = _Workspace(A)
    l_cols, u_rows, d_entries, sequence = {}, {}, {}, []
    while True:
        pick = choose(ws)
        if pick is None:
            break
        a, b = pick
        col_b, row_a = ws.pivot(a, b)
        v = col_b[a]
        inv = inverse(v, p)
        l_cols[a] = {r: x * inv % p for r, x in col_b.items()}
        u_rows[b] = {c: x * inv % p for c, x in row_a.items()}
        d_entries[a, b] = v
        sequence.append((a, b))

    L = IndexedMatrix.from_columns(A.row_labels, A.row_labels,
                                   {r: l_cols.get(r, {r: 1}) for r in A.row_labels}, p)
    u_cols: dict = {}
    for c in A.col_labels:
        for target, v in u_rows.get(c, {c: 1}).items():
            u_cols.setdefault(target, {})[c] = v
    U = IndexedMatrix.from_columns(A.col_labels, A.col_labels, u_cols, p)
    D = IndexedMatrix(A.row_labels, A.col_labels, d_entries, p)
    logger.debug("LU of %dx%d matrix: rank %d", len(A.row_labels), len(A.col_labels), len(sequence))
    return LUFactorization(L, D, U, tuple(sequence))


def lu_exchange(A: IndexedMatrix, pivot_rule: PivotRule = PivotRule.MARKOWITZ,
                seed: Optional[int] = None) -> LUFactorization:
    """Factor A = L·D·U by repeated exchange pivots until no nonzero entry remains.

    L and U have unit diagonal and are triangular under the pivot order; D holds the
    pivot values at the pivot positions (0/1 over GF(2)). Rank-deficient input simply
    stops early.
    """
    rule = PivotRule(pivot_rule)
    rng = np.random.default_rng(seed)
    return _factor(A, lambda ws: ws.choose(rule, rng=rng))


def filtered_lu(A: IndexedMatrix, row_order: Optional[Mapping] = None,
                col_order: Optional[Mapping] = None) -> LUFactorization:
    """LU whose pivots are filtration-minimal.

    Each pivot (a, b) takes b as the latest live column in col_order and a as the
    earliest row of that column in row_order, so L is lower triangular in row_order
    and each row of U only reaches columns at or before its pivot column.
    """
    row_order = row_order or A._row_pos
    col_order = col_order or A._col_pos

    def choose(ws: _Workspace):
        if not ws.cols:
            return None
        b = max(ws.cols, key=col_order.__getitem__)
        a = min(ws.cols[b], key=row_order.__getitem__)
        return a, b

    return _factor(A, choose)


# --- Triangular inverses and kernels ---

def mobius_inverse(A: IndexedMatrix) -> IndexedMatrix:
    """Inverse of a matrix with acyclic support, by sparse triangular substitution.

    Entry (i, j) of the result is the signed sum over support paths from i to j;
    it is computed column by column over the ancestors of each label.
    """
    if set(A.row_labels) != set(A.col_labels) or len(A.row_labels) != len(A.col_labels):
        raise LabelMismatch("Möbius inversion needs rows and columns on one label set")
    p = A.modulus
    rows = A._row_index()
    graph = nx.DiGraph()
    graph.add_nodes_from(A.row_labels)
    graph.add_edges_from((r, c) for c, col in A._cols.items() for r in col if r != c)
    if not nx.is_directed_acyclic_graph(graph):
        raise CyclicSupportError("support is not acyclic")
    for x in A.row_labels:
        if not rows.get(x, {}).get(x):
            raise SingularPivotError(f"matrix is singular: zero diagonal at {x!r}")

    position = {x: i for i, x in enumerate(nx.lexicographical_topological_sort(graph, key=A._row_pos.__getitem__))}
    columns = {}
    for c in A.row_labels:
        x: Vector = {}
        for j in sorted(nx.ancestors(graph, c) | {c}, key=position.__getitem__, reverse=True):
            s = 1 if j == c else 0
            for k, a in rows[j].items():
                if k != j and k in x:
                    s -= a * x[k]
            s = s * inverse(rows[j][j], p) % p
            if s:
                x[j] = s
        columns[c] = x
    return IndexedMatrix.from_columns(A.col_labels, A.row_labels, columns, p)


def kernel_basis(A: IndexedMatrix) -> list[Vector]:
    """Basis of Ker(A) as vectors over the column labels, by column reduction."""
    p = A.modulus
    low_of = A._row_pos.__getitem__
    pivots: dict = {}
    basis = []
    for c in A.col_labels:
        col = dict(A._cols.get(c, {}))
        vec = {c: 1}
        while col:
            low = max(col, key=low_of)
            if low not in pivots:
                pivots[low] = (col, vec)
                break
            pcol, pvec = pivots[low]
            f = col[low] * inverse(pcol[low], p)
            add_scaled(col, pcol, -f, p)
            add_scaled(vec, pvec, -f, p)
        if not col:
            basis.append(vec)
    return basis


class SparseEchelon:
    """Reduced echelon basis of sparse vectors, grown one vector at a time."""

    def __init__(self, modulus: int):
        self.modulus = modulus
        self._basis: dict = {}  # pivot label -> vector with 1 at the pivot and 0 at every other pivot

    def __len__(self) -> int:
        return len(self._basis)

    def reduce(self, vector: Mapping) -> Vector:
        p = self.modulus
        vec = {k: int(v) % p for k, v in vector.items() if int(v) % p}
        for label in [k for k in vec if k in self._basis]:
            coeff = vec.get(label)
            if coeff:
                add_scaled(vec, self._basis[label], -coeff, p)
        return vec

    def spans(self, vector: Mapping) -> bool:
        return not self.reduce(vector)

    def add(self, vector: Mapping) -> bool:
        """Insert a vector; False when it already lies in the span."""
        p = self.modulus
        vec = self.reduce(vector)
        if not vec:
            return False
        pivot = next(iter(vec))
        inv = inverse(vec[pivot], p)
        vec = {k: v * inv % p for k, v in vec.items()}
        for stored in self._basis.values():
            if pivot in stored:
                add_scaled(stored, vec, -stored[pivot], p)
        self._basis[pivot] = vec
        return True


# --- Fixture files ---
# Format: header "rows cols modulus", then one "i j v" triple per nonzero, 0-indexed.

def format_fixture(A: IndexedMatrix) -> str:
    lines = [f"{len(A.row_labels)} {len(A.col_labels)} {A.modulus}"]
    triples = sorted((A.row_position(r), A.col_position(c), v) for r, c, v in A.entries())
    lines.extend(f"{i} {j} {v}" for i, j, v in triples)
    return "\n".join(lines) + "\n"


def parse_fixture(text: str) -> IndexedMatrix:
    lines = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("%")]
    if not lines or len(lines[0]) != 3:
        raise InputError("fixture header must be 'rows cols modulus'")
    try:
        n_rows, n_cols, p = (int(x) for x in lines[0])
        triples = [tuple(int(x) for x in line) for line in lines[1:]]
    except ValueError:
        raise InputError("fixture entries must be integers")
    p = check_modulus(p)
    entries = {}
    for triple in triples:
        if len(triple) != 3:
            raise InputError("fixture entries must be 'i j v' triples")
        i, j, v = triple
        if not (0 <= i < n_rows and 0 <= j < n_cols):
            raise InputError(f"fixture entry ({i}, {j}) outside a {n_rows}x{n_cols} matrix")
        entries[(i, j)] = (entries.get((i, j), 0) + v) % p
    return IndexedMatrix(range(n_rows), range(n_cols), entries, p)


def load_fixture(path) -> IndexedMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    return parse_fixture(text)


def dump_fixture(A: IndexedMatrix, path) -> None:
    Path(path).write_text(format_fixture(A))
