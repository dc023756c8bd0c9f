"""Linear matroids over GF(p), held as standard representations [I | M].

The rows of M are labeled by a basis B and its columns by E - B; the identity block
on B is implied. Every query is answered from M alone.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import networkx as nx

from enums import GenerationTest
from errors import InstanceTooLarge, LabelMismatch, SingularPivotError, UsageError
from field import inverse
from sparse import IndexedMatrix, SparseEchelon, add_scaled, lu_exchange

logger = logging.getLogger(__name__)

Label = Hashable
WeightFunction = Mapping[Label, int]

EXHAUSTIVE_LIMIT = 12


@dataclass(frozen=True)
class StandardRep:
    matrix: IndexedMatrix

    def __post_init__(self):
        if set(self.matrix.row_labels) & set(self.matrix.col_labels):
            raise LabelMismatch("basis and non-basis labels must be disjoint")

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], basis: Sequence[Label],
                   nonbasis: Sequence[Label], modulus: int = 2) -> "StandardRep":
        return cls(IndexedMatrix.from_dense(rows, modulus, basis, nonbasis))

    @property
    def basis(self) -> tuple:
        return self.matrix.row_labels

    @property
    def nonbasis(self) -> tuple:
        return self.matrix.col_labels

    @property
    def ground_set(self) -> tuple:
        return self.basis + self.nonbasis

    @property
    def modulus(self) -> int:
        return self.matrix.modulus

    def vector(self, e: Label) -> dict:
        """Column of e in the full representation, over basis coordinates."""
        if e in self.matrix._row_pos:
            return {e: 1}
        return dict(self.matrix.column(e))


def _subset(rep: StandardRep, S: Iterable[Label]) -> frozenset:
    S = frozenset(S)
    unknown = S - set(rep.ground_set)
    if unknown:
        raise LabelMismatch(f"unknown ground-set label {sorted(map(repr, unknown))[0]}")
    return S


# --- Independence, rank, closure ---

def rank(rep: StandardRep, S: Iterable[Label]) -> int:
    """|S ∩ B| plus the rank of M on rows B - S and columns S - B."""
    S = _subset(rep, S)
    inside = sum(1 for b in rep.basis if b in S)
    rows = [b for b in rep.basis if b not in S]
    cols = [e for e in rep.nonbasis if e in S]
    if not rows or not cols:
        return inside
    return inside + lu_exchange(rep.matrix.submatrix(rows, cols)).rank


def is_independent(rep: StandardRep, S: Iterable[Label]) -> bool:
    S = _subset(rep, S)
    return rank(rep, S) == len(S)


def closure(rep: StandardRep, S: Iterable[Label]) -> frozenset:
    S = _subset(rep, S)
    r = rank(rep, S)
    return frozenset(t for t in rep.ground_set if t in S or rank(rep, S | {t}) == r)


def fundamental_circuit(rep: StandardRep, e: Label) -> frozenset:
    """{e} plus the support of e's column; a loop gives {e}."""
    _subset(rep, [e])
    if e in rep.basis:
        raise LabelMismatch(f"{e!r} belongs to the basis and has no fundamental circuit")
    return frozenset(rep.matrix.column(e)) | {e}


def support_matrix(rep: StandardRep) -> IndexedMatrix:
    """0/1 incidence of fundamental circuits: entry (b, e) is 1 iff b lies in the circuit of e."""
    M = rep.matrix
    return IndexedMatrix(M.row_labels, M.col_labels, {(r, c): 1 for r, c, _ in M.entries()}, M.modulus)


# --- Basis exchange and minors ---

def _exchange(M: IndexedMatrix, b: Label, e: Label) -> IndexedMatrix:
    """Single pivot: b leaves the basis, e enters. Row b becomes row e, column e becomes column b."""
    p = M.modulus
    m = M[b, e]
    if not m:
        raise SingularPivotError("pivot block singular")
    inv = inverse(m, p)
    col_e = {r: x for r, x in M.column(e).items() if r != b}
    columns = {b: {e: inv, **{r: -x * inv % p for r, x in col_e.items()}}}
    for c in M.col_labels:
        if c == e:
            continue
        col = dict(M.column(c))
        x_bc = col.pop(b, 0)
        if x_bc:
            f = x_bc * inv % p
            add_scaled(col, col_e, -f, p)
            col[e] = f
        columns[c] = col
    rows = [e if r == b else r for r in M.row_labels]
    cols = [b if c == e else c for c in M.col_labels]
    return IndexedMatrix.from_columns(rows, cols, columns, p)


def exchange_basis(rep: StandardRep, pairs: Sequence[tuple[Label, Label]]) -> StandardRep:
    """Block pivot on M(bs, es). Each b_i ends up replaced by e_i in the label order."""
    pairs = list(pairs)
    if not pairs:
        return rep
    bs = [b for b, _ in pairs]
    es = [e for _, e in pairs]
    if len(set(bs)) != len(bs) or len(set(es)) != len(es):
        raise LabelMismatch("exchange pairs must use distinct labels")
    for b in bs:
        if b not in rep.basis:
            raise LabelMismatch(f"{b!r} is not a basis element")
    for e in es:
        if e not in rep.nonbasis:
            raise LabelMismatch(f"{e!r} is not a non-basis element")

    M = rep.matrix
    rows_left, cols_left = set(bs), set(es)
    while rows_left:
        pick = next(((b, e) for b in M.row_labels if b in rows_left
                     for e in M.col_labels if e in cols_left and M[b, e]), None)
        if pick is None:
            raise SingularPivotError("pivot block singular")
        b, e = pick
        M = _exchange(M, b, e)
        rows_left.discard(b)
        cols_left.discard(e)
    swap = dict(pairs)
    back = {e: b for b, e in pairs}
    rows = [swap.get(r, r) for r in rep.basis]
    cols = [back.get(c, c) for c in rep.nonbasis]
    return StandardRep(M.submatrix(rows, cols))


def delete(rep: StandardRep, S: Iterable[Label]) -> StandardRep:
    """Restriction to E - S."""
    S = _subset(rep, S)
    M = rep.matrix
    for s in [b for b in rep.basis if b in S]:
        partner = next((e for e in M.col_labels if e not in S and M[s, e]), None)
        if partner is not None:
            M = _exchange(M, s, partner)
    # remaining rows in S are coloops of E - S
    return StandardRep(M.submatrix([r for r in M.row_labels if r not in S],
                                   [c for c in M.col_labels if c not in S]))


def contract(rep: StandardRep, S: Iterable[Label]) -> StandardRep:
    S = _subset(rep, S)
    M = rep.matrix
    for s in [e for e in rep.nonbasis if e in S]:
        partner = next((b for b in M.row_labels if b not in S and M[b, s]), None)
        if partner is not None:
            M = _exchange(M, partner, s)
    return StandardRep(M.submatrix([r for r in M.row_labels if r not in S],
                                   [c for c in M.col_labels if c not in S]))


def dual(rep: StandardRep) -> StandardRep:
    """Standard representation -M^T on basis E - B."""
    return StandardRep(rep.matrix.transpose().scaled(-1))


# --- Bases and weights ---

def bases(rep: StandardRep) -> list[frozenset]:
    ground = rep.ground_set
    if len(ground) > EXHAUSTIVE_LIMIT:
        raise InstanceTooLarge("instance too large")
    r = len(rep.basis)
    return [frozenset(c) for c in itertools.combinations(ground, r) if is_independent(rep, c)]


def greedy_minimal_basis(rep: StandardRep, F: WeightFunction) -> frozenset:
    """Basis of minimum total F-weight; ties go to the earlier ground-set label."""
    missing = [e for e in rep.ground_set if e not in F]
    if missing:
        raise LabelMismatch(f"weight missing for {missing[0]!r}")
    position = {e: i for i, e in enumerate(rep.ground_set)}
    echelon = SparseEchelon(rep.modulus)
    chosen = []
    for e in sorted(rep.ground_set, key=lambda x: (F[x], position[x])):
        if echelon.add(rep.vector(e)):
            chosen.append(e)
            if len(chosen) == len(rep.basis):
                break
    return frozenset(chosen)


def weight(F: WeightFunction, S: Iterable[Label]) -> int:
    return sum(F[x] for x in S)


# --- Modularity and free generation ---

def is_modular_pair(rep: StandardRep, S: Iterable[Label], T: Iterable[Label]) -> bool:
    S, T = _subset(rep, S), _subset(rep, T)
    return rank(rep, S | T) + rank(rep, S & T) == rank(rep, S) + rank(rep, T)


def _is_two_chains(members: Sequence[frozenset]) -> bool:
    """True when the family, ordered by inclusion, splits into two chains."""
    incomparable = nx.Graph()
    incomparable.add_nodes_from(range(len(members)))
    for i, j in itertools.combinations(range(len(members)), 2):
        if not (members[i] <= members[j] or members[j] <= members[i]):
            incomparable.add_edge(i, j)
    return nx.is_bipartite(incomparable)


def is_freely_generated(rep: StandardRep, family: Sequence[Iterable[Label]],
                        strategy: GenerationTest = GenerationTest.AUTO) -> bool:
    """Is there a basis B with B ∩ S spanning S for every member S?"""
    members = [_subset(rep, S) for S in family]
    if not members:
        raise UsageError("family must be nonempty")
    strategy = GenerationTest(strategy)
    if strategy == GenerationTest.AUTO:
        strategy = GenerationTest.MODULAR if _is_two_chains(members) else GenerationTest.EXHAUSTIVE

    if strategy == GenerationTest.MODULAR:
        if not _is_two_chains(members):
            raise UsageError("the modular test applies only to unions of two chains")
        return all(is_modular_pair(rep, S, T) for S, T in itertools.combinations(members, 2))

    targets = [(S, rank(rep, S)) for S in members]
    for B in bases(rep):
        if all(rank(rep, B & S) == r for S, r in targets):
            logger.debug("family generated by basis %s", sorted(map(repr, B)))
            return True
    return False
