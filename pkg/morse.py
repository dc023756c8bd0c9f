"""Acyclic matchings and discrete Morse reduction of graded boundary matrices.

A matching pairs rows with columns of a matrix. On a boundary matrix a pair (σ, τ)
says the face σ and the coface τ cancel; the cells left unmatched are critical and
carry the Morse boundary, computed here either by counting gradient paths or as a
Schur complement. Both must agree.
"""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Optional

import networkx as nx

from errors import CyclicSupportError, InvalidMatchingError
from field import inverse
from simplicial import FilteredBoundary, FilteredComplex, facets, filtered_boundary
from sparse import IndexedMatrix, add_scaled, lu_exchange

logger = logging.getLogger(__name__)

Label = Hashable


@dataclass(frozen=True)
class PartialMatching:
    pairs: tuple = ()
    row_partner: Mapping = field(init=False, repr=False, compare=False)
    col_partner: Mapping = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple((r, c) for r, c in self.pairs)
        rows = {r: c for r, c in pairs}
        cols = {c: r for r, c in pairs}
        if len(rows) != len(pairs):
            raise InvalidMatchingError("a row appears in more than one pair")
        if len(cols) != len(pairs):
            raise InvalidMatchingError("a column appears in more than one pair")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "row_partner", rows)
        object.__setattr__(self, "col_partner", cols)

    @property
    def rows(self) -> frozenset:
        return frozenset(self.row_partner)

    @property
    def cols(self) -> frozenset:
        return frozenset(self.col_partner)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class InducedRelation:
    """Transitive-reflexive closure, stored as a networkx digraph with self-loops."""
    graph: nx.DiGraph

    def __contains__(self, pair) -> bool:
        return self.graph.has_edge(*pair)

    def pairs(self) -> set:
        return set(self.graph.edges)

    def is_antisymmetric(self) -> bool:
        return not any(a != b and self.graph.has_edge(b, a) for a, b in self.graph.edges)


# --- Validity and induced relations ---

def validate_matching(A: IndexedMatrix, matching: PartialMatching) -> PartialMatching:
    for r, c in matching:
        if A[r, c] == 0:
            raise InvalidMatchingError(f"pair ({r!r}, {c!r}) is outside the support")
    rows = [r for r, _ in matching]
    cols = [c for _, c in matching]
    if rows and lu_exchange(A.submatrix(rows, cols)).rank != len(rows):
        raise InvalidMatchingError("pivot block of the matching is singular")
    return matching


def _row_graph(A: IndexedMatrix, matching: PartialMatching) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(A.row_labels)
    for j, j_col in matching:
        graph.add_edges_from((i, j) for i in A.column(j_col))
    return graph


def _col_graph(A: IndexedMatrix, matching: PartialMatching) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(A.col_labels)
    for i_row, i in matching:
        graph.add_edges_from((i, j) for j in A.row(i_row))
    return graph


def induced_relations(A: IndexedMatrix, matching: PartialMatching) -> tuple[InducedRelation, InducedRelation]:
    """(R_δ on rows, R^δ on columns)."""
    validate_matching(A, matching)
    return (InducedRelation(nx.transitive_closure(_row_graph(A, matching), reflexive=True)),
            InducedRelation(nx.transitive_closure(_col_graph(A, matching), reflexive=True)))


def _without_loops(graph: nx.DiGraph) -> nx.DiGraph:
    graph.remove_edges_from(list(nx.selfloop_edges(graph)))
    return graph


def is_acyclic(A: IndexedMatrix, matching: PartialMatching) -> bool:
    validate_matching(A, matching)
    return (nx.is_directed_acyclic_graph(_without_loops(_row_graph(A, matching)))
            and nx.is_directed_acyclic_graph(_without_loops(_col_graph(A, matching))))


# --- Obvious pairs ---

def obvious_pairs(K: FilteredComplex, dim: int, order: Optional[Mapping] = None) -> PartialMatching:
    """Pairs (σ, τ), σ of dimension dim, where σ is the latest facet of τ, τ is the earliest
    cofacet of σ, and both share a grade. Acyclic by construction."""
    if order is None:
        order = {s: i for i, s in enumerate(K.sorted_simplices())}
    latest_facet, earliest_cofacet = {}, {}
    for tau in K.grades:
        if len(tau) != dim + 2 or tau not in order:
            continue
        faces = [face for face, _ in facets(tau)]
        latest_facet[tau] = max(faces, key=order.__getitem__)
        for face in faces:
            current = earliest_cofacet.get(face)
            if current is None or order[tau] < order[current]:
                earliest_cofacet[face] = tau
    pairs = [(sigma, tau) for tau, sigma in latest_facet.items()
             if earliest_cofacet[sigma] == tau and K.grade(sigma) == K.grade(tau)]
    pairs.sort(key=lambda pair: order[pair[1]])
    return PartialMatching(tuple(pairs))


def obvious_matrix_pairs(boundary: FilteredBoundary) -> PartialMatching:
    """The same rule on any graded boundary matrix: the last row of a column and the first
    column of that row, at equal grade. A cell is used at most once, lower dimensions first."""
    A, order, grades = boundary.matrix, boundary.order, boundary.grades
    last_row, first_col = {}, {}
    for c in A.col_labels:
        col = A.column(c)
        if not col:
            continue
        last_row[c] = max(col, key=order.__getitem__)
        for r in col:
            current = first_col.get(r)
            if current is None or order[c] < order[current]:
                first_col[r] = c
    candidates = sorted(((r, c) for c, r in last_row.items() if first_col[r] == c and grades[r] == grades[c]),
                        key=lambda pair: (len(pair[1]), order[pair[1]]))
    used, pairs = set(), []
    for r, c in candidates:
        if r not in used and c not in used:
            used.update((r, c))
            pairs.append((r, c))
    return PartialMatching(tuple(pairs))


# --- Morse boundary ---

def critical_cells(A: IndexedMatrix, matching: PartialMatching) -> list:
    matched = matching.rows | matching.cols
    return [x for x in A.col_labels if x not in matched]


def _gradient_order(A: IndexedMatrix, matching: PartialMatching) -> list:
    """Matched rows ordered so that every gradient step goes forward. Raises on cycles."""
    if set(A.row_labels) != set(A.col_labels):
        raise InvalidMatchingError("Morse reduction needs a square graded matrix on one cell set")
    # nonzero pairs plus an acyclic order make the pivot block triangular, hence invertible
    for r, c in matching:
        if A[r, c] == 0:
            raise InvalidMatchingError(f"pair ({r!r}, {c!r}) is outside the support")
    if matching.rows & matching.cols:
        raise InvalidMatchingError("a cell can be matched only once")
    graph = nx.DiGraph()
    graph.add_nodes_from(matching.row_partner)
    for sigma, tau in matching:
        graph.add_edges_from((sigma, alpha) for alpha in A.column(tau)
                             if alpha != sigma and alpha in matching.row_partner)
    try:
        return list(nx.topological_sort(graph))
    except nx.NetworkXUnfeasible:
        raise CyclicSupportError("matching is not acyclic")


def morse_boundary_paths(A: IndexedMatrix, matching: PartialMatching) -> IndexedMatrix:
    """Morse boundary by summing gradient paths.

    A path leaves β through a face α0, climbs from each matched α_i to its partner β_i
    and descends to another face α_{i+1}; each step multiplies by -<∂β_i, α_{i+1}> / <∂β_i, α_i>.
    Path sums are memoized per matched cell.
    """
    p = A.modulus
    order = _gradient_order(A, matching)
    critical = critical_cells(A, matching)
    is_critical = set(critical)

    flow: dict = {}
    for sigma in reversed(order):
        col = A.column(matching.row_partner[sigma])
        w = inverse(col[sigma], p)
        acc: dict = {}
        for alpha, x in col.items():
            if alpha == sigma:
                continue
            step = -x * w
            if alpha in is_critical:
                add_scaled(acc, {alpha: 1}, step, p)
            elif alpha in flow:
                add_scaled(acc, flow[alpha], step, p)
        flow[sigma] = acc

    columns = {}
    for beta in critical:
        acc = {}
        for alpha, x in A.column(beta).items():
            if alpha in is_critical:
                add_scaled(acc, {alpha: 1}, x, p)
            elif alpha in flow:
                add_scaled(acc, flow[alpha], x, p)
        columns[beta] = acc
    return IndexedMatrix.from_columns(critical, critical, columns, p)


def morse_boundary_schur(A: IndexedMatrix, matching: PartialMatching) -> IndexedMatrix:
    """Schur complement of A on the pivot block A(δ♯, δ♭), restricted to critical cells.

    Each critical column is cleared of matched rows in gradient order, which is
    triangular substitution against the pivot block.
    """
    p = A.modulus
    rank = {sigma: i for i, sigma in enumerate(_gradient_order(A, matching))}
    partner = matching.row_partner
    critical = critical_cells(A, matching)
    is_critical = set(critical)

    columns = {}
    for beta in critical:
        v = dict(A.column(beta))
        heap = [(rank[alpha], alpha) for alpha in v if alpha in rank]
        heapq.heapify(heap)
        queued = {alpha for _, alpha in heap}
        while heap:
            _, sigma = heapq.heappop(heap)
            queued.discard(sigma)
            x = v.get(sigma)
            if not x:
                continue
            col = A.column(partner[sigma])
            add_scaled(v, col, -x * inverse(col[sigma], p), p)
            for alpha in col:
                if alpha in rank and alpha not in queued and alpha in v:
                    heapq.heappush(heap, (rank[alpha], alpha))
                    queued.add(alpha)
        columns[beta] = {alpha: x for alpha, x in v.items() if alpha in is_critical}
    return IndexedMatrix.from_columns(critical, critical, columns, p)


# --- Whole-complex reduction ---

@dataclass(frozen=True)
class MorseReduction:
    boundary: FilteredBoundary
    matchings: tuple
    original_cells: int

    @property
    def critical_count(self) -> int:
        return len(self.boundary)


def restrict(boundary: FilteredBoundary, matrix: IndexedMatrix) -> FilteredBoundary:
    cells = matrix.col_labels
    return FilteredBoundary(matrix,
                            {c: boundary.grades[c] for c in cells},
                            {c: boundary.order[c] for c in cells})


def _complex_pairs(K: FilteredComplex, boundary: FilteredBoundary, top: int) -> PartialMatching:
    used, pairs = set(), []
    for dim in range(top + 1):
        for sigma, tau in obvious_pairs(K, dim, boundary.order):
            if sigma not in used:
                used.update((sigma, tau))
                pairs.append((sigma, tau))
    return PartialMatching(tuple(pairs))


def reduce(K: FilteredComplex, p: int, target_dim: Optional[int] = None, reduced: bool = False,
           seed: Optional[int] = None, rounds: int = 1) -> MorseReduction:
    """Cancel obvious pairs and replace the boundary by its Morse boundary.

    Cells above target_dim + 1 are dropped first. The first round harvests obvious pairs
    per dimension from the complex; later rounds apply the same rule to the reduced matrix.
    """
    top = K.dimension if target_dim is None else target_dim
    current = filtered_boundary(K, p, max_dim=top + 1, reduced=reduced, seed=seed)
    original = len(current)
    matchings = []
    for round_no in range(rounds):
        matching = _complex_pairs(K, current, top) if round_no == 0 else obvious_matrix_pairs(current)
        if not matching:
            break
        current = restrict(current, morse_boundary_schur(current.matrix, matching))
        matchings.append(matching)
        logger.info("Morse round %d: %d pairs cancelled, %d critical cells remain",
                    round_no + 1, len(matching), len(current))
    return MorseReduction(current, tuple(matchings), original)
