"""
Tests for partial matchings and the Morse boundary.

The path-counting and Schur-complement constructions are checked against each
other, against sparse.schur_complement and against oracle Betti numbers.
"""

import itertools

import numpy as np
import pytest

from errors import CyclicSupportError, InvalidMatchingError
from morse import (PartialMatching, critical_cells, induced_relations, is_acyclic, morse_boundary_paths,
                   morse_boundary_schur, obvious_matrix_pairs, obvious_pairs, reduce, validate_matching)
from oracle import betti, dense_rank, standard_reduction_barcode
from persistence import Barcode, barcode, filtered_jordan
from simplicial import FilteredComplex, filtered_boundary, rips, rips_from_points
from sparse import IndexedMatrix, schur_complement


def make_random_complex(rng, n_vertices=6, max_dim=3, limit=20):
    """Helper: face closure of a few random simplices, all at grade 0, at most limit simplices."""
    while True:
        grades = {}
        for _ in range(int(rng.integers(1, 5))):
            k = int(rng.integers(1, max_dim + 2))
            top = tuple(sorted(rng.choice(n_vertices, size=k, replace=False).tolist()))
            for size in range(1, k + 1):
                for face in itertools.combinations(top, size):
                    grades[face] = 0.0
        if len(grades) <= limit:
            return FilteredComplex(grades)


def make_random_matching(rng, A):
    """Helper: grow a matching from the support in random order, keeping it acyclic."""
    entries = [(r, c) for r, c, _ in A.entries()]
    used, pairs = set(), []
    for i in rng.permutation(len(entries)):
        r, c = entries[i]
        if r in used or c in used:
            continue
        candidate = PartialMatching(tuple(pairs + [(r, c)]))
        try:
            acyclic = is_acyclic(A, candidate)
        except InvalidMatchingError:
            continue
        if acyclic:
            pairs.append((r, c))
            used.update((r, c))
    return PartialMatching(tuple(pairs))


def morse_betti(M, dim, p):
    """Helper: Betti number of a Morse complex from dense ranks of its blocks."""
    def block(rows_dim, cols_dim):
        rows = [x for x in M.row_labels if len(x) - 1 == rows_dim]
        cols = [x for x in M.col_labels if len(x) - 1 == cols_dim]
        return M.submatrix(rows, cols).to_dense() if rows and cols else [[]]
    count = sum(1 for x in M.col_labels if len(x) - 1 == dim)
    return count - dense_rank(block(dim - 1, dim), p) - dense_rank(block(dim, dim + 1), p)


def block_rank(boundary, k, p):
    """Helper: rank of the block of the graded boundary from dimension k to dimension k - 1."""
    rows = [c for c in boundary.cells if boundary.dim(c) == k - 1]
    cols = [c for c in boundary.cells if boundary.dim(c) == k]
    if not rows or not cols:
        return 0
    return dense_rank(boundary.matrix.submatrix(rows, cols).to_dense(), p)


def boundary_barcode(boundary, top):
    """Helper: barcode of a graded boundary in dimensions 0..top."""
    basis = filtered_jordan(boundary.matrix, boundary.grades, order=boundary.order, dims=boundary.dim)
    return barcode(basis, boundary.grades, dims=boundary.dim, max_dim=top)


def make_hollow_triangle_boundary(p=2):
    """Helper: graded boundary of three vertices and three edges."""
    K = FilteredComplex({(0,): 0.0, (1,): 0.0, (2,): 0.0, (0, 1): 0.0, (1, 2): 0.0, (0, 2): 0.0})
    return filtered_boundary(K, p)


# ==================== Matching tests ====================

def test_matching_uses_each_label_once():
    """A row or column in two pairs is invalid."""
    with pytest.raises(InvalidMatchingError):
        PartialMatching((("e1", "t"), ("e2", "t")))
    with pytest.raises(InvalidMatchingError):
        PartialMatching((("v", "e1"), ("v", "e2")))


def test_matching_outside_support():
    """Pairs must sit on nonzero entries."""
    A = IndexedMatrix.from_dense([[1, 0], [0, 1]], 2)
    with pytest.raises(InvalidMatchingError):
        validate_matching(A, PartialMatching(((0, 1),)))


def test_two_cycle_is_not_acyclic():
    """Pairs (1, 1') and (2, 2') on a full 2x2 support induce 1 <-> 2."""
    A = IndexedMatrix.from_dense([[1, 1], [1, 2]], 3, ["r1", "r2"], ["c1", "c2"])
    matching = PartialMatching((("r1", "c1"), ("r2", "c2")))
    assert not is_acyclic(A, matching)
    rows, cols = induced_relations(A, matching)
    assert ("r1", "r2") in rows and ("r2", "r1") in rows
    assert not rows.is_antisymmetric()


def test_triangular_support_is_acyclic():
    """An upper triangular support gives antisymmetric relations."""
    A = IndexedMatrix.from_dense([[1, 1], [0, 1]], 2, ["r1", "r2"], ["c1", "c2"])
    matching = PartialMatching((("r1", "c1"), ("r2", "c2")))
    assert is_acyclic(A, matching)
    rows, cols = induced_relations(A, matching)
    assert ("r1", "r1") in rows
    assert rows.is_antisymmetric() and cols.is_antisymmetric()


# ==================== Obvious pair tests ====================

def test_no_obvious_pairs_at_distinct_grades():
    """Distinct grades leave nothing to pair."""
    K = FilteredComplex({(0,): 0.0, (1,): 1.0, (0, 1): 2.0})
    assert len(obvious_pairs(K, 0)) == 0


def test_rips_triangle_obvious_pair():
    """An equilateral Rips triangle pairs its last edge with the 2-simplex."""
    K = rips([[0, 1, 1], [1, 0, 1], [1, 1, 0]], max_dim=2)
    matching = obvious_pairs(K, 1)
    assert matching.pairs == (((1, 2), (0, 1, 2)),)
    assert is_acyclic(filtered_boundary(K, 2).matrix, matching)


def test_obvious_pairs_share_grades():
    """Every obvious pair sits inside one grade."""
    rng = np.random.default_rng(31)
    points = np.round(rng.random((7, 2)) * 3) / 3
    K = rips_from_points(points, max_dim=2)
    boundary = filtered_boundary(K, 2)
    for dim in range(2):
        for sigma, tau in obvious_pairs(K, dim, boundary.order):
            assert K.grade(sigma) == K.grade(tau)
    for r, c in obvious_matrix_pairs(boundary):
        assert boundary.grades[r] == boundary.grades[c]


# ==================== Morse boundary tests ====================

def test_empty_matching_returns_boundary():
    """With nothing matched the Morse boundary is the boundary itself."""
    A = make_hollow_triangle_boundary().matrix
    assert morse_boundary_paths(A, PartialMatching()) == A
    assert morse_boundary_schur(A, PartialMatching()) == A


def test_interval_collapses():
    """Matching a vertex with the edge leaves one critical vertex."""
    K = FilteredComplex({(0,): 0.0, (1,): 0.0, (0, 1): 0.0})
    A = filtered_boundary(K, 3).matrix
    matching = PartialMatching((((1,), (0, 1)),))
    for M in (morse_boundary_paths(A, matching), morse_boundary_schur(A, matching)):
        assert M.col_labels == ((0,),)
        assert M.is_zero()


def test_tree_collapses_to_a_vertex():
    """Matching every edge of a path graph leaves a single vertex."""
    K = FilteredComplex({**{(v,): 0.0 for v in range(5)}, **{(v, v + 1): 0.0 for v in range(4)}})
    A = filtered_boundary(K, 5).matrix
    matching = PartialMatching(tuple(((v + 1,), (v, v + 1)) for v in range(4)))
    assert critical_cells(A, matching) == [(0,)]
    assert morse_boundary_schur(A, matching).is_zero()


def test_gradient_cycle_is_rejected():
    """Matching each vertex of a hollow triangle to the next edge around is cyclic."""
    A = make_hollow_triangle_boundary().matrix
    matching = PartialMatching((((0,), (0, 1)), ((1,), (1, 2)), ((2,), (0, 2))))
    with pytest.raises(CyclicSupportError):
        morse_boundary_paths(A, matching)
    with pytest.raises(CyclicSupportError):
        morse_boundary_schur(A, matching)


def test_cell_matched_twice_is_rejected():
    """A cell may be a row of one pair or a column of another, not both."""
    K = FilteredComplex({(0,): 0.0, (1,): 0.0, (2,): 0.0, (0, 1): 0.0, (1, 2): 0.0, (0, 1, 2): 0.0,
                         (0, 2): 0.0})
    A = filtered_boundary(K, 2).matrix
    matching = PartialMatching((((1,), (0, 1)), ((0, 1), (0, 1, 2))))
    with pytest.raises(InvalidMatchingError):
        morse_boundary_schur(A, matching)


@pytest.mark.parametrize("p", [2, 3, 7])
def test_paths_equal_schur_on_random_complexes(p):
    """Both Morse constructions agree, square to zero and preserve Betti numbers."""
    rng = np.random.default_rng(p)
    for _ in range(15):
        K = make_random_complex(rng)
        A = filtered_boundary(K, p).matrix
        matching = make_random_matching(rng, A)
        by_paths = morse_boundary_paths(A, matching)
        by_schur = morse_boundary_schur(A, matching)
        assert by_paths == by_schur
        assert (by_schur @ by_schur).is_zero()

        critical = critical_cells(A, matching)
        S = schur_complement(A, [r for r, _ in matching], [c for _, c in matching])
        assert S.submatrix(critical, critical) == by_schur

        for dim in range(K.dimension + 1):
            assert morse_betti(by_schur, dim, p) == betti(K, dim, p)


# ==================== Reduction tests ====================

def test_reduce_contractible_complex():
    """A full triangle at one grade reduces to a single vertex."""
    K = FilteredComplex({s: 0.0 for s in [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]})
    result = reduce(K, 2)
    assert result.boundary.cells == ((0,),)
    assert result.original_cells == 7
    assert result.critical_count == 1


def test_repeated_rounds_reach_betti_numbers():
    """At a single grade, enough rounds leave exactly Betti-many critical cells per dimension."""
    rng = np.random.default_rng(41)
    for _ in range(15):
        K = make_random_complex(rng)
        result = reduce(K, 3, rounds=len(K))
        assert result.boundary.matrix.is_zero()
        for dim in range(K.dimension + 1):
            remaining = sum(1 for c in result.boundary.cells if len(c) - 1 == dim)
            assert remaining == betti(K, dim, 3)


def test_reduce_keeps_critical_grades():
    """Critical cells keep their original grades."""
    rng = np.random.default_rng(42)
    K = rips_from_points(rng.random((8, 2)), max_dim=2)
    result = reduce(K, 2, target_dim=1)
    for cell in result.boundary.cells:
        assert result.boundary.grades[cell] == K.grade(cell)
    assert len(result.boundary) < len(K)


@pytest.mark.parametrize("p", [2, 3])
def test_cancelled_pairs_account_for_the_rank_drop(p):
    """Each cancelled pair of dimensions (k - 1, k) lowers the rank of that boundary block by one."""
    rng = np.random.default_rng(50 + p)
    for _ in range(10):
        K = rips_from_points(np.round(rng.random((7, 2)) * 3) / 3, max_dim=2)
        full = filtered_boundary(K, p, max_dim=2)
        result = reduce(K, p, target_dim=1, rounds=3)
        for k in range(1, 3):
            cancelled = sum(1 for matching in result.matchings for _, tau in matching if full.dim(tau) == k)
            assert block_rank(result.boundary, k, p) == block_rank(full, k, p) - cancelled


def test_reduced_boundary_keeps_the_barcode():
    """The Morse-reduced boundary of a Rips complex has the barcode of the full boundary."""
    rng = np.random.default_rng(52)
    for _ in range(15):
        K = rips_from_points(np.round(rng.random((7, 2)) * 4) / 4, max_dim=2)
        full = filtered_boundary(K, 3, max_dim=2)
        result = reduce(K, 3, target_dim=1)
        assert boundary_barcode(result.boundary, 1) == boundary_barcode(full, 1)


@pytest.mark.parametrize("p", [2, 7])
def test_three_rounds_match_standard_reduction(p):
    """Three rounds of reduction, the later ones on the reduced matrix, keep the standard barcode."""
    rng = np.random.default_rng(60 + p)
    complexes = [rips_from_points(np.round(rng.random((7, 2)) * 3) / 3, max_dim=2) for _ in range(10)]
    complexes += [make_random_complex(rng) for _ in range(10)]
    for K in complexes:
        top = max(K.dimension - 1, 0)
        result = reduce(K, p, target_dim=top, rounds=3)
        assert len(result.matchings) <= 3
        expected = Barcode(standard_reduction_barcode(K, p, max_dim=top))
        assert boundary_barcode(result.boundary, top) == expected
