"""
Tests for the dense reference computations.

These pin the oracle to hand-computed homology so that it can in turn
check the sparse engine.
"""

import math

import numpy as np
import pytest

from oracle import ORACLE_LIMIT, betti, dense_inverse, dense_rank, standard_reduction_barcode, sublevel_betti
from simplicial import FilteredComplex, rips_from_points

UNIT_SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def make_hollow_triangle():
    """Helper: three vertices and three edges."""
    return FilteredComplex.from_simplices(
        [([0], 0), ([1], 0), ([2], 0), ([0, 1], 1), ([1, 2], 1), ([0, 2], 2)])


def make_interval():
    """Helper: two vertices at grade 0 joined by an edge at grade 1."""
    return FilteredComplex.from_simplices([([0], 0), ([1], 0), ([0, 1], 1)])


# ==================== Dense linear algebra tests ====================

def test_rank_of_identity():
    """The identity of size n has rank n."""
    assert dense_rank(np.eye(5, dtype=int), 3) == 5


def test_rank_depends_on_field():
    """[[1, 1], [1, -1]] is singular only in characteristic 2."""
    A = [[1, 1], [1, -1]]
    assert dense_rank(A, 2) == 1
    assert dense_rank(A, 3) == 2


def test_rank_of_empty():
    """An empty matrix has rank zero."""
    assert dense_rank(np.zeros((0, 3), dtype=int), 2) == 0


def test_dense_inverse():
    """A times its inverse is the identity."""
    A = np.array([[2, 1, 0], [1, 1, 4], [0, 3, 1]])
    inverse = dense_inverse(A, 7)
    assert np.array_equal(A @ inverse % 7, np.eye(3, dtype=int))


def test_dense_inverse_singular():
    """Singular matrices have no inverse."""
    with pytest.raises(ValueError):
        dense_inverse([[1, 1], [1, 1]], 2)


# ==================== Betti tests ====================

def test_betti_hollow_triangle():
    """A hollow triangle is a circle."""
    K = make_hollow_triangle()
    assert betti(K, 0, 2) == 1
    assert betti(K, 1, 2) == 1


def test_betti_full_triangle():
    """Filling the triangle kills the loop."""
    K = FilteredComplex({**make_hollow_triangle().grades, (0, 1, 2): 3.0})
    assert betti(K, 0, 3) == 1
    assert betti(K, 1, 3) == 0


def test_reduced_betti():
    """Reduced H0 drops one class."""
    assert betti(make_hollow_triangle(), 0, 2, reduced=True) == 0


def test_sublevel_betti():
    """Sublevel sets see the complex grow."""
    K = make_hollow_triangle()
    assert sublevel_betti(K, 0, 0.0, 2) == 3
    assert sublevel_betti(K, 0, 1.0, 2) == 1
    assert sublevel_betti(K, 1, 1.0, 2) == 0
    assert sublevel_betti(K, 1, 2.0, 2) == 1


# ==================== Standard reduction tests ====================

def test_single_vertex():
    """One vertex is one essential class."""
    K = FilteredComplex({(0,): 0.0})
    assert standard_reduction_barcode(K, 2) == {0: [(0.0, math.inf)]}


def test_interval_barcode():
    """Two vertices merged by an edge."""
    bars = standard_reduction_barcode(make_interval(), 2)
    assert bars[0] == [(0.0, 1.0), (0.0, math.inf)]


def test_unit_square_barcode():
    """The square's loop is born at 1 and filled at sqrt(2)."""
    K = rips_from_points(UNIT_SQUARE, max_dim=2)
    bars = standard_reduction_barcode(K, 2, max_dim=1)
    assert bars[1] == [(1.0, pytest.approx(math.sqrt(2)))]
    assert len(bars[0]) == 4


def test_keep_zero_and_reduced():
    """Zero-length bars are kept on request; reduced homology drops the essential H0 class."""
    K = FilteredComplex.from_simplices([([0], 0), ([1], 0), ([0, 1], 0)])
    assert standard_reduction_barcode(K, 2) == {0: [(0.0, math.inf)], 1: []}
    assert standard_reduction_barcode(K, 2, keep_zero=True)[0] == [(0.0, 0.0), (0.0, math.inf)]
    assert standard_reduction_barcode(K, 2, reduced=True)[0] == []


def test_oracle_order_independent():
    """Relabeling vertices permutes ties but leaves the barcode unchanged."""
    rng = np.random.default_rng(21)
    for _ in range(5):
        K = rips_from_points(np.round(rng.random((6, 2)) * 4) / 4, max_dim=2)
        permutation = {int(v): int(w) for v, w in enumerate(rng.permutation(6))}
        assert standard_reduction_barcode(K, 3) == standard_reduction_barcode(K.relabeled(permutation), 3)


def test_oracle_size_gate():
    """Complexes above the limit are refused."""
    K = FilteredComplex({(v,): 0.0 for v in range(ORACLE_LIMIT + 1)})
    with pytest.raises(ValueError):
        standard_reduction_barcode(K, 2)
