"""Filtered simplicial complexes, signed boundary operators and Vietoris-Rips construction."""

import json
import logging
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional

import numpy as np
from pydantic import ValidationError
from scipy.spatial.distance import pdist, squareform

from errors import InputError
from schemas import ComplexFile
from sparse import IndexedMatrix

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]
EMPTY: Simplex = ()


def make_simplex(vertices: Iterable[int]) -> Simplex:
    simplex = tuple(sorted(int(v) for v in vertices))
    if any(v < 0 for v in simplex) or len(set(simplex)) != len(simplex):
        raise InputError(f"invalid simplex {list(vertices)!r}")
    return simplex


def dimension(simplex: Simplex) -> int:
    return len(simplex) - 1


def facets(simplex: Simplex) -> Iterator[tuple[Simplex, int]]:
    """(face, sign) pairs; the face missing the q-th vertex (1-based) carries (-1)^q."""
    for i in range(len(simplex)):
        yield simplex[:i] + simplex[i + 1:], (1 if i % 2 else -1)


class FilteredComplex:
    """A face-closed set of simplices with a grade on each."""

    def __init__(self, grades: Mapping[Simplex, float]):
        self._grades = {make_simplex(s): float(g) for s, g in grades.items()}
        if EMPTY in self._grades:
            raise InputError("the empty simplex is implicit; do not list it")

    @classmethod
    def from_simplices(cls, items: Iterable[tuple[Iterable[int], float]]) -> "FilteredComplex":
        grades = {}
        for vertices, grade in items:
            s = make_simplex(vertices)
            if s in grades:
                raise InputError(f"duplicate simplex {list(s)}")
            grades[s] = grade
        return cls(grades)

    @property
    def grades(self) -> Mapping[Simplex, float]:
        return MappingProxyType(self._grades)

    def grade(self, simplex: Simplex) -> float:
        return self._grades[simplex]

    def __len__(self) -> int:
        return len(self._grades)

    def __contains__(self, simplex) -> bool:
        return simplex in self._grades

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.sorted_simplices())

    @property
    def dimension(self) -> int:
        return max((len(s) for s in self._grades), default=0) - 1

    def order_key(self, simplex: Simplex) -> tuple:
        return self._grades[simplex], len(simplex), simplex

    def sorted_simplices(self, max_dim: Optional[int] = None, seed: Optional[int] = None) -> list[Simplex]:
        """Linear refinement of the filtration: (grade, dim, lex), or (grade, dim, random) with a seed."""
        cells = [s for s in self._grades if max_dim is None or len(s) - 1 <= max_dim]
        if seed is None:
            return sorted(cells, key=self.order_key)
        cells.sort()
        shuffle = np.random.default_rng(seed).permutation(len(cells))
        tiebreak = dict(zip(cells, shuffle.tolist()))
        return sorted(cells, key=lambda s: (self._grades[s], len(s), tiebreak[s]))

    def simplices(self, dim: int) -> list[Simplex]:
        return sorted((s for s in self._grades if len(s) == dim + 1), key=self.order_key)

    def truncated(self, max_dim: int) -> "FilteredComplex":
        return FilteredComplex({s: g for s, g in self._grades.items() if len(s) - 1 <= max_dim})

    def relabeled(self, mapping: Mapping[int, int]) -> "FilteredComplex":
        return FilteredComplex({make_simplex(mapping[v] for v in s): g for s, g in self._grades.items()})


def violations(K: FilteredComplex) -> Iterator[str]:
    for s, g in K.grades.items():
        if len(s) < 2:
            continue
        for face, _ in facets(s):
            if face not in K:
                yield f"face {list(face)} of {list(s)} is missing"
            elif K.grade(face) > g:
                yield f"grade of {list(face)} exceeds grade of its coface {list(s)}"


def validate(K: FilteredComplex) -> bool:
    """Face closure and monotone grades."""
    return next(violations(K), None) is None


def check_complex(K: FilteredComplex) -> FilteredComplex:
    problem = next(violations(K), None)
    if problem:
        raise InputError(f"invalid complex: {problem}")
    return K


# --- Boundary operators ---

def boundary_matrix(K: FilteredComplex, dim: int, p: int, reduced: bool = False) -> IndexedMatrix:
    """Rows are (dim-1)-simplices, columns dim-simplices, both in filtration order."""
    if dim < 0:
        raise ValueError("dim must be >= 0")
    cols = K.simplices(dim)
    if dim == 0:
        rows = [EMPTY] if reduced else []
    else:
        rows = K.simplices(dim - 1)
    columns = {}
    if rows:
        for s in cols:
            columns[s] = {face: sign % p for face, sign in facets(s)}
    return IndexedMatrix.from_columns(rows, cols, columns, p)


@dataclass(frozen=True)
class FilteredBoundary:
    """Differential on all cells at once, with grades and the linear refinement order."""
    matrix: IndexedMatrix
    grades: Mapping
    order: Mapping

    @property
    def cells(self) -> tuple:
        return self.matrix.col_labels

    @property
    def modulus(self) -> int:
        return self.matrix.modulus

    @staticmethod
    def dim(cell: Simplex) -> int:
        return len(cell) - 1

    def __len__(self) -> int:
        return len(self.matrix.col_labels)


def filtered_boundary(K: FilteredComplex, p: int, max_dim: Optional[int] = None,
                      reduced: bool = False, seed: Optional[int] = None) -> FilteredBoundary:
    cells = K.sorted_simplices(max_dim=max_dim, seed=seed)
    grades = {s: K.grade(s) for s in cells}
    columns = {s: {face: sign % p for face, sign in facets(s)} for s in cells if len(s) > 1}
    if reduced:
        grades[EMPTY] = min(grades.values(), default=0.0)
        cells = [EMPTY] + cells
        columns.update({s: {EMPTY: p - 1} for s in cells if len(s) == 1})
    matrix = IndexedMatrix.from_columns(cells, cells, columns, p)
    order = {s: i for i, s in enumerate(cells)}
    logger.debug("graded boundary on %d cells, %d nonzeros", len(cells), matrix.nnz)
    return FilteredBoundary(matrix, grades, order)


# --- Vietoris-Rips ---

def check_distances(distances) -> np.ndarray:
    D = np.asarray(distances, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InputError("distance matrix must be square")
    if not np.all(np.isfinite(D)):
        raise InputError("distance matrix must be finite")
    if not np.array_equal(D, D.T):
        raise InputError("distance matrix must be symmetric")
    if np.any(np.diag(D) != 0):
        raise InputError("distance matrix must have a zero diagonal")
    if np.any(D < 0):
        raise InputError("distances must be non-negative")
    if D.size == 0:
        raise InputError("distance matrix is empty")
    return D


def rips(distances, max_dim: int, max_scale: Optional[float] = None) -> FilteredComplex:
    """Cliques of at most max_dim+1 vertices with every pairwise distance <= max_scale; F = diameter."""
    D = check_distances(distances)
    scale = math.inf if max_scale is None else max_scale
    n = len(D)
    dist = D.tolist()
    upper = [{u for u in range(v + 1, n) if dist[v][u] <= scale} for v in range(n)]

    grades: dict = {(v,): 0.0 for v in range(n)}
    frontier = [((v,), 0.0, upper[v]) for v in range(n)]
    for _ in range(max_dim):
        expanded = []
        for simplex, grade, candidates in frontier:
            for u in sorted(candidates):
                coface = simplex + (u,)
                g = max(grade, max(dist[w][u] for w in simplex))
                grades[coface] = g
                expanded.append((coface, g, candidates & upper[u]))
        frontier = expanded
        if not frontier:
            break
    logger.info("Rips complex on %d points: %d simplices up to dimension %d", n, len(grades), max_dim)
    return FilteredComplex(grades)


def rips_from_points(points, max_dim: int, max_scale: Optional[float] = None) -> FilteredComplex:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise InputError("points must be a 2-D array, one point per row")
    if points.size == 0:
        raise InputError("no points")
    if len(points) == 1:
        return FilteredComplex({(0,): 0.0})
    return rips(squareform(pdist(points)), max_dim, max_scale)


# --- Readers ---

def _load_csv(path) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            data = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot parse {path}: {exc}")
    if data.size == 0:
        raise InputError(f"{path} holds no data")
    return data


def read_points_csv(path) -> np.ndarray:
    return _load_csv(path)


def read_distance_csv(path) -> np.ndarray:
    return check_distances(_load_csv(path))


def parse_complex_json(text: str) -> FilteredComplex:
    try:
        data = ComplexFile.model_validate(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg}")
    except ValidationError as exc:
        raise InputError(f"invalid complex file: {exc.errors()[0]['msg']}")
    return check_complex(FilteredComplex.from_simplices((s.v, s.f) for s in data.simplices))


def read_complex_json(path) -> FilteredComplex:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    return parse_complex_json(text)
