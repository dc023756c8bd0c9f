import logging
import sys
from pathlib import Path
from typing import Optional

from enums import InputKind
from errors import InputError
from schemas import RunConfig
from simplicial import FilteredComplex, read_complex_json, read_distance_csv, read_points_csv, rips, rips_from_points
from sparse import IndexedMatrix, load_fixture

logger = logging.getLogger(__name__)


def load_complex(config: RunConfig) -> FilteredComplex:
    """Read the configured input as a filtered complex, building a Rips complex from CSV data."""
    if config.kind == InputKind.POINTS:
        K = rips_from_points(read_points_csv(config.input), config.max_dim, config.max_scale)
    elif config.kind == InputKind.DISTANCES:
        K = rips(read_distance_csv(config.input), config.max_dim, config.max_scale)
    elif config.kind == InputKind.COMPLEX:
        K = read_complex_json(config.input)
    else:
        raise InputError(f"{config.command} needs a complex input, not {config.kind.value}")
    logger.info("loaded %d simplices from %s", len(K), config.input)
    return K


def load_matrix(config: RunConfig) -> IndexedMatrix:
    if config.kind != InputKind.MATRIX:
        raise InputError(f"{config.command} needs a matrix fixture, not {config.kind.value}")
    A = load_fixture(config.input)
    if A.modulus != config.field:
        logger.info("using the fixture's modulus %d", A.modulus)
    return A


def write_output(text: str, path: Optional[Path]) -> None:
    """Write to the given file, or to stdout when no path was configured."""
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}")
