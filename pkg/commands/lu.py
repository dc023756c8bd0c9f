import logging
from pathlib import Path

from enums import InputKind, PivotRule
from errors import InputError
from inputs import load_matrix
from schemas import RunConfig
from sparse import dump_fixture, lu_exchange

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("lu", help="exchange LU factorization of a matrix fixture")
    parser.add_argument("input")
    parser.add_argument("--kind", choices=[k.value for k in InputKind], default=InputKind.MATRIX.value)
    parser.add_argument("--pivot-rule", choices=[r.value for r in PivotRule], default=PivotRule.MARKOWITZ.value)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output", help="directory for L.mtx, D.mtx and U.mtx (default: next to the input)")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    A = load_matrix(config)
    lu = lu_exchange(A, config.pivot_rule, seed=config.seed)
    out_dir = Path(config.output) if config.output else config.input.parent
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create {out_dir}: {exc.strerror}")
    for name, factor in (("L", lu.L), ("D", lu.D), ("U", lu.U)):
        dump_fixture(factor, out_dir / f"{name}.mtx")
    logger.info("rank %d, factors written to %s", lu.rank, out_dir)
    return 0
