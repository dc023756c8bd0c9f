import logging

from enums import InputKind, OutputFormat
from errors import OracleMismatch
from inputs import load_complex, write_output
from oracle import ORACLE_LIMIT, standard_reduction_barcode
from persistence import Barcode, compute_barcode
from schemas import RunConfig
from sparse import dump_fixture

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("barcode", help="persistence barcode of a filtered complex")
    parser.add_argument("input")
    parser.add_argument("--kind", choices=[k.value for k in InputKind], default=InputKind.POINTS.value)
    parser.add_argument("--field", type=int, default=2)
    parser.add_argument("--max-dim", type=int, default=1, help="largest simplex dimension built from CSV input")
    parser.add_argument("--max-homology", type=int, help="largest homology dimension reported (default: max-dim)")
    parser.add_argument("--max-scale", type=float)
    parser.add_argument("--no-reduce", action="store_true", help="skip the Morse pre-reduction")
    parser.add_argument("--reduced", action="store_true", help="reduced homology (adds the empty simplex)")
    parser.add_argument("--keep-zero", action="store_true", help="keep zero-length intervals")
    parser.add_argument("--morse-rounds", type=int, default=1)
    parser.add_argument("--dump-basis", help="write the change-of-basis matrix as a fixture")
    parser.add_argument("--oracle-check", action="store_true", help="compare against the dense oracle")
    parser.add_argument("--seed", type=int, help="randomize tie-breaks among equal grades")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    parser.add_argument("--output")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    K = load_complex(config)
    result = compute_barcode(K, config.field, max_dim=config.homology_dim, reduce=not config.no_reduce,
                             reduced=config.reduced, keep_zero=config.keep_zero, seed=config.seed,
                             rounds=config.morse_rounds, with_basis=config.dump_basis is not None)
    if config.dump_basis is not None:
        dump_fixture(result.basis.change_of_basis, config.dump_basis)

    text = result.barcode.to_json(config.field) if config.format == OutputFormat.JSON else result.barcode.to_csv()
    write_output(text, config.output)

    if config.oracle_check:
        if len(K) > ORACLE_LIMIT:
            logger.warning("oracle check skipped: %d simplices exceed the limit of %d", len(K), ORACLE_LIMIT)
            return 0
        expected = Barcode(standard_reduction_barcode(K, config.field, max_dim=config.homology_dim,
                                                      keep_zero=config.keep_zero, reduced=config.reduced))
        if expected != result.barcode:
            raise OracleMismatch("barcode differs from the standard reduction oracle")
        logger.info("oracle check passed")
    return 0
