import json

from enums import InputKind
from inputs import load_matrix, write_output
from persistence import jordan_unfiltered
from schemas import JordanDump, RunConfig
from sparse import dump_fixture


def register(subparsers):
    parser = subparsers.add_parser("jordan", help="Jordan pairing of a square-zero matrix fixture")
    parser.add_argument("input")
    parser.add_argument("--kind", choices=[k.value for k in InputKind], default=InputKind.MATRIX.value)
    parser.add_argument("--dump-basis", help="write the change-of-basis matrix as a fixture")
    parser.add_argument("--output")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    T = load_matrix(config)
    basis = jordan_unfiltered(T)
    if config.dump_basis is not None:
        dump_fixture(basis.change_of_basis, config.dump_basis)
    document = JordanDump(field=T.modulus, rank=basis.rank,
                          pairs=[[sigma, tau] for sigma, tau in basis.pairs],
                          essentials=list(basis.essentials))
    write_output(json.dumps(document.model_dump(), indent=2) + "\n", config.output)
    return 0
