import json

from enums import InputKind
from inputs import load_complex, write_output
from morse import reduce
from schemas import CellOut, MorseComplexFile, RunConfig


def register(subparsers):
    parser = subparsers.add_parser("morse", help="Morse-reduced complex as JSON")
    parser.add_argument("input")
    parser.add_argument("--kind", choices=[k.value for k in InputKind], default=InputKind.COMPLEX.value)
    parser.add_argument("--field", type=int, default=2)
    parser.add_argument("--max-dim", type=int, default=1)
    parser.add_argument("--max-homology", type=int)
    parser.add_argument("--max-scale", type=float)
    parser.add_argument("--reduced", action="store_true")
    parser.add_argument("--morse-rounds", type=int, default=1)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    K = load_complex(config)
    top = config.homology_dim if config.kind != InputKind.COMPLEX or config.max_homology is not None \
        else max(K.dimension, 0)
    result = reduce(K, config.field, top, reduced=config.reduced, seed=config.seed, rounds=config.morse_rounds)
    boundary = result.boundary
    cells = sorted(boundary.cells, key=boundary.order.__getitem__)
    index = {cell: i for i, cell in enumerate(cells)}
    document = MorseComplexFile(
        field=config.field,
        cells=[CellOut(v=list(cell), f=boundary.grades[cell], dim=len(cell) - 1) for cell in cells],
        boundary=sorted([index[r], index[c], v] for r, c, v in boundary.matrix.entries()),
    )
    write_output(json.dumps(document.model_dump(), indent=2) + "\n", config.output)
    return 0
