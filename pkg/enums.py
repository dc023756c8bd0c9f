import enum


# str mixin keeps enum values readable on the command line and in JSON (e.g. "markowitz" instead of 1).

class PivotRule(str, enum.Enum):
    MARKOWITZ = "markowitz"     # sparsest column first, then sparsest row; ties by label order
    FIRST = "first"             # first nonzero in label order
    RANDOM = "random"           # seeded uniform choice among nonzeros


class InputKind(str, enum.Enum):
    POINTS = "points"
    DISTANCES = "distances"
    COMPLEX = "complex-json"
    MATRIX = "matrix-fixture"


class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"


class GenerationTest(str, enum.Enum):
    AUTO = "auto"
    EXHAUSTIVE = "exhaustive"
    MODULAR = "modular"         # valid for unions of two chains only
