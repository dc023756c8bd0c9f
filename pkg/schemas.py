from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field, model_validator

from enums import InputKind, OutputFormat, PivotRule
from field import DEFAULT_MODULUS, MAX_MODULUS, is_prime


class RunConfig(BaseModel):
    command: str
    input: Path
    kind: InputKind = InputKind.POINTS
    field: int = DEFAULT_MODULUS
    max_dim: int = 1
    max_homology: Optional[int] = None
    max_scale: Optional[float] = None
    no_reduce: bool = False
    reduced: bool = False
    keep_zero: bool = False
    dump_basis: Optional[Path] = None
    oracle_check: bool = False
    seed: Optional[int] = None
    morse_rounds: int = 1
    pivot_rule: PivotRule = PivotRule.MARKOWITZ
    output: Optional[Path] = None
    format: OutputFormat = OutputFormat.JSON

    @model_validator(mode="after")
    def validate_run_fields(self):
        if not 2 <= self.field < MAX_MODULUS or not is_prime(self.field):
            raise ValueError("modulus must be prime")
        if self.max_dim < 0:
            raise ValueError("max_dim must be >= 0")
        if self.max_scale is not None and not self.max_scale > 0:
            raise ValueError("max_scale must be > 0")
        if self.max_homology is not None and not 0 <= self.max_homology <= self.max_dim:
            raise ValueError("max_homology must be between 0 and max_dim")
        if self.morse_rounds < 1:
            raise ValueError("morse_rounds must be >= 1")
        return self

    @property
    def homology_dim(self) -> int:
        return self.max_dim if self.max_homology is None else self.max_homology


# --- Complex input ---

class SimplexIn(BaseModel):
    v: list[int]
    f: float = 0.0

    @model_validator(mode="after")
    def validate_simplex_fields(self):
        if not self.v:
            raise ValueError("a simplex needs at least one vertex")
        if any(x < 0 for x in self.v):
            raise ValueError("vertex ids must be non-negative")
        if len(set(self.v)) != len(self.v):
            raise ValueError("vertex ids in a simplex must be distinct")
        return self


class ComplexFile(BaseModel):
    simplices: list[SimplexIn]


# --- Outputs ---

# Grades are plain floats; an essential class dies at the string "inf".
Endpoint = Union[float, str]


class BarcodeFile(BaseModel):
    field: int
    dims: dict[str, list[list[Endpoint]]]


class CellOut(BaseModel):
    v: list[int]
    f: float
    dim: int


class MorseComplexFile(BaseModel):
    field: int
    cells: list[CellOut]
    boundary: list[list[int]] = Field(description="[row index, column index, value] triples into cells")


class JordanDump(BaseModel):
    field: int
    rank: int
    pairs: list[list[int]] = Field(description="[row label, column label]: column maps onto row")
    essentials: list[int]
