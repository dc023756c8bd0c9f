"""Exact arithmetic in prime fields GF(p).

Matrices store raw residues as ints for speed; FieldElement is the value type
handed across the public API and used wherever a single scalar is inspected.
"""

from dataclasses import dataclass
from functools import lru_cache
from numbers import Integral

from errors import FieldError, UsageError

DEFAULT_MODULUS = 2
MAX_MODULUS = 2 ** 31


@lru_cache(maxsize=1024)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_modulus(p: int) -> int:
    """Return p as an int, or raise if it is not a usable prime modulus."""
    if not isinstance(p, Integral) or not 2 <= p < MAX_MODULUS or not is_prime(int(p)):
        raise UsageError("modulus must be prime")
    return int(p)


@lru_cache(maxsize=65536)
def inverse(value: int, p: int) -> int:
    """Multiplicative inverse of a residue, by Fermat's little theorem."""
    p = check_modulus(p)
    value %= p
    if value == 0:
        raise FieldError("not invertible")
    return pow(value, p - 2, p)


@dataclass(frozen=True, slots=True)
class FieldElement:
    value: int
    modulus: int = DEFAULT_MODULUS

    def __post_init__(self):
        object.__setattr__(self, "modulus", check_modulus(self.modulus))
        object.__setattr__(self, "value", self.value % self.modulus)

    # --- Arithmetic ---

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise FieldError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value + v, self.modulus)

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value - v, self.modulus)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value * v, self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(v - self.value, self.modulus)

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def inv(self) -> "FieldElement":
        return FieldElement(inverse(self.value, self.modulus), self.modulus)

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value * inverse(v, self.modulus), self.modulus)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"
