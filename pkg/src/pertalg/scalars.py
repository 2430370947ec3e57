"""Prime-field scalars, a drop-in for ``Fraction`` in the symbolic engine."""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


@total_ordering
class ModP:
    __slots__ = ("v", "modulus")

    def __init__(self, v: int, modulus: int):
        self.modulus = modulus
        self.v = v % modulus

    def _lift(self, other) -> "ModP":
        if isinstance(other, ModP):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other
        if isinstance(other, Fraction):
            return ModP(other.numerator, self.modulus) / ModP(other.denominator, self.modulus)
        return ModP(int(other), self.modulus)

    def __add__(self, o):
        return ModP(self.v + self._lift(o).v, self.modulus)

    __radd__ = __add__

    def __sub__(self, o):
        return ModP(self.v - self._lift(o).v, self.modulus)

    def __rsub__(self, o):
        return ModP(self._lift(o).v - self.v, self.modulus)

    def __mul__(self, o):
        return ModP(self.v * self._lift(o).v, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.v, self.modulus)

    def __truediv__(self, o):
        o = self._lift(o)
        if o.v == 0:
            raise ZeroDivisionError("division by zero in GF(p)")
        return ModP(self.v * pow(o.v, -1, self.modulus), self.modulus)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, ModP)):
            return self.v == self._lift(o).v
        return NotImplemented

    def __lt__(self, o):
        return self.v < self._lift(o).v

    def __hash__(self):
        return hash((self.v, self.modulus))

    def __repr__(self):
        return f"{self.v} (mod {self.modulus})"

    __str__ = __repr__


class GF:
    """Field constructor: ``GF(101)(3)`` is 3 mod 101.  Hashable, so it can
    key caches of constants."""

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __call__(self, v) -> ModP:
        if isinstance(v, Fraction):
            return ModP(v.numerator, self.p) / ModP(v.denominator, self.p)
        return ModP(v, self.p)

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"
