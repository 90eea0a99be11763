"""Exact Gaussian-rational arithmetic (numbers a + b i with a, b rational)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # decimal text of the float is what the user typed
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational number")


@dataclass(frozen=True)
class GaussQ:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "GaussQ":
        """Coerce ints, Fractions, floats, decimal strings, [re, im] and
        [re_num, re_den, im_num, im_den] lists, or complex numbers."""
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, complex):
            return cls(_frac(x.real), _frac(x.imag))
        if isinstance(x, (list, tuple)):
            if len(x) == 2:
                return cls(_frac(x[0]), _frac(x[1]))
            if len(x) == 4:
                return cls(Fraction(int(x[0]), int(x[1])), Fraction(int(x[2]), int(x[3])))
            raise ValueError(f"coefficient list must have 2 or 4 entries, got {len(x)}")
        return cls(_frac(x), Fraction(0))

    def __add__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussQ.of(o) - self

    def __mul__(self, o):
        if not isinstance(o, (GaussQ, Number, Fraction)):
            return NotImplemented
        o = GaussQ.of(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussQ.of(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("Gaussian rational division by zero")
        return self * GaussQ(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return GaussQ.of(o) / self

    def __pow__(self, k: int):
        out = GaussQ(Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def denominator(self) -> int:
        a, b = self.re.denominator, self.im.denominator
        from math import lcm

        return lcm(a, b)

    def __repr__(self):
        if self.im == 0:
            return f"GaussQ({self.re})"
        return f"GaussQ({self.re} + {self.im}i)"


ZERO = GaussQ()
ONE = GaussQ(Fraction(1))
I = GaussQ(Fraction(0), Fraction(1))
