"""Exact arithmetic for amplitudes and probabilities.

Amplitudes live in the ring generated by ω = e^{iπ/4}: every value is
(a·ω³ + b·ω² + c·ω + d) / √2^k with integer coefficients and a shared
exponent k.  Squared magnitudes of such values lie in ℚ[√2], represented
here as exact rational pairs, so probabilities never touch floating
point until they are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

_SQRT2 = math.sqrt(2.0)

_RationalLike = Union[int, Fraction]


class RootTwoRational:
    """An element u + v·√2 of ℚ[√2] with exact rational u, v."""

    __slots__ = ("u", "v")

    def __init__(self, u: _RationalLike = 0, v: _RationalLike = 0):
        self.u = Fraction(u)
        self.v = Fraction(v)

    def __repr__(self) -> str:
        return f"RootTwoRational({self.u}, {self.v})"

    def __str__(self) -> str:
        return f"{self.u} + {self.v}*sqrt2"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RootTwoRational(other)
        if not isinstance(other, RootTwoRational):
            return NotImplemented
        return self.u == other.u and self.v == other.v

    def __hash__(self) -> int:
        return hash((self.u, self.v))

    def __bool__(self) -> bool:
        return bool(self.u) or bool(self.v)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return RootTwoRational(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return RootTwoRational(self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self) -> "RootTwoRational":
        return RootTwoRational(-self.u, -self.v)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return RootTwoRational(self.u * other.u + 2 * self.v * other.v,
                               self.u * other.v + self.v * other.u)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        norm = other.u * other.u - 2 * other.v * other.v
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q[sqrt2]")
        u = (self.u * other.u - 2 * self.v * other.v) / norm
        v = (self.v * other.u - self.u * other.v) / norm
        return RootTwoRational(u, v)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def inverse(self) -> "RootTwoRational":
        return RootTwoRational(1) / self

    def sign(self) -> int:
        u, v = self.u, self.v
        if v == 0:
            return -1 if u < 0 else (1 if u > 0 else 0)
        if u == 0:
            return -1 if v < 0 else 1
        if u > 0 and v > 0:
            return 1
        if u < 0 and v < 0:
            return -1
        # opposite signs: compare u^2 with 2 v^2
        if u > 0:
            return 1 if u * u > 2 * v * v else -1
        return -1 if u * u > 2 * v * v else 1

    def __lt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() < 0

    def __le__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() <= 0

    def __gt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() > 0

    def __ge__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        return float(self.u) + float(self.v) * _SQRT2

    def exact_str(self) -> str:
        """Shared-denominator form ``"u/den + v/den*sqrt2"``."""
        den = math.lcm(self.u.denominator, self.v.denominator)
        nu = self.u.numerator * (den // self.u.denominator)
        nv = self.v.numerator * (den // self.v.denominator)
        return f"{nu}/{den} + {nv}/{den}*sqrt2"

    @classmethod
    def from_exact_str(cls, text: str) -> "RootTwoRational":
        left, right = text.split("+")
        right = right.strip()
        if not right.endswith("*sqrt2"):
            raise ValueError(f"malformed exact value {text!r}")
        return cls(Fraction(left.strip()), Fraction(right[:-len("*sqrt2")]))


def _coerce(x) -> RootTwoRational | None:
    if isinstance(x, RootTwoRational):
        return x
    if isinstance(x, (int, Fraction)):
        return RootTwoRational(x)
    return None


RT_ZERO = RootTwoRational(0)
RT_ONE = RootTwoRational(1)


# ----------------------------------------------------------------------
# amplitudes


def shift_tuple(t: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    """Multiply the coefficient tuple by √2.

    √2 = ω − ω³, so √2·(aω³+bω²+cω+d) = (b−d)ω³ + (a+c)ω² + (b+d)ω + (c−a).
    Two applications double every coefficient.
    """
    a, b, c, d = t
    return (b - d, a + c, b + d, c - a)


def rotate_tuple(t: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    """Multiply the coefficient tuple by ω (uses ω⁴ = −1)."""
    a, b, c, d = t
    return (b, c, d, -a)


@dataclass(frozen=True)
class AlgebraicAmplitude:
    """Exact complex value (a·ω³ + b·ω² + c·ω + d) / √2^k."""

    a: int
    b: int
    c: int
    d: int
    k: int = 0

    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def with_k(self, k: int) -> "AlgebraicAmplitude":
        """Rewrite with a larger exponent; the denoted value is unchanged."""
        if k < self.k:
            raise ValueError("exponent can only be raised")
        t = self.coeffs()
        for _ in range(k - self.k):
            t = shift_tuple(t)
        return AlgebraicAmplitude(*t, k=k)

    def same_value(self, other: "AlgebraicAmplitude") -> bool:
        k = max(self.k, other.k)
        return self.with_k(k).coeffs() == other.with_k(k).coeffs()

    def abs2(self) -> RootTwoRational:
        """|α|² as an exact element of ℚ[√2].

        |aω³+bω²+cω+d|² = (a²+b²+c²+d²) + √2·(ab+bc+cd−ad); dividing by
        √2^{2k} contributes the 2^k denominator.
        """
        a, b, c, d = self.a, self.b, self.c, self.d
        u = a * a + b * b + c * c + d * d
        v = a * b + b * c + c * d - a * d
        den = 1 << self.k if self.k >= 0 else None
        if den is None:
            scale = 1 << (-self.k)
            return RootTwoRational(u * scale, v * scale)
        return RootTwoRational(Fraction(u, den), Fraction(v, den))

    def abs2_numerators(self) -> tuple[int, int]:
        """(u, v) with |α|²·2^k = u + v√2."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return (a * a + b * b + c * c + d * d,
                a * b + b * c + c * d - a * d)

    def to_exact_parts(self) -> tuple[RootTwoRational, RootTwoRational]:
        """(re, im) as exact elements of ℚ[√2]."""
        a, b, c, d = self.a, self.b, self.c, self.d
        # ω = (1+i)/√2: re = d + (c−a)/√2, im = b + (c+a)/√2
        re = RootTwoRational(d, Fraction(c - a, 2))
        im = RootTwoRational(b, Fraction(c + a, 2))
        half, odd = divmod(self.k, 2)
        scale = Fraction(1, 1 << half) if half >= 0 else Fraction(1 << -half)
        re *= scale
        im *= scale
        if odd:
            inv_rt2 = RootTwoRational(0, Fraction(1, 2))
            re *= inv_rt2
            im *= inv_rt2
        return re, im

    def to_complex(self) -> complex:
        re, im = self.to_exact_parts()
        return complex(float(re), float(im))


AMP_ZERO = AlgebraicAmplitude(0, 0, 0, 0, 0)
