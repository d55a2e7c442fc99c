"""Exact arithmetic on the rational projective line.

Scalars are :class:`fractions.Fraction`; points of Q ∪ {∞} are
:class:`ProjPoint` values in normalized homogeneous coordinates, with
infinity stored as ``[1 : 0]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Union

from .errors import DegenerateTuple, ExhaustedSampleSpace, MalformedInput

Rational = Fraction

Number = Union[int, Fraction, "ProjPoint"]


@dataclass(frozen=True)
class ProjPoint:
    """A point ``[x : y]`` of the projective line over Q.

    Use :meth:`of` to build from an arbitrary homogeneous pair; the raw
    constructor insists on an already normalized pair.
    """

    x: int
    y: int

    def __post_init__(self):
        if self.y < 0:
            raise ValueError(f"non-normalized point [{self.x}:{self.y}]")
        if self.y == 0:
            if self.x != 1:
                raise ValueError(f"infinity must be [1:0], got [{self.x}:0]")
        elif gcd(self.x, self.y) != 1:
            raise ValueError(f"non-normalized point [{self.x}:{self.y}]")

    @classmethod
    def of(cls, x: int, y: int) -> "ProjPoint":
        if x == 0 and y == 0:
            raise ValueError("[0:0] is not a point")
        if y == 0:
            return cls(1, 0)
        if y < 0:
            x, y = -x, -y
        g = gcd(x, y)
        return cls(x // g, y // g)

    @classmethod
    def from_value(cls, value: Number) -> "ProjPoint":
        if isinstance(value, ProjPoint):
            return value
        q = Fraction(value)
        return cls(q.numerator, q.denominator)

    @classmethod
    def parse(cls, text: str) -> "ProjPoint":
        text = text.strip()
        if text == "inf":
            return INF
        try:
            return cls.from_value(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"not a projective point: {text!r}") from exc

    @property
    def is_infinite(self) -> bool:
        return self.y == 0

    def to_fraction(self) -> Fraction:
        if self.y == 0:
            raise ZeroDivisionError("the point at infinity has no finite value")
        return Fraction(self.x, self.y)

    def __str__(self) -> str:
        if self.y == 0:
            return "inf"
        if self.y == 1:
            return str(self.x)
        return f"{self.x}/{self.y}"

    def __repr__(self) -> str:
        return f"ProjPoint({self})"


INF = ProjPoint(1, 0)
ZERO = ProjPoint(0, 1)
ONE = ProjPoint(1, 1)


def _det(p: ProjPoint, q: ProjPoint) -> int:
    # homogeneous form of p - q, up to the positive factor y_p * y_q
    return p.x * q.y - q.x * p.y


def cross_ratio(a: Number, b: Number, c: Number, d: Number) -> ProjPoint:
    """Return ``[a, b, c, d] = (d-b)(c-a) / ((d-a)(c-b))``.

    This is the Möbius map sending ``a, b, c`` to ``∞, 0, 1`` evaluated
    at ``d``. Entries may be ``inf``.
    """
    a, b, c, d = (ProjPoint.from_value(p) for p in (a, b, c, d))
    pts = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i] == pts[j]:
                raise DegenerateTuple(f"repeated point {pts[i]} in cross-ratio")
    num = _det(d, b) * _det(c, a)
    den = _det(d, a) * _det(c, b)
    return ProjPoint.of(num, den)


@dataclass(frozen=True)
class OmegaPoint:
    """A point of Omega_k: ``k-2`` distinct finite coordinates avoiding 0 and 1."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(ProjPoint.from_value(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        for c in coords:
            if c.is_infinite or c == ZERO or c == ONE:
                raise ValueError(f"coordinate {c} is not in C \\ {{0, 1}}")
        if len(set(coords)) != len(coords):
            raise ValueError(f"coordinates of {self} are not pairwise distinct")

    @classmethod
    def of(cls, values: Iterable[Number]) -> "OmegaPoint":
        return cls(tuple(values))

    @classmethod
    def parse(cls, text: str) -> "OmegaPoint":
        parts = [p for p in text.replace("(", "").replace(")", "").split(",")]
        try:
            return cls(tuple(ProjPoint.parse(p) for p in parts))
        except MalformedInput:
            raise
        except ValueError as exc:
            raise MalformedInput(str(exc)) from exc

    @property
    def k(self) -> int:
        return len(self.coords) + 2

    def values(self) -> tuple:
        return tuple(c.to_fraction() for c in self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def sample_omega_point(k: int, seed: int = 0, height: int = 1000) -> OmegaPoint:
    """Draw a deterministic pseudo-random point of Omega_k.

    Coordinates are rationals ``p/q`` with ``|p| <= height`` and
    ``1 <= q <= height``; draws landing on 0, 1 or an earlier coordinate
    are rejected.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    if height < 1:
        raise ExhaustedSampleSpace(f"height {height} admits no coordinates")
    rng = random.Random(f"omega:{k}:{seed}:{height}")
    need = k - 2
    chosen: list = []
    seen = set()
    attempts = 0
    max_attempts = 200 * need + 1000
    while len(chosen) < need:
        attempts += 1
        if attempts > max_attempts:
            raise ExhaustedSampleSpace(
                f"could not place {need} distinct coordinates at height {height}"
            )
        q = Fraction(rng.randint(-height, height), rng.randint(1, height))
        if q == 0 or q == 1 or q in seen:
            continue
        seen.add(q)
        chosen.append(q)
    return OmegaPoint(tuple(chosen))


@dataclass(frozen=True)
class QuadraticNumber:
    """``a + b*sqrt(d)`` in Q(sqrt(d)) for a fixed non-square rational ``d``.

    ``d`` may be negative, in which case this is an exact complex number.
    """

    a: Fraction
    b: Fraction
    d: Fraction

    @classmethod
    def rational(cls, value, d: Fraction) -> "QuadraticNumber":
        return cls(Fraction(value), Fraction(0), Fraction(d))

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise ValueError("mixed quadratic fields")
            return other
        return QuadraticNumber.rational(other, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        conj = QuadraticNumber(o.a / n, -o.b / n, self.d)
        return self * conj

    def __pow__(self, e: int):
        if e < 0:
            return QuadraticNumber.rational(1, self.d) / self ** (-e)
        out = QuadraticNumber.rational(1, self.d)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt({self.d})"
