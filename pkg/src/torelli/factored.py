"""Canonical factored rational maps on Omega_k.

A :class:`FactoredMap` is ``lam * prod(factor ** exponent)`` where every
factor is one of the hyperplane equations ``z_j``, ``z_j - 1`` or
``z_i - z_j`` (``i < j``). Orientation signs live in ``lam``, so two maps
are equal as functions exactly when they are structurally equal.

Text form (whitespace free)::

    map  := coef ("*" term)*
    coef := "1" | "-1" | rational
    term := atom "^" int | atom
    atom := "z" idx | "(z" idx "-1)" | "(z" idx "-z" idx ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import (
    AmbientMismatch,
    DegenerateTuple,
    IdenticalPoints,
    LengthMismatch,
    MalformedInput,
    OutOfRange,
)
from .projective import INF, OmegaPoint, ProjPoint, sample_omega_point

VAR, VAR_MINUS_ONE, VAR_DIFF = 0, 1, 2


class LinearFactor(NamedTuple):
    """One hyperplane factor. Tuple order is the canonical key order."""

    kind: int
    i: int
    j: int = 0

    @classmethod
    def var(cls, j: int) -> "LinearFactor":
        return cls(VAR, j)

    @classmethod
    def var_minus_one(cls, j: int) -> "LinearFactor":
        return cls(VAR_MINUS_ONE, j)

    @classmethod
    def var_diff(cls, i: int, j: int) -> "LinearFactor":
        if not i < j:
            raise ValueError(f"VarDiff needs i < j, got ({i}, {j})")
        return cls(VAR_DIFF, i, j)

    def variables(self) -> tuple:
        return (self.i, self.j) if self.kind == VAR_DIFF else (self.i,)

    def value(self, z: tuple) -> Fraction:
        if self.kind == VAR:
            return z[self.i - 1]
        if self.kind == VAR_MINUS_ONE:
            return z[self.i - 1] - 1
        return z[self.i - 1] - z[self.j - 1]

    def __str__(self) -> str:
        if self.kind == VAR:
            return f"z{self.i}"
        if self.kind == VAR_MINUS_ONE:
            return f"(z{self.i}-1)"
        return f"(z{self.i}-z{self.j})"


@dataclass(frozen=True)
class FactoredMap:
    ambient_k: int
    lam: Fraction
    factors: tuple  # ((LinearFactor, exponent), ...) in canonical order

    def __post_init__(self):
        if self.ambient_k < 3:
            raise ValueError(f"ambient_k must be >= 3, got {self.ambient_k}")
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")
        nvars = self.ambient_k - 2
        prev = None
        for f, e in self.factors:
            if e == 0:
                raise ValueError("zero exponents are not stored")
            if prev is not None and not prev < f:
                raise ValueError("factor keys out of canonical order")
            if max(f.variables()) > nvars or min(f.variables()) < 1:
                raise OutOfRange(f"{f} out of range for k={self.ambient_k}")
            prev = f

    @classmethod
    def build(
        cls, k: int, lam: Union[int, Fraction] = 1, factors: Mapping = None
    ) -> "FactoredMap":
        factors = factors or {}
        items = tuple(sorted((f, e) for f, e in factors.items() if e != 0))
        return cls(k, Fraction(lam), items)

    @classmethod
    def constant(cls, k: int, value: Union[int, Fraction] = 1) -> "FactoredMap":
        return cls(k, Fraction(value), ())

    @classmethod
    def var(cls, k: int, j: int) -> "FactoredMap":
        return cls(k, Fraction(1), ((LinearFactor.var(j), 1),))

    @property
    def is_constant(self) -> bool:
        return not self.factors

    def exponents(self) -> dict:
        return dict(self.factors)

    def variables(self) -> frozenset:
        return frozenset(v for f, _ in self.factors for v in f.variables())

    def positive_degree(self) -> int:
        return sum(e for _, e in self.factors if e > 0)

    def negative_degree(self) -> int:
        return sum(e for _, e in self.factors if e < 0)

    def sort_key(self) -> tuple:
        return (self.factors, self.lam)

    def __mul__(self, other: "FactoredMap") -> "FactoredMap":
        return multiply(self, other)

    def __invert__(self) -> "FactoredMap":
        return invert(self)

    def __call__(self, z: OmegaPoint) -> ProjPoint:
        return evaluate(self, z)

    def __str__(self) -> str:
        return format_map(self)


class _InfinityMarker:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY_MARKER"


INFINITY_MARKER = _InfinityMarker()


@dataclass(frozen=True, order=True)
class SymbolicPoint:
    """Marked point ``p_slot``: slot 1 is ∞, 2 is 0, 3 is 1, ``3 + j`` is ``z_j``."""

    slot: int

    def __post_init__(self):
        if self.slot < 1:
            raise OutOfRange(f"marked point index {self.slot} < 1")

    @classmethod
    def var(cls, j: int) -> "SymbolicPoint":
        if j < 1:
            raise OutOfRange(f"variable index {j} < 1")
        return cls(3 + j)

    @property
    def is_infinity(self) -> bool:
        return self.slot == 1

    @property
    def var_index(self):
        return self.slot - 3 if self.slot > 3 else None

    def __str__(self) -> str:
        return {1: "inf", 2: "0", 3: "1"}.get(self.slot, f"z{self.slot - 3}")


INFINITY = SymbolicPoint(1)
ZERO = SymbolicPoint(2)
ONE = SymbolicPoint(3)


def marked_point(index: int) -> SymbolicPoint:
    """``p_index`` of the marked tuple ``(∞, 0, 1, z_1, ..., z_{k-2})``."""
    return SymbolicPoint(index)


def _check_point(p: SymbolicPoint, k: int) -> None:
    if p.slot > k + 1:
        raise OutOfRange(f"{p} is out of range for k={k}")


def symbolic_diff(p: SymbolicPoint, q: SymbolicPoint, k: int):
    """Return ``p - q`` as a one-factor map, or INFINITY_MARKER."""
    _check_point(p, k)
    _check_point(q, k)
    if p == q:
        raise IdenticalPoints(f"{p} - {p}")
    if p.is_infinity or q.is_infinity:
        return INFINITY_MARKER
    sign = 1
    if p.slot > q.slot:
        hi, lo = p, q
    else:
        hi, lo = q, p
        sign = -1
    # now p - q == sign * (hi - lo) with hi.slot > lo.slot >= 2
    if lo == ZERO:
        if hi == ONE:
            return FactoredMap.constant(k, sign)
        factor = LinearFactor.var(hi.var_index)
    elif lo == ONE:
        factor = LinearFactor.var_minus_one(hi.var_index)
    else:
        # z_hi - z_lo = -(z_lo - z_hi) with lo < hi
        factor = LinearFactor.var_diff(lo.var_index, hi.var_index)
        sign = -sign
    return FactoredMap(k, Fraction(sign), ((factor, 1),))


def cross_ratio_symbolic(
    a: SymbolicPoint, b: SymbolicPoint, c: SymbolicPoint, d: SymbolicPoint, k: int
) -> FactoredMap:
    """``(d-b)(c-a) / ((d-a)(c-b))`` over marked points, in canonical form.

    A difference involving ∞ occurs once upstairs and once downstairs;
    the pair is dropped.
    """
    pts = (a, b, c, d)
    for p in pts:
        _check_point(p, k)
    if len(set(pts)) != 4:
        raise DegenerateTuple(f"repeated marked point in [{', '.join(map(str, pts))}]")
    result = FactoredMap.constant(k)
    for p, q, sign in ((d, b, 1), (c, a, 1), (d, a, -1), (c, b, -1)):
        diff = symbolic_diff(p, q, k)
        if diff is INFINITY_MARKER:
            continue
        result = multiply(result, diff if sign > 0 else invert(diff))
    return result


def multiply(F: FactoredMap, G: FactoredMap) -> FactoredMap:
    if F.ambient_k != G.ambient_k:
        raise AmbientMismatch(f"k={F.ambient_k} vs k={G.ambient_k}")
    exps = dict(F.factors)
    for f, e in G.factors:
        exps[f] = exps.get(f, 0) + e
    return FactoredMap.build(F.ambient_k, F.lam * G.lam, exps)


def invert(F: FactoredMap) -> FactoredMap:
    return FactoredMap(F.ambient_k, 1 / F.lam, tuple((f, -e) for f, e in F.factors))


def product(maps: Iterable[FactoredMap], k: int) -> FactoredMap:
    result = FactoredMap.constant(k)
    for m in maps:
        result = multiply(result, m)
    return result


def _as_values(F: FactoredMap, z) -> tuple:
    if isinstance(z, OmegaPoint):
        values = z.values()
    else:
        values = tuple(Fraction(v) for v in z)
    if len(values) != F.ambient_k - 2:
        raise LengthMismatch(
            f"map on Omega_{F.ambient_k} evaluated at a point with {len(values)} coordinates"
        )
    return values


def evaluate_fraction(F: FactoredMap, values: tuple):
    """Evaluate at already-converted Fraction coordinates.

    Returns a Fraction, or None for a pole. Raises ZeroDivisionError on 0/0.
    """
    num = F.lam
    den = Fraction(1)
    for f, e in F.factors:
        v = f.value(values)
        if e > 0:
            num *= v**e
        else:
            den *= v ** (-e)
    if den == 0:
        if num == 0:
            raise ZeroDivisionError(f"{F} is 0/0 at {values}")
        return None
    return num / den


def evaluate(F: FactoredMap, z) -> ProjPoint:
    """Exact value of ``F`` at ``z``; ``inf`` at a pole."""
    value = evaluate_fraction(F, _as_values(F, z))
    if value is None:
        return INF
    return ProjPoint(value.numerator, value.denominator)


def equal(F: FactoredMap, G: FactoredMap) -> bool:
    if F.ambient_k != G.ambient_k:
        raise AmbientMismatch(f"k={F.ambient_k} vs k={G.ambient_k}")
    return F == G


def equal_randomized(
    F: FactoredMap, G: FactoredMap, trials: int = 8, seed: int = 0, height: int = 1000
) -> bool:
    """Compare by evaluation at ``trials`` seeded random points of Omega_k."""
    if F.ambient_k != G.ambient_k:
        raise AmbientMismatch(f"k={F.ambient_k} vs k={G.ambient_k}")
    for t in range(trials):
        z = sample_omega_point(F.ambient_k, seed=seed * 7919 + t, height=height)
        if evaluate(F, z) != evaluate(G, z):
            return False
    return True


def format_map(F: FactoredMap) -> str:
    lam = F.lam
    coef = str(lam.numerator) if lam.denominator == 1 else f"{lam.numerator}/{lam.denominator}"
    parts = [coef]
    for f, e in F.factors:
        parts.append(str(f) if e == 1 else f"{f}^{e}")
    return "*".join(parts)


_COEF = re.compile(r"-?\d+(/\d+)?\Z")
_TERM = re.compile(
    r"(?:z(?P<v>\d+)|\(z(?P<m>\d+)-1\)|\(z(?P<a>\d+)-z(?P<b>\d+)\))(?:\^(?P<e>-?\d+))?\Z"
)


def _parse_term(term: str):
    m = _TERM.match(term)
    if not m:
        raise MalformedInput(f"bad factor {term!r}")
    exp = int(m["e"]) if m["e"] is not None else 1
    if m["v"] is not None:
        return LinearFactor.var(int(m["v"])), exp
    if m["m"] is not None:
        return LinearFactor.var_minus_one(int(m["m"])), exp
    i, j = int(m["a"]), int(m["b"])
    if i == j:
        raise MalformedInput(f"degenerate factor {term!r}")
    if i > j:
        # (z_i - z_j)^e with i > j is (-1)^e (z_j - z_i)^e
        return LinearFactor.var_diff(j, i), exp, (-1) ** (exp % 2)
    return LinearFactor.var_diff(i, j), exp


def parse_map(text: str, k: int = None) -> FactoredMap:
    """Parse the text form. ``k`` defaults to the smallest fitting ambient k.

    Non-canonical input (unsorted keys, ``(z2-z1)``, repeated factors) is
    accepted and canonicalized.
    """
    text = text.strip()
    if not text:
        raise MalformedInput("empty map")
    head, *terms = text.split("*")
    if not _COEF.match(head):
        raise MalformedInput(f"bad coefficient {head!r}")
    lam = Fraction(head)
    if lam == 0:
        raise MalformedInput("coefficient must be nonzero")
    exps: dict = {}
    for term in terms:
        parsed = _parse_term(term)
        f, e = parsed[0], parsed[1]
        if len(parsed) == 3:
            lam *= parsed[2]
        exps[f] = exps.get(f, 0) + e
    nvars = max((max(f.variables()) for f in exps), default=1)
    if min((min(f.variables()) for f in exps), default=1) < 1:
        raise OutOfRange("variable indices start at 1")
    if k is None:
        k = max(3, nvars + 2)
    elif nvars > k - 2:
        raise OutOfRange(f"z{nvars} does not exist for k={k}")
    return FactoredMap.build(k, lam, exps)
