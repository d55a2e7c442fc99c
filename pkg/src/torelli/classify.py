"""Holomorphic maps between configuration spaces.

Every non-constant holomorphic ``Omega_m -> Omega_n`` is a group element of
G_m followed by a coordinate projection. This module builds the
cross-ratio maps ``L_C``, decides when two of them can collide, validates
and extends tuples of them, enumerates all maps for given ``(m, n)``, and
lifts group elements along forgetful projections.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterator, Optional, Sequence

from .errors import (
    AmbientMismatch,
    BudgetExhausted,
    LiftVerificationFailed,
    MalformedInput,
    NoExtension,
    TargetLargerThanSource,
)
from .factored import (
    VAR,
    VAR_MINUS_ONE,
    FactoredMap,
    cross_ratio_symbolic,
    evaluate,
    format_map,
    marked_point,
)
from .group import GroupElement, _check_ceiling, theta, theta_image
from .permutations import Permutation, format_cycles
from .projective import OmegaPoint, QuadraticNumber, sample_omega_point

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class CrossRatioSpec:
    """A quadruple of distinct marked-point indices in ``1..k+1``."""

    ambient_k: int
    indices: tuple

    def __post_init__(self):
        idx = tuple(self.indices)
        object.__setattr__(self, "indices", idx)
        if self.ambient_k < 3:
            raise ValueError(f"ambient_k must be >= 3, got {self.ambient_k}")
        if len(idx) != 4:
            raise ValueError(f"need four indices, got {idx}")
        if len(set(idx)) != 4:
            raise ValueError(f"indices {idx} are not pairwise distinct")
        if not all(1 <= i <= self.ambient_k + 1 for i in idx):
            raise ValueError(f"indices {idx} out of range 1..{self.ambient_k + 1}")

    @classmethod
    def parse(cls, text: str, k: int) -> "CrossRatioSpec":
        try:
            idx = tuple(int(t) for t in text.replace("(", "").replace(")", "").split(","))
            return cls(k, idx)
        except ValueError as exc:
            raise MalformedInput(f"bad cross-ratio spec {text!r}: {exc}") from None

    def __str__(self) -> str:
        return ",".join(map(str, self.indices))


def all_specs(k: int) -> list:
    """A_k: every ordered quadruple of distinct indices."""
    return [CrossRatioSpec(k, c) for c in itertools.permutations(range(1, k + 2), 4)]


def parse_specs(text: str, k: int) -> list:
    return [CrossRatioSpec.parse(part, k) for part in text.split(";") if part.strip()]


def lc_map(spec: CrossRatioSpec) -> FactoredMap:
    return cross_ratio_symbolic(*(marked_point(i) for i in spec.indices), spec.ambient_k)


# Position permutations of a quadruple that leave its cross-ratio unchanged.
KLEIN_FOUR = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))

# case letter -> positions that must agree
_CASES = (("a", (0, 1, 2)), ("b", (0, 1, 3)), ("c", (0, 2, 3)), ("d", (1, 2, 3)))


def collision_case(C1: CrossRatioSpec, C2: CrossRatioSpec) -> Optional[str]:
    """Which of the cases (a)-(d) makes ``L_C1 = L_C2`` unsolvable, if any.

    ``C2`` is compared in every Klein-four rearrangement, since those
    describe the same map. At most one rearrangement can match.
    """
    if C1.ambient_k != C2.ambient_k:
        raise AmbientMismatch(f"k={C1.ambient_k} vs k={C2.ambient_k}")
    a = C1.indices
    for perm in KLEIN_FOUR:
        b = tuple(C2.indices[p] for p in perm)
        for letter, positions in _CASES:
            (other,) = set(range(4)) - set(positions)
            if all(a[p] == b[p] for p in positions) and a[other] != b[other]:
                return letter
    return None


def collision_free(C1: CrossRatioSpec, C2: CrossRatioSpec) -> bool:
    return collision_case(C1, C2) is not None


def _linear(f, v: int, vals: dict) -> list:
    """Factor ``f`` as a polynomial in ``z_v`` (coefficients low degree first)."""
    if f.kind == VAR:
        return [Fraction(0), Fraction(1)] if f.i == v else [vals[f.i]]
    if f.kind == VAR_MINUS_ONE:
        return [Fraction(-1), Fraction(1)] if f.i == v else [vals[f.i] - 1]
    if f.i == v:
        return [-vals[f.j], Fraction(1)]
    if f.j == v:
        return [vals[f.i], Fraction(-1)]
    return [vals[f.i] - vals[f.j]]


def _pmul(p: list, q: list) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _psub(p: list, q: list) -> list:
    n = max(len(p), len(q))
    out = [(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _roots(p: list) -> Optional[tuple]:
    """Roots of a polynomial of degree <= 2 over Q.

    Returns ``(rational_roots, quadratic_roots)``; the second list holds
    :class:`QuadraticNumber` roots of an irreducible quadratic. None if the
    degree exceeds 2.
    """
    deg = len(p) - 1
    if deg <= 0:
        return [], []
    if deg == 1:
        return [-p[0] / p[1]], []
    if deg == 2:
        c, b, a = p
        disc = b * b - 4 * a * c
        r = _rational_sqrt(disc)
        if r is None:
            half = 1 / (2 * a)
            return [], [
                QuadraticNumber(-b * half, half, disc),
                QuadraticNumber(-b * half, -half, disc),
            ]
        return sorted({(-b + r) / (2 * a), (-b - r) / (2 * a)}), []
    return None


@dataclass(frozen=True)
class QuadraticWitness:
    """A collision point whose free coordinate is irrational (possibly non-real).

    ``fixed`` holds the rational coordinates with ``None`` at
    ``free_index``; that coordinate is ``root``, an element of
    Q(sqrt(d)) outside Q. Such a point lies in Omega_k automatically, since
    every excluded value is rational.
    """

    fixed: tuple
    free_index: int
    root: QuadraticNumber

    def coordinates(self) -> tuple:
        return tuple(self.root if v is None else v for v in self.fixed)

    def __str__(self) -> str:
        parts = [str(self.root) if v is None else str(v) for v in self.fixed]
        return "(" + ", ".join(parts) + ")"


def _generic_value(F: FactoredMap, coords: tuple):
    num, den = F.lam, 1
    for f, e in F.factors:
        v = f.value(coords)
        if e > 0:
            num = v**e * num
        else:
            den = v ** (-e) * den
    return num, den


def witness_holds(F1: FactoredMap, F2: FactoredMap, witness) -> bool:
    """Exact check that ``F1 = F2`` at a rational or quadratic witness."""
    if isinstance(witness, OmegaPoint):
        return evaluate(F1, witness) == evaluate(F2, witness)
    coords = witness.coordinates()
    n1, d1 = _generic_value(F1, coords)
    n2, d2 = _generic_value(F2, coords)
    d = witness.root.d

    def q(x):
        return x if isinstance(x, QuadraticNumber) else QuadraticNumber.rational(x, d)

    if q(d1).is_zero() or q(d2).is_zero():
        return False
    return (q(n1) * q(d2) - q(n2) * q(d1)).is_zero()


def _numerator_denominator(F: FactoredMap, v: int, vals: dict) -> tuple:
    num, den = [F.lam], [Fraction(1)]
    for f, e in F.factors:
        lin = _linear(f, v, vals)
        for _ in range(abs(e)):
            if e > 0:
                num = _pmul(num, lin)
            else:
                den = _pmul(den, lin)
    return num, den


def _random_value(rng: random.Random, height: int) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def collision_witness(
    C1: CrossRatioSpec, C2: CrossRatioSpec, budget: int = 50, seed: int = 0, height: int = 30
):
    """Search for an exact point of Omega_k where ``L_C1 = L_C2``.

    Each attempt fixes every variable except one at random rationals and
    solves the remaining equation (degree at most 2) exactly. The free
    variable cycles through the variables the two maps depend on.
    Rational witnesses are preferred; if every attempt only produced roots
    of an irreducible quadratic, the first such point is returned as a
    :class:`QuadraticWitness`. Raises :class:`BudgetExhausted` when no
    attempt produced any root; that outcome is inconclusive, not a proof
    of absence.
    """
    if C1.ambient_k != C2.ambient_k:
        raise AmbientMismatch(f"k={C1.ambient_k} vs k={C2.ambient_k}")
    k = C1.ambient_k
    F1, F2 = lc_map(C1), lc_map(C2)
    free_vars = sorted(F1.variables() | F2.variables())
    rng = random.Random(f"witness:{k}:{C1.indices}:{C2.indices}:{seed}")
    fallback = None
    for attempt in range(budget):
        v = free_vars[attempt % len(free_vars)]
        vals: dict = {}
        forbidden = {Fraction(0), Fraction(1)}
        for j in range(1, k - 1):
            if j == v:
                continue
            x = _random_value(rng, height)
            while x in forbidden:
                x = _random_value(rng, height)
            vals[j] = x
            forbidden.add(x)
        n1, d1 = _numerator_denominator(F1, v, vals)
        n2, d2 = _numerator_denominator(F2, v, vals)
        poly = _psub(_pmul(n1, d2), _pmul(n2, d1))
        if not poly:
            x = _random_value(rng, height)
            while x in forbidden:
                x = _random_value(rng, height)
            rational, quadratic = [x], []
        else:
            found = _roots(poly)
            if found is None:
                continue
            rational, quadratic = found
        for x in rational:
            if x in forbidden:
                continue
            point = OmegaPoint(tuple(x if j == v else vals[j] for j in range(1, k - 1)))
            if witness_holds(F1, F2, point):
                return point
        if fallback is None and quadratic:
            fixed = tuple(None if j == v else vals[j] for j in range(1, k - 1))
            cand = QuadraticWitness(fixed, v, quadratic[0])
            if witness_holds(F1, F2, cand):
                fallback = cand
    if fallback is not None:
        return fallback
    raise BudgetExhausted(f"no witness for {C1} vs {C2} within {budget} attempts")


@dataclass(frozen=True)
class ValidMap:
    n: int

    def __str__(self) -> str:
        return f"valid map into Omega_{self.n}"


@dataclass(frozen=True)
class CollisionAt:
    i: int
    j: int

    def __str__(self) -> str:
        return f"collision at coordinates {self.i},{self.j}"


@dataclass(frozen=True)
class TooManyCoordinates:
    count: int
    limit: int

    def __str__(self) -> str:
        return f"too many coordinates ({self.count} > {self.limit})"


def validate_tuple(specs: Sequence[CrossRatioSpec], k: int):
    """Verdict on whether ``(L_C1, ..., L_Cl)`` maps Omega_k into Omega_{l+2}."""
    for s in specs:
        if s.ambient_k != k:
            raise AmbientMismatch(f"spec {s} is for k={s.ambient_k}, not {k}")
    if len(specs) > k - 2:
        return TooManyCoordinates(len(specs), k - 2)
    maps = [lc_map(s) for s in specs]
    for (i, a), (j, b) in itertools.combinations(enumerate(specs), 2):
        if not collision_free(a, b) or maps[i] == maps[j]:
            return CollisionAt(i + 1, j + 1)
    return ValidMap(len(specs) + 2)


def find_valid_tuple(k: int, length: int) -> Optional[tuple]:
    """Search A_k for ``length`` pairwise collision-free specs.

    Collision-freeness is symmetric, so it suffices to search increasing
    index sequences (cliques of the collision-free graph).
    """
    specs = all_specs(k)
    n = len(specs)
    free = [
        {j for j in range(n) if j != i and collision_free(specs[i], specs[j])} for i in range(n)
    ]

    def extend(chosen: list, candidates: set):
        if len(chosen) == length:
            return tuple(specs[i] for i in chosen)
        for c in sorted(candidates):
            if chosen and c < chosen[-1]:
                continue
            found = extend(chosen + [c], candidates & free[c])
            if found:
                return found
        return None

    return extend([], set(range(n)))


def extend_to_group_element(specs: Sequence[CrossRatioSpec], k: int) -> GroupElement:
    verdict = validate_tuple(specs, k)
    if not isinstance(verdict, ValidMap):
        raise NoExtension(f"tuple is not a valid map: {verdict}")
    prefix = tuple(lc_map(s) for s in specs)
    for _, g in theta_image(k):
        if g.coords[: len(prefix)] == prefix:
            return g
    raise NoExtension(f"no element of G_{k} starts with {', '.join(map(format_map, prefix))}")


@dataclass(frozen=True)
class HoloMapDescriptor:
    """``(T_{j_1}, ..., T_{j_{n-2}})`` for ``T = theta(m, sigma)``."""

    m: int
    n: int
    sigma: Permutation
    J: tuple
    coords: tuple

    def __call__(self, z: OmegaPoint) -> OmegaPoint:
        return OmegaPoint(tuple(evaluate(c, z) for c in self.coords))

    def key(self) -> tuple:
        return tuple(format_map(c) for c in self.coords)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "sigma": format_cycles(self.sigma),
            "J": list(self.J),
            "coords": [format_map(c) for c in self.coords],
        }


HOLOMAP_SCHEMA = {
    "type": "object",
    "required": ["m", "n", "sigma", "J", "coords"],
    "properties": {
        "m": {"type": "integer", "minimum": 3},
        "n": {"type": "integer", "minimum": 3},
        "sigma": {"type": "string", "pattern": r"^(\(\)|(\(\d+( \d+)+\))+)$"},
        "J": {"type": "array", "items": {"type": "integer", "minimum": 1}, "uniqueItems": True},
        "coords": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}


def descriptor(m: int, n: int, sigma: Permutation, J: Sequence[int]) -> HoloMapDescriptor:
    T = theta(m, sigma)
    return HoloMapDescriptor(m, n, sigma, tuple(J), tuple(T.coords[j - 1] for j in J))


def iter_maps(m: int, n: int) -> Iterator[HoloMapDescriptor]:
    """Distinct non-constant holomorphic maps Omega_m -> Omega_n, first-found order."""
    if n < 3 or m < 3:
        raise ValueError("m and n must be >= 3")
    if n > m:
        raise TargetLargerThanSource(f"no non-constant maps Omega_{m} -> Omega_{n}")
    _check_ceiling(m)
    seen = set()
    index_tuples = list(itertools.permutations(range(1, m - 1), n - 2))
    for sigma, T in theta_image(m):
        for J in index_tuples:
            coords = tuple(T.coords[j - 1] for j in J)
            if coords in seen:
                continue
            seen.add(coords)
            yield HoloMapDescriptor(m, n, sigma, J, coords)


def enumerate_maps(m: int, n: int) -> list:
    return list(iter_maps(m, n))


@dataclass(frozen=True)
class ForgetfulSpec:
    m: int
    n: int
    J: tuple

    def __post_init__(self):
        J = tuple(self.J)
        object.__setattr__(self, "J", J)
        if not 3 <= self.n <= self.m:
            raise ValueError(f"need 3 <= n <= m, got m={self.m}, n={self.n}")
        if len(J) != self.n - 2:
            raise ValueError(f"J must have {self.n - 2} entries, got {J}")
        if len(set(J)) != len(J) or not all(1 <= j <= self.m - 2 for j in J):
            raise ValueError(f"J={J} must be distinct indices in 1..{self.m - 2}")

    def __call__(self, z: OmegaPoint) -> OmegaPoint:
        return apply_forgetful(self, z)


def forgetful(spec: ForgetfulSpec) -> HoloMapDescriptor:
    """The projection as a map descriptor (it is ``theta(m, id)`` restricted to J)."""
    return descriptor(spec.m, spec.n, Permutation.identity(spec.m + 1), spec.J)


def apply_forgetful(spec: ForgetfulSpec, z: OmegaPoint) -> OmegaPoint:
    if len(z) != spec.m - 2:
        raise ValueError(f"point has {len(z)} coordinates, expected {spec.m - 2}")
    return OmegaPoint(tuple(z.coords[j - 1] for j in spec.J))


def verify_lift(
    sigma: Permutation, sigma_hat: Permutation, spec: ForgetfulSpec, points: int = 5, seed: int = 0
) -> bool:
    """Check ``pi_J ∘ theta(m, sigma_hat) = theta(n, sigma) ∘ pi_J`` at sampled points."""
    U = theta(spec.m, sigma_hat)
    T = theta(spec.n, sigma)
    for t in range(points):
        z = sample_omega_point(spec.m, seed=seed * 1000 + t)
        if apply_forgetful(spec, U(z)) != T(apply_forgetful(spec, z)):
            return False
    return True


def _slot_map(J: Sequence[int]) -> dict:
    # marked index of Omega_n -> marked index of Omega_m
    out = {1: 1, 2: 2, 3: 3}
    out.update({t + 3: j + 3 for t, j in enumerate(J, 1)})
    return out


def _printed_lift(sigma: Permutation, m: int, J: Sequence[int]) -> Optional[Permutation]:
    """The lifting rule exactly as printed, which indexes sigma by j-values.

    Returns None when the rule does not produce a permutation.
    """
    n = sigma.degree - 1
    images = list(range(1, m + 2))

    def rule(x: int) -> Optional[int]:
        y = sigma(x)
        if y <= 3:
            return y
        arg = J[y - 4]
        if not 1 <= arg <= n + 1:
            return None
        return sigma(arg) + 3

    for r in (1, 2, 3):
        images[r - 1] = rule(r)
    for t, j in enumerate(J, 1):
        images[j + 2] = rule(t + 3)
    if None in images or sorted(images) != list(range(1, m + 2)):
        return None
    return Permutation(tuple(images))


def _conjugate_lift(sigma: Permutation, m: int, J: Sequence[int]) -> Permutation:
    """Transport sigma along ``phi: 1,2,3 -> 1,2,3; t+3 -> j_t+3``."""
    phi = _slot_map(J)
    images = list(range(1, m + 2))
    for x, px in phi.items():
        images[px - 1] = phi[sigma(x)]
    return Permutation(tuple(images))


@dataclass(frozen=True)
class Lift:
    sigma_hat: Permutation
    method: str  # "printed", "conjugation" or "search"
    verified: bool


def lift_permutation_detailed(
    sigma: Permutation, m: int, J: Sequence[int], points: int = 5
) -> Lift:
    n = sigma.degree - 1
    spec = ForgetfulSpec(m, n, tuple(J))
    printed = _printed_lift(sigma, m, spec.J)
    if printed is not None and verify_lift(sigma, printed, spec, points):
        return Lift(printed, "printed", True)
    log.info(
        "printed lifting rule fails for sigma=%s, J=%s (got %s)",
        format_cycles(sigma),
        spec.J,
        None if printed is None else format_cycles(printed),
    )
    conj = _conjugate_lift(sigma, m, spec.J)
    if verify_lift(sigma, conj, spec, points):
        return Lift(conj, "conjugation", True)
    log.warning("conjugation lift fails for sigma=%s, J=%s; searching", format_cycles(sigma), J)
    support = sorted(_slot_map(spec.J).values())
    for images in itertools.permutations(support):
        full = list(range(1, m + 2))
        for x, y in zip(support, images):
            full[x - 1] = y
        cand = Permutation(tuple(full))
        if verify_lift(sigma, cand, spec, points):
            return Lift(cand, "search", True)
    raise LiftVerificationFailed(f"no lift of {format_cycles(sigma)} along J={spec.J}")


def lift_permutation(sigma: Permutation, m: int, J: Sequence[int]) -> Permutation:
    """A permutation ``sigma_hat`` of ``1..m+1`` with ``pi_J ∘ U = T ∘ pi_J``,
    where ``U = theta(m, sigma_hat)`` and ``T = theta(n, sigma)``."""
    return lift_permutation_detailed(sigma, m, J).sigma_hat


__all__ = [
    "CollisionAt",
    "CrossRatioSpec",
    "ForgetfulSpec",
    "HoloMapDescriptor",
    "TooManyCoordinates",
    "QuadraticWitness",
    "ValidMap",
    "all_specs",
    "apply_forgetful",
    "collision_case",
    "collision_free",
    "collision_witness",
    "enumerate_maps",
    "extend_to_group_element",
    "find_valid_tuple",
    "forgetful",
    "iter_maps",
    "lc_map",
    "lift_permutation",
    "validate_tuple",
]
