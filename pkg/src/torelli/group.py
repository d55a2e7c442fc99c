"""The automorphism group G_k of Omega_k and its coordinate functions.

``theta(k, sigma)`` realizes S_{k+1} -> G_k: coordinate ``j`` of the image
is the cross-ratio ``[p_{s(1)}, p_{s(2)}, p_{s(3)}, p_{s(3+j)}]`` with
``s = sigma^{-1}`` and ``(p_1, p_2, p_3, p_{3+i}) = (∞, 0, 1, z_i)``.
Composition of group elements is always carried out on permutations and
pushed through ``theta``; see :func:`compose_elements`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable, Optional, Union

from .errors import (
    DegreeMismatch,
    DegreeTooLarge,
    MalformedInput,
    MissingProvenance,
    NotAGroupElement,
)
from .factored import (
    FactoredMap,
    LinearFactor,
    cross_ratio_symbolic,
    evaluate,
    evaluate_fraction,
    format_map,
    marked_point,
    parse_map,
)
from .permutations import (
    Permutation,
    compose,
    enumerate_group,
    enumeration_ceiling,
    format_cycles,
    inverse,
    parse_permutation,
)
from .projective import OmegaPoint, sample_omega_point

COORD_SEP = " , "


@dataclass(frozen=True)
class GroupElement:
    """An element of G_k as its tuple of coordinate functions.

    ``source_perm`` records which permutation produced the element; it is
    provenance only and does not take part in equality.
    """

    ambient_k: int
    coords: tuple
    source_perm: Optional[Permutation] = field(default=None, compare=False)

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.ambient_k - 2:
            raise ValueError(f"G_{self.ambient_k} elements have {self.ambient_k - 2} coordinates")
        if any(c.ambient_k != self.ambient_k for c in coords):
            raise ValueError("coordinate with the wrong ambient k")
        if len(set(coords)) != len(coords):
            raise ValueError("coordinates are not pairwise distinct")

    def __call__(self, z: OmegaPoint) -> OmegaPoint:
        return OmegaPoint(tuple(evaluate(c, z) for c in self.coords))

    def values(self, z: OmegaPoint) -> tuple:
        vals = z.values()
        return tuple(evaluate_fraction(c, vals) for c in self.coords)

    def __str__(self) -> str:
        return COORD_SEP.join(format_map(c) for c in self.coords)


def _check_k(k: int) -> None:
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")


def _check_ceiling(k: int) -> None:
    ceiling = enumeration_ceiling()
    if k > ceiling:
        raise DegreeTooLarge(f"k={k} exceeds the enumeration ceiling k={ceiling}")


@lru_cache(maxsize=None)
def _theta(k: int, sigma: Permutation) -> GroupElement:
    s = inverse(sigma)
    base = [marked_point(s(r)) for r in (1, 2, 3)]
    coords = tuple(
        cross_ratio_symbolic(*base, marked_point(s(3 + j)), k) for j in range(1, k - 1)
    )
    return GroupElement(k, coords, source_perm=sigma)


def theta(k: int, sigma: Permutation) -> GroupElement:
    _check_k(k)
    if sigma.degree != k + 1:
        raise DegreeMismatch(f"theta_{k} needs a permutation of degree {k + 1}, got {sigma.degree}")
    return _theta(k, sigma)


def theta_image(k: int) -> tuple:
    """``((sigma, theta(k, sigma)), ...)`` over S_{k+1} in lexicographic order."""
    _check_k(k)
    _check_ceiling(k)
    return _theta_image(k)


@lru_cache(maxsize=None)
def _theta_image(k: int) -> tuple:
    return tuple((s, _theta(k, s)) for s in enumerate_group(k + 1, ceiling=k + 1))


def identity_element(k: int) -> GroupElement:
    return theta(k, Permutation.identity(k + 1))


def standard_generators(k: int) -> tuple:
    """``(A, B)`` built from their closed formulas.

    ``A(z) = (1/z_1, ..., 1/z_{k-2})`` and
    ``B(z) = (w/(w-1), w/(w-z_1), ..., w/(w-z_{k-3}))`` with ``w = z_{k-2}``.
    """
    _check_k(k)
    n = k - 2
    A = tuple(FactoredMap.build(k, 1, {LinearFactor.var(j): -1}) for j in range(1, n + 1))
    w = LinearFactor.var(n)
    B = [FactoredMap.build(k, 1, {w: 1, LinearFactor.var_minus_one(n): -1})]
    for j in range(1, n):
        # w - z_j = -(z_j - w)
        B.append(FactoredMap.build(k, -1, {w: 1, LinearFactor.var_diff(j, n): -1}))
    return GroupElement(k, A), GroupElement(k, tuple(B))


@lru_cache(maxsize=None)
def _probe_table(k: int) -> tuple:
    probe = sample_omega_point(k, seed=104729, height=10**6)
    table: dict = {}
    for sigma, g in theta_image(k):
        table.setdefault(g.values(probe), []).append(sigma)
    return probe, table


Evaluator = Callable[[OmegaPoint], Iterable]


def _black_box_values(M: Evaluator, z: OmegaPoint) -> tuple:
    out = M(z)
    if isinstance(out, OmegaPoint):
        out = out.coords
    return tuple(p.to_fraction() for p in out)


def find_permutation(
    k: int, M: Union[GroupElement, Evaluator], confirm_points: int = 4
) -> Union[Permutation, frozenset]:
    """Invert ``theta``.

    ``M`` is a :class:`GroupElement` or any callable sending an
    :class:`OmegaPoint` to its image. Candidates are matched by value at
    one probe point and confirmed by canonical form (for a black box, by
    value at ``confirm_points`` further points). For ``k = 3`` the full
    fibre is returned as a frozenset, since theta_3 has a kernel of order 4.
    """
    _check_k(k)
    if isinstance(M, GroupElement) and M.ambient_k != k:
        raise NotAGroupElement(f"element of G_{M.ambient_k} passed for k={k}")
    probe, table = _probe_table(k)
    if isinstance(M, GroupElement):
        key = M.values(probe)
    else:
        try:
            key = _black_box_values(M, probe)
        except (ValueError, ZeroDivisionError) as exc:
            raise NotAGroupElement(f"evaluator failed at probe point: {exc}") from exc
    matches = []
    for sigma in table.get(key, ()):
        g = _theta(k, sigma)
        if isinstance(M, GroupElement):
            ok = g == M
        else:
            ok = all(
                g.values(z) == _black_box_values(M, z)
                for z in (sample_omega_point(k, seed=7 + t) for t in range(confirm_points))
            )
        if ok:
            matches.append(sigma)
    if not matches:
        raise NotAGroupElement("no permutation realizes the given map")
    if k == 3:
        return frozenset(matches)
    if len(matches) > 1:
        raise AssertionError(f"theta_{k} is not injective: {matches}")
    return matches[0]


def provenance(g: GroupElement) -> Permutation:
    if g.source_perm is not None:
        return g.source_perm
    try:
        found = find_permutation(g.ambient_k, g)
    except NotAGroupElement as exc:
        raise MissingProvenance(f"cannot resolve a permutation for {g}") from exc
    if isinstance(found, frozenset):
        found = min(found)
    return found


def compose_elements(g: GroupElement, h: GroupElement) -> GroupElement:
    """``g ∘ h`` (apply ``h`` first), computed as ``theta(sigma_g sigma_h)``."""
    if g.ambient_k != h.ambient_k:
        raise DegreeMismatch(f"G_{g.ambient_k} vs G_{h.ambient_k}")
    return theta(g.ambient_k, compose(provenance(g), provenance(h)))


def closure(k: int, generators: Iterable[GroupElement]) -> frozenset:
    """The subgroup generated by ``generators``, by breadth-first search."""
    _check_k(k)
    gens = [provenance(g) for g in generators]
    if any(s.degree != k + 1 for s in gens):
        raise DegreeMismatch(f"generators must come from G_{k}")
    start = Permutation.identity(k + 1)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = compose(s, p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return frozenset(_theta(k, s) for s in seen)


def kernel_theta3() -> frozenset:
    """Permutations of S_4 acting trivially on Omega_3."""
    ident = identity_element(3)
    return frozenset(s for s, g in theta_image(3) if g == ident)


def permute_coordinates(g: GroupElement, tau: Permutation) -> GroupElement:
    """``(T_{tau(1)}, ..., T_{tau(k-2)})``."""
    if tau.degree != g.ambient_k - 2:
        raise DegreeMismatch(f"tau must have degree {g.ambient_k - 2}")
    return GroupElement(g.ambient_k, tuple(g.coords[tau(j) - 1] for j in range(1, tau.degree + 1)))


@dataclass(frozen=True)
class Catalog:
    """Every coordinate function of G_k, deduplicated and canonically sorted.

    ``witnesses`` maps each function to one marked-point quadruple whose
    cross-ratio it is.
    """

    ambient_k: int
    functions: tuple
    witnesses: dict = field(default_factory=dict, compare=False, repr=False)

    def __contains__(self, F: FactoredMap) -> bool:
        return F in self.witnesses

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def one_preimage(self, F: FactoredMap) -> FactoredMap:
        """``1 - F`` as a factored map; it is the quadruple with middle slots swapped."""
        a, b, c, d = self.witnesses[F]
        return cross_ratio_symbolic(*(marked_point(i) for i in (a, c, b, d)), self.ambient_k)

    def hyperplane_support(self, F: FactoredMap) -> frozenset:
        """Factors cutting out ``F^{-1}({∞, 0, 1})``."""
        return frozenset(f for f, _ in F.factors) | frozenset(
            f for f, _ in self.one_preimage(F).factors
        )

    def to_json(self) -> list:
        return [format_map(F) for F in self.functions]


def coordinate_catalog(k: int) -> Catalog:
    """``{T_j^sigma : sigma in S_{k+1}, 1 <= j <= k-2}``."""
    _check_k(k)
    _check_ceiling(k)
    return _coordinate_catalog(k)


@lru_cache(maxsize=None)
def _coordinate_catalog(k: int) -> Catalog:
    witnesses: dict = {}
    for sigma, g in theta_image(k):
        s = inverse(sigma)
        for j, F in enumerate(g.coords, 1):
            witnesses.setdefault(F, (s(1), s(2), s(3), s(3 + j)))
    functions = tuple(sorted(witnesses, key=FactoredMap.sort_key))
    return Catalog(k, functions, witnesses)


# Catalog fixtures. Each data file line is a template in the map grammar
# with letter indices (zs, (zi-zs), ...), instantiated over every
# injective assignment of letters to 1..k-2.

_LETTER = re.compile(r"z([a-z])")


def _template_lines(name: str) -> list:
    text = resources.files("torelli").joinpath("data", name).read_text()
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def instantiate_template(template: str, k: int) -> set:
    letters = sorted(set(_LETTER.findall(template)))
    out = set()
    for assignment in itertools.permutations(range(1, k - 1), len(letters)):
        sub = dict(zip(letters, assignment))
        text = _LETTER.sub(lambda m: f"z{sub[m.group(1)]}", template)
        if not re.match(r"-?\d", text):
            text = "1*" + text
        out.add(parse_map(text, k))
    return out


LISTED_FIXTURES = {4: "listed_k4.txt", 5: "listed_k5.txt", 6: "listed_k6.txt"}


def listed_templates(k: int) -> list:
    """Template list that applies to ``k`` (the k = 6 list covers every k >= 6)."""
    _check_k(k)
    if k == 3:
        return _template_lines("listed_k3.txt")
    return _template_lines(LISTED_FIXTURES[min(k, 6)])


@lru_cache(maxsize=None)
def listed_catalog(k: int, cumulative: bool = True) -> frozenset:
    """Listed coordinate functions, instantiated on Omega_k.

    Each list only shows the forms that first appear at its own k, so the
    cumulative catalog joins the lists for every ``3 <= k' <= k``.
    """
    out: set = set()
    levels = range(3, min(k, 6) + 1) if cumulative else (k,)
    for level in levels:
        for template in listed_templates(level):
            out |= instantiate_template(template, k)
    return frozenset(out)


@dataclass(frozen=True)
class CatalogDiff:
    ambient_k: int
    only_computed: tuple
    only_listed: tuple

    @property
    def identical(self) -> bool:
        return not self.only_computed and not self.only_listed

    def to_json(self) -> dict:
        return {
            "k": self.ambient_k,
            "only_computed": [format_map(F) for F in self.only_computed],
            "only_listed": [format_map(F) for F in self.only_listed],
        }


def diff_against_listed(k: int, cumulative: bool = True) -> CatalogDiff:
    computed = set(coordinate_catalog(k).functions)
    listed = set(listed_catalog(k, cumulative))
    key = FactoredMap.sort_key
    return CatalogDiff(
        k,
        tuple(sorted(computed - listed, key=key)),
        tuple(sorted(listed - computed, key=key)),
    )


# Fixture files: one "sigma_cycles<TAB>coordinate tuple" line per element.


def format_fixture_line(g: GroupElement) -> str:
    return f"{format_cycles(provenance(g))}\t{g}"


def parse_fixture_line(line: str, k: int) -> GroupElement:
    try:
        cycles, coords = line.rstrip("\n").split("\t")
    except ValueError:
        raise MalformedInput(f"fixture line needs exactly one tab: {line!r}") from None
    sigma = parse_permutation(cycles, k + 1)
    maps = tuple(parse_map(c.strip(), k) for c in coords.split(COORD_SEP.strip()))
    g = GroupElement(k, maps, source_perm=sigma)
    if theta(k, sigma) != g:
        raise NotAGroupElement(f"fixture line disagrees with theta: {line!r}")
    return g


def group_fixture(k: int) -> str:
    return "".join(format_fixture_line(g) + "\n" for _, g in theta_image(k))


def read_group_fixture(text: str, k: int) -> list:
    return [parse_fixture_line(line, k) for line in text.splitlines() if line.strip()]


def group_element_json(g: GroupElement) -> dict:
    out = {"k": g.ambient_k, "coords": [format_map(c) for c in g.coords]}
    if g.source_perm is not None:
        out["sigma"] = format_cycles(g.source_perm)
    return out


GROUP_ELEMENT_SCHEMA = {
    "type": "object",
    "required": ["k", "coords"],
    "properties": {
        "k": {"type": "integer", "minimum": 3},
        "sigma": {"type": "string", "pattern": r"^(\(\)|(\(\d+( \d+)+\))+)$"},
        "coords": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

CATALOG_SCHEMA = {"type": "array", "items": {"type": "string"}, "uniqueItems": True}

CATALOG_DIFF_SCHEMA = {
    "type": "object",
    "required": ["k", "only_computed", "only_listed"],
    "properties": {
        "k": {"type": "integer"},
        "only_computed": CATALOG_SCHEMA,
        "only_listed": CATALOG_SCHEMA,
    },
    "additionalProperties": False,
}

__all__ = [
    "Catalog",
    "CatalogDiff",
    "GroupElement",
    "closure",
    "compose_elements",
    "coordinate_catalog",
    "diff_against_listed",
    "find_permutation",
    "identity_element",
    "kernel_theta3",
    "listed_catalog",
    "permute_coordinates",
    "standard_generators",
    "theta",
    "theta_image",
]
