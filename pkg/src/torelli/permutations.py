"""Permutations of ``{1, ..., n}`` in one-line notation."""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from typing import Iterator

from .errors import DegreeMismatch, DegreeTooLarge, MalformedInput, OutOfRange, RepeatedEntry

DEFAULT_CEILING = 7


def enumeration_ceiling() -> int:
    """Largest k for which S_{k+1} may be enumerated (env ``TORELLI_CEILING``)."""
    raw = os.environ.get("TORELLI_CEILING")
    if raw is None:
        return DEFAULT_CEILING
    try:
        return int(raw)
    except ValueError:
        raise MalformedInput(f"TORELLI_CEILING must be an integer, got {raw!r}") from None


@dataclass(frozen=True, order=True)
class Permutation:
    """``images[i - 1] == sigma(i)``."""

    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{list(images)} is not a permutation")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(1, degree + 1)))

    @classmethod
    def from_cycles(cls, cycles, degree: int) -> "Permutation":
        images = list(range(1, degree + 1))
        seen = set()
        for cycle in cycles:
            for x in cycle:
                if not 1 <= x <= degree:
                    raise OutOfRange(f"{x} is outside 1..{degree}")
                if x in seen:
                    raise RepeatedEntry(f"{x} appears twice")
                seen.add(x)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a - 1] = b
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return inverse(self)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, 1))

    def order(self) -> int:
        p, n = self, 1
        while not p.is_identity():
            p, n = compose(p, self), n + 1
        return n

    def cycles(self) -> list:
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen or self(start) == start:
                continue
            cycle = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self(x)
            out.append(tuple(cycle))
        return out

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)}, degree={self.degree})"


def compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """``sigma ∘ tau``: apply ``tau`` first."""
    if sigma.degree != tau.degree:
        raise DegreeMismatch(f"degrees {sigma.degree} and {tau.degree}")
    return Permutation(tuple(sigma.images[t - 1] for t in tau.images))


def inverse(sigma: Permutation) -> Permutation:
    out = [0] * sigma.degree
    for i, v in enumerate(sigma.images, 1):
        out[v - 1] = i
    return Permutation(tuple(out))


_CYCLE = re.compile(r"\(([^()]*)\)")


def _ints(body: str, text: str) -> list:
    entries = [e for e in re.split(r"[\s,]+", body.strip()) if e]
    try:
        return [int(e) for e in entries]
    except ValueError:
        raise MalformedInput(f"non-integer entry in {text!r}") from None


def parse_permutation(text: str, degree: int) -> Permutation:
    """Parse ``"(2 3)(4 5)"``, ``"(1)(2,3)"``, ``"()"`` or one-line ``"[2,1,3]"``."""
    s = text.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise MalformedInput(f"unterminated one-line notation {text!r}")
        images = _ints(s[1:-1], text)
        if len(images) != degree:
            raise MalformedInput(f"{text!r} has {len(images)} entries, expected {degree}")
        for x in images:
            if not 1 <= x <= degree:
                raise OutOfRange(f"{x} is outside 1..{degree}")
        if len(set(images)) != len(images):
            raise RepeatedEntry(f"repeated image in {text!r}")
        return Permutation(tuple(images))
    if _CYCLE.sub("", s).strip():
        raise MalformedInput(f"cannot parse permutation {text!r}")
    cycles = [_ints(body, text) for body in _CYCLE.findall(s)]
    return Permutation.from_cycles(cycles, degree)


def format_cycles(sigma: Permutation) -> str:
    cycles = sigma.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def enumerate_group(degree: int, ceiling: int = None) -> Iterator[Permutation]:
    """All ``degree!`` permutations, lexicographic in one-line notation."""
    if ceiling is None:
        ceiling = enumeration_ceiling() + 1
    if degree > ceiling:
        raise DegreeTooLarge(f"S_{degree} exceeds the enumeration ceiling S_{ceiling}")
    for images in itertools.permutations(range(1, degree + 1)):
        yield Permutation(images)
