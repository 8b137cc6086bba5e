"""Finite abelian groups as direct sums of cyclic groups, and flow alphabets."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence


class GroupError(ValueError):
    pass


def _prime_powers(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True, eq=False)
class FiniteAbelianGroup:
    """Direct sum Z_{m1} + ... + Z_{mr}; the empty sum is the trivial group."""

    moduli: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if any(m < 2 for m in moduli):
            raise GroupError(f"moduli must be >= 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)
        if not self.label:
            object.__setattr__(self, "label", "x".join(f"Z{m}" for m in moduli) or "Z1")

    def __eq__(self, other):
        if not isinstance(other, FiniteAbelianGroup):
            return NotImplemented
        return self.moduli == other.moduli

    def __hash__(self):
        return hash(self.moduli)

    def __repr__(self):
        return self.label

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def elementary_divisors(self) -> tuple[int, ...]:
        return tuple(sorted(q for m in self.moduli for q in _prime_powers(m)))

    def is_isomorphic(self, other: FiniteAbelianGroup) -> bool:
        return self.elementary_divisors == other.elementary_divisors

    @cached_property
    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * len(self.moduli))

    def element(self, *coords: int) -> GroupElement:
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        if len(coords) != len(self.moduli):
            raise GroupError(f"{self.label} elements have {len(self.moduli)} coordinates")
        return GroupElement(self, tuple(c % m for c, m in zip(coords, self.moduli)))

    @cached_property
    def elements(self) -> tuple[GroupElement, ...]:
        """All elements, lexicographic in their coordinates."""
        return tuple(
            GroupElement(self, c) for c in itertools.product(*(range(m) for m in self.moduli))
        )

    # Integer codes (position in ``elements``) and their lookup tables are
    # what the search engines run on.

    def code(self, x: GroupElement) -> int:
        self._check(x)
        c = 0
        for coord, m in zip(x.coords, self.moduli):
            c = c * m + coord
        return c

    @cached_property
    def add_table(self) -> tuple[tuple[int, ...], ...]:
        els = self.elements
        return tuple(tuple(self.code(a + b) for b in els) for a in els)

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        return tuple(self.code(-a) for a in self.elements)

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return a + b

    def neg(self, a: GroupElement) -> GroupElement:
        return -a

    def sum(self, items: Iterable[GroupElement]) -> GroupElement:
        total = self.zero
        for x in items:
            total = total + x
        return total

    def _check(self, x: GroupElement) -> None:
        if not isinstance(x, GroupElement) or x.group != self:
            raise GroupError(f"{x!r} is not an element of {self.label}")


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup = field(repr=False)
    coords: tuple[int, ...]

    def __add__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.group != self.group:
            raise GroupError(f"cannot add elements of {self.group.label} and {other.group.label}")
        return GroupElement(
            self.group,
            tuple((a + b) % m for a, b, m in zip(self.coords, other.coords, self.group.moduli)),
        )

    def __neg__(self) -> GroupElement:
        return GroupElement(self.group, tuple((-a) % m for a, m in zip(self.coords, self.group.moduli)))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def __bool__(self) -> bool:
        return any(self.coords)

    def __repr__(self):
        return f"{self.group.label}{list(self.coords)}"


def group_make(moduli: Sequence[int], label: str = "") -> FiniteAbelianGroup:
    return FiniteAbelianGroup(tuple(moduli), label)


def cyclic(m: int) -> FiniteAbelianGroup:
    return group_make([m])


def roots_of_unity(m: int) -> FiniteAbelianGroup:
    """R_m, carried as the cyclic group of order m (exponent of a primitive root)."""
    return group_make([m], f"R{m}")


def same_order(h1: FiniteAbelianGroup, h2: FiniteAbelianGroup) -> bool:
    return h1.order == h2.order


_GROUP_RE = re.compile(r"^([ZR])(\d+)$")


def parse_group(spec: str) -> FiniteAbelianGroup:
    """Parse ``"Z4"``, ``"Z2xZ2"``, ``"R3"``, ``"Z2xZ3"``."""
    parts = spec.strip().split("x")
    moduli = []
    for part in parts:
        match = _GROUP_RE.match(part.strip())
        if not match:
            raise GroupError(f"unknown group spec {spec!r}")
        moduli.append(int(match.group(2)))
    if len(parts) == 1 and parts[0].startswith("R"):
        return roots_of_unity(moduli[0])
    try:
        return group_make(moduli, spec.strip())
    except GroupError as exc:
        raise GroupError(f"unknown group spec {spec!r}: {exc}") from None


@dataclass(frozen=True)
class FlowAlphabet:
    """A finite set of allowed edge values inside a group, in construction order."""

    group: FiniteAbelianGroup
    elements: tuple[GroupElement, ...]

    def __post_init__(self):
        elements = tuple(dict.fromkeys(self.elements))
        if not elements:
            raise GroupError("a flow alphabet must be nonempty")
        for x in elements:
            self.group._check(x)
        object.__setattr__(self, "elements", elements)

    def __contains__(self, x) -> bool:
        return x in self.element_set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    @cached_property
    def codes(self) -> tuple[int, ...]:
        return tuple(self.group.code(x) for x in self.elements)

    @property
    def closed_under_negation(self) -> bool:
        return all(-x in self.element_set for x in self.elements)

    @property
    def non_elusive(self) -> bool:
        """True when the alphabet is exactly the nonzero elements of its group."""
        return self.element_set == frozenset(x for x in self.group.elements if x)

    def describe(self):
        if self.non_elusive:
            return "nonzero"
        return [list(x.coords) for x in self.elements]


def alphabet_nonzero(h: FiniteAbelianGroup) -> FlowAlphabet:
    return FlowAlphabet(h, tuple(x for x in h.elements if x))


def alphabet_all(h: FiniteAbelianGroup) -> FlowAlphabet:
    return FlowAlphabet(h, h.elements)


def semi_coloring_alphabet(k: int) -> FlowAlphabet:
    """{e_1, ..., e_{k-1}, e_1 + ... + e_{k-1}} inside the (k-1)-fold sum of Z2."""
    if k < 1:
        raise GroupError("k must be >= 1")
    h = group_make([2] * (k - 1), "x".join(["Z2"] * (k - 1)) or "Z1")
    basis = [h.element(tuple(int(i == j) for j in range(k - 1))) for i in range(k - 1)]
    return FlowAlphabet(h, tuple(basis) + (h.element((1,) * (k - 1)),))


@dataclass(frozen=True)
class IntegerAlphabet:
    """Values {+-1, ..., +-(k-1)} inside the integers, for k-flows."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise GroupError("k-flows need k >= 2")

    @cached_property
    def elements(self) -> tuple[int, ...]:
        return tuple(range(-(self.k - 1), 0)) + tuple(range(1, self.k))

    def __contains__(self, x) -> bool:
        return isinstance(x, int) and not isinstance(x, bool) and 0 < abs(x) < self.k

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    closed_under_negation = True
    non_elusive = True

    def describe(self):
        return f"{self.k}-flow"


def alphabet_k_flow(k: int) -> IntegerAlphabet:
    return IntegerAlphabet(k)
