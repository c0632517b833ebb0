"""Finite specification spaces.

A state space is an ordered tuple of distinct labels. A specification is a
nonempty subset of states, stored as a bitmask over the label order. Maps
between specification spaces are element-wise: they are fully determined by
a per-state image table, and act on larger specifications by union, which
makes every map a join homomorphism by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import (
    EmptySpecification,
    NotEndomorphism,
    SpaceMismatch,
    UnknownState,
)


@dataclass(frozen=True)
class StateSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise EmptySpecification("state space needs at least one state")
        seen = set()
        for lab in self.labels:
            if not lab or any(c.isspace() for c in lab):
                raise UnknownState(f"bad state label {lab!r}")
            if lab in seen:
                raise UnknownState(f"duplicate state label {lab!r}")
            seen.add(lab)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownState(f"unknown state {label!r}") from None

    def __repr__(self):
        return f"StateSpace({' '.join(self.labels)})"


def space(*labels: str) -> StateSpace:
    return StateSpace(tuple(labels))


def bits(mask: int) -> Iterable[int]:
    """Indices of the set bits of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Specification:
    space: StateSpace
    mask: int

    def __post_init__(self):
        if self.mask == 0:
            raise EmptySpecification("the empty specification is not representable")
        if self.mask & ~self.space.full_mask:
            raise UnknownState("specification mask has bits outside its space")

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(bits(self.mask))

    def labels(self) -> tuple[str, ...]:
        return tuple(self.space.labels[i] for i in bits(self.mask))

    def is_subset(self, other: "Specification") -> bool:
        _same_space(self.space, other.space)
        return self.mask & ~other.mask == 0

    def __repr__(self):
        return "{" + " ".join(self.labels()) + "}"


def _same_space(a: StateSpace, b: StateSpace):
    if a != b:
        raise SpaceMismatch(f"state spaces differ: {a} vs {b}")


def make_spec(space: StateSpace, names: Iterable[str]) -> Specification:
    mask = 0
    count = 0
    for name in names:
        mask |= 1 << space.index(name)
        count += 1
    if count == 0:
        raise EmptySpecification("a specification needs at least one state")
    return Specification(space, mask)


def full_spec(space: StateSpace) -> Specification:
    return Specification(space, space.full_mask)


def combine(V: Specification, W: Specification) -> Specification:
    """Combined knowledge V ∩ W; Incompatible when the claims contradict."""
    from .errors import Incompatible

    _same_space(V.space, W.space)
    m = V.mask & W.mask
    if m == 0:
        raise Incompatible(f"nothing satisfies both {V} and {W}")
    return Specification(V.space, m)


def forget(V: Specification, W: Specification) -> Specification:
    _same_space(V.space, W.space)
    return Specification(V.space, V.mask | W.mask)


@dataclass(frozen=True)
class SpecMap:
    """Element-wise map given by its singleton-image table.

    table[i] is the image mask (over target) of source state i; every entry
    is nonempty, so images of specifications are nonempty.
    """

    source: StateSpace
    target: StateSpace
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.size:
            raise SpaceMismatch("image table length differs from source size")
        full = self.target.full_mask
        for i, m in enumerate(self.table):
            if m == 0:
                raise EmptySpecification(
                    f"image of state {self.source.labels[i]!r} is empty"
                )
            if m & ~full:
                raise UnknownState("image table has bits outside the target space")

    def __repr__(self):
        parts = []
        for i, m in enumerate(self.table):
            img = ",".join(self.target.labels[j] for j in bits(m))
            parts.append(f"{self.source.labels[i]}->{{{img}}}")
        return " ".join(parts)


def make_map(
    source: StateSpace, target: StateSpace, images: dict[str, Iterable[str]]
) -> SpecMap:
    if set(images) != set(source.labels):
        missing = [lab for lab in source.labels if lab not in images]
        extra = [lab for lab in images if lab not in source.labels]
        raise UnknownState(f"map table mismatch (missing {missing}, extra {extra})")
    table = []
    for lab in source.labels:
        table.append(make_spec(target, images[lab]).mask)
    return SpecMap(source, target, tuple(table))


def endo_map(space: StateSpace, images: dict[str, Iterable[str]]) -> SpecMap:
    return make_map(space, space, images)


def identity_map(space: StateSpace) -> SpecMap:
    return SpecMap(space, space, tuple(1 << i for i in range(space.size)))


def constant_map(space: StateSpace, value: Specification) -> SpecMap:
    _same_space(space, value.space)
    return SpecMap(space, space, (value.mask,) * space.size)


def apply_mask(f: SpecMap, mask: int) -> int:
    table = f.table
    out = 0
    while mask:
        low = mask & -mask
        out |= table[low.bit_length() - 1]
        mask ^= low
    return out


def apply(f: SpecMap, V: Specification) -> Specification:
    _same_space(f.source, V.space)
    return Specification(f.target, apply_mask(f, V.mask))


def compose(f: SpecMap, g: SpecMap) -> SpecMap:
    """f ∘ g (apply g first); element-wise again."""
    if g.target != f.source:
        raise SpaceMismatch("compose: inner target differs from outer source")
    return SpecMap(g.source, f.target, tuple(apply_mask(f, m) for m in g.table))


def maps_equal(f: SpecMap, g: SpecMap) -> bool:
    _same_space(f.source, g.source)
    _same_space(f.target, g.target)
    return f.table == g.table


def is_endo(f: SpecMap) -> bool:
    return f.source == f.target


def is_inflating(f: SpecMap) -> bool:
    if not is_endo(f):
        raise NotEndomorphism("inflating is only defined for endomorphisms")
    return all((m >> i) & 1 for i, m in enumerate(f.table))
