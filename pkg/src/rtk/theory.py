"""Resource theories: monoid closure, reachability, quotients, free resources."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CapExceeded, SpaceMismatch
from .spec_core import (
    Specification,
    SpecMap,
    StateSpace,
    apply,
    apply_mask,
    full_spec,
    identity_map,
    maps_equal,
)

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class TransformationMonoid:
    space: StateSpace
    elements: tuple[SpecMap, ...]
    identity: SpecMap

    def __len__(self):
        return len(self.elements)

    def contains(self, f: SpecMap) -> bool:
        return f.source == self.space and f.target == self.space and any(
            f.table == g.table for g in self.elements
        )


@dataclass(frozen=True)
class ResourceTheory:
    space: StateSpace
    monoid: TransformationMonoid

    def __post_init__(self):
        if self.monoid.space != self.space:
            raise SpaceMismatch("theory space differs from its monoid's space")


def close_monoid(
    generators: Iterable[SpecMap],
    cap: int = DEFAULT_CAP,
    *,
    space: StateSpace | None = None,
) -> TransformationMonoid:
    """Least composition-closed set containing the generators and identity.

    Element order is canonical: generators in argument order, then the
    identity if new, then products in discovery order.
    """
    gens = list(generators)
    if space is None:
        if not gens:
            raise SpaceMismatch("close_monoid with no generators needs a space")
        space = gens[0].source
    if cap < 1:
        raise CapExceeded("cap must be at least 1", 0)
    elems: list[SpecMap] = []
    seen: dict[tuple[int, ...], int] = {}

    def add(f: SpecMap) -> bool:
        if f.source != space or f.target != space:
            raise SpaceMismatch("all generators must be endomorphisms of one space")
        if f.table in seen:
            return False
        if len(elems) + 1 > cap:
            raise CapExceeded(
                f"monoid closure would exceed cap {cap}", len(elems) + 1
            )
        seen[f.table] = len(elems)
        elems.append(f)
        return True

    for g in gens:
        add(g)
    ident = identity_map(space)
    add(ident)

    # Work-list saturation: pair every element with every earlier-or-equal one.
    i = 0
    while i < len(elems):
        f = elems[i]
        for j in range(i + 1):
            g = elems[j]
            fg = tuple(apply_mask(f, m) for m in g.table)
            if fg not in seen:
                add(SpecMap(space, space, fg))
            gf = tuple(apply_mask(g, m) for m in f.table)
            if gf not in seen:
                add(SpecMap(space, space, gf))
        i += 1
    return TransformationMonoid(space, tuple(elems), elems[seen[ident.table]])


def monoid_from_elements(
    space: StateSpace, elements: Sequence[SpecMap]
) -> TransformationMonoid:
    """Wrap an already-closed element list, preserving its order."""
    ident = identity_map(space)
    elems = list(elements)
    if not any(e.table == ident.table for e in elems):
        elems.append(ident)
    return TransformationMonoid(space, tuple(elems), ident)


@dataclass(frozen=True)
class ReachWitness:
    found: bool
    map: SpecMap | None = None

    def __bool__(self):
        return self.found


def reaches(T: ResourceTheory, V: Specification, W: Specification) -> ReachWitness:
    """First monoid element f (canonical order) with f(V) ⊆ W, if any."""
    if V.space != T.space or W.space != T.space:
        raise SpaceMismatch("reaches: specifications must live on the theory space")
    not_W = ~W.mask
    for f in T.monoid.elements:
        if apply_mask(f, V.mask) & not_W == 0:
            return ReachWitness(True, f)
    return ReachWitness(False, None)


def is_free(T: ResourceTheory, V: Specification) -> bool:
    return reaches(T, full_spec(T.space), V).found


@dataclass(frozen=True)
class Quotient:
    """Mutual-convertibility classes of the candidates plus Ω, with the order
    induced by reachability; free_class indexes the top class [Ω]."""

    classes: tuple[tuple[Specification, ...], ...]
    leq: frozenset[tuple[int, int]]
    free_class: int

    def class_label(self, i: int) -> str:
        return "[" + repr(self.classes[i][0]).strip() + "]"


def quotient(T: ResourceTheory, candidates: Iterable[Specification]) -> Quotient:
    specs: list[Specification] = []
    seen: set[int] = set()
    for V in candidates:
        if V.space != T.space:
            raise SpaceMismatch("quotient: candidate on the wrong space")
        if V.mask not in seen:
            seen.add(V.mask)
            specs.append(V)
    omega = full_spec(T.space)
    if omega.mask not in seen:
        specs.append(omega)

    n = len(specs)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            reach[i][j] = reaches(T, specs[i], specs[j]).found

    class_of: list[int] = [-1] * n
    classes: list[list[Specification]] = []
    for i in range(n):
        if class_of[i] >= 0:
            continue
        members = [i]
        class_of[i] = len(classes)
        for j in range(i + 1, n):
            if class_of[j] < 0 and reach[i][j] and reach[j][i]:
                class_of[j] = len(classes)
                members.append(j)
        classes.append([specs[k] for k in members])

    leq = set()
    for i in range(n):
        for j in range(n):
            if reach[i][j]:
                leq.add((class_of[i], class_of[j]))
    free_class = next(
        class_of[idx] for idx, V in enumerate(specs) if V.mask == omega.mask
    )
    return Quotient(
        tuple(tuple(c) for c in classes), frozenset(leq), free_class
    )


def is_conserved(T: ResourceTheory, V: Specification) -> bool:
    if V.space != T.space:
        raise SpaceMismatch("is_conserved: specification on the wrong space")
    return all(apply_mask(f, V.mask) == V.mask for f in T.monoid.elements)


def resource_independent_maps(
    T: ResourceTheory,
) -> tuple[tuple[SpecMap, Specification], ...]:
    """Maps whose image ignores the input: f(W) = f(Ω) for every W.

    Element-wise, that is exactly a constant singleton-image table; the
    constant value is a free resource (f itself witnesses Ω → V).
    """
    out = []
    for f in T.monoid.elements:
        first = f.table[0]
        if all(m == first for m in f.table):
            out.append((f, Specification(T.space, first)))
    return tuple(out)


def combine_theories(T: ResourceTheory, F: ResourceTheory) -> ResourceTheory:
    if T.space != F.space:
        raise SpaceMismatch("combined theories need one shared state space")
    other = {g.table for g in F.monoid.elements}
    elems = tuple(f for f in T.monoid.elements if f.table in other)
    monoid = TransformationMonoid(T.space, elems, T.monoid.identity)
    assert any(maps_equal(f, T.monoid.identity) for f in elems)
    return ResourceTheory(T.space, monoid)
