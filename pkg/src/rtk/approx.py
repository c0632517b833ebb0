"""Approximation structures: graded blurrings of a specification space.

An index is a finite partial order of precision labels with a top; a
structure picks one inflating endomap per label.  Verification is
report-valued so callers can show which invariant broke and where.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random

from .errors import NoChainsDeclared, SpaceMismatch, UnknownIndex
from .spec_core import (
    Specification,
    SpecMap,
    apply,
    bits,
    compose,
    identity_map,
)
from .theory import ResourceTheory, is_free
from .embed import GaloisInsertion


@dataclass(frozen=True)
class ChainAddition:
    """A totally ordered run of labels with a partial commutative sum."""

    members: tuple[str, ...]
    sums: tuple[tuple[str, str, str], ...]

    def sum(self, a: str, b: str) -> str | None:
        for x, y, z in self.sums:
            if (x, y) == (a, b) or (x, y) == (b, a):
                return z
        return None


@dataclass(frozen=True)
class ApproxIndex:
    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    max_element: str
    zero_element: str | None = None
    chains: tuple[ChainAddition, ...] = ()

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate index labels")
        known = set(self.elements)
        for a, b in self.leq:
            if a not in known or b not in known:
                raise UnknownIndex(f"order mentions unknown label {a!r} or {b!r}")
        for a in self.elements:
            if (a, a) not in self.leq:
                raise ValueError(f"order not reflexive at {a!r}")
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                raise ValueError(f"order not antisymmetric on {a!r}, {b!r}")
            for c in self.elements:
                if (b, c) in self.leq and (a, c) not in self.leq:
                    raise ValueError(f"order not transitive through {b!r}")
        if self.max_element not in known:
            raise UnknownIndex(f"unknown max label {self.max_element!r}")
        for a in self.elements:
            if (a, self.max_element) not in self.leq:
                raise ValueError(f"{self.max_element!r} is not a maximum: {a!r} escapes")
        if self.zero_element is not None:
            if self.zero_element not in known:
                raise UnknownIndex(f"unknown zero label {self.zero_element!r}")
            for a in self.elements:
                if (self.zero_element, a) not in self.leq:
                    raise ValueError(
                        f"{self.zero_element!r} is not a minimum: {a!r} escapes"
                    )
        for chain in self.chains:
            for m in chain.members:
                if m not in known:
                    raise UnknownIndex(f"chain mentions unknown label {m!r}")
            for a in chain.members:
                for b in chain.members:
                    if (a, b) not in self.leq and (b, a) not in self.leq:
                        raise ValueError(f"chain members {a!r}, {b!r} incomparable")
            seen: dict[tuple[str, str], str] = {}
            for x, y, z in chain.sums:
                if x not in chain.members or y not in chain.members:
                    raise ValueError(f"sum {x!r}+{y!r} uses labels outside the chain")
                if z not in chain.members:
                    raise ValueError(f"sum {x!r}+{y!r}={z!r} leaves the chain")
                prev = seen.get((y, x))
                if prev is not None and prev != z:
                    raise ValueError(f"sum on {x!r}, {y!r} is not commutative")
                seen[(x, y)] = z

    def holds(self, a: str, b: str) -> bool:
        if a not in self.elements or b not in self.elements:
            raise UnknownIndex(f"unknown label {a!r} or {b!r}")
        return (a, b) in self.leq


def _close_order(elements: tuple[str, ...], pairs) -> frozenset[tuple[str, str]]:
    rel = {(a, a) for a in elements}
    rel.update(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


def approx_index(
    elements,
    order,
    max_element: str,
    *,
    zero=None,
    chains=(),
) -> ApproxIndex:
    """Build an index from covering pairs; the closure is computed here."""
    elements = tuple(elements)
    known = set(elements)
    for a, b in order:
        if a not in known or b not in known:
            raise UnknownIndex(f"order mentions unknown label {a!r} or {b!r}")
    built = []
    for members, sums in chains:
        built.append(ChainAddition(tuple(members), tuple(tuple(s) for s in sums)))
    return ApproxIndex(
        elements,
        _close_order(elements, order),
        max_element,
        zero,
        tuple(built),
    )


@dataclass(frozen=True)
class ApproximationStructure:
    index: ApproxIndex
    family: dict[str, SpecMap] = field(compare=False)

    def __post_init__(self):
        for eps in self.family:
            if eps not in self.index.elements:
                raise UnknownIndex(f"family keyed by unknown label {eps!r}")
        for eps in self.index.elements:
            if eps not in self.family:
                raise ValueError(f"no map for label {eps!r}")
        spaces = {f.source for f in self.family.values()}
        spaces |= {f.target for f in self.family.values()}
        if len(spaces) != 1:
            raise SpaceMismatch("family maps must all be endomaps of one space")

    @property
    def space(self):
        return next(iter(self.family.values())).source


@dataclass(frozen=True)
class StructureReport:
    ok: bool
    attainable: bool
    failures: tuple[str, ...]

    def __bool__(self):
        return self.ok


def verify_structure(s: ApproximationStructure) -> StructureReport:
    """Inflating, monotone, saturating; attainability is reported apart."""
    space = s.space
    failures = []
    for eps in s.index.elements:
        f = s.family[eps]
        bad = next(
            (i for i in range(space.size) if not (1 << i) & f.table[i]), None
        )
        if bad is not None:
            failures.append(f"map for {eps!r} deflates state {space.labels[bad]!r}")
            break
    for a in s.index.elements:
        done = False
        for b in s.index.elements:
            if a == b or not s.index.holds(a, b):
                continue
            fa, fb = s.family[a], s.family[b]
            for i in range(space.size):
                if fa.table[i] & ~fb.table[i]:
                    failures.append(
                        f"{a!r} <= {b!r} but state {space.labels[i]!r} blurs wider"
                    )
                    done = True
                    break
            if done:
                break
        if done:
            break
    top = s.family[s.index.max_element]
    bad = next((i for i in range(space.size) if top.table[i] != space.full_mask), None)
    if bad is not None:
        failures.append(
            f"top label does not saturate from state {space.labels[bad]!r}"
        )
    attainable = False
    if s.index.zero_element is not None:
        if s.family[s.index.zero_element].table == identity_map(space).table:
            attainable = True
        else:
            failures.append("zero label's map is not the identity")
    return StructureReport(not failures, attainable, tuple(failures))


def approximate(s: ApproximationStructure, V: Specification, eps: str) -> Specification:
    if eps not in s.index.elements:
        raise UnknownIndex(f"unknown label {eps!r}")
    if V.space != s.space:
        raise SpaceMismatch("specification lives on a different space")
    return apply(s.family[eps], V)


@dataclass(frozen=True)
class TriangleReport:
    ok: bool
    failures: tuple[str, ...]
    pairs_checked: int

    def __bool__(self):
        return self.ok


def check_triangle(
    s: ApproximationStructure, *, seed: int = 0, samples: int = 200
) -> TriangleReport:
    """Blur twice along a chain and stay inside the summed blur.

    Sums missing from a chain's table clamp to the top label.  A seeded
    pass also exercises the containment corollary on constructed triples.
    """
    if not s.index.chains:
        raise NoChainsDeclared("the index declares no chains with addition")
    space = s.space
    failures = []
    pairs = 0
    for chain in s.index.chains:
        for a in chain.members:
            for b in chain.members:
                total = chain.sum(a, b) or s.index.max_element
                pairs += 1
                fa, fb, ft = s.family[a], s.family[b], s.family[total]
                for i in range(space.size):
                    twice = 0
                    for j in bits(fa.table[i]):
                        twice |= fb.table[j]
                    if twice & ~ft.table[i]:
                        failures.append(
                            f"({a!r} then {b!r}) escapes {total!r} "
                            f"from state {space.labels[i]!r}"
                        )
                        break
    rng = Random(seed)
    members = [m for chain in s.index.chains for m in chain.members]
    for _ in range(samples):
        if failures:
            break
        a, b = rng.choice(members), rng.choice(members)
        chain = next(
            (c for c in s.index.chains if a in c.members and b in c.members), None
        )
        if chain is None:
            continue
        total = chain.sum(a, b) or s.index.max_element
        w_mask = rng.randrange(1, 1 << space.size)
        W = Specification(space, w_mask)
        blurred = approximate(s, W, a)
        v_mask = _random_submask(rng, blurred.mask)
        V = Specification(space, v_mask)
        tilde = _random_submask(rng, approximate(s, V, b).mask)
        if tilde & ~approximate(s, W, total).mask:
            failures.append(
                f"containment corollary fails for {a!r}+{b!r} on mask {w_mask:#x}"
            )
    return TriangleReport(not failures, tuple(failures), pairs)


def _random_submask(rng: Random, mask: int) -> int:
    picks = [1 << i for i in bits(mask)]
    keep = rng.randrange(1, 1 << len(picks))
    out = 0
    for k, bit in enumerate(picks):
        if keep & (1 << k):
            out |= bit
    return out


def approximation_space(s: ApproximationStructure) -> tuple[Specification, ...]:
    """All blurs of singletons, first occurrence kept."""
    space = s.space
    seen = set()
    out = []
    for i in range(space.size):
        for eps in s.index.elements:
            mask = s.family[eps].table[i]
            if mask not in seen:
                seen.add(mask)
                out.append(Specification(space, mask))
    return tuple(out)


def is_stable(T: ResourceTheory, s: ApproximationStructure) -> bool:
    """Transformations never escape the blur: f(V^eps) inside f(V)^eps."""
    if T.space != s.space:
        raise SpaceMismatch("structure lives on a different space")
    for f in T.monoid.elements:
        for eps in s.index.elements:
            blur = s.family[eps]
            for i in range(T.space.size):
                moved = 0
                for j in bits(blur.table[i]):
                    moved |= f.table[j]
                after = 0
                for j in bits(f.table[i]):
                    after |= blur.table[j]
                if moved & ~after:
                    return False
    return True


def is_robust(
    T: ResourceTheory, s: ApproximationStructure, V: Specification, eps: str
) -> bool:
    """Still not free after blurring by eps."""
    return not is_free(T, approximate(s, V, eps))


@dataclass(frozen=True)
class ReducedStructure:
    structure: ApproximationStructure
    collapsed: tuple[tuple[str, str], ...]
    report: StructureReport


def reduce_structure(
    s: ApproximationStructure, ins: GaloisInsertion
) -> ReducedStructure:
    """Push each blur through the insertion onto the small space."""
    if ins.big != s.space:
        raise SpaceMismatch("insertion embeds a different space")
    family = {
        eps: compose(ins.h, compose(s.family[eps], ins.e))
        for eps in s.index.elements
    }
    collapsed = []
    labels = s.index.elements
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            if s.family[a].table != s.family[b].table:
                if family[a].table == family[b].table:
                    collapsed.append((a, b))
    reduced = ApproximationStructure(s.index, family)
    return ReducedStructure(reduced, tuple(collapsed), verify_structure(reduced))
