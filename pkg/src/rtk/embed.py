"""Lumpings, Galois insertions, and the reduced theories they induce.

A lumping coarsens every specification to the least one its equivalence
structure can express: an idempotent inflating endomorphism.  A Galois
insertion (e, h) realizes the same coarsening through a smaller space:
h collapses, e re-embeds, h.e = id, and e.h is the lumping back on the
big space.  e is the upper adjoint throughout:

    Z subset-of e(V)  iff  h(Z) subset-of V
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    EmptyIntersection,
    IncompatibleSideResource,
    InternalInconsistency,
    LumpingOrderViolated,
    NotEndomorphism,
    NotOrderEmbedding,
    NotSubmonoid,
    SpaceMismatch,
)
from .spec_core import (
    SpecMap,
    Specification,
    StateSpace,
    apply_mask,
    bits,
    compose,
    identity_map,
    is_endo,
)
from .theory import (
    DEFAULT_CAP,
    ResourceTheory,
    TransformationMonoid,
    close_monoid,
)

# Exhaustive verification bounds: 2^small x 2^small pairs for the order
# embedding, 2^small x 2^big for the adjunction.
_EXHAUSTIVE_SMALL = 5
_EXHAUSTIVE_BIG = 12
_SAMPLES = 10_000


@dataclass(frozen=True)
class LumpingReport:
    ok: bool
    failure: str | None = None

    def __bool__(self):
        return self.ok


def verify_lumping(f: SpecMap) -> LumpingReport:
    """Check that f is inflating and idempotent, naming the first violation."""
    if not is_endo(f):
        raise NotEndomorphism(
            f"a lumping must be an endomorphism, got {f.source!r} -> {f.target!r}"
        )
    for i, image in enumerate(f.table):
        if image & (1 << i) == 0:
            return LumpingReport(False, f"not inflating at {f.source.labels[i]}")
    for i, image in enumerate(f.table):
        if apply_mask(f, image) != image:
            return LumpingReport(False, f"not idempotent at {f.source.labels[i]}")
    return LumpingReport(True)


@dataclass(frozen=True)
class Lumping:
    map: SpecMap

    @property
    def space(self) -> StateSpace:
        return self.map.source


def as_lumping(f: SpecMap) -> Lumping:
    report = verify_lumping(f)
    if not report:
        raise ValueError(f"not a lumping: {report.failure}")
    return Lumping(f)


@dataclass(frozen=True)
class GaloisInsertion:
    small: StateSpace
    e: SpecMap
    h: SpecMap

    def __post_init__(self):
        if self.e.source != self.small or self.h.target != self.small:
            raise SpaceMismatch("e must leave and h must re-enter the small space")
        if self.e.target != self.h.source:
            raise SpaceMismatch("e and h must share the big space")

    @property
    def big(self) -> StateSpace:
        return self.e.target

    def lumping(self) -> SpecMap:
        return compose(self.e, self.h)


@dataclass(frozen=True)
class InsertionReport:
    ok: bool
    failures: tuple[str, ...]
    exhaustive: bool
    pairs_checked: int
    seed: int | None = None

    def __bool__(self):
        return self.ok


def verify_insertion(
    ins: GaloisInsertion | SpecMap,
    h: SpecMap | None = None,
    *,
    seed: int = 0,
    samples: int = _SAMPLES,
) -> InsertionReport:
    """Check the insertion laws for (e, h).

    h must be single-valued on states, h.e must be the identity, e must
    be an order embedding, and the adjunction must hold.  Exhaustive on
    small spaces, otherwise a seeded sample (seed lands in the report).
    """
    if h is None:
        assert isinstance(ins, GaloisInsertion)
        e, h = ins.e, ins.h
    else:
        e = ins
    if e.source != h.target or e.target != h.source:
        raise SpaceMismatch("e and h do not connect the same two spaces")
    small, big = e.source, e.target
    failures: list[str] = []

    for i, image in enumerate(h.table):
        if image.bit_count() != 1:
            failures.append(f"h is not single-valued at {big.labels[i]}")
            break
    he = compose(h, e)
    for i in range(small.size):
        if he.table[i] != 1 << i:
            failures.append(f"h.e is not the identity at {small.labels[i]}")
            break

    exhaustive = small.size <= _EXHAUSTIVE_SMALL and big.size <= _EXHAUSTIVE_BIG
    pairs = 0

    def embeds(v: int, w: int, ev: int, ew: int) -> str | None:
        if (ev | ew == ew) != (v | w == w):
            return (
                f"e is not an order embedding on {Specification(small, v)!r}"
                f" vs {Specification(small, w)!r}"
            )
        return None

    def adjoins(v: int, z: int, ev: int, hz: int) -> str | None:
        if (z | ev == ev) != (hz | v == v):
            return (
                f"adjunction fails on {Specification(small, v)!r}"
                f" vs {Specification(big, z)!r}"
            )
        return None

    if exhaustive:
        e_of = [apply_mask(e, v) for v in range(1 << small.size)]
        h_of = [apply_mask(h, z) for z in range(1 << big.size)]
        for v in range(1, 1 << small.size):
            for w in range(1, 1 << small.size):
                pairs += 1
                bad = embeds(v, w, e_of[v], e_of[w])
                if bad:
                    failures.append(bad)
                    break
            if bad:
                break
        for v in range(1, 1 << small.size):
            found = None
            for z in range(1, 1 << big.size):
                pairs += 1
                found = adjoins(v, z, e_of[v], h_of[z])
                if found:
                    failures.append(found)
                    break
            if found:
                break
        report_seed = None
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            v = rng.randrange(1, 1 << small.size)
            w = rng.randrange(1, 1 << small.size)
            pairs += 1
            bad = embeds(v, w, apply_mask(e, v), apply_mask(e, w))
            if bad:
                failures.append(bad)
                break
        for _ in range(samples):
            v = rng.randrange(1, 1 << small.size)
            z = rng.randrange(1, 1 << big.size)
            pairs += 1
            bad = adjoins(v, z, apply_mask(e, v), apply_mask(h, z))
            if bad:
                failures.append(bad)
                break
        report_seed = seed
    return InsertionReport(not failures, tuple(failures), exhaustive, pairs, report_seed)


def _class_labels(big: StateSpace, values: list[int]) -> list[str]:
    labels = ["".join(big.labels[m] for m in bits(v)) for v in values]
    if len(set(labels)) < len(labels):
        labels = ["+".join(big.labels[m] for m in bits(v)) for v in values]
    used: set[str] = set()
    out = []
    for lab in labels:
        while lab in used:
            lab += "'"
        used.add(lab)
        out.append(lab)
    return out


def insertion_from_lumping(lam: Lumping) -> GaloisInsertion:
    """Reduced space whose states are the lumping's singleton classes.

    Only partition-style lumpings admit one: when two states' class
    values overlap without coinciding, the would-be e already fails to
    order-embed on those two classes, so we refuse.
    """
    f = lam.map
    big = f.source
    values: list[int] = []
    class_of: list[int] = []
    for i, v in enumerate(f.table):
        for m in bits(v):
            if f.table[m] != v:
                raise NotOrderEmbedding(
                    f"classes of {big.labels[i]} and {big.labels[m]}"
                    " overlap without coinciding"
                )
        if v in values:
            class_of.append(values.index(v))
        else:
            class_of.append(len(values))
            values.append(v)
    small = StateSpace(tuple(_class_labels(big, values)))
    e = SpecMap(small, big, tuple(values))
    h = SpecMap(big, small, tuple(1 << c for c in class_of))
    assert compose(e, h).table == f.table
    return GaloisInsertion(small, e, h)


def identity_insertion(space: StateSpace) -> GaloisInsertion:
    ident = identity_map(space)
    return GaloisInsertion(space, ident, ident)


@dataclass(frozen=True)
class Embedding:
    map: SpecMap
    kind: str  # "extensive" | "intensive" | "general"
    adjoint: SpecMap | None = None


def _order_embedding_violation(e: SpecMap, seed: int = 0) -> str | None:
    """First pair violating e(V) <= e(W) iff V <= W, or None.

    Exhaustive when the source is small; otherwise the necessary
    singleton condition plus a seeded sample.
    """
    small = e.source
    if small.size <= _EXHAUSTIVE_SMALL:
        e_of = [apply_mask(e, v) for v in range(1 << small.size)]
        for v in range(1, 1 << small.size):
            for w in range(1, 1 << small.size):
                if (e_of[v] | e_of[w] == e_of[w]) != (v | w == w):
                    return (
                        f"{Specification(small, v)!r} vs {Specification(small, w)!r}"
                    )
        return None
    t = e.table
    for i in range(small.size):
        for j in range(small.size):
            if i != j and t[i] | t[j] == t[j]:
                return f"{{{small.labels[i]}}} vs {{{small.labels[j]}}}"
    rng = random.Random(seed)
    for _ in range(_SAMPLES):
        v = rng.randrange(1, 1 << small.size)
        w = rng.randrange(1, 1 << small.size)
        ev, ew = apply_mask(e, v), apply_mask(e, w)
        if (ev | ew == ew) != (v | w == w):
            return f"{Specification(small, v)!r} vs {Specification(small, w)!r}"
    return None


def intensive_adjoint(e: SpecMap) -> SpecMap | None:
    """The collapse h making (e, h) an insertion, or None.

    e is intensive exactly when every big state lies in the image of a
    single small state; the candidate h reads that owner off and is then
    checked against the full insertion laws.
    """
    small, big = e.source, e.target
    owner: list[int | None] = [None] * big.size
    for i, image in enumerate(e.table):
        for m in bits(image):
            if owner[m] is not None and owner[m] != i:
                return None
            owner[m] = i
    if any(o is None for o in owner):
        return None
    h = SpecMap(big, small, tuple(1 << o for o in owner))
    if not verify_insertion(e, h):
        return None
    return h


def classify_embedding(e: SpecMap) -> Embedding:
    """Sort an order embedding into extensive / intensive / general.

    A bijective relabeling is both; extensive wins the tie.
    """
    bad = _order_embedding_violation(e)
    if bad is not None:
        raise NotOrderEmbedding(f"not an order embedding: {bad}")
    if all(image.bit_count() == 1 for image in e.table):
        return Embedding(e, "extensive")
    h = intensive_adjoint(e)
    if h is not None:
        return Embedding(e, "intensive", h)
    return Embedding(e, "general")


@dataclass(frozen=True)
class Decomposition:
    outer: SpecMap
    inner: SpecMap

    @property
    def middle(self) -> StateSpace:
        return self.inner.target


def decompose_embedding(e: SpecMap, *, extensive_first: bool = False) -> Decomposition:
    """Factor e through a middle space, compose(outer, inner) == e.

    Default inner collapse is intensive and outer inclusion extensive;
    with extensive_first the roles swap (relabel first, then collapse
    into the big space).  Needs pairwise disjoint singleton images: an
    overlap leaves no middle space in either order.
    """
    small, big = e.source, e.target
    seen = 0
    for i, image in enumerate(e.table):
        if seen & image:
            clash = next(m for m in bits(seen & image))
            raise NotOrderEmbedding(
                f"singleton images overlap at {big.labels[clash]};"
                " no extensive/intensive factorization exists"
            )
        seen |= image
    if not extensive_first:
        hit = list(bits(seen))
        mid = StateSpace(tuple(big.labels[m] for m in hit))
        pos = {m: p for p, m in enumerate(hit)}
        inner = SpecMap(
            small,
            mid,
            tuple(
                sum(1 << pos[m] for m in bits(image)) for image in e.table
            ),
        )
        outer = SpecMap(mid, big, tuple(1 << m for m in hit))
    else:
        unhit = [m for m in range(big.size) if not seen >> m & 1]
        used: set[str] = set()
        labels = []
        for lab in list(small.labels) + [big.labels[m] for m in unhit]:
            while lab in used:
                lab += "'"
            used.add(lab)
            labels.append(lab)
        mid = StateSpace(tuple(labels))
        inner = SpecMap(small, mid, tuple(1 << i for i in range(small.size)))
        outer = SpecMap(mid, big, e.table + tuple(1 << m for m in unhit))
    assert compose(outer, inner).table == e.table
    return Decomposition(outer, inner)


def nest(
    inner: GaloisInsertion, outer: GaloisInsertion, *, mode: str = "compose"
) -> GaloisInsertion:
    """Stack two insertions; inner always owns the smallest space.

    compose: inner goes A -> AB, outer AB -> big; the result is A -> big.
    middle: both go into the same big space; the result inserts inner's
    space into outer's, provided outer's lumping refines inner's
    pointwise (LumpingOrderViolated otherwise).
    """
    if mode == "compose":
        if inner.big != outer.small:
            raise SpaceMismatch("inner's big space must be outer's small space")
        e = compose(outer.e, inner.e)
        h = compose(inner.h, outer.h)
    elif mode == "middle":
        if inner.big != outer.big:
            raise SpaceMismatch("both insertions must share the big space")
        lam_in = inner.lumping().table
        lam_out = outer.lumping().table
        for s in range(inner.big.size):
            if lam_out[s] | lam_in[s] != lam_in[s]:
                raise LumpingOrderViolated(
                    f"outer lumping does not refine inner's at"
                    f" {inner.big.labels[s]}"
                )
        e = compose(outer.h, inner.e)
        h = compose(inner.h, outer.e)
    else:
        raise ValueError(f"unknown nest mode: {mode}")
    ins = GaloisInsertion(e.source, e, h)
    report = verify_insertion(ins)
    if not report:
        raise InternalInconsistency(
            f"nested maps break the insertion laws: {report.failures[0]}"
        )
    return ins


def is_local(ins: GaloisInsertion, V: Specification) -> bool:
    """True when V lies in the image of e, i.e. the lumping fixes it."""
    if V.space != ins.big:
        raise SpaceMismatch("V must live on the insertion's big space")
    return apply_mask(ins.lumping(), V.mask) == V.mask


def restrict_theory(
    T: ResourceTheory,
    A: TransformationMonoid,
    ins: GaloisInsertion,
    cap: int = DEFAULT_CAP,
) -> ResourceTheory:
    """Pull a submonoid of T down to the small space: close {h.f.e}."""
    if A.space != T.space:
        raise SpaceMismatch("A must act on the theory's space")
    if ins.big != T.space:
        raise SpaceMismatch("the insertion must target the theory's space")
    for f in A.elements:
        if not T.monoid.contains(f):
            raise NotSubmonoid(f"{f!r} is not in the theory's monoid")
    induced = []
    seen: set[tuple[int, ...]] = set()
    for f in A.elements:
        g = compose(ins.h, compose(f, ins.e))
        if g.table not in seen:
            seen.add(g.table)
            induced.append(g)
    return ResourceTheory(ins.small, close_monoid(induced, cap, space=ins.small))


def effective_theory(
    T: ResourceTheory,
    ins: GaloisInsertion,
    K: Specification,
    cap: int = DEFAULT_CAP,
) -> ResourceTheory:
    """Small-space theory seen while a side resource K is held.

    Each f in T induces V -> h(f(e(V) & K)).  K must be compatible with
    the insertion: h(K) has to cover the whole small space.
    """
    if ins.big != T.space:
        raise SpaceMismatch("the insertion must target the theory's space")
    if K.space != T.space:
        raise SpaceMismatch("K must live on the theory's space")
    if apply_mask(ins.h, K.mask) != ins.small.full_mask:
        missing = ins.small.full_mask & ~apply_mask(ins.h, K.mask)
        raise IncompatibleSideResource(
            f"side resource misses {Specification(ins.small, missing)!r}"
        )
    induced = []
    seen: set[tuple[int, ...]] = set()
    for f in T.monoid.elements:
        table = []
        for i in range(ins.small.size):
            cut = ins.e.table[i] & K.mask
            if cut == 0:
                raise EmptyIntersection(
                    f"e({{{ins.small.labels[i]}}}) misses the side resource"
                )
            table.append(apply_mask(ins.h, apply_mask(f, cut)))
        g = SpecMap(ins.small, ins.small, tuple(table))
        if g.table not in seen:
            seen.add(g.table)
            induced.append(g)
    return ResourceTheory(ins.small, close_monoid(induced, cap, space=ins.small))


@dataclass(frozen=True)
class GeneratedLumping:
    lumping: Lumping
    iterations: int


def _square(table: Sequence[int]) -> tuple[int, ...]:
    out = []
    for v in table:
        m = 0
        for j in bits(v):
            m |= table[j]
        out.append(m)
    return tuple(out)


def lumping_from_maps(maps: Sequence[SpecMap]) -> GeneratedLumping:
    """Least lumping identifying states no map in the family can tell apart.

    Per map, two states are lumped when their images coincide; the union
    of those relations is squared to idempotence, counting rounds.
    """
    fs = list(maps)
    if not fs:
        raise SpaceMismatch("need at least one map to generate a lumping")
    sp = fs[0].source
    for f in fs:
        if f.source != sp:
            raise SpaceMismatch("all maps must share a source space")
    table = []
    for i in range(sp.size):
        m = 1 << i
        for f in fs:
            for j in range(sp.size):
                if f.table[j] == f.table[i]:
                    m |= 1 << j
        table.append(m)
    table = tuple(table)
    iterations = 0
    while True:
        sq = _square(table)
        if sq == table:
            break
        table = sq
        iterations += 1
    lam = SpecMap(sp, sp, table)
    assert verify_lumping(lam)
    return GeneratedLumping(Lumping(lam), iterations)
