"""Commutant-derived subsystem structure: agents, swaps, and copies.

The commutant of a set of maps inside a monoid, the bounded lattice of
complete subsystems, lumpings generated by submonoids, and the
derivation of independent agents (reduced theories that cannot disturb
each other) from commuting transformations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .embed import (
    GaloisInsertion,
    Lumping,
    insertion_from_lumping,
    is_local,
    restrict_theory,
    verify_lumping,
)
from .errors import (
    CapExceeded,
    Incompatible,
    IncompatibleW,
    InternalInconsistency,
    NotComplete,
    NotIndependent,
    NotInJoin,
    NotInMonoid,
    NotIsomorphism,
    NotSubmonoid,
    NotSubtheory,
    SpaceMismatch,
    TooLarge,
)
from .spec_core import (
    SpecMap,
    Specification,
    StateSpace,
    apply,
    apply_mask,
    bits,
    compose,
    maps_equal,
)
from .theory import DEFAULT_CAP, ResourceTheory, TransformationMonoid

DEFAULT_LATTICE_CAP = 2000


@dataclass(frozen=True)
class Subsystem:
    """A submonoid of a parent monoid, elements kept in parent order.

    Closure is an invariant of valid instances, not re-validated on
    construction; is_submonoid checks it explicitly.
    """

    parent: TransformationMonoid
    elements: tuple[SpecMap, ...]

    def __post_init__(self):
        inside = {f.table for f in self.parent.elements}
        for f in self.elements:
            if f.table not in inside:
                raise NotInMonoid(f"{f!r} is not in the parent monoid")
        if self.parent.identity.table not in {f.table for f in self.elements}:
            raise NotSubmonoid("a subsystem must contain the identity")

    @property
    def space(self) -> StateSpace:
        return self.parent.space

    def __len__(self):
        return len(self.elements)

    def contains(self, f: SpecMap) -> bool:
        return any(g.table == f.table for g in self.elements)

    def tables(self) -> frozenset[tuple[int, ...]]:
        return frozenset(f.table for f in self.elements)


def _element_list(x) -> list[SpecMap]:
    if isinstance(x, (Subsystem, TransformationMonoid)):
        return list(x.elements)
    return list(x)


def as_subsystem(parent: TransformationMonoid, elements) -> Subsystem:
    """Canonicalize a set of maps to a Subsystem in parent order."""
    want = {f.table for f in _element_list(elements)}
    want.add(parent.identity.table)
    picked = tuple(f for f in parent.elements if f.table in want)
    if len(picked) < len(want):
        missing = want - {f.table for f in picked}
        raise NotInMonoid(f"{len(missing)} elements are not in the parent monoid")
    return Subsystem(parent, picked)


def is_submonoid(sub: Subsystem) -> bool:
    inside = sub.tables()
    for f in sub.elements:
        for g in sub.elements:
            if compose(f, g).table not in inside:
                return False
    return True


def commutes(f: SpecMap, g: SpecMap) -> bool:
    # Singleton tables suffice: maps act element-wise.
    return tuple(apply_mask(f, m) for m in g.table) == tuple(
        apply_mask(g, m) for m in f.table
    )


def commutant(T: TransformationMonoid, A) -> Subsystem:
    """Everything in T commuting with all of A."""
    elems = _element_list(A)
    inside = {f.table for f in T.elements}
    for f in elems:
        if f.table not in inside:
            raise NotInMonoid(f"{f!r} is not in the monoid")
    picked = tuple(g for g in T.elements if all(commutes(f, g) for f in elems))
    return Subsystem(T, picked)


def bicommutant(T: TransformationMonoid, A) -> Subsystem:
    return commutant(T, commutant(T, A).elements)


def is_complete(T: TransformationMonoid, A) -> bool:
    elems = _element_list(A)
    return bicommutant(T, elems).tables() == frozenset(f.table for f in elems)


def _same_parent(A: Subsystem, B: Subsystem):
    if A.parent != B.parent:
        raise SpaceMismatch("subsystems live in different parent monoids")


def join(A: Subsystem, B: Subsystem) -> Subsystem:
    _same_parent(A, B)
    if not is_complete(A.parent, A) or not is_complete(B.parent, B):
        raise NotComplete("join needs complete subsystems")
    return bicommutant(A.parent, A.elements + B.elements)


def meet(A: Subsystem, B: Subsystem) -> Subsystem:
    _same_parent(A, B)
    if not is_complete(A.parent, A) or not is_complete(B.parent, B):
        raise NotComplete("meet needs complete subsystems")
    common = A.tables() & B.tables()
    return bicommutant(A.parent, [f for f in A.elements if f.table in common])


def centre(A) -> Subsystem:
    parent = A.parent if isinstance(A, Subsystem) else A
    elems = _element_list(A)
    picked = [g for g in elems if all(commutes(f, g) for f in elems)]
    return as_subsystem(parent, picked)


def is_centreless(A) -> bool:
    return len(centre(A)) == 1


def are_independent(A: Subsystem, B: Subsystem) -> bool:
    _same_parent(A, B)
    if any(not commutes(f, g) for f in A.elements for g in B.elements):
        return False
    ident = A.parent.identity.table
    return A.tables() & B.tables() == frozenset({ident})


@dataclass(frozen=True)
class CompleteLattice:
    parent: TransformationMonoid
    systems: tuple[Subsystem, ...]
    masks: tuple[int, ...]  # element-index bitmask per system, same order
    bottom: int
    top: int

    def __len__(self):
        return len(self.systems)

    def leq(self, i: int, j: int) -> bool:
        return self.masks[i] & ~self.masks[j] == 0


def enumerate_complete(
    T: TransformationMonoid,
    seeds: Iterable[SpecMap] | None = None,
    cap: int = DEFAULT_LATTICE_CAP,
) -> CompleteLattice:
    """Materialize the lattice of complete subsystems.

    Every complete subsystem is the commutant of some set, and the
    commutant of a set is the intersection of its elements' commutants,
    so intersecting single-element commutants to a fixed point yields
    exactly the complete subsystems (of sets of seeds; all of Sys(T)
    with the default all-element seeding).  The family is closed under
    meet by construction and under join because it is commutant-closed.
    """
    n = len(T.elements)
    seed_elems = _element_list(seeds) if seeds is not None else list(T.elements)
    inside = {f.table: i for i, f in enumerate(T.elements)}
    for f in seed_elems:
        if f.table not in inside:
            raise NotInMonoid(f"seed {f!r} is not in the monoid")

    # comm_row[i] = bitmask of the elements commuting with element i.
    comm_row = []
    for i in range(n):
        row = 0
        for j in range(n):
            if commutes(T.elements[i], T.elements[j]):
                row |= 1 << j
        comm_row.append(row)
    full = (1 << n) - 1

    top_mask = full
    bottom_mask = full
    for row in comm_row:
        bottom_mask &= row  # com(T) = centre
    found: list[int] = []
    seen: set[int] = set()

    def add(mask: int) -> bool:
        if mask in seen:
            return False
        if len(found) + 1 > cap:
            raise CapExceeded(
                f"complete subsystems would exceed cap {cap}", len(found) + 1
            )
        seen.add(mask)
        found.append(mask)
        return True

    add(top_mask)
    add(bottom_mask)
    for f in seed_elems:
        add(comm_row[inside[f.table]])

    # Pairwise intersections until nothing new appears.
    i = 0
    while i < len(found):
        a = found[i]
        for j in range(i):
            add(a & found[j])
        i += 1

    order = sorted(found, key=lambda m: (m.bit_count(), m))
    systems = tuple(
        Subsystem(T, tuple(T.elements[i] for i in bits(m))) for m in order
    )
    return CompleteLattice(
        T,
        systems,
        tuple(order),
        order.index(bottom_mask),
        order.index(top_mask),
    )


def generated_lumping(T: TransformationMonoid, A) -> Lumping:
    """Lumping identifying states the submonoid A cannot tell apart.

    On a state: the union over f in A of every state whose f-image fits
    inside the state's own, extended element-wise and squared to
    idempotence.
    """
    elems = _element_list(A)
    inside = {f.table for f in T.elements}
    for f in elems:
        if f.table not in inside:
            raise NotSubmonoid(f"{f!r} is not in the monoid")
    if T.identity.table not in {f.table for f in elems}:
        raise NotSubmonoid("a submonoid must contain the identity")
    sp = T.space
    table = []
    for i in range(sp.size):
        m = 1 << i
        for f in elems:
            for j in range(sp.size):
                if f.table[j] | f.table[i] == f.table[i]:
                    m |= 1 << j
        table.append(m)
    while True:
        sq = tuple(
            _or_over(table, v) for v in table
        )
        if sq == tuple(table):
            break
        table = list(sq)
    lam = SpecMap(sp, sp, tuple(table))
    assert verify_lumping(lam)
    return Lumping(lam)


def _or_over(table: Sequence[int], mask: int) -> int:
    out = 0
    for j in bits(mask):
        out |= table[j]
    return out


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    conditions: tuple[bool, bool, bool]

    def __bool__(self):
        return self.ok


def check_compatibility(
    ins_a: GaloisInsertion, ins_b: GaloisInsertion
) -> CompatibilityReport:
    """The three equivalent faces of free composition, cross-checked.

    (1) each h sends the other side's embedded specs to its full space,
    (2) every local pair is jointly realizable by some global spec,
    (3) embedded locals always intersect and the intersection projects
    back to exactly the locals.  The three must agree; a disagreement is
    an implementation bug, not a verdict.
    """
    if ins_a.big != ins_b.big:
        raise SpaceMismatch("insertions must share the big space")
    sa, sb = ins_a.small.size, ins_b.small.size
    if sa > 7 or sb > 7:
        raise TooLarge("exhaustive compatibility check capped at 7-state sides")
    big = ins_a.big
    e_a = [apply_mask(ins_a.e, v) for v in range(1 << sa)]
    e_b = [apply_mask(ins_b.e, w) for w in range(1 << sb)]
    ha, hb = ins_a.h.table, ins_b.h.table

    cond1 = all(
        apply_mask(ins_b.h, e_a[1 << i]) == ins_b.small.full_mask for i in range(sa)
    ) and all(
        apply_mask(ins_a.h, e_b[1 << i]) == ins_a.small.full_mask for i in range(sb)
    )

    cond2 = True
    cond3 = True
    for v in range(1, 1 << sa):
        for w in range(1, 1 << sb):
            star = 0
            for s in range(big.size):
                if ha[s] | v == v and hb[s] | w == w:
                    star |= 1 << s
            realizable = (
                star != 0
                and apply_mask(ins_a.h, star) == v
                and apply_mask(ins_b.h, star) == w
            )
            cond2 = cond2 and realizable
            both = e_a[v] & e_b[w]
            composable = (
                both != 0
                and apply_mask(ins_a.h, both) == v
                and apply_mask(ins_b.h, both) == w
            )
            cond3 = cond3 and composable
            if not cond2 and not cond3:
                break
        if not cond2 and not cond3:
            break
    if not (cond1 == cond2 == cond3):
        raise InternalInconsistency(
            f"free-composition conditions disagree: {(cond1, cond2, cond3)}"
        )
    return CompatibilityReport(cond1, (cond1, cond2, cond3))


def check_freely_composable(T: ResourceTheory, A: Subsystem, B: Subsystem) -> bool:
    """Exhaustive side condition for free composability.

    For every pair of specs V, W there must be a spec X that some
    commutant map of A confuses with V and some commutant map of B
    confuses with W.
    """
    size = T.space.size
    if size > 5:
        raise TooLarge("freely-composable scan capped at 5 states")
    com_a = commutant(T.monoid, A).elements
    com_b = commutant(T.monoid, B).elements
    n = 1 << size

    def reach_sets(maps: Sequence[SpecMap]) -> list[int]:
        # sets[v] = bitset over masks X with f(X) = f(V) for some f
        sets = [0] * n
        for f in maps:
            groups: dict[int, int] = {}
            for x in range(1, n):
                groups.setdefault(apply_mask(f, x), 0)
                groups[apply_mask(f, x)] |= 1 << x
            for v in range(1, n):
                sets[v] |= groups[apply_mask(f, v)]
        return sets

    r_a = reach_sets(com_a)
    r_b = reach_sets(com_b)
    return all(
        r_a[v] & r_b[w] != 0 for v in range(1, n) for w in range(1, n)
    )


@dataclass(frozen=True)
class AgentsReport:
    a: Subsystem
    b: Subsystem
    ins_a: GaloisInsertion
    ins_b: GaloisInsertion
    theory_a: ResourceTheory
    theory_b: ResourceTheory
    certified: bool
    freely_composable: bool | None = None
    compatibility: CompatibilityReport | None = None


def _certifies(ins: GaloisInsertion, other: Iterable[SpecMap]) -> bool:
    # h.f.e(V) subset-of V for every V iff h.f.e is the identity table:
    # images are nonempty and sit inside singletons.
    small = ins.small
    for f in other:
        ind = compose(ins.h, compose(f, ins.e))
        if small.size <= 5:
            for v in range(1, 1 << small.size):
                if apply_mask(ind, v) | v != v:
                    return False
        elif any(ind.table[i] != 1 << i for i in range(small.size)):
            return False
    return True


def derive_agents(
    T: ResourceTheory,
    A: Subsystem,
    B: Subsystem,
    *,
    free_composition: bool = False,
    cap: int = DEFAULT_CAP,
) -> AgentsReport:
    """Reduced theories for two independent complete subsystems.

    Each agent lives on the space its rivals' commutant cannot split:
    the lumping generated by commutant(A) yields A's insertion, the
    restriction of A through it yields A's theory, and the certificate
    checks B's maps act trivially on A's reduced space (and vice versa).
    """
    if A.parent != T.monoid or B.parent != T.monoid:
        raise SpaceMismatch("subsystems must live in the theory's monoid")
    if not is_complete(T.monoid, A):
        raise NotComplete("A is not complete")
    if not is_complete(T.monoid, B):
        raise NotComplete("B is not complete")
    if not are_independent(A, B):
        raise NotIndependent("A and B are not independent")
    ins_a = insertion_from_lumping(generated_lumping(T.monoid, commutant(T.monoid, A)))
    ins_b = insertion_from_lumping(generated_lumping(T.monoid, commutant(T.monoid, B)))
    theory_a = restrict_theory(T, A, ins_a, cap)
    theory_b = restrict_theory(T, B, ins_b, cap)
    certified = _certifies(ins_a, B.elements) and _certifies(ins_b, A.elements)
    freely = None
    compat = None
    if free_composition:
        freely = check_freely_composable(T, A, B)
        compat = check_compatibility(ins_a, ins_b)
    return AgentsReport(
        A, B, ins_a, ins_b, theory_a, theory_b, certified, freely, compat
    )


@dataclass(frozen=True)
class ProcessingReport:
    ok: bool
    left: Specification
    right: Specification
    counterexample: str | None = None

    def __bool__(self):
        return self.ok


def check_independent_processing(
    ins_a: GaloisInsertion, f_b: SpecMap, V_A: Specification, W: Specification
) -> ProcessingReport:
    """f_b slides past a held local resource: f_b(e(V) & W) = e(V) & f_b(W)."""
    if V_A.space != ins_a.small or W.space != ins_a.big:
        raise SpaceMismatch("V_A lives on the small space, W on the big one")
    if not _certifies(ins_a, [f_b]):
        raise NotIndependent("f_b does not leave the reduced space alone")
    held = apply_mask(ins_a.e, V_A.mask)
    cut = held & W.mask
    if cut == 0:
        raise IncompatibleW(f"{W!r} is incompatible with the held {V_A!r}")
    left = apply_mask(f_b, cut)
    right = held & apply_mask(f_b, W.mask)
    witness = None
    if left != right:
        witness = ins_a.big.labels[next(bits(left ^ right))]
    return ProcessingReport(
        left == right,
        Specification(ins_a.big, left),
        Specification(ins_a.big, right),
        witness,
    )


def check_agents_theorem(
    agents: AgentsReport, f_a: SpecMap, g_b: SpecMap, V: Specification
) -> bool:
    """f_a.g_b(V) stays inside what each agent predicts on its own side."""
    if not agents.certified:
        raise NotIndependent("agents are not certified independent")
    if not agents.a.contains(f_a):
        raise NotInMonoid(f"{f_a!r} is not in A")
    if not agents.b.contains(g_b):
        raise NotInMonoid(f"{g_b!r} is not in B")
    if V.space != agents.ins_a.big:
        raise SpaceMismatch("V must live on the big space")
    lam_a = agents.ins_a.lumping()
    lam_b = agents.ins_b.lumping()
    lhs = apply_mask(f_a, apply_mask(g_b, V.mask))
    rhs_a = apply_mask(lam_a, apply_mask(f_a, apply_mask(lam_a, V.mask)))
    rhs_b = apply_mask(lam_b, apply_mask(g_b, apply_mask(lam_b, V.mask)))
    return lhs & ~(rhs_a & rhs_b) == 0


def inherited_subsystems(
    T: ResourceTheory, M: ResourceTheory, cap: int = DEFAULT_LATTICE_CAP
) -> tuple[Subsystem, ...]:
    """Complete subsystems of the bigger theory, cut down to the smaller."""
    if T.space != M.space:
        raise NotSubtheory("theories live on different spaces")
    m_tables = {f.table for f in M.monoid.elements}
    if any(f.table not in m_tables for f in T.monoid.elements):
        raise NotSubtheory("T is not a subtheory of M")
    lattice = enumerate_complete(M.monoid, cap=cap)
    out: list[Subsystem] = []
    seen: set[frozenset[tuple[int, ...]]] = set()
    for sys in lattice.systems:
        cut = sys.tables()
        picked = tuple(f for f in T.monoid.elements if f.table in cut)
        sub = Subsystem(T.monoid, picked)
        assert is_submonoid(sub)
        if sub.tables() not in seen:
            seen.add(sub.tables())
            out.append(sub)
    return tuple(out)


@dataclass(frozen=True)
class SwapReport:
    ok: bool
    failures: tuple[str, ...]

    def __bool__(self):
        return self.ok


def verify_swap(
    T: TransformationMonoid,
    A: Subsystem,
    B: Subsystem,
    iso: dict[SpecMap, SpecMap],
    u: SpecMap,
    u_inv: SpecMap,
) -> SwapReport:
    """Does u (with inverse u_inv) implement the isomorphism as a swap?

    iso must be an explicit monoid isomorphism A -> B; conjugating any
    f_a.g_b by u either way must land on iso(f_a) composed with
    iso-inverse(g_b).
    """
    if A.parent != T or B.parent != T:
        raise SpaceMismatch("subsystems must live in the given monoid")
    if not is_complete(T, A) or not is_complete(T, B):
        raise NotComplete("swapped subsystems must be complete")
    if not are_independent(A, B):
        raise NotIndependent("swapped subsystems must be independent")

    by_table = {f.table: f for f in iso}
    if set(by_table) != {f.table for f in A.elements} or len(iso) != len(A.elements):
        raise NotIsomorphism("iso is not defined on exactly A")
    values = {g.table for g in iso.values()}
    if values != {g.table for g in B.elements} or len(values) != len(iso):
        raise NotIsomorphism("iso is not a bijection onto B")
    if iso[by_table[T.identity.table]].table != T.identity.table:
        raise NotIsomorphism("iso does not fix the identity")
    for f in A.elements:
        for g in A.elements:
            fg = by_table[compose(f, g).table]
            if not maps_equal(iso[fg], compose(iso[by_table[f.table]], iso[by_table[g.table]])):
                raise NotIsomorphism(f"iso breaks on {f!r} . {g!r}")

    ab = join(A, B)
    if not ab.contains(u) or not ab.contains(u_inv):
        raise NotInJoin("u and u_inv must lie in the join of A and B")

    failures: list[str] = []
    ident = T.identity
    if not maps_equal(compose(u, u_inv), ident) or not maps_equal(
        compose(u_inv, u), ident
    ):
        failures.append("u and u_inv are not mutually inverse")
    iso_inv = {g.table: f for f, g in iso.items()}
    if not failures:
        for f_a in A.elements:
            for g_b in B.elements:
                mid = compose(f_a, g_b)
                want = compose(iso[by_table[f_a.table]], iso_inv[g_b.table])
                c1 = compose(u_inv, compose(mid, u))
                c2 = compose(u, compose(mid, u_inv))
                if not maps_equal(c1, want) or not maps_equal(c2, want):
                    failures.append(
                        f"conjugation of {f_a!r} . {g_b!r} does not swap"
                    )
                    break
            if failures:
                break
    return SwapReport(not failures, tuple(failures))


def copy_spec(
    u: SpecMap,
    ins_a: GaloisInsertion,
    ins_b: GaloisInsertion,
    V_A: Specification,
) -> Specification:
    """Push a local spec through a verified swap; the result is B-local."""
    if V_A.space != ins_a.small:
        raise SpaceMismatch("V_A must live on the source small space")
    out = apply(u, apply(ins_a.e, V_A))
    assert is_local(ins_b, out)
    return out


def n_copies(
    ins_a: GaloisInsertion, V_A: Specification, swaps: Sequence[SpecMap]
) -> Specification:
    """Intersection of the swapped embeddings, one per copy; none = no constraint.

    The identity swap stands for the original copy and is passed
    explicitly like any other.
    """
    if V_A.space != ins_a.small:
        raise SpaceMismatch("V_A must live on the small space")
    big = ins_a.big
    held = apply_mask(ins_a.e, V_A.mask)
    images = []
    for u in swaps:
        if u.source != big or u.target != big:
            raise SpaceMismatch("swaps must act on the big space")
        images.append(apply_mask(u, held))
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if images[i] & images[j] == 0:
                raise Incompatible(f"copies {i} and {j} clash")
    total = big.full_mask
    for m in images:
        total &= m
    if total == 0:
        raise Incompatible("the copies have no joint state")
    return Specification(big, total)
