from dataclasses import replace
from random import Random

import pytest

from rtk import (
    CapExceeded,
    Incompatible,
    IncompatibleW,
    Lumping,
    NotComplete,
    NotInJoin,
    NotInMonoid,
    NotIndependent,
    NotIsomorphism,
    NotSubmonoid,
    NotSubtheory,
    ResourceTheory,
    SpaceMismatch,
    SpecMap,
    Subsystem,
    TooLarge,
    apply_mask,
    are_independent,
    as_subsystem,
    bicommutant,
    centre,
    check_agents_theorem,
    check_compatibility,
    check_freely_composable,
    check_independent_processing,
    close_monoid,
    commutant,
    commutes,
    compose,
    copy_spec,
    derive_agents,
    enumerate_complete,
    full_spec,
    generated_lumping,
    identity_insertion,
    inherited_subsystems,
    insertion_from_lumping,
    is_centreless,
    is_complete,
    is_submonoid,
    join,
    make_spec,
    meet,
    n_copies,
    space,
    verify_lumping,
    verify_swap,
)

from conftest import det


@pytest.fixture(scope="module")
def subs(tb):
    return (
        as_subsystem(tb.full, tb.bit1.elements),
        as_subsystem(tb.full, tb.bit2.elements),
    )


@pytest.fixture(scope="module")
def trivial(tb):
    return as_subsystem(tb.full, [])


@pytest.fixture(scope="module")
def t3():
    sp = space("x", "y", "z")
    cyc = det(sp, lambda s: {"x": "y", "y": "z", "z": "x"}[s])
    tr = det(sp, lambda s: {"x": "y", "y": "x"}.get(s, s))
    mrg = det(sp, lambda s: "x" if s == "y" else s)
    return close_monoid([cyc, tr, mrg], cap=30)


def test_commutes(tb):
    assert commutes(tb.flip1, tb.flip2)
    assert commutes(tb.flip1, tb.flip1)
    assert not commutes(tb.flip1, tb.exch)
    assert not commutes(tb.exch, tb.flip1)


def test_subsystem_validation(tb):
    with pytest.raises(NotInMonoid):
        Subsystem(tb.bit1, (tb.flip2,))
    with pytest.raises(NotSubmonoid):
        Subsystem(tb.full, (tb.flip1,))
    sub = Subsystem(tb.full, (tb.nop, tb.flip1))
    assert sub.space == tb.sp
    assert len(sub) == 2
    assert sub.contains(tb.flip1) and not sub.contains(tb.exch)
    assert sub.tables() == frozenset({tb.nop.table, tb.flip1.table})


def test_as_subsystem(tb):
    sub = as_subsystem(tb.full, [tb.flip1])
    assert sub.tables() == frozenset({tb.nop.table, tb.flip1.table})
    order = {f.table: i for i, f in enumerate(tb.full.elements)}
    positions = [order[f.table] for f in sub.elements]
    assert positions == sorted(positions)
    assert is_submonoid(sub)
    with pytest.raises(NotInMonoid):
        as_subsystem(tb.bit1, [tb.flip2])


def test_is_submonoid_detects_gaps(tb):
    assert not is_submonoid(Subsystem(tb.full, (tb.nop, tb.cyc)))
    assert is_submonoid(as_subsystem(tb.full, tb.perm.elements))


def test_commutant_of_identity_is_everything(tb, trivial):
    assert len(commutant(tb.full, trivial)) == len(tb.full)


def test_commutant_of_bit1_is_bit2(tb, subs):
    asub, bsub = subs
    assert commutant(tb.full, asub).tables() == bsub.tables()
    assert commutant(tb.full, bsub).tables() == asub.tables()


def test_commutant_of_everything_is_centre(tb):
    everything = as_subsystem(tb.full, tb.full.elements)
    assert commutant(tb.full, everything).tables() == centre(tb.full).tables()


def test_commutant_rejects_outsiders(tb):
    with pytest.raises(NotInMonoid):
        commutant(tb.bit1, [tb.flip2])


def test_bicommutant(tb, subs, trivial):
    asub, _ = subs
    assert bicommutant(tb.full, asub).tables() == asub.tables()
    assert bicommutant(tb.full, trivial).tables() == centre(tb.full).tables()
    big = bicommutant(tb.full, [tb.cyc])
    assert bicommutant(tb.full, big).tables() == big.tables()


def test_is_complete(tb, subs):
    asub, bsub = subs
    assert is_complete(tb.full, asub)
    assert is_complete(tb.full, bsub)
    assert not is_complete(tb.full, as_subsystem(tb.full, tb.perm.elements))


def test_join_and_meet(tb, subs, trivial):
    asub, bsub = subs
    top = as_subsystem(tb.full, tb.full.elements)
    assert join(asub, bsub).tables() == top.tables()
    assert meet(asub, top).tables() == asub.tables()
    assert join(asub, trivial).tables() == asub.tables()
    assert meet(asub, bsub).tables() == trivial.tables()


def test_join_requires_completeness(tb, subs):
    asub, _ = subs
    s4 = as_subsystem(tb.full, tb.perm.elements)
    with pytest.raises(NotComplete):
        join(asub, s4)
    with pytest.raises(NotComplete):
        meet(s4, asub)


def test_subsystem_parent_mismatch(tb, subs):
    asub, _ = subs
    other = Subsystem(tb.bit1, tb.bit1.elements)
    with pytest.raises(SpaceMismatch):
        join(asub, other)


def test_centre(tb, abcd, swap_ab):
    z = centre(tb.full)
    assert z.tables() == frozenset({tb.nop.table})
    assert is_centreless(tb.full)
    assert centre(tb.bit1).tables() == frozenset({tb.nop.table})
    abelian = close_monoid([swap_ab])
    assert len(centre(abelian)) == 2
    assert not is_centreless(abelian)


def test_are_independent(tb, subs):
    asub, bsub = subs
    assert are_independent(asub, bsub)
    assert not are_independent(asub, asub)  # shared non-identity elements
    assert not are_independent(asub, as_subsystem(tb.full, [tb.exch]))


def test_enumerate_complete_bit1(tb):
    lattice = enumerate_complete(tb.bit1)
    assert len(lattice) == 5
    sizes = sorted(len(s) for s in lattice.systems)
    assert sizes == [1, 2, 2, 2, 4]
    assert len(lattice.systems[lattice.bottom]) == 1
    assert len(lattice.systems[lattice.top]) == 4
    for i in range(5):
        assert lattice.leq(lattice.bottom, i)
        assert lattice.leq(i, lattice.top)
    middles = [i for i in range(5) if len(lattice.systems[i]) == 2]
    for i in middles:
        for j in middles:
            assert lattice.leq(i, j) == (i == j)


def test_enumerate_complete_trivial_monoid(abcd, swap_ab):
    only_id = close_monoid([], space=abcd)
    assert len(enumerate_complete(only_id)) == 1
    abelian = close_monoid([swap_ab])
    lattice = enumerate_complete(abelian)
    assert len(lattice) == 1  # top and bottom coincide
    assert lattice.bottom == lattice.top


def test_enumerate_complete_cap(tb):
    with pytest.raises(CapExceeded) as exc:
        enumerate_complete(tb.full, cap=10)
    assert exc.value.count == 11


def test_enumerate_complete_seeded(tb):
    lattice = enumerate_complete(tb.full, seeds=[tb.flip1])
    masks = set(lattice.masks)
    assert len(lattice) == 3  # top, centre, and flip1's commutant
    com = commutant(tb.full, [tb.flip1])
    order = {f.table: i for i, f in enumerate(tb.full.elements)}
    com_mask = 0
    for f in com.elements:
        com_mask |= 1 << order[f.table]
    assert com_mask in masks
    for sys in lattice.systems:
        assert is_complete(tb.full, sys)
    with pytest.raises(NotInMonoid):
        enumerate_complete(tb.full, seeds=[det(space("a", "b"), lambda s: s)])


def test_enumerate_complete_closed_under_intersection(t3):
    lattice = enumerate_complete(t3)
    masks = set(lattice.masks)
    for a in lattice.masks:
        for b in lattice.masks:
            assert a & b in masks
    assert lattice.masks[lattice.bottom] == min(
        masks, key=lambda m: (m.bit_count(), m)
    )
    z = centre(t3)
    assert lattice.systems[lattice.bottom].tables() == z.tables()


def test_generated_lumping_bit1_forgets_bit1(tb, subs):
    asub, bsub = subs
    lam = generated_lumping(tb.full, asub).map
    assert lam.table == (0b0101, 0b1010, 0b0101, 0b1010)
    assert apply_mask(lam, 0b0001) == 0b0101  # 00 lumps with 10
    lam_b = generated_lumping(tb.full, bsub).map
    assert lam_b.table == tb.lump1.map.table


def test_generated_lumping_identity_and_total(tb, trivial):
    assert generated_lumping(tb.full, trivial).map.table == tb.nop.table
    everything = as_subsystem(tb.full, tb.full.elements)
    assert generated_lumping(tb.full, everything).map.table == (0b1111,) * 4


def test_generated_lumping_validation(tb):
    with pytest.raises(NotSubmonoid):
        generated_lumping(tb.full, [tb.flip1])  # identity missing
    with pytest.raises(NotSubmonoid):
        generated_lumping(tb.bit1, [tb.nop, tb.flip2])


def test_generated_lumping_shields_own_maps(tb, subs):
    asub, _ = subs
    lam = generated_lumping(tb.full, asub).map
    for f in asub.elements:
        for v in range(1, 16):
            lumped = apply_mask(lam, v)
            assert apply_mask(f, lumped) & ~lumped == 0


def test_exchange_conjugates_generated_lumpings(tb, subs):
    asub, bsub = subs
    lam_a = generated_lumping(tb.full, asub).map
    lam_b = generated_lumping(tb.full, bsub).map
    conj = compose(tb.exch, compose(lam_a, tb.exch))
    assert conj.table == lam_b.table


def _random_submonoid(rng, T):
    picks = [rng.choice(T.elements) for _ in range(rng.randint(1, 2))]
    return close_monoid(picks, cap=len(T) + 1, space=T.space)


def test_commutant_properties_random(t3):
    rng = Random("commutant-laws")
    for _ in range(12):
        A = _random_submonoid(rng, t3)
        B = _random_submonoid(rng, t3)
        com_a = commutant(t3, A)
        com_b = commutant(t3, B)
        aa = bicommutant(t3, A)
        assert {f.table for f in A.elements} <= aa.tables()
        assert is_complete(t3, com_a)
        assert bicommutant(t3, aa).tables() == aa.tables()
        both = close_monoid(
            list(A.elements) + list(B.elements), cap=len(t3) + 1, space=t3.space
        )
        com_both = commutant(t3, both)
        assert com_both.tables() == com_a.tables() & com_b.tables()
        assert com_both.tables() <= com_a.tables()  # antitone
        shared = [f for f in A.elements if f.table in {g.table for g in B.elements}]
        com_shared = commutant(t3, shared)
        assert com_a.tables() | com_b.tables() <= com_shared.tables()
        cut = [f for f in com_a.elements if f.table in com_b.tables()]
        assert is_complete(t3, cut)


def test_generated_lumping_properties_random(t3):
    rng = Random("lumping-absorb")
    size = t3.space.size
    for _ in range(12):
        A = _random_submonoid(rng, t3)
        lam = generated_lumping(t3, A).map
        assert verify_lumping(lam)
        com_a = commutant(t3, A)
        for f in list(A.elements) + list(com_a.elements):
            assert (
                compose(lam, compose(f, lam)).table == compose(lam, f).table
            )
        # every indistinguishable pair the relation starts from survives
        for f in A.elements:
            for i in range(size):
                for j in range(size):
                    if f.table[j] | f.table[i] == f.table[i]:
                        assert (lam.table[i] >> j) & 1


@pytest.fixture(scope="module")
def agents(tb, subs):
    asub, bsub = subs
    return derive_agents(tb.theory, asub, bsub)


def test_derive_agents_two_one_bit_theories(tb, agents):
    assert agents.certified
    assert agents.ins_a.small.labels == ("0001", "1011")
    assert agents.ins_b.small.labels == ("0010", "0111")
    for th in (agents.theory_a, agents.theory_b):
        assert {f.table for f in th.monoid.elements} == {
            (1, 2), (2, 1), (1, 1), (2, 2)
        }
    assert agents.freely_composable is None
    assert agents.compatibility is None


def test_derive_agents_free_composition(tb, subs):
    asub, bsub = subs
    report = derive_agents(tb.theory, asub, bsub, free_composition=True)
    assert report.freely_composable is True
    assert report.compatibility
    assert report.compatibility.conditions == (True, True, True)


def test_derive_agents_trivial_sides(tb, trivial):
    report = derive_agents(tb.theory, trivial, trivial)
    assert report.certified
    assert report.ins_a.small.size == 1
    assert len(report.theory_a.monoid) == 1


def test_derive_agents_preconditions(tb, subs):
    asub, bsub = subs
    s4 = as_subsystem(tb.full, tb.perm.elements)
    with pytest.raises(NotComplete):
        derive_agents(tb.theory, s4, bsub)
    with pytest.raises(NotIndependent):
        derive_agents(tb.theory, asub, asub)
    foreign = Subsystem(tb.bit1, tb.bit1.elements)
    with pytest.raises(SpaceMismatch):
        derive_agents(tb.theory, foreign, bsub)


def test_independent_processing_flip2(tb, agents):
    v_a = make_spec(agents.ins_a.small, ["0001"])
    w = make_spec(tb.sp, ["00", "11"])
    report = check_independent_processing(agents.ins_a, tb.flip2, v_a, w)
    assert report
    assert report.left == make_spec(tb.sp, ["01"])
    assert report.right == make_spec(tb.sp, ["01"])
    assert report.counterexample is None


def test_independent_processing_identity(tb, agents):
    v_a = make_spec(agents.ins_a.small, ["0001"])
    w = make_spec(tb.sp, ["00", "11"])
    report = check_independent_processing(agents.ins_a, tb.nop, v_a, w)
    assert report
    assert report.left == make_spec(tb.sp, ["00"])


def test_independent_processing_rejections(tb, agents):
    v_a = make_spec(agents.ins_a.small, ["0001"])
    with pytest.raises(NotIndependent):
        check_independent_processing(
            agents.ins_a, tb.flip1, v_a, full_spec(tb.sp)
        )
    with pytest.raises(IncompatibleW):
        check_independent_processing(
            agents.ins_a, tb.flip2, v_a, make_spec(tb.sp, ["10"])
        )
    with pytest.raises(SpaceMismatch):
        check_independent_processing(
            agents.ins_a, tb.flip2, full_spec(tb.sp), full_spec(tb.sp)
        )


def test_agents_theorem_worked_case(tb, agents):
    v = make_spec(tb.sp, ["00"])
    assert check_agents_theorem(agents, tb.flip1, tb.flip2, v)
    assert check_agents_theorem(agents, tb.set1z, tb.set2o, full_spec(tb.sp))


def test_agents_theorem_rejections(tb, agents, abcd):
    v = make_spec(tb.sp, ["00"])
    with pytest.raises(NotInMonoid):
        check_agents_theorem(agents, tb.flip2, tb.flip2, v)
    with pytest.raises(NotInMonoid):
        check_agents_theorem(agents, tb.flip1, tb.flip1, v)
    with pytest.raises(SpaceMismatch):
        check_agents_theorem(agents, tb.flip1, tb.flip2, full_spec(abcd))
    broken = replace(agents, certified=False)
    with pytest.raises(NotIndependent):
        check_agents_theorem(broken, tb.flip1, tb.flip2, v)


def test_check_compatibility_grid(agents):
    report = check_compatibility(agents.ins_a, agents.ins_b)
    assert report
    assert report.conditions == (True, True, True)


def test_check_compatibility_same_side_fails(tb):
    report = check_compatibility(tb.ins1, tb.ins1)
    assert not report
    assert report.conditions == (False, False, False)


def test_check_compatibility_trivial_side(tb):
    total = Lumping(SpecMap(tb.sp, tb.sp, (0b1111,) * 4))
    ins_total = insertion_from_lumping(total)
    assert check_compatibility(tb.ins1, ins_total)
    assert check_compatibility(ins_total, ins_total)


def test_check_compatibility_limits(tb):
    wide = identity_insertion(space(*(f"s{i}" for i in range(8))))
    with pytest.raises(TooLarge):
        check_compatibility(wide, wide)
    with pytest.raises(SpaceMismatch):
        check_compatibility(tb.ins1, identity_insertion(space("a", "b")))


def test_check_freely_composable(tb, subs):
    asub, bsub = subs
    assert check_freely_composable(tb.theory, asub, bsub)
    sp6 = space(*(f"s{i}" for i in range(6)))
    only_id = close_monoid([], space=sp6)
    t6 = ResourceTheory(sp6, only_id)
    sub6 = Subsystem(only_id, only_id.elements)
    with pytest.raises(TooLarge):
        check_freely_composable(t6, sub6, sub6)


def test_inherited_subsystems_perm(tb):
    perm_theory = ResourceTheory(tb.sp, tb.perm)
    inherited = inherited_subsystems(tb.theory, tb.theory)
    full_lattice = enumerate_complete(tb.full)
    assert {s.tables() for s in inherited} == {
        s.tables() for s in full_lattice.systems
    }
    cuts = inherited_subsystems(perm_theory, tb.theory)
    assert len(cuts) == len({s.tables() for s in cuts})
    perm_tables = {f.table for f in tb.perm.elements}
    for sub in cuts:
        assert sub.tables() <= perm_tables
    assert any(sub.tables() == perm_tables for sub in cuts)
    assert any(len(sub) == 1 for sub in cuts)


def test_inherited_subsystems_identity_theory(tb):
    only_id = close_monoid([], space=tb.sp)
    t0 = ResourceTheory(tb.sp, only_id)
    bit1_theory = ResourceTheory(tb.sp, tb.bit1)
    cuts = inherited_subsystems(t0, bit1_theory)
    assert len(cuts) == 1
    assert len(cuts[0]) == 1


def test_inherited_subsystems_rejections(tb, abcd):
    perm_theory = ResourceTheory(tb.sp, tb.perm)
    bit1_theory = ResourceTheory(tb.sp, tb.bit1)
    with pytest.raises(NotSubtheory):
        inherited_subsystems(perm_theory, bit1_theory)
    with pytest.raises(NotSubtheory):
        inherited_subsystems(
            ResourceTheory(abcd, close_monoid([], space=abcd)), bit1_theory
        )


def _conjugation_iso(tb, sub):
    return {f: compose(tb.exch, compose(f, tb.exch)) for f in sub.elements}


def test_verify_swap_exchange(tb, subs):
    asub, bsub = subs
    iso = _conjugation_iso(tb, asub)
    report = verify_swap(tb.full, asub, bsub, iso, tb.exch, tb.exch)
    assert report
    assert report.failures == ()


def test_verify_swap_identity_u_fails(tb, subs):
    asub, bsub = subs
    iso = _conjugation_iso(tb, asub)
    report = verify_swap(tb.full, asub, bsub, iso, tb.nop, tb.nop)
    assert not report
    assert report.failures[0].startswith("conjugation of")


def test_verify_swap_bad_inverse(tb, subs):
    asub, bsub = subs
    iso = _conjugation_iso(tb, asub)
    report = verify_swap(tb.full, asub, bsub, iso, tb.exch, tb.cyc)
    assert not report
    assert report.failures == ("u and u_inv are not mutually inverse",)


def test_verify_swap_iso_validation(tb, subs):
    asub, bsub = subs
    good = _conjugation_iso(tb, asub)
    partial = dict(list(good.items())[:-1])
    with pytest.raises(NotIsomorphism) as exc:
        verify_swap(tb.full, asub, bsub, partial, tb.exch, tb.exch)
    assert "exactly A" in str(exc.value)
    with pytest.raises(NotIsomorphism) as exc:
        verify_swap(
            tb.full, asub, bsub, {f: f for f in asub.elements}, tb.exch, tb.exch
        )
    assert "bijection onto B" in str(exc.value)
    twisted = {
        tb.nop: tb.flip2,
        tb.flip1: tb.nop,
        tb.set1z: tb.set2z,
        tb.set1o: tb.set2o,
    }
    with pytest.raises(NotIsomorphism) as exc:
        verify_swap(tb.full, asub, bsub, twisted, tb.exch, tb.exch)
    assert "fix the identity" in str(exc.value)
    crossed = {
        tb.nop: tb.nop,
        tb.flip1: tb.set2z,
        tb.set1z: tb.flip2,
        tb.set1o: tb.set2o,
    }
    with pytest.raises(NotIsomorphism) as exc:
        verify_swap(tb.full, asub, bsub, crossed, tb.exch, tb.exch)
    assert "iso breaks on" in str(exc.value)


def test_verify_swap_join_membership(tb, trivial):
    iso = {tb.nop: tb.nop}
    with pytest.raises(NotInJoin):
        verify_swap(tb.full, trivial, trivial, iso, tb.flip1, tb.flip1)
    assert verify_swap(tb.full, trivial, trivial, iso, tb.nop, tb.nop)


def test_verify_swap_preconditions(tb, subs):
    asub, bsub = subs
    s4 = as_subsystem(tb.full, tb.perm.elements)
    with pytest.raises(NotComplete):
        verify_swap(tb.full, s4, bsub, {}, tb.exch, tb.exch)
    with pytest.raises(NotIndependent):
        verify_swap(tb.full, asub, asub, {}, tb.exch, tb.exch)
    foreign = Subsystem(tb.bit1, tb.bit1.elements)
    with pytest.raises(SpaceMismatch):
        verify_swap(tb.full, foreign, bsub, {}, tb.exch, tb.exch)


def test_copy_spec(tb, agents):
    v_a = make_spec(agents.ins_a.small, ["0001"])
    copy = copy_spec(tb.exch, agents.ins_a, agents.ins_b, v_a)
    assert copy == make_spec(tb.sp, ["00", "10"])
    with pytest.raises(SpaceMismatch):
        copy_spec(tb.exch, agents.ins_a, agents.ins_b, full_spec(tb.sp))


def test_n_copies(tb, agents):
    v_a = make_spec(agents.ins_a.small, ["0001"])
    both = n_copies(agents.ins_a, v_a, [tb.nop, tb.exch])
    assert both == make_spec(tb.sp, ["00"])
    assert n_copies(agents.ins_a, v_a, []) == full_spec(tb.sp)
    omega_a = full_spec(agents.ins_a.small)
    assert n_copies(agents.ins_a, omega_a, [tb.nop, tb.exch]) == full_spec(tb.sp)


def test_n_copies_clashes(tb, agents):
    v_a = make_spec(agents.ins_a.small, ["0001"])
    with pytest.raises(Incompatible) as exc:
        n_copies(agents.ins_a, v_a, [tb.nop, tb.set1o])
    assert "copies 0 and 1 clash" in str(exc.value)
    shift = det(tb.sp, lambda s: {"00": "01", "01": "10"}.get(s, s))
    lift = det(tb.sp, lambda s: "10" if s == "01" else s)
    with pytest.raises(Incompatible) as exc:
        n_copies(agents.ins_a, v_a, [tb.nop, shift, lift])
    assert "no joint state" in str(exc.value)
    with pytest.raises(SpaceMismatch):
        n_copies(agents.ins_a, v_a, [det(space("a", "b"), lambda s: s)])
