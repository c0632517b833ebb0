"""Seeded model generators and the exact mixture-law suite.

Tests and the command line both sample models from here, so a seed
names the same model everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random

from .convex import (
    AffineMap,
    Distribution,
    Point,
    direct_mixture,
    mix,
    nested_mixture,
)
from .embed import GaloisInsertion, Lumping, as_lumping, insertion_from_lumping
from .errors import CapExceeded
from .spec_core import SpecMap, StateSpace, Specification, make_map
from .theory import ResourceTheory, close_monoid


def random_space(rng: Random, max_states: int = 5, *, min_states: int = 1) -> StateSpace:
    n = rng.randint(min_states, max_states)
    return StateSpace(tuple(f"s{i}" for i in range(n)))


def random_spec(rng: Random, space: StateSpace) -> Specification:
    return Specification(space, rng.randrange(1, 1 << space.size))


def random_endo(rng: Random, space: StateSpace, *, deterministic: bool = False) -> SpecMap:
    if deterministic:
        table = tuple(1 << rng.randrange(space.size) for _ in range(space.size))
    else:
        table = tuple(
            rng.randrange(1, 1 << space.size) for _ in range(space.size)
        )
    return SpecMap(space, space, table)


def random_theory(
    rng: Random,
    *,
    max_states: int = 5,
    max_elements: int = 20,
) -> ResourceTheory:
    """Draw until the generated monoid closes within the element budget."""
    while True:
        space = random_space(rng, max_states)
        gens = [
            random_endo(rng, space, deterministic=rng.random() < 0.7)
            for _ in range(rng.randint(0, 3))
        ]
        try:
            monoid = close_monoid(gens, cap=max_elements, space=space)
        except CapExceeded:
            continue
        return ResourceTheory(space, monoid)


def random_partition(rng: Random, space: StateSpace) -> list[int]:
    order = list(range(space.size))
    rng.shuffle(order)
    blocks: list[int] = []
    for i in order:
        pick = rng.randrange(len(blocks) + 1)
        if pick == len(blocks):
            blocks.append(1 << i)
        else:
            blocks[pick] |= 1 << i
    return blocks


def random_lumping(rng: Random, space: StateSpace) -> Lumping:
    table = [0] * space.size
    for block in random_partition(rng, space):
        for i in range(space.size):
            if block & (1 << i):
                table[i] = block
    return as_lumping(SpecMap(space, space, tuple(table)))


def random_insertion(rng: Random, *, max_big: int = 6) -> GaloisInsertion:
    space = random_space(rng, max_big)
    return insertion_from_lumping(random_lumping(rng, space))


def random_embedding(rng: Random, *, max_small: int = 4, max_big: int = 6) -> SpecMap:
    """An order embedding with pairwise disjoint singleton images."""
    n_small = rng.randint(1, max_small)
    n_big = rng.randint(n_small, max_big)
    small = StateSpace(tuple(f"a{i}" for i in range(n_small)))
    big = StateSpace(tuple(f"b{i}" for i in range(n_big)))
    owners = list(range(n_big))
    rng.shuffle(owners)
    table = [0] * n_small
    for i in range(n_small):
        table[i] = 1 << owners[i]
    for j in owners[n_small:]:
        if rng.random() < 0.5:
            table[rng.randrange(n_small)] |= 1 << j
    return make_map(small, big, {
        small.labels[i]: {big.labels[j] for j in range(n_big) if table[i] & (1 << j)}
        for i in range(n_small)
    })


def random_prob(rng: Random, *, max_den: int = 8) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def random_point(rng: Random, dim: int, *, span: int = 6, max_den: int = 4) -> Point:
    return tuple(
        Fraction(rng.randint(-span, span), rng.randint(1, max_den))
        for _ in range(dim)
    )


def random_distribution(rng: Random, n: int, *, max_num: int = 6) -> Distribution:
    nums = [rng.randint(0, max_num) for _ in range(n)]
    if not any(nums):
        nums[rng.randrange(n)] = 1
    total = sum(nums)
    return Distribution(tuple(Fraction(v, total) for v in nums))


def random_affine(rng: Random, dim: int) -> AffineMap:
    return AffineMap(
        tuple(
            tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(dim))
            for _ in range(dim)
        ),
        tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(dim)),
    )


def _law_nested_equals_direct(rng: Random) -> str | None:
    n = rng.randint(1, 6)
    dim = rng.randint(1, 3)
    P = random_distribution(rng, n)
    pts = [random_point(rng, dim) for _ in range(n)]
    if nested_mixture(P, pts) != direct_mixture(P, pts):
        return f"n={n} weights={P.weights}"
    return None


def _law_combining(rng: Random) -> str | None:
    dim = rng.randint(1, 3)
    nu, om, tau = (random_point(rng, dim) for _ in range(3))
    p, q, r = (random_prob(rng) for _ in range(3))
    left = mix(r, mix(p, nu, om), mix(q, nu, tau))
    s = r * p + (1 - r) * q
    alpha = r * (1 - p) / (1 - s) if s != 1 else Fraction(0)
    right = mix(s, nu, mix(alpha, om, tau))
    if left != right:
        return f"p={p} q={q} r={r}"
    return None


def _law_permuting(rng: Random) -> str | None:
    n = rng.randint(1, 6)
    dim = rng.randint(1, 3)
    P = random_distribution(rng, n)
    pts = [random_point(rng, dim) for _ in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    P2 = Distribution(tuple(P.weights[i] for i in perm))
    pts2 = [pts[i] for i in perm]
    if nested_mixture(P, pts) != nested_mixture(P2, pts2):
        return f"n={n} perm={perm}"
    return None


def _law_mixture_of_distributions(rng: Random) -> str | None:
    n = rng.randint(1, 6)
    dim = rng.randint(1, 3)
    P = random_distribution(rng, n)
    Q = random_distribution(rng, n)
    pts = [random_point(rng, dim) for _ in range(n)]
    r = random_prob(rng)
    R = Distribution(
        tuple(r * a + (1 - r) * b for a, b in zip(P.weights, Q.weights))
    )
    left = mix(r, nested_mixture(P, pts), nested_mixture(Q, pts))
    if left != nested_mixture(R, pts):
        return f"n={n} r={r}"
    return None


def _law_repetitions(rng: Random) -> str | None:
    n = rng.randint(2, 6)
    dim = rng.randint(1, 3)
    P = random_distribution(rng, n)
    pts = [random_point(rng, dim) for _ in range(n - 1)]
    doubled = pts[:-1] + [pts[-1], pts[-1]]
    folded = Distribution(P.weights[:-2] + (P.weights[-2] + P.weights[-1],))
    if nested_mixture(P, doubled) != nested_mixture(folded, pts):
        return f"n={n}"
    return None


def _law_distributivity(rng: Random) -> str | None:
    n = rng.randint(1, 5)
    dim = rng.randint(1, 3)
    P = random_distribution(rng, n)
    pts = [random_point(rng, dim) for _ in range(n - 1)]
    nu, om = random_point(rng, dim), random_point(rng, dim)
    r = random_prob(rng)
    joined = pts + [mix(r, nu, om)]
    split_pts = pts + [nu, om]
    split = Distribution(
        P.weights[:-1] + (r * P.weights[-1], (1 - r) * P.weights[-1])
    )
    if nested_mixture(P, joined) != nested_mixture(split, split_pts):
        return f"n={n} r={r}"
    return None


def _law_blending(rng: Random) -> str | None:
    dim = rng.randint(1, 3)
    nu, om, tau = (random_point(rng, dim) for _ in range(3))
    p, r = random_prob(rng), random_prob(rng)
    left = mix(r, mix(p, nu, om), mix(p, nu, tau))
    right = mix(p, nu, mix(r, om, tau))
    if left != right:
        return f"p={p} r={r}"
    return None


CONVEX_LAWS = (
    ("nested-equals-direct", _law_nested_equals_direct),
    ("combining-mixtures", _law_combining),
    ("permuting-mixtures", _law_permuting),
    ("mixture-of-distributions", _law_mixture_of_distributions),
    ("repetitions", _law_repetitions),
    ("distributivity", _law_distributivity),
    ("blending-preserves-mixtures", _law_blending),
)


@dataclass(frozen=True)
class LawResult:
    name: str
    ok: bool
    trials: int
    failures: tuple[str, ...]

    def __bool__(self):
        return self.ok


def run_convex_laws(seed: int = 0, trials: int = 1000) -> tuple[LawResult, ...]:
    out = []
    for name, law in CONVEX_LAWS:
        rng = Random(f"{seed}:{name}")
        failures = []
        for _ in range(trials):
            note = law(rng)
            if note is not None:
                failures.append(note)
                if len(failures) >= 3:
                    break
        out.append(LawResult(name, not failures, trials, tuple(failures)))
    return tuple(out)
