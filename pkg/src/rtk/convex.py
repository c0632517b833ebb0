"""Exact-rational convex structure: mixtures, hulls, and affine maps.

Points are tuples of Fractions; nothing in this module touches floats.
Hulls are never materialized: specifications stay finite generating
sets, with membership decided by exact linear feasibility and
equivalence by extreme points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import (
    BadProbability,
    DimMismatch,
    LengthMismatch,
    ParseError,
)

Point = tuple[Fraction, ...]


def _as_fraction(x, what: str = "value") -> Fraction:
    if isinstance(x, float):
        raise BadProbability(f"{what} must be exact; got a float")
    return Fraction(x)


def as_point(coords: Iterable) -> Point:
    return tuple(_as_fraction(c, "coordinate") for c in coords)


@dataclass(frozen=True)
class Distribution:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        for w in self.weights:
            if isinstance(w, float) or w < 0:
                raise BadProbability(f"weight {w} is not an exact rational in [0,1]")
        if sum(self.weights) != 1:
            raise BadProbability("weights must sum to exactly 1")

    def __len__(self):
        return len(self.weights)


def distribution(weights: Iterable) -> Distribution:
    return Distribution(tuple(_as_fraction(w, "weight") for w in weights))


@dataclass(frozen=True)
class PointSpec:
    points: frozenset[Point]

    def __post_init__(self):
        if not self.points:
            raise DimMismatch("a point specification needs at least one point")
        dims = {len(p) for p in self.points}
        if len(dims) != 1:
            raise DimMismatch(f"mixed dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return len(next(iter(self.points)))

    def sorted(self) -> tuple[Point, ...]:
        return tuple(sorted(self.points))

    def __len__(self):
        return len(self.points)


def point_spec(points: Iterable[Iterable]) -> PointSpec:
    return PointSpec(frozenset(as_point(p) for p in points))


def _check_prob(p) -> Fraction:
    p = _as_fraction(p, "probability")
    if p < 0 or p > 1:
        raise BadProbability(f"probability {p} outside [0,1]")
    return p


def mix(p, x: Point, y: Point) -> Point:
    p = _check_prob(p)
    if len(x) != len(y):
        raise DimMismatch(f"points of dimension {len(x)} and {len(y)}")
    return tuple(p * a + (1 - p) * b for a, b in zip(x, y))


def nested_coefficients(P: Distribution) -> tuple[Fraction, ...]:
    """p'_k = p_k / prod_{i<k}(1 - p'_i), with exhausted mass giving 0."""
    out = []
    prod = Fraction(1)
    for w in P.weights[:-1]:
        if prod == 0:
            out.append(Fraction(0))
            continue
        c = w / prod
        out.append(c)
        prod *= 1 - c
    return tuple(out)


def nested_mixture(P: Distribution, points: Sequence[Point]) -> Point:
    """Fold pairwise from the right; equals the direct weighted sum."""
    if len(P) != len(points):
        raise LengthMismatch(f"{len(P)} weights for {len(points)} points")
    coeffs = nested_coefficients(P)
    acc = points[-1]
    for k in range(len(points) - 2, -1, -1):
        acc = mix(coeffs[k], points[k], acc)
    return acc


def direct_mixture(P: Distribution, points: Sequence[Point]) -> Point:
    if len(P) != len(points):
        raise LengthMismatch(f"{len(P)} weights for {len(points)} points")
    dim = len(points[0])
    out = [Fraction(0)] * dim
    for w, pt in zip(P.weights, points):
        if len(pt) != dim:
            raise DimMismatch("points of mixed dimension")
        for i in range(dim):
            out[i] += w * pt[i]
    return tuple(out)


def mix_specs(p, V: PointSpec, W: PointSpec) -> PointSpec:
    if V.dim != W.dim:
        raise DimMismatch(f"specs of dimension {V.dim} and {W.dim}")
    return PointSpec(frozenset(mix(p, a, b) for a in V.points for b in W.points))


def _feasible(rows: list[list[Fraction]], rhs: list[Fraction]) -> bool:
    """Exact phase-1 simplex: does some x >= 0 solve rows . x = rhs?

    Bland's rule on fractions; artificial variables drive the objective,
    feasible iff it reaches exactly zero.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    tab = []
    for i in range(m):
        row = list(rows[i]) + [Fraction(0)] * m + [rhs[i]]
        if rhs[i] < 0:
            row = [-v for v in row]
        row[n + i] = Fraction(1)
        tab.append(row)
    basis = [n + i for i in range(m)]
    total = n + m

    while True:
        # reduced cost of column j for min(sum of artificials)
        entering = -1
        for j in range(total):
            cost = Fraction(1) if j >= n else Fraction(0)
            for i in range(m):
                if basis[i] >= n:
                    cost -= tab[i][j]
            if cost < 0:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best = None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][total] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leaving]
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            break  # unbounded cannot happen: the objective is bounded by 0
        piv = tab[leaving][entering]
        tab[leaving] = [v / piv for v in tab[leaving]]
        for i in range(m):
            if i != leaving and tab[i][entering] != 0:
                factor = tab[i][entering]
                tab[i] = [v - factor * w for v, w in zip(tab[i], tab[leaving])]
        basis[leaving] = entering

    sick = sum(tab[i][total] for i in range(m) if basis[i] >= n)
    return sick == 0


def hull_contains(V: PointSpec, x) -> bool:
    """Is x a convex combination of V's points?  Exact feasibility."""
    x = as_point(x)
    if len(x) != V.dim:
        raise DimMismatch(f"point of dimension {len(x)} against {V.dim}")
    if x in V.points:
        return True
    pts = V.sorted()
    rows = [[pt[d] for pt in pts] for d in range(V.dim)]
    rows.append([Fraction(1)] * len(pts))
    rhs = list(x) + [Fraction(1)]
    return _feasible(rows, rhs)


def extreme_points(V: PointSpec) -> PointSpec:
    """Points of V not inside the hull of the others."""
    if len(V) == 1:
        return V
    kept = []
    for p in V.sorted():
        rest = PointSpec(V.points - {p})
        if not hull_contains(rest, p):
            kept.append(p)
    return PointSpec(frozenset(kept))


def prob_equivalent(V: PointSpec, W: PointSpec) -> bool:
    if V.dim != W.dim:
        raise DimMismatch(f"specs of dimension {V.dim} and {W.dim}")
    return extreme_points(V).points == extreme_points(W).points


@dataclass(frozen=True)
class AffineMap:
    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.matrix) != len(self.offset):
            raise DimMismatch("matrix rows must match the offset length")
        widths = {len(r) for r in self.matrix}
        if len(widths) > 1:
            raise DimMismatch("ragged matrix")

    @property
    def out_dim(self) -> int:
        return len(self.offset)

    @property
    def in_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def __call__(self, x: Point) -> Point:
        if len(x) != self.in_dim:
            raise DimMismatch(f"point of dimension {len(x)} into {self.in_dim}")
        return tuple(
            sum(a * v for a, v in zip(row, x)) + c
            for row, c in zip(self.matrix, self.offset)
        )


def affine_map(matrix: Iterable[Iterable], offset: Iterable) -> AffineMap:
    return AffineMap(
        tuple(tuple(_as_fraction(v, "entry") for v in row) for row in matrix),
        tuple(_as_fraction(v, "entry") for v in offset),
    )


def identity_affine(dim: int) -> AffineMap:
    return AffineMap(
        tuple(
            tuple(Fraction(1 if i == j else 0) for j in range(dim))
            for i in range(dim)
        ),
        tuple(Fraction(0) for _ in range(dim)),
    )


def constant_affine(in_dim: int, value: Point) -> AffineMap:
    return AffineMap(
        tuple(tuple(Fraction(0) for _ in range(in_dim)) for _ in value),
        tuple(value),
    )


def compose_affine(f: AffineMap, g: AffineMap) -> AffineMap:
    """f after g."""
    if f.in_dim != g.out_dim:
        raise DimMismatch(f"{g.out_dim} outputs into {f.in_dim} inputs")
    matrix = tuple(
        tuple(
            sum(f.matrix[i][k] * g.matrix[k][j] for k in range(f.in_dim))
            for j in range(g.in_dim)
        )
        for i in range(f.out_dim)
    )
    offset = tuple(
        sum(f.matrix[i][k] * g.offset[k] for k in range(f.in_dim)) + f.offset[i]
        for i in range(f.out_dim)
    )
    return AffineMap(matrix, offset)


def apply_spec(g, V: PointSpec) -> PointSpec:
    return PointSpec(frozenset(g(p) for p in V.points))


def mix_maps(p, f: AffineMap, g: AffineMap) -> AffineMap:
    p = _check_prob(p)
    if f.in_dim != g.in_dim or f.out_dim != g.out_dim:
        raise DimMismatch("blended maps must share both dimensions")
    matrix = tuple(
        tuple(p * a + (1 - p) * b for a, b in zip(ra, rb))
        for ra, rb in zip(f.matrix, g.matrix)
    )
    offset = tuple(p * a + (1 - p) * b for a, b in zip(f.offset, g.offset))
    return AffineMap(matrix, offset)


@dataclass(frozen=True)
class ConvexityReport:
    ok: bool
    witness: str | None = None

    def __bool__(self):
        return self.ok


def check_convexity_preserving(
    g: AffineMap | Callable[[Point], Point],
    V: PointSpec,
    W: PointSpec,
    ps: Sequence,
) -> ConvexityReport:
    """Does g slide through mixtures, and does it respect hulls?"""
    if V.dim != W.dim:
        raise DimMismatch(f"specs of dimension {V.dim} and {W.dim}")
    for p in ps:
        p = _check_prob(p)
        for a in V.sorted():
            for b in W.sorted():
                if g(mix(p, a, b)) != mix(p, g(a), g(b)):
                    return ConvexityReport(False, f"p = {p} on {a}, {b}")
    union = PointSpec(V.points | W.points)
    image = apply_spec(g, union)
    via_extremes = apply_spec(g, extreme_points(union))
    if not prob_equivalent(image, via_extremes):
        return ConvexityReport(False, "hull of image differs from image of hull")
    return ConvexityReport(True)


@dataclass(frozen=True)
class DoublyConvexReport:
    ok: bool
    failures: tuple[str, ...]

    def __bool__(self):
        return self.ok


def check_doubly_convex(
    maps: Sequence[AffineMap], V: PointSpec, ps: Sequence
) -> DoublyConvexReport:
    """Map blends behave like spec blends, and compose past the blend."""
    failures: list[str] = []
    for f in maps:
        if f.in_dim != V.dim or f.out_dim != V.dim:
            raise DimMismatch("maps must be endomorphisms of the spec's space")
    probs = [_check_prob(p) for p in ps]
    for p in probs:
        for i, f in enumerate(maps):
            for j, g in enumerate(maps):
                blended = apply_spec(mix_maps(p, f, g), V)
                specs = mix_specs(p, apply_spec(f, V), apply_spec(g, V))
                if not prob_equivalent(blended, specs):
                    failures.append(f"map blend vs spec blend at p={p}, maps {i},{j}")
    for p in probs:
        for f in maps:
            for g in maps:
                for g2 in maps:
                    left = mix_maps(p, compose_affine(f, g), compose_affine(f, g2))
                    right = compose_affine(f, mix_maps(p, g, g2))
                    if left != right:
                        failures.append(f"pre-composition law fails at p={p}")
                    left = mix_maps(p, compose_affine(g, f), compose_affine(g2, f))
                    right = compose_affine(mix_maps(p, g, g2), f)
                    if left != right:
                        failures.append(f"post-composition law fails at p={p}")
    return DoublyConvexReport(not failures, tuple(failures))


def format_point(p: Point) -> str:
    return " ".join(
        str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        for c in p
    )


def format_points(V: PointSpec) -> str:
    return "\n".join(format_point(p) for p in V.sorted()) + "\n"


def parse_points(text: str, *, start_line: int = 1) -> PointSpec:
    """One point per line; coordinates as integers or num/den tokens."""
    pts: list[Point] = []
    dim: int | None = None
    for off, raw in enumerate(text.splitlines()):
        lineno = start_line + off
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        coords = []
        col = 1
        for token in line.split():
            col = raw.index(token, col - 1) + 1
            try:
                coords.append(Fraction(token))
            except (ValueError, ZeroDivisionError):
                raise ParseError(lineno, col, f"bad coordinate {token!r}")
        if dim is None:
            dim = len(coords)
        elif len(coords) != dim:
            raise ParseError(
                lineno, 1, f"point of dimension {len(coords)}, expected {dim}"
            )
        pts.append(tuple(coords))
    if not pts:
        raise ParseError(start_line, 1, "no points found")
    return PointSpec(frozenset(pts))
