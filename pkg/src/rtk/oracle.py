"""Brute-force reference implementations.

These deliberately share nothing with the optimized paths except the core
data types. They are slow, obvious, and used to validate every optimized
operation on small instances.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import TooLarge
from .spec_core import SpecMap, Specification
from .theory import ReachWitness, ResourceTheory, TransformationMonoid


def oracle_reaches(
    T: ResourceTheory, V: Specification, W: Specification
) -> ReachWitness:
    if T.space.size > 6:
        raise TooLarge("oracle_reaches handles at most 6 states")
    for f in T.monoid.elements:
        image = set()
        for i in V.members:
            for j in range(T.space.size):
                if (f.table[i] >> j) & 1:
                    image.add(j)
        if all(((W.mask >> j) & 1) for j in image):
            return ReachWitness(True, f)
    return ReachWitness(False, None)


def oracle_commutant(
    T: TransformationMonoid, A: tuple[SpecMap, ...] | list[SpecMap]
) -> tuple[SpecMap, ...]:
    if len(T.elements) > 4096:
        raise TooLarge("oracle_commutant handles at most 4096 elements")

    def image(f: SpecMap, mask: int) -> int:
        out = 0
        for i in range(T.space.size):
            if (mask >> i) & 1:
                out |= f.table[i]
        return out

    found = []
    for g in T.elements:
        ok = True
        for f in A:
            for i in range(T.space.size):
                if image(f, g.table[i]) != image(g, f.table[i]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(g)
    return tuple(found)


def oracle_hull_contains(
    points, x: tuple[Fraction, ...]
) -> bool:
    """Exact membership by case analysis: dim-1 interval, dim-2 triangles.

    Accepts a PointSpec or any iterable of coordinate tuples.
    """
    points = sorted(points.points) if hasattr(points, "points") else list(points)
    if not points:
        return False
    dim = len(points[0])
    if dim > 2:
        raise TooLarge("oracle_hull_contains handles dimension at most 2")
    if len(points) > 6:
        raise TooLarge("oracle_hull_contains handles at most 6 points")
    if len(x) != dim:
        raise TooLarge("oracle_hull_contains: query dimension differs")

    if x in points:
        return True
    if dim == 1:
        lo = min(p[0] for p in points)
        hi = max(p[0] for p in points)
        return lo <= x[0] <= hi

    def on_segment(p, q) -> bool:
        # cross product zero and x within the bounding box
        cross = (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0])
        if cross != 0:
            return False
        return min(p[0], q[0]) <= x[0] <= max(p[0], q[0]) and min(
            p[1], q[1]
        ) <= x[1] <= max(p[1], q[1])

    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if on_segment(points[i], points[j]):
                return True
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                p, q, r = points[i], points[j], points[k]
                det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1])
                if det == 0:
                    continue
                a = ((x[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (x[1] - p[1])) / det
                b = ((q[0] - p[0]) * (x[1] - p[1]) - (x[0] - p[0]) * (q[1] - p[1])) / det
                c = 1 - a - b
                if a >= 0 and b >= 0 and c >= 0:
                    return True
    return False
