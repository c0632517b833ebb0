"""Shared model kits: a four-state menagerie and the two-bit playground."""

import pathlib

import pytest

from rtk import (
    ApproximationStructure,
    Lumping,
    ResourceTheory,
    SpecMap,
    approx_index,
    close_monoid,
    endo_map,
    insertion_from_lumping,
    space,
)

DATA = pathlib.Path(__file__).resolve().parent.parent / "testdata"


def det(sp, fn):
    """Deterministic endomap from a label function."""
    return endo_map(sp, {lab: [fn(lab)] for lab in sp.labels})


def blur_map(sp, fn):
    """Endomap from a label -> label-set function."""
    return endo_map(sp, {lab: fn(lab) for lab in sp.labels})


@pytest.fixture(scope="session")
def abcd():
    return space("a", "b", "c", "d")


@pytest.fixture(scope="session")
def swap_ab(abcd):
    return det(abcd, lambda s: {"a": "b", "b": "a"}.get(s, s))


@pytest.fixture(scope="session")
def blur_ab(abcd):
    # a, b -> {a b}; c, d fixed
    return blur_map(abcd, lambda s: {"a", "b"} if s in "ab" else {s})


@pytest.fixture(scope="session")
def merge_ab(abcd):
    return det(abcd, lambda s: "a" if s == "b" else s)


def _hamming(x, y):
    return sum(a != b for a, b in zip(x, y))


class TwoBitKit:
    """The two-bit space with its named maps, monoids, and Hamming blurs."""

    def __init__(self):
        self.sp = space("00", "01", "10", "11")
        sp = self.sp
        self.nop = det(sp, lambda s: s)
        self.flip1 = det(sp, lambda s: ("1" if s[0] == "0" else "0") + s[1])
        self.flip2 = det(sp, lambda s: s[0] + ("1" if s[1] == "0" else "0"))
        self.set1z = det(sp, lambda s: "0" + s[1])
        self.set1o = det(sp, lambda s: "1" + s[1])
        self.set2z = det(sp, lambda s: s[0] + "0")
        self.set2o = det(sp, lambda s: s[0] + "1")
        self.exch = det(sp, lambda s: s[1] + s[0])
        self.cyc = det(
            sp, lambda s: {"00": "01", "01": "10", "10": "11", "11": "00"}[s]
        )
        self.tr = det(sp, lambda s: {"00": "01", "01": "00"}.get(s, s))
        self.mrg = det(sp, lambda s: "00" if s == "01" else s)
        self.full = close_monoid([self.cyc, self.tr, self.mrg], cap=300)
        self.bit1 = close_monoid([self.flip1, self.set1z, self.set1o], cap=16)
        self.bit2 = close_monoid([self.flip2, self.set2z, self.set2o], cap=16)
        self.perm = close_monoid([self.cyc, self.tr], cap=30)
        self.iso = close_monoid([self.flip1, self.flip2, self.exch], cap=16)
        self.theory = ResourceTheory(sp, self.full)
        # forget bit 2: classes by the first bit
        self.lump1 = Lumping(
            SpecMap(sp, sp, (0b0011, 0b0011, 0b1100, 0b1100))
        )
        self.ins1 = insertion_from_lumping(self.lump1)
        self.balls = {
            r: blur_map(
                sp, lambda s, r=r: {t for t in sp.labels if _hamming(s, t) <= r}
            )
            for r in range(3)
        }
        self.ham = ApproximationStructure(
            approx_index(
                ["0", "1", "2"],
                [("0", "1"), ("1", "2")],
                "2",
                zero="0",
                chains=[
                    (
                        ["0", "1", "2"],
                        [
                            ("0", "0", "0"),
                            ("0", "1", "1"),
                            ("0", "2", "2"),
                            ("1", "1", "2"),
                            ("1", "2", "2"),
                            ("2", "2", "2"),
                        ],
                    )
                ],
            ),
            {"0": self.balls[0], "1": self.balls[1], "2": self.balls[2]},
        )


@pytest.fixture(scope="session")
def tb():
    return TwoBitKit()
