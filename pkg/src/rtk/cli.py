"""Theory files and the rtk command line.

One file carries a state space plus named maps, monoids, lumpings,
approximation structures, and rational point sets; every subcommand
reads such a file and prints a deterministic report: human lines, then
`---`, then machine-readable key: value pairs.

Exit codes: 0 positive verdict, 1 negative verdict, 2 input error,
3 cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CapExceeded,
    DuplicateName,
    EmptyIntersection,
    Incompatible,
    IncompatibleSideResource,
    IncompatibleW,
    InternalInconsistency,
    LumpingOrderViolated,
    NotComplete,
    NotEndomorphism,
    NotIndependent,
    NotInJoin,
    NotIsomorphism,
    NotOrderEmbedding,
    NotSubtheory,
    ParseError,
    RtkError,
    UnknownReference,
)
from .spec_core import (
    SpecMap,
    Specification,
    StateSpace,
    bits,
    combine,
    compose,
    full_spec,
    is_endo,
    make_spec,
    maps_equal,
)
from .theory import (
    DEFAULT_CAP,
    ResourceTheory,
    TransformationMonoid,
    close_monoid,
    combine_theories,
    is_conserved,
    quotient,
    reaches,
)
from .embed import (
    Lumping,
    classify_embedding,
    decompose_embedding,
    effective_theory,
    insertion_from_lumping,
    nest,
    restrict_theory,
    verify_lumping,
)
from .locality import (
    DEFAULT_LATTICE_CAP,
    as_subsystem,
    bicommutant,
    commutant,
    derive_agents,
    enumerate_complete,
    n_copies,
    verify_swap,
)
from .approx import (
    ApproxIndex,
    ApproximationStructure,
    approx_index,
    approximate,
    check_triangle,
    is_robust,
    is_stable,
    reduce_structure,
    verify_structure,
)
from .convex import PointSpec, extreme_points, format_point, hull_contains, prob_equivalent
from .laws import run_convex_laws
from .oracle import oracle_commutant, oracle_hull_contains, oracle_reaches


class _CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


class _ArgError(Exception):
    pass


@dataclass(frozen=True)
class MonoidDef:
    gens: tuple[str, ...]
    cap: int | None = None


@dataclass(frozen=True)
class ApproxDef:
    index: ApproxIndex
    eps_maps: tuple[tuple[str, str], ...]  # (label, map name), index order


@dataclass
class TheoryFile:
    space: StateSpace | None = None
    maps: dict[str, SpecMap] = field(default_factory=dict)
    monoids: dict[str, MonoidDef] = field(default_factory=dict)
    lumpings: dict[str, Lumping] = field(default_factory=dict)
    approxes: dict[str, ApproxDef] = field(default_factory=dict)
    points: dict[str, PointSpec] = field(default_factory=dict)


# ---------------------------------------------------------------- parsing


def _arrow_tokens(line_no: int, raw: str) -> list[tuple[str, list[str]]]:
    text = raw.replace("->", " -> ").replace("{", " { ").replace("}", " } ")
    toks = text.split()
    out = []
    i = 0
    while i < len(toks):
        lhs = toks[i]
        if lhs in ("->", "{", "}"):
            raise ParseError(line_no, 1, f"unexpected {lhs!r}")
        if i + 1 >= len(toks) or toks[i + 1] != "->":
            raise ParseError(line_no, 1, f"expected '->' after {lhs!r}")
        i += 2
        if i >= len(toks):
            raise ParseError(line_no, 1, f"missing image for {lhs!r}")
        if toks[i] == "{":
            i += 1
            rhs = []
            while i < len(toks) and toks[i] != "}":
                if toks[i] in ("->", "{"):
                    raise ParseError(line_no, 1, f"unexpected {toks[i]!r} in image")
                rhs.append(toks[i])
                i += 1
            if i >= len(toks):
                raise ParseError(line_no, 1, "unclosed '{'")
            i += 1
            if not rhs:
                raise ParseError(line_no, 1, f"empty image for {lhs!r}")
        else:
            rhs = [toks[i]]
            i += 1
        out.append((lhs, rhs))
    return out


def _parse_coords(line_no: int, raw: str) -> tuple[Fraction, ...]:
    coords = []
    col = 1
    for token in raw.split():
        col = raw.index(token, col - 1) + 1
        try:
            coords.append(Fraction(token))
        except (ValueError, ZeroDivisionError):
            raise ParseError(line_no, col, f"bad coordinate {token!r}")
    return tuple(coords)


class _SectionParser:
    def __init__(self):
        self.model = TheoryFile()
        self.kind: str | None = None
        self.name = ""
        self.header_line = 0
        self.arrows: list[tuple[str, list[str], int]] = []
        self.mono: dict = {}
        self.approx: dict = {}
        self.pts: list[tuple[tuple[Fraction, ...], int]] = []
        self.names_taken: set[str] = set()

    # -- section lifecycle

    def open(self, line_no: int, kind: str, name: str):
        self.close()
        if kind not in ("states", "map", "monoid", "lumping", "approx", "points"):
            raise ParseError(line_no, 1, f"unknown section kind {kind!r}")
        if kind == "states":
            if name:
                raise ParseError(line_no, 1, "[states] takes no name")
            if self.model.space is not None:
                raise ParseError(line_no, 1, "duplicate [states] section")
        else:
            if not name:
                raise ParseError(line_no, 1, f"[{kind}] needs a name")
            if name in self.names_taken:
                raise DuplicateName(f"section name {name!r} is already taken")
        self.kind, self.name, self.header_line = kind, name, line_no
        self.arrows = []
        self.mono = {"gens": [], "cap": None}
        self.approx = {
            "index": [],
            "order": [],
            "max": None,
            "zero": None,
            "eps": [],
            "chains": [],
        }
        self.pts = []
        self.states: list[tuple[str, int]] = []

    def line(self, line_no: int, raw: str):
        if self.kind is None:
            raise ParseError(line_no, 1, "content outside any section")
        if self.kind == "states":
            for tok in raw.split():
                self.states.append((tok, line_no))
        elif self.kind in ("map", "lumping"):
            for lhs, rhs in _arrow_tokens(line_no, raw):
                self.arrows.append((lhs, rhs, line_no))
        elif self.kind == "monoid":
            self._monoid_line(line_no, raw)
        elif self.kind == "approx":
            self._approx_line(line_no, raw)
        elif self.kind == "points":
            self.pts.append((_parse_coords(line_no, raw), line_no))

    def close(self):
        if self.kind is None:
            return
        finish = getattr(self, f"_finish_{self.kind}")
        finish()
        if self.kind != "states":
            self.names_taken.add(self.name)
        self.kind = None

    # -- per-kind line handlers

    def _monoid_line(self, line_no: int, raw: str):
        key, sep, rest = raw.partition("=")
        key = key.strip()
        if not sep:
            raise ParseError(line_no, 1, "monoid lines look like 'gen = ...'")
        if key == "gen":
            self.mono["gens"].extend(rest.split())
        elif key == "cap":
            toks = rest.split()
            if len(toks) != 1 or not toks[0].isdigit() or int(toks[0]) < 1:
                raise ParseError(line_no, 1, "cap wants one positive integer")
            if self.mono["cap"] is not None:
                raise ParseError(line_no, 1, "duplicate cap line")
            self.mono["cap"] = int(toks[0])
        else:
            raise ParseError(line_no, 1, f"unknown monoid directive {key!r}")

    def _approx_line(self, line_no: int, raw: str):
        toks = raw.split()
        head = toks[0]
        if head == "index":
            self.approx["index"].extend(toks[1:])
        elif head == "order":
            for t in toks[1:]:
                a, sep, b = t.partition("<")
                if not sep or not a or not b:
                    raise ParseError(line_no, 1, f"order wants 'a<b', got {t!r}")
                self.approx["order"].append((a, b))
        elif head in ("max", "zero"):
            if len(toks) != 2:
                raise ParseError(line_no, 1, f"{head} wants exactly one label")
            if self.approx[head] is not None:
                raise ParseError(line_no, 1, f"duplicate {head} line")
            self.approx[head] = toks[1]
        elif head == "eps":
            rest = raw.strip()[len("eps") :]
            left, sep, right = rest.partition("=")
            label, mapname = left.split(), right.split()
            if not sep or len(label) != 1 or len(mapname) != 1:
                raise ParseError(line_no, 1, "eps lines look like 'eps L = MAP'")
            self.approx["eps"].append((label[0], mapname[0], line_no))
        elif head == "chain":
            rest = raw.strip()[len("chain") :]
            members_part, sep, sums_part = rest.partition(":")
            members = members_part.split()
            if not members:
                raise ParseError(line_no, 1, "chain wants at least one member")
            sums = []
            for t in sums_part.split():
                left, eq, total = t.partition("=")
                a, plus, b = left.partition("+")
                if not eq or not plus or not a or not b or not total:
                    raise ParseError(line_no, 1, f"chain sum wants 'a+b=c', got {t!r}")
                sums.append((a, b, total))
            self.approx["chains"].append((members, sums))
        else:
            raise ParseError(line_no, 1, f"unknown approx directive {head!r}")

    # -- finishers

    def _finish_states(self):
        seen = set()
        for tok, line_no in self.states:
            if tok in seen:
                raise ParseError(line_no, 1, f"duplicate state {tok!r}")
            seen.add(tok)
        if not self.states:
            raise ParseError(self.header_line, 1, "[states] lists no states")
        self.model.space = StateSpace(tuple(tok for tok, _ in self.states))

    def _lookup_map(self, name: str) -> SpecMap:
        if name in self.model.maps:
            return self.model.maps[name]
        if name in self.model.lumpings:
            return self.model.lumpings[name].map
        raise UnknownReference(f"no map named {name!r} defined before this point")

    def _build_map(self) -> SpecMap:
        space = self.model.space
        if space is None:
            raise ParseError(self.header_line, 1, "no [states] section yet")
        known = set(space.labels)
        lhs_labels = [a for a, _, _ in self.arrows]
        inside = [a in known for a in lhs_labels]
        if all(inside):
            source = space
        elif any(inside):
            raise ParseError(
                self.header_line, 1, "arrow sources mix states and new labels"
            )
        else:
            seen = set()
            for lhs, _, line_no in self.arrows:
                if lhs in seen:
                    raise ParseError(line_no, 1, f"duplicate arrow for {lhs!r}")
                seen.add(lhs)
            source = StateSpace(tuple(dict.fromkeys(lhs_labels)))
        table = [0] * source.size
        given = [False] * source.size
        for lhs, rhs, line_no in self.arrows:
            i = source.index(lhs)
            if given[i]:
                raise ParseError(line_no, 1, f"duplicate arrow for {lhs!r}")
            given[i] = True
            mask = 0
            for lab in rhs:
                if lab not in known:
                    raise ParseError(line_no, 1, f"unknown state {lab!r}")
                mask |= 1 << space.index(lab)
            table[i] = mask
        for i, ok in enumerate(given):
            if not ok:
                raise ParseError(
                    self.header_line, 1, f"no image for state {source.labels[i]!r}"
                )
        return SpecMap(source, space, tuple(table))

    def _finish_map(self):
        self.model.maps[self.name] = self._build_map()

    def _finish_lumping(self):
        f = self._build_map()
        if f.source != f.target:
            raise ParseError(
                self.header_line, 1, "a lumping must map the state space to itself"
            )
        report = verify_lumping(f)
        if not report:
            raise ParseError(
                self.header_line, 1, f"not a lumping: {report.failure}"
            )
        self.model.lumpings[self.name] = Lumping(f)

    def _finish_monoid(self):
        for g in self.mono["gens"]:
            f = self._lookup_map(g)
            if not is_endo(f):
                raise NotEndomorphism(
                    f"monoid generator {g!r} is not an endomap of the state space"
                )
        self.model.monoids[self.name] = MonoidDef(
            tuple(self.mono["gens"]), self.mono["cap"]
        )

    def _finish_approx(self):
        labels = self.approx["index"]
        if not labels:
            raise ParseError(self.header_line, 1, "approx needs an index line")
        if self.approx["max"] is None:
            raise ParseError(self.header_line, 1, "approx needs a max line")
        try:
            index = approx_index(
                labels,
                self.approx["order"],
                self.approx["max"],
                zero=self.approx["zero"],
                chains=self.approx["chains"],
            )
        except (RtkError, ValueError) as e:
            raise ParseError(self.header_line, 1, str(e))
        by_label: dict[str, str] = {}
        for label, mapname, line_no in self.approx["eps"]:
            if label not in index.elements:
                raise ParseError(line_no, 1, f"eps names unknown label {label!r}")
            if label in by_label:
                raise ParseError(line_no, 1, f"duplicate eps line for {label!r}")
            f = self._lookup_map(mapname)
            if not is_endo(f):
                raise ParseError(line_no, 1, f"map {mapname!r} is not an endomap")
            by_label[label] = mapname
        for label in index.elements:
            if label not in by_label:
                raise ParseError(
                    self.header_line, 1, f"no eps line for label {label!r}"
                )
        eps_maps = tuple((lab, by_label[lab]) for lab in index.elements)
        ApproximationStructure(  # validate now; built again on demand
            index, {lab: self._lookup_map(name) for lab, name in eps_maps}
        )
        self.model.approxes[self.name] = ApproxDef(index, eps_maps)

    def _finish_points(self):
        if not self.pts:
            raise ParseError(self.header_line, 1, "points section lists no points")
        dim = len(self.pts[0][0])
        for coords, line_no in self.pts:
            if len(coords) != dim:
                raise ParseError(
                    line_no, 1, f"point of dimension {len(coords)}, expected {dim}"
                )
        self.model.points[self.name] = PointSpec(
            frozenset(coords for coords, _ in self.pts)
        )


def parse_theory(text: str) -> TheoryFile:
    """Parse a theory file; every failure carries a line and column."""
    p = _SectionParser()
    for line_no, raw in enumerate(text.splitlines(), 1):
        content = raw.split("#", 1)[0]
        stripped = content.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            end = stripped.find("]")
            if end < 0:
                raise ParseError(line_no, 1, "unterminated section header")
            inside = stripped[1:end].split()
            if not inside or len(inside) > 2:
                raise ParseError(line_no, 1, "section header wants '[kind name]'")
            kind = inside[0]
            name = inside[1] if len(inside) > 1 else ""
            p.open(line_no, kind, name)
            rest = stripped[end + 1 :].strip()
            if rest:
                p.line(line_no, rest)
        else:
            p.line(line_no, stripped)
    p.close()
    return p.model


# ---------------------------------------------------------------- printing


def _image(target: StateSpace, mask: int) -> str:
    labs = [target.labels[i] for i in bits(mask)]
    if len(labs) == 1:
        return labs[0]
    return "{" + " ".join(labs) + "}"


def _arrows(f: SpecMap) -> str:
    return " ".join(
        f"{f.source.labels[i]}->{_image(f.target, f.table[i])}"
        for i in range(f.source.size)
    )


def format_model(m: TheoryFile) -> str:
    """Canonical text for a model; parsing it back yields an equal model."""
    out: list[str] = []
    if m.space is not None:
        out.append("[states] " + " ".join(m.space.labels))
        out.append("")
    for name, f in m.maps.items():
        out.append(f"[map {name}]")
        for i in range(f.source.size):
            out.append(f"{f.source.labels[i]} -> {_image(f.target, f.table[i])}")
        out.append("")
    for name, lam in m.lumpings.items():
        out.append(f"[lumping {name}]")
        f = lam.map
        for i in range(f.source.size):
            out.append(f"{f.source.labels[i]} -> {_image(f.target, f.table[i])}")
        out.append("")
    for name, d in m.monoids.items():
        out.append(f"[monoid {name}]")
        out.append("gen =" + ("" if not d.gens else " " + " ".join(d.gens)))
        if d.cap is not None:
            out.append(f"cap = {d.cap}")
        out.append("")
    for name, a in m.approxes.items():
        out.append(f"[approx {name}]")
        out.append("index " + " ".join(a.index.elements))
        pos = {lab: i for i, lab in enumerate(a.index.elements)}
        strict = sorted(
            ((x, y) for x, y in a.index.leq if x != y),
            key=lambda p: (pos[p[0]], pos[p[1]]),
        )
        if strict:
            out.append("order " + " ".join(f"{x}<{y}" for x, y in strict))
        out.append(f"max {a.index.max_element}")
        if a.index.zero_element is not None:
            out.append(f"zero {a.index.zero_element}")
        for lab, mapname in a.eps_maps:
            out.append(f"eps {lab} = {mapname}")
        for chain in a.index.chains:
            line = "chain " + " ".join(chain.members)
            if chain.sums:
                line += " : " + " ".join(f"{x}+{y}={z}" for x, y, z in chain.sums)
            out.append(line)
        out.append("")
    for name, ps in m.points.items():
        out.append(f"[points {name}]")
        for pt in ps.sorted():
            out.append(format_point(pt))
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"


def export_dot(names: list[str], leq: set[tuple[int, int]]) -> str:
    """Transitively reduced DOT digraph of a finite order, byte-stable."""
    strict = {(i, j) for i, j in leq if i != j}
    reduced = sorted(
        (i, j)
        for i, j in strict
        if not any((i, k) in strict and (k, j) in strict for k in range(len(names)))
    )
    lines = ["digraph rtk {", "  rankdir=BT;"]
    for n in names:
        lines.append(f'  "{n}";')
    for i, j in reduced:
        lines.append(f'  "{names[i]}" -> "{names[j]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- plumbing


_MONOID_CACHE: dict[tuple, TransformationMonoid] = {}


def _load(ns) -> tuple[TheoryFile, str, str]:
    try:
        with open(ns.file, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise _CliError(f"cannot read {ns.file}: {e.strerror}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise _CliError(f"{ns.file} is not UTF-8")
    model = parse_theory(text)
    return model, os.path.abspath(ns.file), hashlib.sha256(data).hexdigest()


def _need_space(model: TheoryFile) -> StateSpace:
    if model.space is None:
        raise _CliError("the file has no [states] section")
    return model.space


def _env_cap() -> int:
    raw = os.environ.get("RTK_CAP")
    if raw is None:
        return DEFAULT_CAP
    if not raw.isdigit() or int(raw) < 1:
        raise _CliError(f"RTK_CAP must be a positive integer, got {raw!r}")
    return int(raw)


def _resolve_monoid(
    model: TheoryFile, name: str, path: str, digest: str
) -> TransformationMonoid:
    if name not in model.monoids:
        raise UnknownReference(f"no monoid named {name!r}")
    mdef = model.monoids[name]
    cap = mdef.cap if mdef.cap is not None else _env_cap()
    key = (path, digest, name, cap)
    if key not in _MONOID_CACHE:
        gens = []
        for g in mdef.gens:
            gens.append(model.maps[g] if g in model.maps else model.lumpings[g].map)
        _MONOID_CACHE[key] = close_monoid(gens, cap, space=_need_space(model))
    return _MONOID_CACHE[key]


def _get(table: dict, name: str, what: str):
    if name not in table:
        raise UnknownReference(f"no {what} named {name!r}")
    return table[name]


def _get_map(model: TheoryFile, name: str) -> SpecMap:
    if name in model.maps:
        return model.maps[name]
    if name in model.lumpings:
        return model.lumpings[name].map
    raise UnknownReference(f"no map named {name!r}")


def _cli_spec(space: StateSpace, text: str) -> Specification:
    labels = text.split()
    if not labels:
        raise _CliError("empty specification")
    return make_spec(space, labels)


def _build_approx(model: TheoryFile, name: str) -> ApproximationStructure:
    adef = _get(model.approxes, name, "approx structure")
    family = {lab: _get_map(model, mapname) for lab, mapname in adef.eps_maps}
    return ApproximationStructure(adef.index, family)


def _render(lines: list[str], kv: list[tuple[str, object]]) -> str:
    parts = list(lines)
    parts.append("---")
    parts.extend(f"{k}: {v}" for k, v in kv)
    return "\n".join(parts) + "\n"


def _ids(monoid: TransformationMonoid) -> dict[tuple, str]:
    return {f.table: f"t{i}" for i, f in enumerate(monoid.elements)}


def _monoid_lines(monoid: TransformationMonoid) -> list[str]:
    return [
        f"t{i}: {_arrows(f)}" for i, f in enumerate(monoid.elements)
    ]


def _emit_dot(ns, lines: list[str], kv: list, names: list[str], leq: set):
    if not getattr(ns, "dot", None):
        return
    text = export_dot(names, leq)
    if ns.dot == "-":
        lines.append("")
        lines.extend(text.rstrip("\n").split("\n"))
    else:
        with open(ns.dot, "w", encoding="utf-8") as fh:
            fh.write(text)
        lines.append(f"dot written: {ns.dot}")
    kv.append(("dot", ns.dot))


# ---------------------------------------------------------------- commands


def _cmd_check(ns):
    model, _, _ = _load(ns)
    lines = []
    kv: list[tuple[str, object]] = [("verdict", "ok")]
    if model.space is not None:
        lines.append("states: " + " ".join(model.space.labels))
        kv.append(("states", model.space.size))
    for name, f in model.maps.items():
        lines.append(f"map {name}: {_arrows(f)}")
    for name, lam in model.lumpings.items():
        lines.append(f"lumping {name}: {_arrows(lam.map)}")
    for name, d in model.monoids.items():
        cap = f" (cap {d.cap})" if d.cap is not None else ""
        gens = " ".join(d.gens) if d.gens else "(none)"
        lines.append(f"monoid {name}: gen = {gens}{cap}")
    for name, a in model.approxes.items():
        lines.append(f"approx {name}: labels " + " ".join(a.index.elements))
    for name, ps in model.points.items():
        lines.append(f"points {name}: {len(ps)} points of dimension {ps.dim}")
    kv.extend(
        [
            ("maps", len(model.maps)),
            ("monoids", len(model.monoids)),
            ("lumpings", len(model.lumpings)),
            ("approx", len(model.approxes)),
            ("points", len(model.points)),
        ]
    )
    return 0, _render(lines, kv)


def _cmd_reach(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    T = ResourceTheory(space, _resolve_monoid(model, ns.monoid, path, digest))
    V = _cli_spec(space, ns.frm)
    W = _cli_spec(space, ns.to)
    wit = reaches(T, V, W)
    kv: list[tuple[str, object]] = []
    lines = []
    if ns.oracle:
        if oracle_reaches(T, V, W).found != wit.found:
            raise InternalInconsistency("reaches disagrees with its oracle")
        kv.append(("oracle", "agree"))
    if wit.found:
        tid = _ids(T.monoid)[wit.map.table]
        lines.append(f"reachable: yes via {tid}")
        lines.append(f"{tid}: {_arrows(wit.map)}")
        return 0, _render(lines, [("verdict", "reachable"), ("witness", tid)] + kv)
    lines.append("reachable: no")
    return 1, _render(lines, [("verdict", "unreachable")] + kv)


def _cmd_free(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    T = ResourceTheory(space, _resolve_monoid(model, ns.monoid, path, digest))
    V = _cli_spec(space, ns.spec)
    wit = reaches(T, full_spec(space), V)
    kv: list[tuple[str, object]] = []
    if ns.oracle:
        if oracle_reaches(T, full_spec(space), V).found != wit.found:
            raise InternalInconsistency("reaches disagrees with its oracle")
        kv.append(("oracle", "agree"))
    if wit.found:
        tid = _ids(T.monoid)[wit.map.table]
        return 0, _render(
            [f"free: yes via {tid}"], [("verdict", "free"), ("witness", tid)] + kv
        )
    return 1, _render(["free: no"], [("verdict", "not-free")] + kv)


def _cmd_quotient(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    T = ResourceTheory(space, _resolve_monoid(model, ns.monoid, path, digest))
    if ns.spec:
        candidates = [_cli_spec(space, s) for s in ns.spec]
    else:
        if space.size > 6:
            raise _CliError(
                "too many specifications to enumerate; pass --spec candidates"
            )
        candidates = [
            Specification(space, m) for m in range(1, space.full_mask + 1)
        ]
    q = quotient(T, candidates)
    lines = []
    for i, cls in enumerate(q.classes):
        members = " ".join(repr(V) for V in cls)
        lines.append(f"class {i}: {members}")
    lines.append(f"free class: {q.class_label(q.free_class)}")
    kv = [
        ("verdict", "ok"),
        ("classes", len(q.classes)),
        ("free", q.free_class),
    ]
    names = [q.class_label(i) for i in range(len(q.classes))]
    _emit_dot(ns, lines, kv, names, set(q.leq))
    return 0, _render(lines, kv)


def _cmd_conserved(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    T = ResourceTheory(space, _resolve_monoid(model, ns.monoid, path, digest))
    V = _cli_spec(space, ns.spec)
    if is_conserved(T, V):
        return 0, _render(["conserved: yes"], [("verdict", "conserved")])
    return 1, _render(["conserved: no"], [("verdict", "not-conserved")])


def _cmd_combine(ns):
    model, path, digest = _load(ns)
    if bool(ns.spec) == bool(ns.monoid):
        raise _CliError("pass either two --spec values or two --monoid names")
    if ns.spec:
        if len(ns.spec) < 2:
            raise _CliError("combining needs at least two --spec values")
        space = _need_space(model)
        acc = _cli_spec(space, ns.spec[0])
        try:
            for s in ns.spec[1:]:
                acc = combine(acc, _cli_spec(space, s))
        except Incompatible as e:
            return 1, _render(
                [f"combined: nothing ({e})"], [("verdict", "incompatible")]
            )
        return 0, _render(
            [f"combined: {acc!r}"], [("verdict", "ok"), ("combined", repr(acc))]
        )
    if len(ns.monoid) != 2:
        raise _CliError("combining needs exactly two --monoid names")
    space = _need_space(model)
    Ta = ResourceTheory(space, _resolve_monoid(model, ns.monoid[0], path, digest))
    Tb = ResourceTheory(space, _resolve_monoid(model, ns.monoid[1], path, digest))
    both = combine_theories(Ta, Tb)
    lines = ["shared maps:"] + _monoid_lines(both.monoid)
    return 0, _render(lines, [("verdict", "ok"), ("elements", len(both.monoid))])


def _cmd_lumping(ns):
    model, _, _ = _load(ns)
    f = _get_map(model, ns.map)
    report = verify_lumping(f)
    if not report:
        return 1, _render(
            [f"lumping: no ({report.failure})"],
            [("verdict", "not-lumping"), ("reason", report.failure)],
        )
    lines = ["lumping: yes"]
    kv: list[tuple[str, object]] = [("verdict", "lumping")]
    try:
        ins = insertion_from_lumping(Lumping(f))
    except NotOrderEmbedding as e:
        lines.append(f"reduced space: none ({e})")
        kv.append(("reduced", "none"))
        return 0, _render(lines, kv)
    lines.append("reduced space: " + " ".join(ins.small.labels))
    lines.append(f"e: {_arrows(ins.e)}")
    lines.append(f"h: {_arrows(ins.h)}")
    kv.append(("reduced", ins.small.size))
    return 0, _render(lines, kv)


def _cmd_embed(ns):
    model, _, _ = _load(ns)
    e = _get_map(model, ns.map)
    emb = classify_embedding(e)
    lines = [f"kind: {emb.kind}"]
    kv: list[tuple[str, object]] = [("verdict", "embedding"), ("kind", emb.kind)]
    if emb.adjoint is not None:
        lines.append(f"adjoint: {_arrows(emb.adjoint)}")
    return 0, _render(lines, kv)


def _cmd_decompose(ns):
    model, _, _ = _load(ns)
    e = _get_map(model, ns.map)
    dec = decompose_embedding(e, extensive_first=ns.extensive_first)
    lines = [
        "middle space: " + " ".join(dec.middle.labels),
        f"inner: {_arrows(dec.inner)}",
        f"outer: {_arrows(dec.outer)}",
    ]
    inner_kind = classify_embedding(dec.inner).kind
    outer_kind = classify_embedding(dec.outer).kind
    lines.append(f"inner kind: {inner_kind}")
    lines.append(f"outer kind: {outer_kind}")
    kv = [
        ("verdict", "ok"),
        ("middle", dec.middle.size),
        ("inner", inner_kind),
        ("outer", outer_kind),
    ]
    return 0, _render(lines, kv)


def _cmd_nest(ns):
    model, _, _ = _load(ns)
    lam_in = _get(model.lumpings, ns.inner, "lumping")
    lam_out = _get(model.lumpings, ns.outer, "lumping")
    ins_in = insertion_from_lumping(lam_in)
    ins_out = insertion_from_lumping(lam_out)
    mid = nest(ins_in, ins_out, mode="middle")
    back = nest(mid, ins_out, mode="compose")
    agrees = maps_equal(back.e, ins_in.e) and maps_equal(back.h, ins_in.h)
    lines = [
        "middle insertion into: " + " ".join(ins_out.small.labels),
        f"e: {_arrows(mid.e)}",
        f"h: {_arrows(mid.h)}",
        f"recomposition matches direct insertion: {'yes' if agrees else 'no'}",
    ]
    kv = [
        ("verdict", "ok" if agrees else "mismatch"),
        ("recompose", "match" if agrees else "mismatch"),
    ]
    return (0 if agrees else 1), _render(lines, kv)


def _cmd_restrict(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    T = ResourceTheory(space, _resolve_monoid(model, ns.monoid, path, digest))
    A = _resolve_monoid(model, ns.sub, path, digest)
    ins = insertion_from_lumping(_get(model.lumpings, ns.lumping, "lumping"))
    small = restrict_theory(T, A, ins, cap=_env_cap())
    lines = ["small space: " + " ".join(small.space.labels)]
    lines.extend(_monoid_lines(small.monoid))
    return 0, _render(
        lines, [("verdict", "ok"), ("elements", len(small.monoid))]
    )


def _cmd_effective(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    monoid = _resolve_monoid(model, ns.monoid, path, digest)
    if ns.sub:
        sub = _resolve_monoid(model, ns.sub, path, digest)
        inside = {f.table for f in monoid.elements}
        for f in sub.elements:
            if f.table not in inside:
                raise _CliError(f"--sub {ns.sub!r} is not inside --monoid {ns.monoid!r}")
        monoid = sub
    T = ResourceTheory(space, monoid)
    ins = insertion_from_lumping(_get(model.lumpings, ns.lumping, "lumping"))
    K = _cli_spec(space, ns.side)
    eff = effective_theory(T, ins, K, cap=_env_cap())
    lines = ["small space: " + " ".join(eff.space.labels)]
    lines.extend(_monoid_lines(eff.monoid))
    return 0, _render(lines, [("verdict", "ok"), ("elements", len(eff.monoid))])


def _sub_elements(model, ns_value, path, digest):
    # a subsystem given either as a monoid name or as map names
    names = ns_value.split()
    if len(names) == 1 and names[0] in model.monoids:
        return _resolve_monoid(model, names[0], path, digest).elements
    return tuple(_get_map(model, n) for n in names)


def _cmd_commutant(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    monoid = _resolve_monoid(model, ns.monoid, path, digest)
    elems = _sub_elements(model, ns.sub, path, digest)
    com = commutant(monoid, elems)
    kv: list[tuple[str, object]] = [("verdict", "ok"), ("elements", len(com))]
    if ns.oracle:
        want = {f.table for f in oracle_commutant(monoid, elems)}
        if want != {f.table for f in com.elements}:
            raise InternalInconsistency("commutant disagrees with its oracle")
        kv.append(("oracle", "agree"))
    ids = _ids(monoid)
    lines = ["commutant: " + " ".join(ids[f.table] for f in com.elements)]
    return 0, _render(lines, kv)


def _cmd_bicommutant(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    monoid = _resolve_monoid(model, ns.monoid, path, digest)
    elems = _sub_elements(model, ns.sub, path, digest)
    bic = bicommutant(monoid, elems)
    sub = as_subsystem(monoid, elems)
    complete = {f.table for f in bic.elements} == {f.table for f in sub.elements}
    kv: list[tuple[str, object]] = [
        ("verdict", "ok"),
        ("elements", len(bic)),
        ("complete", "yes" if complete else "no"),
    ]
    if ns.oracle:
        inner = oracle_commutant(monoid, elems)
        want = {f.table for f in oracle_commutant(monoid, inner)}
        if want != {f.table for f in bic.elements}:
            raise InternalInconsistency("bicommutant disagrees with its oracle")
        kv.append(("oracle", "agree"))
    ids = _ids(monoid)
    lines = [
        "bicommutant: " + " ".join(ids[f.table] for f in bic.elements),
        f"complete: {'yes' if complete else 'no'}",
    ]
    return 0, _render(lines, kv)


def _cmd_subsystems(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    monoid = _resolve_monoid(model, ns.monoid, path, digest)
    lat = enumerate_complete(monoid, cap=ns.cap)
    ids = _ids(monoid)
    lines = []
    for i, sub in enumerate(lat.systems):
        members = " ".join(ids[f.table] for f in sub.elements)
        lines.append(f"S{i}: {len(sub)} elements: {members}")
    lines.append(f"bottom: S{lat.bottom}")
    lines.append(f"top: S{lat.top}")
    kv = [
        ("verdict", "ok"),
        ("systems", len(lat)),
        ("bottom", f"S{lat.bottom}"),
        ("top", f"S{lat.top}"),
    ]
    names = [f"S{i}" for i in range(len(lat))]
    leq = {
        (i, j)
        for i in range(len(lat))
        for j in range(len(lat))
        if lat.leq(i, j)
    }
    _emit_dot(ns, lines, kv, names, leq)
    return 0, _render(lines, kv)


def _cmd_independence(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    monoid = _resolve_monoid(model, ns.monoid, path, digest)
    T = ResourceTheory(space, monoid)
    A = as_subsystem(monoid, _sub_elements(model, ns.a, path, digest))
    B = as_subsystem(monoid, _sub_elements(model, ns.b, path, digest))
    report = derive_agents(
        T, A, B, free_composition=ns.free_composition, cap=_env_cap()
    )
    lines = [
        "agent A space: " + " ".join(report.ins_a.small.labels),
        "agent B space: " + " ".join(report.ins_b.small.labels),
        f"agent A theory: {len(report.theory_a.monoid)} maps",
        f"agent B theory: {len(report.theory_b.monoid)} maps",
        f"certificate: {'ok' if report.certified else 'FAIL'}",
    ]
    ok = report.certified
    kv = [
        ("a-size", report.ins_a.small.size),
        ("b-size", report.ins_b.small.size),
        ("certified", "yes" if report.certified else "no"),
    ]
    if report.freely_composable is not None:
        lines.append(
            f"freely composable: {'yes' if report.freely_composable else 'no'}"
        )
        kv.append(("freely-composable", "yes" if report.freely_composable else "no"))
        ok = ok and report.freely_composable
    if report.compatibility is not None:
        lines.append(
            f"compatibility: {'ok' if report.compatibility.ok else 'FAIL'}"
        )
        kv.append(("compatible", "yes" if report.compatibility.ok else "no"))
        ok = ok and report.compatibility.ok
    kv.insert(0, ("verdict", "independent" if ok else "not-independent"))
    return (0 if ok else 1), _render(lines, kv)


def _cmd_swap(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    monoid = _resolve_monoid(model, ns.monoid, path, digest)
    A = as_subsystem(monoid, _sub_elements(model, ns.a, path, digest))
    B = as_subsystem(monoid, _sub_elements(model, ns.b, path, digest))
    u = _get_map(model, ns.u)
    if ns.u_inv:
        u_inv = _get_map(model, ns.u_inv)
    else:
        ident = monoid.identity
        u_inv = next(
            (
                g
                for g in monoid.elements
                if maps_equal(compose(u, g), ident) and maps_equal(compose(g, u), ident)
            ),
            None,
        )
        if u_inv is None:
            raise _CliError("u has no inverse in the monoid; pass --u-inv")
    iso = {f: compose(u, compose(f, u_inv)) for f in A.elements}
    report = verify_swap(monoid, A, B, iso, u, u_inv)
    if report.ok:
        return 0, _render(["swap: ok"], [("verdict", "swap")])
    lines = ["swap: FAIL"] + [f"  - {msg}" for msg in report.failures]
    return 1, _render(lines, [("verdict", "not-swap")])


def _cmd_copies(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    ins = insertion_from_lumping(_get(model.lumpings, ns.lumping, "lumping"))
    V_A = _cli_spec(ins.small, ns.spec)
    swaps = [_get_map(model, n) for n in (ns.swap or [])]
    try:
        out = n_copies(ins, V_A, swaps)
    except Incompatible as e:
        return 1, _render(
            [f"copies: impossible ({e})"], [("verdict", "incompatible")]
        )
    return 0, _render(
        [f"copies: {out!r}"],
        [("verdict", "ok"), ("copies", len(swaps)), ("result", repr(out))],
    )


def _cmd_approx_verify(ns):
    model, _, _ = _load(ns)
    s = _build_approx(model, ns.approx)
    report = verify_structure(s)
    lines = [f"invariants: {'ok' if report.ok else 'FAIL'}"]
    lines.extend(f"  - {msg}" for msg in report.failures)
    lines.append(f"attainable: {'yes' if report.attainable else 'no'}")
    ok = report.ok
    kv = [
        ("attainable", "yes" if report.attainable else "no"),
        ("failures", len(report.failures)),
    ]
    if ns.triangle:
        tri = check_triangle(s, seed=ns.seed)
        lines.append(
            f"triangle: {'ok' if tri.ok else 'FAIL'} ({tri.pairs_checked} pairs)"
        )
        lines.extend(f"  - {msg}" for msg in tri.failures)
        kv.append(("triangle", "ok" if tri.ok else "fail"))
        ok = ok and tri.ok
    kv.insert(0, ("verdict", "ok" if ok else "fail"))
    return (0 if ok else 1), _render(lines, kv)


def _cmd_approx_robust(ns):
    model, path, digest = _load(ns)
    space = _need_space(model)
    T = ResourceTheory(space, _resolve_monoid(model, ns.monoid, path, digest))
    s = _build_approx(model, ns.approx)
    V = _cli_spec(space, ns.spec)
    blurred = approximate(s, V, ns.eps)
    robust = is_robust(T, s, V, ns.eps)
    stable = is_stable(T, s)
    lines = [
        f"blurred: {blurred!r}",
        f"stable theory: {'yes' if stable else 'no'}",
        f"robust: {'yes' if robust else 'no'}",
    ]
    kv = [
        ("verdict", "robust" if robust else "not-robust"),
        ("blurred", repr(blurred)),
        ("stable", "yes" if stable else "no"),
    ]
    return (0 if robust else 1), _render(lines, kv)


def _cmd_approx_reduce(ns):
    model, _, _ = _load(ns)
    s = _build_approx(model, ns.approx)
    ins = insertion_from_lumping(_get(model.lumpings, ns.lumping, "lumping"))
    red = reduce_structure(s, ins)
    lines = ["small space: " + " ".join(ins.small.labels)]
    for eps in red.structure.index.elements:
        lines.append(f"eps {eps}: {_arrows(red.structure.family[eps])}")
    if red.collapsed:
        for a, b in red.collapsed:
            lines.append(f"collapsed: {a} {b}")
    else:
        lines.append("collapsed: none")
    lines.append(f"invariants: {'ok' if red.report.ok else 'FAIL'}")
    lines.extend(f"  - {msg}" for msg in red.report.failures)
    kv = [
        ("verdict", "ok" if red.report.ok else "fail"),
        ("collapsed", len(red.collapsed)),
    ]
    return (0 if red.report.ok else 1), _render(lines, kv)


def _cmd_hull(ns):
    model, _, _ = _load(ns)
    V = _get(model.points, ns.points, "points section")
    coords = []
    for tok in ns.point.split():
        try:
            coords.append(Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise _CliError(f"bad coordinate {tok!r}")
    x = tuple(coords)
    inside = hull_contains(V, x)
    kv: list[tuple[str, object]] = []
    if ns.oracle:
        if oracle_hull_contains(V, x) != inside:
            raise InternalInconsistency("hull_contains disagrees with its oracle")
        kv.append(("oracle", "agree"))
    if inside:
        return 0, _render(["contains: yes"], [("verdict", "contains")] + kv)
    return 1, _render(["contains: no"], [("verdict", "outside")] + kv)


def _oracle_extremes(V: PointSpec):
    for p in V.sorted():
        if len(V) == 1:
            continue
        rest = PointSpec(V.points - {p})
        if hull_contains(rest, p) != oracle_hull_contains(rest, p):
            raise InternalInconsistency("hull_contains disagrees with its oracle")


def _cmd_extreme(ns):
    model, _, _ = _load(ns)
    V = _get(model.points, ns.points, "points section")
    kv: list[tuple[str, object]] = []
    if ns.oracle:
        _oracle_extremes(V)
        kv.append(("oracle", "agree"))
    E = extreme_points(V)
    lines = [format_point(p) for p in E.sorted()]
    return 0, _render(
        lines, [("verdict", "ok"), ("extreme", len(E)), ("of", len(V))] + kv
    )


def _cmd_prob_equiv(ns):
    model, _, _ = _load(ns)
    V = _get(model.points, ns.points, "points section")
    W = _get(model.points, ns.points_b, "points section")
    kv: list[tuple[str, object]] = []
    if ns.oracle:
        _oracle_extremes(V)
        _oracle_extremes(W)
        kv.append(("oracle", "agree"))
    if prob_equivalent(V, W):
        return 0, _render(["equivalent: yes"], [("verdict", "equivalent")] + kv)
    return 1, _render(["equivalent: no"], [("verdict", "different")] + kv)


def _cmd_laws(ns):
    results = run_convex_laws(ns.seed, ns.trials)
    lines = []
    for r in results:
        mark = "ok" if r.ok else "FAIL"
        lines.append(f"{r.name}: {mark} ({r.trials} trials)")
        lines.extend(f"  - {msg}" for msg in r.failures)
    ok = all(r.ok for r in results)
    kv = [
        ("verdict", "ok" if ok else "fail"),
        ("laws", len(results)),
        ("trials", ns.trials),
    ]
    return (0 if ok else 1), _render(lines, kv)


# ---------------------------------------------------------------- wiring


class _Argv(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    top = _Argv(prog="rtk", description="finite resource theories of knowledge")
    subs = top.add_subparsers(dest="command", required=True, metavar="command")

    def sub(name, func, *, file=True, seed=False, oracle=False, helptext=""):
        p = subs.add_parser(name, help=helptext)
        if file:
            p.add_argument("file", help="theory file")
        if seed:
            p.add_argument("--seed", type=_u64, default=0)
        if oracle:
            p.add_argument("--oracle", action="store_true")
        p.set_defaults(func=func)
        return p

    sub("check", _cmd_check, helptext="parse a file and list its sections")

    p = sub("reach", _cmd_reach, oracle=True, helptext="can --from reach --to under a monoid")
    p.add_argument("--monoid", required=True)
    p.add_argument("--from", dest="frm", required=True)
    p.add_argument("--to", required=True)

    p = sub("free", _cmd_free, oracle=True, helptext="is a spec reachable from the full space")
    p.add_argument("--monoid", required=True)
    p.add_argument("--spec", required=True)

    p = sub("quotient", _cmd_quotient, helptext="reachability classes and their order")
    p.add_argument("--monoid", required=True)
    p.add_argument("--spec", action="append")
    p.add_argument("--dot")

    p = sub("conserved", _cmd_conserved, helptext="is a spec fixed by every element")
    p.add_argument("--monoid", required=True)
    p.add_argument("--spec", required=True)

    p = sub("combine", _cmd_combine, helptext="combine specs, or two theories")
    p.add_argument("--spec", action="append")
    p.add_argument("--monoid", action="append")

    p = sub("lumping", _cmd_lumping, helptext="verify a map is a lumping and reduce it")
    p.add_argument("--map", required=True)

    p = sub("embed", _cmd_embed, helptext="classify a map as a spec embedding")
    p.add_argument("--map", required=True)

    p = sub("decompose", _cmd_decompose, helptext="factor an embedding, extensive x intensive")
    p.add_argument("--map", required=True)
    p.add_argument("--extensive-first", action="store_true")

    p = sub("nest", _cmd_nest, helptext="middle insertion between nested lumpings")
    p.add_argument("--inner", required=True)
    p.add_argument("--outer", required=True)

    p = sub("restrict", _cmd_restrict, helptext="restrict a monoid to a reduced space")
    p.add_argument("--monoid", required=True)
    p.add_argument("--sub", required=True)
    p.add_argument("--lumping", required=True)

    p = sub("effective", _cmd_effective, helptext="effective theory given a side resource")
    p.add_argument("--monoid", required=True)
    p.add_argument("--sub")
    p.add_argument("--lumping", required=True)
    p.add_argument("--side", required=True)

    p = sub("commutant", _cmd_commutant, oracle=True, helptext="maps commuting with a submonoid")
    p.add_argument("--monoid", required=True)
    p.add_argument("--sub", required=True, help="monoid name or map names")

    p = sub("bicommutant", _cmd_bicommutant, oracle=True, helptext="commutant of the commutant")
    p.add_argument("--monoid", required=True)
    p.add_argument("--sub", required=True, help="monoid name or map names")

    p = sub("subsystems", _cmd_subsystems, helptext="complete subsystems and their lattice")
    p.add_argument("--monoid", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_LATTICE_CAP)
    p.add_argument("--dot")

    p = sub("independence", _cmd_independence, helptext="derive two agents and certify them")
    p.add_argument("--monoid", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--free-composition", action="store_true")

    p = sub("swap", _cmd_swap, helptext="verify a swap isomorphism between subsystems")
    p.add_argument("--monoid", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--u-inv")

    p = sub("copies", _cmd_copies, helptext="intersect swapped copies of an embedded spec")
    p.add_argument("--lumping", required=True)
    p.add_argument("--spec", required=True, help="spec on the reduced space")
    p.add_argument("--swap", action="append")

    p = sub("approx-verify", _cmd_approx_verify, seed=True, helptext="verify an approximation structure")
    p.add_argument("--approx", required=True)
    p.add_argument("--triangle", action="store_true")

    p = sub("approx-robust", _cmd_approx_robust, helptext="is a spec robust at a tolerance")
    p.add_argument("--approx", required=True)
    p.add_argument("--monoid", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", required=True)

    p = sub("approx-reduce", _cmd_approx_reduce, helptext="push a structure through a lumping")
    p.add_argument("--approx", required=True)
    p.add_argument("--lumping", required=True)

    p = sub("hull", _cmd_hull, oracle=True, helptext="exact convex hull membership")
    p.add_argument("--points", required=True)
    p.add_argument("--point", required=True)

    p = sub("extreme", _cmd_extreme, oracle=True, helptext="extreme points of a point set")
    p.add_argument("--points", required=True)

    p = sub("prob-equiv", _cmd_prob_equiv, oracle=True, helptext="do two point sets span the same hull")
    p.add_argument("--points", required=True)
    p.add_argument("--points-b", required=True)

    p = sub("laws", _cmd_laws, file=False, seed=True, helptext="run the seeded mixture-law battery")
    p.add_argument("--trials", type=int, default=1000)

    return top


_NEGATIVE = (
    Incompatible,
    NotOrderEmbedding,
    LumpingOrderViolated,
    NotComplete,
    NotIndependent,
    NotIsomorphism,
    NotInJoin,
    NotSubtheory,
    IncompatibleSideResource,
    IncompatibleW,
    EmptyIntersection,
)


def _error_report(e: Exception, verdict: str) -> str:
    kv = [("verdict", verdict), ("error", type(e).__name__)]
    if isinstance(e, CapExceeded) and e.count is not None:
        kv.append(("count", e.count))
    return _render([f"error: {e}"], kv)


def run_command(argv: list[str]) -> tuple[int, str]:
    """Run one subcommand; returns (exit code, full textual report)."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _ArgError as e:
        return 2, _render([f"error: {e}"], [("verdict", "usage")])
    except SystemExit as e:  # --help prints and exits
        return int(e.code or 0), ""
    try:
        return ns.func(ns)
    except CapExceeded as e:
        return 3, _error_report(e, "cap-exceeded")
    except _NEGATIVE as e:
        return 1, _error_report(e, "no")
    except _CliError as e:
        return e.code, _error_report(e, "error")
    except RtkError as e:
        return 2, _error_report(e, "error")


def main(argv: list[str] | None = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
