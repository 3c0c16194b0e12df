"""Fractal families of finite topological spaces and their model checker.

A :class:`FractalFamilySpec` holds, per level ``n``, a map from sign strings
of length ``n+1`` to a :class:`Space` (carrier point labels plus a topology
on carrier positions) and a declared parent link with an injective carrier
embedding for every non-root key.  All comparisons between levels happen in
the child's carrier coordinates.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import signs as sg
from .errors import InputError, PreconditionError
from .finite_topology import (
    FiniteTopology,
    are_homeomorphic,
    format_subsets,
    induced_topology,
    parse_subsets,
)

MAX_FAMILY_LEVEL = 6
PROPERTIES = ("i", "ii", "iii", "iv", "v")


@dataclass(frozen=True)
class Space:
    carrier: tuple[int, ...]
    topology: FiniteTopology

    def __post_init__(self):
        carrier = tuple(self.carrier)
        if len(set(carrier)) != len(carrier):
            raise InputError(f"carrier {carrier} has repeated points")
        if len(carrier) != self.topology.universe_size:
            raise InputError(f"carrier of {len(carrier)} points vs topology on {self.topology.universe_size}")
        object.__setattr__(self, "carrier", carrier)

    @classmethod
    def from_labels(cls, carrier: Sequence[int], opens: Iterable[Iterable[int]]) -> "Space":
        """Build from opens written in carrier point labels."""
        pos = {p: i for i, p in enumerate(carrier)}
        try:
            topo = FiniteTopology(len(carrier), tuple(frozenset(pos[p] for p in o) for o in opens))
        except KeyError as exc:
            raise InputError(f"open mentions point {exc.args[0]} outside carrier {tuple(carrier)}") from None
        return cls(tuple(carrier), topo)

    def position(self, point: int) -> int:
        return self.carrier.index(point)

    def label_opens(self) -> list[frozenset[int]]:
        return [frozenset(self.carrier[i] for i in o) for o in self.topology.opens]


@dataclass(frozen=True)
class ParentLink:
    parent: str
    embedding: Mapping[int, int]  # parent carrier label -> child carrier label


@dataclass
class FractalFamilySpec:
    levels: list[dict[str, Space]]
    links: dict[str, ParentLink] = field(default_factory=dict)

    def __post_init__(self):
        self.levels = [{sg.normalize(k): v for k, v in lvl.items()} for lvl in self.levels]
        self.links = {
            sg.normalize(k): ParentLink(sg.normalize(v.parent), dict(v.embedding)) for k, v in self.links.items()
        }
        self.validate()

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    def keys(self, n: int) -> list[str]:
        return sorted(self.levels[n], key=sg.sort_key)

    def space(self, key: str) -> Space:
        key = sg.normalize(key)
        n = len(key) - 1
        if n > self.max_level or key not in self.levels[n]:
            raise InputError(f"unknown key {key!r}")
        return self.levels[n][key]

    def children_of(self, key: str) -> list[str]:
        return sorted((c for c, link in self.links.items() if link.parent == key), key=sg.sort_key)

    def validate(self) -> None:
        """Structural checks only; the axioms are :func:`check_fractal_family`'s job."""
        if not self.levels:
            raise InputError("a family needs at least level 0")
        if self.max_level > MAX_FAMILY_LEVEL:
            raise InputError(f"level cap is {MAX_FAMILY_LEVEL}, got {self.max_level}")
        for n, lvl in enumerate(self.levels):
            if not lvl:
                raise InputError(f"level {n} has no keys")
            if len(lvl) > 2 ** (n + 1):
                raise InputError(f"level {n} has {len(lvl)} keys, above 2^{n + 1}")
            for k in lvl:
                if len(k) != n + 1:
                    raise InputError(f"key {k!r} has the wrong length for level {n}")
        for child, link in self.links.items():
            n = len(child) - 1
            if n < 1 or n > self.max_level or child not in self.levels[n]:
                raise InputError(f"parent link for unknown key {child!r}")
            if link.parent not in self.levels[n - 1]:
                raise InputError(f"{child!r} links to {link.parent!r}, which is not a level-{n - 1} key")
            src, dst = self.levels[n - 1][link.parent], self.levels[n][child]
            emb = link.embedding
            if set(emb) != set(src.carrier):
                raise InputError(f"embedding {link.parent!r} -> {child!r} must be defined on the whole carrier")
            if len(set(emb.values())) != len(emb):
                raise InputError(f"embedding {link.parent!r} -> {child!r} is not injective")
            if not set(emb.values()) <= set(dst.carrier):
                raise InputError(f"embedding {link.parent!r} -> {child!r} leaves the child carrier")


# -- transport along embeddings --------------------------------------------


def _compose(spec: FractalFamilySpec, chain: Sequence[str]) -> dict[int, int]:
    """Composite embedding from the lowest key of ``chain`` into the highest.

    ``chain`` lists keys from low level to high level, each linked to the next.
    """
    emb = {p: p for p in spec.space(chain[0]).carrier}
    for lo, hi in zip(chain, chain[1:]):
        link = spec.links.get(hi)
        if link is None or link.parent != lo:
            raise PreconditionError(f"{hi!r} is not linked to {lo!r}")
        emb = {p: link.embedding[q] for p, q in emb.items()}
    return emb


def pullback(spec: FractalFamilySpec, low: str, high: str, embedding: Mapping[int, int]) -> FiniteTopology:
    """``{O ∩ X_low : O open in X_high}`` expressed in ``low``'s positions."""
    lo, hi = spec.space(low), spec.space(high)
    return induced_topology(hi.topology, [hi.position(embedding[p]) for p in lo.carrier])


def pushforward_is_coarser(spec: FractalFamilySpec, low: str, high: str, embedding: Mapping[int, int]) -> bool:
    """Every open of ``low``, carried by the embedding, is open in ``high``."""
    lo, hi = spec.space(low), spec.space(high)
    return all(
        frozenset(hi.position(embedding[lo.carrier[i]]) for i in o) in hi.topology for o in lo.topology.opens
    )


def _first_difference(a: FiniteTopology, b: FiniteTopology, carrier: Sequence[int]) -> str:
    extra = [o for o in a.opens if o not in b]
    missing = [o for o in b.opens if o not in a]
    as_labels = lambda o: "{" + ",".join(str(carrier[i]) for i in sorted(o)) + "}"  # noqa: E731
    if extra:
        return f"open {as_labels(extra[0])} is not induced"
    if missing:
        return f"induced open {as_labels(missing[0])} is missing"
    return "equal"


def _v_holds(spec: FractalFamilySpec, parent: str, child: str) -> bool:
    emb = spec.links[child].embedding
    return pushforward_is_coarser(spec, parent, child, emb) and pullback(
        spec, parent, child, emb
    ) == spec.space(parent).topology


# -- the checker -----------------------------------------------------------


@dataclass
class PropertyResult:
    ok: bool = True
    witnesses: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.ok = False
        self.witnesses.append(msg)


@dataclass
class FamilyReport:
    properties: dict[str, PropertyResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.properties.values())

    def failed(self) -> list[str]:
        return [p for p in PROPERTIES if not self.properties[p].ok]

    def __bool__(self) -> bool:
        return self.ok

    def lines(self) -> list[str]:
        out = []
        for p in PROPERTIES:
            r = self.properties[p]
            out.append(f"property {p}: {'pass' if r.ok else 'FAIL'}")
            out.extend(f"  - {w}" for w in r.witnesses)
            out.extend(f"  . {w}" for w in r.notes)
        return out


def check_fractal_family(spec: FractalFamilySpec) -> FamilyReport:
    """Model-check the five defining properties.

    Nodes whose set system is not a topology fail property ii and are left
    out of iii, iv and v, so a single bad node shows up in one place only.
    """
    res = {p: PropertyResult() for p in PROPERTIES}
    N = spec.max_level

    for n in range(N):
        a, b = len(spec.levels[n]), len(spec.levels[n + 1])
        if not b > a:
            res["i"].fail(f"level {n + 1} has {b} keys, not more than the {a} of level {n}")

    bad = set()
    for n in range(N + 1):
        for k in spec.keys(n):
            r = spec.space(k).topology.report()
            if not r.valid:
                bad.add(k)
                res["ii"].fail(f"{k}: {r.message}")
    if bad:
        for p in ("iii", "iv", "v"):
            res[p].notes.append("skipped non-topologies: " + ",".join(sorted(bad, key=sg.sort_key)))

    for n in range(N + 1):
        good = [k for k in spec.keys(n) if k not in bad]
        for k in good[1:]:
            if are_homeomorphic(spec.space(good[0]).topology, spec.space(k).topology) is None:
                res["iii"].fail(f"level {n}: {good[0]} and {k} are not homeomorphic")

    for n in range(1, N + 1):
        for k in spec.keys(n):
            if k in bad:
                continue
            link = spec.links.get(k)
            if link is None:
                res["iv"].fail(f"{k} has no parent at level {n - 1}")
                continue
            if link.parent in bad:
                continue
            induced = pullback(spec, link.parent, k, link.embedding)
            if induced != spec.space(link.parent).topology:
                diff = _first_difference(spec.space(link.parent).topology, induced, spec.space(link.parent).carrier)
                res["iv"].fail(f"{k} -> {link.parent}: subspace topology differs ({diff})")

    for n in range(N):
        for k in spec.keys(n):
            if k in bad:
                continue
            kids = [c for c in spec.children_of(k) if c not in bad]
            if not any(_v_holds(spec, k, c) for c in kids):
                res["v"].fail(f"{k}: no level-{n + 1} key whose topology contains and induces it")

    return FamilyReport(res)


def _require(spec: FractalFamilySpec) -> None:
    report = check_fractal_family(spec)
    if not report.ok:
        raise PreconditionError("not a fractal family; failing properties: " + ", ".join(report.failed()))


def _walk_up(spec: FractalFamilySpec, start: str, top: int, strict: bool) -> list[str]:
    chain = [start]
    while len(chain[-1]) - 1 < top:
        cur = chain[-1]
        kids = spec.children_of(cur)
        good = [c for c in kids if spec.space(c).topology.is_valid() and _v_holds(spec, cur, c)]
        if good:
            chain.append(good[0])
        elif kids and not strict:
            chain.append(kids[0])
        else:
            raise PreconditionError(f"no property-v witness above {cur!r}")
    return chain


def chain_topologies(spec: FractalFamilySpec, start: str, top: Optional[int] = None) -> list[str]:
    """Witness chain ``start = j_n, j_{n+1}, …, j_top`` with nested topologies.

    Each step takes the first child (``+`` before ``-``) satisfying property v.
    """
    _require(spec)
    start = sg.normalize(start)
    spec.space(start)
    top = spec.max_level if top is None else top
    return _walk_up(spec, start, top, strict=True)


@dataclass(frozen=True)
class SetChain:
    keys: tuple[str, ...]  # j_{n-1}, …, j_0
    embedding: Mapping[int, int]  # X_0 -> X_n, in carrier labels


def chain_sets(spec: FractalFamilySpec, key: str) -> SetChain:
    """The unique parent chain below ``key`` and its composite embedding."""
    key = sg.normalize(key)
    spec.space(key)
    chain = [key]
    while len(chain[-1]) > 1:
        link = spec.links.get(chain[-1])
        if link is None:
            raise PreconditionError(f"missing parent link for {chain[-1]!r} at level {len(chain[-1]) - 1}")
        chain.append(link.parent)
    up = chain[::-1]
    return SetChain(tuple(chain[1:]), _compose(spec, up))


@dataclass(frozen=True)
class FormulaReport:
    holds: bool
    n: int
    i: int
    checked: tuple[tuple[str, ...], ...] = ()
    witness: str = ""

    def __bool__(self) -> bool:
        return self.holds


def induced_formula_check(spec: FractalFamilySpec, n: int, i: int) -> FormulaReport:
    """Compare a level's topology with the one induced through a chain of inclusions.

    For ``i > n`` each level-``n`` topology must equal the trace of the
    level-``i`` topology at the top of its witness chain.  For ``i < n`` each
    level-``i`` topology on the unique chain below a level-``n`` key must equal
    the trace of that key's topology.
    """
    N = spec.max_level
    for v in (n, i):
        if not isinstance(v, int) or not 0 <= v <= N:
            raise InputError(f"level {v!r} outside 0..{N}")
    checked = []
    for k in spec.keys(n):
        if i == n:
            checked.append((k,))
            continue
        if i > n:
            try:
                chain = _walk_up(spec, k, i, strict=False)
            except PreconditionError as exc:
                return FormulaReport(False, n, i, tuple(checked), str(exc))
            low, high = chain[0], chain[-1]
        else:
            try:
                down = chain_sets(spec, k)
            except PreconditionError as exc:
                return FormulaReport(False, n, i, tuple(checked), str(exc))
            chain = [k, *down.keys][: n - i + 1][::-1]
            low, high = chain[0], chain[-1]
        checked.append(tuple(chain))
        emb = _compose(spec, chain)
        induced = pullback(spec, low, high, emb)
        expected = spec.space(low).topology
        if induced != expected:
            diff = _first_difference(expected, induced, spec.space(low).carrier)
            return FormulaReport(False, n, i, tuple(checked), f"{low} in {high}: {diff}")
    return FormulaReport(True, n, i, tuple(checked))


def weakest_topology(spec: FractalFamilySpec) -> tuple[str, FiniteTopology]:
    """Least level-0 key and its topology, verified coarser along every property-v chain."""
    _require(spec)
    j0 = spec.keys(0)[0]

    def walk(chain: list[str]) -> None:
        emb = _compose(spec, chain)
        if not pushforward_is_coarser(spec, chain[0], chain[-1], emb):
            raise PreconditionError(f"{j0} is not coarser than {chain[-1]}")
        for c in spec.children_of(chain[-1]):
            if _v_holds(spec, chain[-1], c):
                walk(chain + [c])

    walk([j0])
    return j0, spec.space(j0).topology


# -- fixture construction and mutations ------------------------------------


def _disjoint_point(t: FiniteTopology) -> FiniteTopology:
    """``t`` plus one isolated point appended at the end."""
    new = t.universe_size
    return FiniteTopology(new + 1, t.opens + tuple(o | {new} for o in t.opens))


def _glued_point(t: FiniteTopology) -> FiniteTopology:
    """``t`` plus a point lying in every nonempty open: same trace, carrier not open."""
    new = t.universe_size
    return FiniteTopology(new + 1, (frozenset(),) + tuple(o | {new} for o in t.opens))


def sierpinski_doubling(levels: int = 3) -> FractalFamilySpec:
    """Reference fixture with ``levels`` levels (0 .. levels-1).

    Level-0 spaces are Sierpiński spaces on disjoint carriers.  Each child
    is its parent plus one fresh isolated point, so the parent carrier is an
    open slice of the child, mirroring the zero-width slice of the next level.
    Point labels are global, so every embedding is a literal inclusion.
    """
    if not 1 <= levels <= MAX_FAMILY_LEVEL + 1:
        raise InputError(f"levels must be in 1..{MAX_FAMILY_LEVEL + 1}")
    sier = FiniteTopology.sierpinski()
    lv: list[dict[str, Space]] = [{"+": Space((0, 1), sier), "-": Space((2, 3), sier)}]
    links: dict[str, ParentLink] = {}
    fresh = itertools.count(4)
    for n in range(1, levels):
        lvl = {}
        for k in sg.lambda_set(n):
            par = lv[n - 1][k[:-1]]
            lvl[k] = Space(par.carrier + (next(fresh),), _disjoint_point(par.topology))
            links[k] = ParentLink(k[:-1], {p: p for p in par.carrier})
        lv.append(lvl)
    return FractalFamilySpec(lv, links)


def mutate(spec: FractalFamilySpec, prop: str) -> FractalFamilySpec:
    """Single-fault mutation designed to break exactly property ``prop``.

    Requires a fixture built by :func:`sierpinski_doubling` with at least two
    levels.
    """
    N = spec.max_level
    if N < 1:
        raise InputError("mutations need at least two levels")
    levels = [dict(lvl) for lvl in spec.levels]
    links = dict(spec.links)
    top = spec.keys(N)

    def replace(key: str, topo: FiniteTopology) -> None:
        levels[N][key] = Space(levels[N][key].carrier, topo)

    def parent_topo(key: str) -> FiniteTopology:
        return spec.space(links[key].parent).topology

    if prop == "i":
        for k in top:
            if k.endswith("-"):
                del levels[N][k]
                links.pop(k, None)
    elif prop == "ii":
        k = top[0]
        t = spec.space(k).topology
        replace(k, FiniteTopology(t.universe_size, tuple(o for o in t.opens if o != {t.universe_size - 1})))
    elif prop == "iii":
        replace(top[0], _glued_point(parent_topo(top[0])))
    elif prop == "iv":
        del links[top[0]]
    elif prop == "v":
        for k in top:
            replace(k, _glued_point(parent_topo(k)))
    else:
        raise InputError(f"unknown property {prop!r}")
    return FractalFamilySpec(levels, links)


# -- fixture text format ---------------------------------------------------

_LEVEL = re.compile(r"^level\s+(\d+)\s*:\s*(.*)$")
_PARENT = re.compile(r"^parent\s+(\S+)\s*->\s*(\S+)\s*:\s*embed\s*(.*)$")


def _fields(body: str) -> dict[str, str]:
    out = {}
    for part in body.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise InputError(f"expected key=value, got {part.strip()!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_family_spec(text: str) -> FractalFamilySpec:
    """Parse the fixture format.

    ``level 0: key=+; carrier=0,1; topology={},{0},{0,1}`` declares a space
    (opens in carrier labels); ``parent +- -> +: embed 0->0,1->1`` declares a
    link.  ``#`` starts a comment.
    """
    spaces: dict[int, dict[str, Space]] = {}
    links: dict[str, ParentLink] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LEVEL.match(line)
        if m:
            f = _fields(m.group(2))
            try:
                key = sg.normalize(f["key"])
                carrier = tuple(int(t) for t in f["carrier"].split(",") if t.strip())
                opens = parse_subsets(f["topology"])
            except KeyError as exc:
                raise InputError(f"line {lineno}: missing field {exc.args[0]!r}") from None
            except ValueError as exc:
                raise InputError(f"line {lineno}: {exc}") from None
            n = int(m.group(1))
            if len(key) != n + 1:
                raise InputError(f"line {lineno}: key {key!r} does not belong to level {n}")
            if key in spaces.setdefault(n, {}):
                raise InputError(f"line {lineno}: duplicate key {key!r}")
            spaces[n][key] = Space.from_labels(carrier, opens)
            continue
        m = _PARENT.match(line)
        if m:
            child, par = sg.normalize(m.group(1)), sg.normalize(m.group(2))
            if child in links:
                raise InputError(f"line {lineno}: second parent declared for {child!r}")
            emb = {}
            for pair in m.group(3).split(","):
                if not pair.strip():
                    continue
                try:
                    a, b = pair.split("->")
                    emb[int(a)] = int(b)
                except ValueError:
                    raise InputError(f"line {lineno}: bad embedding pair {pair.strip()!r}") from None
            links[child] = ParentLink(par, emb)
            continue
        raise InputError(f"line {lineno}: cannot parse {line!r}")
    if not spaces or sorted(spaces) != list(range(len(spaces))):
        raise InputError("levels must be 0..N without gaps")
    return FractalFamilySpec([spaces[n] for n in range(len(spaces))], links)


def format_family_spec(spec: FractalFamilySpec) -> str:
    lines = []
    for n in range(spec.max_level + 1):
        for k in spec.keys(n):
            s = spec.space(k)
            lines.append(
                f"level {n}: key={k}; carrier={','.join(map(str, s.carrier))}; "
                f"topology={format_subsets(s.label_opens())}"
            )
    for child in sorted(spec.links, key=sg.sort_key):
        link = spec.links[child]
        pairs = ",".join(f"{a}->{b}" for a, b in sorted(link.embedding.items()))
        lines.append(f"parent {child} -> {link.parent}: embed {pairs}")
    return "\n".join(lines) + "\n"
