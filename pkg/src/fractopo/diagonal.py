"""Diagonal topologies over finite indexed families of finite spaces.

A family assigns a :class:`FiniteTopology` to each exact decimal label.
Carriers are always handled as tagged disjoint copies; ``carriers="same"``
only records (and enforces) that every component has the same point set.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import CapacityError, InputError
from .finite_topology import (
    MAX_UNIVERSE,
    FiniteTopology,
    format_topology,
    parse_topology,
)

LabelLike = Union[str, int, Decimal]
DEFAULT_CAP = 512
DEFAULT_SAMPLES = 4000


def parse_label(value: LabelLike) -> Decimal:
    """Exact decimal index label.  Floats are refused on purpose."""
    if isinstance(value, float):
        raise InputError("index labels must be given as decimal strings, not floats")
    if isinstance(value, bool):
        raise InputError(f"invalid label {value!r}")
    try:
        d = Decimal(value.strip() if isinstance(value, str) else value)
    except (InvalidOperation, TypeError):
        raise InputError(f"invalid label {value!r}") from None
    if not d.is_finite() or d < 0:
        raise InputError(f"label must be a finite nonnegative decimal, got {value!r}")
    return d


def default_seed() -> int:
    raw = os.environ.get("FRACTOPO_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"FRACTOPO_SEED must be a decimal integer, got {raw!r}") from None


@dataclass(frozen=True)
class IndexedFamily:
    labels: tuple[Decimal, ...]
    spaces: tuple[FiniteTopology, ...]
    carriers: str = "disjoint"

    def __post_init__(self):
        labels = tuple(parse_label(x) for x in self.labels)
        if not labels:
            raise InputError("a family needs at least one label")
        if len(labels) != len(self.spaces):
            raise InputError("one space per label is required")
        if len(set(labels)) != len(labels):
            raise InputError("labels must be distinct")
        if self.carriers not in ("disjoint", "same"):
            raise InputError(f"carriers must be 'disjoint' or 'same', got {self.carriers!r}")
        if self.carriers == "same" and len({t.universe_size for t in self.spaces}) > 1:
            raise InputError("carriers='same' requires every component to have the same point set")
        order = sorted(range(len(labels)), key=lambda i: labels[i])
        object.__setattr__(self, "labels", tuple(labels[i] for i in order))
        object.__setattr__(self, "spaces", tuple(self.spaces[i] for i in order))

    @classmethod
    def from_mapping(cls, spaces: Mapping[LabelLike, FiniteTopology], carriers: str = "disjoint") -> "IndexedFamily":
        return cls(tuple(spaces), tuple(spaces.values()), carriers)

    def position(self, label: LabelLike) -> int:
        d = parse_label(label)
        try:
            return self.labels.index(d)
        except ValueError:
            raise InputError(f"unknown label {label!r}") from None

    def space(self, label: LabelLike) -> FiniteTopology:
        return self.spaces[self.position(label)]

    def open_count(self) -> int:
        return math.prod(len(t.opens) for t in self.spaces)

    def full(self) -> "DiagonalOpen":
        return DiagonalOpen(self, tuple(frozenset(range(t.universe_size)) for t in self.spaces))

    def empty(self) -> "DiagonalOpen":
        return DiagonalOpen(self, tuple(frozenset() for _ in self.spaces))

    def opens(self) -> Iterator["DiagonalOpen"]:
        """Every componentwise choice of opens, in product order."""
        for combo in itertools.product(*(t.opens for t in self.spaces)):
            yield DiagonalOpen(self, combo)

    def as_topology(self) -> FiniteTopology:
        """The diagonal set system on the tagged disjoint union of carriers."""
        offsets = list(itertools.accumulate((t.universe_size for t in self.spaces), initial=0))
        if offsets[-1] > MAX_UNIVERSE:
            raise CapacityError(f"disjoint union has {offsets[-1]} points, above {MAX_UNIVERSE}")
        return FiniteTopology(
            offsets[-1],
            tuple(
                frozenset(offsets[i] + p for i, comp in enumerate(o.components) for p in comp)
                for o in self.opens()
            ),
        )


@dataclass(frozen=True)
class DiagonalOpen:
    """One subset per family label.  Components are point sets of each carrier."""

    family: IndexedFamily = field(repr=False)
    components: tuple[frozenset[int], ...]

    def __post_init__(self):
        comps = tuple(frozenset(c) for c in self.components)
        if len(comps) != len(self.family.labels):
            raise InputError("a diagonal open needs exactly one component per label")
        for c, t in zip(comps, self.family.spaces):
            if any(not 0 <= p < t.universe_size for p in c):
                raise InputError(f"component {sorted(c)} leaves its carrier")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_indices(cls, family: IndexedFamily, indices: Mapping[LabelLike, int]) -> "DiagonalOpen":
        """Build from ``label -> index into that label's open list``."""
        picks = {family.position(k): v for k, v in indices.items()}
        if sorted(picks) != list(range(len(family.labels))):
            raise InputError("one open index per label is required")
        try:
            return cls(family, tuple(family.spaces[i].opens[picks[i]] for i in range(len(picks))))
        except IndexError:
            raise InputError("open index out of range") from None

    @classmethod
    def from_mapping(cls, family: IndexedFamily, comps: Mapping[LabelLike, Iterable[int]]) -> "DiagonalOpen":
        picks = {family.position(k): frozenset(v) for k, v in comps.items()}
        if sorted(picks) != list(range(len(family.labels))):
            raise InputError("one component per label is required")
        return cls(family, tuple(picks[i] for i in range(len(picks))))

    def indices(self) -> tuple[int, ...]:
        """Index of each component in its topology's open list."""
        return tuple(t.index(c) for c, t in zip(self.components, self.family.spaces))

    def is_open(self) -> bool:
        return all(c in t for c, t in zip(self.components, self.family.spaces))

    def __getitem__(self, label: LabelLike) -> frozenset[int]:
        return self.components[self.family.position(label)]


def _same_family(a: DiagonalOpen, b: DiagonalOpen) -> None:
    if a.family is not b.family and a.family != b.family:
        raise InputError("diagonal opens belong to different families")


def diagonal_union(a: DiagonalOpen, b: DiagonalOpen) -> DiagonalOpen:
    _same_family(a, b)
    return DiagonalOpen(a.family, tuple(x | y for x, y in zip(a.components, b.components)))


def diagonal_intersect(a: DiagonalOpen, b: DiagonalOpen) -> DiagonalOpen:
    _same_family(a, b)
    return DiagonalOpen(a.family, tuple(x & y for x, y in zip(a.components, b.components)))


@dataclass(frozen=True)
class DiagonalReport:
    valid: bool
    mode: str
    open_count: int
    pairs_checked: int
    seed: Optional[int] = None
    axiom: Optional[str] = None
    witness: tuple = ()
    message: str = "ok"

    def __bool__(self) -> bool:
        return self.valid


def check_diagonal_axioms(
    family: IndexedFamily, cap: int = DEFAULT_CAP, seed: Optional[int] = None, samples: int = DEFAULT_SAMPLES
) -> DiagonalReport:
    """Verify the topology axioms on the collection of componentwise opens.

    Below ``cap`` diagonal opens every pair is checked; above it, ``samples``
    random pairs are drawn with a recorded seed.
    """
    count = family.open_count()
    spaces = family.spaces
    # a componentwise-built open is in the collection iff each component is
    if not all(frozenset() in t for t in spaces):
        return DiagonalReport(False, "exhaustive", count, 0, None, "i", (family.empty(),), "empty set is not open")
    if not all(t.full in t for t in spaces):
        return DiagonalReport(False, "exhaustive", count, 0, None, "i", (family.full(),), "whole space is not open")

    if count <= cap:
        mode = "exhaustive"
        pairs: Iterable = itertools.combinations(list(family.opens()), 2)
    else:
        mode = "sampled"
        seed = default_seed() if seed is None else seed
        rng = random.Random(seed)

        def draw() -> DiagonalOpen:
            return DiagonalOpen(family, tuple(rng.choice(t.opens) for t in spaces))

        pairs = ((draw(), draw()) for _ in range(samples))

    checked = 0
    for a, b in pairs:
        checked += 1
        if not diagonal_intersect(a, b).is_open():
            return DiagonalReport(False, mode, count, checked, seed, "ii", (a, b), "intersection is not open")
        if not diagonal_union(a, b).is_open():
            return DiagonalReport(False, mode, count, checked, seed, "iii", (a, b), "union is not open")
    return DiagonalReport(True, mode, count, checked, seed)


def single_label_agrees(t: FiniteTopology) -> bool:
    """Cross-check: a one-label family is a topology iff its component is."""
    return bool(check_diagonal_axioms(IndexedFamily(("0",), (t,)))) == bool(t.report())


# -- objects, neighbourhoods, internal structures --------------------------


@dataclass(frozen=True)
class ObjectSelection:
    points: Mapping[LabelLike, int]


InternalStructurePath = ObjectSelection


def _selection(family: IndexedFamily, x: ObjectSelection) -> dict[int, int]:
    return {family.position(k): v for k, v in x.points.items()}


def is_object(family: IndexedFamily, x: ObjectSelection) -> bool:
    """Exactly one valid point for every label."""
    picks = _selection(family, x)
    if len(picks) != len(x.points) or sorted(picks) != list(range(len(family.labels))):
        return False
    return all(
        isinstance(p, int) and 0 <= p < family.spaces[i].universe_size for i, p in picks.items()
    )


def is_internal_structure(family: IndexedFamily, path: InternalStructurePath) -> bool:
    """Discretised path: one point per label, i.e. its range is an object."""
    return is_object(family, path)


def same_internal_structure(a: InternalStructurePath, b: InternalStructurePath) -> bool:
    """Pointwise equality of two discretised paths."""
    return {parse_label(k): v for k, v in a.points.items()} == {parse_label(k): v for k, v in b.points.items()}


def is_diagonal_neighborhood(
    family: IndexedFamily,
    omega: Union[DiagonalOpen, Mapping[LabelLike, Iterable[int]]],
    x: ObjectSelection,
) -> bool:
    """Is ``omega`` a diagonal neighbourhood of the object ``x``?

    Holds iff for every label some open of that component contains ``x``'s
    point there and sits inside ``omega``'s component.
    """
    if not is_object(family, x):
        raise InputError("selection is not an object of the family")
    if not isinstance(omega, DiagonalOpen):
        omega = DiagonalOpen.from_mapping(family, omega)
    picks = _selection(family, x)
    for i, t in enumerate(family.spaces):
        w = omega.components[i]
        if not any(picks[i] in o and o <= w for o in t.opens):
            return False
    return True


# -- fixture format --------------------------------------------------------


def parse_family(text: str) -> IndexedFamily:
    """Parse ``labels=0,0.1`` (optional ``carriers=same``) then one literal per label."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].replace(" ", "").startswith("labels="):
        raise InputError("family file must start with a 'labels=' header")
    labels = [tok.strip() for tok in lines[0].split("=", 1)[1].split(",") if tok.strip()]
    body = lines[1:]
    carriers = "disjoint"
    if body and body[0].replace(" ", "").startswith("carriers="):
        carriers = body[0].split("=", 1)[1].strip()
        body = body[1:]
    if len(body) != len(labels):
        raise InputError(f"expected {len(labels)} topology literals, found {len(body)}")
    return IndexedFamily(tuple(labels), tuple(parse_topology(b) for b in body), carriers)


def format_family(family: IndexedFamily) -> str:
    lines = ["labels=" + ",".join(str(x) for x in family.labels)]
    if family.carriers != "disjoint":
        lines.append(f"carriers={family.carriers}")
    lines.extend(format_topology(t) for t in family.spaces)
    return "\n".join(lines) + "\n"
