"""Index bookkeeping for the binary expanding diagram of charts.

Nodes use heap numbering: the root is 1 and node ``k`` has children ``2k``
(plus) and ``2k+1`` (minus).  Step ``n`` holds nodes ``2**n .. 2**(n+1)-1``
and the label of node ``k`` is its binary expansion without the leading 1,
read with ``0 -> +`` and ``1 -> -``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import CapacityError, InputError

MAX_STEP = 20
MAX_LABEL_STEP = 10
OMEGA = "Ω"
COMPOSE = "∘"


def _check_step(n: int, cap: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InputError(f"step must be a nonnegative integer, got {n!r}")
    if n > cap:
        raise CapacityError(f"step {n} above cap {cap}")


def node_label(k: int) -> str:
    """Sign string of node ``k``; the root carries the empty string."""
    if k < 1:
        raise InputError(f"node index must be positive, got {k}")
    return bin(k)[3:].replace("0", "+").replace("1", "-")


def node_index(label: str) -> int:
    """Inverse of :func:`node_label`."""
    bits = label.replace("+", "0").replace("-", "1")
    if set(bits) - {"0", "1"}:
        raise InputError(f"invalid sign string {label!r}")
    return int("1" + bits, 2)


def step_range(n: int) -> range:
    _check_step(n, MAX_STEP)
    return range(2**n, 2 ** (n + 1))


@dataclass(frozen=True)
class StepEntry:
    k: int
    source_label: str
    plus_child: str
    minus_child: str

    @property
    def children(self) -> tuple[str, str]:
        return self.plus_child, self.minus_child


@dataclass(frozen=True)
class StepDiagram:
    n: int
    entries: tuple[StepEntry, ...]

    def child_labels(self) -> list[str]:
        return [c for e in self.entries for c in e.children]

    def __len__(self) -> int:
        return len(self.entries)


def enumerate_step(n: int) -> StepDiagram:
    """The ``2**n`` nodes at step ``n`` with the two children each one spawns."""
    entries = []
    for k in step_range(n):
        src = node_label(k)
        entries.append(StepEntry(k, src, src + "+", src + "-"))
    return StepDiagram(n, tuple(entries))


def chart_tuple_size(n: int) -> int:
    if not isinstance(n, int) or n < 0:
        raise InputError(f"step must be a nonnegative integer, got {n!r}")
    return 2 ** (n + 1) + 1


@lru_cache(maxsize=None)
def _composite(c: int) -> tuple[str, ...]:
    # maps applied right to left; c is the child node reached by the chain
    if c == 1:
        return ()
    k = c // 2
    head = (f"φ{k}",) if c % 2 == 0 else (f"T{k}", f"φ{k}")
    return head + _composite(k)


def composite_maps(c: int) -> tuple[str, ...]:
    """Map symbols (outermost first) whose composite reaches node ``c``."""
    if c < 2:
        raise InputError(f"node {c} is not reached by any map")
    return _composite(c)


def chart_tuple_labels(n: int) -> list[str]:
    """``[Ω, …]`` followed by the ``2**(n+1)`` composite maps at step ``n``."""
    _check_step(n, MAX_LABEL_STEP)
    return [OMEGA] + [COMPOSE.join(_composite(c)) for c in range(2 ** (n + 1), 2 ** (n + 2))]


def render_tree(steps: int) -> str:
    """Indented text picture of steps ``0..steps``: each node, then its two arrows."""
    _check_step(steps, MAX_LABEL_STEP)
    lines = [f"{OMEGA}  (chart tuple size at step {steps}: {chart_tuple_size(steps)})"]

    def walk(k: int, depth: int) -> None:
        n = k.bit_length() - 1
        pad = "  " * (depth + 1)
        label = node_label(k) or "root"
        lines.append(f"{pad}[k={k}] {label}")
        for c, arrow in ((2 * k, f"φ{k}"), (2 * k + 1, f"T{k}{COMPOSE}φ{k}")):
            child = node_label(c)
            if n < steps:
                lines.append(f"{pad}  --{arrow}--> {child}")
                walk(c, depth + 1)
            else:
                lines.append(f"{pad}  --{arrow}--> {child}  = {COMPOSE.join(_composite(c))}")

    walk(1, 0)
    return "\n".join(lines) + "\n"


__all__ = [
    "StepDiagram",
    "StepEntry",
    "chart_tuple_labels",
    "chart_tuple_size",
    "composite_maps",
    "enumerate_step",
    "node_index",
    "node_label",
    "render_tree",
    "step_range",
]
