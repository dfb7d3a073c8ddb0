"""Explicit finite rooted trees: parenthesis literals and depth truncations of schemes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from .errors import ParseError, ResourceLimitExceeded, ValidationError
from .scheme import Address, Scheme

__all__ = ["FiniteTree", "parse_finite_tree", "unfold", "DEFAULT_CAP", "DEFAULT_NODE_BUDGET"]

DEFAULT_CAP = 3
DEFAULT_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class FiniteTree:
    """Nodes ``0..n-1`` with node 0 as root (``parent[0] == 0``).

    ``labels`` optionally attaches a class identifier to each node and
    ``addresses`` records where each node sits in the scheme it was unfolded
    from.  Children are ordered by node index.
    """

    parent: tuple[int, ...]
    labels: tuple[str, ...] | None = None
    addresses: tuple[Address, ...] | None = None

    def __post_init__(self):
        parent = tuple(self.parent)
        object.__setattr__(self, "parent", parent)
        n = len(parent)
        if n == 0:
            raise ValidationError("a tree needs at least one node")
        if parent[0] != 0:
            raise ValidationError("node 0 must be the root (its own parent)")
        for x, p in enumerate(parent):
            if not 0 <= p < n:
                raise ValidationError(f"node {x} has out-of-range parent {p}")
            if x and p == x:
                raise ValidationError(f"node {x} is its own parent but is not the root")
        for x in range(n):
            seen = 0
            y = x
            while y != 0:
                y = parent[y]
                seen += 1
                if seen > n:
                    raise ValidationError(f"node {x} does not reach the root")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != n:
                raise ValidationError("labels must cover every node")
        if self.addresses is not None:
            object.__setattr__(self, "addresses", tuple(self.addresses))

    def __len__(self):
        return len(self.parent)

    @property
    def root(self) -> int:
        return 0

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for x, p in enumerate(self.parent):
            if x:
                kids[p].append(x)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * len(self.parent)
        for x in self.bfs_order:
            if x:
                d[x] = d[self.parent[x]] + 1
        return tuple(d)

    @cached_property
    def bfs_order(self) -> tuple[int, ...]:
        order = [0]
        for x in order:
            order.extend(self.children[x])
        return tuple(order)

    @property
    def height(self) -> int:
        return max(self.depth)

    def levels(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.height + 1)]
        for x in self.bfs_order:
            out[self.depth[x]].append(x)
        return out

    def label(self, x: int):
        return None if self.labels is None else self.labels[x]

    def subtree(self, x: int) -> list[int]:
        out = [x]
        for y in out:
            out.extend(self.children[y])
        return out

    def ancestors(self, x: int) -> Iterator[int]:
        """``x`` and every node above it, ending at the root."""
        yield x
        while x != 0:
            x = self.parent[x]
            yield x

    def down_closure(self, nodes) -> frozenset[int]:
        out = {0}
        for x in nodes:
            out.update(self.ancestors(x))
        return frozenset(out)

    @cached_property
    def node_of(self) -> dict[Address, int]:
        if self.addresses is None:
            raise ValidationError("tree carries no addresses")
        return {a: i for i, a in enumerate(self.addresses)}

    def relabel(self, mapping: Mapping[str, str]) -> "FiniteTree":
        if self.labels is None:
            raise ValidationError("tree carries no labels")
        return FiniteTree(self.parent, tuple(mapping[l] for l in self.labels), self.addresses)

    def unlabeled(self) -> "FiniteTree":
        return FiniteTree(self.parent, None, self.addresses)

    def to_parens(self) -> str:
        def rec(x):
            return "(" + "".join(rec(c) for c in self.children[x]) + ")"

        return rec(0)

    @classmethod
    def from_children(cls, kids: Sequence[Sequence[int]]) -> "FiniteTree":
        parent = [0] * len(kids)
        for p, cs in enumerate(kids):
            for c in cs:
                parent[c] = p
        return cls(tuple(parent))


def parse_finite_tree(text: str) -> FiniteTree:
    """Parse a balanced-parenthesis literal such as ``"(()(()))"``.

    Nodes are numbered in preorder.  Whitespace and commas are ignored.
    """
    parent: list[int] = []
    stack: list[int] = []
    closed_root = False
    line, col = 1, 0
    for ch in text:
        if ch == "\n":
            line, col = line + 1, 0
            continue
        col += 1
        if ch in " \t\r,":
            continue
        if ch == "(":
            if closed_root:
                raise ParseError("more than one root", line, col)
            parent.append(stack[-1] if stack else 0)
            stack.append(len(parent) - 1)
        elif ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            stack.pop()
            if not stack:
                closed_root = True
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    if not parent:
        raise ParseError("empty tree literal", line, col)
    if stack:
        raise ParseError("unbalanced '(': missing ')'", line, col)
    return FiniteTree(tuple(parent))


def unfold(
    s: Scheme,
    depth: int,
    cap: int = DEFAULT_CAP,
    budget: int = DEFAULT_NODE_BUDGET,
) -> FiniteTree:
    """Depth-``depth`` truncation of the tree presented by ``s``.

    Every omega multiplicity is replaced by ``cap``.  Nodes are numbered in
    breadth-first order (children by entry, then copy), labelled with their
    class and tagged with their address.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if cap < 1:
        raise ValueError("cap must be positive")
    parent = [0]
    labels = [s.root]
    addrs = [Address()]
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for ei, entry in enumerate(s.entries_of(labels[x])):
                for c in range(entry.mult.substitute(cap)):
                    if len(parent) >= budget:
                        raise ResourceLimitExceeded(
                            f"unfolding exceeds the node budget of {budget}"
                        )
                    parent.append(x)
                    labels.append(entry.child)
                    addrs.append(addrs[x].child(ei, c))
                    nxt.append(len(parent) - 1)
        frontier = nxt
    return FiniteTree(tuple(parent), tuple(labels), tuple(addrs))
