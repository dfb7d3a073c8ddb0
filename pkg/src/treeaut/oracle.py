"""Brute-force ground truth on explicit finite trees.

Everything here works with concrete permutations of node indices so it can
check the closed-form answers of :mod:`treeaut.acl` and the witnesses of
:mod:`treeaut.verdict` independently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .canon import subtree_codes
from .errors import InvariantViolation, NoWitness, ResourceLimitExceeded, ValidationError
from .finite_tree import FiniteTree

__all__ = [
    "TreeAutomorphism",
    "identity",
    "compose",
    "inverse",
    "automorphism_generators",
    "orbit_of",
    "orbit_partition",
    "acl_bruteforce",
    "random_automorphism",
    "level_sign",
    "all_automorphisms",
    "find_isomorphism",
    "group_elements",
    "is_partial_iso",
    "extend_one_point",
    "sign_preimages",
]


@dataclass(frozen=True)
class TreeAutomorphism:
    """A parent-preserving (and label-preserving) bijection of a tree's nodes."""

    tree: FiniteTree
    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))

    def __call__(self, x: int) -> int:
        return self.perm[x]

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def validate(self) -> None:
        t, p = self.tree, self.perm
        if sorted(p) != list(range(len(t))):
            raise InvariantViolation("not a bijection")
        for x in range(len(t)):
            if p[t.parent[x]] != t.parent[p[x]]:
                raise InvariantViolation(f"parent of node {x} not preserved")
            if t.labels is not None and t.labels[x] != t.labels[p[x]]:
                raise InvariantViolation(f"label of node {x} not preserved")

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        return compose(self, other)


def identity(t: FiniteTree) -> TreeAutomorphism:
    return TreeAutomorphism(t, tuple(range(len(t))))


def compose(g: TreeAutomorphism, h: TreeAutomorphism) -> TreeAutomorphism:
    """``g o h``: apply ``h`` first."""
    if g.tree is not h.tree and g.tree != h.tree:
        raise ValidationError("automorphisms of different trees")
    return TreeAutomorphism(g.tree, tuple(g.perm[y] for y in h.perm))


def inverse(g: TreeAutomorphism) -> TreeAutomorphism:
    inv = [0] * len(g.perm)
    for x, y in enumerate(g.perm):
        inv[y] = x
    return TreeAutomorphism(g.tree, tuple(inv))


def _iso_between(t: FiniteTree, codes: Sequence[str], a: int, b: int) -> dict[int, int]:
    """An isomorphism of the subtree at ``a`` onto the subtree at ``b`` (same code)."""
    out = {a: b}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        cx = sorted(t.children[x], key=lambda c: (codes[c], c))
        cy = sorted(t.children[y], key=lambda c: (codes[c], c))
        for u, v in zip(cx, cy):
            out[u] = v
            stack.append((u, v))
    return out


def _swap(t: FiniteTree, codes: Sequence[str], a: int, b: int) -> TreeAutomorphism:
    perm = list(range(len(t)))
    for x, y in _iso_between(t, codes, a, b).items():
        perm[x] = y
        perm[y] = x
    return TreeAutomorphism(t, tuple(perm))


def automorphism_generators(t: FiniteTree, fixed: Iterable[int] = ()) -> list[TreeAutomorphism]:
    """Swaps of adjacent isomorphic sibling subtrees that fix ``fixed`` pointwise.

    ``fixed`` is replaced by its downward closure (the root is always fixed).
    The swaps generate the full pointwise stabilizer.
    """
    closed = t.down_closure(fixed)
    codes = subtree_codes(t)
    gens = []
    for p in t.bfs_order:
        groups: dict[str, list[int]] = {}
        for c in t.children[p]:
            if c not in closed:
                groups.setdefault(codes[c], []).append(c)
        for members in groups.values():
            for a, b in zip(members, members[1:]):
                gens.append(_swap(t, codes, a, b))
    return gens


def orbit_of(t: FiniteTree, gens: Sequence[TreeAutomorphism], x: int) -> frozenset[int]:
    orbit = {x}
    frontier = [x]
    while frontier:
        y = frontier.pop()
        for g in gens:
            z = g.perm[y]
            if z not in orbit:
                orbit.add(z)
                frontier.append(z)
    return frozenset(orbit)


def orbit_partition(t: FiniteTree, gens: Sequence[TreeAutomorphism]) -> list[int]:
    """Representative (least node) of the orbit of every node, by union-find."""
    parent = list(range(len(t)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x, y in enumerate(g.perm):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    return [find(x) for x in range(len(t))]


def acl_bruteforce(t: FiniteTree, X: Iterable[int] = ()) -> dict[int, int]:
    """Orbit size of every node under the pointwise stabilizer of ``X``."""
    reps = orbit_partition(t, automorphism_generators(t, X))
    size: dict[int, int] = {}
    for r in reps:
        size[r] = size.get(r, 0) + 1
    return {x: size[reps[x]] for x in range(len(t))}


def random_automorphism(t: FiniteTree, seed) -> TreeAutomorphism:
    """Uniformly random automorphism, deterministic in ``seed``.

    Top-down, children of each node are matched to the children of its image
    by an independent uniform permutation within every isomorphism class.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    codes = subtree_codes(t)
    perm = [0] * len(t)
    for x in t.bfs_order:
        y = perm[x]
        gx: dict[str, list[int]] = {}
        gy: dict[str, list[int]] = {}
        for c in t.children[x]:
            gx.setdefault(codes[c], []).append(c)
        for c in t.children[y]:
            gy.setdefault(codes[c], []).append(c)
        for code in sorted(gx):
            targets = list(gy[code])
            rng.shuffle(targets)
            for c, d in zip(gx[code], targets):
                perm[c] = d
    return TreeAutomorphism(t, tuple(perm))


def _parity(perm: Mapping[int, int] | Sequence[int], domain: Sequence[int]) -> int:
    seen = set()
    swaps = 0
    for x in domain:
        if x in seen:
            continue
        length = 0
        y = x
        while y not in seen:
            seen.add(y)
            y = perm[y]
            length += 1
        swaps += length - 1
    return swaps % 2


def level_sign(t: FiniteTree, g: TreeAutomorphism) -> tuple[int, ...]:
    """Parity of the permutation ``g`` induces on each level 1..height."""
    levels = t.levels()
    return tuple(_parity(g.perm, lvl) for lvl in levels[1:])


def group_elements(
    t: FiniteTree, gens: Sequence[TreeAutomorphism], limit: int = 200_000
) -> set[tuple[int, ...]]:
    """All elements of the group generated by ``gens`` (as permutation tuples)."""
    ident = tuple(range(len(t)))
    seen = {ident}
    frontier = [ident]
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = tuple(g.perm[y] for y in p)
            if q not in seen:
                seen.add(q)
                if len(seen) > limit:
                    raise ResourceLimitExceeded(f"group has more than {limit} elements")
                frontier.append(q)
    return seen


def _match(t1: FiniteTree, t2: FiniteTree, fixed: frozenset[int] = frozenset()) -> Iterator[dict[int, int]]:
    """Every parent- and label-preserving bijection ``t1 -> t2`` fixing ``fixed``.

    Plain backtracking over nodes in BFS order; no canonical codes involved.
    """
    if len(t1) != len(t2):
        return
    order = t1.bfs_order
    n = len(order)

    def ok(x, y):
        if len(t1.children[x]) != len(t2.children[y]):
            return False
        if t1.depth[x] != t2.depth[y]:
            return False
        if (t1.labels is None) != (t2.labels is None):
            return False
        if t1.labels is not None and t1.labels[x] != t2.labels[y]:
            return False
        return True

    if not ok(0, 0):
        return
    f = {0: 0}
    used = {0}

    def rec(k):
        if k == n:
            yield dict(f)
            return
        x = order[k]
        img_parent = f[t1.parent[x]]
        cands = [x] if x in fixed else t2.children[img_parent]
        for y in cands:
            if y in used or t2.parent[y] != img_parent or not ok(x, y):
                continue
            if y in fixed and y != x:
                continue
            f[x] = y
            used.add(y)
            yield from rec(k + 1)
            del f[x]
            used.discard(y)

    yield from rec(1)


def all_automorphisms(t: FiniteTree, fixed: Iterable[int] = ()) -> list[TreeAutomorphism]:
    """Exhaustive list of automorphisms fixing ``fixed`` pointwise."""
    fx = frozenset(fixed)
    return [
        TreeAutomorphism(t, tuple(m[x] for x in range(len(t)))) for m in _match(t, t, fx)
    ]


def find_isomorphism(t1: FiniteTree, t2: FiniteTree) -> dict[int, int] | None:
    return next(_match(t1, t2), None)


# -- partial isomorphisms and one-point extension ----------------------------


def _label(t, x):
    """Type of a node for partial isomorphisms: its class label, else its subtree code."""
    if isinstance(t, FiniteTree):
        if t.labels is not None:
            return t.labels[x]
        return subtree_codes(t)[x]
    return t.label(x)


def is_partial_iso(t, f: Mapping, require_prefix_closed: bool = True) -> bool:
    """Injective, parent-preserving, type-preserving map between subsets of ``t``."""
    if len(set(f.values())) != len(f):
        return False
    dom = set(f)
    rng = set(f.values())
    for x, y in f.items():
        if _label(t, x) != _label(t, y):
            return False
        px, py = _parent(t, x), _parent(t, y)
        if _is_root(t, x) != _is_root(t, y):
            return False
        if px in dom and f[px] != py:
            return False
        if require_prefix_closed and not _is_root(t, x):
            if px not in dom or py not in rng:
                return False
    return True


def _parent(t, x):
    return t.parent[x] if isinstance(t, FiniteTree) else t.parent(x)


def _is_root(t, x):
    return x == 0 if isinstance(t, FiniteTree) else t.is_root(x)


def _candidates(t, p, lab) -> Iterator:
    if isinstance(t, FiniteTree):
        codes = subtree_codes(t) if t.labels is None else None
        for c in t.children[p]:
            if (t.labels[c] if codes is None else codes[c]) == lab:
                yield c
    else:
        yield from t.children_with_label(p, lab)


def extend_one_point(t, f: Mapping, x, avoid: Iterable = ()):
    """A node ``x'`` such that ``f + {x: x'}`` is still a partial isomorphism.

    ``x'`` is the least candidate: a child of ``f(parent(x))`` with the type
    of ``x`` that is not already in the range of ``f`` (nor in ``avoid``).
    ``t`` is a :class:`FiniteTree` or any ambient tree exposing ``parent``,
    ``label``, ``is_root`` and ``children_with_label``.
    """
    if x in f:
        raise ValidationError("x is already in the domain")
    px = _parent(t, x)
    if _is_root(t, x) or px not in f:
        raise ValidationError("the parent of x must be in the domain")
    taken = set(f.values()) | set(avoid)
    lab = _label(t, x)
    for y in _candidates(t, f[px], lab):
        if y not in taken:
            return y
    raise NoWitness(f"every candidate below {f[px]!r} with the type of {x!r} is taken")


# -- level-sign preimages ------------------------------------------------------


def sign_preimages(
    t: FiniteTree, gens: Sequence[TreeAutomorphism], levels: Iterable[int]
) -> dict[int, TreeAutomorphism]:
    """For each requested level, a group element whose sign vector restricted
    to ``levels`` is the corresponding basis vector.

    Gaussian elimination over GF(2) on the generators' sign vectors; levels
    without a preimage are absent from the result.
    """
    levels = sorted(set(levels))
    pos = {lvl: i for i, lvl in enumerate(levels)}

    def vec(g):
        sig = level_sign(t, g)
        v = 0
        for lvl in levels:
            if lvl <= len(sig) and sig[lvl - 1]:
                v |= 1 << pos[lvl]
        return v

    # basis: pivot bit -> (vector, element)
    basis: dict[int, tuple[int, TreeAutomorphism]] = {}
    for g in gens:
        v, h = vec(g), g
        for bit in sorted(basis, reverse=True):
            if v >> bit & 1:
                bv, bh = basis[bit]
                v ^= bv
                h = compose(h, bh)
        if v:
            basis[v.bit_length() - 1] = (v, h)
    # back-substitute to reduced row echelon form
    for bit in sorted(basis):
        v, h = basis[bit]
        for other in sorted(basis):
            if other != bit and basis[other][0] >> bit & 1:
                ov, oh = basis[other]
                basis[other] = (ov ^ v, compose(oh, h))
    out = {}
    for lvl in levels:
        b = pos[lvl]
        if b in basis and basis[b][0] == 1 << b:
            out[lvl] = basis[b][1]
    return out
