"""Canonical forms: AHU codes for finite trees, bisimulation quotients for schemes.

The quotient of a scheme merges classes whose unfoldings are isomorphic and
adds up the multiplicities of same-class entries.  The result presents the
tree of orbit representatives, and each entry ``(child, N)`` carries the
local group ``Sym(N)`` of the wreath decomposition of the automorphism group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .extnat import ExtNat
from .finite_tree import FiniteTree
from .scheme import Entry, Scheme, serialize

__all__ = [
    "subtree_codes",
    "canonical_code_finite",
    "refine_classes",
    "CanonicalScheme",
    "canonical_form",
    "isomorphic",
    "QuotientRow",
    "QuotientReport",
    "quotient_report",
]


def subtree_codes(t: FiniteTree) -> list[str]:
    """AHU code of the subtree below every node (labels included when present)."""
    codes: list[str] = [""] * len(t)
    for x in reversed(t.bfs_order):
        lab = t.labels[x] if t.labels is not None else ""
        codes[x] = "(" + lab + "|" + "".join(sorted(codes[c] for c in t.children[x])) + ")"
    return codes


def canonical_code_finite(t: FiniteTree) -> str:
    """Isomorphism-invariant code of a finite rooted tree.

    Two trees get equal codes iff they are isomorphic (respecting labels);
    codes compare as strings, which gives the total order used elsewhere.
    """
    return subtree_codes(t)[0]


def refine_classes(s: Scheme) -> dict[str, int]:
    """Coarsest count-respecting partition of the classes of ``s``.

    Colours are ranks of signatures and so do not depend on class names:
    isomorphic schemes get the same colours on corresponding classes.
    """
    colour = {c: 0 for c in s.classes}
    n_colours = 1
    while True:
        sigs = {}
        for c in s.classes:
            agg: dict[int, ExtNat] = {}
            for e in s.entries_of(c):
                k = colour[e.child]
                agg[k] = agg.get(k, ExtNat(0)) + e.mult
            sigs[c] = (colour[c], tuple(sorted((k, m.sort_key()) for k, m in agg.items())))
        ranks = {sig: i for i, sig in enumerate(sorted(set(sigs.values())))}
        colour = {c: ranks[sigs[c]] for c in s.classes}
        if len(ranks) == n_colours:
            return colour
        n_colours = len(ranks)


@dataclass(frozen=True)
class CanonicalScheme:
    """Quotient scheme plus the certificate ``original class -> canonical class``.

    Canonical classes are named after their first-declared member and listed
    by (BFS depth from the root, code); entries are sorted by child code.
    """

    scheme: Scheme
    certificate: Mapping[str, str]
    codes: Mapping[str, int]

    def canon(self, cls: str) -> str:
        return self.certificate[cls]

    def order(self, cls: str) -> int:
        return self.scheme.index[cls]

    def structure_key(self) -> tuple:
        """Name-free description; equal for isomorphic schemes."""
        s = self.scheme
        return (
            self.codes[s.root],
            tuple(
                (self.codes[c], tuple((self.codes[e.child], e.mult.sort_key()) for e in row))
                for c, row in zip(s.classes, s.entries)
            ),
        )


@lru_cache(maxsize=512)
def canonical_form(s: Scheme) -> CanonicalScheme:
    colour = refine_classes(s)
    rep: dict[int, str] = {}
    for c in s.classes:
        rep.setdefault(colour[c], c)
    cert = {c: rep[colour[c]] for c in s.classes}
    codes = {rep[k]: k for k in rep}

    merged: dict[str, dict[str, ExtNat]] = {}
    for k, r in rep.items():
        agg: dict[str, ExtNat] = {}
        for e in s.entries_of(r):
            ch = cert[e.child]
            agg[ch] = agg.get(ch, ExtNat(0)) + e.mult
        merged[r] = agg

    root = cert[s.root]
    depth = {root: 0}
    queue = deque([root])
    while queue:
        c = queue.popleft()
        for ch in sorted(merged[c], key=codes.__getitem__):
            if ch not in depth:
                depth[ch] = depth[c] + 1
                queue.append(ch)
    order = sorted(rep.values(), key=lambda c: (depth[c], codes[c]))
    rows = tuple(
        tuple(Entry(ch, m) for ch, m in sorted(merged[c].items(), key=lambda kv: codes[kv[0]]))
        for c in order
    )
    return CanonicalScheme(Scheme(tuple(order), root, rows), cert, codes)


def isomorphic(s1: Scheme, s2: Scheme) -> bool:
    """Whether the two schemes unfold to isomorphic rooted trees."""
    return canonical_form(s1).structure_key() == canonical_form(s2).structure_key()


@dataclass(frozen=True)
class QuotientRow:
    cls: str
    is_root: bool
    incoming: tuple[tuple[str, ExtNat], ...]  # (parent class, N_t) per position


@dataclass(frozen=True)
class QuotientReport:
    canonical: CanonicalScheme
    rows: tuple[QuotientRow, ...]
    tree_finite: bool

    @property
    def decomposition(self) -> str:
        s = self.canonical.scheme
        factors = []
        for c, row in zip(s.classes, s.entries):
            for e in row:
                factors.append(f"{c}->{e.child}: Sym({e.mult})")
        shape = "finite" if self.tree_finite else "infinite"
        body = ", ".join(factors) if factors else "trivial"
        return f"Aut(T) = Wr over T-bar ({shape}, unfolded from {s.root}) of [{body}]"

    def to_dict(self) -> dict:
        return {
            "classes": list(self.canonical.scheme.classes),
            "certificate": dict(sorted(self.canonical.certificate.items())),
            "rows": [
                {
                    "class": r.cls,
                    "root": r.is_root,
                    "incoming": [{"from": p, "N": n.to_json()} for p, n in r.incoming],
                }
                for r in self.rows
            ],
            "tbar_finite": self.tree_finite,
            "decomposition": self.decomposition,
            "canonical_scheme": serialize(self.canonical.scheme),
        }

    def to_text(self) -> str:
        lines = ["quotient classes:"]
        for r in self.rows:
            inc = ", ".join(f"N={n} from {p}" for p, n in r.incoming) or "-"
            tag = " (root)" if r.is_root else ""
            lines.append(f"  {r.cls}{tag}: {inc}")
        lines.append(self.decomposition)
        return "\n".join(lines)


def _has_cycle(s: Scheme) -> bool:
    state: dict[str, int] = {}

    def visit(c):
        state[c] = 1
        for e in s.entries_of(c):
            st = state.get(e.child, 0)
            if st == 1 or (st == 0 and visit(e.child)):
                return True
        state[c] = 2
        return False

    return visit(s.root)


def quotient_report(s: Scheme) -> QuotientReport:
    cs = canonical_form(s)
    q = cs.scheme
    incoming: dict[str, list[tuple[str, ExtNat]]] = {c: [] for c in q.classes}
    for c, row in zip(q.classes, q.entries):
        for e in row:
            incoming[e.child].append((c, e.mult))
    rows = tuple(QuotientRow(c, c == q.root, tuple(incoming[c])) for c in q.classes)
    return QuotientReport(cs, rows, not _has_cycle(q))
