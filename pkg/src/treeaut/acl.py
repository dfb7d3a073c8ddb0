"""Orbit sizes under pointwise stabilizers and algebraic closures of finite sets.

Notation: ``D`` is the downward closure of a finite set ``X`` of addresses
(always containing the root).  The stabilizer of ``D`` may permute the
children of a node freely within each canonical class, except for the
children lying in ``D``.  The orbit of ``t`` therefore has size

    prod over steps u_j of the path to t, u_j not in D, of (m_j - k_j)

where ``m_j`` is the number of siblings of ``u_j`` in its canonical class and
``k_j`` the number of those siblings inside ``D``.  ``t`` is algebraic over
``X`` iff this product is finite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import networkx as nx

from .canon import CanonicalScheme, canonical_form
from .errors import InvariantViolation, ResourceLimitExceeded
from .extnat import ExtNat
from .scheme import Address, Scheme, addr, resolve_address

__all__ = [
    "AddressSet",
    "CycleStep",
    "AclResult",
    "SMember",
    "SSetReport",
    "UniversalAcl",
    "DEFAULT_BUDGET",
    "downward_closure",
    "orbit_cardinality",
    "acl_membership",
    "acl_enumerate",
    "s_set",
    "universal_acl_finite",
    "least_cycle",
    "format_cycle",
]

DEFAULT_BUDGET = 10_000


class AddressSet(frozenset):
    """A finite set of addresses, iterated in lexicographic order."""

    def __new__(cls, items: Iterable[Address | str] = ()):
        return super().__new__(cls, (addr(a) for a in items))

    def __iter__(self):
        return iter(sorted(frozenset.__iter__(self)))

    @property
    def is_prefix_closed(self) -> bool:
        return all(a.parent() in self for a in frozenset.__iter__(self) if not a.is_root)

    def __str__(self):
        return "{" + ", ".join(str(a) or "<root>" for a in self) + "}"

    def __repr__(self):
        return f"AddressSet({[str(a) for a in self]!r})"


def _as_set(X) -> AddressSet:
    return X if isinstance(X, AddressSet) else AddressSet(X)


def downward_closure(s: Scheme, X: Iterable[Address | str]) -> AddressSet:
    """Smallest prefix-closed set containing ``X`` and the root."""
    out = {Address()}
    for a in _as_set(X):
        resolve_address(s, a)
        out.update(a.prefixes())
    return AddressSet(out)


# -- canonical grouping ----------------------------------------------------


class _Groups:
    """Per user class: canonical class of each entry and total count per canonical class."""

    def __init__(self, s: Scheme):
        self.scheme = s
        self.cs: CanonicalScheme = canonical_form(s)
        self.entry_canon: dict[str, tuple[str, ...]] = {}
        self.total: dict[str, dict[str, ExtNat]] = {}
        for c in s.classes:
            row = s.entries_of(c)
            canon = tuple(self.cs.canon(e.child) for e in row)
            self.entry_canon[c] = canon
            tot: dict[str, ExtNat] = {}
            for e, k in zip(row, canon):
                tot[k] = tot.get(k, ExtNat(0)) + e.mult
            self.total[c] = tot

    def capped_total(self, cls: str, canon_child: str, cap: int) -> int:
        return sum(
            e.mult.substitute(cap)
            for e, k in zip(self.scheme.entries_of(cls), self.entry_canon[cls])
            if k == canon_child
        )

    def class_of(self, a: Address) -> str:
        return resolve_address(self.scheme, a).cls


def orbit_cardinality(s: Scheme, X, t: Address | str, cap: int | None = None) -> ExtNat:
    """Size of the orbit of ``t`` under the pointwise stabilizer of ``X``.

    With ``cap`` set, every omega multiplicity counts as ``cap`` copies; the
    result then matches the depth truncation ``unfold(s, d, cap)`` with
    nodes labelled by canonical class.
    """
    t = addr(t)
    resolve_address(s, t)
    D = downward_closure(s, X)
    g = _Groups(s)
    closure_by_parent: dict[Address, list[Address]] = {}
    for d in D:
        if not d.is_root:
            closure_by_parent.setdefault(d.parent(), []).append(d)

    result = ExtNat(1)
    cls = s.root
    for u in list(t.prefixes())[1:]:
        p = u.parent()
        e, _ = u.steps[-1]
        pcls = cls
        cls = s.entries_of(pcls)[e].child
        if u in D:
            continue
        v = g.entry_canon[pcls][e]
        m = ExtNat(g.capped_total(pcls, v, cap)) if cap is not None else g.total[pcls][v]
        k = sum(
            1
            for d in closure_by_parent.get(p, ())
            if g.entry_canon[pcls][d.steps[-1][0]] == v
        )
        result = result * (m - k)
    return result


def acl_membership(s: Scheme, X, t: Address | str) -> bool:
    """Whether ``t`` lies in a finite orbit of the pointwise stabilizer of ``X``."""
    return orbit_cardinality(s, X, t).is_finite


# -- cycles in the canonical class graph -------------------------------------


class CycleStep(NamedTuple):
    parent: str
    entry: int
    child: str
    mult: ExtNat


def format_cycle(cycle: Iterable[CycleStep]) -> str:
    cycle = list(cycle)
    if not cycle:
        return ""
    return "".join(f"{st.parent} -[e{st.entry} x{st.mult}]-> " for st in cycle) + cycle[-1].child


def _finite_edges(q: Scheme, c: str) -> Iterator[tuple[int, str, ExtNat]]:
    for i, e in enumerate(q.entries_of(c)):
        if e.mult.is_finite:
            yield i, e.child, e.mult


def _reach(q: Scheme, starts: Iterable[str], finite_only: bool) -> set[str]:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        c = queue.popleft()
        for e in q.entries_of(c):
            if finite_only and not e.mult.is_finite:
                continue
            if e.child not in seen:
                seen.add(e.child)
                queue.append(e.child)
    return seen


def _sccs(q: Scheme, nodes: set[str]) -> list[set[str]]:
    """Strongly connected components of the finite-entry graph restricted to ``nodes``."""
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from((v, w) for v in nodes for _, w, _ in _finite_edges(q, v) if w in nodes)
    return list(nx.strongly_connected_components(g))


def cyclic_classes(q: Scheme, nodes: set[str]) -> set[str]:
    """Classes in ``nodes`` lying on a cycle of finite entries inside ``nodes``."""
    out = set()
    for comp in _sccs(q, nodes):
        if len(comp) > 1:
            out |= comp
        else:
            (v,) = comp
            if any(w == v for _, w, _ in _finite_edges(q, v)):
                out.add(v)
    return out


def cycle_through(q: Scheme, c: str, nodes: set[str]) -> tuple[CycleStep, ...]:
    """Shortest finite-entry cycle through ``c`` inside ``nodes``, least entry indices first."""
    preds: dict[str, list[str]] = {}
    for v in nodes:
        for _, w, _ in _finite_edges(q, v):
            if w in nodes:
                preds.setdefault(w, []).append(v)
    dist = {c: 0}  # finite-entry distance to c
    queue = deque([c])
    while queue:
        w = queue.popleft()
        for v in preds.get(w, ()):
            if v not in dist:
                dist[v] = dist[w] + 1
                queue.append(v)
    options = [(dist[w], i, w, m) for i, w, m in _finite_edges(q, c) if w in dist and w in nodes]
    if not options:
        raise InvariantViolation(f"no cycle through {c}")
    _, i, w, m = min(options, key=lambda o: (o[0], o[1]))
    steps = [CycleStep(c, i, w, m)]
    cur = w
    while cur != c:
        i, w, m = next(
            (i, w, m)
            for i, w, m in _finite_edges(q, cur)
            if w in nodes and dist.get(w) == dist[cur] - 1
        )
        steps.append(CycleStep(cur, i, w, m))
        cur = w
    return tuple(steps)


def least_cycle(cs: CanonicalScheme, starts: Iterable[str]) -> tuple[CycleStep, ...] | None:
    """Least finite-entry cycle reachable from ``starts`` through finite entries.

    "Least" means: through the first cyclic class in canonical order, then
    shortest, then smallest entry indices.
    """
    q = cs.scheme
    nodes = _reach(q, starts, finite_only=True)
    cyc = cyclic_classes(q, nodes)
    if not cyc:
        return None
    c = min(cyc, key=cs.order)
    return cycle_through(q, c, nodes)


# -- algebraic closure -----------------------------------------------------


@dataclass(frozen=True)
class AclResult:
    finite: bool
    members: AddressSet | None = None
    witness: tuple[CycleStep, ...] | None = None

    def to_dict(self) -> dict:
        if self.finite:
            return {"finite": True, "members": [str(a) for a in self.members]}
        return {
            "finite": False,
            "witness_cycle": [
                {"from": st.parent, "entry": st.entry, "to": st.child, "mult": st.mult.to_json()}
                for st in self.witness
            ],
        }


def _exits(s: Scheme, D: AddressSet, g: _Groups) -> Iterator[tuple[Address, str]]:
    """(node in D, canonical class) for each finite sibling group with members outside D."""
    for d in D:
        cls = g.class_of(d)
        inside: dict[str, int] = {}
        for y in D:
            if not y.is_root and y.parent() == d:
                k = g.entry_canon[cls][y.steps[-1][0]]
                inside[k] = inside.get(k, 0) + 1
        for v, m in g.total[cls].items():
            if m.is_finite and inside.get(v, 0) < int(m):
                yield d, v


def acl_enumerate(s: Scheme, X, budget: int = DEFAULT_BUDGET) -> AclResult:
    """Algebraic closure of ``X``: its full member list, or INFINITE with a witness cycle.

    Raises :class:`ResourceLimitExceeded` when the closure is finite but has
    more than ``budget`` elements.
    """
    D = downward_closure(s, X)
    g = _Groups(s)
    exit_classes = sorted({v for _, v in _exits(s, D, g)}, key=g.cs.order)
    cycle = least_cycle(g.cs, exit_classes)
    if cycle is not None:
        return AclResult(False, witness=cycle)

    members = set(D)
    if len(members) > budget:
        raise ResourceLimitExceeded(f"closure exceeds budget {budget}")
    stack = []
    for d in D:
        stack.append(d)
    while stack:
        a = stack.pop()
        cls = g.class_of(a)
        row = s.entries_of(cls)
        for i, e in enumerate(row):
            if not g.total[cls][g.entry_canon[cls][i]].is_finite:
                continue
            for c in range(int(e.mult)):
                b = a.child(i, c)
                if b in members:
                    continue
                members.add(b)
                if len(members) > budget:
                    raise ResourceLimitExceeded(
                        f"algebraic closure is finite but exceeds budget {budget}"
                    )
                stack.append(b)
    return AclResult(True, members=AddressSet(members))


# -- S-set -------------------------------------------------------------------


class SMember(NamedTuple):
    path: tuple[str, ...]  # canonical classes from the root
    n: ExtNat | None  # N_t; None at the root


@dataclass(frozen=True)
class SSetReport:
    classes: tuple[str, ...]
    finite: bool
    witness: tuple[CycleStep, ...] | None
    members: tuple[SMember, ...] | None

    def to_dict(self) -> dict:
        out = {"classes": list(self.classes), "finite": self.finite}
        if self.finite:
            out["members"] = [
                {"path": list(m.path), "N": None if m.n is None else m.n.to_json()}
                for m in self.members
            ]
        else:
            out["witness_cycle"] = [
                {"from": st.parent, "entry": st.entry, "to": st.child, "mult": st.mult.to_json()}
                for st in self.witness
            ]
        return out


def s_set(s: Scheme) -> SSetReport:
    """Part of the orbit-representative tree not below any infinite local group.

    It is finite iff the algebraic closure of the empty set is finite.
    """
    cs = canonical_form(s)
    q = cs.scheme
    nodes = _reach(q, [q.root], finite_only=True)
    classes = tuple(c for c in q.classes if c in nodes)
    cycle = least_cycle(cs, [q.root])
    if cycle is not None:
        return SSetReport(classes, False, cycle, None)
    members = [SMember((q.root,), None)]
    stack = [(q.root,)]
    while stack:
        path = stack.pop()
        for _, w, m in _finite_edges(q, path[-1]):
            members.append(SMember(path + (w,), m))
            stack.append(path + (w,))
    members.sort(key=lambda m: (len(m.path), [q.index[c] for c in m.path]))
    return SSetReport(classes, True, None, tuple(members))


# -- universal finiteness ----------------------------------------------------


@dataclass(frozen=True)
class UniversalAcl:
    finite: bool
    witness_set: AddressSet | None = None
    cycle: tuple[CycleStep, ...] | None = None

    def to_dict(self) -> dict:
        out: dict = {"finite": self.finite}
        if not self.finite:
            out["witness_set"] = [str(a) for a in self.witness_set]
            out["witness_cycle"] = [
                {"from": st.parent, "entry": st.entry, "to": st.child, "mult": st.mult.to_json()}
                for st in self.cycle
            ]
        return out


def _user_address_of_class(s: Scheme, target: str) -> Address:
    """Shortest user address of a node whose canonical class is ``target``."""
    cs = canonical_form(s)
    seen = {s.root}
    queue = deque([(s.root, Address())])
    while queue:
        c, a = queue.popleft()
        if cs.canon(c) == target:
            return a
        for i, e in enumerate(s.entries_of(c)):
            if e.child not in seen:
                seen.add(e.child)
                queue.append((e.child, a.child(i, 0)))
    raise InvariantViolation(f"canonical class {target} not reachable")


def universal_acl_finite(s: Scheme) -> UniversalAcl:
    """Whether the algebraic closure of every finite set is finite.

    When not, ``witness_set`` is a finite X with infinite closure: the empty
    set if possible, otherwise a single node of a class on a finite cycle.
    """
    cs = canonical_form(s)
    q = cs.scheme
    cycle = least_cycle(cs, q.classes)
    if cycle is None:
        return UniversalAcl(True)
    base = least_cycle(cs, [q.root])
    if base is not None:
        X = AddressSet()
        cycle = base
    else:
        X = AddressSet([_user_address_of_class(s, cycle[0].parent)])
    check = acl_enumerate(s, X)
    if check.finite:
        raise InvariantViolation("universal witness set has a finite closure")
    return UniversalAcl(False, X, cycle)
