"""Finite structures with partial automorphisms and bounded amalgamation checks.

Systems live inside the (possibly infinite) tree presented by a scheme:
nodes are :class:`~treeaut.scheme.Address` values, and a node's type is its
canonical class, plus its own address when it belongs to the named set
``ACL(empty set)``.  Embeddings must preserve parents and types, so named
nodes are fixed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping

from .acl import acl_enumerate
from .canon import canonical_form
from .errors import Incompatible, InvariantViolation, NoWitness, ResourceLimitExceeded
from .oracle import extend_one_point, is_partial_iso
from .scheme import Address, Scheme, resolve_address

__all__ = [
    "SchemeTree",
    "SystemKpn",
    "Amalgam",
    "WapResult",
    "ambient_for",
    "is_embedding",
    "amalgamate",
    "wap_base",
    "random_system",
    "random_extension",
    "relocate",
    "check_wap_instance",
]

Label = tuple[str, "str | None"]


class SchemeTree:
    """The tree presented by ``scheme``, explored lazily by address."""

    def __init__(self, scheme: Scheme, named: frozenset[Address] = frozenset()):
        self.scheme = scheme
        self.named = frozenset(named)
        self._cs = canonical_form(scheme)
        self._cls: dict[Address, str] = {}

    def cls(self, a: Address) -> str:
        c = self._cls.get(a)
        if c is None:
            c = self._cls[a] = resolve_address(self.scheme, a).cls
        return c

    def label(self, a: Address) -> Label:
        return (self._cs.canon(self.cls(a)), str(a) if a in self.named else None)

    def parent(self, a: Address) -> Address:
        return a.parent()

    def is_root(self, a: Address) -> bool:
        return a.is_root

    def child_labels(self, p: Address) -> list[Label]:
        out = []
        for i, e in enumerate(self.scheme.entries_of(self.cls(p))):
            lab = (self._cs.canon(e.child), None)
            if lab not in out:
                out.append(lab)
        out.extend(self.label(a) for a in sorted(self.named) if not a.is_root and a.parent() == p)
        return out

    def children_with_label(self, p: Address, lab: Label) -> Iterator[Address]:
        """Children of ``p`` of type ``lab``: round-robin over entries by copy index."""
        canon, name = lab
        if name is not None:
            a = Address.parse(name)
            if not a.is_root and a.parent() == p:
                yield a
            return
        row = self.scheme.entries_of(self.cls(p))
        match = [(i, e.mult) for i, e in enumerate(row) if self._cs.canon(e.child) == canon]
        c = 0
        while True:
            live = [(i, m) for i, m in match if m.is_omega or c < int(m)]
            if not live:
                return
            for i, _ in live:
                a = p.child(i, c)
                if a not in self.named:
                    yield a
            c += 1


def ambient_for(s: Scheme) -> SchemeTree:
    """Ambient tree with names for every element of ``ACL(empty set)``."""
    base = acl_enumerate(s, ())
    if not base.finite:
        raise ResourceLimitExceeded("the algebraic closure of the empty set is infinite")
    return SchemeTree(s, frozenset(base.members))


@dataclass(frozen=True)
class SystemKpn:
    """A finite substructure together with ``n`` partial isomorphisms of it."""

    ambient: SchemeTree
    carrier: frozenset
    partials: tuple[Mapping, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "carrier", frozenset(self.carrier))
        object.__setattr__(self, "partials", tuple(dict(p) for p in self.partials))

    @property
    def n(self) -> int:
        return len(self.partials)

    def problems(self) -> list[str]:
        out = []
        t = self.ambient
        if not self.carrier:
            return ["empty carrier"]
        for a in self.carrier:
            if not t.is_root(a) and t.parent(a) not in self.carrier:
                out.append(f"carrier not prefix-closed at {a}")
        for k, p in enumerate(self.partials):
            if not set(p) <= self.carrier or not set(p.values()) <= self.carrier:
                out.append(f"partial {k} leaves the carrier")
            if not is_partial_iso(t, p):
                out.append(f"partial {k} is not a partial isomorphism")
        return out

    def validate(self) -> "SystemKpn":
        probs = self.problems()
        if probs:
            raise InvariantViolation("; ".join(probs))
        return self

    def describe(self) -> dict:
        return {
            "carrier": sorted(str(a) for a in self.carrier),
            "partials": [
                sorted((str(x), str(y)) for x, y in p.items()) for p in self.partials
            ],
        }


def is_embedding(f: Mapping, S: SystemKpn, T: SystemKpn) -> bool:
    """``f`` embeds ``S`` into ``T``: structure embedding with ``f o phi_i`` inside ``psi_i o f``."""
    t = S.ambient
    if set(f) != set(S.carrier) or len(set(f.values())) != len(f):
        return False
    if not set(f.values()) <= T.carrier:
        return False
    for x, y in f.items():
        if t.label(x) != t.label(y) or t.is_root(x) != t.is_root(y):
            return False
        if not t.is_root(x) and f[t.parent(x)] != t.parent(y):
            return False
    if S.n != T.n:
        return False
    for phi, psi in zip(S.partials, T.partials):
        for x, y in phi.items():
            if psi.get(f[x]) != f[y]:
                return False
    return True


@dataclass(frozen=True)
class Amalgam:
    system: SystemKpn
    k: dict
    l: dict


def _by_depth(nodes) -> list:
    return sorted(nodes, key=lambda a: (a.depth, a))


def amalgamate(T0: SystemKpn, F: SystemKpn, G: SystemKpn, i: Mapping, j: Mapping) -> Amalgam:
    """Union of ``F`` and a renamed copy of ``G`` glued along the images of ``T0``.

    ``G`` is renamed so that it meets ``F`` exactly in ``i(T0)``; the partial
    maps of the result are the unions ``chi_k + xi_k``.  Raises
    :class:`Incompatible` when the unions are not partial isomorphisms or the
    renamed copy does not fit beside ``F`` in the ambient tree.
    """
    if not is_embedding(i, T0, F) or not is_embedding(j, T0, G):
        raise Incompatible("i and j must embed T0 into F and G")
    t = F.ambient
    l: dict = {j[x]: i[x] for x in T0.carrier}
    for y in _by_depth(G.carrier):
        if y in l:
            continue
        try:
            l[y] = extend_one_point(t, l, y, avoid=F.carrier)
        except NoWitness as exc:
            raise Incompatible(f"no room for {y} beside F: {exc}") from None
    partials = []
    for k, (chi, xi) in enumerate(zip(F.partials, G.partials)):
        union = dict(chi)
        for a, b in xi.items():
            la, lb = l[a], l[b]
            if la in union and union[la] != lb:
                raise Incompatible(
                    f"partial {k} disagrees at {la}: {union[la]} (from F) vs {lb} (from G)"
                )
            union[la] = lb
        if len(set(union.values())) != len(union):
            raise Incompatible(f"partial {k} is not injective on the union")
        partials.append(union)
    E = SystemKpn(t, F.carrier | frozenset(l.values()), tuple(partials))
    probs = E.problems()
    if probs:
        raise Incompatible("; ".join(probs))
    return Amalgam(E, {x: x for x in F.carrier}, l)


# -- the extension used for amalgamation ---------------------------------------


def _acl_close(t: SchemeTree, nodes: set, budget: int) -> set:
    res = acl_enumerate(t.scheme, nodes, budget=budget)
    if not res.finite:
        raise ResourceLimitExceeded("algebraic closure of the carrier is infinite")
    return set(res.members)


def _children_in(t: SchemeTree, p, carrier) -> dict:
    out: dict = {}
    for a in carrier:
        if not a.is_root and a.parent() == p:
            out.setdefault(t.label(a), []).append(a)
    for v in out.values():
        v.sort()
    return out


def _fresh_child(t: SchemeTree, p, lab, carrier):
    for a in t.children_with_label(p, lab):
        if a not in carrier:
            return a
    raise InvariantViolation(f"no free child of type {lab} below {p}")


def _symmetrize(t: SchemeTree, carrier: set, partials: list[dict]) -> None:
    """Extend every partial map to an automorphism of the carrier, adding nodes as needed."""
    top = max(a.depth for a in carrier)
    for k in range(1, top + 1):
        prev = [a for a in carrier if a.depth == k - 1]
        rep = {a: a for a in prev}

        def find(a):
            while rep[a] != a:
                rep[a] = rep[rep[a]]
                a = rep[a]
            return a

        for psi in partials:
            for a in prev:
                ra, rb = find(a), find(psi[a])
                if ra != rb:
                    rep[max(ra, rb)] = min(ra, rb)
        orbits: dict = {}
        for a in prev:
            orbits.setdefault(find(a), []).append(a)
        for members in orbits.values():
            kids = {a: _children_in(t, a, carrier) for a in members}
            labels = {lab for d in kids.values() for lab in d}
            for lab in sorted(labels, key=repr):
                want = max(len(d.get(lab, ())) for d in kids.values())
                for a in sorted(members):
                    have = len(kids[a].get(lab, ()))
                    for _ in range(want - have):
                        carrier.add(_fresh_child(t, a, lab, carrier))
        for psi in partials:
            for a in sorted(prev):
                kx = _children_in(t, a, carrier)
                ky = _children_in(t, psi[a], carrier)
                rng_set = set(psi.values())
                for lab, xs in kx.items():
                    free_x = [x for x in xs if x not in psi]
                    free_y = [y for y in ky.get(lab, ()) if y not in rng_set]
                    if len(free_x) != len(free_y):
                        raise InvariantViolation("unequal child counts after balancing")
                    for x, y in zip(free_x, free_y):
                        psi[x] = y


def wap_base(S0: SystemKpn, budget: int = 10_000, literal: bool = False) -> SystemKpn:
    """Extension of ``S0`` over which amalgamation is done by disjoint union.

    The carrier is the algebraic closure of ``S0``'s carrier, enlarged until
    every partial map extends to an automorphism of it; the partial maps are
    replaced by those automorphisms.  With ``literal`` the closure is used
    as is and the partial maps are left alone.
    """
    t = S0.ambient
    root = Address()
    carrier = _acl_close(t, set(S0.carrier), budget)
    partials = [dict(p) for p in S0.partials]
    if literal:
        return SystemKpn(t, frozenset(carrier), tuple(partials)).validate()
    for p in partials:
        p.setdefault(root, root)
    while True:
        _symmetrize(t, carrier, partials)
        if len(carrier) > budget:
            raise ResourceLimitExceeded(f"base extension exceeds budget {budget}")
        closed = _acl_close(t, carrier, budget)
        if closed == carrier:
            break
        carrier = closed
    return SystemKpn(t, frozenset(carrier), tuple(partials)).validate()


# -- random systems ------------------------------------------------------------


def _random_new_child(t: SchemeTree, carrier, rng: random.Random, spread: int = 3):
    parents = sorted(carrier)
    rng.shuffle(parents)
    for p in parents:
        labs = t.child_labels(p)
        rng.shuffle(labs)
        for lab in labs:
            free = []
            for a in t.children_with_label(p, lab):
                if a not in carrier:
                    free.append(a)
                    if len(free) >= spread:
                        break
            if free:
                return rng.choice(free)
    return None


def _grow_partial(t: SchemeTree, carrier, psi: dict, rng: random.Random, attempts: int) -> None:
    for _ in range(attempts):
        rng_set = set(psi.values())
        xs = sorted(
            a for a in carrier if a not in psi and not a.is_root and a.parent() in psi
        )
        if not xs:
            return
        x = rng.choice(xs)
        ys = [
            b
            for b in sorted(carrier)
            if b not in rng_set
            and not b.is_root
            and b.parent() == psi[x.parent()]
            and t.label(b) == t.label(x)
        ]
        if ys:
            psi[x] = rng.choice(ys)


def random_system(t: SchemeTree, rng: random.Random, size: int, n: int) -> SystemKpn:
    """Random system with at most ``size`` carrier nodes and ``n`` partial maps."""
    root = Address()
    carrier = {root} | set(a for a in t.named if a.depth == 0)
    target = rng.randint(1, size)
    while len(carrier) < target:
        a = _random_new_child(t, carrier, rng)
        if a is None:
            break
        carrier.add(a)
    partials = []
    for _ in range(n):
        psi: dict = {}
        if rng.random() < 0.85:
            psi[root] = root
            _grow_partial(t, carrier, psi, rng, rng.randint(0, 2 * size))
        partials.append(psi)
    return SystemKpn(t, frozenset(carrier), tuple(partials)).validate()


def random_extension(base: SystemKpn, rng: random.Random, extra: int) -> SystemKpn:
    """Random system containing ``base`` (by inclusion) with up to ``extra`` new nodes."""
    t = base.ambient
    carrier = set(base.carrier)
    for _ in range(rng.randint(0, extra)):
        a = _random_new_child(t, carrier, rng)
        if a is None:
            break
        carrier.add(a)
    partials = []
    for p in base.partials:
        psi = dict(p)
        _grow_partial(t, carrier, psi, rng, rng.randint(0, 2 * extra))
        partials.append(psi)
    return SystemKpn(t, frozenset(carrier), tuple(partials)).validate()


def relocate(G: SystemKpn, rng: random.Random, spread: int = 4) -> tuple[SystemKpn, dict]:
    """Random isomorphic copy of ``G`` in the ambient tree, with the moving map."""
    t = G.ambient
    m: dict = {}
    used: set = set()
    for x in _by_depth(G.carrier):
        if x.is_root:
            m[x] = x
            used.add(x)
            continue
        free = []
        for a in t.children_with_label(m[x.parent()], t.label(x)):
            if a not in used:
                free.append(a)
                if len(free) >= spread:
                    break
        if not free:
            raise InvariantViolation(f"cannot relocate {x}")
        m[x] = rng.choice(free)
        used.add(m[x])
    partials = tuple({m[a]: m[b] for a, b in p.items()} for p in G.partials)
    return SystemKpn(t, frozenset(m.values()), partials).validate(), m


@dataclass(frozen=True)
class WapResult:
    passed: bool
    samples: int
    base: SystemKpn
    failure: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "status": "PASS" if self.passed else "FAIL",
            "samples": self.samples,
            "base": self.base.describe(),
        }
        if self.failure is not None:
            out["failure"] = self.failure
        return out


def check_wap_instance(
    s: Scheme,
    S0: SystemKpn,
    size_bound: int = 6,
    samples: int = 50,
    seed=0,
    budget: int = 10_000,
    literal: bool = False,
) -> WapResult:
    """Sampled check that ``S0`` has an extension over which pairs amalgamate.

    Samples pairs of extensions ``F``, ``G`` of the base with up to
    ``size_bound`` extra nodes each, amalgamates them and verifies the
    embeddings and the square ``k o i = l o j``.  Raises
    :class:`ResourceLimitExceeded` when no finite base exists within budget.
    """
    if S0.ambient.scheme != s:
        raise InvariantViolation("system does not live in this scheme's tree")
    rng = random.Random(seed)
    T1 = wap_base(S0, budget, literal)
    e = {x: x for x in S0.carrier}
    if not is_embedding(e, S0, T1):
        raise InvariantViolation("S0 does not embed into its base extension")
    for k in range(samples):
        F = random_extension(T1, rng, size_bound)
        G0 = random_extension(T1, rng, size_bound)
        G, move = relocate(G0, rng)
        i = {x: x for x in T1.carrier}
        j = {x: move[x] for x in T1.carrier}
        failure = None
        try:
            am = amalgamate(T1, F, G, i, j)
        except Incompatible as exc:
            failure = {"sample": k, "reason": str(exc)}
        else:
            if not is_embedding(am.k, F, am.system):
                failure = {"sample": k, "reason": "k is not an embedding"}
            elif not is_embedding(am.l, G, am.system):
                failure = {"sample": k, "reason": "l is not an embedding"}
            elif any(am.k[i[x]] != am.l[j[x]] for x in S0.carrier):
                failure = {"sample": k, "reason": "k o i o e != l o j o e"}
        if failure is not None:
            failure["F"] = F.describe()
            failure["G"] = G.describe()
            return WapResult(False, k + 1, T1, failure)
    return WapResult(True, samples, T1)
