"""Non-rooted trees given as edge-indexed graphs.

An edge ``a -- b [m, n]`` says that every lift of ``a`` has ``m`` neighbours
across the edge and every lift of ``b`` has ``n``.  The tree is the universal
cover; rooting it at a lift of a vertex gives a scheme whose classes record
the edge end through which a node was entered.

A loop ``v -- v [k, k]`` is read as a single end paired with itself, so each
lift of ``v`` has ``k`` neighbours across it.  A loop with two different
indices has two ends, one per direction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .acl import s_set, universal_acl_finite
from .errors import ParseError, ValidationError
from .extnat import OMEGA, ExtNat
from .scheme import Entry, Scheme, _Cursor, _tokenize, serialize
from .verdict import MODES, Mode, decide_ample_generics, decide_strong_cofinality

__all__ = [
    "Edge",
    "EdgeIndexedGraph",
    "parse_edge_indexed",
    "load_edge_indexed",
    "root_at",
    "RootedAnalysis",
    "NonRootedReport",
    "decide_rigidity_conditions",
]

_EIG_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>\d+)|(?P<punct>--|[;\[\],])"
)


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    ia: ExtNat  # index at the end on a
    ib: ExtNat  # index at the end on b

    @property
    def self_paired(self) -> bool:
        return self.a == self.b and self.ia == self.ib


@dataclass(frozen=True)
class EdgeIndexedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.vertices:
            raise ValidationError("a graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex")
        vs = set(self.vertices)
        for k, e in enumerate(self.edges):
            if e.a not in vs or e.b not in vs:
                raise ValidationError(f"edge {k} uses an undeclared vertex")
            if e.ia < 1 or e.ib < 1:
                raise ValidationError(f"edge {k} has a zero index")
        seen = {self.vertices[0]}
        grew = True
        while grew:
            grew = False
            for e in self.edges:
                if (e.a in seen) != (e.b in seen):
                    seen |= {e.a, e.b}
                    grew = True
        if seen != vs:
            missing = ", ".join(v for v in self.vertices if v not in seen)
            raise ValidationError(f"graph is not connected: {missing} unreachable")

    def ends(self) -> list[tuple[int, int]]:
        """Edge ends as ``(edge, side)``; a self-paired loop has only side 0."""
        out = []
        for k, e in enumerate(self.edges):
            out.append((k, 0))
            if not e.self_paired:
                out.append((k, 1))
        return out

    def at(self, end: tuple[int, int]) -> str:
        e = self.edges[end[0]]
        return e.a if end[1] == 0 else e.b

    def index(self, end: tuple[int, int]) -> ExtNat:
        e = self.edges[end[0]]
        return e.ia if end[1] == 0 else e.ib

    def opposite(self, end: tuple[int, int]) -> tuple[int, int]:
        k, side = end
        return end if self.edges[k].self_paired else (k, 1 - side)

    def to_text(self) -> str:
        lines = [f"vertex {v};" for v in self.vertices]
        lines += [f"edge {e.a} -- {e.b} [{e.ia}, {e.ib}];" for e in self.edges]
        return "\n".join(lines) + "\n"


def parse_edge_indexed(text: str) -> EdgeIndexedGraph:
    """Parse ``.eig`` text: ``vertex v;`` lines, then ``edge a -- b [m, n];`` lines."""
    cur = _Cursor(_tokenize(text, _EIG_TOKEN_RE))
    vertices: list[str] = []
    edges: list[Edge] = []

    def mult():
        tok = cur.peek
        if tok.kind == "int":
            cur.i += 1
            m = ExtNat(int(tok.text))
        elif tok.kind == "ident" and tok.text == "omega":
            cur.i += 1
            m = OMEGA
        else:
            raise ParseError("expected a positive integer or 'omega'", tok.line, tok.col)
        if m == 0:
            raise ValidationError(f"zero index (line {tok.line}, column {tok.col})")
        return m

    while cur.peek.kind == "ident" and cur.peek.text == "vertex":
        cur.i += 1
        tok = cur.take("ident")
        if tok.text in vertices:
            raise ValidationError(f"vertex {tok.text!r} declared twice (line {tok.line})")
        vertices.append(tok.text)
        cur.take("punct", ";")
    if not vertices:
        tok = cur.peek
        raise ParseError("expected at least one vertex declaration", tok.line, tok.col)
    while cur.peek.kind != "eof":
        cur.take("ident", "edge")
        a = cur.take("ident")
        cur.take("punct", "--")
        b = cur.take("ident")
        for tok in (a, b):
            if tok.text not in vertices:
                raise ValidationError(
                    f"undeclared vertex {tok.text!r} (line {tok.line}, column {tok.col})"
                )
        cur.take("punct", "[")
        ia = mult()
        cur.take("punct", ",")
        ib = mult()
        cur.take("punct", "]")
        cur.take("punct", ";")
        edges.append(Edge(a.text, b.text, ia, ib))
    return EdgeIndexedGraph(tuple(vertices), tuple(edges))


def load_edge_indexed(path) -> EdgeIndexedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_indexed(fh.read())


def _arrival_names(g: EdgeIndexedGraph, taken: set[str]) -> dict[tuple[int, int], str]:
    """Class name for entering a vertex through each end."""
    names: dict[tuple[int, int], str] = {}
    used = set(taken)
    for end in g.ends():
        k, side = end
        dst = g.at(end)
        src = g.at(g.opposite(end))
        base = f"e{k}_{src}_{dst}"
        if g.edges[k].a == g.edges[k].b and not g.edges[k].self_paired and side == 0:
            base += "_rev"
        name = base
        while name in used:
            name += "_"
        used.add(name)
        names[end] = name
    return names


def root_at(g: EdgeIndexedGraph, v: str) -> Scheme:
    """Scheme of the universal cover rooted at a lift of ``v``.

    A node entered through end ``a`` at vertex ``w`` has, for every end ``f``
    at ``w``, ``i(f)`` children entered through the opposite of ``f``,
    one fewer when ``f`` is ``a`` itself (that neighbour is the parent).
    """
    if v not in g.vertices:
        raise ValidationError(f"unknown vertex {v!r}")
    names = _arrival_names(g, {v})
    ends_at: dict[str, list[tuple[int, int]]] = {w: [] for w in g.vertices}
    for end in g.ends():
        ends_at[g.at(end)].append(end)

    def row(w: str, arrived: tuple[int, int] | None) -> tuple[Entry, ...]:
        out = []
        for f in ends_at[w]:
            m = g.index(f)
            if f == arrived:
                m = m - 1
            if m != 0:
                out.append(Entry(names[g.opposite(f)], m))
        return tuple(out)

    rows = {v: row(v, None)}
    order = [v]
    queue = [v]
    while queue:
        c = queue.pop(0)
        for e in rows[c]:
            if e.child not in rows:
                end = next(x for x, n in names.items() if n == e.child)
                rows[e.child] = row(g.at(end), end)
                order.append(e.child)
                queue.append(e.child)
    return Scheme(tuple(order), v, tuple(rows[c] for c in order))


@dataclass(frozen=True)
class RootedAnalysis:
    vertex: str
    scheme: Scheme
    singleton_finite: dict  # Mode -> bool: closure of the chosen vertex is finite
    universal: dict  # Mode -> bool: every finite set has a finite closure
    degenerate: bool


@dataclass(frozen=True)
class NonRootedReport:
    graph: EdgeIndexedGraph
    rooted: tuple[RootedAnalysis, ...]
    conditions: dict  # Mode -> bool, the common answer for (1), (2), (3)
    singleton_reduction: dict  # Mode -> bool
    degenerate: bool
    modes: tuple[Mode, ...] = MODES

    @property
    def reduction_consistent(self) -> bool:
        return all(self.conditions[m] == self.singleton_reduction[m] for m in MODES)

    def to_dict(self) -> dict:
        return {
            "input": self.graph.to_text(),
            "rootings": [
                {
                    "vertex": r.vertex,
                    "scheme": serialize(r.scheme),
                    "singleton_closure_finite": {m.value: r.singleton_finite[m] for m in self.modes},
                    "ample_generics": {m.value: r.universal[m] for m in self.modes},
                    "degenerate": r.degenerate,
                }
                for r in self.rooted
            ],
            "conditions": {
                "FA_vertex_stabilizers": {m.value: self.conditions[m] for m in self.modes},
                "finite_closures": {m.value: self.conditions[m] for m in self.modes},
                "open_subgroup_ample_generics": {m.value: self.conditions[m] for m in self.modes},
            },
            "singleton_reduction": {m.value: self.singleton_reduction[m] for m in self.modes},
            "reduction_consistent": self.reduction_consistent,
            "degenerate": self.degenerate,
            "citations": ["coNonRooted", "lePo"],
        }

    def to_text(self) -> str:
        out = ["input:", *("  " + ln for ln in self.graph.to_text().rstrip("\n").split("\n"))]
        for r in self.rooted:
            out.append(f"rooted at {r.vertex}:")
            out += ["  " + ln for ln in serialize(r.scheme).rstrip("\n").split("\n")]
            for m in self.modes:
                out.append(
                    f"  [{m.value}] closure of the vertex finite: {r.singleton_finite[m]}; "
                    f"ample generics: {r.universal[m]}"
                )
        for m in self.modes:
            verdict = "HOLD" if self.conditions[m] else "FAIL"
            out.append(
                f"coNonRooted [{m.value}]: conditions (1) FA of vertex stabilizers, "
                f"(2) finite closures, (3) open subgroup with ample generics: {verdict}"
            )
            out.append(
                f"lePo [{m.value}]: singleton reduction gives {self.singleton_reduction[m]}"
            )
        if self.degenerate:
            out.append("degenerate: the two modes disagree")
        return "\n".join(out) + "\n"


def decide_rigidity_conditions(g: EdgeIndexedGraph, modes=MODES) -> NonRootedReport:
    rooted = []
    for v in g.vertices:
        s = root_at(g, v)
        single = {
            Mode.PAPER_LITERAL: s_set(s).finite,
            Mode.GROUP_REDUCED: decide_strong_cofinality(s, Mode.GROUP_REDUCED).answer,
        }
        univ = {
            Mode.PAPER_LITERAL: universal_acl_finite(s).finite,
            Mode.GROUP_REDUCED: decide_ample_generics(s, Mode.GROUP_REDUCED).answer,
        }
        rooted.append(
            RootedAnalysis(v, s, single, univ, univ[Mode.PAPER_LITERAL] != univ[Mode.GROUP_REDUCED])
        )
    conditions = {m: all(r.universal[m] for r in rooted) for m in MODES}
    reduction = {m: all(r.singleton_finite[m] for r in rooted) for m in MODES}
    degenerate = conditions[Mode.PAPER_LITERAL] != conditions[Mode.GROUP_REDUCED]
    return NonRootedReport(
        g, tuple(rooted), conditions, reduction, degenerate, tuple(Mode(m) for m in modes)
    )
