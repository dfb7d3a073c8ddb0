import random

import pytest

from conftest import corpus_graph
from treeaut.canon import canonical_form, isomorphic
from treeaut.errors import ParseError, ValidationError
from treeaut.extnat import OMEGA
from treeaut.finite_tree import unfold
from treeaut.generate import random_edge_indexed
from treeaut.nonrooted import (
    _arrival_names,
    decide_rigidity_conditions,
    parse_edge_indexed,
    root_at,
)
from treeaut.scheme import parse_scheme
from treeaut.verdict import Mode

P, G = Mode.PAPER_LITERAL, Mode.GROUP_REDUCED


def test_parse_examples():
    g = parse_edge_indexed("vertex a; vertex b;\nedge a -- b [2, omega];")
    assert g.vertices == ("a", "b") and g.edges[0].ia == 2 and g.edges[0].ib == OMEGA
    assert g.ends() == [(0, 0), (0, 1)]
    assert g.at((0, 1)) == "b" and g.opposite((0, 1)) == (0, 0)
    assert parse_edge_indexed(g.to_text()) == g
    loop = parse_edge_indexed("vertex v; edge v -- v [3, 3];")
    assert loop.edges[0].self_paired and loop.ends() == [(0, 0)]
    assert loop.opposite((0, 0)) == (0, 0)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_edge_indexed("edge a -- b [1, 1];")
    with pytest.raises(ParseError):
        parse_edge_indexed("vertex a; edge a -- a [1 1];")
    with pytest.raises(ValidationError, match="undeclared"):
        parse_edge_indexed("vertex a; edge a -- b [1, 1];")
    with pytest.raises(ValidationError, match="zero"):
        parse_edge_indexed("vertex a; vertex b; edge a -- b [0, 1];")
    with pytest.raises(ValidationError, match="connected"):
        parse_edge_indexed("vertex a; vertex b;")
    with pytest.raises(ValidationError, match="twice"):
        parse_edge_indexed("vertex a; vertex a;")


def test_root_at_examples():
    t3 = root_at(corpus_graph("t3_loop"), "v")
    assert t3.root == "v" and [e.mult for e in t3.entries_of("v")] == [3]
    child = t3.entries_of("v")[0].child
    assert [e.mult for e in t3.entries_of(child)] == [2]
    assert len(canonical_form(t3).scheme.classes) == 2
    bi = corpus_graph("biregular")
    sa, sb = root_at(bi, "a"), root_at(bi, "b")
    assert [e.mult for e in sa.entries_of("a")] == [2]
    assert [e.mult for e in sb.entries_of("b")] == [3]
    with pytest.raises(ValidationError):
        root_at(bi, "c")


def test_unequal_loop_names():
    g = parse_edge_indexed("vertex v; edge v -- v [2, 3];")
    names = _arrival_names(g, {"v"})
    assert sorted(names.values()) == ["e0_v_v", "e0_v_v_rev"]
    s = root_at(g, "v")
    assert sum(int(e.mult) for e in s.entries_of("v")) == 5


def _degree(g, v):
    return sum(int(g.index(f)) for f in g.ends() if g.at(f) == v)


def _vertex_of_class(g, s):
    names = _arrival_names(g, {s.root})
    out = {s.root: s.root}
    for end, name in names.items():
        out[name] = g.at(end)
    return out


def _check_degrees(g, depth=4):
    """Every node of the unfolded cover has the degree of its vertex."""
    for v in g.vertices:
        s = root_at(g, v)
        t = unfold(s, depth, cap=100)
        where = _vertex_of_class(g, s)
        for x in range(len(t)):
            if t.depth[x] == depth:
                continue
            deg = len(t.children[x]) + (0 if x == 0 else 1)
            assert deg == _degree(g, where[t.labels[x]]), (v, t.addresses[x])


def test_degrees_on_finite_graphs():
    for text in (
        "vertex v; edge v -- v [3, 3];",
        "vertex v; edge v -- v [2, 3];",
        "vertex a; vertex b; edge a -- b [2, 3];",
        "vertex a; vertex b; edge a -- b [1, 2]; edge b -- b [2, 2]; edge a -- a [1, 2];",
    ):
        _check_degrees(parse_edge_indexed(text))


def test_degrees_on_random_graphs():
    rng = random.Random(3)
    done = 0
    while done < 40:
        g = random_edge_indexed(rng)
        if any(e.ia == OMEGA or e.ib == OMEGA for e in g.edges):
            continue
        if max(_degree(g, v) for v in g.vertices) > 4:
            continue
        _check_degrees(g, depth=3)
        done += 1


def test_loop_cover_is_vertex_transitive():
    """For a single self-paired loop, the subtree below any child, with the
    parent added back as an extra branch, looks like the whole tree."""
    for k in (2, 3, 4):
        g = parse_edge_indexed(f"vertex v; edge v -- v [{k}, {k}];")
        t = unfold(root_at(g, "v"), 4, cap=10)
        assert all(len(t.children[x]) + (x != 0) == k for x in range(len(t)) if t.depth[x] < 4)
        direct = parse_scheme(f"root = r; class r {{ child c * {k}; }} class c {{ child c * {k - 1}; }}")
        assert isomorphic(root_at(g, "v"), direct)
    g = parse_edge_indexed("vertex v; edge v -- v [omega, omega];")
    assert isomorphic(root_at(g, "v"), parse_scheme("root = c; class c { child c * omega; }"))


def test_corpus_conditions():
    expect = {"t3_loop": False, "biregular": False, "omega_loop": True}
    for name, holds in expect.items():
        r = decide_rigidity_conditions(corpus_graph(name))
        assert r.conditions[P] == r.conditions[G] == holds, name
        assert r.reduction_consistent and not r.degenerate
        d = r.to_dict()
        assert d["citations"] == ["coNonRooted", "lePo"]
        assert d["conditions"]["finite_closures"]["PAPER_LITERAL"] == holds
        assert "coNonRooted" in r.to_text()


def test_omega_two_pipeline():
    g = parse_edge_indexed("vertex a; vertex b; edge a -- b [omega, 2];")
    r = decide_rigidity_conditions(g)
    assert r.conditions == {P: True, G: True}
    assert [x.vertex for x in r.rooted] == ["a", "b"]
    assert all(x.singleton_finite[m] for x in r.rooted for m in (P, G))


def test_degenerate_graph():
    """The line, as the cover of a doubled edge, has trivial local groups on
    infinite branches, which splits the two readings."""
    g = parse_edge_indexed("vertex a; vertex b; edge a -- b [1, 1]; edge a -- b [1, 1];")
    r = decide_rigidity_conditions(g)
    assert r.conditions[G] and not r.conditions[P]
    assert r.degenerate and r.reduction_consistent


def test_singleton_reduction_on_random_graphs():
    rng = random.Random(17)
    for _ in range(300):
        r = decide_rigidity_conditions(random_edge_indexed(rng))
        assert r.reduction_consistent
