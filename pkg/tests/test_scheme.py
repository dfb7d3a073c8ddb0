import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeaut.errors import ParseError, ResourceLimitExceeded, ValidationError
from treeaut.extnat import OMEGA
from treeaut.finite_tree import FiniteTree, parse_finite_tree, unfold
from treeaut.generate import random_scheme
from treeaut.scheme import Address, Scheme, parse_scheme, resolve_address, serialize

BINARY = "root=v; class v { child v * 2; }"
STAR = "root=r; class r { child v * omega; } class v { }"
E4 = "root = r; class r { child v * omega; } class v { child v * 2; }"


def test_parse_examples():
    b = parse_scheme(BINARY)
    assert b.classes == ("v",) and b.entries_of("v")[0].mult == 2
    s = parse_scheme(STAR)
    assert s.classes == ("r", "v") and s.entries_of("r")[0].mult == OMEGA
    with pytest.raises(ValidationError, match="zero multiplicity"):
        parse_scheme("root=r; class r { child x * 0; } class x { }")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse_scheme("root = v;\nclass v {\n  child v * ;\n}")
    assert info.value.line == 3 and info.value.column == 13
    with pytest.raises(ParseError):
        parse_scheme("root = v;")
    with pytest.raises(ParseError):
        parse_scheme("root = v; class v { child v * 2 }")
    with pytest.raises(ParseError):
        parse_scheme("root = v; class v { child v ^ 2; }")


def test_validation_errors():
    with pytest.raises(ValidationError, match="undeclared"):
        parse_scheme("root = v; class v { child w * 1; }")
    with pytest.raises(ValidationError, match="unreachable"):
        parse_scheme("root = v; class v { } class w { }")
    with pytest.raises(ValidationError, match="twice"):
        parse_scheme("root = v; class v { } class v { }")
    with pytest.raises(ValidationError, match="root"):
        Scheme(("v",), "w", ((),))


def test_comments_and_whitespace():
    s = parse_scheme("# a comment\nroot=v;   # trailing\nclass v{child v*2;}")
    assert s == parse_scheme(BINARY)


def test_serialize_is_canonical_text():
    assert serialize(parse_scheme(BINARY)) == "root = v;\nclass v {\n  child v * 2;\n}\n"
    assert "class v { }" in serialize(parse_scheme(STAR))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_round_trip(seed):
    s = random_scheme(random.Random(seed))
    assert parse_scheme(serialize(s)) == s


def test_address_syntax():
    a = Address.parse("e0.c2/e1.c0")
    assert a.steps == ((0, 2), (1, 0)) and str(a) == "e0.c2/e1.c0"
    assert Address.parse("").is_root and Address().depth == 0
    assert a.parent() == Address.parse("e0.c2")
    assert list(a.prefixes()) == [Address(), Address.parse("e0.c2"), a]
    with pytest.raises(ParseError):
        Address.parse("e0c1")


def test_resolve_address():
    b, s = parse_scheme(BINARY), parse_scheme(STAR)
    assert resolve_address(b, "") == ("v", ())
    assert resolve_address(b, Address(((0, 1), (0, 0)))) == ("v", (2, 2))
    assert resolve_address(s, "e0.c17") == ("v", (OMEGA,))
    with pytest.raises(ValidationError):
        resolve_address(b, "e0.c2")
    with pytest.raises(ValidationError):
        resolve_address(b, "e1.c0")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_resolution_is_prefix_closed(seed):
    rng = random.Random(seed)
    s = random_scheme(rng)
    t = unfold(s, 3, cap=2)
    for a in t.addresses:
        assert len(resolve_address(s, a).multiplicities) == a.depth
        for p in a.prefixes():
            resolve_address(s, p)


def test_parse_finite_tree():
    assert len(parse_finite_tree("()")) == 1
    t = parse_finite_tree("(()())")
    assert t.children[0] == (1, 2)
    t = parse_finite_tree("(()(()))")
    assert [len(t.children[c]) for c in t.children[0]] == [0, 1]
    for bad in ("", "(()", "())", "()()", "(x)"):
        with pytest.raises(ParseError):
            parse_finite_tree(bad)


def test_finite_tree_validation():
    with pytest.raises(ValidationError):
        FiniteTree((0, 2, 1))
    with pytest.raises(ValidationError):
        FiniteTree((1, 0))


def test_unfold_examples():
    b = unfold(parse_scheme(BINARY), 2, cap=4)
    assert len(b) == 7 and b.height == 2
    s = unfold(parse_scheme(STAR), 1, cap=3)
    assert len(s) == 4 and len(s.children[0]) == 3
    assert len(unfold(parse_scheme(E4), 2, cap=2)) == 7
    assert b.labels == ("v",) * 7 and b.addresses[1] == Address.parse("e0.c0")
    with pytest.raises(ResourceLimitExceeded):
        unfold(parse_scheme(BINARY), 20, budget=1000)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 3), st.integers(1, 3))
def test_unfold_truncation_is_consistent(seed, d, cap):
    s = random_scheme(random.Random(seed))
    small, big = unfold(s, d, cap), unfold(s, d + 1, cap)
    keep = [x for x in range(len(big)) if big.depth[x] <= d]
    assert [big.addresses[x] for x in keep] == list(small.addresses)
    assert [big.labels[x] for x in keep] == list(small.labels)
