import random

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_parent_arrays, distinct_trees, nine_schemes
from treeaut.canon import (
    canonical_code_finite,
    canonical_form,
    isomorphic,
    quotient_report,
    refine_classes,
)
from treeaut.extnat import OMEGA
from treeaut.finite_tree import FiniteTree, parse_finite_tree, unfold
from treeaut.generate import random_scheme
from treeaut.oracle import all_automorphisms, find_isomorphism
from treeaut.scheme import Scheme, parse_scheme

BINARY = parse_scheme("root = v; class v { child v * 2; }")
TERNARY = parse_scheme("root = v; class v { child v * 3; }")
E4 = parse_scheme("root = r; class r { child v * omega; } class v { child v * 2; }")

# number of unlabeled rooted trees on n nodes, n = 1..8, counted by brute force
ROOTED_TREE_COUNTS = [1, 1, 2, 4, 9, 20, 48, 115]


def test_code_examples():
    a = FiniteTree((0, 0, 0, 2))  # leaf, then a chain of two
    b = FiniteTree((0, 0, 1, 0))  # chain of two, then a leaf
    assert canonical_code_finite(a) == canonical_code_finite(b)
    assert canonical_code_finite(parse_finite_tree("(())")) != canonical_code_finite(
        parse_finite_tree("()")
    )
    assert len(distinct_trees(4)) == 4


def test_counts_match_bruteforce_isomorphism_classes():
    """Isomorphism classes found by explicit matching, not by codes."""
    for n in range(1, 7):
        reps = []
        for parent in all_parent_arrays(n):
            t = FiniteTree(parent)
            if not any(find_isomorphism(t, r) is not None for r in reps):
                reps.append(t)
        assert len(reps) == ROOTED_TREE_COUNTS[n - 1]
    for n in (7, 8):
        assert len(distinct_trees(n)) == ROOTED_TREE_COUNTS[n - 1]


def test_codes_equal_iff_isomorphic_exhaustive():
    trees = [t for n in range(1, 9) for t in distinct_trees(n)]
    codes = [canonical_code_finite(t) for t in trees]
    assert len(set(codes)) == len(trees)
    rng = random.Random(0)
    for n in range(1, 9):
        for parent in rng.sample(list(all_parent_arrays(n)), min(40, len(list(all_parent_arrays(n))))):
            t = FiniteTree(parent)
            code = canonical_code_finite(t)
            rep = trees[codes.index(code)]
            assert find_isomorphism(t, rep) is not None
    # distinct codes of the same size are never isomorphic
    small = [t for n in range(1, 7) for t in distinct_trees(n)]
    for i, t in enumerate(small):
        for u in small[i + 1 :]:
            if len(t) == len(u):
                assert find_isomorphism(t, u) is None


def test_labels_are_respected():
    t = FiniteTree((0, 0, 0), labels=("r", "a", "b"))
    u = FiniteTree((0, 0, 0), labels=("r", "a", "a"))
    assert canonical_code_finite(t) != canonical_code_finite(u)
    assert len(all_automorphisms(t)) == 1 and len(all_automorphisms(u)) == 2


def test_merge_examples():
    dup = Scheme.from_dict("r", {"r": [("a", 1), ("b", 1)], "a": [("a", 3)], "b": [("b", 3)]})
    cs = canonical_form(dup)
    assert cs.scheme.classes == ("r", "a")
    assert cs.certificate == {"r": "r", "a": "a", "b": "a"}
    assert cs.scheme.entries_of("r") == (("a", 2),)

    two = Scheme.from_dict("r", {"r": [("b", 2), ("c", 3)], "b": [], "c": []})
    assert canonical_form(two).scheme.entries_of("r") == (("b", 5),)
    assert canonical_form(BINARY).scheme == BINARY


def test_isomorphic_examples():
    assert isomorphic(BINARY, BINARY.rename({"v": "w"}))
    assert not isomorphic(BINARY, TERNARY)
    dup = Scheme.from_dict("v", {"v": [("v", 1), ("w", 1)], "w": [("v", 1), ("w", 1)]})
    assert isomorphic(dup, BINARY)
    for d in range(5):
        for cap in (2, 3):
            assert canonical_code_finite(unfold(dup, d, cap).unlabeled()) == canonical_code_finite(
                unfold(BINARY, d, cap).unlabeled()
            )


def test_omega_absorbs_in_merge():
    s = Scheme.from_dict("r", {"r": [("a", "omega"), ("b", 2)], "a": [], "b": []})
    assert canonical_form(s).scheme.entries_of("r") == (("a", OMEGA),)


def test_quotient_examples():
    star = parse_scheme("root = r; class r { child l * omega; } class l { }")
    q = quotient_report(star)
    assert [(r.cls, r.incoming) for r in q.rows] == [("r", ()), ("l", (("r", OMEGA),))]
    assert "Sym(omega)" in q.decomposition and q.tree_finite
    q = quotient_report(BINARY)
    assert q.rows[0].incoming == (("v", 2),) and not q.tree_finite
    q = quotient_report(E4)
    assert q.rows[1].incoming == (("r", OMEGA), ("v", 2))
    assert all(n >= 1 for r in q.rows for _, n in r.incoming)


def test_idempotent_on_corpus():
    for s in nine_schemes().values():
        cs = canonical_form(s)
        again = canonical_form(cs.scheme)
        assert again.scheme == cs.scheme
        assert set(again.certificate.items()) == {(c, c) for c in cs.scheme.classes}


def test_truncations_agree_with_canonical_form_on_corpus():
    for s in nine_schemes().values():
        q = canonical_form(s).scheme
        for d in range(5):
            for cap in (2, 3):
                a = unfold(s, d, cap, budget=50_000).unlabeled()
                b = unfold(q, d, cap, budget=50_000).unlabeled()
                assert canonical_code_finite(a) == canonical_code_finite(b)


def _shuffled(s: Scheme, rng: random.Random) -> tuple[Scheme, dict]:
    names = list(s.classes)
    new = [f"k{i}" for i in range(len(names))]
    rng.shuffle(new)
    mapping = dict(zip(names, new))
    renamed = s.rename(mapping)
    order = list(range(len(renamed.classes)))
    rng.shuffle(order)
    rows = [tuple(rng.sample(row, len(row))) for row in renamed.entries]
    return (
        Scheme(
            tuple(renamed.classes[i] for i in order),
            renamed.root,
            tuple(rows[i] for i in order),
        ),
        mapping,
    )


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_invariant_under_renaming(seed):
    rng = random.Random(seed)
    s = random_scheme(rng)
    t, mapping = _shuffled(s, rng)
    a, b = canonical_form(s), canonical_form(t)
    assert a.structure_key() == b.structure_key()
    assert isomorphic(s, t)
    # the certificate commutes with the renaming
    for c in s.classes:
        same = [d for d in s.classes if a.canon(d) == a.canon(c)]
        assert {b.canon(mapping[d]) for d in same} == {b.canon(mapping[c])}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_quotient_has_no_bisimilar_pairs(seed):
    s = random_scheme(random.Random(seed))
    q = canonical_form(s).scheme
    colours = refine_classes(q)
    assert len(set(colours.values())) == len(q.classes)
    for row in q.entries:
        children = [e.child for e in row]
        assert len(children) == len(set(children))
