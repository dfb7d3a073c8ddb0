import random

import pytest

from treeaut.errors import Incompatible, InvariantViolation, ResourceLimitExceeded
from treeaut.scheme import Address, parse_scheme
from treeaut.wap import (
    SchemeTree,
    SystemKpn,
    ambient_for,
    amalgamate,
    check_wap_instance,
    is_embedding,
    random_system,
    wap_base,
)

STAR = parse_scheme("root = r; class r { child l * omega; } class l { }")
OMEGA_REG = parse_scheme("root = v; class v { child v * omega; }")
E4 = parse_scheme("root = r; class r { child v * omega; } class v { child v * 2; }")
A = Address.parse
R = Address()


def ident(nodes):
    return {x: x for x in nodes}


def test_ambient_labels():
    t = ambient_for(STAR)
    assert t.named == {R}
    assert t.label(R)[1] == "" and t.label(A("e0.c4"))[1] is None
    kids = t.children_with_label(R, t.label(A("e0.c0")))
    assert [next(kids) for _ in range(3)] == [A("e0.c0"), A("e0.c1"), A("e0.c2")]
    fin = parse_scheme("root = r; class r { child a * 2; } class a { }")
    t = ambient_for(fin)
    assert t.named == {R, A("e0.c0"), A("e0.c1")}
    assert t.label(A("e0.c0")) != t.label(A("e0.c1"))
    with pytest.raises(ResourceLimitExceeded):
        ambient_for(parse_scheme("root = v; class v { child v * 2; }"))


def test_system_validation():
    t = ambient_for(STAR)
    SystemKpn(t, {R, A("e0.c0")}, ({R: R, A("e0.c0"): A("e0.c0")},)).validate()
    with pytest.raises(InvariantViolation):
        SystemKpn(t, {A("e0.c0")}).validate()
    with pytest.raises(InvariantViolation):
        SystemKpn(t, {R, A("e0.c0")}, ({R: R, A("e0.c0"): A("e0.c1")},)).validate()


def test_amalgamate_trivial():
    t = ambient_for(STAR)
    T0 = SystemKpn(t, {R, A("e0.c0")}, ({R: R},))
    am = amalgamate(T0, T0, T0, ident(T0.carrier), ident(T0.carrier))
    assert am.system.carrier == T0.carrier
    assert is_embedding(am.k, T0, am.system) and is_embedding(am.l, T0, am.system)


def test_amalgamate_star_leaves():
    """Two extensions that each add one leaf get both leaves in the amalgam."""
    t = ambient_for(STAR)
    a, b = A("e0.c0"), A("e0.c1")
    T0 = SystemKpn(t, {R, a}, ({R: R, a: a},))
    F = SystemKpn(t, {R, a, b}, ({R: R, a: a, b: b},))
    G = SystemKpn(t, {R, a, b}, ({R: R, a: a},))
    am = amalgamate(T0, F, G, ident(T0.carrier), ident(T0.carrier))
    E = am.system
    assert len(E.carrier) == 4 and am.l[b] not in F.carrier
    assert is_embedding(am.k, F, E) and is_embedding(am.l, G, E)
    assert all(am.k[x] == am.l[x] for x in T0.carrier)


def test_e4_clash():
    """Fixing a depth-one node of E4 leaves the two grandchildren below it
    swappable; extensions that decide the swap differently cannot be glued."""
    t = ambient_for(E4)
    u, a, b = A("e0.c0"), A("e0.c0/e0.c0"), A("e0.c0/e0.c1")
    T0 = SystemKpn(t, {R, u, a}, ({R: R, u: u},))
    F = SystemKpn(t, {R, u, a, b}, ({R: R, u: u, a: b, b: a},))
    G = SystemKpn(t, {R, u, a}, ({R: R, u: u, a: a},))
    with pytest.raises(Incompatible, match="disagrees"):
        amalgamate(T0, F, G, ident(T0.carrier), ident(T0.carrier))
    # and no finite base exists: the closure of a depth-one node is infinite
    with pytest.raises(ResourceLimitExceeded):
        wap_base(SystemKpn(t, {R, u}, ({R: R},)))
    with pytest.raises(ResourceLimitExceeded):
        check_wap_instance(E4, SystemKpn(t, {R, u}, ({R: R},)))


def test_literal_base_fails_where_symmetrized_base_succeeds():
    t = ambient_for(STAR)
    a, b, c = A("e0.c0"), A("e0.c1"), A("e0.c2")
    S0 = SystemKpn(t, {R, a}, ({R: R},))
    literal = wap_base(S0, literal=True)
    assert literal.carrier == S0.carrier
    F = SystemKpn(t, {R, a, b}, ({R: R, a: b},))
    G = SystemKpn(t, {R, a, c}, ({R: R, a: c},))
    with pytest.raises(Incompatible):
        amalgamate(literal, F, G, ident(literal.carrier), ident(literal.carrier))
    sym = wap_base(S0)
    assert sym.partials[0][a] == a
    assert set(sym.partials[0]) == sym.carrier == set(sym.partials[0].values())
    res = check_wap_instance(STAR, S0, 8, 50, seed=0)
    assert res.passed
    bad = check_wap_instance(STAR, S0, 8, 50, seed=0, literal=True)
    assert not bad.passed and bad.to_dict()["status"] == "FAIL"


@pytest.mark.parametrize("scheme,n", [(STAR, 1), (OMEGA_REG, 2)])
def test_check_wap_passes(scheme, n):
    t = ambient_for(scheme)
    for seed in range(4):
        S0 = random_system(t, random.Random(seed), 4, n)
        res = check_wap_instance(scheme, S0, size_bound=8, samples=50, seed=seed)
        assert res.passed, res.to_dict()
        assert res.samples == 50
        assert is_embedding(ident(S0.carrier), S0, res.base)


def test_base_is_symmetric():
    t = ambient_for(OMEGA_REG)
    for seed in range(10):
        S0 = random_system(t, random.Random(seed), 5, 2)
        T1 = wap_base(S0)
        for p in T1.partials:
            assert set(p) == T1.carrier == set(p.values())


def test_foreign_system_rejected():
    S0 = SystemKpn(SchemeTree(STAR), {R})
    with pytest.raises(InvariantViolation):
        check_wap_instance(OMEGA_REG, S0)
