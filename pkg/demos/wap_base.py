"""Amalgamating partial automorphisms of the star.

Over the bare closure, two extensions may send the same leaf to different
places, so they do not glue.  Completing each partial map to an
automorphism of the base first removes the clash.

    python demos/wap_base.py
"""

import json
from pathlib import Path

from treeaut import load_scheme
from treeaut.errors import Incompatible
from treeaut.scheme import Address
from treeaut.wap import SystemKpn, ambient_for, amalgamate, check_wap_instance, wap_base

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
s = load_scheme(CORPUS / "star.tg")
t = ambient_for(s)
r, a, b, c = Address(), Address.parse("e0.c0"), Address.parse("e0.c1"), Address.parse("e0.c2")

S0 = SystemKpn(t, {r, a}, ({r: r},))
base = wap_base(S0, literal=True)
F = SystemKpn(t, {r, a, b}, ({r: r, a: b},))
G = SystemKpn(t, {r, a, c}, ({r: r, a: c},))
ident = {x: x for x in base.carrier}
try:
    amalgamate(base, F, G, ident, ident)
except Incompatible as exc:
    print("bare closure:", exc)

T1 = wap_base(S0)
print("completed base:", json.dumps(T1.describe()))
for literal in (True, False):
    res = check_wap_instance(s, S0, size_bound=6, samples=50, seed=0, literal=literal)
    label = "bare closure" if literal else "completed base"
    print(f"{label}: {res.to_dict()['status']} after {res.samples} samples")
