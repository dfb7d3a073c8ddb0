"""Walk through the E4 tree: every closure of the empty set is finite, yet
fixing one node at depth one leaves an infinite closure below it.

    python demos/separation.py
"""

from pathlib import Path

from treeaut import load_scheme
from treeaut.acl import acl_enumerate, format_cycle, s_set, universal_acl_finite
from treeaut.finite_tree import unfold
from treeaut.oracle import acl_bruteforce
from treeaut.verdict import MODES, decide_ample_generics, decide_strong_cofinality

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

s = load_scheme(CORPUS / "e4.tg")
print(open(CORPUS / "e4.tg").read())

print("S-set finite:", s_set(s).finite)
u = universal_acl_finite(s)
print("closure of every finite set finite:", u.finite)
fixed = list(u.witness_set)
res = acl_enumerate(s, fixed)
print(f"closure of {[str(a) for a in fixed]}: infinite along {format_cycle(res.witness)}")

# the same thing by brute force on a truncation: fixing e0.c0 leaves
# orbits of size 2, 4, 8 below it, all finite, so all of them are in the closure
t = unfold(s, 4, 3)
u0 = t.node_of[fixed[0]]
sizes = acl_bruteforce(t, [u0])
for d in range(1, 5):
    below = {sizes[x] for x in t.subtree(u0) if t.depth[x] == d}
    print(f"  depth {d}: orbit sizes below the fixed node {sorted(below)}")

for m in MODES:
    sc = decide_strong_cofinality(s, m)
    am = decide_ample_generics(s, m)
    print(f"[{m.value}] strong cofinality {sc.answer}, ample generics {am.answer}")
