"""The level-sign map on the binary tree and on E6, checked by brute force.

Each automorphism of a finite truncation permutes every level; recording the
parity of those permutations gives a homomorphism onto (Z_2)^depth.

    python demos/level_signs.py
"""

import random
from pathlib import Path

from treeaut import load_scheme
from treeaut.finite_tree import unfold
from treeaut.oracle import automorphism_generators, level_sign, random_automorphism, sign_preimages
from treeaut.verdict import witness_countable_cofinality

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
rng = random.Random(0)

for name in ("binary", "e6"):
    s = load_scheme(CORPUS / f"{name}.tg")
    w = witness_countable_cofinality(s)
    print(f"{name}:")
    print("\n".join("  " + ln for ln in w.to_text().splitlines()))
    t = unfold(s, 4, 2)
    g, h = random_automorphism(t, rng), random_automorphism(t, rng)
    print("  sgn(g)   ", level_sign(t, g))
    print("  sgn(h)   ", level_sign(t, h))
    print("  sgn(g h) ", level_sign(t, g * h))
    pre = sign_preimages(t, automorphism_generators(t), w.levels(4))
    for lvl, a in sorted(pre.items()):
        print(f"  preimage of level {lvl}: signs {level_sign(t, a)}")
