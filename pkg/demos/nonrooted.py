"""Rigidity conditions for the three non-rooted corpus trees and one more.

    python demos/nonrooted.py
"""

from pathlib import Path

from treeaut.nonrooted import decide_rigidity_conditions, load_edge_indexed, parse_edge_indexed

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

graphs = {n: load_edge_indexed(CORPUS / f"{n}.eig") for n in ("t3_loop", "biregular", "omega_loop")}
graphs["omega_two"] = parse_edge_indexed("vertex a; vertex b; edge a -- b [omega, 2];")
graphs["line"] = parse_edge_indexed("vertex a; vertex b; edge a -- b [1, 1]; edge a -- b [1, 1];")

for name, g in graphs.items():
    r = decide_rigidity_conditions(g)
    cells = ", ".join(f"{m.value}={r.conditions[m]}" for m in r.modes)
    flag = "  (degenerate)" if r.degenerate else ""
    print(f"{name:12s} {cells}{flag}")
