from __future__ import annotations

from pathlib import Path

import pytest

from treeaut import load_scheme, root_at
from treeaut.nonrooted import load_edge_indexed

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
SCHEME_FILES = ("star", "binary", "omega_regular", "e4", "rigid_chain", "e6")
GRAPH_FILES = ("t3_loop", "omega_loop", "biregular")

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def corpus_scheme(name: str):
    return load_scheme(CORPUS / f"{name}.tg")


def corpus_graph(name: str):
    return load_edge_indexed(CORPUS / f"{name}.eig")


def nine_schemes() -> dict:
    """The six rooted corpus schemes plus each corpus graph rooted at its first vertex."""
    out = {n: corpus_scheme(n) for n in SCHEME_FILES}
    for n in GRAPH_FILES:
        g = corpus_graph(n)
        out[n] = root_at(g, g.vertices[0])
    return out


@pytest.fixture
def corpus():
    return nine_schemes()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance(request):
    results = request.config.stash[ACCEPTANCE_KEY]

    def record(n: int, ok: bool, detail: str) -> None:
        results[n] = (ok, detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def all_parent_arrays(n: int):
    """Every tree on nodes 0..n-1 with parent[i] < i (each shape appears, with repeats)."""
    import itertools

    for tail in itertools.product(*[range(i) for i in range(1, n)]):
        yield (0,) + tail


def distinct_trees(n: int):
    """One representative per isomorphism class of rooted trees on ``n`` nodes."""
    from treeaut.canon import canonical_code_finite
    from treeaut.finite_tree import FiniteTree

    seen = {}
    for parent in all_parent_arrays(n):
        t = FiniteTree(parent)
        seen.setdefault(canonical_code_finite(t), t)
    return list(seen.values())
