"""Decisions for the three group properties, witnesses and the full report.

Two readings are computed side by side:

``PAPER_LITERAL``
    strong cofinality iff ``ACL(empty set)`` is finite; ample generics (and
    the small index property) iff every finite set has a finite closure.
``GROUP_REDUCED``
    a property fails iff a cycle of finite entries can reach, through finite
    entries, an entry with finite multiplicity at least 2.  For strong
    cofinality the cycle must be reachable from the root through finite
    entries, for ample generics through any entries.

The readings differ only on trees whose infinite finite-entry branches carry
trivial local groups (rigid chains); reports flag such schemes as degenerate.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass, field

from . import __version__
from .acl import (
    CycleStep,
    _reach,
    cycle_through,
    cyclic_classes,
    format_cycle,
    orbit_cardinality,
    s_set,
    universal_acl_finite,
)
from .canon import CanonicalScheme, canonical_form, quotient_report
from .errors import InvariantViolation, NotApplicable
from .finite_tree import DEFAULT_CAP, unfold
from .oracle import (
    acl_bruteforce,
    automorphism_generators,
    compose,
    level_sign,
    random_automorphism,
    sign_preimages,
)
from .scheme import Scheme, serialize

__all__ = [
    "Property",
    "Mode",
    "Verdict",
    "WitnessBranch",
    "AnalysisReport",
    "SCHEMA_VERSION",
    "decide_strong_cofinality",
    "decide_ample_generics",
    "decide_small_index",
    "corollaries",
    "witness_countable_cofinality",
    "oracle_summary",
    "full_report",
]

SCHEMA_VERSION = 1


class Property(str, enum.Enum):
    STRONG_COFINALITY = "STRONG_COFINALITY"
    AMPLE_GENERICS = "AMPLE_GENERICS_OPEN_SUBGROUP"
    SMALL_INDEX = "SMALL_INDEX_PROPERTY"


class Mode(str, enum.Enum):
    PAPER_LITERAL = "PAPER_LITERAL"
    GROUP_REDUCED = "GROUP_REDUCED"


MODES = (Mode.PAPER_LITERAL, Mode.GROUP_REDUCED)


@dataclass(frozen=True)
class Verdict:
    property: Property
    answer: bool
    mode: Mode
    justification: tuple[tuple[str, str], ...]  # (citation tag, step)
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "mode": self.mode.value,
            "answer": self.answer,
            "degenerate": self.degenerate,
            "justification": [{"tag": t, "step": s} for t, s in self.justification],
        }

    def to_text(self) -> str:
        flag = "  [degenerate: modes disagree]" if self.degenerate else ""
        lines = [f"{self.property.value} [{self.mode.value}]: {str(self.answer).upper()}{flag}"]
        lines += [f"    {t}: {s}" for t, s in self.justification]
        return "\n".join(lines)


# -- the reduced criterion -----------------------------------------------------


@dataclass(frozen=True)
class _Qualifying:
    prefix: tuple[CycleStep, ...]  # root -> first cycle class
    cycle: tuple[CycleStep, ...]
    tail: tuple[CycleStep, ...]  # cycle class -> nontrivial entry (last step), may be empty
    hit: int  # steps from a cycle-class node to the nontrivial group's members

    @property
    def nontrivial(self) -> CycleStep:
        if self.tail:
            return self.tail[-1]
        return next(st for st in self.cycle if _nontrivial(st.mult))


def _nontrivial(m) -> bool:
    return m.is_finite and int(m) >= 2


def _bfs_path(q: Scheme, src: str, goal, finite_only: bool, within: set[str]) -> tuple[CycleStep, ...] | None:
    """Shortest entry path from ``src`` to a class satisfying ``goal``, least entries first."""
    back: dict[str, CycleStep | None] = {src: None}
    queue = deque([src])
    while queue:
        c = queue.popleft()
        if goal(c):
            steps = []
            while back[c] is not None:
                st = back[c]
                steps.append(st)
                c = st.parent
            return tuple(reversed(steps))
        for i, e in enumerate(q.entries_of(c)):
            if finite_only and not e.mult.is_finite:
                continue
            if e.child in within and e.child not in back:
                back[e.child] = CycleStep(c, i, e.child, e.mult)
                queue.append(e.child)
    return None


def _qualifying(cs: CanonicalScheme, from_root_finite: bool) -> _Qualifying | None:
    q = cs.scheme
    nodes = _reach(q, [q.root], finite_only=True) if from_root_finite else set(q.classes)
    cyc = cyclic_classes(q, nodes)

    def has_nontrivial(c):
        return any(e.mult.is_finite and int(e.mult) >= 2 for e in q.entries_of(c))

    reach_nt = {c for c in cyc if any(has_nontrivial(d) for d in _reach(q, [c], True))}
    if not reach_nt:
        return None
    c = min(reach_nt, key=cs.order)
    prefix = _bfs_path(q, q.root, lambda d: d == c, from_root_finite, nodes)
    cycle = cycle_through(q, c, nodes)
    for k, st in enumerate(cycle):
        if _nontrivial(st.mult):
            return _Qualifying(prefix, cycle, (), k + 1)
    path = _bfs_path(q, c, has_nontrivial, True, set(q.classes))
    end = path[-1].child if path else c
    i, e = next((i, e) for i, e in enumerate(q.entries_of(end)) if _nontrivial(e.mult))
    tail = path + (CycleStep(end, i, e.child, e.mult),)
    return _Qualifying(prefix, cycle, tail, len(tail))


# -- decisions -----------------------------------------------------------------


def _strong_answer(s: Scheme, mode: Mode) -> bool:
    if mode is Mode.PAPER_LITERAL:
        return s_set(s).finite
    return _qualifying(canonical_form(s), True) is None


def _ample_answer(s: Scheme, mode: Mode) -> bool:
    if mode is Mode.PAPER_LITERAL:
        return universal_acl_finite(s).finite
    return _qualifying(canonical_form(s), False) is None


def _positive_strong_steps(s: Scheme) -> list[tuple[str, str]]:
    ss = s_set(s)
    if ss.finite:
        n = len(ss.members)
        first = ("ThM1", f"S is finite ({n} node{'' if n == 1 else 's'}), so ACL(empty set) is finite")
    else:
        first = (
            "ThM1",
            "S is infinite but every finite-entry cycle carries only trivial local groups "
            "below it; the rigid part contributes a trivial factor",
        )
    return [
        first,
        ("le2", "the group splits over the finite part of S into iterated wreath factors"),
        ("le3", "finite wreath products of groups with uncountable strong cofinality keep it"),
        ("leMain2", "each factor leaving S is a product of groups (G_n Wr S_inf)"),
    ]


def _negative_strong_steps(s: Scheme, mode: Mode) -> list[tuple[str, str]]:
    if mode is Mode.PAPER_LITERAL:
        ss = s_set(s)
        cyc = format_cycle(ss.witness)
        return [
            ("ThM1", f"S is infinite: finite-entry cycle {cyc} reachable from the root"),
            ("le4", "S contains an infinite branch S_0 with finite local groups"),
            ("le3.5", "a continuous surjection onto (Z_2)^N gives countable cofinality"),
        ]
    w = _qualifying(canonical_form(s), True)
    return [
        ("ThM1", f"S contains the finite-entry cycle {format_cycle(w.cycle)}"),
        (
            "le4",
            f"the branch along it meets the nontrivial group Sym({w.nontrivial.mult}) "
            f"at infinitely many levels",
        ),
        ("le3.5", "the level-sign map onto (Z_2)^N gives countable cofinality"),
    ]


def _degenerate(s: Scheme, answer_fn) -> bool:
    return answer_fn(s, Mode.PAPER_LITERAL) != answer_fn(s, Mode.GROUP_REDUCED)


def decide_strong_cofinality(s: Scheme, mode: Mode = Mode.PAPER_LITERAL) -> Verdict:
    mode = Mode(mode)
    answer = _strong_answer(s, mode)
    steps = _positive_strong_steps(s) if answer else _negative_strong_steps(s, mode)
    return Verdict(
        Property.STRONG_COFINALITY, answer, mode, tuple(steps), _degenerate(s, _strong_answer)
    )


def decide_ample_generics(s: Scheme, mode: Mode = Mode.PAPER_LITERAL) -> Verdict:
    mode = Mode(mode)
    answer = _ample_answer(s, mode)
    if answer and not _strong_answer(s, mode):
        raise InvariantViolation("ample generics without strong cofinality")
    if answer:
        steps = [
            ("ThM2", "ACL(X) is finite for every finite X"),
            ("ThM2", "adding names for ACL(empty set), the partial-automorphism classes have WAP and JEP"),
            ("ThM2", "so an open subgroup has ample generics"),
        ]
    elif mode is Mode.PAPER_LITERAL:
        u = universal_acl_finite(s)
        X = "{" + ", ".join(str(a) or "root" for a in u.witness_set) + "}"
        steps = [
            ("ThM2", f"ACL(X) is infinite for X = {X}: cycle {format_cycle(u.cycle)}"),
            ("le4", "the stabilizer of X maps onto (Z_2)^N through level signs"),
            ("le3.5", "hence no small index property, and no open subgroup with ample generics"),
        ]
    else:
        w = _qualifying(canonical_form(s), False)
        steps = [
            (
                "ThM2",
                f"finite-entry cycle {format_cycle(w.cycle)} reaches Sym({w.nontrivial.mult}) "
                f"below a finite set",
            ),
            ("le4", "the stabilizer of that set maps onto (Z_2)^N through level signs"),
            ("le3.5", "hence no small index property, and no open subgroup with ample generics"),
        ]
    return Verdict(
        Property.AMPLE_GENERICS, answer, mode, tuple(steps), _degenerate(s, _ample_answer)
    )


def decide_small_index(s: Scheme, mode: Mode = Mode.PAPER_LITERAL) -> Verdict:
    amp = decide_ample_generics(s, mode)
    if amp.answer:
        steps = (
            ("ThM2", "(2) => (3): an open subgroup with ample generics"),
            ("KeRo-6.9", "a group with ample generics has the small index property"),
            ("ThM2", "the open subgroup has countable index, so G has it too"),
        )
    else:
        steps = (("ThM2", "not (1) => not (3)"),) + tuple(
            st for st in amp.justification if st[0] != "ThM2"
        )
    return Verdict(Property.SMALL_INDEX, amp.answer, amp.mode, steps, amp.degenerate)


def corollaries(v: Verdict) -> list[str]:
    """Consequences of a positive ample-generics verdict."""
    if v.property is not Property.AMPLE_GENERICS:
        raise ValueError("corollaries apply to ample-generics verdicts")
    if not v.answer:
        return []
    return [
        "KeRo-6.24: every homomorphism from Aut(T) into a separable topological group is continuous",
        "KeRo-6.25: the product topology is the only Polish group topology on Aut(T)",
    ]


# -- witnesses -----------------------------------------------------------------


@dataclass(frozen=True)
class WitnessBranch:
    """An infinite branch of S along which the local groups are nontrivial infinitely often.

    Nodes of the cycle's first class sit at depths ``offset + k * period``;
    the nontrivial groups act on the level ``offset + hit + k * period``.
    """

    prefix: tuple[CycleStep, ...]
    cycle: tuple[CycleStep, ...]
    tail: tuple[CycleStep, ...]
    nontrivial: CycleStep
    shape: str = "INFINITE_BRANCH"

    @property
    def offset(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def first_level(self) -> int:
        if self.tail:
            return self.offset + len(self.tail)
        k = next(i for i, st in enumerate(self.cycle) if _nontrivial(st.mult))
        return self.offset + k + 1

    def levels(self, up_to: int) -> list[int]:
        return list(range(self.first_level, up_to + 1, self.period))

    def describe_levels(self) -> str:
        return f"{self.first_level} + {self.period}k (k >= 0), N = {self.nontrivial.mult}"

    def to_dict(self) -> dict:
        def steps(xs):
            return [
                {"from": st.parent, "entry": st.entry, "to": st.child, "mult": st.mult.to_json()}
                for st in xs
            ]

        return {
            "shape": self.shape,
            "prefix": steps(self.prefix),
            "cycle": steps(self.cycle),
            "tail": steps(self.tail),
            "levels": self.describe_levels(),
            "first_levels": self.levels(self.first_level + 4 * self.period),
            "subgroups": (
                "H_n = wreath product of the local groups at the first n witnessed levels; "
                "each is finite, so sgn is defined on it"
            ),
            "sign_map": (
                "phi(g) = (parity of g on level l)_l over the witnessed levels l, "
                "a continuous surjection onto (Z_2)^N"
            ),
        }

    def to_text(self) -> str:
        lines = [f"witness ({self.shape}):"]
        if self.prefix:
            lines.append(f"  prefix: {format_cycle(self.prefix)}")
        lines.append(f"  cycle:  {format_cycle(self.cycle)}")
        if self.tail:
            lines.append(f"  tail:   {format_cycle(self.tail)}")
        lines.append(f"  levels: {self.describe_levels()}")
        lines.append("  phi(g) = parity of g on each witnessed level, onto (Z_2)^N")
        return "\n".join(lines)


def witness_countable_cofinality(s: Scheme) -> WitnessBranch:
    w = _qualifying(canonical_form(s), True)
    if w is None:
        if not _strong_answer(s, Mode.PAPER_LITERAL):
            raise NotApplicable(
                "strong cofinality holds for the group; it fails only in PAPER_LITERAL mode "
                "(degenerate: every infinite branch of S carries trivial groups)"
            )
        raise NotApplicable("strong cofinality holds; there is no countable-cofinality witness")
    return WitnessBranch(w.prefix, w.cycle, w.tail, w.nontrivial)


# -- oracle cross-check and full report -----------------------------------------


def oracle_summary(s: Scheme, depth: int = 3, cap: int = DEFAULT_CAP, seed=0, pairs: int = 50) -> dict:
    """Brute-force checks on a truncation of the canonical scheme."""
    cs = canonical_form(s)
    q = cs.scheme
    t = unfold(q, depth, cap)
    sizes = acl_bruteforce(t)
    mismatches = 0
    for x in range(len(t)):
        if int(orbit_cardinality(q, (), t.addresses[x], cap=cap)) != sizes[x]:
            mismatches += 1
    out = {
        "depth": depth,
        "cap": cap,
        "nodes": len(t),
        "orbit_mismatches": mismatches,
    }
    try:
        wb = witness_countable_cofinality(s)
    except NotApplicable:
        return out
    rng = random.Random(seed)
    breaks = 0
    for _ in range(pairs):
        g = random_automorphism(t, rng)
        h = random_automorphism(t, rng)
        lhs = level_sign(t, compose(g, h))
        rhs = tuple(a ^ b for a, b in zip(level_sign(t, g), level_sign(t, h)))
        breaks += lhs != rhs
    # witness levels are counted in the canonical tree, which has the same depths
    levels = wb.levels(depth)
    pre = sign_preimages(t, automorphism_generators(t), levels)
    out["sign_levels"] = levels
    out["sign_homomorphism_breaks"] = breaks
    out["sign_surjective"] = all(lvl in pre for lvl in levels)
    return out


@dataclass(frozen=True)
class AnalysisReport:
    source: str
    quotient: object
    sset: object
    verdicts: dict  # Property -> Mode -> Verdict
    witness: WitnessBranch | None
    witness_note: str | None
    corollary_lines: dict  # Mode -> list[str]
    oracle: dict | None
    seed: object
    modes: tuple[Mode, ...] = MODES
    version: str = field(default=__version__)

    def degenerate(self, prop: Property) -> bool:
        return next(iter(self.verdicts[prop].values())).degenerate

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": self.version,
            "seed": self.seed,
            "input": self.source,
            "quotient": self.quotient.to_dict(),
            "s_set": self.sset.to_dict(),
            "verdicts": {
                p.value: {m.value: self.verdicts[p][m].to_dict() for m in self.modes}
                for p in Property
            },
            "degenerate": {p.value: self.degenerate(p) for p in Property},
            "corollaries": {m.value: self.corollary_lines[m] for m in self.modes},
            "witness": None if self.witness is None else self.witness.to_dict(),
            "witness_note": self.witness_note,
            "oracle": self.oracle,
        }

    def to_text(self) -> str:
        out = ["input:", *("  " + ln for ln in self.source.rstrip("\n").split("\n"))]
        out.append(self.quotient.to_text())
        if self.sset.finite:
            n = len(self.sset.members)
            out.append(f"S-set: finite, {n} node{'' if n == 1 else 's'}")
        else:
            out.append(f"S-set: infinite, cycle {format_cycle(self.sset.witness)}")
        out.append("verdicts:")
        for p in Property:
            for m in self.modes:
                out.append(self.verdicts[p][m].to_text())
        for m in self.modes:
            for line in self.corollary_lines[m]:
                out.append(f"corollary [{m.value}]: {line}")
        if self.witness is not None:
            out.append(self.witness.to_text())
        elif self.witness_note:
            out.append(f"witness: not applicable ({self.witness_note})")
        if self.oracle is not None:
            o = self.oracle
            line = (
                f"oracle (depth {o['depth']}, cap {o['cap']}, {o['nodes']} nodes): "
                f"{o['orbit_mismatches']} orbit mismatches"
            )
            if "sign_levels" in o:
                line += (
                    f"; sign map levels {o['sign_levels']}, "
                    f"{o['sign_homomorphism_breaks']} homomorphism breaks, "
                    f"surjective={o['sign_surjective']}"
                )
            out.append(line)
        out.append(f"tool {self.version}, schema {SCHEMA_VERSION}, seed {self.seed}")
        return "\n".join(out) + "\n"


def full_report(
    s: Scheme,
    modes=MODES,
    seed=0,
    oracle: bool = True,
    depth: int = 3,
    cap: int = DEFAULT_CAP,
) -> AnalysisReport:
    modes = tuple(Mode(m) for m in modes)
    verdicts = {
        Property.STRONG_COFINALITY: {m: decide_strong_cofinality(s, m) for m in MODES},
        Property.AMPLE_GENERICS: {m: decide_ample_generics(s, m) for m in MODES},
        Property.SMALL_INDEX: {m: decide_small_index(s, m) for m in MODES},
    }
    for m in MODES:
        if verdicts[Property.SMALL_INDEX][m].answer != verdicts[Property.AMPLE_GENERICS][m].answer:
            raise InvariantViolation("small index verdict differs from ample verdict")
    try:
        wb, note = witness_countable_cofinality(s), None
    except NotApplicable as exc:
        wb, note = None, str(exc)
    return AnalysisReport(
        source=serialize(s),
        quotient=quotient_report(s),
        sset=s_set(s),
        verdicts=verdicts,
        witness=wb,
        witness_note=note,
        corollary_lines={m: corollaries(verdicts[Property.AMPLE_GENERICS][m]) for m in MODES},
        oracle=oracle_summary(s, depth, cap, seed) if oracle else None,
        seed=seed,
        modes=modes,
    )
