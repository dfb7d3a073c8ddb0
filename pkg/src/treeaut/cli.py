"""Command-line interface: ``treeaut <subcommand> FILE [options]``.

Exit codes: 0 success, 1 parse or usage error, 2 invalid input structure,
3 resource bound exceeded, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from math import factorial
from pathlib import Path

from . import __version__
from .acl import acl_enumerate, format_cycle, orbit_cardinality, s_set, universal_acl_finite
from .canon import canonical_form, quotient_report, subtree_codes
from .errors import (
    InvariantViolation,
    NotApplicable,
    ParseError,
    ResourceLimitExceeded,
    ValidationError,
)
from .finite_tree import DEFAULT_CAP, unfold
from .nonrooted import decide_rigidity_conditions, load_edge_indexed
from .oracle import (
    acl_bruteforce,
    automorphism_generators,
    compose,
    group_elements,
    level_sign,
    random_automorphism,
    sign_preimages,
)
from .scheme import Address, load_scheme, serialize
from .verdict import MODES, SCHEMA_VERSION, Mode, full_report, witness_countable_cofinality
from .wap import ambient_for, check_wap_instance, random_system

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_RESOURCE, EXIT_INTERNAL = 0, 1, 2, 3, 4

_MODE_FLAG = {
    "paper": (Mode.PAPER_LITERAL,),
    "reduced": (Mode.GROUP_REDUCED,),
    "both": MODES,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="scheme (.tg) or edge-indexed graph (.eig)")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--mode", choices=sorted(_MODE_FLAG), default="both")
    common.add_argument("--depth", type=int, default=3, help="truncation depth for oracle checks")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="replacement for omega in truncations")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=10_000, help="node budget for closures")

    p = _Parser(prog="treeaut", description="Automorphism groups of regular rooted trees.")
    p.add_argument("--version", action="version", version=f"treeaut {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="full report for a scheme or graph")
    a.add_argument("--no-oracle", action="store_true", help="skip the brute-force cross-check")

    c = sub.add_parser("acl", parents=[common], help="algebraic closure of a finite set")
    c.add_argument("--fix", action="append", default=[], metavar="ADDR",
                   help="addresses in X, comma-separated or repeated ('root' for the root)")
    c.add_argument("--node", metavar="ADDR", help="report the orbit size of this node")
    c.add_argument("--enumerate", action="store_true", help="list ACL(X) or show why it is infinite")

    sub.add_parser("canon", parents=[common], help="canonical form and quotient")

    o = sub.add_parser("oracle", parents=[common], help="brute-force checks on a truncation")
    o.add_argument("--samples", type=int, default=50)
    o.add_argument("--check", choices=["orbits", "signs", "wap", "group-order"], default="orbits")

    sub.add_parser("witness", parents=[common], help="countable-cofinality witness branch")
    sub.add_parser("nonrooted", parents=[common], help="rigidity conditions of a non-rooted tree")
    return p


def _address(text: str) -> Address:
    return Address() if text in ("", "root") else Address.parse(text)


def _load(path: str, kind: str = "tg"):
    p = Path(path)
    if not p.is_file():
        raise _UsageError(f"no such file: {path}")
    return load_edge_indexed(p) if kind == "eig" else load_scheme(p)


def _emit(args, data: dict, text: str) -> None:
    if args.format == "json":
        data = {"schema_version": SCHEMA_VERSION, **data}
        sys.stdout.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _is_graph(path: str) -> bool:
    return path.endswith(".eig")


def cmd_analyze(args) -> None:
    modes = _MODE_FLAG[args.mode]
    if _is_graph(args.file):
        rep = decide_rigidity_conditions(_load(args.file, "eig"), modes)
        _emit(args, {"kind": "nonrooted", **rep.to_dict()}, rep.to_text())
        return
    s = _load(args.file)
    rep = full_report(
        s, modes, seed=args.seed, oracle=not args.no_oracle, depth=args.depth, cap=args.cap
    )
    d = rep.to_dict()
    d.pop("schema_version")
    _emit(args, {"kind": "scheme", **d}, rep.to_text())


def cmd_acl(args) -> None:
    s = _load(args.file)
    X = [_address(a) for value in args.fix for a in value.split(",")]
    data: dict = {"fix": [str(a) for a in X]}
    lines = [f"X = {{{', '.join(str(a) or 'root' for a in X)}}}"]
    if args.node is not None:
        t = _address(args.node)
        n = orbit_cardinality(s, X, t)
        data["node"] = {"address": str(t), "orbit": n.to_json(), "algebraic": n.is_finite}
        lines.append(f"orbit of {t or 'root'}: {n} ({'in' if n.is_finite else 'not in'} ACL(X))")
    if args.enumerate or args.node is None:
        res = acl_enumerate(s, X, budget=args.budget)
        data["closure"] = res.to_dict()
        if res.finite:
            lines.append(f"ACL(X) finite, {len(res.members)} nodes:")
            lines += [f"  {str(a) or 'root'}" for a in res.members]
        else:
            lines.append(f"ACL(X) INFINITE: cycle {format_cycle(res.witness)}")
    if not X and args.node is None:
        ss, u = s_set(s), universal_acl_finite(s)
        data["s_set"] = ss.to_dict()
        data["universal"] = u.to_dict()
        lines.append(f"S-set finite: {ss.finite}")
        lines.append(f"ACL(X) finite for every finite X: {u.finite}")
        if not u.finite:
            lines.append(f"  e.g. X = {{{', '.join(str(a) or 'root' for a in u.witness_set)}}}")
    _emit(args, data, "\n".join(lines))


def cmd_canon(args) -> None:
    s = _load(args.file)
    q = quotient_report(s)
    text = "canonical scheme:\n" + serialize(q.canonical.scheme) + q.to_text()
    _emit(args, q.to_dict(), text)


def _oracle_orbits(args, s) -> tuple[dict, str]:
    q = canonical_form(s).scheme
    t = unfold(q, args.depth, args.cap)
    rng = random.Random(args.seed)
    nodes = [x for x in range(len(t)) if t.depth[x] <= min(2, args.depth)]
    checked = mismatches = 0
    first = None
    for k in range(args.samples + 1):
        X = [] if k == 0 else rng.sample(nodes, min(len(nodes), rng.randint(1, 2)))
        sizes = acl_bruteforce(t, X)
        Xa = [t.addresses[x] for x in X]
        for x in range(len(t)):
            n = orbit_cardinality(q, Xa, t.addresses[x], cap=args.cap)
            checked += 1
            if int(n) != sizes[x]:
                mismatches += 1
                first = first or {"X": [str(a) for a in Xa], "node": str(t.addresses[x])}
    data = {"check": "orbits", "nodes": len(t), "comparisons": checked, "mismatches": mismatches}
    if first:
        data["first_mismatch"] = first
    return data, f"orbits: {checked} comparisons on {len(t)} nodes, {mismatches} mismatches"


def _oracle_signs(args, s) -> tuple[dict, str]:
    q = canonical_form(s).scheme
    t = unfold(q, args.depth, args.cap)
    rng = random.Random(args.seed)
    breaks = 0
    for _ in range(args.samples):
        g, h = random_automorphism(t, rng), random_automorphism(t, rng)
        xor = tuple(a ^ b for a, b in zip(level_sign(t, g), level_sign(t, h)))
        breaks += level_sign(t, compose(g, h)) != xor
    levels = list(range(1, t.height + 1))
    pre = sign_preimages(t, automorphism_generators(t), levels)
    data = {
        "check": "signs",
        "pairs": args.samples,
        "homomorphism_breaks": breaks,
        "levels": levels,
        "levels_with_preimage": sorted(pre),
    }
    text = (
        f"signs: {breaks} homomorphism breaks in {args.samples} pairs; "
        f"basis preimages for levels {sorted(pre)} of {levels}"
    )
    return data, text


def _oracle_wap(args, s) -> tuple[dict, str]:
    amb = ambient_for(s)
    rng = random.Random(args.seed)
    runs = []
    for k in range(5):
        S0 = random_system(amb, rng, 6, rng.randint(0, 2))
        res = check_wap_instance(s, S0, args.depth, args.samples, seed=args.seed + k, budget=args.budget)
        runs.append({"S0": S0.describe(), **res.to_dict()})
    ok = all(r["status"] == "PASS" for r in runs)
    data = {"check": "wap", "status": "PASS" if ok else "FAIL", "runs": runs}
    lines = [f"wap: {r['status']} ({r['samples']} samples, base {len(r['base']['carrier'])} nodes)" for r in runs]
    return data, "\n".join(lines)


def _oracle_group_order(args, s) -> tuple[dict, str]:
    t = unfold(canonical_form(s).scheme, args.depth, args.cap)
    codes = subtree_codes(t)
    formula = 1
    for x in range(len(t)):
        groups: dict[str, int] = {}
        for c in t.children[x]:
            groups[codes[c]] = groups.get(codes[c], 0) + 1
        for k in groups.values():
            formula *= factorial(k)
    brute = len(group_elements(t, automorphism_generators(t), limit=args.budget))
    data = {"check": "group-order", "nodes": len(t), "formula": formula, "enumerated": brute}
    return data, f"group order: formula {formula}, enumerated {brute}"


def cmd_oracle(args) -> None:
    s = _load(args.file)
    fn = {
        "orbits": _oracle_orbits,
        "signs": _oracle_signs,
        "wap": _oracle_wap,
        "group-order": _oracle_group_order,
    }[args.check]
    data, text = fn(args, s)
    data.update(depth=args.depth, cap=args.cap, seed=args.seed)
    _emit(args, data, text)


def cmd_witness(args) -> None:
    s = _load(args.file)
    try:
        wb = witness_countable_cofinality(s)
    except NotApplicable as exc:
        _emit(args, {"applicable": False, "note": str(exc)}, f"NOT_APPLICABLE: {exc}")
        return
    _emit(args, {"applicable": True, "witness": wb.to_dict()}, wb.to_text())


def cmd_nonrooted(args) -> None:
    rep = decide_rigidity_conditions(_load(args.file, "eig"), _MODE_FLAG[args.mode])
    _emit(args, rep.to_dict(), rep.to_text())


COMMANDS = {
    "analyze": cmd_analyze,
    "acl": cmd_acl,
    "canon": cmd_canon,
    "oracle": cmd_oracle,
    "witness": cmd_witness,
    "nonrooted": cmd_nonrooted,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.depth < 0 or args.cap < 1 or args.budget < 1:
            raise _UsageError("--depth must be >= 0, --cap and --budget >= 1")
        COMMANDS[args.command](args)
    except (_UsageError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitExceeded as exc:
        print(f"resource bound exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # anything else is a bug too
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
