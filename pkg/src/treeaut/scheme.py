"""Finite presentations ("schemes") of countable rooted trees.

A scheme lists node classes; each class has an ordered list of entries
``(child class, multiplicity)`` with multiplicity in 1, 2, ... or omega.
Unfolding from the root class gives the (possibly infinite) tree.

Text format (``.tg``)::

    # binary tree
    root = v;
    class v {
      child v * 2;
    }
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import ParseError, ValidationError
from .extnat import OMEGA, ExtNat, ext

__all__ = [
    "Entry",
    "Scheme",
    "Address",
    "NodeRef",
    "parse_scheme",
    "serialize",
    "resolve_address",
    "load_scheme",
]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Entry(NamedTuple):
    child: str
    mult: ExtNat


@dataclass(frozen=True)
class Scheme:
    """Validated finite presentation of a rooted tree.

    ``entries[i]`` belongs to ``classes[i]``.  Construct with
    :meth:`from_dict` for convenience.
    """

    classes: tuple[str, ...]
    root: str
    entries: tuple[tuple[Entry, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(
            self,
            "entries",
            tuple(tuple(Entry(c, ext(m)) for c, m in row) for row in self.entries),
        )
        self._validate()

    @classmethod
    def from_dict(cls, root: str, table: Mapping[str, Iterable[tuple[str, object]]]) -> "Scheme":
        names = tuple(table)
        return cls(names, root, tuple(tuple(table[n]) for n in names))

    def _validate(self):
        if len(self.entries) != len(self.classes):
            raise ValidationError("entries must align with classes")
        seen = set()
        for name in self.classes:
            if not IDENT_RE.match(name):
                raise ValidationError(f"invalid class identifier {name!r}")
            if name in seen:
                raise ValidationError(f"class {name!r} declared twice")
            seen.add(name)
        if self.root not in seen:
            raise ValidationError(f"root class {self.root!r} is not declared")
        for name, row in zip(self.classes, self.entries):
            for e in row:
                if e.child not in seen:
                    raise ValidationError(f"class {name!r} refers to undeclared class {e.child!r}")
                if e.mult == 0:
                    raise ValidationError(f"zero multiplicity for child {e.child!r} of class {name!r}")
        reach = {self.root}
        queue = deque([self.root])
        table = dict(zip(self.classes, self.entries))
        while queue:
            for e in table[queue.popleft()]:
                if e.child not in reach:
                    reach.add(e.child)
                    queue.append(e.child)
        missing = [c for c in self.classes if c not in reach]
        if missing:
            raise ValidationError(f"unreachable classes: {', '.join(missing)}")

    @cached_property
    def table(self) -> dict[str, tuple[Entry, ...]]:
        return dict(zip(self.classes, self.entries))

    @cached_property
    def index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.classes)}

    def entries_of(self, cls: str) -> tuple[Entry, ...]:
        return self.table[cls]

    def rename(self, mapping: Mapping[str, str]) -> "Scheme":
        """Scheme with every class identifier ``c`` replaced by ``mapping[c]``."""
        return Scheme(
            tuple(mapping[c] for c in self.classes),
            mapping[self.root],
            tuple(tuple(Entry(mapping[e.child], e.mult) for e in row) for row in self.entries),
        )

    def __str__(self):
        return serialize(self)


@dataclass(frozen=True, order=True)
class Address:
    """A node of the unfolded tree: ``(entry index, copy index)`` steps from the root."""

    steps: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        steps = tuple((int(e), int(c)) for e, c in self.steps)
        for e, c in steps:
            if e < 0 or c < 0:
                raise ValueError("address indices must be nonnegative")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def parse(cls, text: str) -> "Address":
        text = text.strip()
        if not text:
            return cls(())
        steps = []
        for part in text.split("/"):
            m = re.fullmatch(r"e(\d+)\.c(\d+)", part.strip())
            if not m:
                raise ParseError(f"bad address step {part!r}; expected e<i>.c<j>")
            steps.append((int(m.group(1)), int(m.group(2))))
        return cls(tuple(steps))

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def is_root(self) -> bool:
        return not self.steps

    def parent(self) -> "Address":
        if not self.steps:
            return self
        return Address(self.steps[:-1])

    def child(self, entry: int, copy: int) -> "Address":
        return Address(self.steps + ((entry, copy),))

    def prefixes(self) -> Iterator["Address"]:
        """All prefixes from the root up to and including ``self``."""
        for k in range(len(self.steps) + 1):
            yield Address(self.steps[:k])

    def __str__(self):
        return "/".join(f"e{e}.c{c}" for e, c in self.steps)

    def __repr__(self):
        return f"Address({str(self)!r})"


def addr(text: str | Address | Sequence[tuple[int, int]]) -> Address:
    if isinstance(text, Address):
        return text
    if isinstance(text, str):
        return Address.parse(text)
    return Address(tuple(text))


class NodeRef(NamedTuple):
    cls: str
    multiplicities: tuple[ExtNat, ...]


def resolve_address(s: Scheme, a: Address | str) -> NodeRef:
    """Class of the addressed node and the multiplicities of the entries on its path."""
    a = addr(a)
    cls = s.root
    mults = []
    for depth, (e, c) in enumerate(a.steps, start=1):
        row = s.entries_of(cls)
        if e >= len(row):
            raise ValidationError(
                f"address {a}: entry index {e} out of range at depth {depth} (class {cls} has {len(row)})"
            )
        entry = row[e]
        if entry.mult.is_finite and c >= int(entry.mult):
            raise ValidationError(
                f"address {a}: copy index {c} >= multiplicity {entry.mult} at depth {depth}"
            )
        mults.append(entry.mult)
        cls = entry.child
    return NodeRef(cls, tuple(mults))


# -- text format ---------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>\d+)|(?P<punct>[=;{}*])"
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, token_re: re.Pattern = _TOKEN_RE) -> list[_Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = token_re.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {want}, got {got}", tok.line, tok.col)
        self.i += 1
        return tok


def parse_scheme(text: str) -> Scheme:
    """Parse ``.tg`` text into a validated :class:`Scheme`.

    Raises :class:`ParseError` for syntax errors and :class:`ValidationError`
    for undeclared or unreachable classes and zero multiplicities.
    """
    cur = _Cursor(_tokenize(text))
    cur.take("ident", "root")
    cur.take("punct", "=")
    root = cur.take("ident").text
    cur.take("punct", ";")
    classes: list[str] = []
    rows: list[tuple[Entry, ...]] = []
    if cur.peek.kind == "eof":
        tok = cur.peek
        raise ParseError("expected at least one class definition", tok.line, tok.col)
    while cur.peek.kind != "eof":
        cur.take("ident", "class")
        name_tok = cur.take("ident")
        if name_tok.text in classes:
            raise ValidationError(
                f"class {name_tok.text!r} declared twice (line {name_tok.line}, column {name_tok.col})"
            )
        cur.take("punct", "{")
        row = []
        while not (cur.peek.kind == "punct" and cur.peek.text == "}"):
            cur.take("ident", "child")
            child = cur.take("ident").text
            cur.take("punct", "*")
            tok = cur.peek
            if tok.kind == "int":
                cur.i += 1
                mult = ExtNat(int(tok.text))
            elif tok.kind == "ident" and tok.text == "omega":
                cur.i += 1
                mult = OMEGA
            else:
                raise ParseError("expected a positive integer or 'omega'", tok.line, tok.col)
            if mult == 0:
                raise ValidationError(
                    f"zero multiplicity for child {child!r} (line {tok.line}, column {tok.col})"
                )
            cur.take("punct", ";")
            row.append(Entry(child, mult))
        cur.take("punct", "}")
        classes.append(name_tok.text)
        rows.append(tuple(row))
    return Scheme(tuple(classes), root, tuple(rows))


def serialize(s: Scheme) -> str:
    lines = [f"root = {s.root};"]
    for name, row in zip(s.classes, s.entries):
        if not row:
            lines.append(f"class {name} {{ }}")
            continue
        lines.append(f"class {name} {{")
        for e in row:
            lines.append(f"  child {e.child} * {e.mult};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def load_scheme(path) -> Scheme:
    with open(path, encoding="utf-8") as fh:
        return parse_scheme(fh.read())
