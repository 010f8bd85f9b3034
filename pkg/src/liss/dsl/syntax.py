"""Concrete syntax (``.mrl`` files).

Statements go one per line; ``for(Unit u)``, ``if(...):`` and ``else`` open
an indented block. A sequence of lines is read as right-nested ``S -> S S``.
A left-nested sequence is written as a braced group::

    {
        u.idle()
        u.harvest(1)
    }
    u.attack(Closest)

Single statements may follow a header on the same line
(``for(Unit u) u.harvest(1)``, ``if(u.IsBuilder()) then u.idle() else empty``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import Node, leaf
from .grammar import CRITERIA, DIRECTION_NAMES, NUMBERS, PLAYERS, UNIT_TYPES, rule_named

INDENT = "    "

# head -> (printed name, argument nonterminals, printed with a "u." prefix)
BOOL_FUNCS = {
    "b1": ("HasNumberOfUnits", ("T", "N"), False),
    "b2": ("OpponentHasNumberOfUnits", ("T", "N"), False),
    "b3": ("HasLessNumberOfUnits", ("T", "N"), False),
    "b4": ("HaveQtdUnitsAttacking", ("N",), False),
    "b5": ("HasUnitWithinDistanceFromOpponent", ("N",), False),
    "b6": ("HasNumberOfWorkersHarvesting", ("N",), False),
    "b7": ("is_Type", ("T",), True),
    "b8": ("IsBuilder", (), True),
    "b9": ("CanAttack", (), True),
    "b10": ("HasUnitThatKillsInOneAttack", (), False),
    "b11": ("OpponentHasUnitThatKillsUnitInOneAttack", (), False),
    "b12": ("HasUnitInOpponentRange", (), False),
    "b13": ("OpponentHasUnitInPlayerRange", (), False),
    "b14": ("CanHarvest", (), True),
}
CMD_FUNCS = {
    "c1": ("build", ("T", "D", "N")),
    "c2": ("train", ("T", "D", "N")),
    "c3": ("moveToUnit", ("Tp", "Op")),
    "c4": ("attack", ("Op",)),
    "c5": ("harvest", ("N",)),
    "c6": ("idle", ()),
    "c7": ("moveAway", ()),
}
BOOL_ALIASES = {
    "hasunitwithindistfromop": "b5",
    "ophasunitkillsinoneattack": "b11",
    "istype": "b7",
    "hasnumberofworkersharvesting": "b6",
}
CMD_ALIASES = {"moveaway": "c7", "movetounit": "c3"}

_BOOL_BY_NAME = {name.lower(): head for head, (name, _, _) in BOOL_FUNCS.items()}
_BOOL_BY_NAME.update(BOOL_ALIASES)
_CMD_BY_NAME = {name.lower(): head for head, (name, _) in CMD_FUNCS.items()}
_CMD_BY_NAME.update(CMD_ALIASES)
_VALUES = {"T": UNIT_TYPES, "N": NUMBERS, "D": DIRECTION_NAMES, "Op": CRITERIA, "Tp": PLAYERS}


# --- pretty -------------------------------------------------------------------


def pretty(tree: Node) -> str:
    """Source text for an S-, C- or B-rooted tree (S gives a multi-line block)."""
    sym = tree.symbol
    if sym == "S":
        return "\n".join(_lines(tree, 0)) + "\n"
    if sym == "C":
        return _cmd(tree)
    if sym == "B":
        return _bool(tree)
    return tree.children[0]


def _value(tree: Node) -> str:
    return tree.children[0]


def _args(tree: Node) -> str:
    return ",".join(_value(c) for c in tree.children[1:])


def _bool(tree: Node) -> str:
    head = tree.children[0]
    name, _, scoped = BOOL_FUNCS[head]
    return f"{'u.' if scoped else ''}{name}({_args(tree)})"


def _cmd(tree: Node) -> str:
    name, _ = CMD_FUNCS[tree.children[0]]
    return f"u.{name}({_args(tree)})"


def _flatten(tree: Node) -> list:
    """Items of a right-nested sequence; left-nested sequences stay as one item."""
    items = []
    while tree.rule == 0:
        items.append(tree.children[0])
        tree = tree.children[1]
    items.append(tree)
    return items


def _lines(tree: Node, depth: int) -> list[str]:
    pad = INDENT * depth
    out = []
    for item in _flatten(tree):
        rule = item.rule
        if rule == 0:
            out.append(pad + "{")
            out.extend(_lines(item, depth + 1))
            out.append(pad + "}")
        elif rule == 1:
            out.append(pad + "for(Unit u)")
            out.extend(_lines(item.children[1], depth + 1))
        elif rule in (2, 3):
            out.append(f"{pad}if({_bool(item.children[1])}):")
            out.extend(_lines(item.children[3], depth + 1))
            if rule == 3:
                out.append(pad + "else")
                out.extend(_lines(item.children[5], depth + 1))
        elif rule == 4:
            out.append(pad + _cmd(item.children[0]))
        else:
            out.append(pad + "empty")
    return out


# --- parse --------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        exp = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{exp}")


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z_0-9]*)|(\d+)|([(),.:{}]))")


@dataclass
class _Tok:
    text: str
    col: int


@dataclass
class _Line:
    indent: int
    toks: list
    lineno: int


def _tokenize_line(text: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        if text[pos] == "#":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        tok = m.group(1) or m.group(2) or m.group(3)
        start = m.end() - len(tok)
        toks.append(_Tok(tok, start + 1))
        pos = m.end()
    return toks


def _split_lines(text: str) -> list[_Line]:
    lines = []
    for i, raw in enumerate(text.splitlines(), 1):
        expanded = raw.expandtabs(4)
        toks = _tokenize_line(expanded, i)
        if not toks:
            continue
        indent = len(expanded) - len(expanded.lstrip(" "))
        lines.append(_Line(indent, toks, i))
    return lines


class _Parser:
    def __init__(self, text: str):
        self.lines = _split_lines(text)
        self.li = 0  # current line
        self.ti = 0  # token within current line

    # token helpers
    def _line(self) -> _Line | None:
        return self.lines[self.li] if self.li < len(self.lines) else None

    def peek(self) -> str | None:
        line = self._line()
        if line is None or self.ti >= len(line.toks):
            return None
        return line.toks[self.ti].text

    def at_eol(self) -> bool:
        return self.peek() is None

    def _where(self):
        line = self._line()
        if line is None:
            last = self.lines[-1] if self.lines else None
            return (last.lineno + 1 if last else 1), 1
        if self.ti < len(line.toks):
            return line.lineno, line.toks[self.ti].col
        end = line.toks[-1]
        return line.lineno, end.col + len(end.text)

    def error(self, message: str, expected=()):
        line, col = self._where()
        return ParseError(message, line, col, expected)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of line")
        self.ti += 1
        return tok

    def expect(self, *options: str) -> str:
        tok = self.peek()
        if tok is None or (tok not in options and tok.lower() not in {o.lower() for o in options}):
            found = "end of line" if tok is None else repr(tok)
            raise self.error(f"unexpected {found}", options)
        self.ti += 1
        return tok

    def accept(self, option: str) -> bool:
        if self.peek() == option:
            self.ti += 1
            return True
        return False

    def next_line(self):
        if not self.at_eol():
            raise self.error(f"unexpected {self.peek()!r} after statement", ("end of line",))
        self.li += 1
        self.ti = 0

    # grammar
    def parse_program(self, symbol: str) -> Node:
        if not self.lines:
            raise ParseError("empty program", 1, 1, ("statement",))
        if symbol == "S":
            first = self.lines[0].indent
            tree = self.seq(first)
            if self._line() is not None:
                raise self.error("unexpected indentation or trailing text", ("statement at column 1",))
            return tree
        if symbol == "B":
            tree = self.boolean()
        elif symbol == "C":
            tree = self.command()
        else:
            raise ValueError(f"cannot parse a program rooted at {symbol}")
        self.next_line()
        if self._line() is not None:
            raise self.error("trailing text after expression")
        return tree

    def seq(self, indent: int) -> Node:
        items = []
        while True:
            line = self._line()
            if line is None or line.indent < indent:
                break
            if line.indent > indent:
                raise self.error("unexpected indentation")
            if self.peek() in ("else", "}"):
                break
            items.append(self.item(indent))
        if not items:
            raise self.error("expected a statement", ("statement",))
        tree = items[-1]
        for left in reversed(items[:-1]):
            tree = Node(0, (left, tree))
        return tree

    def item(self, indent: int) -> Node:
        if self.peek() == "{":
            self.take()
            self.next_line()
            body_line = self._line()
            if body_line is None or body_line.indent <= indent:
                raise self.error("expected an indented block after '{'", ("statement",))
            body = self.seq(body_line.indent)
            line = self._line()
            if line is None or line.indent != indent or self.peek() != "}":
                raise self.error("unclosed '{' group", ("}",))
            self.take()
            self.next_line()
            return body
        stmt = self.statement(indent)
        if self.ti > 0:
            self.next_line()
        return stmt

    def statement(self, indent: int) -> Node:
        tok = self.peek()
        if tok is None:
            raise self.error("expected a statement", ("statement",))
        if tok == "empty":
            self.take()
            return Node(rule_named("S", "empty").rule_id, ("empty",))
        if tok == "for":
            self.take()
            self.expect("(")
            self.expect("Unit")
            self.expect("u")
            self.expect(")")
            self.accept(":")
            body = self.suite(indent)
            return Node(rule_named("S", "for").rule_id, ("for", body))
        if tok == "if":
            self.take()
            self.expect("(")
            cond = self.boolean()
            self.expect(")")
            self.accept(":")
            self.accept("then")
            then = self.suite(indent)
            if self.ti > 0 and self.peek() == "else":
                self.take()
                self.accept(":")
                other = self.suite(indent)
                return Node(rule_named("S", "ifelse").rule_id, ("if", cond, "then", then, "else", other))
            if self._else_follows(indent):
                self.take()
                self.accept(":")
                other = self.suite(indent)
                return Node(rule_named("S", "ifelse").rule_id, ("if", cond, "then", then, "else", other))
            return Node(rule_named("S", "if").rule_id, ("if", cond, "then", then))
        cmd = self.command()
        return Node(rule_named("S", "cmd").rule_id, (cmd,))

    def _else_follows(self, indent: int) -> bool:
        """Position on an ``else`` that starts a line at ``indent``, if there is one."""
        if self.ti > 0:
            if not self.at_eol():
                return False
            nxt = self.lines[self.li + 1] if self.li + 1 < len(self.lines) else None
            if nxt is None or nxt.indent != indent or nxt.toks[0].text != "else":
                return False
            self.li += 1
            self.ti = 0
            return True
        line = self._line()
        return line is not None and line.indent == indent and self.peek() == "else"

    def suite(self, indent: int) -> Node:
        """Body of a for/if/else: the rest of the line, or an indented block below."""
        if not self.at_eol():
            return self.statement(indent)
        if self.li + 1 >= len(self.lines) or self.lines[self.li + 1].indent <= indent:
            raise self.error("missing block", ("statement", "indented block"))
        self.next_line()
        return self.seq(self._line().indent)

    def _call(self, table: dict, kind: str) -> tuple[str, list]:
        name = self.peek()
        if name == "u":
            self.take()
            self.expect(".")
            name = self.peek()
        if name is None:
            raise self.error(f"expected a {kind}")
        head = table.get(name.lower())
        if head is None:
            raise self.error(f"unknown {kind} {name!r}", sorted(table))
        self.take()
        self.expect("(")
        return head

    def _arglist(self, sig: tuple) -> list:
        args = []
        for i, nt in enumerate(sig):
            if i:
                self.expect(",")
            tok = self.peek()
            options = _VALUES[nt]
            if tok not in options:
                raise self.error(f"bad argument {tok!r}", options)
            self.take()
            args.append(leaf(nt, tok))
        self.expect(")")
        return args

    def boolean(self) -> Node:
        head = self._call(_BOOL_BY_NAME, "boolean function")
        args = self._arglist(BOOL_FUNCS[head][1])
        return Node(rule_named("B", head).rule_id, (head, *args))

    def command(self) -> Node:
        head = self._call(_CMD_BY_NAME, "command")
        args = self._arglist(CMD_FUNCS[head][1])
        return Node(rule_named("C", head).rule_id, (head, *args))


def parse(text: str, symbol: str = "S") -> Node:
    """Parse source text into a tree rooted at ``symbol`` (S, C or B)."""
    return _Parser(text).parse_program(symbol)
