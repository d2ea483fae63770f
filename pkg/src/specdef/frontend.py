"""Reader and writer for the Prolog subset, entry declarations and the
abstract executability table."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .core import Atom, Program, Struct, Var, fresh_var, term_vars
from .domains import AbstractAtom, Domain, DomainError

log = logging.getLogger(__name__)

BUILTINS = {("true", 0), ("ground", 1), ("var", 1)}
ENTRY_PROPS = ("ground", "var")


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


@dataclass(frozen=True)
class EntryDecl:
    atom: Atom
    props: tuple = ()  # (property, Var) pairs

    def vars_with(self, prop: str) -> frozenset:
        return frozenset(v for p, v in self.props if p == prop)


@dataclass(frozen=True)
class ExecEntry:
    pattern: Atom
    ground: frozenset = frozenset()
    free: frozenset = frozenset()
    replacement: object = "true"  # "true", "false" or an Atom


@dataclass
class SourceUnit:
    module: str | None = None
    exports: list = field(default_factory=list)
    program: Program = field(default_factory=Program)
    entries: list = field(default_factory=list)
    exec_entries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*|/\*.*?\*/)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<atom>[a-z][A-Za-z0-9_]*)
  | (?P<qatom>'(?:[^'\\]|\\.|'')*')
  | (?P<punct>:-|~>|[(),\[\]|.:/])
""", re.VERBOSE | re.DOTALL)


def tokenize(text: str):
    pos, line, line_start = 0, 1, 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind, val = m.lastgroup, m.group()
        if kind != "ws":
            if kind == "qatom":
                kind, val = "atom", val[1:-1].replace("''", "'").replace("\\'", "'")
            elif kind == "num":
                kind = "atom"
            out.append((kind, val, line, col))
        nl = val.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    out.append(("eof", "", line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.names: dict[str, Var] = {}

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        t = self.next()
        if t[1] != val or t[0] not in ("punct", "atom"):
            raise ParseError(f"expected {val!r}, found {t[1] or 'end of input'!r}", t[2], t[3])
        return t

    def at(self, val) -> bool:
        t = self.peek()
        return t[0] == "punct" and t[1] == val

    def error(self, msg):
        t = self.peek()
        return ParseError(msg, t[2], t[3])

    def variable(self, name: str) -> Var:
        if name == "_":
            return fresh_var("_")
        v = self.names.get(name)
        if v is None:
            v = self.names[name] = fresh_var(name)
        return v

    # term := primary ['/' primary]
    def term(self):
        t = self.primary()
        if self.at("/"):
            self.next()
            t = Struct("/", (t, self.primary()))
        return t

    def primary(self):
        kind, val, line, col = self.next()
        if kind == "var":
            return self.variable(val)
        if kind == "atom":
            if self.at("("):
                self.next()
                args = [self.term()]
                while self.at(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return Struct(val, tuple(args))
            return Struct(val)
        if kind == "punct" and val == "[":
            return self.list_tail()
        if kind == "punct" and val == "(":
            t = self.conj()
            self.expect(")")
            return t
        raise ParseError(f"unexpected {val or 'end of input'!r}", line, col)

    def list_tail(self):
        if self.at("]"):
            self.next()
            return Struct("[]")
        items = [self.term()]
        while self.at(","):
            self.next()
            items.append(self.term())
        tail = Struct("[]")
        if self.at("|"):
            self.next()
            tail = self.term()
        self.expect("]")
        for x in reversed(items):
            tail = Struct(".", (x, tail))
        return tail

    # colon := term [':' term]
    def colon(self):
        t = self.term()
        if self.at(":"):
            self.next()
            t = Struct(":", (t, self.term()))
        return t

    def conj(self):
        t = self.colon()
        if self.at(","):
            self.next()
            t = Struct(",", (t, self.conj()))
        return t


def conj_to_list(t) -> list:
    out = []
    while isinstance(t, Struct) and t.indicator == (",", 2):
        out.append(t.args[0])
        t = t.args[1]
    out.append(t)
    return out


def _as_atom(t, p: _Parser, what: str) -> Atom:
    if not isinstance(t, Struct) or t.functor in (",", ":", "/"):
        raise p.error(f"{what} is not an atom: {t!r}")
    return t


def parse_program(text: str) -> SourceUnit:
    """Parse clauses and ``:- module`` / ``:- entry`` directives."""
    p = _Parser(text)
    unit = SourceUnit()
    while p.peek()[0] != "eof":
        p.names = {}
        start = p.peek()
        if p.at(":-"):
            p.next()
            t = p.peek()
            if t[0] == "atom" and t[1] == "entry" and p.toks[p.i + 1][1] != "(":
                p.next()
                d = Struct("entry", (p.conj(),))
            else:
                d = p.conj()
            p.expect(".")
            _directive(unit, d, p, start)
            continue
        head = _as_atom(p.term(), p, "clause head")
        body = []
        if p.at(":-"):
            p.next()
            body = [_as_atom(b, p, "body literal") for b in conj_to_list(p.conj())]
        p.expect(".")
        body = [b for b in body if b.indicator != ("true", 0)]
        unit.program.add(head, body)
    for e in unit.entries:
        if not unit.program.defines(e.atom.indicator):
            unit.warnings.append(f"entry {e.atom.functor}/{e.atom.arity} has no clauses")
    return unit


def _directive(unit: SourceUnit, d, p: _Parser, start) -> None:
    if isinstance(d, Struct) and d.functor == "module":
        unit.module = d.args[0].functor if d.args and isinstance(d.args[0], Struct) else None
        if len(d.args) > 1:
            unit.exports = _list_items(d.args[1])
        return
    if isinstance(d, Struct) and d.indicator == ("entry", 1):
        unit.entries.append(_entry(d.args[0], p))
        return
    msg = f"{start[2]}:{start[3]}: unsupported directive {d!r} skipped"
    log.warning(msg)
    unit.warnings.append(msg)


def _list_items(t) -> list:
    out = []
    while isinstance(t, Struct) and t.indicator == (".", 2):
        out.append(t.args[0])
        t = t.args[1]
    return out


def _entry(t, p: _Parser) -> EntryDecl:
    props = ()
    if isinstance(t, Struct) and t.indicator == (":", 2):
        t, pt = t.args
        props = []
        seen = set()
        for prop in conj_to_list(pt):
            if not (isinstance(prop, Struct) and prop.functor in ENTRY_PROPS
                    and prop.arity == 1 and isinstance(prop.args[0], Var)):
                raise p.error(f"unsupported entry property {prop!r}")
            v = prop.args[0]
            if v in seen:
                raise p.error(f"more than one property for variable {v.name}")
            seen.add(v)
            props.append((prop.functor, v))
        props = tuple(props)
    atom = _as_atom(t, p, "entry")
    avars = set(term_vars(atom))
    for _, v in props:
        if v not in avars:
            raise p.error(f"property variable {v.name} does not occur in entry atom")
    return EntryDecl(atom, props)


def parse_atom(text: str, names: dict | None = None) -> Atom:
    """Parse one atom; ``names`` (name -> Var) is shared and extended."""
    p = _Parser(text)
    if names is not None:
        p.names = names
    t = p.term()
    if p.peek()[0] != "eof":
        raise p.error("trailing input after atom")
    return t


# ---------------------------------------------------------------- exec table

def default_exec_table() -> list[ExecEntry]:
    x = fresh_var("X")
    return [
        ExecEntry(Struct("ground", (x,)), ground=frozenset([x]), replacement="true"),
        ExecEntry(Struct("ground", (x,)), free=frozenset([x]), replacement="false"),
        ExecEntry(Struct("var", (x,)), free=frozenset([x]), replacement="true"),
        ExecEntry(Struct("var", (x,)), ground=frozenset([x]), replacement="false"),
    ]


def parse_exec_table(text: str) -> list[ExecEntry]:
    """Entries ``Pattern : Guard ~> Replacement.`` with guards g(X) / f(X)."""
    p = _Parser(text)
    out = []
    while p.peek()[0] != "eof":
        p.names = {}
        pattern = _as_atom(p.term(), p, "pattern")
        ground, free = set(), set()
        if p.at(":"):
            p.next()
            for g in conj_to_list(p.conj() if p.at("(") else p.term()):
                if isinstance(g, Struct) and g.indicator == ("true", 0):
                    continue
                if not (isinstance(g, Struct) and g.functor in ("g", "f") and g.arity == 1
                        and isinstance(g.args[0], Var)):
                    raise p.error(f"bad guard {g!r}")
                (ground if g.functor == "g" else free).add(g.args[0])
        p.expect("~>")
        rep = _as_atom(p.term(), p, "replacement")
        p.expect(".")
        pvars = set(term_vars(pattern))
        if not (ground | free) <= pvars or not set(term_vars(rep)) <= pvars:
            raise p.error("guard or replacement mentions variables not in the pattern")
        if rep.indicator in (("true", 0), ("false", 0)):
            rep = rep.functor
        out.append(ExecEntry(pattern, frozenset(ground), frozenset(free), rep))
    return out


def entry_to_abstract_atom(e: EntryDecl, d: Domain) -> AbstractAtom:
    for prop, _ in e.props:
        if prop not in ENTRY_PROPS:
            raise DomainError(f"property {prop} not supported by {d.name}")
    cp = d.from_props(e.atom, ground=e.vars_with("ground"), free=e.vars_with("var"))
    return AbstractAtom(e.atom, cp)


# ---------------------------------------------------------------- printer

def _quote(name: str) -> str:
    if re.fullmatch(r"[a-z][A-Za-z0-9_]*|\d+|\[\]", name):
        return name
    return "'" + name.replace("'", "''") + "'"


def var_names(e) -> dict:
    """Printable names A, B, ..., Z, A1, ... in first-occurrence order."""
    out = {}
    for i, v in enumerate(term_vars(e)):
        letter = chr(ord("A") + i % 26)
        out[v] = letter if i < 26 else f"{letter}{i // 26}"
    return out


def format_term(t, names: dict) -> str:
    if isinstance(t, Var):
        return names.get(t) or f"_G{abs(t.id)}"
    if t.indicator == (".", 2):
        items = []
        while isinstance(t, Struct) and t.indicator == (".", 2):
            items.append(format_term(t.args[0], names))
            t = t.args[1]
        tail = "" if t == Struct("[]") else "|" + format_term(t, names)
        return "[" + ",".join(items) + tail + "]"
    if t.indicator == ("/", 2):
        return f"{format_term(t.args[0], names)}/{format_term(t.args[1], names)}"
    if not t.args:
        return _quote(t.functor)
    return f"{_quote(t.functor)}({','.join(format_term(a, names) for a in t.args)})"


def format_clause(head, body, names: dict | None = None) -> str:
    names = names if names is not None else var_names((head,) + tuple(body))
    h = format_term(head, names)
    if not body:
        return h + "."
    return h + " :- " + ", ".join(format_term(b, names) for b in body) + "."


def format_entry(e: EntryDecl, names: dict | None = None) -> str:
    names = names if names is not None else var_names(e.atom)
    text = ":- entry " + format_term(e.atom, names)
    if e.props:
        text += " : (" + ",".join(f"{p}({names[v]})" for p, v in e.props) + ")"
    return text + "."


def print_program(p: Program, entries=()) -> str:
    lines = [format_entry(e) for e in entries]
    lines += [format_clause(c.head, c.body) for c in p]
    return "\n".join(lines) + ("\n" if lines else "")
