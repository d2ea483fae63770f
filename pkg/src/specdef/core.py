"""Concrete term language: terms, atoms, clauses and programs.

Variables carry globally unique integer ids; printed names are only a hint
and are reconstructed at output time.  Negative ids are reserved for the
canonical variables used by variant keys, so they never collide with
variables produced by :func:`fresh_var`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

# the only mutable global; confine to one thread
_ids = itertools.count(1)


class InternalError(Exception):
    """Raised when an internal invariant of the framework is broken."""


@dataclass(frozen=True)
class Var:
    id: int
    name: str = field(default="_", compare=False)

    def __repr__(self) -> str:
        return f"{self.name}_{self.id}"


@dataclass(frozen=True)
class Struct:
    """Compound term, constant (no args) or atom (predicate application)."""

    functor: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.functor, len(self.args))

    def __repr__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(map(repr, self.args))})"


Term = Union[Var, Struct]
Atom = Struct
Subst = dict  # Var -> Term


@dataclass(frozen=True)
class Clause:
    k: int
    head: Atom
    body: tuple = ()

    def __repr__(self) -> str:
        if not self.body:
            return f"{self.k}: {self.head!r}."
        return f"{self.k}: {self.head!r} :- {', '.join(map(repr, self.body))}."


def fresh_var(name: str = "_") -> Var:
    return Var(next(_ids), name)


def const(name: str) -> Struct:
    return Struct(name, ())


def mk(functor: str, *args) -> Struct:
    return Struct(functor, tuple(args))


def peano(n: int, tail: Term | None = None) -> Term:
    t = tail if tail is not None else const("0")
    for _ in range(n):
        t = Struct("s", (t,))
    return t


# ---------------------------------------------------------------- traversal

def _iter_vars(t, acc: list, seen: set) -> None:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            if x not in seen:
                seen.add(x)
                acc.append(x)
        elif isinstance(x, Struct):
            stack.extend(reversed(x.args))
        elif isinstance(x, Clause):
            stack.extend(reversed((x.head,) + tuple(x.body)))
        else:
            stack.extend(reversed(list(x)))


def term_vars(e) -> list[Var]:
    """Variables of a term, atom, clause or sequence, in first-occurrence order."""
    acc: list[Var] = []
    _iter_vars(e, acc, set())
    return acc


def var_set(e) -> frozenset:
    if isinstance(e, (set, frozenset)):
        return frozenset(e)
    return frozenset(term_vars(e))


def is_ground(t) -> bool:
    return not term_vars(t)


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, Struct):
            stack.extend(x.args)


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


# ---------------------------------------------------------------- substitution

def apply(s: Subst, e):
    """Simultaneous replacement of the variables bound in ``s``."""
    if not s:
        return e
    if isinstance(e, Var):
        return s.get(e, e)
    if isinstance(e, Struct):
        if not e.args:
            return e
        return Struct(e.functor, tuple(apply(s, a) for a in e.args))
    if isinstance(e, Clause):
        return Clause(e.k, apply(s, e.head), tuple(apply(s, b) for b in e.body))
    if isinstance(e, tuple):
        return tuple(apply(s, x) for x in e)
    if isinstance(e, list):
        return [apply(s, x) for x in e]
    raise TypeError(f"cannot apply substitution to {type(e).__name__}")


def compose(s1: Subst, s2: Subst) -> Subst:
    """Substitution equivalent to applying ``s1`` then ``s2``."""
    out = {v: apply(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        if v not in out:
            out[v] = t
    return {v: t for v, t in out.items() if t != v}


def _walk(t, s):
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def _occurs(v: Var, t, s) -> bool:
    stack = [t]
    while stack:
        x = _walk(stack.pop(), s)
        if x == v:
            return True
        if isinstance(x, Struct):
            stack.extend(x.args)
    return False


def _resolve(t, s):
    t = _walk(t, s)
    if isinstance(t, Struct) and t.args:
        return Struct(t.functor, tuple(_resolve(a, s) for a in t.args))
    return t


def mgu(t1, t2) -> Subst | None:
    """Most general unifier in idempotent form, with occurs check; None on failure."""
    s: dict = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, s)
        b = _walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a, b, s):
                return None
            s[a] = b
        elif isinstance(b, Var):
            if _occurs(b, a, s):
                return None
            s[b] = a
        else:
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
    return {v: _resolve(t, s) for v, t in s.items()}


def match(pattern, target) -> Subst | None:
    """One-way matching: a substitution s with apply(s, pattern) == target."""
    s: dict = {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = s.get(p)
            if bound is None:
                s[p] = t
            elif bound != t:
                return None
        elif isinstance(t, Var):
            return None
        else:
            if p.functor != t.functor or len(p.args) != len(t.args):
                return None
            stack.extend(zip(p.args, t.args))
    return s


def is_instance(t, general) -> bool:
    return match(general, t) is not None


def renaming(vs: Iterable[Var]) -> dict:
    return {v: fresh_var(v.name) for v in vs}


def rename_apart(e, scope: Iterable[Var] = ()):
    """Variant of ``e`` using fresh variables (hence disjoint from ``scope``)."""
    return apply(renaming(term_vars(e)), e)


# ---------------------------------------------------------------- variants

def canonical(e, start: int = 1):
    """Rename variables to canonical negative ids by first occurrence.

    Returns the renamed expression and the mapping original -> canonical.
    """
    vs = term_vars(e)
    m = {v: Var(-(start + i), v.name) for i, v in enumerate(vs)}
    return apply(m, e), m


def variant_key(e):
    return canonical(e)[0]


def is_variant(a, b) -> bool:
    return variant_key(a) == variant_key(b)


# ---------------------------------------------------------------- msg

def msg(t1: Term, t2: Term) -> Term:
    """Most specific generalization (anti-unification) of two terms."""
    table: dict = {}

    def gen(a, b):
        if a == b:
            return a
        if (isinstance(a, Struct) and isinstance(b, Struct)
                and a.functor == b.functor and len(a.args) == len(b.args)):
            return Struct(a.functor, tuple(gen(x, y) for x, y in zip(a.args, b.args)))
        v = table.get((a, b))
        if v is None:
            v = table[(a, b)] = fresh_var("G")
        return v

    return gen(t1, t2)


def msg_atoms(a: Atom, b: Atom) -> Atom | None:
    """msg of two atoms, or None when their predicates differ."""
    if a.indicator != b.indicator:
        return None
    return msg(a, b)


def most_general_atom(a: Atom) -> Atom:
    return Struct(a.functor, tuple(fresh_var("V") for _ in a.args))


# ---------------------------------------------------------------- embedding

def embeds(s: Term, t: Term) -> bool:
    """Homeomorphic embedding s ⊴ t (variables embed only into variables)."""
    if isinstance(s, Var):
        if isinstance(t, Var):
            return True
        return any(embeds(s, a) for a in t.args)
    if isinstance(t, Var):
        return False
    if (s.functor == t.functor and len(s.args) == len(t.args)
            and all(embeds(x, y) for x, y in zip(s.args, t.args))):
        return True
    return any(embeds(s, a) for a in t.args)


homeomorphic_embeds = embeds


def atom_embeds(old: Atom, new: Atom) -> bool:
    """Embedding of atoms: same predicate and argument-wise coupling."""
    return (old.indicator == new.indicator
            and all(embeds(x, y) for x, y in zip(old.args, new.args)))


def strictly_embeds(old: Atom, new: Atom) -> bool:
    return atom_embeds(old, new) and not is_variant(old, new)


# ---------------------------------------------------------------- programs

class Program:
    """Clauses indexed by rule number, plus a predicate index.

    Rule numbers are assigned once and never change when the program is
    extended.
    """

    def __init__(self, clauses: Iterable[tuple] = ()):
        self.clauses: dict[int, Clause] = {}
        self.index: dict[tuple[str, int], list[int]] = {}
        self._next_k = 1
        self._name_n = 0
        for head, body in clauses:
            self.add(head, body)

    def add(self, head: Atom, body=()) -> Clause:
        c = Clause(self._next_k, head, tuple(body))
        self._next_k += 1
        self.clauses[c.k] = c
        self.index.setdefault(head.indicator, []).append(c.k)
        return c

    def clauses_for(self, indicator: tuple[str, int]) -> list[Clause]:
        return [self.clauses[k] for k in self.index.get(indicator, ())]

    def defines(self, indicator: tuple[str, int]) -> bool:
        return indicator in self.index

    def predicates(self) -> list[tuple[str, int]]:
        return list(self.index)

    def fresh_name(self, base: str) -> str:
        self._name_n += 1
        return f"{base}_{self._name_n}"

    def copy(self) -> "Program":
        p = Program()
        p.clauses = dict(self.clauses)
        p.index = {key: list(ks) for key, ks in self.index.items()}
        p._next_k = self._next_k
        p._name_n = self._name_n
        return p

    def __iter__(self):
        return iter(self.clauses[k] for k in sorted(self.clauses))

    def __len__(self) -> int:
        return len(self.clauses)


def get_body(p: Program, k: int, i: int) -> tuple:
    """Goal suffix of clause k starting at literal position i (1-based)."""
    c = p.clauses.get(k)
    if c is None or not 1 <= i <= len(c.body) + 1:
        raise InternalError(f"no program point ({k},{i})")
    return c.body[i - 1:]
