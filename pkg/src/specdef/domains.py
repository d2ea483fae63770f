"""Abstract domains: set-sharing with freeness (``shfr``) and the trivial PD domain.

Each domain object implements the operations the analysis and the unfolder
use (restrict, extend, unify, conj, lub, translate, widen_call, ...) over
immutable description values.  Descriptions are kept canonical (frozensets)
so variant keys built from them are stable.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .core import (Atom, Clause, InternalError, Struct, Var, apply, canonical,
                   match, mgu, rename_apart, renaming, term_vars, var_set)


class ScopeError(InternalError):
    """An operation was applied to variables outside a description's scope."""


class DomainError(Exception):
    """A property or feature the chosen domain cannot express."""


# ---------------------------------------------------------------- values

@dataclass(frozen=True)
class Shfr:
    scope: frozenset
    sh: frozenset = frozenset()
    fr: frozenset = frozenset()
    bottom: bool = False

    def rename(self, m: dict) -> "Shfr":
        r = lambda v: m.get(v, v)
        return Shfr(frozenset(map(r, self.scope)),
                    frozenset(frozenset(map(r, g)) for g in self.sh),
                    frozenset(map(r, self.fr)), self.bottom)

    def ground_vars(self) -> frozenset:
        shared = frozenset().union(*self.sh) if self.sh else frozenset()
        return self.scope - shared


@dataclass(frozen=True)
class PdValue:
    scope: frozenset
    bottom: bool = False

    def rename(self, m: dict) -> "PdValue":
        return PdValue(frozenset(m.get(v, v) for v in self.scope), self.bottom)


@dataclass(frozen=True)
class AbstractAtom:
    atom: Atom
    cp: object

    def canonical(self) -> tuple["AbstractAtom", dict]:
        """Variant-stable form; returns it with the original -> canonical map."""
        atom, m = canonical(self.atom)
        return AbstractAtom(atom, self.cp.rename(m)), m

    def rename(self, m: dict) -> "AbstractAtom":
        return AbstractAtom(apply(m, self.atom), self.cp.rename(m))

    def rename_apart(self) -> "AbstractAtom":
        return self.rename(renaming(term_vars(self.atom)))


def _occurrences(t) -> list:
    out, stack = [], [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.append(x)
        else:
            stack.extend(x.args)
    return out


def _star(groups) -> set:
    res = set(groups)
    base = list(groups)
    changed = True
    while changed:
        changed = False
        for a in list(res):
            for b in base:
                u = a | b
                if u not in res:
                    res.add(u)
                    changed = True
    return res


def _bin(xs, ys) -> set:
    return {a | b for a in xs for b in ys}


def _powerset(vs) -> set:
    vs = sorted(vs, key=lambda v: v.id)
    return {frozenset(c) for n in range(1, len(vs) + 1) for c in combinations(vs, n)}


def _union(groups) -> frozenset:
    return frozenset().union(*groups) if groups else frozenset()


# ---------------------------------------------------------------- interface

class Domain:
    name = "abstract"
    downwards_closed = True

    # construction
    def top(self, e): raise NotImplementedError
    def bottom(self, e): raise NotImplementedError
    def from_props(self, e, ground=(), free=()): raise NotImplementedError

    # core operations
    def restrict(self, lam, e): raise NotImplementedError
    def extend(self, lam, e): raise NotImplementedError
    def unify(self, t1, t2, lam): raise NotImplementedError
    def conj(self, l1, l2): raise NotImplementedError
    def lub(self, l1, l2): raise NotImplementedError
    def leq(self, l1, l2) -> bool: raise NotImplementedError
    def combine(self, cp, ap): raise NotImplementedError
    def builtin_success(self, atom, cp): raise NotImplementedError
    def guard_holds(self, cp, ground=(), free=()) -> bool: raise NotImplementedError

    def is_bottom(self, lam) -> bool:
        return lam.bottom

    def translate(self, atom: Atom, cp, clause) -> object:
        """Adapt ``atom:cp`` to the variables of ``clause`` (head/body pair or Clause).

        Composition of extend, unify and restrict; ``atom`` must be
        renamed apart from the clause.
        """
        head, body = (clause.head, clause.body) if isinstance(clause, Clause) else clause
        cvars = var_set((head,) + tuple(body))
        if cvars & var_set(atom):
            raise ScopeError("translate: atom not renamed apart from clause")
        lam = self.unify(atom, head, self.extend(cp, cvars))
        return self.restrict(lam, cvars)

    def widen_call(self, keys, atom, cp):
        # both shipped domains are finite, so identity is the most precise choice
        return cp

    def abstract_atom_leq(self, a1: Atom, cp1, a2: Atom, cp2) -> bool:
        """True iff a1:cp1 ⊑ a2:cp2 (a1 instance of a2 and descriptions included)."""
        other = AbstractAtom(a2, cp2).rename_apart()
        if match(other.atom, a1) is None:
            return False
        if cp1.bottom:
            return True
        induced = self.translate(a1, cp1, (other.atom, ()))
        return self.leq(induced, other.cp)

    def _check_scope(self, lam, vs):
        if not vs <= lam.scope:
            raise ScopeError(f"variables {sorted(map(repr, vs - lam.scope))} outside scope")


# ---------------------------------------------------------------- shfr

class ShfrDomain(Domain):
    """Set-sharing with definite freeness.

    A variable occurring in no sharing group is ground; ``fr`` holds the
    definitely free variables.
    """

    name = "shfr"
    downwards_closed = False

    def top(self, e):
        vs = var_set(e)
        return Shfr(vs, frozenset(_powerset(vs)), frozenset())

    def bottom(self, e):
        return Shfr(var_set(e), bottom=True)

    def from_props(self, e, ground=(), free=()):
        vs = var_set(e)
        ground, free = frozenset(ground), frozenset(free)
        if ground & free:
            raise DomainError("variable declared both ground and free")
        unknown = vs - ground - free
        sh = _powerset(unknown) | {frozenset([v]) for v in free}
        return Shfr(vs, frozenset(sh), free)

    def _norm(self, scope, sh, fr) -> Shfr:
        sh = frozenset(g for g in sh if g)
        if not frozenset(fr) <= _union(sh):
            return Shfr(frozenset(scope), bottom=True)  # a free variable cannot be ground
        return Shfr(frozenset(scope), sh, frozenset(fr))

    def restrict(self, lam, e):
        vs = var_set(e)
        self._check_scope(lam, vs)
        if lam.bottom:
            return Shfr(vs, bottom=True)
        return self._norm(vs, {g & vs for g in lam.sh}, lam.fr & vs)

    def extend(self, lam, e):
        new = var_set(e) - lam.scope
        if not new:
            return lam
        if lam.bottom:
            return Shfr(lam.scope | new, bottom=True)
        return Shfr(lam.scope | new, lam.sh | {frozenset([v]) for v in new}, lam.fr | new)

    def _linear(self, lam: Shfr, t) -> bool:
        """Sufficient condition for linearity of ``t``: its non-ground
        variables occur once, are free and are pairwise independent."""
        ground = lam.ground_vars()
        occ = [v for v in _occurrences(t) if v not in ground]
        if len(occ) != len(set(occ)) or not set(occ) <= lam.fr:
            return False
        return all(len(g & set(occ)) <= 1 for g in lam.sh)

    def _amgu(self, lam: Shfr, x: Var, t) -> Shfr:
        vt = var_set(t)
        rel_x = {g for g in lam.sh if x in g}
        rel_t = {g for g in lam.sh if g & vt}
        irrel = set(lam.sh) - rel_x - rel_t
        x_free = x in lam.fr
        t_free = isinstance(t, Var) and t in lam.fr
        if rel_x & rel_t:
            new = _bin(_star(rel_x), _star(rel_t))
        else:
            # a linear side cannot make the other side's groups coalesce
            new = _bin(rel_x if self._linear(lam, t) else _star(rel_x),
                       rel_t if self._linear(lam, x) else _star(rel_t))
        if x_free and t_free:
            fr = lam.fr
        elif x_free:
            fr = lam.fr - _union(rel_x)
        elif t_free:
            fr = lam.fr - _union(rel_t)
        else:
            fr = lam.fr - _union(rel_x) - _union(rel_t)
        return self._norm(lam.scope, irrel | new, fr)

    def unify(self, t1, t2, lam):
        self._check_scope(lam, var_set((t1, t2)))
        if lam.bottom:
            return lam
        s = mgu(t1, t2)
        if s is None:
            return Shfr(lam.scope, bottom=True)
        for x, t in s.items():
            lam = self._amgu(lam, x, t)
        return lam

    def conj(self, l1, l2):
        if l1.scope != l2.scope:
            raise ScopeError("conj of descriptions over different scopes")
        if l1.bottom or l2.bottom:
            return Shfr(l1.scope, bottom=True)
        return self._norm(l1.scope, l1.sh & l2.sh, l1.fr | l2.fr)

    def lub(self, l1, l2):
        if l1.scope != l2.scope:
            raise ScopeError("lub of descriptions over different scopes")
        if l1.bottom:
            return l2
        if l2.bottom:
            return l1
        return Shfr(l1.scope, l1.sh | l2.sh, l1.fr & l2.fr)

    def leq(self, l1, l2):
        if l1.bottom:
            return True
        if l2.bottom:
            return False
        return l1.sh <= l2.sh and l1.fr >= l2.fr

    def combine(self, cp, ap):
        """Description after a call whose success pattern is ``ap``.

        ``ap`` ranges over the literal's variables (a subset of the scope of
        ``cp``); variables outside the literal keep their sharing unless
        they share with it.
        """
        self._check_scope(cp, ap.scope)
        if cp.bottom or ap.bottom:
            return Shfr(cp.scope, bottom=True)
        lv = ap.scope
        irrel = {g for g in cp.sh if not g & lv}
        rel = {g for g in cp.sh if g & lv}
        cand = {g for g in _star(rel) if (g & lv) in ap.sh}
        fr = set(ap.fr)
        for y in cp.fr - lv:
            if all((g & lv) <= ap.fr for g in rel if y in g):
                fr.add(y)
        return self._norm(cp.scope, irrel | cand, fr)

    def builtin_success(self, atom, cp):
        if cp.bottom:
            return cp
        if atom.indicator == ("ground", 1):
            vs = var_set(atom.args[0])
            if vs & cp.fr:
                return Shfr(cp.scope, bottom=True)
            return self._norm(cp.scope, {g for g in cp.sh if not g & vs}, cp.fr)
        if atom.indicator == ("var", 1):
            t = atom.args[0]
            if not isinstance(t, Var) or t in cp.ground_vars():
                return Shfr(cp.scope, bottom=True)
            return Shfr(cp.scope, cp.sh, cp.fr | {t})
        if atom.indicator == ("true", 0):
            return cp
        return self.top(cp.scope)

    def guard_description(self, e, ground=(), free=()):
        vs = var_set(e)
        unknown = vs - frozenset(ground) - frozenset(free)
        sh = _powerset(unknown | frozenset(free))
        return self._norm(vs, sh, free)

    def guard_holds(self, cp, ground=(), free=()):
        return self.leq(cp, self.guard_description(cp.scope, ground, free))

    # ------------------------------------------------------------ oracle

    def concrete_satisfies(self, lam, sigma: dict) -> bool:
        """γ-membership: is the concrete binding ``sigma`` described by ``lam``?"""
        if lam.bottom:
            return False
        images = {x: sigma.get(x, x) for x in lam.scope}
        occ: dict = {}
        for x, t in images.items():
            for v in term_vars(t):
                occ.setdefault(v, set()).add(x)
        for g in occ.values():
            if frozenset(g) not in lam.sh:
                return False
        return all(isinstance(images[x], Var) for x in lam.fr)

    # ------------------------------------------------------------ rendering

    def render(self, lam, names: dict) -> str:
        if lam.bottom:
            return "bottom"
        ground = lam.ground_vars()
        items = []
        for v in sorted(lam.scope, key=lambda v: names.get(v, repr(v))):
            tag = "G" if v in ground else "V" if v in lam.fr else "A"
            items.append(f"{names.get(v, repr(v))}/{tag}")
        text = "{" + ",".join(items) + "}"
        nonground = lam.scope - ground
        # pairwise independence of unknowns is not visible in the G/V/A view
        if lam.sh != frozenset(frozenset([v]) for v in nonground):
            groups = sorted(",".join(sorted(names.get(v, repr(v)) for v in g)) for g in lam.sh)
            text += " sh[" + ";".join("{" + g + "}" for g in groups) + "]"
        return text

    def to_json(self, lam, names: dict):
        if lam.bottom:
            return "bottom"
        n = lambda v: names.get(v, repr(v))
        return {"scope": sorted(map(n, lam.scope)),
                "sharing": sorted(sorted(map(n, g)) for g in lam.sh),
                "free": sorted(map(n, lam.fr))}

    def from_json(self, obj, vars_by_name: dict, scope=()):
        if obj == "bottom":
            return Shfr(frozenset(scope), bottom=True)
        v = vars_by_name.__getitem__
        return Shfr(frozenset(map(v, obj["scope"])),
                    frozenset(frozenset(map(v, g)) for g in obj["sharing"]),
                    frozenset(map(v, obj["free"])))


# ---------------------------------------------------------------- pd

class PdDomain(Domain):
    """Single-value domain: an atom stands for all of its instances."""

    name = "pd"
    downwards_closed = True

    def top(self, e):
        return PdValue(var_set(e))

    def bottom(self, e):
        return PdValue(var_set(e), True)

    def from_props(self, e, ground=(), free=()):
        return self.top(e)

    def restrict(self, lam, e):
        vs = var_set(e)
        self._check_scope(lam, vs)
        return PdValue(vs, lam.bottom)

    def extend(self, lam, e):
        return PdValue(lam.scope | var_set(e), lam.bottom)

    def unify(self, t1, t2, lam):
        self._check_scope(lam, var_set((t1, t2)))
        if lam.bottom or mgu(t1, t2) is None:
            return PdValue(lam.scope, True)
        return lam

    def conj(self, l1, l2):
        if l1.scope != l2.scope:
            raise ScopeError("conj of descriptions over different scopes")
        return PdValue(l1.scope, l1.bottom or l2.bottom)

    def lub(self, l1, l2):
        if l1.scope != l2.scope:
            raise ScopeError("lub of descriptions over different scopes")
        return PdValue(l1.scope, l1.bottom and l2.bottom)

    def leq(self, l1, l2):
        return l1.bottom or not l2.bottom

    def combine(self, cp, ap):
        self._check_scope(cp, ap.scope)
        return PdValue(cp.scope, cp.bottom or ap.bottom)

    def builtin_success(self, atom, cp):
        return cp

    def guard_holds(self, cp, ground=(), free=()):
        # ⊤ entails only vacuous guards
        return not ground and not free

    def concrete_satisfies(self, lam, sigma: dict) -> bool:
        return not lam.bottom

    def render(self, lam, names: dict) -> str:
        return "bottom" if lam.bottom else "top"

    def to_json(self, lam, names: dict):
        n = lambda v: names.get(v, repr(v))
        return "bottom" if lam.bottom else {"scope": sorted(map(n, lam.scope)), "top": True}

    def from_json(self, obj, vars_by_name: dict, scope=()):
        if obj == "bottom":
            return PdValue(frozenset(scope), True)
        return PdValue(frozenset(vars_by_name[n] for n in obj["scope"]))


SHFR = ShfrDomain()
PD = PdDomain()
DOMAINS = {"shfr": SHFR, "pd": PD}


def get_domain(name: str) -> Domain:
    try:
        return DOMAINS[name]
    except KeyError:
        raise DomainError(f"unknown domain {name!r}") from None
