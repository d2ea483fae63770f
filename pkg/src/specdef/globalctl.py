"""Global control: generalization, the specialization and generalization
tables, and construction of specialized definitions."""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import (Atom, InternalError, Program, Struct, apply, atom_embeds, fresh_var,
                   is_variant, match, mgu, msg_atoms, rename_apart, term_vars)
from .domains import AbstractAtom, Domain
from .unfold import ControlError, Unfolder

GENERALIZERS = ("id", "hom-emb-msg", "base-form")
MAX_ST = 200
MAX_MSG_ROUNDS = 100


@dataclass(frozen=True)
class GeneralizeConfig:
    strategy: str = "id"

    def __post_init__(self):
        if self.strategy not in GENERALIZERS:
            raise ValueError(f"unknown generalization strategy {self.strategy!r}")


class VariantTable:
    """Table keyed by abstract atoms modulo variable renaming.

    Keys are stored in canonical form (negative variable ids), so values
    that mention the key's variables must use the canonical ones too.
    """

    def __init__(self):
        self._d: dict = {}

    @staticmethod
    def key(aa: AbstractAtom) -> AbstractAtom:
        return aa.canonical()[0]

    def get(self, aa: AbstractAtom, default=None):
        return self._d.get(self.key(aa), default)

    def __contains__(self, aa) -> bool:
        return self.key(aa) in self._d

    def __getitem__(self, aa):
        return self._d[self.key(aa)]

    def __setitem__(self, aa, value) -> None:
        self._d[self.key(aa)] = value

    def __delitem__(self, aa) -> None:
        del self._d[self.key(aa)]

    def __len__(self) -> int:
        return len(self._d)

    def __iter__(self):
        return iter(self._d)

    def items(self):
        return self._d.items()

    def keys(self):
        return self._d.keys()

    def values(self):
        return self._d.values()


def new_filter(a: Atom, program: Program, keep_args: bool = False) -> Atom:
    """Atom with a fresh predicate over the variables of ``a``.

    With ``keep_args`` the arguments are kept as they are (used for entry
    points, whose callers pass structured arguments).
    """
    name = program.fresh_name(f"sp_{a.functor}")
    while program.defines((name, a.arity)) or program.defines((name, len(term_vars(a)))):
        name = program.fresh_name(f"sp_{a.functor}")
    if keep_args:
        return Struct(name, a.args)
    return Struct(name, tuple(term_vars(a)))


def ren(a: Atom, b: Atom, b2: Atom) -> Atom:
    """theta(b2) where theta unifies ``a`` with ``b``."""
    s = match(b, a)
    if s is not None:
        return apply(s, b2)
    fresh = rename_apart((b, b2))
    s = mgu(a, fresh[0])
    if s is None:
        raise InternalError(f"ren: {a!r} does not unify with {b!r}")
    return apply(s, fresh[1])


@dataclass
class GlobalControl:
    program: Program
    domain: Domain
    unfolder: Unfolder
    config: GeneralizeConfig = field(default_factory=GeneralizeConfig)
    gt: VariantTable = field(default_factory=VariantTable)
    st: VariantTable = field(default_factory=VariantTable)
    definitions: dict = field(default_factory=dict)  # A'' indicator -> rule numbers

    # ------------------------------------------------------------ generalize

    def ageneralize(self, aa: AbstractAtom) -> AbstractAtom:
        s = self.config.strategy
        if s == "id":
            return aa
        if s == "base-form":
            gen = Struct(aa.atom.functor, tuple(fresh_var("V") for _ in aa.atom.args))
            return AbstractAtom(gen, self.domain.translate(aa.atom, aa.cp, (gen, ())))
        return self._hom_emb_msg(aa)

    def _hom_emb_msg(self, aa: AbstractAtom) -> AbstractAtom:
        cur = aa
        for _ in range(MAX_MSG_ROUNDS):
            k = self._embedding_key(cur.atom)
            if k is None:
                return cur
            g = rename_apart(msg_atoms(cur.atom, k.atom))
            cp = self.domain.lub(self.domain.translate(cur.atom, cur.cp, (g, ())),
                                 self.domain.translate(k.atom, k.cp, (g, ())))
            nxt = AbstractAtom(g, cp)
            if is_variant(g, cur.atom) and self.domain.leq(cp, self._on(cur, g)):
                return cur
            cur = nxt
        raise ControlError("generalization did not stabilize")

    def _on(self, aa: AbstractAtom, g: Atom):
        return self.domain.translate(aa.atom, aa.cp, (g, ()))

    def _embedding_key(self, a: Atom) -> AbstractAtom | None:
        for key in self.st:
            if key.atom.indicator == a.indicator and atom_embeds(key.atom, a) \
                    and not is_variant(key.atom, a):
                return key
        return None

    # ------------------------------------------------------------ definitions

    def specialized_definition(self, aa: AbstractAtom, keep_args: bool = False):
        """Return (A', A'') for ``aa``, building the definition if it is new.

        A' and A'' share the canonical variables of the ST key.
        """
        gen = self.ageneralize(aa)
        if not self.domain.abstract_atom_leq(aa.atom, aa.cp, gen.atom, gen.cp):
            raise InternalError(f"generalization does not cover {aa.atom!r}")
        key, _ = gen.canonical()
        self.gt[aa] = key
        if key in self.st:
            return key.atom, self.st[key]
        if len(self.st) >= MAX_ST:
            raise ControlError(f"more than {MAX_ST} specialized definitions")
        resultants = self.unfolder.aunfold(key.atom, key.cp)
        a2 = new_filter(key.atom, self.program, keep_args)
        self.st[key] = a2
        ks = []
        for r in resultants:
            # stored clauses never mention canonical (key) variables
            head, body = rename_apart((ren(r.head, key.atom, a2), r.body))
            c = self.program.add(head, body)
            ks.append(c.k)
        self.definitions[a2.indicator] = ks
        return key.atom, a2

    def resolve(self, aa_key: AbstractAtom):
        """Follow GT then ST: the (A', A'') pair used for a call key."""
        gen = self.gt.get(aa_key)
        if gen is None:
            return None
        return gen.atom, self.st[gen]
