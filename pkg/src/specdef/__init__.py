"""Abstract interpretation with specialized definitions for definite logic programs."""
from .core import Clause, Program, Struct, Var, mgu, msg, embeds
from .domains import AbstractAtom, PD, SHFR, get_domain
from .frontend import parse_program, print_program
from .pipeline import PRESETS, RunConfig, specialize

__all__ = ["Clause", "Program", "Struct", "Var", "mgu", "msg", "embeds", "AbstractAtom",
           "PD", "SHFR", "get_domain", "parse_program", "print_program", "PRESETS",
           "RunConfig", "specialize"]
