"""Run configuration, presets and the end-to-end specialization pipeline."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

from .codegen import ResidualProgram, generate
from .domains import get_domain
from .engines import ENGINES, EngineConfig, EngineResult
from .frontend import SourceUnit, default_exec_table, entry_to_abstract_atom, parse_program
from .globalctl import GeneralizeConfig
from .unfold import UnfoldConfig

# (domain, unfold, generalize, widen, engine)
PRESETS = {
    "full": ("shfr", "hom-emb", "id", "id", "analyze"),
    "polyvariant-ai": ("shfr", "one-step", "base-form", "id", "analyze"),
    "abstract-spec": ("shfr", "derive-then-aexec", "base-form", "id", "analyze"),
    "classical-pd": ("pd", "hom-emb", "hom-emb-msg", "id", "apd"),
}


@dataclass
class RunConfig:
    input: str | None = None
    domain: str = "shfr"
    unfold: str = "hom-emb"
    generalize: str = "id"
    widen: str = "id"
    engine: str = "analyze"
    preset: str | None = None
    output: str | None = None
    dot: str | None = None
    json: str | None = None
    exec_table: str | None = None
    check: int = 0
    depth: int = 400
    seed: int = 0
    trace: bool = False
    non_leftmost: bool = False

    @classmethod
    def from_preset(cls, name: str, **kw) -> "RunConfig":
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}")
        d, u, g, w, e = PRESETS[name]
        return cls(domain=d, unfold=u, generalize=g, widen=w, engine=e, preset=name, **kw)

    def params(self) -> tuple:
        return (self.domain, self.unfold, self.generalize, self.widen, self.engine)

    def to_dict(self) -> dict:
        return asdict(self)

    def engine_config(self) -> EngineConfig:
        return EngineConfig(UnfoldConfig(self.unfold, self.non_leftmost),
                            GeneralizeConfig(self.generalize), self.widen)


@dataclass
class Run:
    unit: SourceUnit
    config: RunConfig
    result: EngineResult
    residual: ResidualProgram
    entries: list = field(default_factory=list)  # abstract entry atoms


def specialize(unit: SourceUnit | str, config: RunConfig | None = None, trace=None,
               exec_table=None) -> Run:
    if isinstance(unit, str):
        unit = parse_program(unit)
    config = config or RunConfig.from_preset("full")
    if config.engine not in ENGINES:
        raise ValueError(f"unknown engine {config.engine!r}")
    domain = get_domain(config.domain)
    table = list(exec_table or unit.exec_entries) + default_exec_table()
    entries = [entry_to_abstract_atom(e, domain) for e in unit.entries]
    result = ENGINES[config.engine](unit.program, entries, domain, config.engine_config(),
                                    table, trace)
    return Run(unit, config, result, generate(result), entries)


def with_params(config: RunConfig, **kw) -> RunConfig:
    return replace(config, preset=None, **kw)
