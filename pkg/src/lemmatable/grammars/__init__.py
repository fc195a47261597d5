"""Bundled example programs."""
from __future__ import annotations

from importlib import resources

from ..syntax import Policy, Program, parse_program

DESCRIPTIONS = {
    "dutch_cg": "Dutch verb-cluster categorial grammar with coroutined lexical rules",
    "transitive_closure": "left-recursive path/edge program over a three-node chain",
    "memo_loop": "memoized self-loop p ::- [p]",
    "right_recursive_dcg": "right-recursive sequence grammar over suffix positions",
}


def names() -> list:
    return sorted(DESCRIPTIONS)


def source(name: str) -> str:
    if name not in DESCRIPTIONS:
        raise KeyError(f"unknown bundled program {name!r}; choose from {', '.join(names())}")
    return resources.files(__name__).joinpath(f"{name}.pl").read_text(encoding="utf-8")


def path(name: str):
    source(name)
    return resources.files(__name__).joinpath(f"{name}.pl")


def load_bundled(name: str) -> tuple[Program, Policy]:
    return parse_program(source(name))
