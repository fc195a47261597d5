"""Trace lines and machine-readable dumps of a :class:`ProofResult`."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .engine import ProofResult
from .syntax import Namer, format_clause, format_goal, format_term, parse_clause, strip_marks
from .terms import Clause, canonical_term, canonical_key

ABBREVIATIONS = {
    "add_adjuncts": "add",
    "division": "div",
    "lijkt_te": "lt",
    "ontwijken": "o",
}


@dataclass
class TraceLine:
    table: int
    item: int
    parents: tuple
    tag: str  # P, T or S
    clause: str

    def __str__(self):
        parents = ",".join(map(str, self.parents))
        return f"{self.table}.{self.item}[{parents}] {self.tag} {self.clause}"


_LINE_RE = re.compile(r"^(\d+)\.(\d+)\[([\d,]*)\]\s+([PTS])\s+(.*)$")


def trace_lines(result: ProofResult, abbrev: bool = False) -> list:
    """One line per processed item, in processing order; selected literals
    are prefixed with ``@``."""
    rename = ABBREVIATIONS if abbrev else None
    return [
        TraceLine(it.table, it.id, it.parents, it.tag.letter,
                  format_clause(it.clause, rename=rename, marks=it.selected))
        for it in result.items
    ]


def parse_trace_line(text: str) -> tuple[TraceLine, Clause]:
    m = _LINE_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a trace line: {text!r}")
    table, item, parents, tag, clause = m.groups()
    line = TraceLine(int(table), int(item), tuple(int(p) for p in parents.split(",") if p), tag, clause)
    return line, parse_clause(strip_marks(clause))


def answer_key(c: Clause) -> str:
    """Variant key of an answer clause that ignores the order of its body."""
    body = sorted(c.body, key=lambda lit: canonical_term(lit, {}))
    numbering: dict = {}
    return canonical_key(c.head, numbering) + "::-" + canonical_key(body, numbering)


def format_answer(c: Clause, abbrev: bool = False) -> str:
    return format_clause(c, rename=ABBREVIATIONS if abbrev else None)


def to_json(result: ProofResult, derivations: Optional[int] = None) -> dict:
    """Stable layout::

        status, steps, query, gamma, answers, tables[], items[], derivations?
    """
    out = {
        "status": result.status,
        "steps": result.steps,
        "query": format_goal(result.query, Namer(letters=True)),
        "gamma": [[format_term(lit, namer) for lit in body]
                  for body, namer in ((b, Namer(letters=True)) for b in result.gamma)],
        "answers": [format_clause(c) for c in result.answers],
        "tables": [
            {
                "index": t.index,
                "goal": format_goal(t.goal, Namer(letters=True)),
                "solutions": [s.id for s in t.solutions],
                "parents": [p.item_id for p in t.parents],
                "members": list(t.members),
            }
            for t in result.tables
        ],
        "items": [
            {
                "id": it.id,
                "table": it.table,
                "tag": it.tag.kind,
                "parents": list(it.parents),
                "clause": format_clause(it.clause),
                "selected": list(it.selected),
                "duplicate_of": it.duplicate_of,
            }
            for it in result.items
        ],
    }
    if derivations is not None:
        out["derivations"] = derivations
    return out
