"""Control rule, selection rule and goal abstraction driven by a :class:`Policy`."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .syntax import Policy
from .terms import (Bindings, Goal, Term, Var, VarSupply, fresh_mapping, match, rename_goal,
                    resolve_goal, unify, walk)


@dataclass(frozen=True)
class Tag:
    kind: str  # "program" | "solution" | "table"
    goal: Goal = ()
    rest: Goal = ()
    positions: tuple = ()  # body positions of ``goal`` literals (table tags only)

    @property
    def letter(self) -> str:
        return self.kind[0].upper()

    @classmethod
    def table(cls, goal: Sequence[Term], rest: Sequence[Term], positions: Sequence[int] = ()) -> "Tag":
        return cls("table", tuple(goal), tuple(rest), tuple(positions))


PROGRAM = Tag("program")
SOLUTION = Tag("solution")


def is_delayed(lit: Term, policy: Policy, b: Optional[Bindings] = None) -> bool:
    for guard in policy.delay_guards:
        trial = unify(guard.pattern, lit, b)
        if trial is not None and all(isinstance(walk(v, trial), Var) for v in guard.unbound):
            return True
    return False


def is_memo(lit: Term, policy: Policy, b: Optional[Bindings] = None) -> bool:
    return any(unify(p, lit, b) is not None for p in policy.memo_patterns)


def control(body: Sequence[Term], policy: Policy, b: Optional[Bindings] = None) -> Tag:
    """Tag a clause by its body: table the leftmost memo literal, else run a
    program step if any literal is runnable, else the clause is a solution."""
    for i, lit in enumerate(body):
        if is_memo(lit, policy, b):
            rest = tuple(body[:i]) + tuple(body[i + 1:])
            return Tag.table((lit,), rest, (i,))
    if any(not is_delayed(lit, policy, b) for lit in body):
        return PROGRAM
    return SOLUTION


def select_index(body: Sequence[Term], policy: Policy, b: Optional[Bindings] = None) -> int:
    for i, lit in enumerate(body):
        if not is_delayed(lit, policy, b):
            return i
    raise ValueError("no selectable literal: every literal is delayed")


def select_program_literal(body: Sequence[Term], policy: Policy,
                           b: Optional[Bindings] = None) -> tuple[Term, Goal]:
    i = select_index(body, policy, b)
    return body[i], tuple(body[:i]) + tuple(body[i + 1:])


def abstract_goal(goal: Sequence[Term], policy: Policy, supply: Optional[VarSupply] = None,
                  b: Optional[Bindings] = None) -> Goal:
    """Weaken ``goal`` with the first abstraction template whose source side
    subsumes it.  Dropped positions get fresh variables."""
    goal = resolve_goal(goal, b) if b else tuple(goal)
    for tmpl in policy.abstraction_templates:
        if len(tmpl.source) != len(goal):
            continue
        theta: Optional[Bindings] = {}
        for s, g in zip(tmpl.source, goal):
            theta = match(s, g, theta)
            if theta is None:
                break
        if theta is None:
            continue
        if supply is None:
            supply = VarSupply.above(goal, tmpl.source, tmpl.target)
        # variables present only on the target side are the dropped positions
        fresh = {v: f for v, f in fresh_mapping(tmpl.target, supply).items() if v not in theta}
        return resolve_goal(rename_goal(tmpl.target, fresh), theta)
    return goal
