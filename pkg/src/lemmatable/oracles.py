"""Reference evaluators for differential testing.

:func:`sld_solve` is a plain backtracking resolver with coroutined (delayed)
literals and no memoization.  :func:`datalog_fixpoint` computes the least
model of a function-free program bottom-up.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .policies import is_delayed
from .syntax import Policy, Program
from .terms import (App, Bindings, Clause, Goal, Term, Var, VarSupply, match, occurs,
                    rename_apart, resolve_goal, resolve_term, term_vars, walk)


@dataclass
class Answer:
    bindings: dict  # query variable -> term
    residual: Goal

    def clause(self, query: Goal) -> Clause:
        """The answer as ``query-instance ::- residual``."""
        return Clause(resolve_goal(query, self.bindings), self.residual)


@dataclass
class OracleResult:
    answers: list = field(default_factory=list)
    exhausted: bool = True
    depth_hit: bool = False
    budget_hit: bool = False
    nodes: int = 0

    def clauses(self, query: Goal) -> list:
        return [a.clause(query) for a in self.answers]


def sld_solve(program: Program, policy: Policy, query: Sequence[Term], depth: int,
              max_nodes: int = 20_000, occurs_check: bool = True) -> OracleResult:
    """Depth-first SLD resolution, leftmost non-delayed literal, clauses in
    source order.  ``depth`` bounds the resolution steps on one branch; a
    branch that would go deeper is pruned and the result marked not
    exhausted.  ``max_nodes`` caps the total number of resolution steps.
    """
    if depth <= 0:
        raise ValueError("depth must be positive")
    query = tuple(query)
    qvars = term_vars(query)
    supply = VarSupply.above(program.clauses, query, policy.memo_patterns,
                             [g.pattern for g in policy.delay_guards])
    result = OracleResult()
    b: Bindings = {}
    trail: list = []

    def undo(mark: int) -> None:
        while len(trail) > mark:
            del b[trail.pop()]

    def enter(goals: Goal, steps: int) -> Optional[_Frame]:
        for i, lit in enumerate(goals):
            lit = resolve_term(lit, b)
            if not is_delayed(lit, policy):
                return _Frame(goals, i, program.clauses_for(lit), steps, len(trail))
        answer = {v: resolve_term(v, b) for v in qvars}
        residual = resolve_goal(goals, b)
        result.answers.append(Answer({v: t for v, t in answer.items() if t != v}, residual))
        return None

    stack = [f for f in [enter(query, 0)] if f is not None]
    while stack:
        top = stack[-1]
        undo(top.mark)
        if top.next >= len(top.candidates):
            stack.pop()
            continue
        _, pc = top.candidates[top.next]
        top.next += 1
        if len(pc.head) != 1:
            continue
        lit = top.goals[top.selected]
        if top.steps >= depth:
            if _unify_trail(lit, pc.head[0], b, trail, occurs_check):
                result.depth_hit = True
                stack.pop()
            continue
        if result.nodes >= max_nodes:
            result.budget_hit = True
            break
        pc = rename_apart(pc, supply)
        if not _unify_trail(lit, pc.head[0], b, trail, occurs_check):
            continue
        result.nodes += 1
        goals = top.goals[:top.selected] + pc.body + top.goals[top.selected + 1:]
        child = enter(goals, top.steps + 1)
        if child is not None:
            stack.append(child)
    result.exhausted = not (result.depth_hit or result.budget_hit)
    return result


@dataclass
class _Frame:
    goals: Goal
    selected: int
    candidates: list
    steps: int
    mark: int
    next: int = 0


def _unify_trail(x: Term, y: Term, b: Bindings, trail: list, occurs_check: bool) -> bool:
    """Unify in place, recording new bindings on ``trail``.  On failure the
    bindings made here are left for the caller to undo."""
    todo = [(x, y)]
    while todo:
        s, t = todo.pop()
        s = walk(s, b)
        t = walk(t, b)
        if s is t or s == t:
            continue
        if isinstance(t, Var) and not isinstance(s, Var):
            s, t = t, s
        if isinstance(s, Var):
            if occurs_check and isinstance(t, App) and occurs(s, t, b):
                return False
            b[s] = t
            trail.append(s)
        elif s.functor != t.functor or len(s.args) != len(t.args):
            return False
        else:
            todo.extend(zip(s.args, t.args))
    return True


class NotDatalog(ValueError):
    pass


def _check_datalog(program: Program) -> None:
    for c in program:
        if len(c.head) != 1:
            raise NotDatalog("multi-atom heads are not supported")
        for lit in c.head + c.body:
            if not isinstance(lit, App):
                raise NotDatalog("literal is a variable")
            for a in lit.args:
                if isinstance(a, App) and a.args:
                    raise NotDatalog(f"compound argument in {lit.functor}/{len(lit.args)}")
        if not set(term_vars(c.head)) <= set(term_vars(c.body)):
            raise NotDatalog(f"clause for {c.head[0].functor} is not range-restricted")


def datalog_fixpoint(program: Program) -> set:
    """Least fixpoint of the immediate-consequence operator (naive iteration)."""
    _check_datalog(program)
    facts: set = set()
    while True:
        new = set(facts)
        for c in program:
            for b in _joins(c.body, facts, {}):
                new.add(resolve_term(c.head[0], b))
        if new == facts:
            return facts
        facts = new


def _joins(body: Goal, facts: set, b: Bindings):
    if not body:
        yield b
        return
    lit = resolve_term(body[0], b)
    for f in facts:
        b2 = match(lit, f)
        if b2 is not None:
            yield from _joins(body[1:], facts, {**b, **b2})


def query_answers(facts: set, query: Term) -> set:
    """Ground atoms among ``facts`` that are instances of ``query``."""
    return {f for f in facts if match(query, f) is not None}
