"""The Lemma Table proof procedure.

Items move through an agenda.  Each item carries a tag chosen by the
control rule:

* program  -- resolve the selected literal against every program clause;
* table    -- suspend on a memoized sub-goal, creating its table if needed;
* solution -- a completed clause; hand it to every item waiting on its table.

Tables are keyed by the variant class of their (abstracted) goal.  Waiting
items are registered on the table they wait for, not the table they live in.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .policies import PROGRAM, Tag, abstract_goal, control, select_index
from .syntax import Policy, Program
from .terms import (Clause, Goal, Term, VarSupply, canonical_key, clause_key, match, rename_apart,
                    unify_goals)

log = logging.getLogger(__name__)

ROOT = 0  # parent id standing for the query itself


@dataclass
class EngineConfig:
    agenda: str = "fifo"
    max_items: int = 100_000
    occurs_check: bool = True
    dedup_solutions: bool = True
    record_derivations: bool = True

    def __post_init__(self):
        if self.agenda not in ("fifo", "lifo"):
            raise ValueError(f"unknown agenda discipline {self.agenda!r}")
        if self.max_items <= 0:
            raise ValueError("max_items must be positive")


@dataclass
class Item:
    id: int
    tag: Tag
    clause: Clause
    table: int
    parents: tuple
    # ("query",) | ("table", creator) | ("program", clause_pos, parent) | ("resolve", parent, solution)
    origin: tuple = ()
    selected: tuple = ()
    duplicate_of: Optional[int] = None


@dataclass
class ParentItem:
    head: Goal
    sub_goal: Goal
    rest: Goal
    home_table: int
    item_id: int


@dataclass
class LemmaTable:
    index: int
    goal: Goal
    key: str
    solutions: list = field(default_factory=list)
    parents: list = field(default_factory=list)
    members: list = field(default_factory=list)  # ids of items added to this table
    solution_keys: dict = field(default_factory=dict, repr=False)


@dataclass
class ProofResult:
    query: Goal
    gamma: list
    answers: list
    tables: list
    items: list
    status: str
    steps: int
    config: EngineConfig = field(default_factory=EngineConfig, repr=False)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def item(self, item_id: int) -> Item:
        return self.items[item_id - 1]

    def solution_items(self, table: int = 0) -> list:
        return list(self.tables[table].solutions)


@dataclass
class _Pending:
    tag: Tag
    clause: Clause
    table: int
    parents: tuple
    origin: tuple


def resolve_clause(c0: Clause, c1: Clause, on: Sequence[Term], supply: Optional[VarSupply] = None,
                   occurs_check: bool = True) -> Optional[Clause]:
    """Resolvent of ``c0`` with a fresh variant of ``c1`` on the body literals ``on``.

    The literals of ``c1``'s body come first, followed by what is left of
    ``c0``'s body.  Returns None when ``on`` does not unify with ``c1``'s head.
    """
    if not on:
        raise ValueError("resolution needs a non-empty set of literals")
    rest = list(c0.body)
    for lit in on:
        try:
            rest.remove(lit)
        except ValueError:
            raise ValueError("literal to resolve on is not in the clause body") from None
    supply = supply or VarSupply.above(c0, c1)
    return _resolvent(c0.head, tuple(on), tuple(rest), c1, supply, occurs_check)


def _resolvent(head: Goal, on: Goal, rest: Goal, c1: Clause, supply: VarSupply,
               occurs_check: bool) -> Optional[Clause]:
    c1 = rename_apart(c1, supply)
    b = unify_goals(on, c1.head, occurs_check=occurs_check)
    if b is None:
        return None
    return Clause(head, c1.body + rest).resolve(b)


class Engine:
    def __init__(self, program: Program, policy: Policy, config: Optional[EngineConfig] = None):
        self.program = program
        self.policy = policy
        self.config = config or EngineConfig()

    def run(self, query: Sequence[Term]) -> ProofResult:
        query = tuple(query)
        if not query:
            raise ValueError("query must be a non-empty goal")
        cfg = self.config
        self.supply = VarSupply.above(
            self.program.clauses, query, self.policy.memo_patterns,
            [g.pattern for g in self.policy.delay_guards],
            [(a.source, a.target) for a in self.policy.abstraction_templates])
        q = rename_apart(Clause(query, ()), self.supply).head
        self.tables: list[LemmaTable] = [LemmaTable(0, q, canonical_key(q))]
        self.registry = {self.tables[0].key: self.tables[0]}
        self.items: list[Item] = []
        self.agenda: deque = deque()
        self._push([_Pending(PROGRAM, Clause(q, q), 0, (ROOT,), ("query",))])

        steps = 0
        while self.agenda and steps < cfg.max_items:
            p = self.agenda.popleft()
            steps += 1
            item = Item(len(self.items) + 1, p.tag, p.clause, p.table, p.parents, p.origin)
            self.items.append(item)
            if p.tag.kind == "program":
                self._program_step(item)
            elif p.tag.kind == "table":
                self._table_step(item)
            else:
                self._solution_step(item)
        status = "step-limit" if self.agenda else "completed"
        if self.agenda:
            log.info("step limit %d reached with %d items pending", cfg.max_items, len(self.agenda))
        sols = self.tables[0].solutions
        return ProofResult(
            query=q,
            gamma=[s.clause.body for s in sols],
            answers=[s.clause for s in sols],
            tables=self.tables,
            items=self.items,
            status=status,
            steps=steps,
            config=cfg,
        )

    # -- agenda

    def _push(self, batch: list) -> None:
        if self.config.agenda == "fifo":
            self.agenda.extend(batch)
        else:
            # children are processed in creation order, depth first
            self.agenda.extendleft(reversed(batch))

    def _pending(self, clause: Clause, table: int, parents: tuple, origin: tuple) -> _Pending:
        return _Pending(control(clause.body, self.policy), clause, table, parents, origin)

    # -- the three cases

    def _program_step(self, item: Item) -> None:
        body = item.clause.body
        if not body:
            return
        try:
            i = select_index(body, self.policy)
        except ValueError:
            # only reachable for a table's first item: a program step is mandatory there
            i = 0
        item.selected = (i,)
        lit, rest = body[i], body[:i] + body[i + 1:]
        batch = []
        for pos, pc in self.program.clauses_for(lit):
            r = _resolvent(item.clause.head, (lit,), rest, pc, self.supply, self.config.occurs_check)
            if r is not None:
                batch.append(self._pending(r, item.table, (item.id,), ("program", pos, item.id)))
        self._push(batch)

    def _table_step(self, item: Item) -> None:
        tag = item.tag
        item.selected = tag.positions
        self.tables[item.table].members.append(item.id)
        parent = ParentItem(item.clause.head, tag.goal, tag.rest, item.table, item.id)
        goal = abstract_goal(tag.goal, self.policy, self.supply)
        goal = rename_apart(Clause(goal), self.supply).head
        key = canonical_key(goal)
        table = self.registry.get(key)
        if table is not None:
            table.parents.append(parent)
            batch = []
            for sol in table.solutions:
                r = self._complete(parent, sol)
                if r is not None:
                    batch.append(r)
            self._push(batch)
            return
        table = LemmaTable(len(self.tables), goal, key)
        self.tables.append(table)
        self.registry[key] = table
        table.parents.append(parent)
        log.debug("table %d created for %s", table.index, key)
        self._push([_Pending(PROGRAM, Clause(goal, goal), table.index, (item.id,), ("table", item.id))])

    def _solution_step(self, item: Item) -> None:
        table = self.tables[item.table]
        if self.config.dedup_solutions:
            key = clause_key(item.clause)
            first = table.solution_keys.get(key)
            if first is not None:
                item.duplicate_of = first
                return
            table.solution_keys[key] = item.id
        table.members.append(item.id)
        table.solutions.append(item)
        batch = []
        for parent in list(table.parents):
            r = self._complete(parent, item)
            if r is not None:
                batch.append(r)
        self._push(batch)

    def _complete(self, parent: ParentItem, sol: Item) -> Optional[_Pending]:
        r = _resolvent(parent.head, parent.sub_goal, parent.rest, sol.clause, self.supply,
                       self.config.occurs_check)
        if r is None:
            return None
        return self._pending(r, parent.home_table, (parent.item_id, sol.id),
                             ("resolve", parent.item_id, sol.id))


def run(program: Program, policy: Policy, query: Sequence[Term],
        config: Optional[EngineConfig] = None) -> ProofResult:
    return Engine(program, policy, config).run(query)


# ------------------------------------------------------------------ derivations

@dataclass(frozen=True)
class DerivationTree:
    item: int
    step: str  # "query" | "table" | "clause N" | "solution"
    children: tuple = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def render(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}{self.item} {self.step}"]
        lines.extend(c.render(indent + 1) for c in self.children)
        return "\n".join(lines)


def derivation_trees(result: ProofResult, query: Optional[Goal] = None,
                     limit: Optional[int] = 10_000) -> list:
    """Distinct derivation trees of the query's solutions.

    With ``query`` given, only solutions whose head is an instance of it are
    counted.  A solution that was suppressed as a variant of a stored one
    counts as an alternative derivation of the stored solution.  Trees in
    which an item occurs below itself are not enumerated.
    """
    if not result.config.record_derivations:
        raise ValueError("derivations were not recorded for this run")
    aliases: dict[int, list] = {}
    for it in result.items:
        if it.tag.kind == "solution":
            first = it.duplicate_of if it.duplicate_of is not None else it.id
            aliases.setdefault(first, []).append(it.id)

    def trees(item_id: int, above: frozenset) -> Iterator[DerivationTree]:
        if item_id in above:
            return
        above = above | {item_id}
        it = result.item(item_id)
        kind = it.origin[0]
        if kind in ("query", "table"):
            yield DerivationTree(item_id, kind)
        elif kind == "program":
            pos, parent = it.origin[1], it.origin[2]
            for t in trees(parent, above):
                yield DerivationTree(item_id, f"clause {pos + 1}", (t,))
        else:
            parent, sol = it.origin[1], it.origin[2]
            for tp in trees(parent, above):
                for alias in aliases.get(sol, [sol]):
                    for ts in trees(alias, above):
                        yield DerivationTree(item_id, "solution", (tp, ts))

    out: list = []
    for sol in result.tables[0].solutions:
        if query is not None and not _instance_of(sol.clause.head, tuple(query)):
            continue
        for alias in aliases.get(sol.id, [sol.id]):
            for t in trees(alias, frozenset()):
                out.append(t)
                if limit is not None and len(out) >= limit:
                    return out
    return out


def _instance_of(goal: Goal, general: Goal) -> bool:
    if len(goal) != len(general):
        return False
    theta: Optional[dict] = {}
    for g, q in zip(goal, general):
        theta = match(q, g, theta)
        if theta is None:
            return False
    return True
