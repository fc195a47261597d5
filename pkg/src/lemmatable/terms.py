"""First-order terms, bindings, unification and variant keys.

Terms are immutable.  A binding map is a plain dict from :class:`Var` to
:class:`Term`; :func:`unify` never mutates the map it is given, so a failed
unification leaves nothing behind.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union


class Var:
    """A logic variable, identified by an integer ordinal."""

    __slots__ = ("id", "name")

    def __init__(self, id: int, name: Optional[str] = None):
        self.id = id
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Var) and other.id == self.id

    def __hash__(self):
        return self.id

    def __repr__(self):
        return f"Var({self.id}, {self.name!r})" if self.name else f"Var({self.id})"


@dataclass(frozen=True, eq=False)
class App:
    """A functor applied to arguments.  Atoms and integers have no args."""

    functor: str
    args: tuple = ()
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.functor, self.args)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, App) and self._hash == other._hash
                and self.functor == other.functor and self.args == other.args)

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return self.functor, len(self.args)


Term = Union[Var, App]
Bindings = dict
Goal = tuple

NIL = App("[]")


def atom(name: str) -> App:
    return App(name)


def make_list(items: Sequence[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(items):
        out = App(".", (item, out))
    return out


@dataclass(frozen=True)
class Clause:
    """``head ::- body``; both sides are goals (tuples of terms)."""

    head: Goal
    body: Goal = ()

    def __post_init__(self):
        if not self.head:
            raise ValueError("clause head must contain at least one atom")

    def resolve(self, b: Bindings) -> "Clause":
        return Clause(resolve_goal(self.head, b), resolve_goal(self.body, b))

    @property
    def is_fact(self) -> bool:
        return not self.body


class VarSupply:
    """Issues fresh variables with strictly increasing ids."""

    def __init__(self, start: int = 0):
        self._count = itertools.count(start)
        self._lock = threading.Lock()

    def fresh(self, name: Optional[str] = None) -> Var:
        with self._lock:
            return Var(next(self._count), name)

    @classmethod
    def above(cls, *things) -> "VarSupply":
        """A supply whose ids exceed every variable id found in ``things``."""
        top = -1
        for thing in things:
            for v in iter_vars(thing):
                top = max(top, v.id)
        return cls(top + 1)


def walk(t: Term, b: Bindings) -> Term:
    while isinstance(t, Var):
        nxt = b.get(t)
        if nxt is None:
            return t
        t = nxt
    return t


def resolve_term(t: Term, b: Bindings) -> Term:
    """Replace every bound variable in ``t`` transitively."""
    if not b:
        return t
    t = walk(t, b)
    if isinstance(t, Var) or not t.args:
        return t
    args = tuple(resolve_term(a, b) for a in t.args)
    if args == t.args:
        return t
    return App(t.functor, args)


def resolve_goal(goal: Iterable[Term], b: Bindings) -> Goal:
    return tuple(resolve_term(t, b) for t in goal)


def occurs(v: Var, t: Term, b: Bindings) -> bool:
    stack = [t]
    while stack:
        t = walk(stack.pop(), b)
        if isinstance(t, Var):
            if t == v:
                return True
        else:
            stack.extend(t.args)
    return False


def unify(t1: Term, t2: Term, b: Optional[Bindings] = None,
          occurs_check: bool = True) -> Optional[Bindings]:
    """Most general unifier of ``t1`` and ``t2`` extending ``b``, or None."""
    out = dict(b) if b else {}
    if _unify_into(t1, t2, out, occurs_check):
        return out
    return None


def unify_goals(g1: Sequence[Term], g2: Sequence[Term], b: Optional[Bindings] = None,
                occurs_check: bool = True) -> Optional[Bindings]:
    """Element-wise unification of two goals of equal length."""
    if len(g1) != len(g2):
        return None
    out = dict(b) if b else {}
    for x, y in zip(g1, g2):
        if not _unify_into(x, y, out, occurs_check):
            return None
    return out


def _unify_into(t1: Term, t2: Term, b: Bindings, occurs_check: bool) -> bool:
    stack = [(t1, t2)]
    while stack:
        x, y = stack.pop()
        x = walk(x, b)
        y = walk(y, b)
        if x is y or x == y:
            continue
        if isinstance(x, Var):
            if occurs_check and isinstance(y, App) and occurs(x, y, b):
                return False
            b[x] = y
        elif isinstance(y, Var):
            if occurs_check and occurs(y, x, b):
                return False
            b[y] = x
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return False
        else:
            stack.extend(zip(x.args, y.args))
    return True


def match(pattern: Term, t: Term, b: Optional[Bindings] = None) -> Optional[Bindings]:
    """One-way matching: bind only variables of ``pattern`` so that it equals ``t``.

    ``pattern`` and ``t`` must not share variables.
    """
    out = dict(b) if b else {}
    stack = [(pattern, t)]
    while stack:
        p, x = stack.pop()
        if isinstance(p, Var):
            seen = out.get(p)
            if seen is None:
                out[p] = x
            elif seen != x:
                return None
        elif isinstance(x, Var):
            return None
        elif p.functor != x.functor or len(p.args) != len(x.args):
            return None
        else:
            stack.extend(zip(p.args, x.args))
    return out


def iter_vars(thing) -> Iterator[Var]:
    """Variables of a term, goal, clause or any nesting of tuples/lists thereof,
    in depth-first left-to-right order (with repeats)."""
    stack = [thing]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, App):
            stack.extend(reversed(t.args))
        elif isinstance(t, Clause):
            stack.append(t.body)
            stack.append(t.head)
        elif isinstance(t, (tuple, list)):
            stack.extend(reversed(t))


def term_vars(thing) -> list[Var]:
    """Distinct variables in first-occurrence order."""
    seen: dict[Var, None] = {}
    for v in iter_vars(thing):
        seen.setdefault(v, None)
    return list(seen)


def is_ground(t: Term) -> bool:
    return next(iter_vars(t), None) is None


def rename_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if not t.args:
        return t
    return App(t.functor, tuple(rename_term(a, mapping) for a in t.args))


def rename_goal(goal: Iterable[Term], mapping: dict) -> Goal:
    return tuple(rename_term(t, mapping) for t in goal)


def fresh_mapping(thing, supply: VarSupply) -> dict:
    return {v: supply.fresh(v.name) for v in term_vars(thing)}


def rename_apart(c: Clause, supply: VarSupply) -> Clause:
    """A variant of ``c`` whose variables are all freshly issued by ``supply``."""
    mapping = fresh_mapping(c, supply)
    if not mapping:
        return c
    return Clause(rename_goal(c.head, mapping), rename_goal(c.body, mapping))


def canonical_term(t: Term, numbering: dict) -> str:
    """Ground rendering with variables numbered by first occurrence.

    ``numbering`` is shared across calls so that a whole goal is numbered
    consistently.
    """
    if isinstance(t, Var):
        n = numbering.get(t)
        if n is None:
            n = numbering[t] = len(numbering)
        return f"_{n}"
    if not t.args:
        return repr(t.functor)
    inner = ",".join(canonical_term(a, numbering) for a in t.args)
    return f"{t.functor!r}({inner})"


def canonical_key(goal: Sequence[Term], numbering: Optional[dict] = None) -> str:
    """Key equal for two goals iff they are variants (order-sensitive)."""
    numbering = {} if numbering is None else numbering
    return "[" + ",".join(canonical_term(t, numbering) for t in goal) + "]"


def is_variant(a: Sequence[Term], b: Sequence[Term]) -> bool:
    return canonical_key(a) == canonical_key(b)


def clause_key(c: Clause) -> str:
    numbering: dict = {}
    return canonical_key(c.head, numbering) + "::-" + canonical_key(c.body, numbering)
