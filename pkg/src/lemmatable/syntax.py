"""Reading and writing programs.

The operator table is fixed::

    :-   fx  1200   (directives)
    ::-  xfx  990
    \\    yfx  400
    /    yfx  400
    #    fy   300

Clause bodies are written as lists, ``H ::- [B1, ..., Bn].``; a bare ``H.``
is a fact.  A head written as a list is a multi-atom head.  Directives::

    :- memo(Pattern).
    :- delay(Pattern, [V1, ..., Vk]).
    :- abstract(FromGoal, ToGoal).
"""
from __future__ import annotations

import itertools
import re
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .terms import NIL, App, Clause, Goal, Term, Var, iter_vars, make_list, term_vars

INFIX = {"::-": (990, "xfx"), "\\": (400, "yfx"), "/": (400, "yfx")}
PREFIX = {"#": (300, "fy"), ":-": (1200, "fx")}

_ids = itertools.count()
_ids_lock = threading.Lock()


def _next_id() -> int:
    with _ids_lock:
        return next(_ids)


class SyntaxErr(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


class PolicyError(ValueError):
    pass


# --------------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<end>\.(?=\s|%|$))
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<qname>'(?:[^'\\]|\\.|'')*')
  | (?P<op>::-|:-|\\|/|\#)
  | (?P<punct>[()\[\],|])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int
    # True when the token is immediately followed by "(" (functional notation).
    call: bool = False


def _unquote(text: str) -> str:
    body = text[1:-1].replace("''", "'")
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SyntaxErr(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tok = Token(kind, m.group(), line, pos - line_start + 1)
            if kind in ("name", "qname", "op") and text.startswith("(", m.end()):
                tok.call = True
            toks.append(tok)
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return toks


# -------------------------------------------------------------------- parsing

class _Parser:
    def __init__(self, toks: list[Token], text_end: tuple[int, int]):
        self.toks = toks
        self.i = 0
        self.varmap: dict[str, Var] = {}
        self.text_end = text_end

    def peek(self) -> Optional[Token]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise SyntaxErr("unexpected end of input", *self.text_end)
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise SyntaxErr(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def var(self, name: str) -> Var:
        if name == "_":
            return Var(_next_id(), "_")
        v = self.varmap.get(name)
        if v is None:
            v = self.varmap[name] = Var(_next_id(), name)
        return v

    def parse(self, max_prec: int) -> Term:
        left, left_prec = self.primary(max_prec)
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in INFIX:
                return left
            prec, kind = INFIX[tok.text]
            left_max = prec if kind == "yfx" else prec - 1
            if prec > max_prec or left_prec > left_max:
                return left
            self.next()
            right = self.parse(prec - 1)
            left, left_prec = App(tok.text, (left, right)), prec

    def primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self.next()
        if tok.kind == "var":
            return self.var(tok.text), 0
        if tok.kind == "int":
            return App(tok.text), 0
        if tok.text == "(":
            t = self.parse(1200)
            self.expect(")")
            return t, 0
        if tok.text == "[":
            return self.list_tail(), 0
        if tok.kind in ("name", "qname", "op"):
            name = _unquote(tok.text) if tok.kind == "qname" else tok.text
            if tok.call:
                self.expect("(")
                args = [self.parse(999)]
                while self.peek() is not None and self.peek().text == ",":
                    self.next()
                    args.append(self.parse(999))
                self.expect(")")
                return App(name, tuple(args)), 0
            if tok.kind == "op" and tok.text in PREFIX and self._starts_term():
                prec, kind = PREFIX[tok.text]
                if prec > max_prec:
                    raise SyntaxErr(f"operator {name} needs parentheses here", tok.line, tok.col)
                arg = self.parse(prec if kind == "fy" else prec - 1)
                return App(name, (arg,)), prec
            if tok.kind == "op":
                prec = max(INFIX.get(name, (0,))[0], PREFIX.get(name, (0,))[0])
                return App(name), prec if prec <= max_prec else 0
            return App(name), 0
        raise SyntaxErr(f"unexpected token {tok.text!r}", tok.line, tok.col)

    def _starts_term(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind in ("var", "int", "name", "qname"):
            return True
        if tok.text in ("(", "["):
            return True
        return tok.kind == "op" and tok.text in PREFIX

    def list_tail(self) -> Term:
        tok = self.peek()
        if tok is not None and tok.text == "]":
            self.next()
            return NIL
        items = [self.parse(999)]
        tail: Term = NIL
        while True:
            tok = self.next()
            if tok.text == ",":
                items.append(self.parse(999))
            elif tok.text == "|":
                tail = self.parse(999)
                self.expect("]")
                break
            elif tok.text == "]":
                break
            else:
                raise SyntaxErr(f"expected ',', '|' or ']', found {tok.text!r}", tok.line, tok.col)
        return make_list(items, tail)


def _split_sentences(text: str) -> Iterator[tuple[list[Token], Token]]:
    toks = tokenize(text)
    start = 0
    for i, tok in enumerate(toks):
        if tok.kind == "end":
            if i == start:
                raise SyntaxErr("empty clause", tok.line, tok.col)
            yield toks[start:i], tok
            start = i + 1
    if start < len(toks):
        tok = toks[-1]
        raise SyntaxErr("missing '.' at end of clause", tok.line, tok.col)


def _parse_sentence(toks: list[Token], end: Token) -> Term:
    p = _Parser(toks, (end.line, end.col))
    t = p.parse(1200)
    if p.peek() is not None:
        tok = p.peek()
        raise SyntaxErr(f"unexpected token {tok.text!r}", tok.line, tok.col)
    return t


def parse_term(text: str) -> Term:
    """Parse a single term (a trailing '.' is optional)."""
    text = text.strip()
    if not re.search(r"\.\s*$", text) or text.endswith(".."):
        text += " ."
    sentences = list(_split_sentences(text))
    if len(sentences) != 1:
        raise SyntaxErr("expected exactly one term", 1, 1)
    return _parse_sentence(*sentences[0])


def list_items(t: Term) -> Optional[list[Term]]:
    """Elements of a proper list, or None."""
    items = []
    while isinstance(t, App) and t.functor == "." and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items if t == NIL else None


def term_to_goal(t: Term) -> Goal:
    items = list_items(t)
    return tuple(items) if items is not None else (t,)


def parse_goal(text: str) -> Goal:
    """A goal is either a list of literals or a single literal."""
    return term_to_goal(parse_term(text))


def parse_clause(text: str) -> Clause:
    return _term_to_clause(parse_term(text), 1, 1)


def _term_to_clause(t: Term, line: int, col: int) -> Clause:
    if isinstance(t, App) and t.functor == "::-" and len(t.args) == 2:
        head_t, body_t = t.args
        body = list_items(body_t)
        if body is None:
            raise SyntaxErr("clause body must be a list", line, col)
    else:
        head_t, body = t, []
    head = term_to_goal(head_t)
    if not head or any(isinstance(h, Var) for h in head):
        raise SyntaxErr("clause head must consist of atoms", line, col)
    if any(isinstance(g, Var) for g in body):
        raise SyntaxErr("variable used as a body literal", line, col)
    return Clause(tuple(head), tuple(body))


# --------------------------------------------------------------- data holders

@dataclass(frozen=True)
class DelayGuard:
    pattern: Term
    unbound: tuple  # variables of pattern that must stay unbound


@dataclass(frozen=True)
class AbstractionTemplate:
    source: Goal
    target: Goal


@dataclass(frozen=True)
class Policy:
    memo_patterns: tuple = ()
    delay_guards: tuple = ()
    abstraction_templates: tuple = ()


@dataclass
class Program:
    clauses: list = field(default_factory=list)
    _index: dict = field(default_factory=lambda: defaultdict(list), repr=False)

    def __post_init__(self):
        clauses, self.clauses = self.clauses, []
        for c in clauses:
            self.add(c)

    def add(self, clause: Clause) -> None:
        self._index[_indicator(clause.head[0])].append((len(self.clauses), clause))
        self.clauses.append(clause)

    def clauses_for(self, lit: Term) -> list[tuple[int, Clause]]:
        """(source position, clause) pairs whose first head atom could match ``lit``."""
        return self._index.get(_indicator(lit), [])

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)


def _indicator(t: Term) -> tuple:
    return (t.functor, len(t.args)) if isinstance(t, App) else (None, 0)


# ----------------------------------------------------------------- directives

def check_template(source: Goal, target: Goal) -> None:
    """``target`` must equal ``source`` with some subterms replaced by fresh,
    unshared variables."""
    if len(source) != len(target):
        raise PolicyError("abstraction template sides differ in length")
    src_vars = set(term_vars(source))
    counts: dict[Var, int] = defaultdict(int)
    for v in iter_vars(target):
        counts[v] += 1

    def walk(s: Term, t: Term) -> None:
        if isinstance(t, Var):
            if t in src_vars:
                if s != t:
                    raise PolicyError(f"variable {t.name} moved by abstraction template")
            elif counts[t] > 1:
                raise PolicyError(f"dropped position variable {t.name} is shared")
            return
        if isinstance(s, Var) or s.functor != t.functor or len(s.args) != len(t.args):
            raise PolicyError("abstraction template adds constraints")
        for a, b in zip(s.args, t.args):
            walk(a, b)

    for s, t in zip(source, target):
        walk(s, t)


def _directive(t: Term, memo: list, delay: list, abstract: list, line: int, col: int) -> None:
    if not isinstance(t, App):
        raise SyntaxErr("malformed directive", line, col)
    if t.functor == "memo" and len(t.args) == 1:
        memo.append(t.args[0])
    elif t.functor == "delay" and len(t.args) == 2:
        pattern, vs = t.args
        items = list_items(vs)
        if items is None or not all(isinstance(v, Var) for v in items):
            raise SyntaxErr("delay guard variables must be a list of variables", line, col)
        pvars = set(term_vars(pattern))
        if any(v not in pvars for v in items):
            raise SyntaxErr("delay guard variable does not occur in the pattern", line, col)
        delay.append(DelayGuard(pattern, tuple(items)))
    elif t.functor == "abstract" and len(t.args) == 2:
        source, target = term_to_goal(t.args[0]), term_to_goal(t.args[1])
        try:
            check_template(source, target)
        except PolicyError as e:
            raise SyntaxErr(str(e), line, col) from None
        abstract.append(AbstractionTemplate(source, target))
    else:
        raise SyntaxErr(f"unknown directive {t.functor}/{len(t.args)}", line, col)


def parse_program(text: str) -> tuple[Program, Policy]:
    program = Program()
    memo: list = []
    delay: list = []
    abstract: list = []
    for toks, end in _split_sentences(text):
        t = _parse_sentence(toks, end)
        line, col = toks[0].line, toks[0].col
        if isinstance(t, App) and t.functor == ":-" and len(t.args) == 1:
            _directive(t.args[0], memo, delay, abstract, line, col)
        else:
            program.add(_term_to_clause(t, line, col))
    return program, Policy(tuple(memo), tuple(delay), tuple(abstract))


# ----------------------------------------------------------------- formatting

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def format_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name) or name == "[]" or name.isdigit():
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _prec(t: Term) -> int:
    if isinstance(t, App):
        if len(t.args) == 2 and t.functor in INFIX:
            return INFIX[t.functor][0]
        if len(t.args) == 1 and t.functor in PREFIX:
            return PREFIX[t.functor][0]
    return 0


class Namer:
    """Assigns display names to variables."""

    def __init__(self, letters: bool = False):
        self.letters = letters
        self.names: dict[Var, str] = {}

    def __call__(self, v: Var) -> str:
        name = self.names.get(v)
        if name is None:
            if self.letters:
                n = len(self.names)
                name = chr(ord("A") + n % 26) + (str(n // 26) if n >= 26 else "")
            elif v.name and v.name != "_":
                name = f"{v.name}_{v.id}"
            else:
                name = f"_G{v.id}"
            self.names[v] = name
        return name


def format_term(t: Term, namer: Optional[Namer] = None, rename: Optional[dict] = None) -> str:
    namer = namer or Namer()
    return _fmt(t, 1200, namer, rename or {})


def _fmt(t: Term, max_prec: int, namer: Namer, rename: dict) -> str:
    if isinstance(t, Var):
        return namer(t)
    functor = rename.get(t.functor, t.functor)
    if t.functor == "." and len(t.args) == 2:
        return _fmt_list(t, namer, rename)
    if not t.args:
        return format_atom(functor)
    prec = _prec(t)
    if prec:
        if len(t.args) == 2:
            kind = INFIX[t.functor][1]
            lmax = prec if kind == "yfx" else prec - 1
            left = _fmt(t.args[0], lmax, namer, rename)
            right = _fmt(t.args[1], prec - 1, namer, rename)
            s = f"{left}{t.functor}{right}"
        else:
            kind = PREFIX[t.functor][1]
            amax = prec if kind == "fy" else prec - 1
            arg = _fmt(t.args[0], amax, namer, rename)
            s = f"{t.functor}{arg}"
        return f"({s})" if prec > max_prec else s
    args = ",".join(_fmt(a, 999, namer, rename) for a in t.args)
    return f"{format_atom(functor)}({args})"


def _fmt_list(t: Term, namer: Namer, rename: dict) -> str:
    parts = []
    while isinstance(t, App) and t.functor == "." and len(t.args) == 2:
        parts.append(_fmt(t.args[0], 999, namer, rename))
        t = t.args[1]
    inner = ",".join(parts)
    if t == NIL:
        return f"[{inner}]"
    return f"[{inner}|{_fmt(t, 999, namer, rename)}]"


def format_goal(goal: Sequence[Term], namer: Optional[Namer] = None, rename: Optional[dict] = None,
                marks: Sequence[int] = ()) -> str:
    namer = namer or Namer()
    parts = []
    for i, lit in enumerate(goal):
        s = _fmt(lit, 999, namer, rename or {})
        parts.append("@" + s if i in marks else s)
    return "[" + ", ".join(parts) + "]"


def format_clause(c: Clause, namer: Optional[Namer] = None, rename: Optional[dict] = None,
                  marks: Sequence[int] = ()) -> str:
    """Render ``c`` as ``Head ::- [Body]``.

    ``marks`` lists body positions to flag with a leading ``@``; the default
    namer letters variables A, B, ... by first occurrence.
    """
    namer = namer or Namer(letters=True)
    if len(c.head) == 1:
        head = _fmt(c.head[0], 989, namer, rename or {})
    else:
        head = format_goal(c.head, namer, rename)
    return f"{head} ::- {format_goal(c.body, namer, rename, marks)}"


def format_program(program: Program, policy: Optional[Policy] = None) -> str:
    lines = []
    if policy is not None:
        for m in policy.memo_patterns:
            lines.append(f":- memo({format_term(m, Namer(letters=True))}).")
        for g in policy.delay_guards:
            namer = Namer(letters=True)
            pat = format_term(g.pattern, namer)
            vs = ",".join(namer(v) for v in g.unbound)
            lines.append(f":- delay({pat}, [{vs}]).")
        for a in policy.abstraction_templates:
            namer = Namer(letters=True)
            lines.append(f":- abstract({format_goal(a.source, namer)}, {format_goal(a.target, namer)}).")
    for c in program:
        lines.append(format_clause(c) + ".")
    return "\n".join(lines) + "\n"


def strip_marks(text: str) -> str:
    """Remove ``@`` selection marks that lie outside quoted atoms."""
    out = []
    quoted = False
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "'":
            if quoted and text.startswith("''", i):
                out.append("''")
                i += 2
                continue
            quoted = not quoted
        elif quoted and ch == "\\":
            out.append(text[i:i + 2])
            i += 2
            continue
        if ch != "@" or quoted:
            out.append(ch)
        i += 1
    return "".join(out)
