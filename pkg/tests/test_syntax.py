import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemmatable.grammars import load_bundled, names, source
from lemmatable.syntax import (SyntaxErr, format_clause, format_program, format_term, parse_clause,
                               parse_goal, parse_program, parse_term, strip_marks)
from lemmatable.terms import NIL, App, Var, canonical_key, make_list


def key(t):
    return canonical_key((t,))


def test_application_clause():
    c = parse_clause("x(X,L,R) ::- [x(X/Y,L,M), x(Y,M,R)].")
    assert len(c.head) == 1 and len(c.body) == 2
    x, left, right = c.head[0].args
    assert c.body[0].args[0] == App("/", (x, c.body[1].args[0]))
    assert c.body[0].args[1] == left and c.body[1].args[2] == right


def test_fact_with_quoted_atom():
    c = parse_clause("lex('Frits', np) ::- [].")
    assert c.head == (App("lex", (App("Frits"), App("np"))),)
    assert c.body == ()


def test_bare_fact_sugar():
    assert parse_clause("edge(a, b).") == parse_clause("edge(a, b) ::- [].")


def test_operator_associativity_and_binding():
    s, np = App("s"), App("np")
    assert parse_term("s\\np\\np") == App("\\", (App("\\", (s, np)), np))
    assert parse_term("x/#y") == App("/", (App("x"), App("#", (App("y"),))))
    assert parse_term("#x/y") == App("/", (App("#", (App("x"),)), App("y")))


def test_precedence_mixed_slashes():
    assert parse_term("a\\b\\c/d") == parse_term("((a\\b)\\c)/d")


def test_lists():
    assert parse_term("[]") == NIL
    assert parse_term("[a,b]") == make_list([App("a"), App("b")])
    t = parse_term("[W|Ws]")
    assert t.functor == "." and isinstance(t.args[1], Var)


def test_anonymous_variables_are_distinct():
    t = parse_term("f(_, _)")
    assert t.args[0] != t.args[1]


def test_same_name_same_variable_within_clause():
    t = parse_term("f(X, X)")
    assert t.args[0] == t.args[1]


def test_comments_and_layout():
    prog, _ = parse_program("% comment\n  p ::- [q]. % trailing\nq.\n")
    assert len(prog) == 2


@pytest.mark.parametrize("text, line, col", [
    ("p ::- [q", 1, 8),
    ("p.\nq(a ::- [].", 2, 11),
    ("p ::- q.", 1, 1),
    ("p ::- [q]", 1, 9),
])
def test_syntax_errors_report_position(text, line, col):
    with pytest.raises(SyntaxErr) as e:
        parse_program(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_unknown_directive():
    with pytest.raises(SyntaxErr, match="unknown directive"):
        parse_program(":- table(p).")


def test_abstraction_must_only_drop():
    parse_program(":- abstract([x(_,L,_)], [x(_,L,_)]).")
    with pytest.raises(SyntaxErr, match="adds constraints"):
        parse_program(":- abstract([x(_,L,_)], [x(a,L,_)]).")
    with pytest.raises(SyntaxErr, match="shared"):
        parse_program(":- abstract([x(A,L,B)], [x(C,L,C)]).")


def test_delay_guard_variables_must_occur():
    with pytest.raises(SyntaxErr):
        parse_program(":- delay(d(_, X/Y), [Z]).")


def test_directives_populate_policy():
    _, pol = load_bundled("dutch_cg")
    assert len(pol.memo_patterns) == 1
    assert len(pol.delay_guards) == 2
    assert len(pol.abstraction_templates) == 1
    guard = pol.delay_guards[0]
    assert guard.pattern.functor == "division"
    assert list(guard.unbound) == list(guard.pattern.args[1].args)


# ---------------------------------------------------------------- format

def test_format_category_minimal_parens():
    assert format_term(parse_term("(s\\np)/(s\\np)")) == "s\\np/(s\\np)"


def test_format_prefix():
    assert format_term(App("#", (App("x"),))) == "#x"
    assert format_term(parse_term("#(s\\np)")) == "#(s\\np)"


def test_format_list_sugar():
    assert format_term(App(".", (App("a"), NIL))) == "[a]"
    assert format_term(parse_term("[a|b]")) == "[a|b]"


def test_format_quotes_when_needed():
    assert format_term(App("Frits")) == "'Frits'"
    assert format_term(App("it's")) == "'it\\'s'"
    assert parse_term(format_term(App("it's"))) == App("it's")


def test_format_clause_letters_by_first_occurrence():
    c = parse_clause("x(Q, [lijkt_te, o], W) ::- [x(Q/Z, [lijkt_te, o], M), x(Z, M, W)].")
    assert format_clause(c) == "x(A,[lijkt_te,o],B) ::- [x(A/C,[lijkt_te,o],D), x(C,D,B)]"


def test_marks_strip_back():
    c = parse_clause("p(X) ::- [q(X), r('a@b')].")
    text = format_clause(c, marks=(0,))
    assert text.startswith("p(A) ::- [@q(A)")
    assert canonical_key(c.head + c.body) == _ckey(parse_clause(strip_marks(text)))


def _ckey(c):
    return canonical_key(c.head + c.body)


@pytest.mark.parametrize("name", names())
def test_bundled_round_trip(name):
    prog, pol = parse_program(source(name))
    again, pol2 = parse_program(format_program(prog, pol))
    assert [_ckey(c) for c in prog] == [_ckey(c) for c in again]
    assert len(pol2.delay_guards) == len(pol.delay_guards)
    assert len(pol2.abstraction_templates) == len(pol.abstraction_templates)
    assert [key(m) for m in pol.memo_patterns] == [key(m) for m in pol2.memo_patterns]


def test_parse_goal_single_literal_or_list():
    assert len(parse_goal("p(X)")) == 1
    assert len(parse_goal("[p(X), q]")) == 2


# ------------------------------------------------------------- properties

ATOMS = st.sampled_from(["a", "np", "s", "[]", "Frits", "lijkt_te", "x y", "/", "#"])
LEAVES = st.one_of(st.builds(App, ATOMS), st.sampled_from(["X", "Y", "_"]))


def _build(leaves):
    def ext(sub):
        return st.one_of(
            st.tuples(st.just("/"), sub, sub),
            st.tuples(st.just("\\"), sub, sub),
            st.tuples(st.just("#"), sub),
            st.tuples(st.just("f"), sub, sub),
            st.tuples(st.just("."), sub, sub),
        )
    return st.recursive(leaves, ext, max_leaves=10)


def _realize(shape, names):
    if isinstance(shape, str):
        if shape == "_":
            shape = f"_{len(names)}"
        return names.setdefault(shape, Var(len(names) + 90_000, shape))
    if isinstance(shape, App):
        return shape
    functor, *args = shape
    return App(functor, tuple(_realize(a, names) for a in args))


@settings(max_examples=300, deadline=None)
@given(_build(LEAVES))
def test_format_parse_round_trip(shape):
    t = _realize(shape, {})
    assert key(parse_term(format_term(t))) == key(t)
