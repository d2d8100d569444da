import random

import pytest
from hypothesis import given, settings, strategies as st

from quadchase.syntax import (
    ParseError,
    StrictModeError,
    parse_nquads,
    parse_query,
    parse_rules,
    serialize_nquads,
    serialize_query,
    serialize_rules,
)
from quadchase.terms import (
    Quad,
    QuadGraph,
    blank,
    iri,
    literal,
)
from quadchase.vocab import RDF_TYPE, RDF_PROPERTY

from oracles import random_quadgraph


# ---------------------------------------------------------------------------
# N-Quads
# ---------------------------------------------------------------------------

def test_parse_single_line_context_last():
    g = parse_nquads(b"<a> <b> <U1> <c1> .")
    assert g == QuadGraph([Quad(iri("c1"), iri("a"), iri("b"), iri("U1"))])


def test_parse_empty_file():
    assert len(parse_nquads(b"")) == 0
    assert len(parse_nquads(b"# only a comment\n\n")) == 0


def test_parse_collapses_duplicates():
    g = parse_nquads(b"<a> <b> <c> <g> .\n<a> <b> <c> <g> .")
    assert len(g) == 1


def test_missing_graph_label_is_an_error():
    with pytest.raises(ParseError) as err:
        parse_nquads(b"<a> <b> <c> .")
    assert err.value.line == 1
    assert "graph label" in str(err.value)


def test_non_iri_context_rejected():
    with pytest.raises(ParseError):
        parse_nquads(b'<a> <b> <c> "lit" .')
    with pytest.raises(ParseError):
        parse_nquads(b"<a> <b> <c> _:g .")


def test_unterminated_statement():
    with pytest.raises(ParseError):
        parse_nquads(b"<a> <b> <c> <g>")


def test_generalized_triples_default_strict_rejects():
    line = b'"lit" <p> <o> <g> .'
    g = parse_nquads(line)
    assert len(g) == 1
    with pytest.raises(StrictModeError):
        parse_nquads(line, strict=True)
    with pytest.raises(StrictModeError):
        parse_nquads(b"<s> _:p <o> <g> .", strict=True)
    # blank subject and literal object stay legal in strict mode
    parse_nquads(b'_:s <p> "o" <g> .', strict=True)


def test_literals_with_datatype_and_lang():
    g = parse_nquads(b'<s> <p> "v"^^<dt> <g> .\n<s> <p> "w"@en-US <g> .')
    objs = {q.o for q in g}
    assert literal("v", datatype="dt") in objs
    assert literal("w", lang="en-US") in objs


def test_escape_round_trip_in_literal():
    g = parse_nquads(rb'<s> <p> "a\nb\"c\\dA" <g> .')
    (q,) = list(g)
    assert q.o == literal('a\nb"c\\dA')


def test_bnode_prefix_renames_but_not_skolems():
    g = parse_nquads(b"_:x <p> _:sk_r1_0_00ff <g> .", bnode_prefix="d0_")
    (q,) = list(g)
    assert q.s == blank("d0_x")
    assert q.o.lexical == "sk_r1_0_00ff"
    assert q.o.is_skolem()


def test_serialize_sorted_and_parse_round_trip():
    quads = [Quad(iri("g2"), iri("s"), iri("p"), iri("o")),
             Quad(iri("g1"), iri("s"), iri("p"), literal("x\ny")),
             Quad(iri("g1"), blank("b"), iri("p"), iri("o"))]
    data = serialize_nquads(QuadGraph(quads))
    lines = data.decode().strip().split("\n")
    assert lines == sorted(lines, key=lambda l: l.split(" ")[3] + l)
    assert parse_nquads(data) == QuadGraph(quads)


def test_serialization_is_insertion_order_free():
    quads = [Quad(iri("g"), iri("s%d" % i), iri("p"), iri("o"))
             for i in range(10)]
    a = serialize_nquads(QuadGraph(quads))
    b = serialize_nquads(QuadGraph(reversed(quads)))
    assert a == b


_label = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
_iri_text = st.text(min_size=1, max_size=20)
_lang = st.from_regex(r"[a-zA-Z]{1,4}(-[a-zA-Z0-9]{1,4})?", fullmatch=True)

_constant = st.one_of(
    _iri_text.map(iri),
    _label.map(blank),
    st.builds(lambda lex: literal(lex), st.text(max_size=20)),
    st.builds(lambda lex, dt: literal(lex, datatype=dt),
              st.text(max_size=10), _iri_text),
    st.builds(lambda lex, lang: literal(lex, lang=lang),
              st.text(max_size=10), _lang),
)

_quad = st.builds(Quad, _iri_text.map(iri), _constant, _constant, _constant)


@settings(max_examples=300, deadline=None)
@given(st.lists(_quad, max_size=50))
def test_round_trip_property(quads):
    g = QuadGraph(quads)
    assert parse_nquads(serialize_nquads(g)) == g


def test_round_trip_seeded_corpus():
    rng = random.Random(20240817)
    for _ in range(300):
        g = random_quadgraph(rng, max_quads=50, n_contexts=4)
        assert parse_nquads(serialize_nquads(g)) == g


# ---------------------------------------------------------------------------
# Rule files
# ---------------------------------------------------------------------------

EX1_RULE = (b"r1: c1(?x1,?x2,<U1>) -> c2(?x1,?x2,?y1), "
            b"c3(?x2,rdf:type,rdf:Property).")


def test_rule_classification_with_existential():
    doc = parse_rules(EX1_RULE)
    (r,) = doc.rules
    assert r.rule_id == "r1"
    assert {v.name for v in r.frontier_variables()} == {"x1", "x2"}
    assert {v.name for v in r.existential_variables()} == {"y1"}
    assert r.body_only_variables() == set()
    assert r.head[1].p == RDF_TYPE and r.head[1].o == RDF_PROPERTY


def test_rule_classification_body_only():
    doc = parse_rules(b"r2: c2(?x1,?x2,?z1) -> c1(?x1,?x2,<U1>).")
    (r,) = doc.rules
    assert {v.name for v in r.frontier_variables()} == {"x1", "x2"}
    assert {v.name for v in r.body_only_variables()} == {"z1"}
    assert r.existential_variables() == set()


def test_blank_node_in_pattern_rejected():
    with pytest.raises(ParseError) as err:
        parse_rules(b"bad: c1(_:b,?x,?x) -> c2(?x,?x,?x).")
    assert "blank node" in str(err.value)


def test_empty_body_rejected():
    with pytest.raises(ParseError) as err:
        parse_rules(b"bad: -> c2(<a>,<b>,<c>).")
    assert "empty body" in str(err.value)


def test_constraint_rule_has_empty_head():
    doc = parse_rules(b"chk: c(?x,<p>,?y), c(?y,<p>,?x) -> .")
    (r,) = doc.rules
    assert r.is_constraint
    assert doc.constraints() == [r]


def test_auto_assigned_ids_and_duplicates():
    doc = parse_rules(b"c(?x,?y,?z) -> d(?x,?y,?z).\n"
                      b"c(?x,?y,?z) -> e(?x,?y,?z).")
    assert [r.rule_id for r in doc.rules] == ["r1", "r2"]
    with pytest.raises(ParseError):
        parse_rules(b"a: c(?x,?y,?z) -> d(?x,?y,?z).\n"
                    b"a: c(?x,?y,?z) -> e(?x,?y,?z).")


def test_rule_spans_recorded():
    doc = parse_rules(b"# comment\nr1: c(?x,?y,?z) -> d(?x,?y,?z).\n"
                      b"r2: c(?x,?y,?z) ->\n  e(?x,?y,?z).")
    assert doc.spans[0] == (2, 2)
    assert doc.spans[1] == (3, 4)


def test_exists_clause_accepted_when_exact():
    doc = parse_rules(b"r: c(?x,<p>,?x) -> exists ?y . d(?x,<p>,?y).")
    (r,) = doc.rules
    assert {v.name for v in r.existential_variables()} == {"y"}


def test_exists_clause_mismatch_rejected():
    with pytest.raises(ParseError) as err:
        parse_rules(b"r: c(?x,<p>,?x) -> exists ?z . d(?x,<p>,?y).")
    assert "exists" in str(err.value)


def test_unknown_prefix_rejected_and_prefix_decls_work():
    with pytest.raises(ParseError):
        parse_rules(b"r: c(?x, ex:p, ?y) -> d(?x, ex:p, ?y).")
    doc = parse_rules(b"@prefix ex: <http://ex.org/> .\n"
                      b"r: c(?x, ex:p, ?y) -> d(?x, ex:p, ?y).")
    assert doc.rules[0].body[0].p == iri("http://ex.org/p")


def test_variable_partition_is_exact():
    text = b"""
    ra: c4(?x, ?p, ?o) -> c2(?x, ?p, ?o) .
    rc: c4(?x, ?p, ?o) -> c1(?x, <to>, ?w) .
    rd: c1(?x, ?p, ?o), c2(?o, ?p, ?q) -> c3(?x, <rel>, ?w), c3(?q, <r2>, ?x) .
    """
    for r in parse_rules(text).rules:
        x = r.frontier_variables()
        y = r.existential_variables()
        z = r.body_only_variables()
        assert x | y | z == r.body_variables() | r.head_variables()
        assert not (x & y) and not (x & z) and not (y & z)


def test_serialize_rules_round_trip():
    doc = parse_rules(EX1_RULE + b"\nchk: c1(?a,?b,?c) -> .")
    text = serialize_rules(doc.rules)
    again = parse_rules(text)
    assert again.rules == doc.rules


# ---------------------------------------------------------------------------
# Query files
# ---------------------------------------------------------------------------

def test_select_query_motivating_shape():
    q = parse_query(b"select ?x where { c1(?x,<beat>,<Italy>), "
                    b"c2(?x,<beat>,<Italy>) }")
    assert [v.name for v in q.free_vars] == ["x"]
    assert len(q.atoms) == 2
    assert not q.is_boolean
    assert q.quantified_vars() == set()


def test_ask_query_is_boolean_with_quantified_vars():
    q = parse_query(b"ask { c(?y, <S1>, ?y2) }")
    assert q.is_boolean
    assert {v.name for v in q.quantified_vars()} == {"y", "y2"}


def test_empty_body_query_rejected():
    with pytest.raises(ParseError):
        parse_query(b"select ?x where { }")
    with pytest.raises(ParseError):
        parse_query(b"ask { }")


def test_free_variable_must_occur():
    with pytest.raises(ParseError):
        parse_query(b"select ?z where { c(?x,<p>,?y) }")


def test_query_prefixes_and_serialization():
    q = parse_query(b"@prefix ex: <http://ex.org/> .\n"
                    b"select ?x where { c(?x, ex:p, rdf:type) }")
    assert q.atoms[0].p == iri("http://ex.org/p")
    assert parse_query(serialize_query(q)) == q
    boolean = parse_query(b"ask { c(?x,<p>,?y) }")
    assert parse_query(serialize_query(boolean)) == boolean
