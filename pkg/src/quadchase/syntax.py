"""Parsers and serializers for quad files, rule files and query files.

Quad files are N-Quads with the graph label in last position naming the
context; ``#`` starts a comment and generalized triples (any constant in
any of s/p/o) are accepted unless strict mode is on.  Diagnostics print
quads context-first, matching the rest of the tool.

Rule files (``.qrules``)::

    @prefix ex: <http://example.org/> .
    r1: c1(?x, ?y, <U1>) -> c2(?x, ?y, ?z), c3(?y, rdf:type, rdf:Property) .
    chk: cn(?a, <s1>, ?b), cn(?a, <s2>, ?b) -> .        # constraint

One rule per ``.``-terminated statement; the id prefix is optional
(position-based ids ``r1``, ``r2``, ... are assigned).  Head-only
variables are existential; an optional ``exists ?z .`` clause right after
``->`` is accepted and checked against the computed existential set.  An
empty head denotes a constraint.  Contexts and terms may be ``<iri>``,
``prefix:name`` or bare names (taken as relative IRIs); ``rdf:`` and
``rdfs:`` are predeclared.

Query files (``.ccq``)::

    ask { c1(?x, <beat>, <Italy>) }
    select ?x where { c1(?x, <beat>, <Italy>), c2(?x, <beat>, <Italy>) }

Parsers are pure functions and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .engine import BridgeRule, RuleError
from .terms import (
    Constant,
    Quad,
    QuadGraph,
    QuadPattern,
    SKOLEM_LABEL_PREFIX,
    Term,
    Variable,
    blank,
    iri,
    literal,
)
from .vocab import PREDECLARED_PREFIXES


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line:
            where = "line %d" % line
            if col:
                where += ", col %d" % col
            where += ": "
        super().__init__(where + message)


class StrictModeError(ParseError):
    """Generalized triple rejected under --strict."""


# ---------------------------------------------------------------------------
# Shared low-level scanning
# ---------------------------------------------------------------------------

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
            '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(text):
            raise ParseError("dangling escape", line, col + i)
        nxt = text[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt == "u":
            if i + 6 > len(text):
                raise ParseError("truncated \\u escape", line, col + i)
            out.append(chr(int(text[i + 2:i + 6], 16)))
            i += 6
        elif nxt == "U":
            if i + 10 > len(text):
                raise ParseError("truncated \\U escape", line, col + i)
            out.append(chr(int(text[i + 2:i + 10], 16)))
            i += 10
        else:
            raise ParseError("unknown escape \\%s" % nxt, line, col + i)
    return "".join(out)


def _scan_iriref(s: str, i: int, line: int) -> tuple[str, int]:
    # s[i] == '<'
    j = s.find(">", i + 1)
    if j < 0:
        raise ParseError("unterminated IRI", line, i + 1)
    raw = s[i + 1:j]
    try:
        value = _unescape(raw, line, i + 2)
    except ValueError as exc:
        raise ParseError("bad IRI escape: %s" % exc, line, i + 2)
    if not value:
        raise ParseError("empty IRI", line, i + 1)
    return value, j + 1


def _scan_string(s: str, i: int, line: int) -> tuple[str, int]:
    # s[i] == '"'
    j = i + 1
    while j < len(s):
        if s[j] == "\\":
            j += 2
            continue
        if s[j] == '"':
            return _unescape(s[i + 1:j], line, i + 2), j + 1
        j += 1
    raise ParseError("unterminated string literal", line, i + 1)


_NAME_START = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_")
_NAME_CHARS = _NAME_START | set("0123456789-.")


def _scan_name(s: str, i: int) -> tuple[str, int]:
    j = i
    while j < len(s) and s[j] in _NAME_CHARS:
        j += 1
    # trailing dots belong to statement punctuation, not the name
    while j > i and s[j - 1] == ".":
        j -= 1
    return s[i:j], j


# ---------------------------------------------------------------------------
# N-Quads
# ---------------------------------------------------------------------------

def _decode(data: Union[bytes, str]) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not valid UTF-8: %s" % exc)
    return data


def _scan_nquads_term(s: str, i: int, line: int,
                      bnode_prefix: Optional[str]) -> tuple[Constant, int]:
    ch = s[i]
    if ch == "<":
        value, j = _scan_iriref(s, i, line)
        return iri(value), j
    if ch == "_" and s[i:i + 2] == "_:":
        label, j = _scan_name(s, i + 2)
        if not label:
            raise ParseError("empty blank node label", line, i + 1)
        if bnode_prefix and not label.startswith(SKOLEM_LABEL_PREFIX):
            label = bnode_prefix + label
        return blank(label), j
    if ch == '"':
        lex, j = _scan_string(s, i, line)
        if s[j:j + 2] == "^^":
            if j + 2 >= len(s) or s[j + 2] != "<":
                raise ParseError("datatype must be an IRI", line, j + 3)
            dt, j2 = _scan_iriref(s, j + 2, line)
            return literal(lex, datatype=dt), j2
        if s[j:j + 1] == "@":
            tag, j2 = _scan_name(s, j + 1)
            if not tag:
                raise ParseError("empty language tag", line, j + 2)
            return literal(lex, lang=tag), j2
        return literal(lex), j
    raise ParseError("expected an RDF term", line, i + 1)


def parse_nquads(data: Union[bytes, str], strict: bool = False,
                 bnode_prefix: Optional[str] = None) -> QuadGraph:
    """Parse N-Quads: one quad per statement, graph label required.

    Duplicates collapse (set semantics).  ``bnode_prefix`` renames
    document-scoped blank labels apart for multi-file loads; skolem
    labels (reserved ``sk_`` prefix) are never renamed.  Strict mode
    rejects generalized triples: literal subjects or predicates and
    blank-node predicates.
    """
    text = _decode(data)
    quads: set[Quad] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        i = 0
        terms: list[Constant] = []
        n = len(raw)
        while i < n:
            ch = raw[i]
            if ch in " \t\r":
                i += 1
                continue
            if ch == "#":
                break
            if ch == ".":
                if len(terms) == 3:
                    raise ParseError("line missing graph label (context)",
                                     lineno, i + 1)
                if len(terms) != 4:
                    raise ParseError(
                        "expected 4 terms before '.', got %d" % len(terms),
                        lineno, i + 1)
                s, p, o, g = terms
                if g.kind != "iri":
                    raise ParseError(
                        "context (graph label) must be an IRI, got %s"
                        % g.canonical, lineno, i + 1)
                if strict:
                    if s.kind == "literal":
                        raise StrictModeError(
                            "strict mode: literal subject", lineno, 1)
                    if p.kind != "iri":
                        raise StrictModeError(
                            "strict mode: predicate must be an IRI",
                            lineno, 1)
                quads.add(Quad(g, s, p, o))
                terms = []
                i += 1
                continue
            if len(terms) >= 4:
                raise ParseError("too many terms in statement", lineno, i + 1)
            term, i = _scan_nquads_term(raw, i, lineno, bnode_prefix)
            terms.append(term)
        if terms:
            raise ParseError("statement not terminated by '.'", lineno, n)
    return QuadGraph(quads)


def serialize_nquads(qg: QuadGraph) -> bytes:
    """Deterministic N-Quads: quads sorted by canonical (context,s,p,o)."""
    lines = []
    for q in qg.sorted_quads():
        lines.append("%s %s %s %s ." % (q.s.canonical, q.p.canonical,
                                        q.o.canonical, q.ctx.canonical))
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Rule / query tokenizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str   # IRI PNAME NAME VAR STRING BNODE PUNCT EOF
    value: object
    line: int
    col: int


_PUNCT2 = ("->",)
_PUNCT1 = "(),.{}"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        i = 0
        n = len(raw)
        while i < n:
            ch = raw[i]
            if ch in " \t\r":
                i += 1
                continue
            if ch == "#":
                break
            col = i + 1
            if raw[i:i + 2] in _PUNCT2:
                tokens.append(_Token("PUNCT", raw[i:i + 2], lineno, col))
                i += 2
                continue
            if ch in _PUNCT1:
                tokens.append(_Token("PUNCT", ch, lineno, col))
                i += 1
                continue
            if ch == "<":
                value, i = _scan_iriref(raw, i, lineno)
                tokens.append(_Token("IRI", value, lineno, col))
                continue
            if ch == "?":
                name, i = _scan_name(raw, i + 1)
                if not name:
                    raise ParseError("empty variable name", lineno, col)
                tokens.append(_Token("VAR", name, lineno, col))
                continue
            if ch == '"':
                lex, i = _scan_string(raw, i, lineno)
                dt = None
                lang = None
                if raw[i:i + 2] == "^^":
                    if raw[i + 2:i + 3] == "<":
                        dt, i = _scan_iriref(raw, i + 2, lineno)
                    else:
                        raise ParseError("datatype must be an IRI",
                                         lineno, i + 3)
                elif raw[i:i + 1] == "@":
                    lang, i = _scan_name(raw, i + 1)
                    if not lang:
                        raise ParseError("empty language tag", lineno, i)
                tokens.append(_Token("STRING", (lex, dt, lang), lineno, col))
                continue
            if raw[i:i + 2] == "_:":
                label, i = _scan_name(raw, i + 2)
                if not label:
                    raise ParseError("empty blank node label", lineno, col)
                tokens.append(_Token("BNODE", label, lineno, col))
                continue
            if ch == "@":
                word, i = _scan_name(raw, i + 1)
                tokens.append(_Token("NAME", "@" + word, lineno, col))
                continue
            if ch in _NAME_START:
                word, i = _scan_name(raw, i)
                if i < n and raw[i] == ":":
                    local, j = _scan_name(raw, i + 1)
                    # "name:" followed by a local part is a prefixed name;
                    # a bare "name:" is left as NAME + ':' for rule ids.
                    if local:
                        tokens.append(_Token("PNAME", (word, local),
                                             lineno, col))
                        i = j
                        continue
                tokens.append(_Token("NAME", word, lineno, col))
                continue
            if ch == ":":
                tokens.append(_Token("PUNCT", ":", lineno, col))
                i += 1
                continue
            raise ParseError("unexpected character %r" % ch, lineno, col)
    last_line = text.count("\n") + 1
    tokens.append(_Token("EOF", None, last_line, 1))
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect_punct(self, value: str) -> _Token:
        tok = self.next()
        if tok.kind != "PUNCT" or tok.value != value:
            raise ParseError("expected %r" % value, tok.line, tok.col)
        return tok

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.value == value


def _expand_pname(prefixes: dict[str, str], tok: _Token) -> str:
    prefix, local = tok.value
    ns = prefixes.get(prefix)
    if ns is None:
        raise ParseError("unknown prefix %r" % prefix, tok.line, tok.col)
    return ns + local


def _parse_prefix_decl(ts: _TokenStream, prefixes: dict[str, str]) -> None:
    ts.next()  # @prefix
    tok = ts.next()
    if tok.kind == "PNAME":
        # "@prefix pfx: <iri> ." tokenizes oddly when the local part is
        # stuck to the colon; only "pfx" + ':' is accepted here.
        raise ParseError("malformed prefix declaration", tok.line, tok.col)
    if tok.kind != "NAME":
        raise ParseError("expected prefix name", tok.line, tok.col)
    name = tok.value
    ts.expect_punct(":")
    ns_tok = ts.next()
    if ns_tok.kind != "IRI":
        raise ParseError("expected namespace IRI", ns_tok.line, ns_tok.col)
    ts.expect_punct(".")
    prefixes[name] = ns_tok.value


_KEYWORDS = {"ask", "select", "where", "exists"}


def _term_from_token(tok: _Token, prefixes: dict[str, str],
                     allow_var: bool = True) -> Term:
    if tok.kind == "IRI":
        return iri(tok.value)
    if tok.kind == "PNAME":
        return iri(_expand_pname(prefixes, tok))
    if tok.kind == "NAME":
        if tok.value in _KEYWORDS or tok.value.startswith("@"):
            raise ParseError("reserved word %r used as term; write <%s>"
                             % (tok.value, tok.value), tok.line, tok.col)
        return iri(tok.value)
    if tok.kind == "STRING":
        lex, dt, lang = tok.value
        return literal(lex, datatype=dt, lang=lang)
    if tok.kind == "VAR":
        if not allow_var:
            raise ParseError("variable not allowed here", tok.line, tok.col)
        return Variable(tok.value)
    if tok.kind == "BNODE":
        raise ParseError("blank node _:%s not allowed in a pattern"
                         % tok.value, tok.line, tok.col)
    raise ParseError("expected a term", tok.line, tok.col)


def _parse_atom(ts: _TokenStream, prefixes: dict[str, str]) -> QuadPattern:
    ctx_tok = ts.next()
    ctx = _term_from_token(ctx_tok, prefixes, allow_var=False)
    if not isinstance(ctx, Constant) or ctx.kind != "iri":
        raise ParseError("context must be an IRI", ctx_tok.line, ctx_tok.col)
    ts.expect_punct("(")
    terms = []
    for slot in range(3):
        tok = ts.next()
        terms.append(_term_from_token(tok, prefixes))
        if slot < 2:
            ts.expect_punct(",")
    ts.expect_punct(")")
    return QuadPattern(ctx, *terms)


def _parse_atom_list(ts: _TokenStream, prefixes: dict[str, str],
                     stop: str) -> list[QuadPattern]:
    atoms: list[QuadPattern] = []
    if ts.at_punct(stop):
        return atoms
    while True:
        atoms.append(_parse_atom(ts, prefixes))
        if ts.at_punct(","):
            ts.next()
            continue
        return atoms


# ---------------------------------------------------------------------------
# Rule documents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuleDocument:
    """An ordered rule list with the source line range of each rule."""

    rules: tuple[BridgeRule, ...]
    spans: tuple[tuple[int, int], ...]

    def bridge_rules(self) -> list[BridgeRule]:
        return [r for r in self.rules if not r.is_constraint]

    def constraints(self) -> list[BridgeRule]:
        return [r for r in self.rules if r.is_constraint]


def parse_rules(data: Union[bytes, str]) -> RuleDocument:
    """Parse a rule file; see the module docstring for the grammar."""
    text = _decode(data)
    ts = _TokenStream(_tokenize(text))
    prefixes = dict(PREDECLARED_PREFIXES)
    rules: list[BridgeRule] = []
    spans: list[tuple[int, int]] = []
    ids_seen: set[str] = set()
    index = 0
    while ts.peek().kind != "EOF":
        tok = ts.peek()
        if tok.kind == "NAME" and tok.value == "@prefix":
            _parse_prefix_decl(ts, prefixes)
            continue
        index += 1
        start_line = tok.line
        rule_id = "r%d" % index
        if tok.kind == "NAME" and ts.peek(1).kind == "PUNCT" \
                and ts.peek(1).value == ":":
            rule_id = tok.value
            ts.next()
            ts.next()
        body = _parse_atom_list(ts, prefixes, stop="->")
        arrow = ts.expect_punct("->")
        if not body:
            raise ParseError("rule %s: empty body" % rule_id,
                             arrow.line, arrow.col)
        declared: Optional[set[Variable]] = None
        if ts.peek().kind == "NAME" and ts.peek().value == "exists":
            ts.next()
            declared = set()
            while ts.peek().kind == "VAR":
                v = ts.next()
                declared.add(Variable(v.value))
            if not declared:
                raise ParseError("empty exists clause", arrow.line,
                                 arrow.col)
            ts.expect_punct(".")
        head = _parse_atom_list(ts, prefixes, stop=".")
        end = ts.expect_punct(".")
        try:
            rule = BridgeRule(rule_id, tuple(body), tuple(head))
        except RuleError as exc:
            raise ParseError(str(exc), start_line, tok.col)
        if declared is not None:
            actual = rule.existential_variables()
            if declared != actual:
                raise ParseError(
                    "rule %s: exists clause {%s} does not match head-only "
                    "variables {%s}" % (
                        rule_id,
                        ", ".join(sorted("?" + v.name for v in declared)),
                        ", ".join(sorted("?" + v.name for v in actual))),
                    start_line, tok.col)
        if rule_id in ids_seen:
            raise ParseError("duplicate rule id %r" % rule_id,
                             start_line, tok.col)
        ids_seen.add(rule_id)
        rules.append(rule)
        spans.append((start_line, end.line))
    return RuleDocument(tuple(rules), tuple(spans))


def _term_text(t: Union[Term, Constant]) -> str:
    if isinstance(t, Variable):
        return "?" + t.name
    return t.canonical


def _atom_text(pat: QuadPattern) -> str:
    return "%s(%s, %s, %s)" % (pat.ctx.canonical, _term_text(pat.s),
                               _term_text(pat.p), _term_text(pat.o))


def serialize_rules(rules: Iterable[BridgeRule]) -> str:
    """Rule file text that parses back to the same rules."""
    lines = []
    for r in rules:
        body = ", ".join(_atom_text(p) for p in r.body)
        head = ", ".join(_atom_text(p) for p in r.head)
        lines.append("%s: %s -> %s ." % (r.rule_id, body, head)
                     if head else "%s: %s -> ." % (r.rule_id, body))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Query documents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QueryDocument:
    """A contextualized conjunctive query.

    ``free_vars`` is the (ordered) projection; every other variable in
    the atoms is quantified.  Boolean queries have no free variables.
    """

    free_vars: tuple[Variable, ...]
    atoms: tuple[QuadPattern, ...]

    @property
    def is_boolean(self) -> bool:
        return not self.free_vars

    def variables(self) -> set[Variable]:
        out: set[Variable] = set()
        for a in self.atoms:
            out |= a.variables()
        return out

    def quantified_vars(self) -> set[Variable]:
        return self.variables() - set(self.free_vars)


def parse_query(data: Union[bytes, str]) -> QueryDocument:
    """Parse ``ask { ... }`` or ``select ?v ... where { ... }``."""
    text = _decode(data)
    ts = _TokenStream(_tokenize(text))
    prefixes = dict(PREDECLARED_PREFIXES)
    while ts.peek().kind == "NAME" and ts.peek().value == "@prefix":
        _parse_prefix_decl(ts, prefixes)
    tok = ts.next()
    if tok.kind != "NAME" or tok.value not in ("ask", "select"):
        raise ParseError("expected 'ask' or 'select'", tok.line, tok.col)
    free: list[Variable] = []
    if tok.value == "select":
        while ts.peek().kind == "VAR":
            v = ts.next()
            var = Variable(v.value)
            if var in free:
                raise ParseError("duplicate select variable ?%s" % var.name,
                                 v.line, v.col)
            free.append(var)
        if not free:
            t = ts.peek()
            raise ParseError("select needs at least one variable",
                             t.line, t.col)
        w = ts.next()
        if w.kind != "NAME" or w.value != "where":
            raise ParseError("expected 'where'", w.line, w.col)
    brace = ts.expect_punct("{")
    atoms = _parse_atom_list(ts, prefixes, stop="}")
    ts.expect_punct("}")
    tail = ts.peek()
    if tail.kind != "EOF":
        raise ParseError("trailing input after query", tail.line, tail.col)
    if not atoms:
        raise ParseError("empty query body", brace.line, brace.col)
    atom_vars: set[Variable] = set()
    for a in atoms:
        atom_vars |= a.variables()
    for var in free:
        if var not in atom_vars:
            raise ParseError("free variable ?%s occurs in no atom"
                             % var.name, brace.line, brace.col)
    return QueryDocument(tuple(free), tuple(atoms))


def serialize_query(q: QueryDocument) -> str:
    atoms = ", ".join(_atom_text(a) for a in q.atoms)
    if q.is_boolean:
        return "ask { %s }\n" % atoms
    heads = " ".join("?" + v.name for v in q.free_vars)
    return "select %s where { %s }\n" % (heads, atoms)
