"""Core term and quad model: interned RDF constants, variables, quads,
quad-graphs with matching indexes, and substitutions.

Every constant has a canonical serialization (N-Quads term syntax with
lowercase hex escapes) and two constants are equal exactly when their
canonical serializations are byte-equal.  Construction goes through the
factory functions ``iri``, ``blank``, ``literal`` and ``skolem_constant``,
which intern instances so equal terms are the identical object.

Skolem blank nodes are labelled nulls whose identity is a deterministic
function of (rule id, function index, argument vector); their labels use
the reserved ``sk_`` prefix and are recognised on re-parse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

IRI = "iri"
BLANK = "blank"
SKOLEM = "skolem-blank"
LITERAL = "literal"

SKOLEM_LABEL_PREFIX = "sk_"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


class TermError(ValueError):
    """Malformed term or quad construction."""


class SkolemCollisionError(RuntimeError):
    """Two distinct skolem argument vectors hashed to the same label.

    This is an internal error: labels are meant to be injective at desk
    scale, so a collision must abort the run rather than silently merge
    two labelled nulls.
    """


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


_IRI_UNSAFE = set('<>"{}|^`\\')


def _escape_iri(text: str) -> str:
    out = []
    for ch in text:
        if ch in _IRI_UNSAFE or ord(ch) <= 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


@dataclass(frozen=True)
class Constant:
    """An RDF constant: IRI, blank node, skolem blank node, or literal.

    ``lexical`` holds the IRI string, the blank node label (without the
    ``_:`` sigil), or the literal's lexical form.  Skolem blanks carry the
    bookkeeping triple (rule id, function index, 64-bit argument hash);
    the argument hash is derived from the argument vector, never free.
    """

    kind: str
    lexical: str
    datatype: Optional[str] = None
    lang: Optional[str] = None
    rule_id: Optional[str] = None
    fn_index: Optional[int] = None
    arg_hash: Optional[int] = None

    @property
    def canonical(self) -> str:
        cached = self.__dict__.get("_canonical")
        if cached is None:
            cached = _canonical(self)
            object.__setattr__(self, "_canonical", cached)
        return cached

    def is_skolem(self) -> bool:
        return self.kind == SKOLEM

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Constant({self.canonical})"


def _canonical(c: Constant) -> str:
    if c.kind == IRI:
        return "<%s>" % _escape_iri(c.lexical)
    if c.kind in (BLANK, SKOLEM):
        return "_:" + c.lexical
    lit = '"%s"' % _escape_literal(c.lexical)
    if c.lang is not None:
        return lit + "@" + c.lang
    if c.datatype is not None:
        return lit + "^^<%s>" % _escape_iri(c.datatype)
    return lit


@dataclass(frozen=True)
class Variable:
    """A pattern variable; never appears inside a ground Quad."""

    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise TermError("variable names must be nonempty")

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "?" + self.name


Term = Union[Constant, Variable]

# Interning: canonical serialization -> the unique Constant instance.
_INTERN: dict[str, Constant] = {}

# Skolem registry: label -> (rule_id, fn_index, argument canonicals).
# Used to detect (improbable) FNV collisions instead of merging nulls.
_SKOLEM_ARGS: dict[str, tuple] = {}


def _intern(c: Constant) -> Constant:
    key = c.canonical
    found = _INTERN.get(key)
    if found is not None:
        return found
    _INTERN[key] = c
    return c


def iri(value: str) -> Constant:
    if not value:
        raise TermError("empty IRI")
    return _intern(Constant(IRI, value))


def blank(label: str) -> Constant:
    """A blank node; labels with the reserved ``sk_`` prefix come back as
    skolem blanks so skolem-ness survives a serialize/parse round trip."""
    if not label:
        raise TermError("empty blank node label")
    if label.startswith(SKOLEM_LABEL_PREFIX):
        return _intern(Constant(SKOLEM, label))
    return _intern(Constant(BLANK, label))


def literal(lexical: str, datatype: Optional[str] = None,
            lang: Optional[str] = None) -> Constant:
    if datatype is not None and lang is not None:
        raise TermError("literal cannot carry both datatype and language tag")
    return _intern(Constant(LITERAL, lexical, datatype=datatype, lang=lang))


def skolem_constant(rule_id: str, fn_index: int,
                    args: Iterable[Constant]) -> Constant:
    """The labelled null produced by skolem function ``fn_index`` of rule
    ``rule_id`` applied to the ground argument vector ``args``.

    Deterministic: identical inputs yield the byte-identical label.  The
    label is ``sk_<rule>_<index>_<hex64>`` with hex64 an FNV-1a 64 hash of
    the argument canonicals joined by byte 0x1f.
    """
    arg_tuple = tuple(args)
    for a in arg_tuple:
        if not isinstance(a, Constant):
            raise TermError("skolem arguments must be ground constants")
    arg_canon = tuple(a.canonical for a in arg_tuple)
    digest = fnv1a_64(b"\x1f".join(s.encode("utf-8") for s in arg_canon))
    label = "%s%s_%d_%016x" % (SKOLEM_LABEL_PREFIX, rule_id, fn_index, digest)
    ident = (rule_id, fn_index, arg_canon)
    seen = _SKOLEM_ARGS.get(label)
    if seen is None:
        _SKOLEM_ARGS[label] = ident
    elif seen != ident:
        raise SkolemCollisionError(
            "skolem label collision on %s: %r vs %r" % (label, seen, ident))
    return _intern(Constant(SKOLEM, label, rule_id=rule_id,
                            fn_index=fn_index, arg_hash=digest))


@dataclass(frozen=True)
class Quad:
    """A ground quad c:(s,p,o).  The context is always an IRI; subject,
    predicate and object may be any constant (generalized triples)."""

    ctx: Constant
    s: Constant
    p: Constant
    o: Constant

    def __post_init__(self) -> None:
        for t in (self.ctx, self.s, self.p, self.o):
            if not isinstance(t, Constant):
                raise TermError("quads are ground: got %r" % (t,))
        if self.ctx.kind != IRI:
            raise TermError(
                "context must be an IRI, got %s" % self.ctx.canonical)

    @property
    def triple(self) -> tuple[Constant, Constant, Constant]:
        return (self.s, self.p, self.o)

    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.ctx.canonical, self.s.canonical,
                self.p.canonical, self.o.canonical)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "%s:(%s, %s, %s)" % (self.ctx.canonical, self.s.canonical,
                                    self.p.canonical, self.o.canonical)


@dataclass(frozen=True)
class QuadPattern:
    """A quad pattern: ground IRI context, terms may be variables."""

    ctx: Constant
    s: Term
    p: Term
    o: Term

    def __post_init__(self) -> None:
        if not isinstance(self.ctx, Constant) or self.ctx.kind != IRI:
            raise TermError("pattern context must be a ground IRI")
        for t in (self.s, self.p, self.o):
            if not isinstance(t, (Constant, Variable)):
                raise TermError("bad pattern term %r" % (t,))

    def variables(self) -> set[Variable]:
        return {t for t in (self.s, self.p, self.o)
                if isinstance(t, Variable)}

    def is_ground(self) -> bool:
        return not self.variables()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        def show(t: Term) -> str:
            return t.canonical if isinstance(t, Constant) else "?" + t.name
        return "%s:(%s, %s, %s)" % (self.ctx.canonical, show(self.s),
                                    show(self.p), show(self.o))


Substitution = dict[Variable, Constant]


def apply_substitution(pattern: Union[Quad, QuadPattern],
                       mapping: Substitution) -> Union[Quad, QuadPattern]:
    """Replace exactly the in-domain variables of ``pattern``.

    Identity on ground quads; a partial substitution yields a pattern,
    a total one yields a ground Quad.
    """
    if isinstance(pattern, Quad):
        return pattern

    def subst(t: Term) -> Term:
        if isinstance(t, Variable):
            return mapping.get(t, t)
        return t

    s, p, o = subst(pattern.s), subst(pattern.p), subst(pattern.o)
    if all(isinstance(t, Constant) for t in (s, p, o)):
        return Quad(pattern.ctx, s, p, o)
    return QuadPattern(pattern.ctx, s, p, o)


class QuadGraph:
    """An immutable set of quads with matching indexes.

    Indexes (by context, by context+predicate, by context+subject) are
    built lazily on first use; instances are safe to share across threads
    after construction.
    """

    __slots__ = ("_quads", "_by_ctx", "_by_ctx_p", "_by_ctx_s", "_hash")

    def __init__(self, quads: Iterable[Quad] = ()) -> None:
        self._quads = frozenset(quads)
        for q in self._quads:
            if not isinstance(q, Quad):
                raise TermError("QuadGraph holds Quads, got %r" % (q,))
        self._by_ctx: Optional[dict] = None
        self._by_ctx_p: Optional[dict] = None
        self._by_ctx_s: Optional[dict] = None
        self._hash: Optional[int] = None

    @property
    def quads(self) -> frozenset[Quad]:
        return self._quads

    def __len__(self) -> int:
        return len(self._quads)

    def __iter__(self) -> Iterator[Quad]:
        return iter(self._quads)

    def __contains__(self, q: object) -> bool:
        return q in self._quads

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadGraph):
            return NotImplemented
        return self._quads == other._quads

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._quads)
        return self._hash

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "QuadGraph(%d quads)" % len(self._quads)

    def contexts(self) -> set[Constant]:
        return {q.ctx for q in self._quads}

    def graph_of(self, ctx: Constant) -> frozenset[tuple]:
        """The triple projection of one context; empty if unused."""
        if not isinstance(ctx, Constant) or ctx.kind != IRI:
            raise TermError("graph_of needs an IRI context")
        self._ensure_indexes()
        return frozenset(q.triple for q in self._by_ctx.get(ctx, ()))

    def union(self, quads: Iterable[Quad]) -> "QuadGraph":
        extra = set(quads)
        if not extra - self._quads:
            return self
        return QuadGraph(self._quads | extra)

    def sorted_quads(self) -> list[Quad]:
        return sorted(self._quads, key=Quad.sort_key)

    def constants(self) -> set[Constant]:
        out: set[Constant] = set()
        for q in self._quads:
            out.update((q.ctx, q.s, q.p, q.o))
        return out

    def _ensure_indexes(self) -> None:
        if self._by_ctx is not None:
            return
        by_ctx: dict[Constant, list[Quad]] = {}
        by_ctx_p: dict[tuple, list[Quad]] = {}
        by_ctx_s: dict[tuple, list[Quad]] = {}
        for q in self._quads:
            by_ctx.setdefault(q.ctx, []).append(q)
            by_ctx_p.setdefault((q.ctx, q.p), []).append(q)
            by_ctx_s.setdefault((q.ctx, q.s), []).append(q)
        self._by_ctx = by_ctx
        self._by_ctx_p = by_ctx_p
        self._by_ctx_s = by_ctx_s

    def candidates(self, ctx: Constant, s: Optional[Constant] = None,
                   p: Optional[Constant] = None,
                   o: Optional[Constant] = None) -> list[Quad]:
        """Quads of context ``ctx`` matching the given ground slots."""
        self._ensure_indexes()
        if s is not None and p is not None and o is not None:
            q = Quad(ctx, s, p, o)
            return [q] if q in self._quads else []
        pool: list[Quad]
        if p is not None:
            pool = self._by_ctx_p.get((ctx, p), [])
        elif s is not None:
            pool = self._by_ctx_s.get((ctx, s), [])
        else:
            pool = self._by_ctx.get(ctx, [])
        out = []
        for q in pool:
            if s is not None and q.s is not s and q.s != s:
                continue
            if p is not None and q.p != p:
                continue
            if o is not None and q.o != o:
                continue
            out.append(q)
        return out

    def candidate_count(self, ctx: Constant, s: Optional[Constant] = None,
                        p: Optional[Constant] = None,
                        o: Optional[Constant] = None) -> int:
        """Cheap upper estimate of matching quads (index bucket size)."""
        self._ensure_indexes()
        if s is not None and p is not None and o is not None:
            return 1 if Quad(ctx, s, p, o) in self._quads else 0
        if p is not None:
            return len(self._by_ctx_p.get((ctx, p), ()))
        if s is not None:
            return len(self._by_ctx_s.get((ctx, s), ()))
        return len(self._by_ctx.get(ctx, ()))


def quad_graph_size(qg: QuadGraph) -> int:
    """Symbol size of a quad-graph: four symbols per quad."""
    return 4 * len(qg)
