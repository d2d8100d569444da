"""Bridge rules, skolemization, and the rule-application operator.

A bridge rule is a forall-existential implication between conjunctions of
quad patterns across contexts.  For evaluation, each rule is skolemized
(existential variables become deterministic skolem functions over the
frontier variables) and normalized to single-head form; a rule whose head
mentions a skolem function is *generating*, the rest are *non-generating*.
Empty-head rules are constraints: a body match signals inconsistency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .terms import (
    BLANK,
    Constant,
    SKOLEM,
    Quad,
    QuadGraph,
    QuadPattern,
    Substitution,
    Term,
    Variable,
    quad_graph_size,
    skolem_constant,
)


class RuleError(ValueError):
    """Ill-formed bridge rule."""


@dataclass(frozen=True)
class BridgeRule:
    """A forall-existential rule between quad patterns.

    Variables partition into frontier (body and head), existential
    (head only), and body-only; patterns must not contain blank nodes.
    An empty head makes the rule a constraint.
    """

    rule_id: str
    body: tuple[QuadPattern, ...]
    head: tuple[QuadPattern, ...]

    def __post_init__(self) -> None:
        if not self.rule_id:
            raise RuleError("rules need a nonempty id")
        if not self.body:
            raise RuleError("rule %s: empty body" % self.rule_id)
        for pat in self.body + self.head:
            for t in (pat.s, pat.p, pat.o):
                if isinstance(t, Constant) and t.kind in (BLANK, SKOLEM):
                    raise RuleError(
                        "rule %s: blank node %s in pattern"
                        % (self.rule_id, t.canonical))

    @property
    def is_constraint(self) -> bool:
        return not self.head

    def body_variables(self) -> set[Variable]:
        out: set[Variable] = set()
        for pat in self.body:
            out |= pat.variables()
        return out

    def head_variables(self) -> set[Variable]:
        out: set[Variable] = set()
        for pat in self.head:
            out |= pat.variables()
        return out

    def frontier_variables(self) -> set[Variable]:
        return self.body_variables() & self.head_variables()

    def existential_variables(self) -> set[Variable]:
        return self.head_variables() - self.body_variables()

    def body_only_variables(self) -> set[Variable]:
        return self.body_variables() - self.head_variables()

    def frontier_vector(self) -> tuple[Variable, ...]:
        """Frontier variables in order of first occurrence in the body.

        This order is the (fixed) argument order of every skolem function
        of the rule.
        """
        frontier = self.frontier_variables()
        seen: list[Variable] = []
        for pat in self.body:
            for t in (pat.s, pat.p, pat.o):
                if isinstance(t, Variable) and t in frontier \
                        and t not in seen:
                    seen.append(t)
        return tuple(seen)

    def existential_vector(self) -> tuple[Variable, ...]:
        """Existential variables in order of first occurrence in the head."""
        existential = self.existential_variables()
        seen: list[Variable] = []
        for pat in self.head:
            for t in (pat.s, pat.p, pat.o):
                if isinstance(t, Variable) and t in existential \
                        and t not in seen:
                    seen.append(t)
        return tuple(seen)

    def contexts(self) -> set[Constant]:
        return {pat.ctx for pat in self.body + self.head}


@dataclass(frozen=True)
class SkolemTerm:
    """A skolem function application f_i^r(x...) inside a rule head."""

    rule_id: str
    fn_index: int
    args: tuple[Variable, ...]


HeadTerm = Union[Constant, Variable, SkolemTerm]


@dataclass(frozen=True)
class SkolemAtom:
    """A single head quad pattern whose terms may be skolem applications."""

    ctx: Constant
    s: HeadTerm
    p: HeadTerm
    o: HeadTerm

    def terms(self) -> tuple[HeadTerm, HeadTerm, HeadTerm]:
        return (self.s, self.p, self.o)

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.terms())

    def has_function(self) -> bool:
        return any(isinstance(t, SkolemTerm) for t in self.terms())


@dataclass(frozen=True)
class SkolemRule:
    """A skolemized single-head rule.

    ``head_index`` records which head atom of the origin rule this is;
    the (rule_id, head_index) pair identifies the normalized rule.
    """

    rule_id: str
    head_index: int
    body: tuple[QuadPattern, ...]
    head: SkolemAtom

    @property
    def is_generating(self) -> bool:
        return self.head.has_function()

    def size(self) -> int:
        return 4 * (len(self.body) + 1)


def rule_size(r: Union[BridgeRule, SkolemRule]) -> int:
    """Symbol size of a rule: four symbols per quad pattern."""
    if isinstance(r, SkolemRule):
        return r.size()
    return 4 * (len(r.body) + len(r.head))


@dataclass(frozen=True)
class QuadSystem:
    """A quad-graph together with its bridge rules."""

    quads: QuadGraph
    rules: tuple[BridgeRule, ...]

    def contexts(self) -> set[Constant]:
        out = self.quads.contexts()
        for r in self.rules:
            out |= r.contexts()
        return out

    def bridge_rules(self) -> list[BridgeRule]:
        return [r for r in self.rules if not r.is_constraint]

    def constraints(self) -> list[BridgeRule]:
        return [r for r in self.rules if r.is_constraint]


def quad_system_size(qs: QuadSystem) -> int:
    return quad_graph_size(qs.quads) + sum(rule_size(r) for r in qs.rules)


def symbol_size(x: Union[QuadGraph, BridgeRule, SkolemRule,
                         QuadSystem]) -> int:
    """Number of symbols needed to print the object."""
    if isinstance(x, QuadGraph):
        return quad_graph_size(x)
    if isinstance(x, (BridgeRule, SkolemRule)):
        return rule_size(x)
    if isinstance(x, QuadSystem):
        return quad_system_size(x)
    raise TypeError("no symbol size for %r" % (x,))


def skolemize(rule: BridgeRule) -> list[SkolemRule]:
    """Skolemize and normalize a rule to single-head form.

    Every existential variable y_i is replaced by the application of the
    rule's i-th skolem function to the full frontier vector, then the
    (shared-body) head splits into one rule per head atom.  Constraints
    are not skolemized; they stay as checks.
    """
    if rule.is_constraint:
        raise RuleError("constraint rules have no skolemization")
    frontier = rule.frontier_vector()
    fn_of = {y: SkolemTerm(rule.rule_id, i, frontier)
             for i, y in enumerate(rule.existential_vector())}

    def convert(t: Term) -> HeadTerm:
        if isinstance(t, Variable) and t in fn_of:
            return fn_of[t]
        return t

    out = []
    for i, pat in enumerate(rule.head):
        atom = SkolemAtom(pat.ctx, convert(pat.s), convert(pat.p),
                          convert(pat.o))
        out.append(SkolemRule(rule.rule_id, i, rule.body, atom))
    return out


def skolemize_all(rules: Iterable[BridgeRule]
                  ) -> tuple[list[SkolemRule], list[SkolemRule],
                             list[BridgeRule]]:
    """Split a rule set into (non-generating, generating, constraints)."""
    non_gen: list[SkolemRule] = []
    gen: list[SkolemRule] = []
    constraints: list[BridgeRule] = []
    for r in rules:
        if r.is_constraint:
            constraints.append(r)
            continue
        for sk in skolemize(r):
            (gen if sk.is_generating else non_gen).append(sk)
    return non_gen, gen, constraints


def _resolve(t: Term, binding: Substitution) -> Optional[Constant]:
    if isinstance(t, Constant):
        return t
    return binding.get(t)


def match_patterns(qg: QuadGraph, patterns: Iterable[QuadPattern],
                   binding: Optional[Substitution] = None,
                   no_skolem: frozenset[Variable] = frozenset()
                   ) -> Iterator[Substitution]:
    """All substitutions grounding every pattern into ``qg``.

    Backtracking join, picking the most constrained remaining atom first
    (smallest index bucket under the current binding).  Variables listed
    in ``no_skolem`` never bind to skolem blank nodes.  The result is
    independent of atom order.
    """
    remaining = list(patterns)
    base: Substitution = dict(binding) if binding else {}

    def step(atoms: list[QuadPattern], bound: Substitution
             ) -> Iterator[Substitution]:
        if not atoms:
            yield dict(bound)
            return
        best_i = 0
        best_count = None
        for i, pat in enumerate(atoms):
            count = qg.candidate_count(
                pat.ctx,
                _resolve(pat.s, bound),
                _resolve(pat.p, bound),
                _resolve(pat.o, bound))
            if best_count is None or count < best_count:
                best_i, best_count = i, count
                if count == 0:
                    break
        pat = atoms[best_i]
        rest = atoms[:best_i] + atoms[best_i + 1:]
        for quad in qg.candidates(pat.ctx,
                                  _resolve(pat.s, bound),
                                  _resolve(pat.p, bound),
                                  _resolve(pat.o, bound)):
            new = dict(bound)
            ok = True
            for t, v in zip((pat.s, pat.p, pat.o), quad.triple):
                if isinstance(t, Variable):
                    seen = new.get(t)
                    if seen is None:
                        if t in no_skolem and v.is_skolem():
                            ok = False
                            break
                        new[t] = v
                    elif seen != v:
                        ok = False
                        break
            if ok:
                yield from step(rest, new)

    return step(remaining, base)


def instantiate_head(atom: SkolemAtom, binding: Substitution) -> Quad:
    """Ground a skolemized head atom, evaluating skolem applications."""

    def ground(t: HeadTerm) -> Constant:
        if isinstance(t, Constant):
            return t
        if isinstance(t, Variable):
            try:
                return binding[t]
            except KeyError:
                raise RuleError("unbound head variable ?%s" % t.name)
        return skolem_constant(t.rule_id, t.fn_index,
                               [binding[a] for a in t.args])

    return Quad(atom.ctx, ground(atom.s), ground(atom.p), ground(atom.o))


def apply_rule(rule: SkolemRule, qg: QuadGraph) -> QuadGraph:
    """The head instances of every body grounding into ``qg``.

    Exactly the derived set: quads of ``qg`` appear in the result only if
    they happen to be head instances.
    """
    return QuadGraph(derive([rule], qg))


def apply_ruleset(rules: Iterable[SkolemRule], qg: QuadGraph) -> QuadGraph:
    """Union of per-rule applications; rule order never matters."""
    return QuadGraph(derive(rules, qg))


def derive(rules: Iterable[SkolemRule], qg: QuadGraph,
           skip: Optional[set[tuple[str, int]]] = None) -> set[Quad]:
    """Set-level rule application.

    ``skip`` marks (rule id, head index) pairs of ground-head rules whose
    output is already materialized; skipping them cannot change the
    fixpoint, only the work done.
    """
    out: set[Quad] = set()
    for rule in rules:
        if skip is not None and (rule.rule_id, rule.head_index) in skip:
            continue
        if rule.head.is_ground():
            # single possible output; one body match decides it
            for _ in match_patterns(qg, rule.body):
                out.add(instantiate_head(rule.head, {}))
                break
            continue
        for mu in match_patterns(qg, rule.body):
            out.add(instantiate_head(rule.head, mu))
    return out


@dataclass(frozen=True)
class Violation:
    """A constraint body grounded into the data."""

    rule_id: str
    binding: tuple[tuple[Variable, Constant], ...]

    @classmethod
    def from_mapping(cls, rule_id: str, mu: Substitution) -> "Violation":
        items = tuple(sorted(mu.items(), key=lambda kv: kv[0].name))
        return cls(rule_id, items)


def check_constraints(constraints: Iterable[BridgeRule],
                      qg: QuadGraph) -> list[Violation]:
    """Every grounding of an empty-head rule body is a violation."""
    found: list[Violation] = []
    for rule in constraints:
        if not rule.is_constraint:
            raise RuleError("rule %s is not a constraint" % rule.rule_id)
        for mu in match_patterns(qg, rule.body):
            found.append(Violation.from_mapping(rule.rule_id, mu))
    return found
