"""The distributed skolem chase: iterated local closure + rule application.

Iteration 0 is the local closure of the input quads.  Each later
iteration applies the non-generating rules if they derive anything new,
otherwise the generating rules, then closes locally again; a generating
iteration that derives nothing is the fixpoint and ends the run.  This
all-of-R-at-once schedule is what makes the saturation bounds hold: a
context-acyclic system finishes within max-level + 1 generating
iterations (the last one vacuous), never more than its context count.

Constraints (empty-head rules) are checked after every iteration's
closure; the first violation stops the run with an inconsistent status.
Non-context-acyclic systems are refused unless a budget (iteration or
quad cap) or the force flag makes the possible divergence explicit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .contextgraph import (
    LevelMap,
    build_dependency_graph,
    compute_levels,
    is_context_acyclic,
)
from .engine import (
    QuadSystem,
    SkolemRule,
    Violation,
    check_constraints,
    derive,
    instantiate_head,
    skolemize_all,
)
from .semantics import SIMPLE, LocalSemantics, lclosure_quadgraph
from .terms import Constant, QuadGraph

COMPLETE = "complete"
BUDGET_EXHAUSTED = "budget-exhausted"
INCONSISTENT = "inconsistent"

NON_GENERATING = "non-generating"
GENERATING = "generating"


class BudgetRequiredError(ValueError):
    """Non-context-acyclic input without a budget or force flag."""

    def __init__(self, witness_text: str) -> None:
        self.witness_text = witness_text
        super().__init__(
            "quad-system is not context acyclic (witness cycle %s); "
            "set an iteration or quad budget, or force an unrestricted run"
            % witness_text)


class ScheduleInvariantError(RuntimeError):
    """A proven bound failed at runtime; indicates an engine bug."""


@dataclass
class ChaseConfig:
    semantics: LocalSemantics = field(default_factory=lambda: SIMPLE)
    max_iterations: Optional[int] = None
    max_quads: Optional[int] = None
    force_unrestricted: bool = False
    record_log: bool = False
    jobs: int = 1

    def has_budget(self) -> bool:
        return self.max_iterations is not None or self.max_quads is not None


@dataclass(frozen=True)
class IterationRecord:
    index: int
    kind: str
    new_quads: int
    cumulative: int
    per_context: Optional[dict[Constant, int]]


@dataclass
class ChaseResult:
    quads: QuadGraph
    status: str
    iteration_log: tuple[IterationRecord, ...]
    generating_iterations: int
    violations: list[Violation]

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE


def _derive(rules: list[SkolemRule], qg: QuadGraph,
            skip: set[tuple[str, int]], jobs: int) -> set:
    if jobs <= 1 or len(rules) <= 1:
        return derive(rules, qg, skip)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(lambda r: derive([r], qg, skip), rules)
        out: set = set()
        for part in parts:
            out |= part
        return out


def run_chase(system: QuadSystem,
              config: Optional[ChaseConfig] = None) -> ChaseResult:
    """Materialize the chase of a quad-system under the given config."""
    cfg = config or ChaseConfig()
    graph = build_dependency_graph(system)
    verdict = is_context_acyclic(graph)
    if not verdict.acyclic and not cfg.has_budget() \
            and not cfg.force_unrestricted:
        raise BudgetRequiredError(verdict.witness_text())
    levels: Optional[LevelMap] = None
    if verdict.acyclic:
        levels = compute_levels(graph)

    non_gen, gen, constraints = skolemize_all(system.rules)
    ground_heads = [((r.rule_id, r.head_index), instantiate_head(r.head, {}))
                    for r in non_gen + gen if r.head.is_ground()]
    fired: set[tuple[str, int]] = set()

    current = lclosure_quadgraph(system.quads, cfg.semantics)
    log: list[IterationRecord] = []
    gen_count = 0

    violations = check_constraints(constraints, current)
    if violations:
        return ChaseResult(current, INCONSISTENT, tuple(log), 0, violations)

    status = COMPLETE
    index = 0
    while True:
        if cfg.max_iterations is not None and index >= cfg.max_iterations:
            status = BUDGET_EXHAUSTED
            break
        index += 1
        derived = _derive(non_gen, current, fired, cfg.jobs)
        new = derived - current.quads
        kind = NON_GENERATING
        if not new:
            kind = GENERATING
            gen_count += 1
            derived = _derive(gen, current, fired, cfg.jobs)
            new = derived - current.quads
            if not new:
                log.append(IterationRecord(
                    index, kind, 0, len(current),
                    {} if cfg.record_log else None))
                status = COMPLETE
                break
        touched = {q.ctx for q in new}
        updated = lclosure_quadgraph(current.union(new), cfg.semantics,
                                     touched=touched)
        added = updated.quads - current.quads
        current = updated
        for key, quad in ground_heads:
            if key not in fired and quad in current.quads:
                fired.add(key)
        per_ctx: Optional[dict[Constant, int]] = None
        if cfg.record_log:
            per_ctx = {}
            for q in added:
                per_ctx[q.ctx] = per_ctx.get(q.ctx, 0) + 1
        log.append(IterationRecord(index, kind, len(added),
                                   len(current), per_ctx))
        violations = check_constraints(constraints, current)
        if violations:
            status = INCONSISTENT
            break
        if cfg.max_quads is not None and len(current) > cfg.max_quads:
            status = BUDGET_EXHAUSTED
            break

    result = ChaseResult(current, status, tuple(log), gen_count, violations)
    if status == COMPLETE and levels is not None:
        bound = levels.max_level + 1
        n_contexts = len(system.contexts()) or 1
        if gen_count > bound or gen_count > n_contexts:
            raise ScheduleInvariantError(
                "complete acyclic run used %d generating iterations; "
                "bound is min(max level + 1 = %d, contexts = %d)"
                % (gen_count, bound, n_contexts))
    return result


def entailment_closure_check(result: ChaseResult,
                             system: QuadSystem) -> bool:
    """True iff the chase output satisfies every rule operationally:
    each body grounding's head instance is already present."""
    if not result.complete:
        raise ValueError("closure check needs a complete chase")
    non_gen, gen, _ = skolemize_all(system.rules)
    derived = derive(non_gen + gen, result.quads)
    return derived <= result.quads.quads


@dataclass
class SaturationReport:
    """Earliest iteration after which each context stopped growing,
    checked against the level schedule (level-k contexts must be
    saturated before the (k+1)-th generating iteration)."""

    saturation: dict[Constant, int]
    generating_indices: list[int]
    schedule_ok: bool
    problems: list[str]


def saturation_report(result: ChaseResult,
                      levels: LevelMap) -> SaturationReport:
    if not result.complete:
        raise ValueError("saturation report needs a complete chase")
    for rec in result.iteration_log:
        if rec.per_context is None:
            raise ValueError("saturation report needs a chase run with "
                             "record_log enabled")
    last_add: dict[Constant, int] = {c: 0 for c in levels.levels}
    for c in result.quads.contexts():
        last_add.setdefault(c, 0)
    for rec in result.iteration_log:
        for ctx, count in (rec.per_context or {}).items():
            if count > 0:
                last_add[ctx] = max(last_add.get(ctx, 0), rec.index)
    gen_indices = [rec.index for rec in result.iteration_log
                   if rec.kind == GENERATING]
    problems: list[str] = []
    for ctx, level in levels.levels.items():
        if level < len(gen_indices):
            deadline = gen_indices[level]  # (level+1)-th generating index
            if last_add.get(ctx, 0) >= deadline:
                problems.append(
                    "level-%d context %s still grew at iteration %d, on or "
                    "after generating iteration #%d (index %d)"
                    % (level, ctx.lexical, last_add[ctx],
                       level + 1, deadline))
    return SaturationReport(last_add, gen_indices, not problems, problems)
