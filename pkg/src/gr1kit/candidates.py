"""Turning mined patterns into candidate environment assumptions.

A pattern describes what the counter-strategy inevitably does; ruling
that behaviour out gives an assumption under which the counter-strategy
dies.  Each pattern shape complements into one assumption shape:

  * Eventually(C)          ->  an invariant forbidding C's predicates
  * EventuallyAlways(C)    ->  a liveness assumption leaving C's
                               predicates infinitely often
  * EventuallyNext(C1,C2)  ->  a transition rule: after C1's
                               predicates, never step into C2's

Before complementing, each state predicate is projected onto a chosen
subset of the environment variables (one subset per assumption shape's
position), which generalizes the assumption beyond the exact inputs the
counter-strategy used.  A shape whose subset is empty is skipped: its
projection says nothing.  Results are deduplicated syntactically and
returned in a deterministic order: liveness, then invariants, then
transition rules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abstraction import StatePredicate, abstract_fts
from .errors import ScopeError
from .patterns import Pattern, PatternSet, generate_patterns
from .solver import MooreCounterStrategy
from .specml import (
    FALSE,
    TRUE,
    BoolExpr,
    Gr1Part,
    Implies,
    Not,
    Or,
    PartKind,
    Player,
    Ref,
    conj,
    disj,
    format_part,
    mark_next,
)

Literal = tuple[int, bool]


@dataclass(frozen=True)
class SimplifiedCnf:
    """(OR common) | (AND clauses); collapsed=True means the AND is false."""

    common: tuple[Literal, ...]
    clauses: tuple[tuple[Literal, ...], ...]
    collapsed: bool


def simplify_cnf(raw_clauses) -> SimplifiedCnf:
    """Simplify a conjunction of literal clauses to a fixpoint.

    Rules applied until stable: duplicate clauses merge; a clause that
    becomes empty collapses the conjunction to false; two complementary
    single-literal clauses collapse it to false; literals shared by all
    clauses factor out of the conjunction.
    """
    clauses: list[frozenset[Literal]] = []
    for c in raw_clauses:
        fs = frozenset(c)
        if fs not in clauses:
            clauses.append(fs)
    common: set[Literal] = set()
    collapsed = False
    while True:
        deduped: list[frozenset[Literal]] = []
        for c in clauses:
            if c not in deduped:
                deduped.append(c)
        clauses = deduped
        if any(not c for c in clauses):
            collapsed = True
            clauses = []
            break
        singles = {next(iter(c)) for c in clauses if len(c) == 1}
        if any((var, not pos) in singles for var, pos in singles):
            collapsed = True
            clauses = []
            break
        if not clauses:
            break
        shared = set(clauses[0])
        for c in clauses[1:]:
            shared &= c
        if not shared:
            break
        common |= shared
        clauses = [c - shared for c in clauses]
    return SimplifiedCnf(
        tuple(sorted(common)),
        tuple(sorted(tuple(sorted(c)) for c in clauses)),
        collapsed,
    )


def _literal_expr(lit: Literal, env_vars) -> BoolExpr:
    var, pos = lit
    ref = Ref(env_vars[var])
    return ref if pos else Not(ref)


def cnf_expr(s: SimplifiedCnf, env_vars) -> BoolExpr:
    common = disj(_literal_expr(l, env_vars) for l in s.common)
    if s.collapsed:
        return common if s.common else FALSE
    if not s.clauses:
        return common if s.common else TRUE
    cnf = conj(
        disj(_literal_expr(l, env_vars) for l in clause)
        for clause in s.clauses
    )
    if s.common:
        return Or(common, cnf)
    return cnf


@dataclass(frozen=True)
class Candidate:
    """One candidate environment assumption with its provenance."""

    kind: str  # "liveness" | "safety" | "transition"
    part: Gr1Part
    key: tuple
    source: Pattern

    @property
    def formula(self) -> str:
        return format_part(self.part)


def _project(pred: StatePredicate, subset: tuple[int, ...]) -> tuple[Literal, ...]:
    return tuple((i, bool(pred.value & (1 << i))) for i in subset)


def _subset_indexes(env_vars, names) -> tuple[int, ...]:
    if names is None:
        return tuple(range(len(env_vars)))
    index = {n: i for i, n in enumerate(env_vars)}
    out = []
    for name in names:
        if name not in index:
            msg = f"{name!r} is not an environment variable"
            raise ScopeError(msg)
        out.append(index[name])
    return tuple(sorted(set(out)))


def generate_candidates(
    pattern_set: PatternSet,
    predicates: dict[int, StatePredicate],
    env_vars: tuple[str, ...],
    p_liveness=None,
    p_safety=None,
    p_trigger=None,
    p_target=None,
) -> list[Candidate]:
    """Complement the mined patterns into assumption parts.

    The four subsets pick environment variables for, in order: liveness
    bodies, invariant bodies, transition triggers, transition targets.
    None means all environment variables.
    """
    p1 = _subset_indexes(env_vars, p_liveness)
    p2 = _subset_indexes(env_vars, p_safety)
    p3 = _subset_indexes(env_vars, p_trigger)
    p4 = _subset_indexes(env_vars, p_target)

    out: list[Candidate] = []
    seen: set[tuple] = set()

    def emit(cand: Candidate):
        if cand.key not in seen:
            seen.add(cand.key)
            out.append(cand)

    if pattern_set.eventually_always is not None and p1:
        pat = pattern_set.eventually_always
        negated = [
            [(v, not pos) for v, pos in _project(predicates[q], p1)]
            for q in sorted(pat.config)
        ]
        body = simplify_cnf(negated)
        part = Gr1Part(Player.ENV, PartKind.LIVENESS, cnf_expr(body, env_vars))
        emit(Candidate("liveness", part, ("liveness", body), pat))

    if p2:
        for pat in pattern_set.eventually:
            negated = [
                [(v, not pos) for v, pos in _project(predicates[q], p2)]
                for q in sorted(pat.config)
            ]
            body = simplify_cnf(negated)
            part = Gr1Part(Player.ENV, PartKind.TRANS, cnf_expr(body, env_vars))
            emit(Candidate("safety", part, ("safety", body), pat))

    if p3 and p4:
        for pat in pattern_set.eventually_next:
            terms = sorted(
                {_project(predicates[q], p3) for q in pat.config}
            )
            ante = disj(
                conj(_literal_expr(l, env_vars) for l in term)
                for term in terms
            )
            negated = [
                [(v, not pos) for v, pos in _project(predicates[q], p4)]
                for q in sorted(pat.config2)
            ]
            body = simplify_cnf(negated)
            cons = mark_next(cnf_expr(body, env_vars))
            part = Gr1Part(
                Player.ENV, PartKind.TRANS, Implies(ante, cons)
            )
            emit(
                Candidate(
                    "transition",
                    part,
                    ("transition", tuple(terms), body),
                    pat,
                )
            )
    return out


def candidates_for(
    cs: MooreCounterStrategy,
    p_liveness=None,
    p_safety=None,
    p_trigger=None,
    p_target=None,
    beta: int | None = None,
) -> list[Candidate]:
    """Abstract a counter-strategy, mine it, and complement the patterns."""
    fts, predicates = abstract_fts(cs)
    pattern_set = generate_patterns(fts, beta)
    return generate_candidates(
        pattern_set,
        predicates,
        cs.env_vars,
        p_liveness,
        p_safety,
        p_trigger,
        p_target,
    )
