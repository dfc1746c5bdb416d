"""Mining behaviour patterns from an abstracted counter-strategy graph.

Three pattern shapes are mined, each one holding on every infinite run
of the graph from its initial state:

  * Eventually(C):        every run visits some state in C
  * EventuallyAlways(C):  every run gets trapped inside C
  * EventuallyNext(C1, C2): every run takes a step from C1 into C2

Eventually-configurations are found by deletion testing: C is reported
when removing C (and its edges) leaves no cycle reachable from the
initial state.  Candidates are enumerated by growing size up to a bound
beta, skipping any superset of a configuration already found, so the
output is an antichain of minimal certificates.  EventuallyAlways uses
the union of states on cycles; EventuallyNext pairs each Eventually
configuration with the set of its direct successors.

The dummy sink added for trapped-system states never appears in mined
configurations: it stands for no real environment behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .abstraction import EdgeLabel, Fts, LabeledFts
from .graphs import has_cycle_from, nontrivial_sccs, reachable_from


@dataclass(frozen=True)
class Pattern:
    """One mined pattern; config2 is used by the next-step shape only."""

    kind: str  # "eventually" | "eventually_always" | "eventually_next"
    config: frozenset[int]
    config2: frozenset[int] | None = None

    def text(self) -> str:
        c1 = states_text(self.config)
        if self.kind == "eventually":
            return f"F({c1})"
        if self.kind == "eventually_always":
            return f"FG({c1})"
        return f"F(({c1}) & X({states_text(self.config2)}))"


def states_text(config: frozenset[int]) -> str:
    return " | ".join(f"q{i}" for i in sorted(config))


def default_beta(fts: Fts) -> int:
    """Bound on configuration size: the graph's maximum out-degree."""
    degrees = [fts.out_degree(q) for q in range(fts.n_states)]
    return max(degrees) if degrees else 1


def _mineable_states(fts: Fts) -> list[int]:
    out = [q for q in range(fts.n_states) if q != fts.initial]
    if fts.dummy is not None:
        out = [q for q in out if q != fts.dummy]
    return out


def _survives_without(fts: Fts, removed: frozenset[int]) -> bool:
    """True when a cycle is still reachable from the initial state."""
    if fts.initial in removed:
        return False

    def succ(q):
        return (j for i, j in fts.edges if i == q and j not in removed)

    return has_cycle_from([fts.initial], succ)


def eventually_patterns(fts: Fts, beta: int | None = None, stats=None) -> list[Pattern]:
    """Minimal certificates that every infinite run hits the set.

    The initial state is always reported first.  Enumeration goes by
    non-decreasing size, lexicographic within one size, so results are
    deterministic; discovered configurations prune their supersets.
    """
    if beta is None:
        beta = default_beta(fts)
    found: list[frozenset[int]] = []
    pool = _mineable_states(fts)
    checks = 0
    for size in range(1, beta + 1):
        for combo in combinations(pool, size):
            cand = frozenset(combo)
            if any(prev <= cand for prev in found):
                continue
            checks += 1
            if not _survives_without(fts, cand):
                found.append(cand)
    if stats is not None:
        stats["checks"] = checks
    patterns = [Pattern("eventually", frozenset([fts.initial]))]
    patterns.extend(Pattern("eventually", cand) for cand in found)
    return patterns


def cycle_states(fts: Fts) -> frozenset[int]:
    """States lying on some cycle (any nontrivial SCC member)."""

    def succ(q):
        return (j for i, j in fts.edges if i == q)

    members: set[int] = set()
    for comp in nontrivial_sccs(list(range(fts.n_states)), succ):
        members.update(comp)
    return frozenset(members)


def eventually_always_pattern(fts: Fts) -> Pattern | None:
    """The trap certificate, unless the dummy sink lies on a cycle."""
    qcycle = cycle_states(fts)
    if fts.dummy is not None and fts.dummy in qcycle:
        return None
    return Pattern("eventually_always", qcycle)


def next_states(fts: Fts, config: frozenset[int]) -> frozenset[int]:
    return frozenset(j for i, j in fts.edges if i in config)


def eventually_next_patterns(fts: Fts, beta: int | None = None) -> list[Pattern]:
    """Pair each Eventually certificate with its direct successor set."""
    out = []
    for pat in eventually_patterns(fts, beta):
        succ_set = next_states(fts, pat.config)
        if fts.dummy is not None and fts.dummy in succ_set:
            continue
        if not succ_set:
            continue
        out.append(Pattern("eventually_next", pat.config, succ_set))
    return out


@dataclass(frozen=True)
class PatternSet:
    eventually: tuple[Pattern, ...]
    eventually_always: Pattern | None
    eventually_next: tuple[Pattern, ...]


def generate_patterns(fts: Fts, beta: int | None = None) -> PatternSet:
    ev = eventually_patterns(fts, beta)
    nxt = []
    for pat in ev:
        succ_set = next_states(fts, pat.config)
        if fts.dummy is not None and fts.dummy in succ_set:
            continue
        if not succ_set:
            continue
        nxt.append(Pattern("eventually_next", pat.config, succ_set))
    return PatternSet(tuple(ev), eventually_always_pattern(fts), tuple(nxt))


def holds_on_all_runs(fts: Fts, pattern: Pattern) -> bool:
    """Decide whether every infinite run from the initial state fits.

    Eventually: removing the configuration must break every reachable
    cycle.  EventuallyAlways: every reachable cycle must sit inside the
    configuration.  EventuallyNext: removing the edges from config into
    config2 must break every reachable cycle.
    """

    def succ_all(q):
        return (j for i, j in fts.edges if i == q)

    if pattern.kind == "eventually":
        return not _survives_without(fts, pattern.config)
    if pattern.kind == "eventually_always":
        reach = reachable_from([fts.initial], succ_all)
        for comp in nontrivial_sccs(list(reach), succ_all):
            if not set(comp) <= pattern.config:
                return False
        return True
    if pattern.kind == "eventually_next":

        def succ_cut(q):
            return (
                j
                for i, j in fts.edges
                if i == q and not (i in pattern.config and j in pattern.config2)
            )

        return not has_cycle_from([fts.initial], succ_cut)
    msg = f"unknown pattern kind {pattern.kind!r}"
    raise ValueError(msg)


# ---------------------------------------------------------------------------
# Labeled patterns


@dataclass(frozen=True)
class LabeledPattern:
    """A pattern whose configurations carry reply constraints.

    disjuncts lists (state, label) pairs: the run must hit some listed
    state while the system replies consistently with that state's label.
    For the next-step shape, disjuncts constrains the step out of
    config, whose targets are config2.
    """

    kind: str
    disjuncts: tuple[tuple[int, EdgeLabel], ...]
    config2: frozenset[int] | None = None


def _outgoing_labeled(lfts: LabeledFts, config: frozenset[int]):
    out = []
    for (src, dst), label in sorted(
        lfts.labels.items(), key=lambda kv: kv[0]
    ):
        if src in config:
            out.append(((src, dst), label))
    return out


def labeled_patterns(lfts: LabeledFts, beta: int | None = None) -> list[LabeledPattern]:
    """Refine the plain patterns with the labels along their edges."""
    fts = lfts.fts
    pats = generate_patterns(fts, beta)
    out: list[LabeledPattern] = []
    for pat in pats.eventually:
        disj = tuple(
            (src, label) for (src, _), label in _outgoing_labeled(lfts, pat.config)
        )
        if disj:
            out.append(LabeledPattern("eventually", disj))
    if pats.eventually_always is not None:
        config = pats.eventually_always.config
        disj = tuple(
            (src, label) for (src, _), label in _outgoing_labeled(lfts, config)
        )
        if disj:
            out.append(LabeledPattern("eventually_always", disj))
    for pat in pats.eventually_next:
        disj = tuple(
            (src, label) for (src, _), label in _outgoing_labeled(lfts, pat.config)
        )
        if disj:
            out.append(
                LabeledPattern("eventually_next", disj, pat.config2)
            )
    return out
