"""Abstraction of a counter-strategy into a finite transition system.

The machine's states become graph states one for one and its input
choices become the predicates: state q is labeled with the full
conjunction of environment literals fixed by gamma(q).  Machine states
with no reply at all (the system was trapped) get their outgoing
behaviour completed with a fresh dummy sink so that every run is
infinite; the dummy carries no predicate and the miners know to keep it
out of their output.

label_edges additionally tags each edge with the system literals shared
by every reply that takes that edge, so mined patterns can condition on
how the system answered.
"""

from __future__ import annotations

from dataclasses import dataclass

from .solver import MooreCounterStrategy


@dataclass(frozen=True)
class Fts:
    """Finite graph with a distinguished initial state.

    States are 0..n_states-1.  dummy is the index of the added sink
    state, or None when the machine was complete already.
    """

    n_states: int
    initial: int
    edges: tuple[tuple[int, int], ...]
    dummy: int | None = None

    def successors(self, q: int) -> list[int]:
        return [j for i, j in self.edges if i == q]

    def out_degree(self, q: int) -> int:
        return sum(1 for i, _ in self.edges if i == q)


@dataclass(frozen=True)
class StatePredicate:
    """Conjunction of environment literals: vars[i] holds iff bit i of value."""

    env_vars: tuple[str, ...]
    value: int

    def literals(self) -> tuple[tuple[str, bool], ...]:
        return tuple(
            (name, bool(self.value & (1 << i)))
            for i, name in enumerate(self.env_vars)
        )

    def text(self) -> str:
        terms = [
            name if positive else "!" + name
            for name, positive in self.literals()
        ]
        return " & ".join(terms) if terms else "TRUE"


@dataclass(frozen=True)
class EdgeLabel:
    """System literals common to every reply along an edge.

    mask selects the constrained variables, bits their shared values.
    An all-zero mask is the empty conjunction, i.e. no constraint.
    """

    sys_vars: tuple[str, ...]
    mask: int
    bits: int

    def literals(self) -> tuple[tuple[str, bool], ...]:
        return tuple(
            (name, bool(self.bits & (1 << i)))
            for i, name in enumerate(self.sys_vars)
            if self.mask & (1 << i)
        )

    def text(self) -> str:
        terms = [
            name if positive else "!" + name
            for name, positive in self.literals()
        ]
        return " & ".join(terms) if terms else "TRUE"


@dataclass(frozen=True)
class LabeledFts:
    fts: Fts
    predicates: dict[int, StatePredicate]
    labels: dict[tuple[int, int], EdgeLabel]


def abstract_fts(cs: MooreCounterStrategy) -> tuple[Fts, dict[int, StatePredicate]]:
    """Project the machine onto its state graph and input predicates."""
    n = cs.n_states
    edges = set(cs.graph_edges())
    sources = {i for i, _ in cs.delta}
    terminals = [q for q in range(n) if q not in sources]
    dummy = None
    if terminals:
        dummy = n
        n += 1
        for q in terminals:
            edges.add((q, dummy))
        edges.add((dummy, dummy))
    predicates = {
        q: StatePredicate(cs.env_vars, cs.gamma[q]) for q in range(cs.n_states)
    }
    fts = Fts(n, cs.initial, tuple(sorted(edges)), dummy)
    return fts, predicates


def label_edges(cs: MooreCounterStrategy) -> LabeledFts:
    """Abstract the machine and tag edges with shared reply literals."""
    fts, predicates = abstract_fts(cs)
    full = (1 << len(cs.sys_vars)) - 1
    acc: dict[tuple[int, int], tuple[int, int]] = {}
    for (src, y), dst in cs.delta.items():
        key = (src, dst)
        if key not in acc:
            acc[key] = (full, y)
        else:
            mask, bits = acc[key]
            mask &= ~(bits ^ y) & full
            acc[key] = (mask, bits & mask | (y & mask))
    labels = {}
    for key, (mask, bits) in acc.items():
        labels[key] = EdgeLabel(cs.sys_vars, mask, bits & mask)
    if fts.dummy is not None:
        for src, dst in fts.edges:
            if dst == fts.dummy or src == fts.dummy:
                labels[(src, dst)] = EdgeLabel(cs.sys_vars, 0, 0)
    return LabeledFts(fts, predicates, labels)
