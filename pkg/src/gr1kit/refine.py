"""Repairing an unrealizable spec by adding environment assumptions.

The search walks a tree whose root is the input spec.  At each
unrealizable node a counter-strategy is extracted, mined for patterns,
and the complements become candidate assumptions; each candidate spawns
a child node with a longer assumption conjunction.  Children found
consistent (the environment side stays satisfiable) and realizable are
reported as refinements.  A node's depth is the number of
counter-strategies along its path; expansion stops at depth alpha.

check_consistency decides satisfiability of the environment side plus
candidate assumptions by looking for a reachable fair loop in the
one-player graph over all variable valuations.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from .arena import compile_expr
from .candidates import Candidate, candidates_for
from .graphs import nontrivial_sccs, reachable_from
from .solver import solve_spec
from .specml import Gr1Spec, Gr1Part, PartKind, Player, format_part, has_next


def check_consistency(spec: Gr1Spec, extra_parts=()) -> bool:
    """Can any behaviour at all satisfy the environment side plus extras?

    Builds the one-player graph over full valuations: invariants filter
    states, next-marked constraints filter edges, and satisfiability is
    a reachable loop through every liveness set.  System variables are
    unconstrained here; they only matter where assumption bodies read
    them.
    """
    parts = list(spec.parts_of(Player.ENV, PartKind.INIT))
    parts += list(spec.parts_of(Player.ENV, PartKind.TRANS))
    parts += list(spec.parts_of(Player.ENV, PartKind.LIVENESS))
    for part in extra_parts:
        if part.player is not Player.ENV:
            msg = "consistency is about environment parts only"
            raise ValueError(msg)
        parts.append(part)

    env_vars = spec.env_vars
    n_env = len(env_vars)
    n_all = len(spec.all_vars)
    full_index = {n: i for i, n in enumerate(spec.all_vars)}
    env_index = {n: i for i, n in enumerate(env_vars)}
    env_mask = (1 << n_env) - 1

    init_fns = []
    inv_fns = []
    step_fns = []
    fair_fns = []
    for part in parts:
        if part.kind is PartKind.INIT:
            init_fns.append(compile_expr(part.body, env_index, None))
        elif part.kind is PartKind.LIVENESS:
            fair_fns.append(compile_expr(part.body, full_index, None))
        elif has_next(part.body):
            step_fns.append(compile_expr(part.body, full_index, env_index))
        else:
            inv_fns.append(compile_expr(part.body, env_index, None))

    def node_ok(v: int) -> bool:
        return all(f(v & env_mask, 0) for f in inv_fns)

    valuations = [v for v in range(1 << n_all) if node_ok(v)]
    ok = set(valuations)
    inits = [
        v
        for v in valuations
        if all(f(v & env_mask, 0) for f in init_fns)
    ]

    def succ(v: int):
        return (
            w
            for w in valuations
            if all(f(v, w & env_mask) for f in step_fns)
        )

    reach = reachable_from(inits, succ)
    for comp in nontrivial_sccs(sorted(reach), lambda v: (w for w in succ(v) if w in reach)):
        if all(any(f(v, 0) for v in comp) for f in fair_fns):
            return True
    return False


@dataclass
class NodeReport:
    """One processed search node, in processing order."""

    formulas: tuple[str, ...]
    depth: int
    consistent: bool
    realizable: bool | None
    counterstrategy_id: int | None
    candidates_generated: int | None
    wall_ms: float

    def to_dict(self) -> dict:
        return {
            "formulas": list(self.formulas),
            "depth": self.depth,
            "consistent": self.consistent,
            "realizable": self.realizable,
            "counterstrategy_id": self.counterstrategy_id,
            "candidates_generated": self.candidates_generated,
            "wall_ms": round(self.wall_ms, 3),
        }


@dataclass
class SearchReport:
    alpha: int
    mode: str
    subsets: dict
    nodes: list[NodeReport]
    refinements: list[list[str]]
    counterstrategies_processed: int
    candidates_generated: int
    inconsistent_nodes: int
    candidate_time_ms: float
    total_time_ms: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "mode": self.mode,
            "subsets": self.subsets,
            "nodes": [n.to_dict() for n in self.nodes],
            "refinements": self.refinements,
            "counterstrategies_processed": self.counterstrategies_processed,
            "candidates_generated": self.candidates_generated,
            "inconsistent_nodes": self.inconsistent_nodes,
            "candidate_time_ms": round(self.candidate_time_ms, 3),
            "total_time_ms": round(self.total_time_ms, 3),
        }


@dataclass
class RefinementSearchResult:
    refinements: list[tuple[Gr1Part, ...]]
    report: SearchReport


@dataclass
class _SearchNode:
    conjuncts: tuple[Candidate, ...]
    keys: frozenset
    depth: int


def refine_search(
    spec: Gr1Spec,
    alpha: int,
    beta: int | None = None,
    p_liveness=None,
    p_safety=None,
    p_trigger=None,
    p_target=None,
    mode: str = "first",
    state_limit: int | None = None,
) -> RefinementSearchResult:
    """Search for assumption conjunctions that make spec realizable.

    mode "first" stops at the first refinement in search order; "all"
    keeps going and returns every refinement within depth alpha.
    """
    if alpha < 1:
        msg = "alpha must be at least 1"
        raise ValueError(msg)
    if mode not in ("first", "all"):
        msg = f"unknown mode {mode!r}"
        raise ValueError(msg)

    subsets = {
        "liveness": list(p_liveness) if p_liveness is not None else None,
        "safety": list(p_safety) if p_safety is not None else None,
        "trigger": list(p_trigger) if p_trigger is not None else None,
        "target": list(p_target) if p_target is not None else None,
    }
    t_start = time.perf_counter()
    cand_time = 0.0
    cand_total = 0
    cs_count = 0
    inconsistent = 0
    nodes_report: list[NodeReport] = []
    refinements: list[tuple[Gr1Part, ...]] = []

    def mine(cs):
        nonlocal cand_time, cand_total, cs_count
        cs_count += 1
        t0 = time.perf_counter()
        cands = candidates_for(
            cs, p_liveness, p_safety, p_trigger, p_target, beta
        )
        cand_time += time.perf_counter() - t0
        cand_total += len(cands)
        return cands, cs_count

    t_node = time.perf_counter()
    root = solve_spec(spec, state_limit)
    if root.realizable:
        nodes_report.append(
            NodeReport(
                (), 0, True, True, None, None,
                (time.perf_counter() - t_node) * 1000,
            )
        )
        refinements.append(())
    else:
        cands, cs_id = mine(root.counter_strategy)
        nodes_report.append(
            NodeReport(
                (), 0, True, False, cs_id, len(cands),
                (time.perf_counter() - t_node) * 1000,
            )
        )
        queue: deque[_SearchNode] = deque()
        seen: set[frozenset] = set()
        for cand in cands:
            key = frozenset([cand.key])
            if key not in seen:
                seen.add(key)
                queue.append(_SearchNode((cand,), key, 1))

        while queue:
            node = queue.popleft()
            t_node = time.perf_counter()
            parts = tuple(c.part for c in node.conjuncts)
            formulas = tuple(c.formula for c in node.conjuncts)
            consistent = check_consistency(spec, parts)
            if not consistent:
                inconsistent += 1
                nodes_report.append(
                    NodeReport(
                        formulas, node.depth, False, None, None, None,
                        (time.perf_counter() - t_node) * 1000,
                    )
                )
                continue
            result = solve_spec(spec.with_extra_parts(parts), state_limit)
            if result.realizable:
                nodes_report.append(
                    NodeReport(
                        formulas, node.depth, True, True, None, None,
                        (time.perf_counter() - t_node) * 1000,
                    )
                )
                refinements.append(parts)
                if mode == "first":
                    break
                continue
            if node.depth < alpha:
                cands, cs_id = mine(result.counter_strategy)
                nodes_report.append(
                    NodeReport(
                        formulas, node.depth, True, False, cs_id, len(cands),
                        (time.perf_counter() - t_node) * 1000,
                    )
                )
                for cand in cands:
                    if cand.key in node.keys:
                        continue
                    new_keys = node.keys | {cand.key}
                    if new_keys in seen:
                        continue
                    seen.add(new_keys)
                    queue.append(
                        _SearchNode(
                            node.conjuncts + (cand,), new_keys, node.depth + 1
                        )
                    )
            else:
                nodes_report.append(
                    NodeReport(
                        formulas, node.depth, True, False, None, None,
                        (time.perf_counter() - t_node) * 1000,
                    )
                )

    report = SearchReport(
        alpha=alpha,
        mode=mode,
        subsets=subsets,
        nodes=nodes_report,
        refinements=[
            [format_part(p) for p in parts] for parts in refinements
        ],
        counterstrategies_processed=cs_count,
        candidates_generated=cand_total,
        inconsistent_nodes=inconsistent,
        candidate_time_ms=cand_time * 1000,
        total_time_ms=(time.perf_counter() - t_start) * 1000,
    )
    return RefinementSearchResult(refinements, report)
