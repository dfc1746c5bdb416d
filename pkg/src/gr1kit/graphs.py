"""Small graph helpers shared by the game solver and the miners."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence


def tarjan_sccs(
    nodes: Sequence[Hashable],
    successors: Callable[[Hashable], Iterable[Hashable]],
) -> list[list[Hashable]]:
    """Strongly connected components, iteratively, in Tarjan order."""
    index: dict[Hashable, int] = {}
    lowlink: dict[Hashable, int] = {}
    on_stack: set[Hashable] = set()
    stack: list[Hashable] = []
    sccs: list[list[Hashable]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = lowlink[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(successors(nxt))))
                    advanced = True
                    break
                if nxt in on_stack:
                    lowlink[node] = min(lowlink[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                sccs.append(comp)
    return sccs


def nontrivial_sccs(
    nodes: Sequence[Hashable],
    successors: Callable[[Hashable], Iterable[Hashable]],
) -> list[list[Hashable]]:
    """SCCs that contain at least one internal edge (size > 1 or self-loop)."""
    out = []
    for comp in tarjan_sccs(nodes, successors):
        if len(comp) > 1:
            out.append(comp)
        else:
            node = comp[0]
            if node in set(successors(node)):
                out.append(comp)
    return out


def reachable_from(
    start: Iterable[Hashable],
    successors: Callable[[Hashable], Iterable[Hashable]],
) -> set[Hashable]:
    seen = set(start)
    frontier = list(seen)
    while frontier:
        node = frontier.pop()
        for nxt in successors(node):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def has_cycle_from(
    start: Iterable[Hashable],
    successors: Callable[[Hashable], Iterable[Hashable]],
) -> bool:
    """True when some cycle is reachable from start."""
    reach = reachable_from(start, successors)
    return bool(nontrivial_sccs(list(reach), successors))
