"""Shared spec texts, hand-built machines, and random-instance makers."""

from __future__ import annotations

import random

from gr1kit.abstraction import Fts
from gr1kit.solver import MooreCounterStrategy

from oracles import tree_text

# ---------------------------------------------------------------------------
# Spec texts.

REQUEST_GRANT = """\
ENV_VARS r c
SYS_VARS g v

SYS_RESPONSE R(r, g)
SYS_TRANS G((c | g) -> X(!g))
SYS_TRANS G(c -> !v)
SYS_LIVENESS GF(g & v)
"""

REQUEST_GRANT_GFNR = REQUEST_GRANT + "ENV_LIVENESS GF(!r)\n"

LIFT = """\
ENV_VARS b1 b2 b3
SYS_VARS f1 f2 f3

ENV_INIT !b1 & !b2 & !b3
ENV_TRANS G(b1 & f1 -> X(!b1))
ENV_TRANS G(b1 & !f1 -> X(b1))
ENV_TRANS G(b2 & f2 -> X(!b2))
ENV_TRANS G(b2 & !f2 -> X(b2))
ENV_TRANS G(b3 & f3 -> X(!b3))
ENV_TRANS G(b3 & !f3 -> X(b3))

SYS_INIT f1 & !f2 & !f3
SYS_TRANS G(f1 -> !f2 & !f3)
SYS_TRANS G(f2 -> !f1 & !f3)
SYS_TRANS G(f3 -> !f1 & !f2)
SYS_TRANS G(f1 -> X(f1 | f2))
SYS_TRANS G(f2 -> X(f1 | f2 | f3))
SYS_TRANS G(f3 -> X(f2 | f3))
SYS_TRANS G((f1 & X(f2)) | (f2 & X(f3)) -> b1 | b2 | b3)
SYS_LIVENESS GF(b1 -> f1)
SYS_LIVENESS GF(b2 -> f2)
SYS_LIVENESS GF(b3 -> f3)
"""

LIFT_STRICT = LIFT + """\
SYS_LIVENESS GF(f1)
SYS_LIVENESS GF(f2)
SYS_LIVENESS GF(f3)
"""


# ---------------------------------------------------------------------------
# Hand-built machines and graphs.


def four_state_machine() -> MooreCounterStrategy:
    """The published 4-state machine against REQUEST_GRANT_GFNR.

    Emits r and c high except in its third state where r goes low; the
    successor does not depend on the reply, so delta is total.
    """
    gamma = (0b11, 0b11, 0b10, 0b11)
    chain = {0: 1, 1: 2, 2: 3, 3: 1}
    delta = {}
    for q, q2 in chain.items():
        for y in range(1 << 3):  # g, v and one bookkeeping bit
            delta[(q, y)] = q2
    return MooreCounterStrategy(
        env_vars=("r", "c"),
        sys_vars=("g", "v"),
        gamma=gamma,
        delta=delta,
        initial=0,
    )


def chain_fts() -> Fts:
    """Four states in a cycle hanging off the initial state."""
    return Fts(4, 0, ((0, 1), (1, 2), (2, 3), (3, 1)))


def branching_fts() -> Fts:
    """Initial state branches to a two-cycle and to a self-loop."""
    return Fts(4, 0, ((0, 1), (0, 3), (1, 2), (2, 1), (3, 3)))


# ---------------------------------------------------------------------------
# Random instance makers.  All take an explicit random.Random.


def random_fts(rng: random.Random, max_states: int = 6) -> Fts:
    """A random graph where every state is reachable and none is stuck."""
    n = rng.randint(1, max_states)
    edges = set()
    for q in range(1, n):
        edges.add((rng.randrange(q), q))
    for q in range(n):
        if not any(a == q for a, _ in edges):
            edges.add((q, rng.randrange(n)))
    extra = rng.randint(0, n)
    for _ in range(extra):
        edges.add((rng.randrange(n), rng.randrange(n)))
    return Fts(n, 0, tuple(sorted(edges)))


def random_tree(rng: random.Random, names, depth: int, allow_next: bool):
    """A random boolean expression in the tuple form oracles evaluate."""
    if depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.1:
            return ("const", rng.random() < 0.5)
        marked = allow_next and rng.random() < 0.4
        return ("var", rng.choice(names), marked)
    op = rng.choice(["not", "and", "or", "imp", "iff"])
    if op == "not":
        return ("not", random_tree(rng, names, depth - 1, allow_next))
    return (
        op,
        random_tree(rng, names, depth - 1, allow_next),
        random_tree(rng, names, depth - 1, allow_next),
    )


def random_spec_text(rng: random.Random, max_vars: int = 2) -> str:
    """A small random spec: 1 to max_vars vars per side, a handful of parts.

    Environment transition constraints mark only environment variables,
    so the text always parses; realizability is left to chance.
    """
    n_env = rng.randint(1, max_vars)
    n_sys = rng.randint(1, max_vars)
    env = [f"e{k}" for k in range(n_env)]
    sys_ = [f"s{k}" for k in range(n_sys)]
    lines = ["ENV_VARS " + " ".join(env), "SYS_VARS " + " ".join(sys_)]

    def now_tree(names):
        return random_tree(rng, names, rng.randint(1, 2), allow_next=False)

    if rng.random() < 0.5:
        lines.append("ENV_INIT " + tree_text(now_tree(env)))
    if rng.random() < 0.5:
        lines.append("SYS_INIT " + tree_text(now_tree(env + sys_)))
    for _ in range(rng.randint(0, 2)):
        body = (
            "imp",
            now_tree(env + sys_),
            ("var", rng.choice(env), True),
        )
        lines.append(f"ENV_TRANS G({tree_text(body)})")
    for _ in range(rng.randint(0, 2)):
        body = (
            "imp",
            now_tree(env + sys_),
            ("var", rng.choice(sys_), True),
        )
        lines.append(f"SYS_TRANS G({tree_text(body)})")
    for _ in range(rng.randint(0, 1)):
        lines.append(f"ENV_LIVENESS GF({tree_text(now_tree(env))})")
    for _ in range(rng.randint(0, 2)):
        lines.append(f"SYS_LIVENESS GF({tree_text(now_tree(env + sys_))})")
    return "\n".join(lines) + "\n"
