"""Game solving: who wins, and a finite-state strategy for the winner.

The spec is read as an implication between environment and system
behaviour.  On the arena this becomes a two-player game with strict
alternation: the environment proposes the next input, the system
completes it with an output.  A player with no legal move loses at that
point.  On infinite plays the system wins when the environment misses
one of its liveness sets or the system hits all of its own.

solve_realizability computes the system's winning region with the
three-level fixpoint over controllable predecessors and, depending on
who wins from the initial valuations, extracts either a Mealy strategy
for the system or a Moore counter-strategy for the environment.  Both
machines are checked here too, by independent graph walks over the
product with the spec.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import specml
from .arena import Arena, build_arena, compile_expr
from .errors import NotEnvironmentWinning
from .graphs import nontrivial_sccs
from .specml import Gr1Spec, PartKind, Player


# ---------------------------------------------------------------------------
# Predecessor operators


def sys_pre(arena: Arena, target: frozenset[int]) -> frozenset[int]:
    """States where every env move has a completion landing in target.

    A state where the environment is stuck qualifies vacuously.
    """
    out = set()
    for s in arena.states:
        for i in arena.env_moves(s):
            if not any(t in target for t in arena.successors(s, i)):
                break
        else:
            out.add(s)
    return frozenset(out)


def env_pre(arena: Arena, target: frozenset[int]) -> frozenset[int]:
    """States with an env move whose completions all land in target.

    A move the system cannot complete counts: it wins for the
    environment outright, so it forces any target vacuously.
    """
    out = set()
    for s in arena.states:
        for i in arena.env_moves(s):
            if all(t in target for t in arena.successors(s, i)):
                out.add(s)
                break
    return frozenset(out)


# ---------------------------------------------------------------------------
# System-side fixpoint


@dataclass
class SystemFixpoint:
    """Winning region plus the iterates strategy extraction needs.

    y_iterates[j] is the ascending chain for system goal j, starting at
    the empty set and ending at z.  x_sets[j][r-1][i] is the avoidance
    region computed while building iterate r, for environment goal i.
    """

    z: frozenset[int]
    sys_goals: list[frozenset[int]]
    env_goals: list[frozenset[int]]
    y_iterates: list[list[frozenset[int]]]
    x_sets: list[list[list[frozenset[int]]]]


def _mu_y(arena, all_states, z, goal, env_goals):
    """Inner two levels for one system goal, with iterates retained."""
    core = goal & sys_pre(arena, z)
    y = frozenset()
    iterates = [y]
    x_per_rank = []
    while True:
        base = core | sys_pre(arena, y)
        xs = []
        y_next = frozenset()
        for agoal in env_goals:
            avoid = all_states - agoal
            x = all_states
            while True:
                x_new = base | (avoid & sys_pre(arena, x))
                if x_new == x:
                    break
                x = x_new
            xs.append(x)
            y_next = y_next | x
        if y_next == y:
            break
        y = y_next
        iterates.append(y)
        x_per_rank.append(xs)
    return y, iterates, x_per_rank


def solve_system(arena: Arena) -> SystemFixpoint:
    all_states = frozenset(arena.states)
    sys_goals = list(arena.sys_fair) or [all_states]
    env_goals = list(arena.env_fair) or [all_states]

    z = all_states
    while True:
        before = z
        for goal in sys_goals:
            z, _, _ = _mu_y(arena, all_states, z, goal, env_goals)
        if z == before:
            break

    y_iterates = []
    x_sets = []
    for goal in sys_goals:
        y, iterates, xs = _mu_y(arena, all_states, z, goal, env_goals)
        assert y == z, "fixpoint not stable under its own goals"
        y_iterates.append(iterates)
        x_sets.append(xs)
    return SystemFixpoint(z, sys_goals, env_goals, y_iterates, x_sets)


# ---------------------------------------------------------------------------
# Environment-side fixpoint


@dataclass
class EnvFixpoint:
    """Environment winning region with the data its strategy needs.

    The region is the complement of the system one, computed as its
    literal dual: w = mu Z. OR_j nu Y. AND_i mu X. [(notJ_j | EPre(Z))
    & EPre(Y) & (A_i | EPre(X))].  z_iterates is the outer chain from
    the empty set up to w.  ybar[m-1][j] is the level-m trap for system
    goal j: from there the environment keeps the play off goal j, or
    escapes down to level m-1, while hitting each of its own goals.
    xbar[m-1][j][i] is the inner chain chasing environment goal i
    inside that trap.
    """

    w: frozenset[int]
    sys_goals: list[frozenset[int]]
    env_goals: list[frozenset[int]]
    z_iterates: list[frozenset[int]]
    ybar: list[list[frozenset[int]]]
    xbar: list[list[list[list[frozenset[int]]]]]


def _mu_xbar(arena, base, agoal):
    x = frozenset()
    chain = [x]
    while True:
        x_new = base & (agoal | env_pre(arena, x))
        if x_new == x:
            break
        x = x_new
        chain.append(x)
    return x, chain


def _trap(arena, all_states, notj_or_escape, env_goals):
    y = all_states
    while True:
        base = notj_or_escape & env_pre(arena, y)
        y_new = all_states
        for agoal in env_goals:
            x, _ = _mu_xbar(arena, base, agoal)
            y_new = y_new & x
        if y_new == y:
            break
        y = y_new
    base = notj_or_escape & env_pre(arena, y)
    chains = []
    for agoal in env_goals:
        x, chain = _mu_xbar(arena, base, agoal)
        assert x == y or x >= y, "trap not stable under its own chases"
        chains.append(chain)
    return y, chains


def solve_env(arena: Arena, sys_goals, env_goals) -> EnvFixpoint:
    all_states = frozenset(arena.states)
    z = frozenset()
    z_iterates = [z]
    ybar: list[list[frozenset[int]]] = []
    xbar: list[list[list[list[frozenset[int]]]]] = []
    while True:
        escape = env_pre(arena, z)
        ybar_m = []
        xbar_m = []
        z_next = z
        for goal in sys_goals:
            notj_or_escape = (all_states - goal) | escape
            y, chains = _trap(arena, all_states, notj_or_escape, env_goals)
            ybar_m.append(y)
            xbar_m.append(chains)
            z_next = z_next | y
        if z_next == z:
            break
        z = z_next
        z_iterates.append(z)
        ybar.append(ybar_m)
        xbar.append(xbar_m)
    return EnvFixpoint(
        w=z,
        sys_goals=sys_goals,
        env_goals=env_goals,
        z_iterates=z_iterates,
        ybar=ybar,
        xbar=xbar,
    )


# ---------------------------------------------------------------------------
# Strategy machines


@dataclass
class MealyStrategy:
    """System winning strategy: reads the next input, emits an output.

    States carry the arena valuation just produced and the index of the
    system goal currently pursued.  initial maps each legal first input
    to its chosen first output and start state.
    """

    env_vars: tuple[str, ...]
    sys_vars: tuple[str, ...]
    valuations: tuple[int, ...]
    goals: tuple[int, ...]
    initial: dict[int, tuple[int, int]]
    trans: dict[tuple[int, int], tuple[int, int]]

    @property
    def n_states(self) -> int:
        return len(self.valuations)


@dataclass
class MooreCounterStrategy:
    """Environment strategy: emits the next input before seeing a reply.

    gamma[q] is the input valuation emitted at machine state q.  delta
    is defined for exactly the replies the spec leaves legal; a state
    with no outgoing entries has trapped the system in a dead end.
    """

    env_vars: tuple[str, ...]
    sys_vars: tuple[str, ...]
    gamma: tuple[int, ...]
    delta: dict[tuple[int, int], int]
    initial: int = 0

    @property
    def n_states(self) -> int:
        return len(self.gamma)

    def graph_edges(self) -> list[tuple[int, int]]:
        return sorted({(src, dst) for (src, _), dst in self.delta.items()})


def _rank_of(iterates, state) -> int:
    for r, layer in enumerate(iterates):
        if state in layer:
            return r
    msg = "state outside every iterate"
    raise AssertionError(msg)


def _min_completion(arena, state, env_next, target):
    for o in arena.sys_moves(state, env_next):
        if (env_next | (o << arena.n_env)) in target:
            return o
    return None


def _completions_into(arena, state, target):
    """All-legal-inputs rule: every env move needs a reply inside target."""
    picks = {}
    for i in arena.env_moves(state):
        o = _min_completion(arena, state, i, target)
        if o is None:
            return None
        picks[i] = o
    return picks


def extract_strategy(arena: Arena, fix: SystemFixpoint) -> MealyStrategy:
    """Build the system's Mealy machine from the retained iterates."""
    n_goals = len(fix.sys_goals)
    yrank = [
        {s: _rank_of(iters, s) for s in fix.z} for iters in fix.y_iterates
    ]

    def decide(state: int, j: int):
        """Pick replies for every legal input at (state, goal j)."""
        if state in fix.sys_goals[j]:
            picks = _completions_into(arena, state, fix.z)
            if picks is not None:
                return picks, (j + 1) % n_goals
        r = yrank[j][state]
        if r >= 1:
            picks = _completions_into(arena, state, fix.y_iterates[j][r - 1])
            if picks is not None:
                return picks, j
        for i, agoal in enumerate(fix.env_goals):
            if state in agoal:
                continue
            picks = _completions_into(arena, state, fix.x_sets[j][r - 1][i])
            if picks is not None:
                return picks, j
        msg = "no applicable extraction rule; fixpoint data inconsistent"
        raise AssertionError(msg)

    ids: dict[tuple[int, int], int] = {}
    valuations: list[int] = []
    goals: list[int] = []
    order: list[tuple[int, int]] = []

    def intern(state: int, j: int) -> int:
        key = (state, j)
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
            valuations.append(state)
            goals.append(j)
        return ids[key]

    initial: dict[int, tuple[int, int]] = {}
    for i0 in arena.init_env_choices:
        o0 = None
        for v in arena.init_completions[i0]:
            if v in fix.z:
                o0 = arena.sys_part(v)
                break
        if o0 is None:
            msg = "system does not win from every initial input"
            raise ValueError(msg)
        v0 = arena.pack(i0, o0)
        initial[i0] = (o0, intern(v0, 0))

    trans: dict[tuple[int, int], tuple[int, int]] = {}
    cursor = 0
    while cursor < len(order):
        state, j = order[cursor]
        sid = ids[(state, j)]
        cursor += 1
        picks, j_next = decide(state, j)
        for i, o in sorted(picks.items()):
            nid = intern(arena.pack(i, o), j_next)
            trans[(sid, i)] = (o, nid)

    return MealyStrategy(
        env_vars=arena.env_vars,
        sys_vars=arena.sys_vars,
        valuations=tuple(valuations),
        goals=tuple(goals),
        initial=initial,
        trans=trans,
    )


def extract_counterstrategy(arena: Arena, fix: EnvFixpoint) -> MooreCounterStrategy:
    """Build the environment's Moore machine from the retained iterates.

    Memory is (m, j, i): trap level, the system goal being starved, and
    the environment goal currently chased; None means the phase is
    recomputed from the ranks of the next valuation.  Inside a phase the
    inputs force the play down the chase chain, rotating i at each hit
    of an environment goal; a valuation satisfying the starved goal
    forces an escape to the next lower level, which only happens
    finitely often, so some system goal is eventually starved for good.
    """
    m_env = len(fix.env_goals)
    zrank = {s: _rank_of(fix.z_iterates, s) for s in fix.w}

    def forcing_moves(state, target):
        return [
            i
            for i in arena.env_moves(state)
            if all(t in target for t in arena.successors(state, i))
        ]

    def decide(state, mem):
        """Choose the next input and memory from an env-winning state."""
        if mem is None:
            m = zrank[state]
            j = next(
                j
                for j, trap in enumerate(fix.ybar[m - 1])
                if state in trap
            )
            mem = (m, j, 0)
        m, j, i = mem
        if state in fix.sys_goals[j]:
            moves = forcing_moves(state, fix.z_iterates[m - 1])
            return max(moves), None
        if state in fix.env_goals[i]:
            moves = forcing_moves(state, fix.ybar[m - 1][j])
            return max(moves), (m, j, (i + 1) % m_env)
        chain = fix.xbar[m - 1][j][i]
        r = _rank_of(chain, state)
        moves = forcing_moves(state, chain[r - 1])
        return max(moves), (m, j, i)

    winning0 = [
        i0
        for i0 in arena.init_env_choices
        if all(v in fix.w for v in arena.init_completions[i0])
    ]
    if not winning0:
        msg = "environment does not win from any initial input"
        raise NotEnvironmentWinning(msg)
    i_start = max(winning0)

    ids: dict[tuple, int] = {}
    order: list[tuple] = []
    gamma: list[int] = []

    def intern(prev, i_cur, mem) -> int:
        key = (prev, i_cur, mem)
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
            gamma.append(i_cur)
        return ids[key]

    intern(None, i_start, None)
    delta: dict[tuple[int, int], int] = {}
    cursor = 0
    while cursor < len(order):
        prev, i_cur, mem = order[cursor]
        sid = ids[(prev, i_cur, mem)]
        cursor += 1
        if prev is None:
            replies = [arena.sys_part(v) for v in arena.init_completions[i_cur]]
        else:
            replies = list(arena.sys_moves(prev, i_cur))
        for y in replies:
            v = arena.pack(i_cur, y)
            i_next, mem_next = decide(v, mem)
            delta[(sid, y)] = intern(v, i_next, mem_next)

    return MooreCounterStrategy(
        env_vars=arena.env_vars,
        sys_vars=arena.sys_vars,
        gamma=tuple(gamma),
        delta=delta,
        initial=0,
    )


# ---------------------------------------------------------------------------
# Top level


@dataclass
class RealizabilityResult:
    realizable: bool
    vacuous: bool
    strategy: MealyStrategy | None
    counter_strategy: MooreCounterStrategy | None
    system_fixpoint: SystemFixpoint | None
    env_fixpoint: EnvFixpoint | None

    @property
    def winner(self) -> Player:
        return Player.SYS if self.realizable else Player.ENV


def solve_realizability(arena: Arena) -> RealizabilityResult:
    """Decide the game and extract the winner's machine."""
    if not arena.init_env_choices:
        empty = MealyStrategy(
            arena.env_vars, arena.sys_vars, (), (), {}, {}
        )
        return RealizabilityResult(True, True, empty, None, None, None)

    fix = solve_system(arena)
    realizable = all(
        any(v in fix.z for v in arena.init_completions[i0])
        for i0 in arena.init_env_choices
    )
    if realizable:
        strategy = extract_strategy(arena, fix)
        return RealizabilityResult(True, False, strategy, None, fix, None)

    env_fix = solve_env(arena, fix.sys_goals, fix.env_goals)
    determined = env_fix.w == frozenset(arena.states) - fix.z
    assert determined, "winning regions do not partition the arena"
    cs = extract_counterstrategy(arena, env_fix)
    return RealizabilityResult(False, False, None, cs, fix, env_fix)


def solve_spec(spec: Gr1Spec, state_limit: int | None = None) -> RealizabilityResult:
    return solve_realizability(build_arena(spec, state_limit))


# ---------------------------------------------------------------------------
# Strategy verification


def _compiled_sides(spec: Gr1Spec):
    """Compile an expanded spec's parts for product walks."""
    env_vars = spec.env_vars
    n_env = len(env_vars)
    full_index = {n: i for i, n in enumerate(spec.all_vars)}
    env_index = {n: i for i, n in enumerate(env_vars)}

    env_init = [
        compile_expr(p.body, env_index, None)
        for p in spec.parts_of(Player.ENV, PartKind.INIT)
    ]
    sys_init = [
        compile_expr(p.body, full_index, None)
        for p in spec.parts_of(Player.SYS, PartKind.INIT)
    ]
    env_trans = []
    env_inv = []
    for p in spec.parts_of(Player.ENV, PartKind.TRANS):
        if specml.has_next(p.body):
            env_trans.append(compile_expr(p.body, full_index, env_index))
        else:
            env_inv.append(compile_expr(p.body, env_index, None))
    sys_trans = []
    sys_inv = []
    for p in spec.parts_of(Player.SYS, PartKind.TRANS):
        if specml.has_next(p.body):
            sys_trans.append(compile_expr(p.body, full_index, full_index))
        else:
            sys_inv.append(compile_expr(p.body, full_index, None))
    env_fair = [
        compile_expr(p.body, full_index, None)
        for p in spec.parts_of(Player.ENV, PartKind.LIVENESS)
    ]
    sys_fair = [
        compile_expr(p.body, full_index, None)
        for p in spec.parts_of(Player.SYS, PartKind.LIVENESS)
    ]
    return {
        "n_env": n_env,
        "n_sys": len(spec.sys_vars),
        "env_init": env_init,
        "sys_init": sys_init,
        "env_trans": env_trans,
        "env_inv": env_inv,
        "sys_trans": sys_trans,
        "sys_inv": sys_inv,
        "env_fair": env_fair,
        "sys_fair": sys_fair,
    }


def verify_counterstrategy(cs: MooreCounterStrategy, spec: Gr1Spec) -> bool:
    """Check that cs defeats spec whatever the system replies.

    Pass conditions: the emitted inputs always satisfy the environment
    side, every legal system reply has a defined continuation, and no
    reachable loop of the product satisfies all liveness sets of both
    players at once.
    """
    spec = specml.expand_responses(spec)
    c = _compiled_sides(spec)
    n_env = c["n_env"]

    def env_ok_at(i_val):
        return all(f(i_val, 0) for f in c["env_inv"])

    def sys_ok_at(v):
        return all(f(v, 0) for f in c["sys_inv"])

    gamma0 = cs.gamma[cs.initial]
    if not all(f(gamma0, 0) for f in c["env_init"]):
        return False
    if not env_ok_at(gamma0):
        return False

    n_sys = c["n_sys"]
    start_nodes = []
    for y in range(1 << n_sys):
        v = gamma0 | (y << n_env)
        if all(f(v, 0) for f in c["sys_init"]) and sys_ok_at(v):
            start_nodes.append((cs.initial, v))

    nodes = list(start_nodes)
    seen = set(start_nodes)
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
    cursor = 0
    while cursor < len(nodes):
        q, v = nodes[cursor]
        cursor += 1
        y = v >> n_env
        q2 = cs.delta.get((q, y))
        if q2 is None:
            return False
        gamma2 = cs.gamma[q2]
        if not env_ok_at(gamma2):
            return False
        if not all(f(v, gamma2) for f in c["env_trans"]):
            return False
        outs = []
        for y2 in range(1 << n_sys):
            v2 = gamma2 | (y2 << n_env)
            if not sys_ok_at(v2):
                continue
            if not all(f(v, v2) for f in c["sys_trans"]):
                continue
            node = (q2, v2)
            outs.append(node)
            if node not in seen:
                seen.add(node)
                nodes.append(node)
        edges[(q, v)] = outs

    def succ(node):
        return edges.get(node, ())

    # The system may steer the product along any cycle it likes.  A
    # cycle dodging one of the environment's own fairness sets, or one
    # visiting every system set, gives the system a winning play.
    for f in c["env_fair"]:
        allowed = [nd for nd in nodes if not f(nd[1], 0)]
        allowed_set = set(allowed)

        def succ_cut(node, _ok=allowed_set):
            return (m for m in edges.get(node, ()) if m in _ok)

        if nontrivial_sccs(allowed, succ_cut):
            return False
    for comp in nontrivial_sccs(nodes, succ):
        vals = [v for _, v in comp]
        if all(any(f(v, 0) for v in vals) for f in c["sys_fair"]):
            return False
    return True


def verify_system_strategy(strategy: MealyStrategy, spec: Gr1Spec) -> bool:
    """Check that strategy wins spec's game against every environment."""
    arena = build_arena(spec)
    if not arena.init_env_choices:
        return True

    seen = set()
    stack = []
    for i0 in arena.init_env_choices:
        entry = strategy.initial.get(i0)
        if entry is None:
            return False
        o0, sid = entry
        v0 = arena.pack(i0, o0)
        if v0 not in arena.init_completions[i0]:
            return False
        if strategy.valuations[sid] != v0:
            return False
        if sid not in seen:
            seen.add(sid)
            stack.append(sid)

    edges: dict[int, list[int]] = {}
    while stack:
        sid = stack.pop()
        v = strategy.valuations[sid]
        outs = []
        for i in arena.env_moves(v):
            entry = strategy.trans.get((sid, i))
            if entry is None:
                return False
            o, nid = entry
            if o not in arena.sys_moves(v, i):
                return False
            if strategy.valuations[nid] != arena.pack(i, o):
                return False
            outs.append(nid)
            if nid not in seen:
                seen.add(nid)
                stack.append(nid)
        edges[sid] = outs

    # The environment may steer the walk along any cycle.  The system
    # loses if some cycle avoids one of its fairness sets while hitting
    # every environment set, so check each set's induced subgraph.
    for sysfair in arena.sys_fair:
        allowed = [
            sid for sid in sorted(seen)
            if strategy.valuations[sid] not in sysfair
        ]
        allowed_set = set(allowed)

        def succ_cut(sid, _ok=allowed_set):
            return (t for t in edges.get(sid, ()) if t in _ok)

        for comp in nontrivial_sccs(allowed, succ_cut):
            vals = [strategy.valuations[sid] for sid in comp]
            if all(any(v in fair for v in vals) for fair in arena.env_fair):
                return False
    return True
