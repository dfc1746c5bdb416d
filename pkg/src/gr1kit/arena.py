"""Finite game arena built from a spec.

A state is one packed integer valuation of all declared variables:
bit i holds the i-th variable, environment variables first.  The arena
stores every state reachable from the joint initial valuations together
with the legal moves at each state:

  * env_moves(s)    - next environment valuations i' allowed by ENV_TRANS
  * sys_moves(s, i') - next system valuations o' completing i' under
                       SYS_TRANS

A G(...) constraint whose body has no X is an invariant; it must hold at
every step, so it filters initial valuations and the target of every
move.  Constraints with X relate the current full valuation to the next
valuation of their owner's variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable

from . import specml
from .errors import StateSpaceLimitExceeded
from .specml import Gr1Spec, PartKind, Player

DEFAULT_STATE_LIMIT = 1 << 22


def state_limit_from_env() -> int:
    raw = os.environ.get("GR1_STATE_LIMIT")
    if raw is None:
        return DEFAULT_STATE_LIMIT
    try:
        value = int(raw)
    except ValueError:
        msg = f"GR1_STATE_LIMIT must be an integer, got {raw!r}"
        raise ValueError(msg) from None
    if value <= 0:
        msg = "GR1_STATE_LIMIT must be positive"
        raise ValueError(msg)
    return value


def compile_expr(
    expr: specml.BoolExpr,
    now_index: dict[str, int],
    nxt_index: dict[str, int] | None,
) -> Callable[[int, int], bool]:
    """Compile expr to a closure over packed (now, nxt) valuations."""
    if isinstance(expr, specml.Const):
        value = expr.value
        return lambda now, nxt: value
    if isinstance(expr, specml.Ref):
        if expr.nxt:
            if nxt_index is None:
                msg = f"X({expr.name}) not allowed in this context"
                raise ValueError(msg)
            bit = 1 << nxt_index[expr.name]
            return lambda now, nxt: bool(nxt & bit)
        bit = 1 << now_index[expr.name]
        return lambda now, nxt: bool(now & bit)
    if isinstance(expr, specml.Not):
        f = compile_expr(expr.operand, now_index, nxt_index)
        return lambda now, nxt: not f(now, nxt)
    lf = compile_expr(expr.left, now_index, nxt_index)
    rf = compile_expr(expr.right, now_index, nxt_index)
    if isinstance(expr, specml.And):
        return lambda now, nxt: lf(now, nxt) and rf(now, nxt)
    if isinstance(expr, specml.Or):
        return lambda now, nxt: lf(now, nxt) or rf(now, nxt)
    if isinstance(expr, specml.Implies):
        return lambda now, nxt: (not lf(now, nxt)) or rf(now, nxt)
    if isinstance(expr, specml.Iff):
        return lambda now, nxt: lf(now, nxt) == rf(now, nxt)
    msg = f"not an expression node: {expr!r}"
    raise TypeError(msg)


@dataclass
class Arena:
    """Reachable game graph of an expanded spec."""

    spec: Gr1Spec
    env_vars: tuple[str, ...]
    sys_vars: tuple[str, ...]
    states: tuple[int, ...]
    init_env_choices: tuple[int, ...]
    init_completions: dict[int, tuple[int, ...]]
    env_fair: tuple[frozenset[int], ...]
    sys_fair: tuple[frozenset[int], ...]
    _env_moves: dict[int, tuple[int, ...]]
    _sys_moves: dict[tuple[int, int], tuple[int, ...]]

    @property
    def n_env(self) -> int:
        return len(self.env_vars)

    @property
    def n_sys(self) -> int:
        return len(self.sys_vars)

    @property
    def env_mask(self) -> int:
        return (1 << self.n_env) - 1

    def pack(self, env_val: int, sys_val: int) -> int:
        return env_val | (sys_val << self.n_env)

    def env_part(self, state: int) -> int:
        return state & self.env_mask

    def sys_part(self, state: int) -> int:
        return state >> self.n_env

    def env_moves(self, state: int) -> tuple[int, ...]:
        return self._env_moves[state]

    def sys_moves(self, state: int, env_next: int) -> tuple[int, ...]:
        return self._sys_moves[(state, env_next)]

    def successors(self, state: int, env_next: int) -> tuple[int, ...]:
        n = self.n_env
        return tuple(
            env_next | (o << n) for o in self._sys_moves[(state, env_next)]
        )

    def valuation(self, state: int) -> dict[str, bool]:
        names = self.env_vars + self.sys_vars
        return {name: bool(state & (1 << i)) for i, name in enumerate(names)}


def _compile_parts(spec, player, kind, now_index, nxt_index):
    out = []
    for part in spec.parts:
        if part.player is player and part.kind is kind:
            out.append((part, compile_expr(part.body, now_index, nxt_index)))
    return out


def build_arena(spec: Gr1Spec, state_limit: int | None = None) -> Arena:
    """Expand responses and enumerate the reachable arena of spec."""
    spec = specml.expand_responses(spec)
    if state_limit is None:
        state_limit = state_limit_from_env()

    env_vars = spec.env_vars
    sys_vars = spec.sys_vars
    n_env = len(env_vars)
    n_sys = len(sys_vars)
    full_index = {name: i for i, name in enumerate(env_vars + sys_vars)}
    env_index = {name: i for i, name in enumerate(env_vars)}

    # Env constraints read the next env valuation as a bare int, so their
    # next-index is the env one; sys constraints see the full packed next.
    env_init = _compile_parts(spec, Player.ENV, PartKind.INIT, env_index, None)
    sys_init = _compile_parts(spec, Player.SYS, PartKind.INIT, full_index, None)
    env_trans = _compile_parts(
        spec, Player.ENV, PartKind.TRANS, full_index, env_index
    )
    sys_trans = _compile_parts(
        spec, Player.SYS, PartKind.TRANS, full_index, full_index
    )

    # Invariants (no X in the body) also constrain the state being entered.
    # Env invariant bodies are scoped to env vars, so they run on the env
    # part; sys invariant bodies run on the full valuation.
    env_inv = [
        compile_expr(part.body, env_index, None)
        for part, _ in env_trans
        if not specml.has_next(part.body)
    ]
    sys_inv = [
        compile_expr(part.body, full_index, None)
        for part, _ in sys_trans
        if not specml.has_next(part.body)
    ]

    def env_ok_at(env_val: int) -> bool:
        return all(f(env_val, 0) for f in env_inv)

    def sys_ok_at(state: int) -> bool:
        return all(f(state, 0) for f in sys_inv)

    init_env_choices = [
        i
        for i in range(1 << n_env)
        if all(f(i, 0) for _, f in env_init) and env_ok_at(i)
    ]
    init_completions: dict[int, tuple[int, ...]] = {}
    for i in init_env_choices:
        comps = []
        for o in range(1 << n_sys):
            v = i | (o << n_env)
            if all(f(v, 0) for _, f in sys_init) and sys_ok_at(v):
                comps.append(v)
        init_completions[i] = tuple(comps)

    env_trans_fns = [f for _, f in env_trans]
    sys_trans_fns = [f for _, f in sys_trans]

    env_moves: dict[int, tuple[int, ...]] = {}
    sys_moves: dict[tuple[int, int], tuple[int, ...]] = {}
    states: set[int] = set()
    frontier: list[int] = []
    for i in init_env_choices:
        for v in init_completions[i]:
            if v not in states:
                states.add(v)
                frontier.append(v)
    if len(states) > state_limit:
        msg = f"more than {state_limit} reachable states"
        raise StateSpaceLimitExceeded(msg)

    while frontier:
        s = frontier.pop()
        moves = []
        for i_next in range(1 << n_env):
            if not env_ok_at(i_next):
                continue
            if not all(f(s, i_next) for f in env_trans_fns):
                continue
            moves.append(i_next)
            outs = []
            for o_next in range(1 << n_sys):
                v_next = i_next | (o_next << n_env)
                if not sys_ok_at(v_next):
                    continue
                if not all(f(s, v_next) for f in sys_trans_fns):
                    continue
                outs.append(o_next)
                if v_next not in states:
                    states.add(v_next)
                    if len(states) > state_limit:
                        msg = f"more than {state_limit} reachable states"
                        raise StateSpaceLimitExceeded(msg)
                    frontier.append(v_next)
            sys_moves[(s, i_next)] = tuple(outs)
        env_moves[s] = tuple(moves)

    ordered = tuple(sorted(states))
    env_fair = []
    for part in spec.parts_of(Player.ENV, PartKind.LIVENESS):
        f = compile_expr(part.body, full_index, None)
        env_fair.append(frozenset(s for s in ordered if f(s, 0)))
    sys_fair = []
    for part in spec.parts_of(Player.SYS, PartKind.LIVENESS):
        f = compile_expr(part.body, full_index, None)
        sys_fair.append(frozenset(s for s in ordered if f(s, 0)))

    return Arena(
        spec=spec,
        env_vars=env_vars,
        sys_vars=sys_vars,
        states=ordered,
        init_env_choices=tuple(init_env_choices),
        init_completions=init_completions,
        env_fair=tuple(env_fair),
        sys_fair=tuple(sys_fair),
        _env_moves=env_moves,
        _sys_moves=sys_moves,
    )
