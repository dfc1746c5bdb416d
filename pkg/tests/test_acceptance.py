"""End-to-end scorecard for the toolkit's headline behaviors.

Every test prints exactly one [ACCEPTANCE] line, so scanning the log
shows the whole scorecard at a glance; run pytest with -s to see the
lines for passing tests too.
"""

import random
import time
from itertools import combinations, product

from gr1kit import (
    candidates_for,
    generate_patterns,
    parse_spec,
    refine_search,
    solve_spec,
    verify_counterstrategy,
    verify_system_strategy,
)
from gr1kit.arena import build_arena
from gr1kit.candidates import cnf_expr, simplify_cnf
from gr1kit.patterns import eventually_patterns
from gr1kit.solver import solve_realizability
from gr1kit.specml import eval_expr

import fixtures
from oracles import (
    brute_realizable,
    brute_system_winning,
    holds_eventually,
    holds_eventually_always,
    holds_eventually_next,
    minimal_eventually_sets,
)
from test_refine import oracle_consistent, random_env_side


class Criterion:
    """Context manager printing one pass/fail line per acceptance item."""

    def __init__(self, name):
        self.name = name
        self.note = ""

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        elapsed = time.perf_counter() - self.t0
        note = f" {self.note}" if self.note else ""
        print(f"[ACCEPTANCE] {self.name}: {status} ({elapsed:.2f}s){note}")
        return False


def test_request_grant_pipeline_under_5s():
    with Criterion("request/grant pipeline") as crit:
        spec = parse_spec(fixtures.REQUEST_GRANT)
        res = solve_spec(spec)
        assert not res.realizable
        cs = res.counter_strategy
        assert verify_counterstrategy(cs, spec)
        # the environment just holds both inputs high forever
        assert all(g == 0b11 for g in cs.gamma)

        spec2 = parse_spec(fixtures.REQUEST_GRANT_GFNR)
        res2 = solve_spec(spec2)
        assert not res2.realizable
        cs2 = res2.counter_strategy
        assert verify_counterstrategy(cs2, spec2)

        cands = candidates_for(cs2, ("r",), ("c",), ("r", "c"), ("c",))
        formulas = [c.formula for c in cands]
        assert formulas == [
            "GF(FALSE)",
            "G(!c)",
            "G(r & c -> X(!c))",
            "G(!r & c -> X(!c))",
        ]
        assert "G(!c)" in formulas
        for cand in cands:
            blocked = spec2.with_extra_parts((cand.part,))
            assert not verify_counterstrategy(cs2, blocked), cand.formula
        elapsed = time.perf_counter() - crit.t0
        crit.note = "4 candidates, every one rules the machine out"
        assert elapsed < 5.0


def test_pattern_fixture_sets_exact_under_1s():
    with Criterion("pattern fixture sets") as crit:
        t0 = time.perf_counter()

        chain = fixtures.chain_fts()
        ps = generate_patterns(chain, beta=1)
        assert [set(p.config) for p in ps.eventually] == [
            {0}, {1}, {2}, {3},
        ]
        assert set(ps.eventually_always.config) == {1, 2, 3}
        assert [
            (set(p.config), set(p.config2)) for p in ps.eventually_next
        ] == [({0}, {1}), ({1}, {2}), ({2}, {3}), ({3}, {1})]
        total = (
            len(ps.eventually)
            + (1 if ps.eventually_always else 0)
            + len(ps.eventually_next)
        )
        assert total == 9

        branch = fixtures.branching_fts()
        ps2 = generate_patterns(branch)
        assert [set(p.config) for p in ps2.eventually] == [
            {0}, {1, 3}, {2, 3},
        ]
        assert set(ps2.eventually_always.config) == {1, 2, 3}
        assert [
            (set(p.config), set(p.config2)) for p in ps2.eventually_next
        ] == [({0}, {1, 3}), ({1, 3}, {2, 3}), ({2, 3}, {1, 3})]

        elapsed = time.perf_counter() - t0
        crit.note = "both graphs exact"
        assert elapsed < 1.0


def test_lift_refinement_exact_under_30s():
    with Criterion("lift refinement") as crit:
        t0 = time.perf_counter()
        assert solve_spec(parse_spec(fixtures.LIFT)).realizable
        spec = parse_spec(fixtures.LIFT_STRICT)
        assert not solve_spec(spec).realizable
        result = refine_search(
            spec,
            alpha=2,
            p_liveness=("b1", "b2", "b3"),
            p_safety=("b1", "b2", "b3"),
            p_trigger=("b1", "b2", "b3"),
            p_target=("b1", "b2", "b3"),
            mode="all",
        )
        report = result.report
        assert report.refinements == [
            ["GF(b1 | b2 | b3)"],
            ["G(!b1 & !b2 & !b3 -> X(b1 | b2 | b3))"],
        ]
        assert report.counterstrategies_processed == 1
        assert report.candidates_generated == 3
        assert report.inconsistent_nodes == 1
        elapsed = time.perf_counter() - t0
        crit.note = "2 refinements, counts 1/3/1"
        assert elapsed < 30.0


def test_emitted_patterns_dominate_every_holding_formula():
    with Criterion("pattern completeness, 200 random graphs") as crit:
        rng = random.Random(20240)
        violations = 0
        for _ in range(200):
            fts = fixtures.random_fts(rng, max_states=6)
            n, edges, init = fts.n_states, fts.edges, fts.initial
            ps = generate_patterns(fts, beta=n)
            ev = [frozenset(p.config) for p in ps.eventually]
            nxt = [
                (frozenset(p.config), frozenset(p.config2))
                for p in ps.eventually_next
            ]
            trap = (
                frozenset(ps.eventually_always.config)
                if ps.eventually_always
                else None
            )
            states = range(n)
            for size in range(1, n + 1):
                for combo in combinations(states, size):
                    config = frozenset(combo)
                    if holds_eventually(n, edges, init, config):
                        if not any(c <= config for c in ev):
                            violations += 1
                    if holds_eventually_always(n, edges, init, config):
                        if trap is None or not trap <= config:
                            violations += 1
                    succ = frozenset(
                        b for a, b in edges if a in config
                    )
                    if succ and holds_eventually_next(
                        n, edges, init, config, succ
                    ):
                        if not any(
                            c <= config and c2 <= succ for c, c2 in nxt
                        ):
                            violations += 1
        crit.note = f"{violations} violations"
        assert violations == 0


def test_certificate_search_matches_subset_enumeration():
    with Criterion("certificate search vs subset oracle, 200 graphs") as crit:
        rng = random.Random(20241)
        mismatches = 0
        for _ in range(200):
            fts = fixtures.random_fts(rng, max_states=7)
            beta = rng.randint(1, 4)
            got = [
                frozenset(p.config)
                for p in eventually_patterns(fts, beta=beta)[1:]
            ]
            pool = [q for q in range(fts.n_states) if q != fts.initial]
            want = minimal_eventually_sets(
                fts.n_states, fts.edges, fts.initial, pool, beta
            )
            if got != want:
                mismatches += 1
        crit.note = f"{mismatches} mismatches"
        assert mismatches == 0


def test_clause_simplification_matches_truth_tables():
    with Criterion("clause simplification vs truth tables, 500 sets") as crit:
        rng = random.Random(20242)
        mismatches = 0
        for _ in range(500):
            n_vars = rng.randint(1, 10)
            names = tuple(f"v{k}" for k in range(n_vars))
            clauses = []
            for _ in range(rng.randint(0, 5)):
                width = rng.randint(0, min(4, n_vars))
                vars_ = rng.sample(range(n_vars), width)
                clauses.append(
                    tuple((v, rng.random() < 0.5) for v in vars_)
                )
            expr = cnf_expr(simplify_cnf(clauses), names)
            for bits in product([False, True], repeat=n_vars):
                assign = dict(zip(names, bits))
                raw = all(
                    any(bits[v] == pos for v, pos in clause)
                    for clause in clauses
                )
                if eval_expr(expr, assign) != raw:
                    mismatches += 1
                    break
        crit.note = f"{mismatches} mismatches"
        assert mismatches == 0


def test_consistency_matches_lasso_enumeration():
    with Criterion("consistency vs bounded lasso oracle, 200 specs") as crit:
        from gr1kit import check_consistency

        rng = random.Random(20243)
        mismatches = 0
        for _ in range(200):
            text, inits, invs, steps, fairs = random_env_side(rng)
            got = check_consistency(parse_spec(text))
            want = oracle_consistent(inits, invs, steps, fairs)
            if got != want:
                mismatches += 1
        crit.note = f"{mismatches} mismatches"
        assert mismatches == 0


def test_solver_winner_matches_plain_iteration():
    with Criterion("solver vs plain fixpoint iteration, 100 arenas") as crit:
        rng = random.Random(20244)
        mismatches = 0
        checked = 0
        while checked < 100:
            spec = parse_spec(fixtures.random_spec_text(rng, max_vars=3))
            arena = build_arena(spec)
            res = solve_realizability(arena)
            if res.vacuous:
                continue
            checked += 1
            if res.realizable != brute_realizable(arena):
                mismatches += 1
            elif res.system_fixpoint.z != brute_system_winning(arena):
                mismatches += 1
        crit.note = f"{mismatches} mismatches"
        assert mismatches == 0


def test_every_win_yields_a_verified_machine():
    with Criterion("strategy validity, 100 random specs") as crit:
        rng = random.Random(20245)
        failures = 0
        wins = {"sys": 0, "env": 0}
        for _ in range(100):
            spec = parse_spec(fixtures.random_spec_text(rng))
            res = solve_spec(spec)
            if res.realizable:
                wins["sys"] += 1
                if not verify_system_strategy(res.strategy, spec):
                    failures += 1
            else:
                wins["env"] += 1
                if not verify_counterstrategy(res.counter_strategy, spec):
                    failures += 1
        crit.note = f"{failures} failures ({wins['sys']} sys, {wins['env']} env wins)"
        assert wins["sys"] and wins["env"]
        assert failures == 0


def test_candidate_time_is_a_small_share_of_refine():
    with Criterion("candidate generation time share on lift") as crit:
        spec = parse_spec(fixtures.LIFT_STRICT)
        report = refine_search(spec, alpha=2, mode="all").report
        share = report.candidate_time_ms / max(report.total_time_ms, 1e-9)
        crit.note = f"{share:.2%} of total"
        assert share < 0.10
