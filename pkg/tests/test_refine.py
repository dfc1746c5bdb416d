"""Assumption search and environment-side satisfiability."""

import random
from itertools import product

import pytest

from gr1kit import check_consistency, parse_assumption, parse_spec, refine_search
from gr1kit.specml import PartKind, Player

import fixtures
from oracles import lasso_exists_bounded, lasso_exists_exact, tree_eval, tree_text


# ---------------------------------------------------------------------------
# Consistency


def test_unconstrained_env_is_consistent():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    assert check_consistency(spec)


def test_false_liveness_is_inconsistent():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    part = parse_assumption(spec, "GF(FALSE)")
    assert not check_consistency(spec, (part,))


def test_conflicting_invariant_and_liveness():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    a = parse_assumption(spec, "G(!c)")
    b = parse_assumption(spec, "GF(c)")
    assert check_consistency(spec, (a,))
    assert check_consistency(spec, (b,))
    assert not check_consistency(spec, (a, b))


def test_transition_rules_constrain_edges():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    stuck = parse_assumption(spec, "G(c -> X(c))")
    leave = parse_assumption(spec, "GF(!c)")
    start = parse_assumption(spec, "c")
    assert check_consistency(spec, (stuck, leave))
    assert not check_consistency(spec, (stuck, leave, start))


def test_only_env_parts_allowed():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    sys_part = spec.parts_of(Player.SYS, PartKind.TRANS)[0]
    with pytest.raises(ValueError):
        check_consistency(spec, (sys_part,))


def random_env_side(rng):
    """Random environment-side spec plus its oracle ingredients."""
    env = ["a"]
    sys_ = ["s"]
    lines = ["ENV_VARS a", "SYS_VARS s"]
    inits, invs, steps, fairs = [], [], [], []
    if rng.random() < 0.6:
        t = fixtures.random_tree(rng, env, 2, allow_next=False)
        inits.append(t)
        lines.append(f"ENV_INIT {tree_text(t)}")
    if rng.random() < 0.5:
        t = fixtures.random_tree(rng, env, 1, allow_next=False)
        invs.append(t)
        lines.append(f"ENV_TRANS G({tree_text(t)})")
    for _ in range(rng.randint(0, 2)):
        t = ("imp", fixtures.random_tree(rng, env + sys_, 2, False),
             ("var", "a", True))
        if rng.random() < 0.5:
            t = ("not", t)
        steps.append(t)
        lines.append(f"ENV_TRANS G({tree_text(t)})")
    for _ in range(rng.randint(0, 2)):
        t = fixtures.random_tree(rng, env + sys_, 2, allow_next=False)
        fairs.append(t)
        lines.append(f"ENV_LIVENESS GF({tree_text(t)})")
    return "\n".join(lines) + "\n", inits, invs, steps, fairs


def oracle_consistent(inits, invs, steps, fairs, bounded=True):
    names = ["a", "s"]
    nodes = []
    for bits in product([False, True], repeat=2):
        v = dict(zip(names, bits))
        if all(tree_eval(t, v) for t in invs):
            nodes.append(tuple(bits))

    def as_dict(node):
        return dict(zip(names, node))

    init_nodes = [
        nd for nd in nodes if all(tree_eval(t, as_dict(nd)) for t in inits)
    ]

    def succ(nd):
        here = as_dict(nd)
        for other in nodes:
            env_next = {"a": other[0]}
            if all(tree_eval(t, here, env_next) for t in steps):
                yield other

    fairness = [
        {nd for nd in nodes if tree_eval(t, as_dict(nd))} for t in fairs
    ]
    if bounded:
        return lasso_exists_bounded(nodes, init_nodes, succ, fairness, 6, 6)
    return lasso_exists_exact(nodes, init_nodes, succ, fairness)


def test_consistency_matches_bounded_lasso_oracle():
    rng = random.Random(321)
    agree_true = agree_false = 0
    for _ in range(80):
        text, inits, invs, steps, fairs = random_env_side(rng)
        got = check_consistency(parse_spec(text))
        want = oracle_consistent(inits, invs, steps, fairs)
        assert got == want, text
        if got:
            agree_true += 1
        else:
            agree_false += 1
    assert agree_true and agree_false


def test_consistency_matches_exact_product_oracle():
    rng = random.Random(654)
    for _ in range(80):
        text, inits, invs, steps, fairs = random_env_side(rng)
        got = check_consistency(parse_spec(text))
        assert got == oracle_consistent(
            inits, invs, steps, fairs, bounded=False
        ), text


# ---------------------------------------------------------------------------
# Search


def test_lift_with_patrol_duties_two_refinements():
    spec = parse_spec(fixtures.LIFT_STRICT)
    result = refine_search(
        spec,
        alpha=2,
        p_liveness=("b1", "b2", "b3"),
        p_safety=("b1", "b2", "b3"),
        p_trigger=("b1", "b2", "b3"),
        p_target=("b1", "b2", "b3"),
        mode="all",
    )
    assert result.report.refinements == [
        ["GF(b1 | b2 | b3)"],
        ["G(!b1 & !b2 & !b3 -> X(b1 | b2 | b3))"],
    ]
    assert result.report.counterstrategies_processed == 1
    assert result.report.candidates_generated == 3
    assert result.report.inconsistent_nodes == 1


def test_first_mode_stops_early():
    spec = parse_spec(fixtures.LIFT_STRICT)
    result = refine_search(spec, alpha=2, mode="first")
    assert result.report.refinements == [["GF(b1 | b2 | b3)"]]
    assert result.report.mode == "first"


def test_realizable_spec_needs_no_assumptions():
    spec = parse_spec(fixtures.LIFT)
    result = refine_search(spec, alpha=1)
    assert result.refinements == [()]
    assert result.report.counterstrategies_processed == 0


def test_parameter_validation():
    spec = parse_spec(fixtures.LIFT)
    with pytest.raises(ValueError):
        refine_search(spec, alpha=0)
    with pytest.raises(ValueError):
        refine_search(spec, alpha=1, mode="everything")


def test_inconsistent_nodes_are_not_solved():
    spec = parse_spec(fixtures.LIFT_STRICT)
    result = refine_search(spec, alpha=2, mode="all")
    for node in result.report.nodes:
        if not node.consistent:
            assert node.realizable is None
            assert node.counterstrategy_id is None


def test_report_structure():
    spec = parse_spec(fixtures.LIFT_STRICT)
    result = refine_search(spec, alpha=2, mode="all")
    report = result.report.to_dict()
    assert report["alpha"] == 2
    assert report["mode"] == "all"
    assert report["candidate_time_ms"] <= report["total_time_ms"]
    assert report["nodes"][0]["depth"] == 0
    assert report["nodes"][0]["formulas"] == []
    ids = [
        n["counterstrategy_id"]
        for n in report["nodes"]
        if n["counterstrategy_id"] is not None
    ]
    assert ids == list(range(1, len(ids) + 1))
    # every refinement reported is unique
    keys = [tuple(r) for r in report["refinements"]]
    assert len(set(keys)) == len(keys)


def test_depth_bound_limits_conjunction_length():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    result = refine_search(spec, alpha=2, mode="all")
    assert result.refinements
    for parts in result.refinements:
        assert 1 <= len(parts) <= 2


def test_search_finds_the_published_repair_path():
    spec = parse_spec(fixtures.REQUEST_GRANT)
    result = refine_search(
        spec,
        alpha=2,
        p_liveness=("r",),
        p_safety=("c",),
        p_trigger=("r", "c"),
        p_target=("c",),
        mode="all",
    )
    flat = ["; ".join(r) for r in result.report.refinements]
    assert any("G(!c)" in item for item in flat)
