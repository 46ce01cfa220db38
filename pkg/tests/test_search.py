from __future__ import annotations

import itertools
import random

import pytest

from tcountopt.decomposition import toffoli_completion
from tcountopt.game import new_game, step
from tcountopt.search import SearchConfig, min_waring_rank, optimize, play_game, prior_policy, select_action
from tcountopt.search.mcts import (
    MinMax, Node, UnexpandedNodeError, backup, empirical_policy, expand, expand_and_backup,
)
from tcountopt.search.oracle import OracleBoundsError
from tcountopt.search.prior import PriorCache, base_candidates, open_pair
from tcountopt.tensor import SignatureTensor, from_decomposition

E1, E2, E3 = 1, 2, 4


def _node(q, prior=None, visits=None):
    k = len(q)
    node = Node(new_game(SignatureTensor.rank_one(1, 1)))
    node.set_actions(list(range(1, k + 1)), prior or [1.0 / k] * k)
    node.visits = visits or [0] * k
    node.value_sum = [v * n for v, n in zip(q, node.visits)]
    node.value = q[0] if not any(node.visits) else 0.0
    return node


# -- prior ---------------------------------------------------------------------------


def test_prior_candidates_on_cs(cs_tensor):
    cands = base_candidates(cs_tensor)
    assert E1 ^ E2 in cands and E2 in cands
    p = prior_policy(new_game(cs_tensor))
    assert {E1 ^ E2, E2} <= set(p.factors)
    assert abs(sum(p.weights) - 1) < 1e-12


def test_prior_forces_toffoli_completion(ccz_tensor):
    s = new_game(ccz_tensor)
    for u in [E1, E2, E3] + toffoli_completion(E1, E2, E3)[:3]:
        step(s, u)
    p = prior_policy(s)
    forced = E2 ^ E3
    assert p.weights[p.factors.index(forced)] == max(p.weights)


def test_prior_on_terminal_state_is_empty():
    p = prior_policy(new_game(SignatureTensor.zero(3)))
    assert p.factors == [] and p.weights == []


def test_prior_cache_reuses_entries(ccz_tensor):
    cache = PriorCache(maxsize=1)
    first = cache.scored(ccz_tensor)
    assert cache.scored(ccz_tensor) is first
    cache.scored(SignatureTensor.rank_one(1, 3))
    assert cache.scored(ccz_tensor) is not first


def test_favoring_lookahead_prefers_the_completing_factor(ccz_tensor):
    s = new_game(ccz_tensor, toffoli_favoring=True)
    step(s, E1)
    step(s, E2)
    assert open_pair(s) == (E1, E2)
    p = prior_policy(s)
    # e3 finishes the gadget; the CS completion e1+e2 may only tie with it
    assert p.weights[p.factors.index(E3)] == max(p.weights)


# -- MCTS pieces ---------------------------------------------------------------------


def test_select_action_examples():
    assert select_action(_node([0.0, 0.0, 0.0])) == 0
    node = _node([-5.0, 0.0, -5.0], visits=[1, 1, 1])
    assert select_action(node) == 1
    node = _node([-1.0, -3.0, -0.5], prior=[0.8, 0.1, 0.1], visits=[1, 1, 1])
    assert select_action(node, c=0.0) == 2
    with pytest.raises(UnexpandedNodeError):
        select_action(Node(new_game(SignatureTensor.rank_one(1, 1))))


def test_select_action_uses_normalized_q():
    node = _node([-10.0, -20.0], visits=[1, 1])
    bounds = MinMax()
    for v in (-10.0, -20.0):
        bounds.update(v)
    assert bounds.normalize(-10.0) == 1.0 and bounds.normalize(-20.0) == 0.0
    assert select_action(node, 1.25, bounds) == 0


def test_empirical_policy_point_mass():
    actions, pi = empirical_policy([5] * 32)
    assert actions == [5] and pi == [1.0]
    actions, pi = empirical_policy([3, 1, 3, 2])
    assert actions == [3, 1, 2] and pi == [0.5, 0.25, 0.25]


def test_backup_of_single_path_gives_remaining_moves():
    factors = [3, 5, 6, 7]
    s = new_game(from_decomposition(factors, 3), gadgets_enabled=False)
    path = []
    node = Node(s)
    for u in factors:
        node.set_actions([u], [1.0])
        st = node.state.copy()
        _, out = step(st, u)
        node.rewards[0] = out.total
        child = Node(st)
        node.children[0] = child
        path.append((node, 0))
        node = child
    assert node.terminal is not None
    expand_and_backup(path, node, SearchConfig(), random.Random(0), PriorCache())
    for depth, (n, a) in enumerate(path):
        assert n.q(a) == -(len(factors) - depth)


def test_risk_quantile_half_is_the_median(ccz_tensor):
    cfg = SearchConfig(risk_quantile=0.5, rollouts=4, rollout_depth=2)
    node = Node(new_game(ccz_tensor, gadgets_enabled=False))
    rng = random.Random(3)
    value = expand(node, cfg, rng, PriorCache())
    assert node.expanded and node.value == value
    assert abs(sum(node.prior) - 1) < 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(simulations=0)
    with pytest.raises(ValueError):
        SearchConfig(risk_quantile=1.0)
    with pytest.raises(ValueError):
        SearchConfig(games=0)


# -- games and optimizer --------------------------------------------------------------


def test_play_zero_tensor():
    r = play_game(SignatureTensor.zero(3), SearchConfig(simulations=10))
    assert r.solved and r.decomposition.factors == [] and r.decomposition.cost().equivalent_t == 0


@pytest.mark.parametrize("name, sims", [("cs", 100), ("ccz", 800)])
def test_play_cs_and_ccz_with_gadgets(cs_tensor, ccz_tensor, name, sims):
    t = cs_tensor if name == "cs" else ccz_tensor
    for seed in range(3):
        r = play_game(t, SearchConfig(simulations=sims, seed=seed))
        assert r.solved
        assert r.decomposition.cost().equivalent_t == 2
        assert r.total_return == -2


def test_play_exhausts_with_tiny_budget(ccz_tensor):
    r = play_game(ccz_tensor, SearchConfig(simulations=5, max_moves=2, gadgets_enabled=False))
    assert not r.solved and r.decomposition is None
    assert len(r.history) == 2


def test_small_rank_completeness():
    """Every N=3 tensor of rank <= 2 is solved optimally with gadgets off."""
    seen = set()
    for r in (1, 2):
        for fs in itertools.combinations(range(1, 8), r):
            t = from_decomposition(fs, 3)
            if t in seen:
                continue
            seen.add(t)
            best = min_waring_rank(t).rank
            g = play_game(t, SearchConfig(simulations=100, gadgets_enabled=False))
            assert g.solved and len(g.history) == best


def test_optimize_examples(ccz_tensor):
    r = optimize(SignatureTensor.rank_one(0b101, 3), SearchConfig(simulations=50, games=2))
    assert r.decomposition.factors == [0b101]
    r = optimize(ccz_tensor, SearchConfig(simulations=100, games=2, gadgets_enabled=False))
    assert len(r.decomposition.factors) == 7 and r.decomposition.gadgets == []
    r = optimize(SignatureTensor.zero(2), SearchConfig(simulations=10, games=1))
    assert r.decomposition.cost().equivalent_t == 0


def test_optimize_never_worse_than_baseline(gf2_3_target):
    cfg = SearchConfig(simulations=2, games=1, max_moves=5, gadgets_enabled=False)
    r = optimize(gf2_3_target.tensor, cfg, baseline=gf2_3_target.factor_matrix)
    assert r.decomposition.cost().equivalent_t <= gf2_3_target.initial_r
    assert r.decomposition.tensor() == gf2_3_target.tensor
    assert r.report()["games_played"] == 1


def test_optimize_maps_back_from_random_bases(ccz_tensor):
    cfg = SearchConfig(simulations=60, games=4, basis_changes=50, gadgets_enabled=False, seed=5)
    r = optimize(ccz_tensor, cfg)
    for c in r.candidates:
        assert c.decomposition.tensor() == ccz_tensor
    assert any(c.basis_change_id not in (None, 0) for c in r.candidates)


def test_optimize_is_deterministic_across_runs_and_workers(monkeypatch):
    monkeypatch.delenv("TCOUNTOPT_WORKERS", raising=False)
    target = from_decomposition([0b0111, 0b1010, 0b1100, 0b0011, 0b1111], 4)
    cfg = SearchConfig(simulations=40, games=3, seed=11, basis_changes=20)
    runs = [
        optimize(target, cfg, workers=1),
        optimize(target, cfg, workers=1),
        optimize(target, cfg, workers=2),
    ]
    texts = {r.decomposition.to_json() for r in runs}
    assert len(texts) == 1
    assert len({tuple(c.decomposition.to_json() for c in r.candidates) for r in runs}) == 1


# -- oracle --------------------------------------------------------------------------


def test_oracle_examples(cs_tensor, ccz_tensor):
    r = min_waring_rank(cs_tensor)
    assert r.rank == 3 and r.decomposition.tensor() == cs_tensor
    r = min_waring_rank(ccz_tensor)
    assert r.rank == 7 and r.decomposition.tensor() == ccz_tensor
    assert set(r.transcript) == set(range(1, 8))
    assert min_waring_rank(SignatureTensor.zero(4)).rank == 0
    assert min_waring_rank(SignatureTensor.rank_one(0b1011, 4)).decomposition.factors == [0b1011]


def test_oracle_reports_unproven_and_bounds(ccz_tensor):
    r = min_waring_rank(ccz_tensor, max_rank=6)
    assert not r.proven and r.rank is None
    with pytest.raises(OracleBoundsError):
        min_waring_rank(SignatureTensor.zero(9))
    with pytest.raises(OracleBoundsError):
        min_waring_rank(ccz_tensor, max_rank=11)


def test_oracle_matches_brute_force_on_n3():
    """Rank of every N=3 tensor by breadth-first enumeration of factor sets."""
    best = {SignatureTensor.zero(3): 0}
    frontier = [SignatureTensor.zero(3)]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for t in frontier:
            for u in range(1, 8):
                s = t.add_rank_one(u)
                if s not in best:
                    best[s] = depth
                    nxt.append(s)
        frontier = nxt
    rng = random.Random(0)
    sample = rng.sample(sorted(best, key=lambda t: t.rows), 40)
    for t in sample:
        assert min_waring_rank(t).rank == best[t]


def test_oracle_witness_rejects_lower_rank(ccz_tensor):
    # a rank-6 sibling search must fail
    assert min_waring_rank(ccz_tensor, max_rank=6).decomposition is None
