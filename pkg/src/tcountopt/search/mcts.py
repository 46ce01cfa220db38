"""Sample-based MCTS over the tensor game.

Each expansion draws K actions from the prior and keeps their empirical
frequencies as the node's policy. Leaf values come from an upper quantile of
short rollout returns, which makes the search risk-seeking. Q values are
min-max normalized over the tree before entering the PUCT score.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..decomposition import Decomposition
from ..game import GameState, Terminal, naive_cost, new_game, step
from ..tensor import SignatureTensor
from .prior import PriorCache, pending_chains, prior_policy, rollout_candidates


@dataclass
class SearchConfig:
    simulations: int = 800
    samples_per_expansion: int = 32
    exploration: float = 1.25
    risk_quantile: float = 0.75
    max_moves: int = 250
    gadgets_enabled: bool = True
    toffoli_favoring: bool = False
    games: int = 8
    basis_changes: int = 1000
    seed: int = 0
    rollouts: int = 4
    rollout_depth: int = 3
    temperature: float = 0.0
    penalty_gamma: float = 1.0

    def __post_init__(self):
        if self.simulations < 1:
            raise ValueError("simulations must be >= 1")
        if not 0.0 < self.risk_quantile < 1.0:
            raise ValueError("risk_quantile must lie strictly between 0 and 1")
        if self.samples_per_expansion < 1 or self.games < 1 or self.basis_changes < 1:
            raise ValueError("samples_per_expansion, games and basis_changes must be >= 1")
        if self.max_moves < 0 or self.rollouts < 0 or self.rollout_depth < 0:
            raise ValueError("max_moves, rollouts and rollout_depth must be >= 0")


class UnexpandedNodeError(ValueError):
    pass


class Node:
    __slots__ = ("state", "actions", "prior", "visits", "value_sum", "rewards", "children", "value", "expanded")

    def __init__(self, state: GameState):
        self.state = state
        self.actions: List[int] = []
        self.prior: List[float] = []
        self.visits: List[int] = []
        self.value_sum: List[float] = []
        self.rewards: List[Optional[float]] = []
        self.children: Dict[int, "Node"] = {}
        self.value = 0.0
        self.expanded = False

    @property
    def terminal(self) -> Optional[Terminal]:
        return self.state.terminal

    def q(self, a: int) -> float:
        n = self.visits[a]
        return self.value_sum[a] / n if n else self.value

    def set_actions(self, actions: List[int], prior: List[float]) -> None:
        self.actions = actions
        self.prior = prior
        k = len(actions)
        self.visits = [0] * k
        self.value_sum = [0.0] * k
        self.rewards = [None] * k
        self.expanded = True


@dataclass
class MinMax:
    lo: float = math.inf
    hi: float = -math.inf

    def update(self, v: float) -> None:
        self.lo = min(self.lo, v)
        self.hi = max(self.hi, v)

    def normalize(self, v: float) -> float:
        if self.hi > self.lo:
            return (v - self.lo) / (self.hi - self.lo)
        return 0.5


def select_action(node: Node, c: float = 1.25, bounds: Optional[MinMax] = None) -> int:
    """PUCT argmax; ties go to the lowest action index."""
    if not node.expanded or not node.actions:
        raise UnexpandedNodeError("cannot select from an unexpanded node")
    total = math.sqrt(sum(node.visits))
    best, best_score = 0, -math.inf
    for a in range(len(node.actions)):
        q = node.q(a)
        if bounds is not None:
            q = bounds.normalize(q)
        score = q + c * node.prior[a] * total / (1 + node.visits[a])
        if score > best_score:
            best, best_score = a, score
    return best


def empirical_policy(samples: List[int]) -> Tuple[List[int], List[float]]:
    """Distinct sampled actions (most frequent first, then by value) and
    their sample frequencies."""
    counts: Dict[int, int] = {}
    for u in samples:
        counts[u] = counts.get(u, 0) + 1
    actions = sorted(counts, key=lambda u: (-counts[u], u))
    k = len(samples)
    return actions, [counts[u] / k for u in actions]


def _naive_value(state: GameState) -> float:
    t = state.residual
    if t.is_zero():
        return 0.0
    if not t.is_waring_consistent():
        return -float(state.max_moves)
    return -float(naive_cost(t, state.gadgets_enabled))


def _heuristic_value(state: GameState) -> float:
    """Achievable return estimate: the naive decomposition of the residual,
    or finishing a gadget already under way and then going naive."""
    best = _naive_value(state)
    if state.terminal is not None or not state.gadgets_enabled:
        return best
    for chain in pending_chains(state):
        if state.move + len(chain) > state.max_moves:
            continue
        st = state.copy()
        total = 0.0
        for u in chain:
            if st.terminal is not None:
                break
            _, out = step(st, u)
            total += out.total
        best = max(best, total + (0.0 if st.solved else _naive_value(st)))
    return best


def rollout(state: GameState, depth: int, rng: random.Random) -> float:
    st = state.copy()
    total = 0.0
    for _ in range(depth):
        if st.terminal is not None:
            return total
        cands = rollout_candidates(st)
        scores = [s for _, s in cands]
        top = max(scores)
        ws = [math.exp(s - top) for s in scores]
        u = rng.choices([u for u, _ in cands], weights=ws)[0]
        _, out = step(st, u)
        total += out.total
    if st.terminal is not None:
        return total
    return total + _heuristic_value(st)


def expand(node: Node, config: SearchConfig, rng: random.Random, cache: PriorCache) -> float:
    """Expand a non-terminal leaf and return its initial value estimate."""
    prior = prior_policy(node.state, cache)
    samples = rng.choices(prior.factors, weights=prior.weights, k=config.samples_per_expansion)
    actions, pi = empirical_policy(samples)
    node.set_actions(actions, pi)
    returns = [_heuristic_value(node.state)]
    returns += [rollout(node.state, config.rollout_depth, rng) for _ in range(config.rollouts)]
    node.value = float(np.quantile(returns, config.risk_quantile))
    return node.value


def backup(path: List[Tuple[Node, int]], leaf_value: float, bounds: Optional[MinMax] = None) -> None:
    g = leaf_value
    for node, a in reversed(path):
        g = node.rewards[a] + g
        node.visits[a] += 1
        node.value_sum[a] += g
        if bounds is not None:
            bounds.update(node.q(a))


def expand_and_backup(
    path: List[Tuple[Node, int]], leaf: Node, config: SearchConfig, rng: random.Random,
    cache: PriorCache, bounds: Optional[MinMax] = None,
) -> float:
    if leaf.terminal is not None:
        value = 0.0
    elif not leaf.expanded:
        value = expand(leaf, config, rng, cache)
    else:
        value = leaf.value
    backup(path, value, bounds)
    return value


def _child(node: Node, a: int) -> Node:
    child = node.children.get(a)
    if child is None:
        st = node.state.copy()
        _, out = step(st, node.actions[a])
        node.rewards[a] = out.total
        child = Node(st)
        node.children[a] = child
    return child


def simulate(root: Node, config: SearchConfig, rng: random.Random, cache: PriorCache, bounds: MinMax) -> None:
    node = root
    path: List[Tuple[Node, int]] = []
    while node.expanded and node.terminal is None:
        a = select_action(node, config.exploration, bounds)
        path.append((node, a))
        fresh = a not in node.children
        node = _child(node, a)
        if fresh:
            break
    expand_and_backup(path, node, config, rng, cache, bounds)


def _commit(root: Node, temperature: float, rng: random.Random) -> int:
    visits = root.visits
    if temperature <= 0 or sum(visits) == 0:
        best = max(range(len(visits)), key=lambda a: (visits[a], -a))
        return best
    ws = [v ** (1.0 / temperature) for v in visits]
    return rng.choices(range(len(visits)), weights=ws)[0]


@dataclass
class GameResult:
    decomposition: Optional[Decomposition]
    history: List[int] = field(default_factory=list)
    total_return: float = 0.0
    terminal: Optional[Terminal] = None

    @property
    def solved(self) -> bool:
        return self.terminal == Terminal.SOLVED


def play_game(target: SignatureTensor, config: SearchConfig, rng: Optional[random.Random] = None) -> GameResult:
    rng = rng or random.Random(config.seed)
    cache = PriorCache()
    state = new_game(
        target, config.max_moves, config.gadgets_enabled, config.toffoli_favoring, config.penalty_gamma
    )
    root = Node(state)
    total = 0.0
    while root.terminal is None:
        bounds = MinMax()
        for _ in range(config.simulations):
            simulate(root, config, rng, cache, bounds)
        if not root.actions:  # pragma: no cover - a nonzero residual always has candidates
            break
        a = _commit(root, config.temperature, rng)
        child = _child(root, a)
        total += root.rewards[a]
        root = child
    st = root.state
    dec = st.decomposition() if st.solved else None
    return GameResult(dec, list(st.history), total, st.terminal)
