"""Run many seeded games under random basis changes and keep the best."""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .. import gf2
from ..decomposition import Decomposition, Gadget, cancel_duplicates
from ..game import annotate, naive_decomposition
from ..tensor import SignatureTensor, change_of_basis
from .mcts import SearchConfig, play_game

WORKERS_ENV = "TCOUNTOPT_WORKERS"


def basis_change(n: int, basis_id: int, seed) -> List[int]:
    """Member ``basis_id`` of the seeded pool; member 0 is the identity."""
    if basis_id == 0:
        return gf2.identity(n)
    return gf2.random_invertible(n, random.Random(f"{seed}:basis:{basis_id}"))


@dataclass
class Candidate:
    decomposition: Decomposition
    source: str
    basis_change_id: Optional[int] = None

    def key(self) -> Tuple:
        c = self.decomposition.cost()
        return (c.equivalent_t, -c.toffoli, -c.cs, self.decomposition.to_json())


@dataclass
class OptimizeResult:
    best: Candidate
    games_played: int
    games_solved: int
    seed: int
    candidates: List[Candidate] = field(default_factory=list)

    @property
    def decomposition(self) -> Decomposition:
        return self.best.decomposition

    def report(self) -> dict:
        cost = self.decomposition.cost()
        return {
            "equivalent_t": cost.equivalent_t,
            "t": cost.t,
            "toffoli": cost.toffoli,
            "cs": cost.cs,
            "cost": cost.label(),
            "games_played": self.games_played,
            "games_solved": self.games_solved,
            "seed": self.seed,
            "basis_change_id": self.best.basis_change_id,
            "source": self.best.source,
        }


def _run_game(args) -> Tuple[int, int, Optional[List[int]], Optional[list]]:
    target, config, g = args
    rng = random.Random(f"{config.seed}:game:{g}")
    basis_id = rng.randrange(config.basis_changes)
    m = basis_change(target.n, basis_id, config.seed)
    result = play_game(change_of_basis(target, m), config, rng)
    if not result.solved:
        return g, basis_id, None, None
    d = result.decomposition
    inv = gf2.inverse(m)
    mapped = d.mapped(inv)
    return g, basis_id, mapped.factors, [(x.kind, x.start) for x in mapped.gadgets]


def resolve_workers(workers: Optional[int]) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return max(1, workers or 1)


def baseline_candidates(
    target: SignatureTensor, config: SearchConfig, baseline: Optional[Sequence[int]] = None
) -> List[Candidate]:
    out = []
    if baseline is not None:
        d = annotate(list(baseline), target.n, config.gadgets_enabled)
        if d.tensor() == target:
            out.append(Candidate(d, "baseline"))
    if target.is_waring_consistent():
        out.append(Candidate(naive_decomposition(target, config.gadgets_enabled), "naive"))
    return out


def optimize(
    target: SignatureTensor,
    config: SearchConfig,
    baseline: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
) -> OptimizeResult:
    """Best verified decomposition over ``config.games`` games and baselines.

    Results do not depend on the worker count: every game has its own seed
    and the winner is the minimum under a total order.
    """
    candidates = baseline_candidates(target, config, baseline)
    jobs = [(target, config, g) for g in range(config.games)]
    k = resolve_workers(workers)
    if k > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=k) as pool:
            results = list(pool.map(_run_game, jobs))
    else:
        results = [_run_game(j) for j in jobs]
    solved = 0
    for g, basis_id, factors, gadgets in sorted(results, key=lambda r: r[0]):
        if factors is None:
            continue
        d = Decomposition(target.n, factors, [Gadget(kind, start) for kind, start in gadgets])
        d.validate()
        # hard postcondition: the mapped-back factors reproduce the target
        if d.tensor() != target:
            raise AssertionError(f"game {g} produced a decomposition of the wrong tensor")
        solved += 1
        candidates.append(Candidate(d, "game", basis_id))
        compact = cancel_duplicates(d)
        if len(compact.factors) < len(d.factors):
            candidates.append(Candidate(compact, "game", basis_id))
    if not candidates:
        raise ValueError("no verified decomposition found and no baseline available")
    best = min(candidates, key=Candidate.key)
    return OptimizeResult(best, len(jobs), solved, config.seed, candidates)
