"""Hand-built action prior for the tensor game.

Candidates come from the residual itself: the nonzero rows of its slices,
unit vectors of nonzero diagonal entries, XORs of pairs of those, and the
factors that would complete a partially played gadget. Each candidate is
scored by how many tensor entries it clears.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .. import gf2
from ..decomposition import GadgetKind, toffoli_completion
from ..game import GameState
from ..tensor import SignatureTensor

PAIR_BASE_CAP = 24
COMPLETION_BOOST = 8.0
SCORE_TEMPERATURE = 2.0


@dataclass
class Prior:
    factors: List[int]
    weights: List[float]  # normalized

    def __len__(self):
        return len(self.factors)


def weight_delta(t: SignatureTensor, u: int) -> int:
    """Change in the number of nonzero entries when the cube of u is added."""
    n = t.n
    rows = t.rows
    support = list(gf2.bits(u))
    delta = 0
    for i in support:
        base = i * n
        for j in support:
            r = rows[base + j]
            delta += (r ^ u).bit_count() - r.bit_count()
    return delta


def base_candidates(t: SignatureTensor) -> List[int]:
    """Distinct nonzero slice rows and unit vectors of the diagonal, sorted."""
    n = t.n
    out = {r for r in t.rows if r}
    out.update(1 << i for i in range(n) if t.entry(i, i, i))
    return sorted(out)


def _pending_completion(state: GameState) -> List[Tuple[int, float]]:
    """Next factor of each pending gadget with its boost. Only Toffoli chains
    get the large boost: a CS completion competes with starting a Toffoli
    on the same pair. Under favoring CS completions get no boost at all,
    since favoring rewards the Toffoli that the same pair could start."""
    cs_boost = 0.0 if state.toffoli_favoring else 1.0
    out = []
    for kind, chain in pending_gadgets(state):
        b = COMPLETION_BOOST if kind == GadgetKind.TOFFOLI else cs_boost
        if b > 0:
            out.append((chain[0], b))
    return out


def pending_chains(state: GameState) -> List[List[int]]:
    """For each gadget the recent history has started, the factors that
    would finish it."""
    return [chain for _, chain in pending_gadgets(state)]


def pending_gadgets(state: GameState) -> List[Tuple[GadgetKind, List[int]]]:
    if not state.gadgets_enabled:
        return []
    free = state.history[max(state.cs_barrier, state.toffoli_barrier):]
    out = []
    for j in range(3, 7):
        if len(free) < j:
            break
        window = free[-j:]
        a, b, c = window[:3]
        comp = toffoli_completion(a, b, c)
        if gf2.independent([a, b, c]) and list(window[3:]) == comp[: j - 3]:
            out.append((GadgetKind.TOFFOLI, comp[j - 3:]))
    if len(free) >= 2 and gf2.independent(free[-2:]):
        out.append((GadgetKind.CS, [free[-2] ^ free[-1]]))
    return out


class PriorCache:
    """Memoizes scored base candidates per residual."""

    def __init__(self, maxsize: int = 20000):
        self.maxsize = maxsize
        self._data: "OrderedDict[Tuple[int, ...], List[Tuple[int, int]]]" = OrderedDict()

    def scored(self, t: SignatureTensor) -> List[Tuple[int, int]]:
        key = t.rows
        hit = self._data.get(key)
        if hit is not None:
            self._data.move_to_end(key)
            return hit
        base = base_candidates(t)
        scored = {u: -weight_delta(t, u) for u in base}
        top = sorted(base, key=lambda u: (-scored[u], u))[:PAIR_BASE_CAP]
        for x, u in enumerate(top):
            for v in top[x + 1:]:
                w = u ^ v
                if w and w not in scored:
                    scored[w] = -weight_delta(t, w)
        result = sorted(scored.items())
        self._data[key] = result
        if len(self._data) > self.maxsize:
            self._data.popitem(last=False)
        return result


def open_pair(state: GameState) -> Optional[Tuple[int, int]]:
    """The last two free moves when an independent next move would start a
    Toffoli gadget, which the favoring rule then completes automatically."""
    if not state.gadgets_enabled:
        return None
    free = state.history[max(state.cs_barrier, state.toffoli_barrier):]
    if len(free) < 2 or state.move + 5 > state.max_moves:
        return None
    a, b = free[-2:]
    return (a, b) if gf2.independent([a, b]) else None


def completion_delta(t: SignatureTensor, a: int, b: int, c: int) -> int:
    """Weight change from playing c and the four factors completing the gadget."""
    r = t
    for u in [c] + toffoli_completion(a, b, c):
        r = r.add_rank_one(u)
    return r.weight() - t.weight()


def _with_lookahead(state: GameState, scored: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    pair = open_pair(state)
    if pair is None:
        return scored
    a, b = pair
    t = state.residual
    out = []
    for u, s in scored:
        if gf2.independent([a, b, u]):
            s = -completion_delta(t, a, b, u)
        out.append((u, s))
    return out


def _softmax(scores: Sequence[float]) -> List[float]:
    top = max(scores)
    ws = [math.exp((s - top) / SCORE_TEMPERATURE) for s in scores]
    total = sum(ws)
    return [w / total for w in ws]


def prior_policy(state: GameState, cache: Optional[PriorCache] = None) -> Prior:
    if state.terminal is not None:
        return Prior([], [])
    scored = _with_lookahead(state, (cache or PriorCache()).scored(state.residual))
    factors = [u for u, _ in scored]
    weights = _softmax([s for _, s in scored])
    completions = [(u, b) for u, b in _pending_completion(state) if u >> state.n == 0]
    if completions:
        index = {u: i for i, u in enumerate(factors)}
        top = max(weights)
        for u, b in completions:
            boost = b * top
            if u in index:
                weights[index[u]] = max(weights[index[u]], boost)
            else:
                index[u] = len(factors)
                factors.append(u)
                weights.append(boost)
    total = sum(weights)
    return Prior(factors, [w / total for w in weights])


def rollout_candidates(state: GameState) -> List[Tuple[int, float]]:
    """Cheaper candidate list with raw scores, used during rollouts."""
    t = state.residual
    out = dict(_with_lookahead(state, [(u, -weight_delta(t, u)) for u in base_candidates(t)]))
    for u, b in _pending_completion(state):
        score = max(out.get(u, -math.inf), -weight_delta(t, u))
        out[u] = score + b if b > 1.0 else score
    return sorted(out.items())
