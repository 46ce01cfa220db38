"""TensorGame: subtract rank-one cubes from a residual until it vanishes.

Every move costs -1. Completing a Toffoli gadget pays +4 (net -2 over its
seven moves) and completing a CS gadget pays 0 (net -2 over three).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from . import gf2
from .decomposition import (
    Decomposition,
    Gadget,
    GadgetKind,
    InvalidDecompositionError,
    is_cs_pattern,
    is_toffoli_pattern,
    toffoli_completion,
)
from .tensor import SignatureTensor, from_decomposition

MOVE_REWARD = -1
GADGET_REWARD = {GadgetKind.TOFFOLI: 4, GadgetKind.CS: 0}


class Terminal(str, Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"


class IllegalMoveError(ValueError):
    pass


@dataclass
class StepOutcome:
    reward: int
    completed_gadget: Optional[GadgetKind] = None
    terminal: Optional[Terminal] = None
    # rewards of factors auto-played by the Toffoli-favoring rule
    auto_rewards: Tuple[int, ...] = ()
    # extra penalty applied when the move budget runs out unsolved
    penalty: float = 0.0

    @property
    def total(self) -> float:
        return self.reward + sum(self.auto_rewards) + self.penalty


@dataclass
class GameState:
    target: SignatureTensor
    residual: SignatureTensor
    max_moves: int = 250
    gadgets_enabled: bool = True
    toffoli_favoring: bool = False
    penalty_gamma: float = 1.0
    history: List[int] = field(default_factory=list)
    gadgets: List[Gadget] = field(default_factory=list)
    cs_barrier: int = 0
    toffoli_barrier: int = 0

    @property
    def n(self) -> int:
        return self.target.n

    @property
    def move(self) -> int:
        return len(self.history)

    @property
    def solved(self) -> bool:
        return self.residual.is_zero()

    @property
    def terminal(self) -> Optional[Terminal]:
        if self.solved:
            return Terminal.SOLVED
        if self.move >= self.max_moves:
            return Terminal.EXHAUSTED
        return None

    def copy(self) -> "GameState":
        return GameState(
            self.target, self.residual, self.max_moves, self.gadgets_enabled,
            self.toffoli_favoring, self.penalty_gamma, list(self.history),
            list(self.gadgets), self.cs_barrier, self.toffoli_barrier,
        )

    def decomposition(self) -> Decomposition:
        return Decomposition(self.n, list(self.history), list(self.gadgets))


def new_game(
    target: SignatureTensor,
    max_moves: int = 250,
    gadgets_enabled: bool = True,
    toffoli_favoring: bool = False,
    penalty_gamma: float = 1.0,
) -> GameState:
    return GameState(target, target, max_moves, gadgets_enabled, toffoli_favoring, penalty_gamma)


def detect_gadget(
    history: Sequence[int],
    cs_barrier: int = 0,
    toffoli_barrier: int = 0,
    toffoli: bool = True,
    cs: bool = True,
) -> Optional[GadgetKind]:
    """Gadget completed by the last factor of ``history``, if any.

    A window may only use factors at positions ``>= barrier``.
    """
    s = len(history)
    if toffoli and s >= 7 and s - 7 >= toffoli_barrier and is_toffoli_pattern(history[s - 7:]):
        return GadgetKind.TOFFOLI
    if cs and s >= 3 and s - 3 >= cs_barrier and is_cs_pattern(history[s - 3:]):
        return GadgetKind.CS
    return None


def _commit(state: GameState, kind: GadgetKind) -> None:
    s = state.move
    state.gadgets.append(Gadget(kind, s - (7 if kind == GadgetKind.TOFFOLI else 3)))
    state.cs_barrier = state.toffoli_barrier = s


def _favoring_triple(state: GameState) -> Optional[Tuple[int, int, int]]:
    s = state.move
    if s - 3 < max(state.toffoli_barrier, state.cs_barrier) or s + 4 > state.max_moves:
        return None
    a, b, c = state.history[s - 3:]
    return (a, b, c) if gf2.independent([a, b, c]) else None


def step(state: GameState, u: int) -> Tuple[GameState, StepOutcome]:
    """Play factor ``u`` in place and return ``(state, outcome)``."""
    if state.terminal is not None:
        raise IllegalMoveError(f"game is already {state.terminal.value}")
    if u <= 0 or u >> state.n:
        raise IllegalMoveError(f"factor {u:#b} is zero or longer than {state.n} bits")
    state.residual = state.residual.add_rank_one(u)
    state.history.append(u)
    reward = MOVE_REWARD
    kind = None
    if state.gadgets_enabled:
        kind = detect_gadget(state.history, state.cs_barrier, state.toffoli_barrier)
        if kind is not None:
            # the completing move earns the gadget reward instead of -1
            reward = GADGET_REWARD[kind]
            _commit(state, kind)
    auto: Tuple[int, ...] = ()
    if (
        kind is None
        and state.gadgets_enabled
        and state.toffoli_favoring
        and not state.solved
        and (triple := _favoring_triple(state)) is not None
    ):
        for v in toffoli_completion(*triple):
            state.residual = state.residual.add_rank_one(v)
            state.history.append(v)
        _commit(state, GadgetKind.TOFFOLI)
        auto = (MOVE_REWARD,) * 3 + (GADGET_REWARD[GadgetKind.TOFFOLI],)
        kind = GadgetKind.TOFFOLI
    term = state.terminal
    penalty = 0.0
    if term == Terminal.EXHAUSTED:
        penalty = -state.penalty_gamma * state.residual.slice_rank()
    return state, StepOutcome(reward, kind, term, auto, penalty)


def toffoli_favoring_step(state: GameState, u: int) -> GameState:
    """Step with the Toffoli-favoring rule switched on for this move."""
    saved = state.toffoli_favoring
    state.toffoli_favoring = True
    try:
        step(state, u)
    finally:
        state.toffoli_favoring = saved
    return state


def annotate(factors: Sequence[int], n: int, gadgets_enabled: bool = True) -> Decomposition:
    """Replay ``factors`` through gadget detection and record the gadgets found."""
    history: List[int] = []
    gadgets: List[Gadget] = []
    barrier = 0
    for u in factors:
        history.append(u)
        if not gadgets_enabled:
            continue
        kind = detect_gadget(history, barrier, barrier)
        if kind is not None:
            span = 7 if kind == GadgetKind.TOFFOLI else 3
            gadgets.append(Gadget(kind, len(history) - span))
            barrier = len(history)
    return Decomposition(n, list(factors), gadgets)


def naive_decomposition(t: SignatureTensor, gadgets: bool = True) -> Decomposition:
    """Entry-by-entry decomposition: a Toffoli gadget per off-diagonal triple,
    a CS gadget per pair block and a single factor per diagonal entry.

    Requires ``T[i,i,j] == T[i,j,j]``, which every decomposable tensor satisfies.
    """
    if not t.is_waring_consistent():
        raise InvalidDecompositionError("tensor is not a sum of symmetric cubes")
    n = t.n
    factors: List[int] = []
    found: List[Gadget] = []
    entries = t.entries()
    for i, j, k in entries:
        if i < j < k:
            found.append(Gadget(GadgetKind.TOFFOLI, len(factors)))
            a, b, c = 1 << i, 1 << j, 1 << k
            factors += [a, b, c] + toffoli_completion(a, b, c)
    for i, j, k in entries:
        if i == j < k:
            found.append(Gadget(GadgetKind.CS, len(factors)))
            factors += [1 << i, 1 << k, (1 << i) | (1 << k)]
    factors += [1 << i for i, j, k in entries if i == j == k]
    return Decomposition(n, factors, found if gadgets else [])


def naive_cost(t: SignatureTensor, gadgets: bool = True) -> int:
    """Equivalent T-count of :func:`naive_decomposition` without building it."""
    triples = pairs = diag = 0
    for i, j, k in t.entries():
        if i < j < k:
            triples += 1
        elif i == j < k:
            pairs += 1
        elif i == j == k:
            diag += 1
    return 2 * (triples + pairs) + diag if gadgets else 7 * triples + 3 * pairs + diag


# -- synthetic demonstrations ------------------------------------------------


@dataclass(frozen=True)
class DemoParams:
    n: int = 6
    r_max: int = 125
    p_zero: float = 0.75
    p_any_gadget: float = 0.9
    gadget_count_max: int = 15
    p_toffoli: float = 0.6

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("demonstrations need n >= 3 for Toffoli gadgets")
        if self.r_max < 7 or self.gadget_count_max < 1:
            raise ValueError("r_max must be >= 7 and gadget_count_max >= 1")
        for p in (self.p_zero, self.p_any_gadget, self.p_toffoli):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.p_zero >= 1.0:
            raise ValueError("p_zero must be < 1 so nonzero factors exist")


def _random_factor(rng: random.Random, n: int, p_zero: float) -> int:
    while True:
        u = 0
        for i in range(n):
            if rng.random() >= p_zero:
                u |= 1 << i
        if u:
            return u


def _random_independent(rng: random.Random, n: int, k: int, p_zero: float) -> List[int]:
    while True:
        vs = [_random_factor(rng, n, p_zero) for _ in range(k)]
        if gf2.independent(vs):
            return vs


def synthetic_demo(seed, params: DemoParams = DemoParams()) -> Tuple[SignatureTensor, Decomposition]:
    rng = random.Random(seed)
    n = params.n
    want_gadget = rng.random() < params.p_any_gadget
    r = rng.randint(1, params.r_max)
    if want_gadget and r < 7:
        # room for at least one gadget of either kind
        r = rng.randint(7, params.r_max)
    factors = [_random_factor(rng, n, params.p_zero) for _ in range(r)]
    gadgets: List[Gadget] = []
    if want_gadget:
        # truncating by the worst-case span keeps the kind draw independent
        # of the truncation, so the Toffoli share stays at p_toffoli
        count = min(rng.randint(1, params.gadget_count_max), r // 7)
        kept = [
            GadgetKind.TOFFOLI if rng.random() < params.p_toffoli else GadgetKind.CS
            for _ in range(count)
        ]
        used = sum(7 if k == GadgetKind.TOFFOLI else 3 for k in kept)
        # uniform interleaving of gadget blocks with the remaining free slots
        slots = ["g"] * len(kept) + ["f"] * (r - used)
        rng.shuffle(slots)
        pos, gi = 0, 0
        for s in slots:
            if s == "f":
                pos += 1
                continue
            kind = kept[gi]
            gi += 1
            if kind == GadgetKind.TOFFOLI:
                a, b, c = _random_independent(rng, n, 3, params.p_zero)
                block = [a, b, c] + toffoli_completion(a, b, c)
            else:
                a, b = _random_independent(rng, n, 2, params.p_zero)
                block = [a, b, a ^ b]
            factors[pos:pos + len(block)] = block
            gadgets.append(Gadget(kind, pos))
            pos += len(block)
    d = Decomposition(n, factors, gadgets)
    return from_decomposition(factors, n), d


def augment_swap(d: Decomposition, seed) -> Decomposition:
    """Swap the last non-gadget factor with a uniformly chosen non-gadget one."""
    rng = random.Random(seed)
    mask = d.gadget_mask()
    free = [i for i, m in enumerate(mask) if not m]
    if len(free) < 2:
        return Decomposition(d.n, list(d.factors), list(d.gadgets))
    last = free[-1]
    other = rng.choice(free[:-1])
    factors = list(d.factors)
    factors[last], factors[other] = factors[other], factors[last]
    return Decomposition(d.n, factors, list(d.gadgets))
