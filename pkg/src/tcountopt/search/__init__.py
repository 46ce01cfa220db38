"""Planning over the tensor game: prior, MCTS, optimizer loop and exact oracle."""

from ..game import toffoli_favoring_step
from .mcts import SearchConfig, play_game, select_action
from .optimizer import optimize
from .oracle import min_waring_rank
from .prior import prior_policy

__all__ = [
    "SearchConfig", "play_game", "select_action", "optimize",
    "min_waring_rank", "prior_policy", "toffoli_favoring_step",
]
