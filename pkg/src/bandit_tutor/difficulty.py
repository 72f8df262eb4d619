"""Difficulty-aware math: correctness scaling, initial multipliers, rank
updates, and difficulty derivation from response data.

Difficulty scores live on a real-valued [1, 5] scale centered at 3. All
functions here are pure; the per-session multiplier map is owned by the
session engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from . import config


@dataclass
class DifficultyConfig:
    xi_skew: float = config.DIFFICULTY_SKEW  # width of the initial-multiplier bell
    alpha: float = config.RANK_FACTOR        # multiplicative rank step, > 1

    def __post_init__(self) -> None:
        if self.xi_skew <= 0:
            raise ValueError(f"xi_skew must be positive, got {self.xi_skew}")
        if self.alpha <= 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")


def scale_correctness(raw: int, difficulty: float) -> float:
    """Scale a binary correctness by a sigmoid of the centered difficulty.

    The multiplier sigma(d - 3) + 1/2 lies in (0.5, 1.5): correct answers on
    hard problems count for more than 1, correct answers on easy problems for
    less. Incorrect answers stay exactly 0.
    """
    if raw not in (0, 1):
        raise ValueError(f"raw correctness must be 0 or 1, got {raw}")
    if not 1.0 <= difficulty <= 5.0:
        raise ValueError(f"difficulty must be in [1, 5], got {difficulty}")
    if raw == 0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-(difficulty - 3.0))) + 0.5


def initial_multiplier(difficulty: float, xi: float = config.DIFFICULTY_SKEW) -> float:
    """Gaussian bell over difficulty, peaked at d=3.

    Skews fresh problem weights toward intermediate difficulty; very easy and
    very hard problems start discouraged symmetrically.
    """
    if not 1.0 <= difficulty <= 5.0:
        raise ValueError(f"difficulty must be in [1, 5], got {difficulty}")
    if xi <= 0:
        raise ValueError(f"xi must be positive, got {xi}")
    centered = difficulty - 3.0
    return math.exp(-(centered * centered) / xi)


def maple_update(
    multipliers: Mapping[str, float],
    difficulties: Mapping[str, float],
    answered: str,
    correct: int,
    alpha: float = config.RANK_FACTOR,
) -> dict[str, float]:
    """Rank shift after one answer (question-grade step of the MAPLE bandit).

    On a correct answer, strictly harder problems gain a factor of alpha and
    strictly easier ones lose one; an incorrect answer mirrors that. Problems
    of equal difficulty to the answered one (itself included) are untouched,
    so a correct-then-incorrect pair on the same problem cancels exactly.
    """
    if answered not in multipliers or answered not in difficulties:
        raise KeyError(f"answered problem {answered!r} missing from maps")
    if alpha <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    pivot = difficulties[answered]
    up, down = (alpha, 1.0 / alpha) if correct else (1.0 / alpha, alpha)
    updated = {}
    for pid, m in multipliers.items():
        d = difficulties[pid]
        if d > pivot:
            m = m * up
        elif d < pivot:
            m = m * down
        updated[pid] = m
    return updated


def derive_difficulty(inaccuracy_rate: float) -> float:
    """Map an observed inaccuracy rate in [0, 1] linearly onto [1, 5]."""
    if not 0.0 <= inaccuracy_rate <= 1.0:
        raise ValueError(f"inaccuracy rate must be in [0, 1], got {inaccuracy_rate}")
    return 4.0 * inaccuracy_rate + 1.0
