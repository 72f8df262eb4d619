"""Core progression bandit over one activity tree.

One bandit instance tracks a set of activities (concepts, or the problems of
one concept), each with a correctness history, a reward history, and a belief
state. Selection is probabilistic over the unlocked frontier: weights are the
running mean of rewards, multiplied by a per-activity multiplier, clamped at
zero, normalized, then mixed with a uniform exploration floor.

A bandit instance is a single-session state machine; distinct instances are
independent and never share state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from . import config


class Belief(str, Enum):
    """Tutor-side label for one activity."""

    LOCKED = "locked"
    UNLOCKED = "unlocked_unmastered"
    MASTERED = "mastered"


@dataclass
class ActivityState:
    """Per-activity bandit state.

    correctness_history holds real-valued correctness (difficulty scaling can
    push entries above 1); reward_history holds learning-progress rewards plus
    the pseudo-reward entries appended at activation and unlock, so
    presentation_count counts those too.
    """

    activity_id: str
    belief: Belief = Belief.LOCKED
    correctness_history: list[float] = field(default_factory=list)
    reward_history: list[float] = field(default_factory=list)
    multiplier: float = 1.0  # used only by problem bandits

    @property
    def presentation_count(self) -> int:
        return len(self.reward_history)


@dataclass
class BanditConfig:
    """Hyperparameters for one bandit level.

    history_length is the reward/mastery window L (even, >= 2); gamma is the
    exploration rate in [0, 1); mastery_threshold is strict and must lie in
    (0, 1.5] because scaled correctness tops out below 1.5.
    """

    gamma: float = config.EXPLORATION_RATE
    history_length: int = config.CONCEPT_HISTORY_LENGTH
    mastery_threshold: float = config.MASTERY_THRESHOLD
    initial_weight: float = config.INITIAL_WEIGHT
    unlock_weight: float = config.UNLOCK_WEIGHT
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.history_length < 2 or self.history_length % 2:
            raise ValueError(
                f"history_length must be an even integer >= 2, got {self.history_length}"
            )
        if not 0.0 < self.mastery_threshold <= 1.5:
            raise ValueError(
                f"mastery_threshold must be in (0, 1.5], got {self.mastery_threshold}"
            )


def concept_bandit_config(**overrides) -> BanditConfig:
    return BanditConfig(history_length=config.CONCEPT_HISTORY_LENGTH, **overrides)


def problem_bandit_config(**overrides) -> BanditConfig:
    return BanditConfig(history_length=config.PROBLEM_HISTORY_LENGTH, **overrides)


def compute_reward(history: Sequence[float], window: int) -> float:
    """Learning-progress reward: newest half-window mean minus the one before.

    The history is left-padded with zeros when shorter than `window`, i.e.
    hypothetical earlier attempts count as incorrect.
    """
    if window < 2 or window % 2:
        raise ValueError(f"window must be an even integer >= 2, got {window}")
    half = window // 2
    n = len(history)
    if n >= window:
        tail = history[n - window :]
    else:
        tail = [0.0] * (window - n) + list(history)
    return sum(tail[half:]) / half - sum(tail[:half]) / half


def update_weight(state: ActivityState) -> float:
    """Weight of an activity: arithmetic mean of its reward history.

    Pseudo-rewards seeded at activation/unlock are part of the history, so a
    freshly activated activity already has a well-defined weight.
    """
    rewards = state.reward_history
    if not rewards:
        return 0.0
    return sum(rewards) / len(rewards)


def check_mastery(history: Sequence[float], window: int, threshold: float) -> bool:
    """True iff the zero-padded mean of the last `window` entries strictly
    exceeds `threshold`."""
    if window < 2 or window % 2:
        raise ValueError(f"window must be an even integer >= 2, got {window}")
    n = len(history)
    tail_sum = sum(history[n - window :]) if n >= window else sum(history)
    return tail_sum / window > threshold


def selection_probabilities(
    candidates: Sequence[tuple[str, float, float]],
    gamma: float,
) -> dict[str, float]:
    """Selection distribution over (activity_id, weight, multiplier) triples.

    Effective weights are max(weight * multiplier, 0); if everything clamps to
    zero the normalized weights fall back to uniform. The result mixes the
    normalized weights with a uniform exploration floor of gamma / n, so it
    always sums to 1 and no candidate drops below that floor.
    """
    if not candidates:
        raise ValueError("candidate set must be non-empty")
    effective = [max(weight * multiplier, 0.0) for _, weight, multiplier in candidates]
    total = sum(effective)
    n = len(candidates)
    if total <= 0.0:
        normalized = [1.0 / n] * n
    else:
        normalized = [w / total for w in effective]
    floor = gamma / n
    return {
        cand[0]: norm * (1.0 - gamma) + floor
        for cand, norm in zip(candidates, normalized)
    }


def select_activity(probabilities: Mapping[str, float], rng: random.Random) -> str:
    """Draw one activity id; consumes exactly one uniform variate."""
    if not probabilities:
        raise ValueError("probability map must be non-empty")
    total = sum(probabilities.values())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"probabilities must sum to 1, got {total}")
    r = rng.random() * total
    acc = 0.0
    last = None
    for activity_id, p in probabilities.items():
        acc += p
        last = activity_id
        if r < acc:
            return activity_id
    return last  # fp slack: r landed on the far edge


def refresh_zpd(
    states: Mapping[str, ActivityState],
    prerequisites: Mapping[str, Iterable[str]],
    unlock_reward: float,
) -> list[str]:
    """Unlock every locked activity whose prerequisites are all mastered.

    Newly unlocked activities get `unlock_reward` appended as a pseudo-reward.
    The session-start wave uses the activation weight; later waves use the
    unlock weight. Returns the newly unlocked ids in state order. Unlocks do
    not cascade within one call (a fresh unlock is not mastered).
    """
    unlocked: list[str] = []
    for activity_id, state in states.items():
        if state.belief is not Belief.LOCKED:
            continue
        if all(
            states[pre].belief is Belief.MASTERED
            for pre in prerequisites.get(activity_id, ())
        ):
            state.belief = Belief.UNLOCKED
            state.reward_history.append(unlock_reward)
            unlocked.append(activity_id)
    return unlocked
