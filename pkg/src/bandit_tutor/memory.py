"""Decaying memory traces and review weights for previously mastered activities.

Every presentation of an activity leaves a trace that decays exponentially
with its own time constant; the constants grow with the presentation index,
so later exposures fade more slowly. Aggregate strength is a weighted mean of
the live traces. When strength falls below a threshold, the activity earns a
re-entry weight and can be recommended again for review.

Disabled by default: the simulation experiments run without forgetting, and
the threshold/multiplier defaults here are engineering choices, not values
fitted to data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import config


def default_trace_weight(index: int) -> float:
    """Uniform trace weights (xi_i = 1)."""
    return 1.0


def default_decay_constant(index: int) -> float:
    """Linearly growing decay constants (tau_i = i, 1-based)."""
    return float(index)


@dataclass
class MemoryTrace:
    initial_value: float          # value at activation, >= 0
    activation_time: float        # seconds (logical clock supplied by caller)
    decay_constant: float         # tau, strictly increasing across traces
    weight: float = 1.0           # xi, fixed at creation


@dataclass
class MemoryConfig:
    enabled: bool = False
    memory_threshold: float = config.MEMORY_THRESHOLD
    memory_multiplier: float = config.MEMORY_MULTIPLIER
    trace_weight_rule: Callable[[int], float] = default_trace_weight
    decay_rule: Callable[[int], float] = default_decay_constant

    def __post_init__(self) -> None:
        if self.memory_threshold < 0:
            raise ValueError(f"memory_threshold must be >= 0, got {self.memory_threshold}")
        if self.memory_multiplier < 0:
            raise ValueError(f"memory_multiplier must be >= 0, got {self.memory_multiplier}")


def trace_value(trace: MemoryTrace, now: float) -> float:
    """Current value of one trace: initial * exp(-elapsed / tau)."""
    elapsed = now - trace.activation_time
    if elapsed < 0:
        raise ValueError("now precedes the trace's activation time")
    return trace.initial_value * math.exp(-elapsed / trace.decay_constant)


def memory_strength(
    traces: Sequence[MemoryTrace],
    weights: Sequence[float],
    now: float,
) -> float:
    """Weighted mean of trace values; a convex combination, so it is bounded
    by the smallest and largest constituent trace value."""
    if not traces:
        raise ValueError("need at least one trace")
    if len(weights) != len(traces):
        raise ValueError("one weight per trace required")
    if any(w <= 0 for w in weights):
        raise ValueError("trace weights must be positive")
    total = sum(weights)
    return sum(w * trace_value(t, now) for t, w in zip(traces, weights)) / total


def learned_set_weight(strength: float, cfg: MemoryConfig) -> float:
    """Re-entry weight for a mastered activity: multiplier * max(0, threshold - strength).

    Zero whenever the memory is still at or above the threshold.
    """
    return cfg.memory_multiplier * max(0.0, cfg.memory_threshold - strength)


class TraceStore:
    """Per-session trace bookkeeping, keyed by activity id."""

    def __init__(self, cfg: MemoryConfig | None = None):
        self.cfg = cfg if cfg is not None else MemoryConfig()
        self._traces: dict[str, list[MemoryTrace]] = {}

    def record_presentation(self, activity_id: str, now: float) -> MemoryTrace:
        """Append the next trace for an activity.

        The trace index (1-based) drives both the decay constant and the
        weight, so two presentations at the same timestamp still get distinct,
        strictly increasing decay constants.
        """
        traces = self._traces.setdefault(activity_id, [])
        index = len(traces) + 1
        trace = MemoryTrace(
            initial_value=1.0,
            activation_time=now,
            decay_constant=self.cfg.decay_rule(index),
            weight=self.cfg.trace_weight_rule(index),
        )
        if traces and trace.decay_constant <= traces[-1].decay_constant:
            raise ValueError("decay constants must strictly increase across traces")
        traces.append(trace)
        return trace

    def traces(self, activity_id: str) -> list[MemoryTrace]:
        return self._traces.get(activity_id, [])

    def strength(self, activity_id: str, now: float) -> float:
        traces = self._traces.get(activity_id)
        if not traces:
            raise KeyError(f"no traces recorded for {activity_id!r}")
        return memory_strength(traces, [t.weight for t in traces], now)

    def to_dict(self) -> dict[str, list[dict]]:
        return {
            aid: [
                {
                    "initial_value": t.initial_value,
                    "activation_time": t.activation_time,
                    "decay_constant": t.decay_constant,
                    "weight": t.weight,
                }
                for t in traces
            ]
            for aid, traces in self._traces.items()
        }

    @classmethod
    def from_dict(cls, data: dict[str, list[dict]], cfg: MemoryConfig | None = None) -> "TraceStore":
        store = cls(cfg)
        for aid, traces in data.items():
            store._traces[aid] = [MemoryTrace(**t) for t in traces]
        return store
