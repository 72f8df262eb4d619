"""Hierarchical tutoring session: one concept bandit over a section plus one
problem bandit per concept.

A session is a single serialized state machine. Each step is
select-concept -> select-problem -> record-answer, where recording an answer
runs a fixed update pipeline:

  1. problem bandit: append raw correctness and its reward; a correct answer
     masters the problem (one-time correctness, never re-asked)
  2. difficulty rank shift across the concept's problem multipliers
  3. concept bandit: append difficulty-scaled correctness and its reward,
     then the windowed mastery check
  4. bank exhaustion: a concept with every problem mastered is mastered
     regardless of the threshold
  5. unlock newly available concepts (unlock pseudo-reward)
  6. record a memory trace for the concept
  7. completion check

The session RNG is consumed in a fixed order (concept draw, then problem
draw) and only by next_recommendation when no recommendation is outstanding,
so a (seed, answer sequence) pair replays bit-identically and snapshots
capture the stream position exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .bandit import (
    ActivityState,
    BanditConfig,
    Belief,
    check_mastery,
    compute_reward,
    concept_bandit_config,
    problem_bandit_config,
    refresh_zpd,
    select_activity,
    selection_probabilities,
    update_weight,
)
from .curriculum import Curriculum
from .difficulty import DifficultyConfig, initial_multiplier, maple_update, scale_correctness
from .memory import MemoryConfig, TraceStore, learned_set_weight

SNAPSHOT_VERSION = 1


class SessionError(RuntimeError):
    """Contract violation by the caller (bad answer, finished session, ...)."""


class SnapshotError(ValueError):
    """Unusable snapshot payload: wrong version or corrupt structure."""


@dataclass
class EngineConfig:
    """Bundle of all per-session configuration."""

    concept_bandit: BanditConfig = field(default_factory=concept_bandit_config)
    problem_bandit: BanditConfig = field(default_factory=problem_bandit_config)
    difficulty: DifficultyConfig = field(default_factory=DifficultyConfig)
    difficulty_enabled: bool = True
    memory: MemoryConfig = field(default_factory=MemoryConfig)


class LogEntry(NamedTuple):
    timestamp: float
    concept_id: str
    problem_id: str
    raw_correct: int
    scaled_correctness: float


class Recommendation(NamedTuple):
    concept_id: str
    problem_id: str
    prompt: str
    choices: tuple[str, ...]


@dataclass
class AnswerReport:
    """What one recorded answer changed."""

    concept_id: str
    problem_id: str
    raw_correct: int
    scaled_correctness: float
    problem_mastered: bool
    concept_mastered: str | None  # "threshold" | "exhausted" | None
    unlocked: list[str]
    complete: bool


class Session:
    """One student working through one section."""

    def __init__(
        self,
        curriculum: Curriculum,
        section_id: str,
        cfg: EngineConfig,
        seed: int,
        session_id: str = "session",
    ):
        self.curriculum = curriculum
        self.section_id = section_id
        self.cfg = cfg
        self.session_id = session_id
        self.rng = random.Random(seed)
        self.memory = TraceStore(cfg.memory)
        self.log: list[LogEntry] = []
        self.pending: tuple[str, str] | None = None
        self.complete = False

        section = curriculum.section(section_id)
        self._concept_ids = section.concept_ids
        self._prereqs = {
            cid: curriculum.concepts[cid].prerequisite_ids for cid in self._concept_ids
        }
        self._problem_ids = {
            cid: curriculum.concepts[cid].problem_ids for cid in self._concept_ids
        }
        self._difficulties = {
            cid: {pid: curriculum.problems[pid].difficulty for pid in pids}
            for cid, pids in self._problem_ids.items()
        }

        self.concept_states: dict[str, ActivityState] = {
            cid: ActivityState(cid) for cid in self._concept_ids
        }
        # Session-start activation wave: roots come up with the initial weight.
        refresh_zpd(self.concept_states, self._prereqs, cfg.concept_bandit.initial_weight)

        # Problem trees have depth one: the whole bank activates immediately.
        self.problem_states: dict[str, dict[str, ActivityState]] = {}
        for cid in self._concept_ids:
            states = {pid: ActivityState(pid) for pid in self._problem_ids[cid]}
            refresh_zpd(states, {}, cfg.problem_bandit.initial_weight)
            if cfg.difficulty_enabled:
                for pid, state in states.items():
                    state.multiplier = initial_multiplier(
                        self._difficulties[cid][pid], cfg.difficulty.xi_skew
                    )
            self.problem_states[cid] = states

    # -- selection ---------------------------------------------------------

    def _concept_candidates(self, now: float) -> list[tuple[str, float, float]]:
        candidates = []
        for cid in self._concept_ids:
            state = self.concept_states[cid]
            if state.belief is Belief.UNLOCKED:
                candidates.append((cid, update_weight(state), 1.0))
        if self.cfg.memory.enabled:
            # Mastered concepts re-enter for review once their memory decays;
            # exhausted banks have nothing left to ask.
            for cid in self._concept_ids:
                state = self.concept_states[cid]
                if state.belief is not Belief.MASTERED:
                    continue
                if not any(
                    s.belief is Belief.UNLOCKED
                    for s in self.problem_states[cid].values()
                ):
                    continue
                traces = self.memory.traces(cid)
                if not traces:
                    continue
                strength = self.memory.strength(cid, now)
                candidates.append((cid, learned_set_weight(strength, self.cfg.memory), 1.0))
        return candidates

    def _problem_candidates(self, concept_id: str) -> list[tuple[str, float, float]]:
        return [
            (pid, update_weight(state), state.multiplier)
            for pid, state in self.problem_states[concept_id].items()
            if state.belief is Belief.UNLOCKED
        ]

    def next_recommendation(self, now: float | None = None) -> Recommendation:
        """Pick (concept, problem) for the student.

        Idempotent while a recommendation is outstanding: repeated calls
        return the same problem without consuming the RNG. `now` only matters
        when memory-based review is enabled; it defaults to the last answer's
        timestamp.
        """
        if self.complete:
            raise SessionError("session already complete")
        if self.pending is not None:
            cid, pid = self.pending
            problem = self.curriculum.problems[pid]
            return Recommendation(cid, pid, problem.prompt, problem.choices)

        if now is None:
            now = self.log[-1].timestamp if self.log else 0.0
        concepts = self._concept_candidates(now)
        if not concepts:
            raise SessionError(
                "internal error: no selectable concept but session is incomplete"
            )
        gamma = self.cfg.concept_bandit.gamma
        cid = select_activity(selection_probabilities(concepts, gamma), self.rng)

        problems = self._problem_candidates(cid)
        if not problems:
            raise SessionError(f"internal error: no open problems under {cid!r}")
        gamma = self.cfg.problem_bandit.gamma
        pid = select_activity(selection_probabilities(problems, gamma), self.rng)

        self.pending = (cid, pid)
        problem = self.curriculum.problems[pid]
        return Recommendation(cid, pid, problem.prompt, problem.choices)

    # -- updates -----------------------------------------------------------

    def record_answer(self, problem_id: str, raw_correct: int, now: float) -> AnswerReport:
        """Run the full update pipeline for the outstanding recommendation."""
        if self.complete:
            raise SessionError("session already complete")
        if raw_correct not in (0, 1):
            raise ValueError(f"raw correctness must be 0 or 1, got {raw_correct}")
        if self.pending is None:
            raise SessionError("no outstanding recommendation to answer")
        cid, expected_pid = self.pending
        if problem_id != expected_pid:
            raise SessionError(
                f"answer for {problem_id!r} does not match the outstanding "
                f"recommendation {expected_pid!r}"
            )
        cfg = self.cfg
        difficulty = self._difficulties[cid][problem_id]
        scaled = (
            scale_correctness(raw_correct, difficulty)
            if cfg.difficulty_enabled
            else float(raw_correct)
        )
        self.log.append(LogEntry(now, cid, problem_id, raw_correct, scaled))

        # (1) problem bandit
        pstate = self.problem_states[cid][problem_id]
        pstate.correctness_history.append(float(raw_correct))
        pstate.reward_history.append(
            compute_reward(pstate.correctness_history, cfg.problem_bandit.history_length)
        )
        problem_mastered = False
        if raw_correct == 1:
            pstate.belief = Belief.MASTERED
            problem_mastered = True

        # (2) difficulty rank shift
        if cfg.difficulty_enabled:
            states = self.problem_states[cid]
            updated = maple_update(
                {pid: s.multiplier for pid, s in states.items()},
                self._difficulties[cid],
                problem_id,
                raw_correct,
                cfg.difficulty.alpha,
            )
            for pid, m in updated.items():
                states[pid].multiplier = m

        # (3) concept bandit
        cstate = self.concept_states[cid]
        cstate.correctness_history.append(scaled)
        cstate.reward_history.append(
            compute_reward(cstate.correctness_history, cfg.concept_bandit.history_length)
        )
        concept_mastered = None
        if cstate.belief is not Belief.MASTERED and check_mastery(
            cstate.correctness_history,
            cfg.concept_bandit.history_length,
            cfg.concept_bandit.mastery_threshold,
        ):
            cstate.belief = Belief.MASTERED
            concept_mastered = "threshold"

        # (4) bank exhaustion overrides the threshold
        if cstate.belief is not Belief.MASTERED and all(
            s.belief is Belief.MASTERED for s in self.problem_states[cid].values()
        ):
            cstate.belief = Belief.MASTERED
            concept_mastered = "exhausted"

        # (5) unlock wave
        unlocked = refresh_zpd(
            self.concept_states, self._prereqs, cfg.concept_bandit.unlock_weight
        )

        # (6) memory trace (only meaningful when review weights are live)
        if cfg.memory.enabled:
            self.memory.record_presentation(cid, now)

        # (7) completion
        self.complete = all(
            s.belief is Belief.MASTERED for s in self.concept_states.values()
        )
        self.pending = None
        return AnswerReport(
            concept_id=cid,
            problem_id=problem_id,
            raw_correct=raw_correct,
            scaled_correctness=scaled,
            problem_mastered=problem_mastered,
            concept_mastered=concept_mastered,
            unlocked=unlocked,
            complete=self.complete,
        )

    # -- views -------------------------------------------------------------

    def progress(self) -> dict:
        """Student-safe progress summary (no difficulties, no answers)."""
        concepts = []
        for cid in self._concept_ids:
            states = self.problem_states[cid]
            concepts.append(
                {
                    "concept_id": cid,
                    "belief": self.concept_states[cid].belief.value,
                    "problems_total": len(states),
                    "problems_mastered": sum(
                        1 for s in states.values() if s.belief is Belief.MASTERED
                    ),
                }
            )
        return {
            "complete": self.complete,
            "questions_answered": len(self.log),
            "concepts": concepts,
        }

    def diagnostics(self) -> dict:
        """Instructor/debug view of the raw bandit internals."""
        return {
            "session_id": self.session_id,
            "section_id": self.section_id,
            "complete": self.complete,
            "pending": list(self.pending) if self.pending else None,
            "concepts": [
                {
                    "concept_id": cid,
                    "belief": state.belief.value,
                    "weight": update_weight(state),
                    "correctness_history": list(state.correctness_history),
                    "reward_history": list(state.reward_history),
                    "in_zpd": state.belief is Belief.UNLOCKED,
                }
                for cid, state in self.concept_states.items()
            ],
            "problems": {
                cid: [
                    {
                        "problem_id": pid,
                        "belief": state.belief.value,
                        "weight": update_weight(state),
                        "multiplier": state.multiplier,
                        "correctness_history": list(state.correctness_history),
                        "reward_history": list(state.reward_history),
                    }
                    for pid, state in states.items()
                ]
                for cid, states in self.problem_states.items()
            },
            "log": [list(entry) for entry in self.log],
        }

    # -- persistence ---------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-serializable snapshot, including the RNG stream position.

        restore_session(snapshot(s), curriculum) reproduces the session
        exactly: subsequent draws are identical. Custom memory rules are not
        serialized; snapshots assume the default trace weight/decay rules.
        """
        version, internal, gauss = self.rng.getstate()
        cfg = self.cfg
        return {
            "version": SNAPSHOT_VERSION,
            "session_id": self.session_id,
            "section_id": self.section_id,
            "config": {
                "concept_bandit": _bandit_config_dict(cfg.concept_bandit),
                "problem_bandit": _bandit_config_dict(cfg.problem_bandit),
                "difficulty": {"xi_skew": cfg.difficulty.xi_skew, "alpha": cfg.difficulty.alpha},
                "difficulty_enabled": cfg.difficulty_enabled,
                "memory": {
                    "enabled": cfg.memory.enabled,
                    "memory_threshold": cfg.memory.memory_threshold,
                    "memory_multiplier": cfg.memory.memory_multiplier,
                },
            },
            "concepts": {
                cid: _activity_dict(state) for cid, state in self.concept_states.items()
            },
            "problems": {
                cid: {pid: _activity_dict(s) for pid, s in states.items()}
                for cid, states in self.problem_states.items()
            },
            "memory_traces": self.memory.to_dict(),
            "rng_state": [version, list(internal), gauss],
            "log": [list(entry) for entry in self.log],
            "pending": list(self.pending) if self.pending else None,
            "complete": self.complete,
        }


def _bandit_config_dict(cfg: BanditConfig) -> dict:
    return {
        "gamma": cfg.gamma,
        "history_length": cfg.history_length,
        "mastery_threshold": cfg.mastery_threshold,
        "initial_weight": cfg.initial_weight,
        "unlock_weight": cfg.unlock_weight,
    }


def _activity_dict(state: ActivityState) -> dict:
    return {
        "belief": state.belief.value,
        "correctness_history": list(state.correctness_history),
        "reward_history": list(state.reward_history),
        "multiplier": state.multiplier,
    }


def _restore_activity(state: ActivityState, data: dict) -> None:
    state.belief = Belief(data["belief"])
    state.correctness_history = [float(v) for v in data["correctness_history"]]
    state.reward_history = [float(v) for v in data["reward_history"]]
    state.multiplier = float(data["multiplier"])


def start_session(
    curriculum: Curriculum,
    section_id: str,
    cfg: EngineConfig | None = None,
    seed: int = 0,
    session_id: str = "session",
) -> Session:
    """Create a fresh session on one section.

    Root concepts and all problems activate with the initial pseudo-reward;
    problem multipliers start on the difficulty bell when difficulty handling
    is enabled. Deterministic for a fixed seed.
    """
    try:
        curriculum.section(section_id)
    except KeyError:
        raise SessionError(f"unknown section {section_id!r}") from None
    return Session(curriculum, section_id, cfg or EngineConfig(), seed, session_id)


def restore_session(payload: dict, curriculum: Curriculum) -> Session:
    """Rebuild a session from a snapshot; inverse of Session.snapshot()."""
    if not isinstance(payload, dict):
        raise SnapshotError("snapshot payload must be an object")
    if payload.get("version") != SNAPSHOT_VERSION:
        raise SnapshotError(
            f"unsupported snapshot version {payload.get('version')!r}"
        )
    try:
        cfg_raw = payload["config"]
        cfg = EngineConfig(
            concept_bandit=BanditConfig(**cfg_raw["concept_bandit"]),
            problem_bandit=BanditConfig(**cfg_raw["problem_bandit"]),
            difficulty=DifficultyConfig(**cfg_raw["difficulty"]),
            difficulty_enabled=bool(cfg_raw["difficulty_enabled"]),
            memory=MemoryConfig(**cfg_raw["memory"]),
        )
        session = Session(
            curriculum,
            payload["section_id"],
            cfg,
            seed=0,
            session_id=payload["session_id"],
        )
        if set(payload["concepts"]) != set(session.concept_states):
            raise SnapshotError("snapshot concepts do not match the curriculum")
        for cid, data in payload["concepts"].items():
            _restore_activity(session.concept_states[cid], data)
        for cid, states in payload["problems"].items():
            if set(states) != set(session.problem_states[cid]):
                raise SnapshotError("snapshot problems do not match the curriculum")
            for pid, data in states.items():
                _restore_activity(session.problem_states[cid][pid], data)
        session.memory = TraceStore.from_dict(payload["memory_traces"], cfg.memory)
        version, internal, gauss = payload["rng_state"]
        session.rng.setstate((version, tuple(internal), gauss))
        session.log = [
            LogEntry(float(t), cid, pid, int(raw), float(scaled))
            for t, cid, pid, raw, scaled in payload["log"]
        ]
        pending = payload["pending"]
        session.pending = (pending[0], pending[1]) if pending else None
        session.complete = bool(payload["complete"])
    except SnapshotError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SnapshotError(f"corrupt snapshot payload: {exc}") from exc
    return session
