"""Three-group simulation harness: random sequencing vs. the hierarchical
bandit with and without difficulty handling.

Each simulated student is an independent, fully seeded state machine, so the
whole experiment is a pure function of (plan, seeds). The two bandit groups
run every section to completion; the random group replays the exact question
budget of the difficulty-agnostic student with the same index (common random
numbers, variance reduction).
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .curriculum import Curriculum
from .memory import MemoryConfig
from .seeding import derive_seed
from .session import EngineConfig, start_session
from .students import BktParams, BktStudent, synthesize_bkt_params

GROUP_RANDOM = "random"
GROUP_AGNOSTIC = "agnostic"   # hierarchical bandit, difficulty ignored
GROUP_FULL = "full"           # hierarchical bandit, difficulty included
ALL_GROUPS = (GROUP_RANDOM, GROUP_AGNOSTIC, GROUP_FULL)


@dataclass
class ExperimentPlan:
    curriculum: Curriculum
    groups: tuple[str, ...] = ALL_GROUPS
    students_per_group: int = 500
    base_seed: int = 0
    bkt_params: dict[str, BktParams] | None = None  # None -> synthesized
    mcm_enabled: bool = False

    def __post_init__(self) -> None:
        if self.students_per_group < 1:
            raise ValueError("students_per_group must be >= 1")
        unknown = set(self.groups) - set(ALL_GROUPS)
        if not self.groups or unknown:
            raise ValueError(f"groups must be a non-empty subset of {ALL_GROUPS}")

    def resolve_params(self) -> dict[str, BktParams]:
        if self.bkt_params is not None:
            return self.bkt_params
        concept_ids = [
            cid for s in self.curriculum.sections for cid in s.concept_ids
        ]
        return synthesize_bkt_params(concept_ids, derive_seed(self.base_seed, "bkt-params"))


@dataclass
class StudentRun:
    group: str
    student_index: int
    # mastery[q] = estimate after q questions; mastery[0] is the starting value
    mastery: list[float]
    # one (section_id, concept_id, problem_id, correct) tuple per question
    questions: list[tuple[str, str, str, int]]
    section_counts: dict[str, int]

    @property
    def question_count(self) -> int:
        return len(self.questions)


@dataclass
class GroupCurve:
    mean: list[float]
    stderr: list[float]


@dataclass
class ExperimentResult:
    curves: dict[str, GroupCurve]
    counts: dict[str, list[int]]
    runs: dict[str, list[StudentRun]] = field(default_factory=dict)


def _engine_config(difficulty_enabled: bool, mcm_enabled: bool) -> EngineConfig:
    return EngineConfig(
        difficulty_enabled=difficulty_enabled,
        memory=MemoryConfig(enabled=mcm_enabled),
    )


def _run_mab_student(
    curriculum: Curriculum,
    params: Mapping[str, BktParams],
    student_seed: int,
    group: str,
    student_index: int,
    cfg: EngineConfig,
) -> StudentRun:
    """One bandit-driven student through every section, to completion."""
    student = BktStudent(params, seed=derive_seed(student_seed, "student"))
    mastery = [student.mastery_estimate()]
    questions: list[tuple[str, str, str, int]] = []
    section_counts: dict[str, int] = {}
    for section in curriculum.sections:
        session = start_session(
            curriculum,
            section.id,
            cfg,
            seed=derive_seed(student_seed, "session", section.id),
        )
        asked = 0
        while not session.complete:
            rec = session.next_recommendation(now=float(asked))
            correct = student.sample_response(rec.concept_id)
            student.advance_latent(rec.concept_id)
            student.observe(rec.concept_id, correct)
            session.record_answer(rec.problem_id, correct, now=float(asked))
            asked += 1
            mastery.append(student.mastery_estimate())
            questions.append((section.id, rec.concept_id, rec.problem_id, correct))
        section_counts[section.id] = asked
    return StudentRun(group, student_index, mastery, questions, section_counts)


def run_group_mab(plan: ExperimentPlan, difficulty_enabled: bool) -> list[StudentRun]:
    """Simulate one bandit group; student i uses seed base_seed + i."""
    params = plan.resolve_params()
    group = GROUP_FULL if difficulty_enabled else GROUP_AGNOSTIC
    cfg = _engine_config(difficulty_enabled, plan.mcm_enabled)
    return [
        _run_mab_student(
            plan.curriculum, params, plan.base_seed + i, group, i, cfg
        )
        for i in range(plan.students_per_group)
    ]


def _run_random_student(
    curriculum: Curriculum,
    params: Mapping[str, BktParams],
    student_seed: int,
    student_index: int,
    budget: Mapping[str, int],
) -> StudentRun:
    """Uniform sequencing with the question budget of the matched student.

    Problems answered correctly are removed (the one-time rule applies to
    every group). The budget is spent section by section following the
    matched student's per-section spend; a section's leftover carries forward
    when its bank runs dry. If the entire curriculum is exhausted with budget
    left, the remainder re-asks uniformly over all problems so the matched
    question count stays exact.
    """
    student = BktStudent(params, seed=derive_seed(student_seed, "student"))
    policy_rng = random.Random(derive_seed(student_seed, "random-policy"))
    mastery = [student.mastery_estimate()]
    questions: list[tuple[str, str, str, int]] = []
    section_counts: dict[str, int] = {s.id: 0 for s in curriculum.sections}
    open_problems: dict[str, list[str]] = {
        s.id: [pid for cid in s.concept_ids for pid in curriculum.concepts[cid].problem_ids]
        for s in curriculum.sections
    }

    def ask(section_id: str, pid: str, remove_on_correct: bool) -> None:
        concept_id = curriculum.problems[pid].concept_id
        correct = student.sample_response(concept_id)
        student.advance_latent(concept_id)
        student.observe(concept_id, correct)
        if correct and remove_on_correct:
            open_problems[section_id].remove(pid)
        mastery.append(student.mastery_estimate())
        questions.append((section_id, concept_id, pid, correct))
        section_counts[section_id] += 1

    carryover = 0
    for section in curriculum.sections:
        allocation = budget.get(section.id, 0) + carryover
        spent = 0
        bank = open_problems[section.id]
        while spent < allocation and bank:
            pid = bank[policy_rng.randrange(len(bank))]
            ask(section.id, pid, remove_on_correct=True)
            spent += 1
        carryover = allocation - spent
    # Spend any leftover on whatever is still open, in section order.
    while carryover > 0:
        open_sections = [s.id for s in curriculum.sections if open_problems[s.id]]
        if not open_sections:
            break
        sid = open_sections[0]
        bank = open_problems[sid]
        pid = bank[policy_rng.randrange(len(bank))]
        ask(sid, pid, remove_on_correct=True)
        carryover -= 1
    # Degenerate corner: every problem answered correctly with budget left.
    if carryover > 0:
        all_problems = list(curriculum.problems)
        for _ in range(carryover):
            pid = all_problems[policy_rng.randrange(len(all_problems))]
            sid = curriculum.concepts[curriculum.problems[pid].concept_id].section_id
            ask(sid, pid, remove_on_correct=False)
    return StudentRun(GROUP_RANDOM, student_index, mastery, questions, section_counts)


def run_group_random(
    plan: ExperimentPlan, budgets: Sequence[Mapping[str, int]]
) -> list[StudentRun]:
    """Simulate the random group against per-student, per-section budgets."""
    if len(budgets) != plan.students_per_group:
        raise ValueError(
            f"need {plan.students_per_group} budgets, got {len(budgets)}"
        )
    params = plan.resolve_params()
    return [
        _run_random_student(plan.curriculum, params, plan.base_seed + i, i, budgets[i])
        for i in range(plan.students_per_group)
    ]


def aggregate_curves(runs: Mapping[str, Sequence[StudentRun]]) -> ExperimentResult:
    """Average mastery trajectories over students at each question index.

    Students who finish early hold their final value (right padding), and all
    groups share the global maximum question index so curves line up.
    """
    if not runs or any(not group_runs for group_runs in runs.values()):
        raise ValueError("need at least one run per group")
    max_len = max(
        len(r.mastery) for group_runs in runs.values() for r in group_runs
    )
    curves: dict[str, GroupCurve] = {}
    counts: dict[str, list[int]] = {}
    for group, group_runs in runs.items():
        padded = np.array(
            [
                r.mastery + [r.mastery[-1]] * (max_len - len(r.mastery))
                for r in group_runs
            ]
        )
        mean = padded.mean(axis=0)
        n = padded.shape[0]
        stderr = (
            padded.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(max_len)
        )
        curves[group] = GroupCurve(mean=mean.tolist(), stderr=stderr.tolist())
        counts[group] = [r.question_count for r in group_runs]
    return ExperimentResult(curves=curves, counts=counts, runs=dict(runs))


def run_experiment(plan: ExperimentPlan) -> ExperimentResult:
    """Run the requested groups and aggregate their curves.

    The random group's budgets come from the difficulty-agnostic group, which
    is simulated on demand even when not requested itself.
    """
    runs: dict[str, list[StudentRun]] = {}
    agnostic_runs: list[StudentRun] | None = None
    if GROUP_AGNOSTIC in plan.groups or GROUP_RANDOM in plan.groups:
        agnostic_runs = run_group_mab(plan, difficulty_enabled=False)
    if GROUP_RANDOM in plan.groups:
        assert agnostic_runs is not None
        budgets = [r.section_counts for r in agnostic_runs]
        runs[GROUP_RANDOM] = run_group_random(plan, budgets)
    if GROUP_AGNOSTIC in plan.groups:
        assert agnostic_runs is not None
        runs[GROUP_AGNOSTIC] = agnostic_runs
    if GROUP_FULL in plan.groups:
        runs[GROUP_FULL] = run_group_mab(plan, difficulty_enabled=True)
    ordered = {g: runs[g] for g in ALL_GROUPS if g in runs}
    return aggregate_curves(ordered)


# -- artifact emission -------------------------------------------------------


def emit(result: ExperimentResult, directory: str | Path) -> dict[str, Path]:
    """Write curves.csv, counts.csv, per-student logs, and the figure.

    Output is deterministic: re-running the same plan yields byte-identical
    CSVs. Returns the paths written (figure under key 'plot').
    """
    from .plotting import render_curves  # deferred: matplotlib import is slow

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    curves_path = directory / "curves.csv"
    with open(curves_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "question_index", "mean_mastery", "stderr"])
        for group, curve in result.curves.items():
            for q, (mean, err) in enumerate(zip(curve.mean, curve.stderr)):
                writer.writerow([group, q, repr(mean), repr(err)])

    counts_path = directory / "counts.csv"
    with open(counts_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "student_index", "question_count"])
        for group, counts in result.counts.items():
            for i, count in enumerate(counts):
                writer.writerow([group, i, count])

    logs_dir = directory / "logs"
    logs_dir.mkdir(exist_ok=True)
    for group, group_runs in result.runs.items():
        for run in group_runs:
            log_path = logs_dir / f"{group}_student{run.student_index:04d}.csv"
            with open(log_path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["question_index", "section_id", "concept_id", "problem_id",
                     "correct", "mastery"]
                )
                for q, (sid, cid, pid, correct) in enumerate(run.questions, start=1):
                    writer.writerow([q, sid, cid, pid, correct, repr(run.mastery[q])])

    plot_path = directory / "curves.png"
    render_curves(result.curves, plot_path)
    return {
        "curves": curves_path,
        "counts": counts_path,
        "logs": logs_dir,
        "plot": plot_path,
    }


def load_curves(directory: str | Path) -> dict[str, GroupCurve]:
    """Reload curves.csv; exact inverse of emit for the curve data."""
    path = Path(directory) / "curves.csv"
    curves: dict[str, GroupCurve] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            curve = curves.setdefault(row["group"], GroupCurve(mean=[], stderr=[]))
            index = int(row["question_index"])
            if index != len(curve.mean):
                raise ValueError(f"non-contiguous question_index in {path}")
            curve.mean.append(float(row["mean_mastery"]))
            curve.stderr.append(float(row["stderr"]))
    if not curves:
        raise ValueError(f"no curves found in {path}")
    return curves
