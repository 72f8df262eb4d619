"""Curriculum model: sections, concept prerequisite DAGs, problem banks.

A curriculum is immutable after load and safe to share read-only across
concurrent sessions. Prerequisites are intra-section; section ordering is
exposed as a list and inter-section gating is left to callers.

File format (JSON, UTF-8, unknown keys rejected):

    {"sections": [
        {"id": "s1", "title": "...", "concepts": [
            {"id": "c1", "prerequisites": [], "problems": [
                {"id": "p1", "difficulty": 3.0, "prompt": "...",
                 "choices": ["a", "b"], "correct_choice": 0}
            ]}
        ]}
    ]}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path


class CurriculumError(ValueError):
    """Raised when a curriculum file is malformed or violates an invariant."""


@dataclass(frozen=True)
class Problem:
    id: str
    concept_id: str
    difficulty: float  # real-valued, within [1, 5]
    prompt: str
    choices: tuple[str, ...]
    correct_choice: int


@dataclass(frozen=True)
class Concept:
    id: str
    section_id: str
    prerequisite_ids: tuple[str, ...]
    problem_ids: tuple[str, ...]


@dataclass(frozen=True)
class Section:
    id: str
    title: str
    concept_ids: tuple[str, ...]


@dataclass(frozen=True)
class Curriculum:
    sections: tuple[Section, ...]
    concepts: dict[str, Concept]
    problems: dict[str, Problem]

    def section(self, section_id: str) -> Section:
        try:
            return next(s for s in self.sections if s.id == section_id)
        except StopIteration:
            raise KeyError(section_id) from None

    def concepts_of(self, section_id: str) -> list[Concept]:
        return [self.concepts[cid] for cid in self.section(section_id).concept_ids]

    def problems_of(self, concept_id: str) -> list[Problem]:
        return [self.problems[pid] for pid in self.concepts[concept_id].problem_ids]

    def to_dict(self) -> dict:
        """Serialize back to the file schema (round-trips through load)."""
        return {
            "sections": [
                {
                    "id": s.id,
                    "title": s.title,
                    "concepts": [
                        {
                            "id": c.id,
                            "prerequisites": list(c.prerequisite_ids),
                            "problems": [
                                {
                                    "id": p.id,
                                    "difficulty": p.difficulty,
                                    "prompt": p.prompt,
                                    "choices": list(p.choices),
                                    "correct_choice": p.correct_choice,
                                }
                                for p in (self.problems[pid] for pid in c.problem_ids)
                            ],
                        }
                        for c in (self.concepts[cid] for cid in s.concept_ids)
                    ],
                }
                for s in self.sections
            ]
        }


_SECTION_KEYS = {"id", "title", "concepts"}
_CONCEPT_KEYS = {"id", "prerequisites", "problems"}
_PROBLEM_KEYS = {"id", "difficulty", "prompt", "choices", "correct_choice"}


def _reject_unknown_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise CurriculumError(f"unknown key {sorted(unknown)[0]!r} in {where}")


def _detect_cycle(concept_ids: list[str], prereqs: dict[str, tuple[str, ...]]) -> bool:
    """Kahn's algorithm; True if the prerequisite graph has a cycle."""
    indegree = {cid: 0 for cid in concept_ids}
    dependents: dict[str, list[str]] = {cid: [] for cid in concept_ids}
    for cid in concept_ids:
        for pre in prereqs[cid]:
            indegree[cid] += 1
            dependents[pre].append(cid)
    queue = [cid for cid in concept_ids if indegree[cid] == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for dep in dependents[node]:
            indegree[dep] -= 1
            if indegree[dep] == 0:
                queue.append(dep)
    return seen != len(concept_ids)


def topological_order(curriculum: Curriculum, section_id: str) -> list[str]:
    """Concept ids of one section in prerequisite-respecting order."""
    section = curriculum.section(section_id)
    remaining = set(section.concept_ids)
    order: list[str] = []
    while remaining:
        ready = [
            cid
            for cid in section.concept_ids
            if cid in remaining
            and all(p not in remaining for p in curriculum.concepts[cid].prerequisite_ids)
        ]
        if not ready:  # cannot happen for a validated curriculum
            raise CurriculumError(f"cycle in section {section_id!r}")
        for cid in ready:
            order.append(cid)
            remaining.discard(cid)
    return order


def curriculum_from_dict(data: dict) -> Curriculum:
    """Build and validate a Curriculum from the file-schema dict.

    Raises CurriculumError naming the first violated invariant: unknown key,
    cycle, dangling id, difficulty out of range, empty problem bank,
    duplicate id, invalid answer index, missing root.
    """
    if not isinstance(data, dict):
        raise CurriculumError("top level must be an object")
    _reject_unknown_keys(data, {"sections"}, "top level")
    raw_sections = data.get("sections")
    if not isinstance(raw_sections, list) or not raw_sections:
        raise CurriculumError("'sections' must be a non-empty array")

    sections: list[Section] = []
    concepts: dict[str, Concept] = {}
    problems: dict[str, Problem] = {}

    for raw_s in raw_sections:
        if not isinstance(raw_s, dict):
            raise CurriculumError("section entries must be objects")
        _reject_unknown_keys(raw_s, _SECTION_KEYS, "section")
        sid = raw_s.get("id")
        title = raw_s.get("title", "")
        raw_concepts = raw_s.get("concepts")
        if not isinstance(sid, str) or not sid:
            raise CurriculumError("section id must be a non-empty string")
        if any(s.id == sid for s in sections):
            raise CurriculumError(f"duplicate section id {sid!r}")
        if not isinstance(raw_concepts, list) or not raw_concepts:
            raise CurriculumError(f"section {sid!r} has no concepts")

        concept_ids: list[str] = []
        for raw_c in raw_concepts:
            if not isinstance(raw_c, dict):
                raise CurriculumError("concept entries must be objects")
            _reject_unknown_keys(raw_c, _CONCEPT_KEYS, f"concept in section {sid!r}")
            cid = raw_c.get("id")
            if not isinstance(cid, str) or not cid:
                raise CurriculumError("concept id must be a non-empty string")
            if cid in concepts:
                raise CurriculumError(f"duplicate concept id {cid!r}")
            prereqs = raw_c.get("prerequisites", [])
            if not isinstance(prereqs, list) or not all(isinstance(p, str) for p in prereqs):
                raise CurriculumError(f"prerequisites of {cid!r} must be an array of ids")
            raw_problems = raw_c.get("problems")
            if not isinstance(raw_problems, list) or not raw_problems:
                raise CurriculumError(f"empty problem bank for concept {cid!r}")

            problem_ids: list[str] = []
            for raw_p in raw_problems:
                if not isinstance(raw_p, dict):
                    raise CurriculumError("problem entries must be objects")
                _reject_unknown_keys(raw_p, _PROBLEM_KEYS, f"problem in concept {cid!r}")
                pid = raw_p.get("id")
                if not isinstance(pid, str) or not pid:
                    raise CurriculumError("problem id must be a non-empty string")
                if pid in problems:
                    raise CurriculumError(f"duplicate problem id {pid!r}")
                difficulty = raw_p.get("difficulty")
                if not isinstance(difficulty, (int, float)) or isinstance(difficulty, bool):
                    raise CurriculumError(f"difficulty of {pid!r} must be a number")
                if not 1.0 <= float(difficulty) <= 5.0:
                    raise CurriculumError(
                        f"difficulty out of range for problem {pid!r}: {difficulty}"
                    )
                choices = raw_p.get("choices")
                if not isinstance(choices, list) or not choices:
                    raise CurriculumError(f"problem {pid!r} needs a non-empty choices array")
                correct = raw_p.get("correct_choice")
                if not isinstance(correct, int) or isinstance(correct, bool) or not (
                    0 <= correct < len(choices)
                ):
                    raise CurriculumError(f"correct_choice out of range for problem {pid!r}")
                problems[pid] = Problem(
                    id=pid,
                    concept_id=cid,
                    difficulty=float(difficulty),
                    prompt=str(raw_p.get("prompt", "")),
                    choices=tuple(str(ch) for ch in choices),
                    correct_choice=correct,
                )
                problem_ids.append(pid)

            concepts[cid] = Concept(
                id=cid,
                section_id=sid,
                prerequisite_ids=tuple(prereqs),
                problem_ids=tuple(problem_ids),
            )
            concept_ids.append(cid)

        sections.append(Section(id=sid, title=str(title), concept_ids=tuple(concept_ids)))

    # Cross-reference checks, then graph shape per section.
    for cid, concept in concepts.items():
        for pre in concept.prerequisite_ids:
            if pre not in concepts:
                raise CurriculumError(f"dangling id: prerequisite {pre!r} of {cid!r}")
            if concepts[pre].section_id != concept.section_id:
                raise CurriculumError(
                    f"prerequisite {pre!r} of {cid!r} crosses section boundaries"
                )
    for section in sections:
        prereqs = {cid: concepts[cid].prerequisite_ids for cid in section.concept_ids}
        if _detect_cycle(list(section.concept_ids), prereqs):
            raise CurriculumError(f"cycle in prerequisites of section {section.id!r}")
        if not any(not concepts[cid].prerequisite_ids for cid in section.concept_ids):
            raise CurriculumError(f"section {section.id!r} has no root concept")

    return Curriculum(sections=tuple(sections), concepts=concepts, problems=problems)


def load_curriculum(path: str | Path) -> Curriculum:
    """Load and validate a curriculum file.

    Raises CurriculumError on malformed JSON or the first violated invariant.
    """
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CurriculumError(f"cannot read curriculum file: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CurriculumError(f"malformed curriculum file: {exc}") from exc
    return curriculum_from_dict(data)


def save_curriculum(curriculum: Curriculum, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(curriculum.to_dict(), indent=2) + "\n", encoding="utf-8"
    )


def generate_synthetic_curriculum(
    sections: int,
    concepts_per_section: int,
    problems_per_concept: int,
    seed: int,
    edge_probability: float = 0.4,
) -> Curriculum:
    """Deterministic random curriculum for simulation runs.

    Each section gets a random prerequisite DAG over its concepts (the first
    concept is always a root; edges only point forward in creation order, so
    acyclicity holds by construction). Difficulties are uniform over [1, 5].
    """
    if min(sections, concepts_per_section, problems_per_concept) < 1:
        raise ValueError("all counts must be >= 1")
    rng = random.Random(seed)
    data: dict = {"sections": []}
    for si in range(sections):
        sid = f"s{si + 1}"
        raw_concepts = []
        for ci in range(concepts_per_section):
            cid = f"{sid}c{ci + 1}"
            prereqs = [
                f"{sid}c{cj + 1}"
                for cj in range(ci)
                if rng.random() < edge_probability
            ]
            raw_problems = []
            for pi in range(problems_per_concept):
                pid = f"{cid}p{pi + 1}"
                difficulty = rng.uniform(1.0, 5.0)
                correct = rng.randrange(4)
                raw_problems.append(
                    {
                        "id": pid,
                        "difficulty": difficulty,
                        "prompt": f"Question {pi + 1} on {cid}",
                        "choices": [f"option {k + 1}" for k in range(4)],
                        "correct_choice": correct,
                    }
                )
            raw_concepts.append(
                {"id": cid, "prerequisites": prereqs, "problems": raw_problems}
            )
        data["sections"].append(
            {"id": sid, "title": f"Section {si + 1}", "concepts": raw_concepts}
        )
    return curriculum_from_dict(data)
