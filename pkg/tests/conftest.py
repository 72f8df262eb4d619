"""Shared builders for compact test curricula."""

from __future__ import annotations

import pytest

from bandit_tutor.curriculum import Curriculum, curriculum_from_dict


def build_curriculum(sections: dict[str, dict[str, dict]]) -> Curriculum:
    """Shorthand builder.

    sections maps section_id -> {concept_id: {"prereqs": [...], "problems":
    [(problem_id, difficulty), ...]}}. Every problem gets two choices with the
    first one correct.
    """
    data = {"sections": []}
    for sid, concepts in sections.items():
        raw_concepts = []
        for cid, spec in concepts.items():
            raw_concepts.append(
                {
                    "id": cid,
                    "prerequisites": list(spec.get("prereqs", [])),
                    "problems": [
                        {
                            "id": pid,
                            "difficulty": d,
                            "prompt": f"prompt {pid}",
                            "choices": ["right", "wrong"],
                            "correct_choice": 0,
                        }
                        for pid, d in spec["problems"]
                    ],
                }
            )
        data["sections"].append({"id": sid, "title": sid, "concepts": raw_concepts})
    return curriculum_from_dict(data)


@pytest.fixture
def single_problem_curriculum() -> Curriculum:
    return build_curriculum({"s1": {"c1": {"problems": [("p1", 3.0)]}}})


@pytest.fixture
def chain_curriculum() -> Curriculum:
    """A -> B, one problem each."""
    return build_curriculum(
        {
            "s1": {
                "A": {"problems": [("a1", 3.0)]},
                "B": {"prereqs": ["A"], "problems": [("b1", 3.0)]},
            }
        }
    )


@pytest.fixture
def spread_curriculum() -> Curriculum:
    """One concept with problems at difficulties 1, 3, 5."""
    return build_curriculum(
        {"s1": {"c1": {"problems": [("easy", 1.0), ("mid", 3.0), ("hard", 5.0)]}}}
    )
