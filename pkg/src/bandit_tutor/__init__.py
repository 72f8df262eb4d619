"""Hierarchical multi-armed-bandit tutoring engine.

Selects concepts and problems for students over a prerequisite curriculum,
with difficulty-aware ranking and optional memory-decay review. Ships with a
knowledge-tracing student simulator, a reproducible three-group experiment
harness, and a small HTTP tutoring service.
"""

from .bandit import ActivityState, BanditConfig, Belief
from .curriculum import (
    Curriculum,
    CurriculumError,
    generate_synthetic_curriculum,
    load_curriculum,
    save_curriculum,
)
from .difficulty import DifficultyConfig
from .memory import MemoryConfig
from .session import (
    EngineConfig,
    Recommendation,
    Session,
    SessionError,
    SnapshotError,
    restore_session,
    start_session,
)
from .students import BktParams, BktStudent

__version__ = "0.1.0"

__all__ = [
    "ActivityState",
    "BanditConfig",
    "Belief",
    "BktParams",
    "BktStudent",
    "Curriculum",
    "CurriculumError",
    "DifficultyConfig",
    "EngineConfig",
    "MemoryConfig",
    "Recommendation",
    "Session",
    "SessionError",
    "SnapshotError",
    "generate_synthetic_curriculum",
    "load_curriculum",
    "restore_session",
    "save_curriculum",
    "start_session",
    "__version__",
]
