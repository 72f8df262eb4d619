"""Tuned default hyperparameters shared across the engine.

These are the published operating points for the tutoring bandits; every
config dataclass defaults to them. Override per session via the config
objects, not by editing this module.
"""

# Probabilistic selection
EXPLORATION_RATE = 0.1       # gamma: mass reserved for uniform exploration

# Pseudo-reward seeding of activity weights
INITIAL_WEIGHT = 0.5         # appended when an activity activates at session start
UNLOCK_WEIGHT = 2.0          # appended when prerequisites complete mid-session

# Reward/mastery windows (must be even)
CONCEPT_HISTORY_LENGTH = 4
PROBLEM_HISTORY_LENGTH = 2

MASTERY_THRESHOLD = 0.74     # strict lower bound on windowed mean correctness

# Difficulty-aware ranking
DIFFICULTY_SKEW = 7.37       # xi: width of the initial-multiplier bell around d=3
RANK_FACTOR = 1.3            # alpha: multiplicative step for rank updates

# Decaying-memory review weights (not tuned against data; see README)
MEMORY_THRESHOLD = 0.5
MEMORY_MULTIPLIER = 1.0
