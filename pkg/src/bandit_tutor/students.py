"""Simulated students driven by Bayesian knowledge tracing.

Each student carries, per concept, a hidden binary knowledge state and an
observer-side posterior mastery estimate. Responses are sampled from the
hidden state through guess/slip noise; the hidden state can only improve
(no forgetting). The posterior is the standard two-state HMM filter: a Bayes
step on the observation followed by the learning transition.

Problems under a concept share its parameters; problem difficulty never
enters the response model, only the recommender.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

# Synthesis ranges keep simulated cohorts plausible: response correctness
# climbs above 50% once learning starts. Not fitted to any dataset.
SYNTH_PRIOR_RANGE = (0.05, 0.3)
SYNTH_LEARN_RANGE = (0.05, 0.3)
SYNTH_GUESS_RANGE = (0.1, 0.3)
SYNTH_SLIP_RANGE = (0.05, 0.2)


@dataclass(frozen=True)
class BktParams:
    """Knowledge-tracing parameters for one concept.

    prior:  P(known at start)
    learn:  P(unknown -> known) per attempt
    guess:  P(correct | unknown)
    slip:   P(incorrect | known)

    The identifiability convention guess + slip < 1 is enforced when loading
    parameter files; direct construction allows degenerate corners (useful
    for deterministic test students).
    """

    prior: float
    learn: float
    guess: float
    slip: float

    def __post_init__(self) -> None:
        for name in ("prior", "learn", "guess", "slip"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


def update_posterior(posterior: float, observed: int, params: BktParams) -> float:
    """One filtering step: condition on the observation, then apply learning.

    Returns the updated P(known) in [0, 1]. A posterior of exactly 1 is
    absorbing regardless of the observation.
    """
    if not 0.0 <= posterior <= 1.0:
        raise ValueError(f"posterior must be in [0, 1], got {posterior}")
    if observed:
        num = posterior * (1.0 - params.slip)
        den = num + (1.0 - posterior) * params.guess
    else:
        num = posterior * params.slip
        den = num + (1.0 - posterior) * (1.0 - params.guess)
    conditioned = num / den if den > 0.0 else posterior
    return conditioned + (1.0 - conditioned) * params.learn


class BktStudent:
    """One simulated student over a fixed concept set.

    The concept set in scope is fixed at construction; mastery_estimate()
    averages the posteriors over all of it, so untouched concepts hold the
    estimate at their prior.
    """

    def __init__(self, params: Mapping[str, BktParams], seed: int | None = None):
        if not params:
            raise ValueError("need parameters for at least one concept")
        self.params = dict(params)
        self.rng = random.Random(seed)
        # Hidden truth sampled once per concept, in insertion order.
        self.latent: dict[str, int] = {
            cid: 1 if self.rng.random() < p.prior else 0
            for cid, p in self.params.items()
        }
        self.posterior: dict[str, float] = {
            cid: p.prior for cid, p in self.params.items()
        }
        self._posterior_sum = sum(self.posterior.values())

    def sample_response(self, concept_id: str) -> int:
        """Binary correctness drawn through guess/slip noise."""
        p = self.params[concept_id]
        if self.latent[concept_id]:
            return 0 if self.rng.random() < p.slip else 1
        return 1 if self.rng.random() < p.guess else 0

    def advance_latent(self, concept_id: str) -> int:
        """Learning transition after an attempt; known states never degrade."""
        if not self.latent[concept_id]:
            if self.rng.random() < self.params[concept_id].learn:
                self.latent[concept_id] = 1
        return self.latent[concept_id]

    def observe(self, concept_id: str, correct: int) -> float:
        """Update the posterior for one observed response."""
        old = self.posterior[concept_id]
        new = update_posterior(old, correct, self.params[concept_id])
        self.posterior[concept_id] = new
        self._posterior_sum += new - old
        return new

    def mastery_estimate(self) -> float:
        """Mean posterior over every concept in scope."""
        return self._posterior_sum / len(self.posterior)


def synthesize_bkt_params(
    concept_ids: Iterable[str],
    seed: int,
    prior_range: tuple[float, float] = SYNTH_PRIOR_RANGE,
    learn_range: tuple[float, float] = SYNTH_LEARN_RANGE,
    guess_range: tuple[float, float] = SYNTH_GUESS_RANGE,
    slip_range: tuple[float, float] = SYNTH_SLIP_RANGE,
) -> dict[str, BktParams]:
    """Seeded ground-truth parameters when no fitted file is available."""
    rng = random.Random(seed)
    return {
        cid: BktParams(
            prior=rng.uniform(*prior_range),
            learn=rng.uniform(*learn_range),
            guess=rng.uniform(*guess_range),
            slip=rng.uniform(*slip_range),
        )
        for cid in concept_ids
    }


def load_bkt_params(path: str | Path) -> dict[str, BktParams]:
    """Read a JSON file mapping concept id -> {prior, learn, guess, slip}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("parameter file must map concept ids to parameter objects")
    out = {}
    for cid, raw in data.items():
        if not isinstance(raw, dict) or set(raw) != {"prior", "learn", "guess", "slip"}:
            raise ValueError(f"entry for {cid!r} must have prior/learn/guess/slip")
        params = BktParams(**{k: float(v) for k, v in raw.items()})
        if params.guess + params.slip >= 1.0:
            raise ValueError(
                f"guess + slip must be < 1 for {cid!r}, "
                f"got {params.guess} + {params.slip}"
            )
        out[cid] = params
    return out


def fit_difficulties_from_responses(
    rows: Iterable[tuple[str, int]],
) -> dict[str, float]:
    """Per-problem difficulty from observed correctness records.

    Each row is (problem_id, correct); the difficulty is the inaccuracy rate
    mapped linearly onto [1, 5]. Every problem needs at least one record.
    """
    totals: dict[str, int] = {}
    wrong: dict[str, int] = {}
    for problem_id, correct in rows:
        totals[problem_id] = totals.get(problem_id, 0) + 1
        if not correct:
            wrong[problem_id] = wrong.get(problem_id, 0) + 1
    if not totals:
        raise ValueError("no response records")
    return {
        pid: 4.0 * (wrong.get(pid, 0) / count) + 1.0
        for pid, count in totals.items()
    }


def read_response_table(path: str | Path) -> list[tuple[str, int]]:
    """Load a delimited response table with columns problem_id, correct."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"problem_id", "correct"} <= set(reader.fieldnames):
            raise ValueError("response table needs problem_id and correct columns")
        for record in reader:
            rows.append((record["problem_id"], int(record["correct"])))
    return rows
