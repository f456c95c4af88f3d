"""Trajectory scoring: exact-match outcome, format gate, and step bonus."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .errors import BoundsViolation, EmptyGoldenList, MissingLabels
from .model import EvalRecord, RewardBreakdown, RewardConfig, StepLabel, Verdict


def _normalize_answer(text: str) -> str:
    return " ".join(text.lower().split())


def cem(generated: str, golden_answers: Sequence[str]) -> int:
    """Containment exact match: 1 iff any golden answer is a substring.

    Both sides are lowercased with whitespace runs collapsed before the
    substring test. A golden that normalizes to the empty string never
    matches (it would otherwise match every answer).
    """
    if not golden_answers:
        raise EmptyGoldenList("cem needs at least one golden answer")
    haystack = _normalize_answer(generated)
    for golden in golden_answers:
        needle = _normalize_answer(golden)
        if needle and needle in haystack:
            return 1
    return 0


def count_optimal(labels: Iterable[StepLabel]) -> int:
    """Number of steps judged optimal; unjudged steps never count."""
    return sum(1 for label in labels if label.verdict is Verdict.OPTIMAL)


def hierarchical_reward(
    answer_correct: int,
    format_ok: int,
    step_count: int,
    optimal_steps: int,
    config: RewardConfig | None = None,
) -> RewardBreakdown:
    """Combine outcome, format, and per-step quality into one scalar.

    total = answer_correct * (1 - lambda_f)
          + lambda_f * format_ok
          + lambda_p * answer_correct * format_ok * (optimal_steps / step_count)

    The bonus fraction is defined as 0.0 when step_count is 0, so malformed
    trajectories (which carry no countable steps) never earn a bonus. With
    lambda_p = 0 the total degenerates to the outcome-plus-format baseline.
    """
    if config is None:
        config = RewardConfig()
    if answer_correct not in (0, 1):
        raise BoundsViolation(f"answer_correct must be 0 or 1, got {answer_correct}")
    if format_ok not in (0, 1):
        raise BoundsViolation(f"format_ok must be 0 or 1, got {format_ok}")
    if step_count < 0:
        raise BoundsViolation(f"step_count must be >= 0, got {step_count}")
    if not 0 <= optimal_steps <= max(step_count, 0):
        raise BoundsViolation(
            f"optimal_steps must be in [0, step_count], got {optimal_steps} of {step_count}"
        )
    bonus_fraction = optimal_steps / step_count if step_count > 0 else 0.0
    total = (
        answer_correct * (1.0 - config.lambda_f)
        + config.lambda_f * format_ok
        + config.lambda_p * answer_correct * format_ok * bonus_fraction
    )
    return RewardBreakdown(
        answer_correct=answer_correct,
        format_ok=format_ok,
        step_count=step_count,
        optimal_steps=optimal_steps,
        bonus_fraction=bonus_fraction,
        total=total,
    )


def score_trajectory(record: EvalRecord, config: RewardConfig | None = None) -> RewardBreakdown:
    """Score one record end to end.

    Sentinel trajectories score with format_ok 0 and zero steps, so only the
    outcome term can contribute. Parsed trajectories must carry labels when
    the step bonus is active (lambda_p > 0); with the bonus disabled, missing
    labels are tolerated and count as zero optimal steps.
    """
    if config is None:
        config = RewardConfig()
    trajectory = record.trajectory
    answer_correct = cem(trajectory.answer, record.golden_answers)
    format_ok = trajectory.format_ok
    step_count = trajectory.step_count if format_ok == 1 else 0
    if format_ok == 1 and record.labels is None and config.lambda_p > 0:
        raise MissingLabels(f"record {record.id!r} is parsed but has no step labels")
    if format_ok == 1 and record.labels is not None:
        optimal_steps = count_optimal(record.labels)
    else:
        optimal_steps = 0
    return hierarchical_reward(answer_correct, format_ok, step_count, optimal_steps, config)
