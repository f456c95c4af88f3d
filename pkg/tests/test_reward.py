from __future__ import annotations

import random

import pytest

from stepscore.errors import BoundsViolation, EmptyGoldenList, MissingLabels
from stepscore.grammar import parse_trajectory
from stepscore.model import EvalRecord, RewardConfig, StepLabel, Verdict
from stepscore.reward import cem, count_optimal, hierarchical_reward, score_trajectory

PLAIN_TEXT = (
    "<think><step><reasoning>r</reasoning><conclusion>c</conclusion></step>"
    "<step><reasoning>r2</reasoning><conclusion>c2</conclusion></step></think>"
    "<answer>Paris</answer>"
)


def _closed_form(answer: int, fmt: int, steps: int, optimal: int,
                 lambda_f: float, lambda_p: float) -> float:
    # Same written order as the documented formula; serves as the oracle.
    fraction = optimal / steps if steps > 0 else 0.0
    return answer * (1.0 - lambda_f) + lambda_f * fmt + lambda_p * answer * fmt * fraction


def test_reference_points_at_default_weights() -> None:
    assert hierarchical_reward(1, 1, 3, 3).total == 1.4
    assert hierarchical_reward(1, 1, 3, 0).total == 1.0
    assert hierarchical_reward(1, 0, 0, 0).total == 0.8
    assert hierarchical_reward(0, 1, 3, 1).total == 0.2
    assert hierarchical_reward(0, 0, 0, 0).total == 0.0


def test_random_tuples_match_closed_form() -> None:
    rng = random.Random(99)
    for _ in range(5000):
        answer = rng.randint(0, 1)
        fmt = rng.randint(0, 1)
        steps = rng.randint(0, 12)
        optimal = rng.randint(0, steps) if steps else 0
        lambda_f = rng.random()
        lambda_p = rng.random()
        config = RewardConfig(lambda_f=lambda_f, lambda_p=lambda_p)
        breakdown = hierarchical_reward(answer, fmt, steps, optimal, config)
        assert breakdown.total == _closed_form(answer, fmt, steps, optimal,
                                               lambda_f, lambda_p)
        assert breakdown.bonus_fraction == (optimal / steps if steps else 0.0)


def test_gate_blocks_bonus_when_answer_or_format_fails() -> None:
    for answer, fmt in ((0, 1), (1, 0), (0, 0)):
        gated = hierarchical_reward(answer, fmt, 5, 5)
        ungated = hierarchical_reward(answer, fmt, 5, 0)
        assert gated.total == ungated.total, (answer, fmt)


def test_lambda_p_zero_degenerates_to_two_term_reward() -> None:
    rng = random.Random(7)
    for _ in range(1000):
        answer = rng.randint(0, 1)
        fmt = rng.randint(0, 1)
        steps = rng.randint(0, 8)
        optimal = rng.randint(0, steps) if steps else 0
        lambda_f = rng.random()
        config = RewardConfig(lambda_f=lambda_f, lambda_p=0.0)
        total = hierarchical_reward(answer, fmt, steps, optimal, config).total
        assert total == answer * (1.0 - lambda_f) + lambda_f * fmt


def test_zero_steps_convention() -> None:
    breakdown = hierarchical_reward(1, 1, 0, 0)
    assert breakdown.bonus_fraction == 0.0
    assert breakdown.total == 1.0


def test_bounds_violations() -> None:
    with pytest.raises(BoundsViolation):
        hierarchical_reward(2, 1, 1, 0)
    with pytest.raises(BoundsViolation):
        hierarchical_reward(1, -1, 1, 0)
    with pytest.raises(BoundsViolation):
        hierarchical_reward(1, 1, -1, 0)
    with pytest.raises(BoundsViolation):
        hierarchical_reward(1, 1, 2, 3)
    with pytest.raises(BoundsViolation):
        hierarchical_reward(1, 1, 2, -1)


def test_cem_containment_and_normalization() -> None:
    assert cem("The capital is Paris.", ("Paris",)) == 1
    assert cem("PARIS", ("paris",)) == 1
    assert cem("the  answer   is\tparis", ("answer is paris",)) == 1
    assert cem("K2.", ("Mount Everest", "Everest")) == 0
    assert cem("Lisa Su and stock", ("Lisa Su",)) == 1
    assert cem("", ("anything",)) == 0


def test_cem_any_golden_matches() -> None:
    assert cem("It was Carlsen.", ("Magnus Carlsen", "Carlsen")) == 1
    assert cem("nobody knows", ("Magnus Carlsen", "Carlsen")) == 0


def test_cem_empty_golden_never_matches() -> None:
    assert cem("anything at all", ("", "real golden")) == 0
    assert cem("anything at all", ("  \t ",)) == 0
    assert cem("real golden here", ("", "real golden")) == 1


def test_cem_requires_goldens() -> None:
    with pytest.raises(EmptyGoldenList):
        cem("text", ())


def test_count_optimal() -> None:
    labels = (
        StepLabel(verdict=Verdict.OPTIMAL),
        StepLabel(verdict=Verdict.OVER_SEARCH),
        StepLabel(verdict=Verdict.UNDER_SEARCH),
        StepLabel(verdict=Verdict.UNJUDGED, reason="empty query"),
        StepLabel(verdict=Verdict.OPTIMAL),
    )
    assert count_optimal(labels) == 2
    assert count_optimal(()) == 0


def _record(labels: tuple[StepLabel, ...] | None) -> EvalRecord:
    return EvalRecord(id="r1", dataset="d", question="q",
                      golden_answers=("Paris",),
                      trajectory=parse_trajectory("q", PLAIN_TEXT), labels=labels)


def test_score_trajectory_with_labels() -> None:
    record = _record((StepLabel(verdict=Verdict.OPTIMAL),
                      StepLabel(verdict=Verdict.UNDER_SEARCH)))
    breakdown = score_trajectory(record)
    assert breakdown.answer_correct == 1
    assert breakdown.format_ok == 1
    assert breakdown.step_count == 2
    assert breakdown.optimal_steps == 1
    assert breakdown.total == 1.0 + 0.4 * 0.5


def test_score_trajectory_requires_labels_when_bonus_enabled() -> None:
    with pytest.raises(MissingLabels):
        score_trajectory(_record(None))


def test_score_trajectory_tolerates_missing_labels_when_bonus_disabled() -> None:
    config = RewardConfig(lambda_p=0.0)
    breakdown = score_trajectory(_record(None), config)
    assert breakdown.total == 1.0
    assert breakdown.optimal_steps == 0


def test_score_trajectory_sentinel_record() -> None:
    record = EvalRecord(id="r2", dataset="d", question="q",
                        golden_answers=("Rome",),
                        trajectory=parse_trajectory("q", "<answer>Rome</answer>junk<answer>"))
    breakdown = score_trajectory(record)
    assert breakdown.format_ok == 0
    assert breakdown.step_count == 0
    assert breakdown.answer_correct == 1
    assert breakdown.total == 0.8


def test_score_trajectory_sentinel_never_needs_labels() -> None:
    record = EvalRecord(id="r3", dataset="d", question="q",
                        golden_answers=("x",),
                        trajectory=parse_trajectory("q", "no tags"))
    assert score_trajectory(record).total == 0.0
