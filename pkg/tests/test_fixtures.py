from __future__ import annotations

import json

import pytest

from stepscore.errors import NoMutationSite
from stepscore.fixtures import (
    CEO_STOCK_GOLDEN_ANSWERS,
    CEO_STOCK_QUESTION,
    CEO_STOCK_RAW,
    SLOW_DOWN_BASELINE_RAW,
    SLOW_DOWN_EFFICIENT_RAW,
    SLOW_DOWN_GOLDEN_ANSWERS,
    SLOW_DOWN_QUESTION,
    Mutation,
    ScriptedGenerator,
    ScriptedJudge,
    ScriptedPolicy,
    generate_valid_trajectory,
    load_generator_script,
    load_judge_script,
    load_policy_script,
    mutate_trajectory,
)
from stepscore.grammar import check_format, parse_trajectory
from stepscore.model import StepKind
from stepscore.reward import cem


def test_ceo_stock_case_study_shape() -> None:
    assert check_format(CEO_STOCK_RAW) == (1, 4)
    trajectory = parse_trajectory(CEO_STOCK_QUESTION, CEO_STOCK_RAW)
    kinds = [step.kind for step in trajectory.steps]
    assert kinds == [StepKind.SEARCH, StepKind.NON_SEARCH,
                     StepKind.SEARCH, StepKind.SEARCH]
    assert cem(trajectory.answer, CEO_STOCK_GOLDEN_ANSWERS) == 1


def test_slow_down_baseline_case_study_shape() -> None:
    assert check_format(SLOW_DOWN_BASELINE_RAW) == (1, 5)
    trajectory = parse_trajectory(SLOW_DOWN_QUESTION, SLOW_DOWN_BASELINE_RAW)
    assert all(step.kind is StepKind.SEARCH for step in trajectory.steps)
    assert cem(trajectory.answer, SLOW_DOWN_GOLDEN_ANSWERS) == 0


def test_slow_down_efficient_case_study_shape() -> None:
    assert check_format(SLOW_DOWN_EFFICIENT_RAW) == (1, 2)
    trajectory = parse_trajectory(SLOW_DOWN_QUESTION, SLOW_DOWN_EFFICIENT_RAW)
    assert trajectory.steps[0].kind is StepKind.NON_SEARCH
    assert trajectory.steps[1].kind is StepKind.SEARCH
    assert cem(trajectory.answer, SLOW_DOWN_GOLDEN_ANSWERS) == 1


def test_generator_is_deterministic_per_seed() -> None:
    for seed in (0, 1, 77, 4096):
        assert generate_valid_trajectory(seed) == generate_valid_trajectory(seed)
    texts = {generate_valid_trajectory(seed) for seed in range(50)}
    assert len(texts) > 40


def test_generator_respects_max_steps() -> None:
    for seed in range(100):
        text = generate_valid_trajectory(seed, max_steps=3)
        ok, steps = check_format(text)
        assert ok == 1 and 1 <= steps <= 3


def test_mutations_are_deterministic() -> None:
    text = generate_valid_trajectory(5)
    for mutation in Mutation:
        try:
            first = mutate_trajectory(text, mutation, 42)
        except NoMutationSite:
            continue
        assert mutate_trajectory(text, mutation, 42) == first


def test_each_mutation_class_produces_invalid_text() -> None:
    text = generate_valid_trajectory(9)
    for mutation in Mutation:
        mutant = mutate_trajectory(text, mutation, 3)
        assert mutant != text
        assert check_format(mutant) == (0, -1), mutation


def test_mutation_classes_enumerated() -> None:
    assert {m.value for m in Mutation} == {
        "drop_tag", "duplicate_tag", "swap_tags", "inject_text",
    }


def test_scripted_generator_replays_then_reports_exhaustion() -> None:
    generator = ScriptedGenerator(["first</conclusion>", "second</answer>"])
    assert generator.generate("t", ("</answer>",), "deterministic") == "first</conclusion>"
    assert generator.generate("t", ("</answer>",), "deterministic") == "second</answer>"
    assert generator.generate("t", ("</answer>",), "deterministic") == ""


def test_scripted_policy_strict_and_default_modes() -> None:
    policy = ScriptedPolicy({"q1": "a1"})
    assert policy.answer_standalone("q1") == "a1"
    with pytest.raises(KeyError):
        policy.answer_standalone("unknown")
    lenient = ScriptedPolicy({"q1": "a1"}, strict=False, default="fallback")
    assert lenient.answer_standalone("unknown") == "fallback"


def test_scripted_judge_single_reply_repeats() -> None:
    judge = ScriptedJudge({"msg": "<answer>True</answer>"})
    assert judge.complete("system", "msg") == "<answer>True</answer>"
    assert judge.complete("system", "msg") == "<answer>True</answer>"


def test_scripted_judge_reply_list_advances_then_repeats_last() -> None:
    judge = ScriptedJudge({"msg": ["garbled", "<answer>False</answer>"]})
    assert judge.complete("system", "msg") == "garbled"
    assert judge.complete("system", "msg") == "<answer>False</answer>"
    assert judge.complete("system", "msg") == "<answer>False</answer>"


def test_scripted_judge_strict_mode() -> None:
    judge = ScriptedJudge({"msg": "reply"})
    with pytest.raises(KeyError):
        judge.complete("system", "other")
    lenient = ScriptedJudge({"msg": "reply"}, strict=False, default="none")
    assert lenient.complete("system", "other") == "none"


def test_load_policy_script(tmp_path) -> None:
    path = tmp_path / "policy.jsonl"
    path.write_text(
        json.dumps({"query": "q1", "answer": "a1"}) + "\n"
        + json.dumps({"query": "q2", "answer": "a2"}) + "\n",
        encoding="utf-8",
    )
    policy = load_policy_script(path)
    assert policy.answer_standalone("q2") == "a2"


def test_load_judge_script_supports_reply_and_replies(tmp_path) -> None:
    path = tmp_path / "judge.jsonl"
    path.write_text(
        json.dumps({"user_message": "m1", "reply": "<answer>True</answer>"}) + "\n"
        + json.dumps({"user_message": "m2", "replies": ["x", "<answer>False</answer>"]}) + "\n",
        encoding="utf-8",
    )
    judge = load_judge_script(path)
    assert judge.complete("s", "m1") == "<answer>True</answer>"
    assert judge.complete("s", "m2") == "x"
    assert judge.complete("s", "m2") == "<answer>False</answer>"


def test_load_generator_script(tmp_path) -> None:
    path = tmp_path / "generator.jsonl"
    path.write_text(
        json.dumps({"id": "g1", "deltas": ["a</conclusion>", "b</answer>"]}) + "\n",
        encoding="utf-8",
    )
    scripts = load_generator_script(path)
    assert scripts == {"g1": ["a</conclusion>", "b</answer>"]}
