"""Acceptance checks for the whole package.

Each test covers one release criterion and prints a PASS or FAIL line naming
it, so ``pytest tests/test_acceptance.py -s`` doubles as an acceptance report.
The criteria pin exact arithmetic and fixture oracles rather than large-scale
training results, which are out of reach for a test suite.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager
from pathlib import Path

from stepscore.cli import main
from stepscore.fixtures import (
    CEO_STOCK_RAW,
    SLOW_DOWN_BASELINE_RAW,
    SLOW_DOWN_EFFICIENT_RAW,
    SLOW_DOWN_GOLDEN_ANSWERS,
    SLOW_DOWN_QUESTION,
    Mutation,
    generate_valid_trajectory,
    mutate_trajectory,
)
from stepscore.grammar import check_format, parse_trajectory
from stepscore.metrics import aggregate_report
from stepscore.model import EvalRecord, RewardConfig, StepKind, StepLabel, Verdict
from stepscore.records import read_records
from stepscore.reward import cem, hierarchical_reward, score_trajectory

_FIXTURES = Path(__file__).resolve().parents[1] / "fixtures" / "v1"
_DETECTION = _FIXTURES / "detection"
_ROLLOUT = _FIXTURES / "rollout"


@contextmanager
def _criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}")
        raise
    print(f"PASS  {name}")


def _closed_form(a: int, f: int, n: int, n_corr: int, lf: float, lp: float) -> float:
    fraction = n_corr / n if n else 0.0
    return a * (1 - lf) + lf * f + lp * a * f * fraction


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def test_reward_algebra() -> None:
    with _criterion("reward algebra matches the closed form on 10,000 random tuples in under 1 s"):
        rng = random.Random(20240824)
        start = time.perf_counter()
        for _ in range(10_000):
            a = rng.randint(0, 1)
            f = rng.randint(0, 1)
            n = rng.randint(0, 12)
            n_corr = rng.randint(0, n) if n else 0
            lf = rng.random()
            lp = rng.random() * 3
            config = RewardConfig(lambda_f=lf, lambda_p=lp)
            total = hierarchical_reward(a, f, n, n_corr, config).total
            assert total == _closed_form(a, f, n, n_corr, lf, lp)
            no_bonus = RewardConfig(lambda_f=lf, lambda_p=0.0)
            assert hierarchical_reward(a, f, n, n_corr, no_bonus).total == a * (1 - lf) + lf * f
            if a * f == 0:
                assert total == a * (1 - lf) + lf * f
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"reward sweep took {elapsed:.2f}s"


def test_reward_reference_points() -> None:
    with _criterion("reward reference points 1.4, 1.0, 0.8, and 0.2 are exact"):
        assert hierarchical_reward(1, 1, 3, 3).total == 1.4
        assert hierarchical_reward(1, 1, 2, 0).total == 1.0
        assert hierarchical_reward(1, 0, 0, 0).total == 0.8
        assert hierarchical_reward(1, 0, 5, 2).total == 0.8
        assert hierarchical_reward(0, 1, 4, 0).total == 0.2


def test_grammar_soundness_and_mutation_rejection() -> None:
    with _criterion(
        "grammar accepts 10,000 generated trajectories and rejects "
        "1,000 mutants per fault class in under 10 s"
    ):
        start = time.perf_counter()
        for seed in range(10_000):
            text = generate_valid_trajectory(seed)
            assert check_format(text) == (1, text.count("<step>"))
        for mutation in Mutation:
            for seed in range(1_000):
                mutant = mutate_trajectory(generate_valid_trajectory(seed), mutation, seed)
                assert check_format(mutant) == (0, -1), (mutation, seed)
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"grammar sweep took {elapsed:.2f}s"


def test_case_study_fixtures() -> None:
    with _criterion("bundled case-study trajectories parse and score to their documented values"):
        assert check_format(CEO_STOCK_RAW) == (1, 4)
        assert check_format(SLOW_DOWN_EFFICIENT_RAW) == (1, 2)
        assert check_format(SLOW_DOWN_BASELINE_RAW) == (1, 5)

        efficient = parse_trajectory(SLOW_DOWN_QUESTION, SLOW_DOWN_EFFICIENT_RAW)
        assert cem(efficient.answer, SLOW_DOWN_GOLDEN_ANSWERS) == 1
        record = EvalRecord(
            id="efficient",
            dataset="case_study",
            question=SLOW_DOWN_QUESTION,
            golden_answers=SLOW_DOWN_GOLDEN_ANSWERS,
            trajectory=efficient,
            labels=tuple(StepLabel(Verdict.OPTIMAL) for _ in efficient.steps),
        )
        assert score_trajectory(record).total == 1.4

        baseline = parse_trajectory(SLOW_DOWN_QUESTION, SLOW_DOWN_BASELINE_RAW)
        assert cem(baseline.answer, SLOW_DOWN_GOLDEN_ANSWERS) == 0
        assert all(step.kind is StepKind.SEARCH for step in baseline.steps)
        wasteful = EvalRecord(
            id="baseline",
            dataset="case_study",
            question=SLOW_DOWN_QUESTION,
            golden_answers=SLOW_DOWN_GOLDEN_ANSWERS,
            trajectory=baseline,
            labels=tuple(StepLabel(Verdict.OVER_SEARCH) for _ in baseline.steps),
        )
        assert score_trajectory(wasteful).total == 0.2


def _detect_to(tmp_path: Path, name: str, *extra: str) -> Path:
    output = tmp_path / name
    code = main([
        "detect",
        "--config", str(_DETECTION / "detect_config.json"),
        "--input", str(_DETECTION / "trajectories.jsonl"),
        "--output", str(output),
        *extra,
    ])
    assert code == 0
    return output


def test_detection_oracle_across_concurrency(tmp_path) -> None:
    with _criterion(
        "detection reproduces the 20-record hand-labeled oracle, including "
        "over- and under-search rates, at max_in_flight 1, 4, and 16"
    ):
        expected_labels = _read_jsonl(_DETECTION / "expected_labels.jsonl")
        expected_metrics = json.loads(
            (_DETECTION / "expected_metrics.json").read_text(encoding="utf-8")
        )
        for in_flight in (1, 4, 16):
            labeled = _detect_to(tmp_path, f"labeled-{in_flight}.jsonl",
                                 "--max-in-flight", str(in_flight))
            rows = {row["id"]: row for row in _read_jsonl(labeled)}
            assert len(rows) == 20
            for want in expected_labels:
                got = rows[want["id"]]["labels"]
                assert len(got) == len(want["labels"]), want["id"]
                for got_label, want_label in zip(got, want["labels"]):
                    assert got_label["verdict"] == want_label["verdict"], want["id"]
                    if "reason_prefix" in want_label:
                        assert got_label["reason"].startswith(want_label["reason_prefix"])
            report = aggregate_report(read_records(labeled))
            assert report.to_dict() == expected_metrics
            by_name = {group.dataset: group for group in report.groups}
            assert report.overall.over_search_rate == 6 / 14
            assert report.overall.under_search_rate == 5 / 11
            assert by_name["alpha"].over_search_rate == 3 / 9
            assert by_name["alpha"].under_search_rate == 3 / 6
            assert by_name["beta"].over_search_rate == 3 / 5
            assert by_name["beta"].under_search_rate == 2 / 5


def test_pipeline_replay_and_report(tmp_path) -> None:
    with _criterion(
        "scripted rollout replays the case-study trajectory byte for byte and the "
        "rollout-detect-score-report pipeline yields cem 1, osr 0, usr 0 on it"
    ):
        steps = parse_trajectory(SLOW_DOWN_QUESTION, SLOW_DOWN_EFFICIENT_RAW).steps
        plain, search = steps
        assert plain.kind is StepKind.NON_SEARCH and search.kind is StepKind.SEARCH
        policy_script = tmp_path / "policy.jsonl"
        policy_script.write_text(
            json.dumps({"query": search.query, "answer": "I don't know."}) + "\n",
            encoding="utf-8",
        )
        over_script = tmp_path / "over_judge.jsonl"
        over_script.write_text(
            json.dumps({
                "user_message": f"Statement 1: {search.conclusion}\nStatement 2: I don't know.",
                "reply": "<answer>False</answer>",
            }) + "\n",
            encoding="utf-8",
        )
        under_script = tmp_path / "under_judge.jsonl"
        under_script.write_text(
            json.dumps({
                "user_message": (
                    f"<reasoning>{plain.reasoning}</reasoning>\n"
                    f"<conclusion>{plain.conclusion}</conclusion>"
                ),
                "reply": "<answer>True</answer>",
            }) + "\n",
            encoding="utf-8",
        )
        config_path = tmp_path / "pipeline.json"
        config_path.write_text(json.dumps({
            "corpus_path": str(_FIXTURES / "slow_down_corpus.jsonl"),
            "rollout": {"step_budget": 2, "top_k": 1},
            "generator": {"type": "scripted",
                          "script_path": str(_ROLLOUT / "generator_script.jsonl")},
            "policy": {"type": "scripted", "script_path": str(policy_script)},
            "over_search_judge": {"type": "scripted", "script_path": str(over_script)},
            "under_search_verifier": {"type": "scripted", "script_path": str(under_script)},
        }), encoding="utf-8")

        rolled = tmp_path / "rolled.jsonl"
        assert main(["rollout", "--config", str(config_path),
                     "--input", str(_ROLLOUT / "questions.jsonl"),
                     "--output", str(rolled)]) == 0
        (rollout_row,) = _read_jsonl(rolled)
        assert rollout_row["raw_text"] == SLOW_DOWN_EFFICIENT_RAW

        labeled = tmp_path / "labeled.jsonl"
        assert main(["detect", "--config", str(config_path),
                     "--input", str(rolled), "--output", str(labeled)]) == 0
        (labeled_row,) = _read_jsonl(labeled)
        assert [label["verdict"] for label in labeled_row["labels"]] == ["optimal", "optimal"]

        scored = tmp_path / "scored.jsonl"
        assert main(["score", "--input", str(labeled), "--output", str(scored)]) == 0
        (scored_row,) = _read_jsonl(scored)
        assert scored_row["reward"]["total"] == 1.4

        report_path = tmp_path / "report.json"
        assert main(["report", "--config", str(config_path),
                     "--input", str(scored), "--output", str(report_path)]) == 0
        overall = json.loads(report_path.read_text(encoding="utf-8"))["report"]["overall"]
        assert overall["cem_rate"] == 1.0
        assert overall["over_search_rate"] == 0.0
        assert overall["under_search_rate"] == 0.0


def test_single_sided_detection(tmp_path) -> None:
    with _criterion(
        "disabling one detection side labels that side's steps optimal and "
        "leaves the other side's verdicts unchanged"
    ):
        full = {row["id"]: row for row in _read_jsonl(_detect_to(tmp_path, "full.jsonl"))}
        over_only = {row["id"]: row
                     for row in _read_jsonl(_detect_to(tmp_path, "over.jsonl",
                                                       "--over-search-only"))}
        under_only = {row["id"]: row
                      for row in _read_jsonl(_detect_to(tmp_path, "under.jsonl",
                                                        "--under-search-only"))}
        judged = 0
        for record_id, row in full.items():
            if "steps" not in row:
                continue
            kinds = [step["kind"] for step in row["steps"]]
            for kind, base, over, under in zip(kinds, row["labels"],
                                               over_only[record_id]["labels"],
                                               under_only[record_id]["labels"]):
                judged += 1
                if kind == "search":
                    assert under["verdict"] == "optimal"
                    assert over == base
                else:
                    assert over["verdict"] == "optimal"
                    assert under == base
        assert judged == 25


def test_metric_counting_conventions(tmp_path) -> None:
    with _criterion(
        "metric denominators pool parsed steps only, zero denominators "
        "report 0, and group counts sum to the pooled row"
    ):
        labeled = _detect_to(tmp_path, "labeled.jsonl")
        report = aggregate_report(read_records(labeled))
        count_keys = (
            "total_records", "parsed_records", "correct_records", "search_steps",
            "non_search_steps", "over_search_flags", "under_search_flags", "unjudged_steps",
        )
        overall = report.overall.to_dict()
        for key in count_keys:
            assert overall[key] == sum(group.to_dict()[key] for group in report.groups)
        assert report.macro_cem_rate == sum(
            group.cem_rate for group in report.groups
        ) / len(report.groups)
        assert report.overall.total_records == 20
        assert report.overall.parsed_records == 18
        assert report.overall.search_steps == 14
        assert report.overall.non_search_steps == 11

        malformed = EvalRecord(
            id="m1",
            dataset="solo",
            question="q",
            golden_answers=("x",),
            trajectory=parse_trajectory("q", "<think></think>"),
        )
        lone = aggregate_report([malformed])
        assert lone.overall.total_records == 1
        assert lone.overall.parsed_records == 0
        assert lone.overall.search_steps == 0
        assert lone.overall.cem_rate == 0.0
        assert lone.overall.over_search_rate == 0.0
        assert lone.overall.under_search_rate == 0.0
