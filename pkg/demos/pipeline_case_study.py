"""Run the full pipeline on one case study: roll out, label, score, report.

A scripted generator replays a two-step answer to a birthplace question: the
first step resolves the performer from the question alone, the second searches
a one-document corpus for the birthplace. The rollout driver inserts the
retrieved context, the step labelers confirm both steps were the right call,
and the reward lands at its 1.4 ceiling.
"""

from __future__ import annotations

from pathlib import Path

from stepscore.detection import (
    label_trajectory,
    render_equivalence_user,
    render_verification_user,
)
from stepscore.fixtures import (
    SLOW_DOWN_GOLDEN_ANSWERS,
    SLOW_DOWN_QUESTION,
    ScriptedGenerator,
    ScriptedJudge,
    ScriptedPolicy,
    load_generator_script,
)
from stepscore.metrics import aggregate_report
from stepscore.model import EvalRecord
from stepscore.retriever import CorpusRetriever, index_corpus, load_corpus
from stepscore.reward import score_trajectory
from stepscore.rollout import RolloutConfig, run_inference

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures" / "v1"


def main() -> None:
    print(f"question: {SLOW_DOWN_QUESTION}")
    print()

    scripts = load_generator_script(FIXTURES / "rollout" / "generator_script.jsonl")
    retriever = CorpusRetriever(index_corpus(load_corpus(FIXTURES / "slow_down_corpus.jsonl")))
    result = run_inference(
        SLOW_DOWN_QUESTION,
        ScriptedGenerator(scripts["slow1"]),
        retriever,
        RolloutConfig(step_budget=2, top_k=1),
    )
    trajectory = result.trajectory
    print("rolled-out trajectory:")
    print(trajectory.raw_text)
    print()

    plain, search = trajectory.steps
    policy = ScriptedPolicy({search.query: "I don't know."})
    judge = ScriptedJudge({
        render_equivalence_user(search.conclusion, "I don't know."): "<answer>False</answer>",
    })
    verifier = ScriptedJudge({
        render_verification_user(plain.reasoning, plain.conclusion): "<answer>True</answer>",
    })
    labels = label_trajectory(trajectory, policy, judge, verifier)
    for step, label in zip(trajectory.steps, labels):
        print(f"step {step.index} ({step.kind.value}): {label.verdict.value}")

    record = EvalRecord(
        id="slow1",
        dataset="case_study",
        question=SLOW_DOWN_QUESTION,
        golden_answers=SLOW_DOWN_GOLDEN_ANSWERS,
        trajectory=trajectory,
        labels=tuple(labels),
    )
    breakdown = score_trajectory(record)
    print(f"reward: answer={breakdown.answer_correct}, format={breakdown.format_ok}, "
          f"optimal {breakdown.optimal_steps}/{breakdown.step_count}, "
          f"total={breakdown.total}")
    print()
    print(aggregate_report([record]).render_table())


if __name__ == "__main__":
    main()
