"""Audit the bundled 20-trajectory fixture batch with scripted judges.

Every search step is checked for over-search (the policy re-answers the query
standalone and an equivalence judge compares that answer with the step's
conclusion) and every non-search step for under-search (a verifier vets the
step's facts and logic). The scripted backends replay canned replies, so the
audit runs offline and deterministically. The batch ends in per-dataset and
pooled rates over accuracy, over-search, and under-search.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from stepscore.detection import label_trajectory
from stepscore.fixtures import load_judge_script, load_policy_script
from stepscore.metrics import aggregate_report
from stepscore.records import read_records

DETECTION = Path(__file__).resolve().parents[1] / "fixtures" / "v1" / "detection"


def main() -> None:
    records = read_records(DETECTION / "trajectories.jsonl")
    policy = load_policy_script(DETECTION / "policy_script.jsonl")
    judge = load_judge_script(DETECTION / "over_judge_script.jsonl")
    verifier = load_judge_script(DETECTION / "under_judge_script.jsonl")

    labeled = []
    for record in records:
        if record.trajectory.format_ok != 1:
            labeled.append(replace(record, labels=()))
            print(f"{record.id} ({record.dataset}): rejected by the format check")
            continue
        labels = label_trajectory(
            record.trajectory, policy, judge, verifier, max_in_flight=4, max_retries=1
        )
        labeled.append(replace(record, labels=tuple(labels)))
        verdicts = ", ".join(label.verdict.value for label in labels)
        print(f"{record.id} ({record.dataset}): {verdicts}")

    print()
    print(aggregate_report(labeled).render_table())


if __name__ == "__main__":
    main()
