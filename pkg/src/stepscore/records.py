"""JSONL serialization for evaluation records.

The wire format is one JSON object per line with keys id, dataset, question,
golden_answers, raw_text, and optionally steps, labels, and reward. Steps are
always re-derived from raw_text on read (the parse is deterministic), so the
stored copy exists for external consumers and can never drift from the text.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from pathlib import Path

from .errors import DuplicateId
from .grammar import parse_trajectory
from .model import EvalRecord, RewardBreakdown, StepLabel


def record_to_dict(record: EvalRecord) -> dict:
    data: dict = {
        "id": record.id,
        "dataset": record.dataset,
        "question": record.question,
        "golden_answers": list(record.golden_answers),
        "raw_text": record.trajectory.raw_text,
    }
    if record.trajectory.format_ok == 1:
        data["steps"] = [step.to_dict() for step in record.trajectory.steps]
    if record.labels is not None:
        data["labels"] = [label.to_dict() for label in record.labels]
    if record.reward is not None:
        data["reward"] = record.reward.to_dict()
    return data


def record_from_dict(data: dict) -> EvalRecord:
    trajectory = parse_trajectory(data["question"], data["raw_text"])
    labels = None
    if "labels" in data:
        labels = tuple(StepLabel.from_dict(entry) for entry in data["labels"])
    reward = RewardBreakdown.from_dict(data["reward"]) if "reward" in data else None
    return EvalRecord(
        id=str(data["id"]),
        dataset=data.get("dataset", "default"),
        question=data["question"],
        golden_answers=tuple(data["golden_answers"]),
        trajectory=trajectory,
        labels=labels,
        reward=reward,
    )


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line number, parsed object) for every non-blank line."""
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_number}: not valid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ValueError(f"{path}:{line_number}: expected a JSON object")
            yield line_number, data


def read_records(path: str | Path) -> list[EvalRecord]:
    """Read evaluation records, rejecting duplicate ids."""
    records = []
    seen: set[str] = set()
    for line_number, data in iter_jsonl(path):
        try:
            record = record_from_dict(data)
        except KeyError as exc:
            raise ValueError(
                f"{path}:{line_number}: record missing key {exc.args[0]!r}"
            ) from exc
        if record.id in seen:
            raise DuplicateId(f"{path}:{line_number}: duplicate record id {record.id!r}")
        seen.add(record.id)
        records.append(record)
    return records


def write_records(path: str | Path, records: Iterable[EvalRecord]) -> None:
    write_jsonl(path, (record_to_dict(record) for record in records))


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    """Write one compact JSON object per line; key order is insertion order."""
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
