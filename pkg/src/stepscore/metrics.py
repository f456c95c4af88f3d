"""Corpus-level efficiency and accuracy metrics.

Rates are micro-averaged: flags and steps are pooled across records before
dividing, so a trajectory with many steps weighs more than one with few.
Macro variants (unweighted means of per-dataset rates) are reported next to
them. Only parsed trajectories contribute steps; unparsable trajectories
still count toward accuracy through their extracted answers.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .model import EvalRecord, Verdict
from .reward import cem


@dataclass(frozen=True)
class DatasetMetrics:
    """Counts and rates for one dataset (or the pooled total)."""

    dataset: str
    total_records: int
    parsed_records: int
    correct_records: int
    search_steps: int
    non_search_steps: int
    over_search_flags: int
    under_search_flags: int
    unjudged_steps: int
    cem_rate: float
    over_search_rate: float
    under_search_rate: float

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "total_records": self.total_records,
            "parsed_records": self.parsed_records,
            "correct_records": self.correct_records,
            "search_steps": self.search_steps,
            "non_search_steps": self.non_search_steps,
            "over_search_flags": self.over_search_flags,
            "under_search_flags": self.under_search_flags,
            "unjudged_steps": self.unjudged_steps,
            "cem_rate": self.cem_rate,
            "over_search_rate": self.over_search_rate,
            "under_search_rate": self.under_search_rate,
        }


@dataclass(frozen=True)
class MetricsReport:
    """Per-dataset rows plus the pooled row and macro averages."""

    groups: tuple[DatasetMetrics, ...]
    overall: DatasetMetrics
    macro_cem_rate: float
    macro_over_search_rate: float
    macro_under_search_rate: float

    def to_dict(self) -> dict:
        return {
            "groups": [group.to_dict() for group in self.groups],
            "overall": self.overall.to_dict(),
            "macro_cem_rate": self.macro_cem_rate,
            "macro_over_search_rate": self.macro_over_search_rate,
            "macro_under_search_rate": self.macro_under_search_rate,
        }

    def render_table(self) -> str:
        """Fixed-width text table, one row per dataset plus the pooled row."""
        header = (
            f"{'dataset':<16} {'records':>8} {'parsed':>7} {'cem':>7} "
            f"{'over':>7} {'under':>7} {'unjudged':>9}"
        )
        lines = [header, "-" * len(header)]
        for row in list(self.groups) + [self.overall]:
            lines.append(
                f"{row.dataset:<16} {row.total_records:>8} {row.parsed_records:>7} "
                f"{row.cem_rate:>7.3f} {row.over_search_rate:>7.3f} "
                f"{row.under_search_rate:>7.3f} {row.unjudged_steps:>9}"
            )
        lines.append(
            f"{'macro':<16} {'':>8} {'':>7} {self.macro_cem_rate:>7.3f} "
            f"{self.macro_over_search_rate:>7.3f} {self.macro_under_search_rate:>7.3f} {'':>9}"
        )
        return "\n".join(lines)


def _rate(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def _tally(dataset: str, records: Sequence[EvalRecord]) -> DatasetMetrics:
    total = len(records)
    parsed = 0
    correct = 0
    search_steps = 0
    non_search_steps = 0
    over_flags = 0
    under_flags = 0
    unjudged = 0
    for record in records:
        trajectory = record.trajectory
        correct += cem(trajectory.answer, record.golden_answers)
        if trajectory.format_ok != 1:
            continue
        parsed += 1
        search_steps += len(trajectory.search_steps)
        non_search_steps += len(trajectory.non_search_steps)
        for label in record.labels or ():
            if label.verdict is Verdict.OVER_SEARCH:
                over_flags += 1
            elif label.verdict is Verdict.UNDER_SEARCH:
                under_flags += 1
            elif label.verdict is Verdict.UNJUDGED:
                unjudged += 1
    return DatasetMetrics(
        dataset=dataset,
        total_records=total,
        parsed_records=parsed,
        correct_records=correct,
        search_steps=search_steps,
        non_search_steps=non_search_steps,
        over_search_flags=over_flags,
        under_search_flags=under_flags,
        unjudged_steps=unjudged,
        cem_rate=_rate(correct, total),
        over_search_rate=_rate(over_flags, search_steps),
        under_search_rate=_rate(under_flags, non_search_steps),
    )


def compute_over_search_rate(records: Sequence[EvalRecord]) -> float:
    """Pooled over-search flags over pooled search steps; 0.0 when no steps."""
    return _tally("", records).over_search_rate


def compute_under_search_rate(records: Sequence[EvalRecord]) -> float:
    """Pooled under-search flags over pooled non-search steps; 0.0 when no steps."""
    return _tally("", records).under_search_rate


def _macro(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def aggregate_report(records: Sequence[EvalRecord]) -> MetricsReport:
    """Group records by dataset and compute all rows in one pass.

    Dataset rows sort lexicographically; the pooled row is named "overall".
    """
    by_dataset: dict[str, list[EvalRecord]] = {}
    for record in records:
        by_dataset.setdefault(record.dataset, []).append(record)
    groups = tuple(_tally(name, by_dataset[name]) for name in sorted(by_dataset))
    return MetricsReport(
        groups=groups,
        overall=_tally("overall", list(records)),
        macro_cem_rate=_macro([g.cem_rate for g in groups]),
        macro_over_search_rate=_macro([g.over_search_rate for g in groups]),
        macro_under_search_rate=_macro([g.under_search_rate for g in groups]),
    )


def _merge_rows(name: str, rows: Sequence[DatasetMetrics]) -> DatasetMetrics:
    total = sum(r.total_records for r in rows)
    correct = sum(r.correct_records for r in rows)
    search_steps = sum(r.search_steps for r in rows)
    non_search = sum(r.non_search_steps for r in rows)
    over_flags = sum(r.over_search_flags for r in rows)
    under_flags = sum(r.under_search_flags for r in rows)
    return DatasetMetrics(
        dataset=name,
        total_records=total,
        parsed_records=sum(r.parsed_records for r in rows),
        correct_records=correct,
        search_steps=search_steps,
        non_search_steps=non_search,
        over_search_flags=over_flags,
        under_search_flags=under_flags,
        unjudged_steps=sum(r.unjudged_steps for r in rows),
        cem_rate=_rate(correct, total),
        over_search_rate=_rate(over_flags, search_steps),
        under_search_rate=_rate(under_flags, non_search),
    )


def merge_reports(reports: Iterable[MetricsReport]) -> MetricsReport:
    """Combine partial reports by summing counts and recomputing rates.

    Associative and order-insensitive up to float rounding of the rates, so
    shards aggregated separately merge into the same report as one pass over
    all records.
    """
    rows_by_dataset: dict[str, list[DatasetMetrics]] = {}
    overall_rows: list[DatasetMetrics] = []
    for report in reports:
        for group in report.groups:
            rows_by_dataset.setdefault(group.dataset, []).append(group)
        overall_rows.append(report.overall)
    groups = tuple(_merge_rows(name, rows_by_dataset[name]) for name in sorted(rows_by_dataset))
    if overall_rows:
        overall = _merge_rows("overall", overall_rows)
    else:
        overall = _tally("overall", [])
    return MetricsReport(
        groups=groups,
        overall=overall,
        macro_cem_rate=_macro([g.cem_rate for g in groups]),
        macro_over_search_rate=_macro([g.over_search_rate for g in groups]),
        macro_under_search_rate=_macro([g.under_search_rate for g in groups]),
    )
