"""Core value types for step-structured trajectories and their scores."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import EmptyGoldenList, InconsistentTrajectory, LabelKindMismatch


class StepKind(str, Enum):
    """Whether a reasoning step consulted the retriever."""

    SEARCH = "search"
    NON_SEARCH = "non_search"


class Verdict(str, Enum):
    """Outcome of judging a single step."""

    OPTIMAL = "optimal"
    OVER_SEARCH = "over_search"
    UNDER_SEARCH = "under_search"
    UNJUDGED = "unjudged"


@dataclass(frozen=True)
class Step:
    """One reasoning step extracted from a trajectory.

    A search step carries the query it issued and the retrieved context;
    a non-search step carries neither. Contents are stored trimmed.
    """

    index: int
    reasoning: str
    query: str | None
    context: str | None
    conclusion: str
    kind: StepKind

    def __post_init__(self) -> None:
        if self.index < 1:
            raise InconsistentTrajectory(f"step index must be >= 1, got {self.index}")
        has_query = self.query is not None
        has_context = self.context is not None
        if has_query != has_context:
            raise InconsistentTrajectory("query and context must be present together")
        if (self.kind is StepKind.SEARCH) != has_query:
            raise InconsistentTrajectory("search steps carry query and context, non-search steps neither")

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "reasoning": self.reasoning,
            "query": self.query,
            "context": self.context,
            "conclusion": self.conclusion,
            "kind": self.kind.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Step":
        return cls(
            index=data["index"],
            reasoning=data["reasoning"],
            query=data.get("query"),
            context=data.get("context"),
            conclusion=data["conclusion"],
            kind=StepKind(data["kind"]),
        )


@dataclass(frozen=True)
class StepLabel:
    """Judged verdict for one step.

    ``reason`` is set only for unjudged steps and says why judging failed.
    ``judge_raw`` preserves the raw judge output when a judge was consulted.
    """

    verdict: Verdict
    reason: str | None = None
    judge_raw: str | None = None

    def __post_init__(self) -> None:
        if (self.verdict is Verdict.UNJUDGED) != (self.reason is not None):
            raise LabelKindMismatch("reason is set if and only if the verdict is unjudged")

    def to_dict(self) -> dict:
        data: dict = {"verdict": self.verdict.value}
        if self.reason is not None:
            data["reason"] = self.reason
        if self.judge_raw is not None:
            data["judge_raw"] = self.judge_raw
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "StepLabel":
        return cls(
            verdict=Verdict(data["verdict"]),
            reason=data.get("reason"),
            judge_raw=data.get("judge_raw"),
        )


#: step_count value stored on trajectories that failed the format check.
STEP_COUNT_SENTINEL = -1


@dataclass(frozen=True)
class Trajectory:
    """A full model transcript plus its parse outcome.

    ``raw_text`` preserves the original bytes. When ``format_ok`` is 1 the
    steps and answer are the parsed, trimmed contents; when it is 0 the
    trajectory is a sentinel with no steps and ``step_count`` of -1 (the
    answer may still hold a best-effort extraction for exact-match scoring).
    """

    question: str
    raw_text: str
    steps: tuple[Step, ...]
    answer: str
    format_ok: int
    step_count: int

    def __post_init__(self) -> None:
        if self.format_ok not in (0, 1):
            raise InconsistentTrajectory(f"format_ok must be 0 or 1, got {self.format_ok}")
        if self.format_ok == 1:
            if self.step_count != len(self.steps):
                raise InconsistentTrajectory("step_count must equal len(steps) when parsed")
            if self.step_count < 1:
                raise InconsistentTrajectory("a parsed trajectory has at least one step")
            if not self.answer.strip():
                raise InconsistentTrajectory("a parsed trajectory has a non-empty answer")
        else:
            if self.step_count != STEP_COUNT_SENTINEL:
                raise InconsistentTrajectory("sentinel trajectories use step_count -1")
            if self.steps:
                raise InconsistentTrajectory("sentinel trajectories carry no steps")

    @property
    def search_steps(self) -> tuple[Step, ...]:
        return tuple(s for s in self.steps if s.kind is StepKind.SEARCH)

    @property
    def non_search_steps(self) -> tuple[Step, ...]:
        return tuple(s for s in self.steps if s.kind is StepKind.NON_SEARCH)


@dataclass(frozen=True)
class RewardConfig:
    """Weights and switches for trajectory scoring.

    ``lambda_f`` (format weight) must lie in [0, 1]; ``lambda_p`` (step bonus
    weight) must be >= 0. The detection switches let either detector be
    ablated; a disabled side labels its steps optimal without judging.
    """

    lambda_f: float = 0.2
    lambda_p: float = 0.4
    over_search_enabled: bool = True
    under_search_enabled: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.lambda_f <= 1.0:
            raise ValueError(f"lambda_f must be in [0, 1], got {self.lambda_f}")
        if self.lambda_p < 0.0:
            raise ValueError(f"lambda_p must be >= 0, got {self.lambda_p}")

    def to_dict(self) -> dict:
        return {
            "lambda_f": self.lambda_f,
            "lambda_p": self.lambda_p,
            "over_search_enabled": self.over_search_enabled,
            "under_search_enabled": self.under_search_enabled,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RewardConfig":
        return cls(
            lambda_f=data.get("lambda_f", 0.2),
            lambda_p=data.get("lambda_p", 0.4),
            over_search_enabled=data.get("over_search_enabled", True),
            under_search_enabled=data.get("under_search_enabled", True),
        )


@dataclass(frozen=True)
class RewardBreakdown:
    """All inputs and the total of one trajectory score."""

    answer_correct: int
    format_ok: int
    step_count: int
    optimal_steps: int
    bonus_fraction: float
    total: float

    def to_dict(self) -> dict:
        return {
            "answer_correct": self.answer_correct,
            "format_ok": self.format_ok,
            "step_count": self.step_count,
            "optimal_steps": self.optimal_steps,
            "bonus_fraction": self.bonus_fraction,
            "total": self.total,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RewardBreakdown":
        return cls(
            answer_correct=data["answer_correct"],
            format_ok=data["format_ok"],
            step_count=data["step_count"],
            optimal_steps=data["optimal_steps"],
            bonus_fraction=data["bonus_fraction"],
            total=data["total"],
        )


@dataclass(frozen=True)
class EvalRecord:
    """One question with its trajectory and, optionally, labels and reward."""

    id: str
    dataset: str
    question: str
    golden_answers: tuple[str, ...]
    trajectory: Trajectory
    labels: tuple[StepLabel, ...] | None = None
    reward: RewardBreakdown | None = None

    def __post_init__(self) -> None:
        if not self.golden_answers:
            raise EmptyGoldenList(f"record {self.id!r} has no golden answers")
        if self.labels is not None:
            if len(self.labels) != len(self.trajectory.steps):
                raise LabelKindMismatch(
                    f"record {self.id!r} has {len(self.labels)} labels for "
                    f"{len(self.trajectory.steps)} steps"
                )
            for step, label in zip(self.trajectory.steps, self.labels):
                if label.verdict is Verdict.OVER_SEARCH and step.kind is not StepKind.SEARCH:
                    raise LabelKindMismatch(f"over_search label on non-search step {step.index}")
                if label.verdict is Verdict.UNDER_SEARCH and step.kind is not StepKind.NON_SEARCH:
                    raise LabelKindMismatch(f"under_search label on search step {step.index}")
