"""Budgeted inference driver that interleaves generation with retrieval.

The driver owns the trajectory skeleton: it seeds the first step, closes and
reopens step tags at conclusion boundaries, fills in retrieved context after
each search, and forces the final answer once the think block closes. The
generator only ever produces free text up to the next stop marker, so a
cooperative backend yields a transcript that passes the format check by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .grammar import WHITESPACE, parse_trajectory
from .model import Trajectory

#: Markers that hand control back to the driver, in no particular priority;
#: the earliest occurrence in an emission wins.
STOP_MARKERS = ("</search>", "</conclusion>", "</answer>")

#: Decoding modes a generator backend must understand.
GENERATION_MODES = ("exploratory", "deterministic")


class GeneratorBackend(Protocol):
    """One generation session, already bound to its question.

    Given the transcript so far, emit text that is expected to contain one of
    the stop markers. The driver truncates at the earliest marker; emitting
    past it is harmless.
    """

    def generate(self, transcript: str, stop_markers: Sequence[str], mode: str) -> str: ...


class RetrieverBackend(Protocol):
    """Ranked (title, body) passages for a query."""

    def retrieve(self, query: str, k: int) -> list[tuple[str, str]]: ...


@dataclass(frozen=True)
class RolloutConfig:
    """Driver limits: step budget, passages per search, and emission cap."""

    step_budget: int = 8
    top_k: int = 3
    max_gen_chars: int = 8192

    def __post_init__(self) -> None:
        if self.step_budget < 1:
            raise ValueError(f"step_budget must be >= 1, got {self.step_budget}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if self.max_gen_chars < 1:
            raise ValueError(f"max_gen_chars must be >= 1, got {self.max_gen_chars}")


@dataclass(frozen=True)
class RolloutResult:
    """Parsed trajectory plus a diagnostic when the run went off the rails."""

    trajectory: Trajectory
    diagnostic: str | None = None


def format_context(passages: Sequence[tuple[str, str]]) -> str:
    """Render retrieved passages for the context block, one line per passage.

    Passages must already be in rank order; an empty list renders as "".
    """
    return "\n".join(
        f'Doc {rank}(Title: "{title}") {body}' for rank, (title, body) in enumerate(passages, start=1)
    )


def _earliest_marker(emission: str, markers: Sequence[str], cap: int) -> tuple[int, str] | None:
    """Position and identity of the first stop marker completing within cap chars."""
    window = emission[:cap]
    best: tuple[int, str] | None = None
    for marker in markers:
        position = window.find(marker)
        if position >= 0 and (best is None or position < best[0]):
            best = (position, marker)
    return best


def _last_search_query(transcript: str) -> str:
    """Content of the search span that the transcript just closed."""
    close_start = len(transcript) - len("</search>")
    open_start = transcript.rfind("<search>", 0, close_start)
    if open_start < 0:
        return ""
    return transcript[open_start + len("<search>") : close_start]


def run_inference(
    question: str,
    generator: GeneratorBackend,
    retriever: RetrieverBackend,
    config: RolloutConfig | None = None,
    *,
    mode: str = "exploratory",
) -> RolloutResult:
    """Drive one budgeted rollout and parse whatever transcript results.

    Failure is always in-band: a generator that never reaches a stop marker,
    or one that emits the answer inside the think block, produces a sentinel
    trajectory (format_ok 0) with a diagnostic instead of raising, so batch
    rollouts survive individual bad runs.
    """
    if config is None:
        config = RolloutConfig()
    if mode not in GENERATION_MODES:
        raise ValueError(f"mode must be one of {GENERATION_MODES}, got {mode!r}")

    def stalled(transcript: str, emission: str, stage: str) -> RolloutResult:
        partial = transcript + emission[: config.max_gen_chars]
        return RolloutResult(
            trajectory=parse_trajectory(question, partial),
            diagnostic=f"generator stalled {stage}: no stop marker within {config.max_gen_chars} chars",
        )

    transcript = "<think><step><reasoning>"
    step_number = 1
    early_answer = False
    while step_number <= config.step_budget:
        emission = generator.generate(transcript, STOP_MARKERS, mode)
        found = _earliest_marker(emission, STOP_MARKERS, config.max_gen_chars)
        if found is None:
            return stalled(transcript, emission, f"in step {step_number}")
        position, marker = found
        transcript += emission[: position + len(marker)]
        if marker == "</answer>":
            early_answer = True
            break
        if marker == "</search>":
            query = _last_search_query(transcript).strip(WHITESPACE)
            passages = retriever.retrieve(query, config.top_k)
            transcript += "<context>" + format_context(passages) + "</context><conclusion>"
        else:
            transcript += "</step>"
            step_number += 1
            if step_number <= config.step_budget:
                transcript += "<step><reasoning>"

    transcript += "</think>"
    diagnostic = None
    if "</answer>" not in transcript:
        transcript += "<answer>"
        emission = generator.generate(transcript, ("</answer>",), mode)
        found = _earliest_marker(emission, ("</answer>",), config.max_gen_chars)
        if found is None:
            return stalled(transcript, emission, "in the forced answer")
        position, marker = found
        transcript += emission[: position + len(marker)]
    elif early_answer:
        diagnostic = "answer emitted inside the think region"
    return RolloutResult(trajectory=parse_trajectory(question, transcript), diagnostic=diagnostic)
