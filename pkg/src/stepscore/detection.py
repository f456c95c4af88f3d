"""Step-level search-efficiency judging.

A search step is over-search when the policy can produce the same conclusion
without retrieving: the step's query is re-answered standalone and an
equivalence judge compares the two statements. A non-search step is
under-search when a fact-and-logic verifier rejects the step's reasoning.
Steps that cannot be judged (empty inputs, dead backends, unparseable
verdicts) are labeled unjudged with a reason instead of failing the batch.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Protocol, Sequence

import requests

from ._judge_prompts import (
    EQUIVALENCE_JUDGE_SYSTEM,
    STEP_VERIFIER_SYSTEM,
    render_equivalence_user,
    render_verification_user,
)
from .errors import BackendUnavailable, FormatNotOk
from .grammar import find_tag_span
from .model import RewardConfig, Step, StepKind, StepLabel, Trajectory, Verdict

DEFAULT_EQUIVALENCE_JUDGE_MODEL = "gpt-4.1-mini"
DEFAULT_STEP_VERIFIER_MODEL = "gpt-5-mini"


class JudgeAnswer(Enum):
    """What a judge's raw output parsed to."""

    TRUE = "true"
    FALSE = "false"
    UNPARSEABLE = "unparseable"


class ChatBackend(Protocol):
    """Anything that can answer a (system, user) message pair with text."""

    def complete(self, system_prompt: str, user_message: str) -> str: ...


class AnswerBackend(Protocol):
    """Anything that can answer a bare query without trajectory context."""

    def answer_standalone(self, query: str) -> str: ...


def parse_judge_answer(raw: str) -> JudgeAnswer:
    """Read the first answer span of a judge reply as a boolean verdict.

    Accepts "true"/"false" case-insensitively after trimming; anything else,
    including a missing or unterminated answer tag, is unparseable.
    """
    span = find_tag_span(raw, "answer")
    if span is None:
        return JudgeAnswer.UNPARSEABLE
    content = raw[span.open_end : span.close_start].strip().lower()
    if content == "true":
        return JudgeAnswer.TRUE
    if content == "false":
        return JudgeAnswer.FALSE
    return JudgeAnswer.UNPARSEABLE


def _unjudged(reason: str, judge_raw: str | None = None) -> StepLabel:
    return StepLabel(verdict=Verdict.UNJUDGED, reason=reason, judge_raw=judge_raw)


def _ask_with_retries(
    call: Callable[[], str], max_retries: int
) -> tuple[JudgeAnswer, str | None, str | None]:
    """Call a judge up to max_retries + 1 times until a verdict parses.

    Returns (answer, last raw reply, failure reason). Backend exceptions are
    swallowed and retried like unparseable replies; the reason reports
    whichever failure happened last.
    """
    if max_retries < 0:
        raise ValueError(f"max_retries must be >= 0, got {max_retries}")
    last_raw: str | None = None
    failure: str | None = None
    for _ in range(max_retries + 1):
        try:
            raw = call()
        except Exception as exc:
            failure = f"backend unavailable: {exc}"
            continue
        last_raw = raw
        answer = parse_judge_answer(raw)
        if answer is not JudgeAnswer.UNPARSEABLE:
            return answer, raw, None
        failure = "unparseable verdict"
    return JudgeAnswer.UNPARSEABLE, last_raw, failure


def _judge_equivalence(
    conclusion: str, regenerated: str, judge: ChatBackend, max_retries: int
) -> StepLabel:
    if not regenerated.strip():
        return _unjudged("empty regenerated answer")
    user_message = render_equivalence_user(conclusion, regenerated)
    answer, raw, failure = _ask_with_retries(
        lambda: judge.complete(EQUIVALENCE_JUDGE_SYSTEM, user_message), max_retries
    )
    if answer is JudgeAnswer.TRUE:
        return StepLabel(verdict=Verdict.OVER_SEARCH, judge_raw=raw)
    if answer is JudgeAnswer.FALSE:
        return StepLabel(verdict=Verdict.OPTIMAL, judge_raw=raw)
    return _unjudged(failure or "unparseable verdict", raw)


def detect_over_search(
    step: Step, policy: AnswerBackend, judge: ChatBackend, *, max_retries: int = 1
) -> StepLabel:
    """Judge one search step: could the policy have answered without retrieving?

    The query is re-answered standalone, then the equivalence judge compares
    the step conclusion with the standalone answer. Equivalent means the
    search was unnecessary (over-search); different means it was warranted.
    """
    if step.kind is not StepKind.SEARCH:
        raise ValueError(f"over-search detection needs a search step, got step {step.index}")
    query = step.query or ""
    if not query.strip():
        return _unjudged("empty query")
    if not step.conclusion.strip():
        return _unjudged("empty conclusion")
    try:
        regenerated = policy.answer_standalone(query)
    except Exception as exc:
        return _unjudged(f"policy backend unavailable: {exc}")
    return _judge_equivalence(step.conclusion, regenerated, judge, max_retries)


def detect_under_search(step: Step, verifier: ChatBackend, *, max_retries: int = 1) -> StepLabel:
    """Judge one non-search step: does it hold up without retrieval?

    The verifier checks factual accuracy and internal logic of the step in
    isolation. A rejection means the step needed a search (under-search).
    """
    if step.kind is not StepKind.NON_SEARCH:
        raise ValueError(f"under-search detection needs a non-search step, got step {step.index}")
    if not step.conclusion.strip():
        return _unjudged("empty conclusion")
    user_message = render_verification_user(step.reasoning, step.conclusion)
    answer, raw, failure = _ask_with_retries(
        lambda: verifier.complete(STEP_VERIFIER_SYSTEM, user_message), max_retries
    )
    if answer is JudgeAnswer.TRUE:
        return StepLabel(verdict=Verdict.OPTIMAL, judge_raw=raw)
    if answer is JudgeAnswer.FALSE:
        return StepLabel(verdict=Verdict.UNDER_SEARCH, judge_raw=raw)
    return _unjudged(failure or "unparseable verdict", raw)


def batch_regenerate(queries: Sequence[str], policy: AnswerBackend) -> list[str]:
    """Standalone answers for many queries; a failed item yields "".

    Uses the policy's answer_many when it has one, falling back to per-query
    calls. The output always aligns with the input, so one bad query never
    disturbs its neighbors.
    """
    batched = getattr(policy, "answer_many", None)
    if callable(batched):
        try:
            answers = list(batched(list(queries)))
            if len(answers) == len(queries):
                return [answer if isinstance(answer, str) else "" for answer in answers]
        except Exception:
            pass
    answers = []
    for query in queries:
        try:
            answers.append(policy.answer_standalone(query))
        except Exception:
            answers.append("")
    return answers


def label_trajectory(
    trajectory: Trajectory,
    policy: AnswerBackend | None = None,
    judge: ChatBackend | None = None,
    verifier: ChatBackend | None = None,
    config: RewardConfig | None = None,
    *,
    max_in_flight: int = 1,
    max_retries: int = 1,
) -> tuple[StepLabel, ...]:
    """Label every step of a parsed trajectory, one verdict per step.

    Standalone regeneration runs first as a single batch, then all judge
    calls run on a pool of at most max_in_flight threads. Labels come back
    in step order regardless of completion order, and a failure on one step
    only ever marks that step unjudged. A detection side disabled in the
    config labels its steps optimal without consulting any backend.
    """
    if trajectory.format_ok != 1:
        raise FormatNotOk("cannot label a trajectory that failed the format check")
    if max_in_flight < 1:
        raise ValueError(f"max_in_flight must be >= 1, got {max_in_flight}")
    if config is None:
        config = RewardConfig()

    judgeable = [
        step
        for step in trajectory.steps
        if step.kind is StepKind.SEARCH
        and config.over_search_enabled
        and (step.query or "").strip()
        and step.conclusion.strip()
    ]
    if judgeable and (policy is None or judge is None):
        raise ValueError("over-search detection needs a policy and a judge backend")
    if config.under_search_enabled and trajectory.non_search_steps and verifier is None:
        raise ValueError("under-search detection needs a verifier backend")
    regenerated = dict(
        zip(
            (step.index for step in judgeable),
            batch_regenerate([step.query or "" for step in judgeable], policy) if judgeable else [],
        )
    )

    def label_one(step: Step) -> StepLabel:
        if step.kind is StepKind.SEARCH:
            if not config.over_search_enabled:
                return StepLabel(verdict=Verdict.OPTIMAL)
            if not (step.query or "").strip():
                return _unjudged("empty query")
            if not step.conclusion.strip():
                return _unjudged("empty conclusion")
            return _judge_equivalence(step.conclusion, regenerated[step.index], judge, max_retries)
        if not config.under_search_enabled:
            return StepLabel(verdict=Verdict.OPTIMAL)
        return detect_under_search(step, verifier, max_retries=max_retries)

    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        futures = [pool.submit(label_one, step) for step in trajectory.steps]
        return tuple(future.result() for future in futures)


@dataclass(frozen=True)
class JudgeEndpointConfig:
    """How to reach one chat-completions endpoint.

    api_key_env names an environment variable; the key itself is read at
    request time and never stored or echoed. max_retries here covers
    transport failures (connection errors and 5xx), distinct from the
    verdict-level retries of the detection functions.
    """

    endpoint_url: str
    model_name: str
    api_key_env: str | None = None
    timeout: float = 30.0
    max_retries: int = 2
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if not self.endpoint_url:
            raise ValueError("endpoint_url must be non-empty")
        if not self.model_name:
            raise ValueError("model_name must be non-empty")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {self.max_in_flight}")


def _post_chat(config: JudgeEndpointConfig, messages: list[dict]) -> str:
    """POST one chat-completions request, retrying transport-level failures."""
    payload = {"model": config.model_name, "messages": messages, "temperature": 0}
    headers = {"Content-Type": "application/json"}
    if config.api_key_env:
        api_key = os.environ.get(config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
    last_failure = "no attempts made"
    for _ in range(config.max_retries + 1):
        try:
            response = requests.post(
                config.endpoint_url, json=payload, headers=headers, timeout=config.timeout
            )
        except requests.RequestException as exc:
            last_failure = str(exc)
            continue
        if response.status_code >= 500:
            last_failure = f"server returned {response.status_code}"
            continue
        if response.status_code != 200:
            raise BackendUnavailable(
                f"{config.endpoint_url} returned {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendUnavailable(f"{config.endpoint_url} sent a malformed response: {exc}") from exc
    raise BackendUnavailable(f"{config.endpoint_url}: {last_failure}")


class HttpChatBackend:
    """Chat-completions judge client; deterministic (temperature 0)."""

    def __init__(self, config: JudgeEndpointConfig) -> None:
        self.config = config

    def complete(self, system_prompt: str, user_message: str) -> str:
        return _post_chat(
            self.config,
            [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_message},
            ],
        )


class HttpAnswerBackend:
    """Standalone-answer client over the same chat surface.

    Sends the bare query as the user message; an optional instruction becomes
    the system message when given.
    """

    def __init__(self, config: JudgeEndpointConfig, instruction: str | None = None) -> None:
        self.config = config
        self.instruction = instruction

    def answer_standalone(self, query: str) -> str:
        messages = []
        if self.instruction:
            messages.append({"role": "system", "content": self.instruction})
        messages.append({"role": "user", "content": query})
        return _post_chat(self.config, messages)
