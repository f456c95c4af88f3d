"""Strict tag grammar for step-structured trajectories.

A well-formed trajectory is one ``<think>`` block holding one or more
``<step>`` blocks, followed by exactly one non-empty ``<answer>`` block and
nothing else. Each step is ``<reasoning>`` then optionally ``<search>`` plus
``<context>`` then ``<conclusion>``, with only whitespace between blocks.
Any deviation, including reserved tags appearing inside content, makes the
whole trajectory malformed: there is no partial credit at this layer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import STEP_COUNT_SENTINEL, Step, StepKind, Trajectory

#: Tag names with reserved meaning; their tokens may not appear in content.
RESERVED_TAGS = ("think", "step", "reasoning", "search", "context", "conclusion", "answer")

RESERVED_TOKENS = tuple(tok for name in RESERVED_TAGS for tok in (f"<{name}>", f"</{name}>"))

#: Characters treated as whitespace between blocks (after newline normalization).
WHITESPACE = " \t\n"

_THINK_OPEN, _THINK_CLOSE = "<think>", "</think>"
_STEP_OPEN, _STEP_CLOSE = "<step>", "</step>"
_ANSWER_OPEN, _ANSWER_CLOSE = "<answer>", "</answer>"

_STEP_LEVEL_FORBIDDEN = (_THINK_OPEN, _THINK_CLOSE, _STEP_OPEN, _STEP_CLOSE, _ANSWER_OPEN, _ANSWER_CLOSE)
_SEARCH_TOKENS = ("<search>", "</search>", "<context>", "</context>")


def normalize(text: str) -> str:
    """Normalize line endings: CRLF and lone CR both become LF. Idempotent."""
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _trim(text: str) -> str:
    return text.strip(WHITESPACE)


def _is_blank(text: str) -> bool:
    return not text.strip(WHITESPACE)


@dataclass(frozen=True)
class TagSpan:
    """Offsets of one tag pair in a text: ``text[open_end:close_start]`` is the content."""

    tag: str
    open_start: int
    open_end: int
    close_start: int
    close_end: int


def find_tag_span(text: str, tag: str, start: int = 0) -> TagSpan | None:
    """Locate the first ``<tag>...</tag>`` pair at or after ``start``.

    Returns None when the open tag is missing or no close tag follows it.
    """
    open_tok, close_tok = f"<{tag}>", f"</{tag}>"
    i = text.find(open_tok, start)
    if i < 0:
        return None
    j = text.find(close_tok, i + len(open_tok))
    if j < 0:
        return None
    return TagSpan(tag, i, i + len(open_tok), j, j + len(close_tok))


@dataclass(frozen=True)
class FormatReport:
    """Outcome of the format check with a human-readable failure reason."""

    format_ok: int
    step_count: int
    reason: str | None


@dataclass(frozen=True)
class _RawStep:
    reasoning: str
    query: str | None
    context: str | None
    conclusion: str


@dataclass(frozen=True)
class _Analysis:
    ok: bool
    reason: str | None
    steps: tuple[_RawStep, ...]
    answer: str


def _parse_step_body(body: str) -> _RawStep | None:
    """Validate one step body and extract its trimmed parts.

    The body is everything between ``<step>`` and ``</step>``. Layout must be
    reasoning, then search plus context for a search step, then conclusion,
    with nothing but whitespace between the blocks and after the conclusion.
    """
    s = _trim(body)
    for tok in _STEP_LEVEL_FORBIDDEN:
        if tok in s:
            return None
    if s.count("<reasoning>") != 1 or s.count("</reasoning>") != 1:
        return None
    reasoning = find_tag_span(s, "reasoning")
    if reasoning is None or not _is_blank(s[: reasoning.open_start]):
        return None
    if s.count("<conclusion>") != 1 or s.count("</conclusion>") != 1:
        return None
    conclusion = find_tag_span(s, "conclusion")
    if conclusion is None or conclusion.open_start < reasoning.close_end:
        return None
    if not _is_blank(s[conclusion.close_end :]):
        return None

    if any(tok in s for tok in _SEARCH_TOKENS):
        if s.count("<search>") != 1 or s.count("</search>") != 1:
            return None
        if s.count("<context>") != 1 or s.count("</context>") != 1:
            return None
        search = find_tag_span(s, "search")
        context = find_tag_span(s, "context")
        if search is None or context is None:
            return None
        ordered = (
            reasoning.close_end <= search.open_start
            and search.close_end <= context.open_start
            and context.close_end <= conclusion.open_start
        )
        if not ordered:
            return None
        if not _is_blank(s[reasoning.close_end : search.open_start]):
            return None
        if not _is_blank(s[search.close_end : context.open_start]):
            return None
        if not _is_blank(s[context.close_end : conclusion.open_start]):
            return None
        query_text: str | None = _trim(s[search.open_end : search.close_start])
        context_text: str | None = _trim(s[context.open_end : context.close_start])
    else:
        if not _is_blank(s[reasoning.close_end : conclusion.open_start]):
            return None
        query_text = None
        context_text = None

    return _RawStep(
        reasoning=_trim(s[reasoning.open_end : reasoning.close_start]),
        query=query_text,
        context=context_text,
        conclusion=_trim(s[conclusion.open_end : conclusion.close_start]),
    )


def validate_step(body: str) -> bool:
    """Check one step body against the step grammar."""
    return _parse_step_body(body) is not None


def _analyze(text: str) -> _Analysis:
    """Run the full format check and extract contents in one pass."""

    def fail(reason: str) -> _Analysis:
        return _Analysis(ok=False, reason=reason, steps=(), answer="")

    y = normalize(text)
    if y.count(_THINK_OPEN) != 1 or y.count(_THINK_CLOSE) != 1:
        return fail("need exactly one think block")
    think = find_tag_span(y, "think")
    if think is None:
        return fail("think close tag precedes its open tag")
    if not _is_blank(y[: think.open_start]):
        return fail("text before the think block")

    if y.count(_ANSWER_OPEN) != 1 or y.count(_ANSWER_CLOSE) != 1:
        return fail("need exactly one answer block")
    tail = y[think.close_end :]
    if tail.count(_ANSWER_OPEN) != 1 or tail.count(_ANSWER_CLOSE) != 1:
        return fail("answer tag inside the think block")
    answer = find_tag_span(tail, "answer")
    if answer is None:
        return fail("answer close tag precedes its open tag")
    if not _is_blank(tail[: answer.open_start]):
        return fail("text between think block and answer")
    answer_text = tail[answer.open_end : answer.close_start]
    if not _trim(answer_text):
        return fail("empty answer")
    if not _is_blank(tail[answer.close_end :]):
        return fail("text after the answer block")
    if any(tok in answer_text for tok in RESERVED_TOKENS):
        return fail("reserved tag inside the answer")

    inner = y[think.open_end : think.close_start]
    steps: list[_RawStep] = []
    pos = 0
    while True:
        i = inner.find(_STEP_OPEN, pos)
        if i < 0:
            if not _is_blank(inner[pos:]):
                return fail("stray text inside the think block")
            break
        if not _is_blank(inner[pos:i]):
            return fail("stray text between steps")
        j = inner.find(_STEP_CLOSE, i + len(_STEP_OPEN))
        if j < 0:
            return fail("unclosed step")
        raw = _parse_step_body(inner[i + len(_STEP_OPEN) : j])
        if raw is None:
            return fail(f"invalid step body at step {len(steps) + 1}")
        steps.append(raw)
        pos = j + len(_STEP_CLOSE)
    if not steps:
        return fail("think block has no steps")

    return _Analysis(ok=True, reason=None, steps=tuple(steps), answer=_trim(answer_text))


def check_format(text: str) -> tuple[int, int]:
    """Binary format check: (1, step count) when well-formed, else (0, -1).

    All failure modes collapse to the same sentinel; use check_format_detail
    when the reason matters.
    """
    analysis = _analyze(text)
    if analysis.ok:
        return (1, len(analysis.steps))
    return (0, STEP_COUNT_SENTINEL)


def check_format_detail(text: str) -> FormatReport:
    """Format check that also reports why a malformed text was rejected."""
    analysis = _analyze(text)
    if analysis.ok:
        return FormatReport(format_ok=1, step_count=len(analysis.steps), reason=None)
    return FormatReport(format_ok=0, step_count=STEP_COUNT_SENTINEL, reason=analysis.reason)


def extract_answer(text: str) -> str:
    """Best-effort answer extraction: first answer span of the normalized text.

    Used for sentinel trajectories so exact-match scoring can still see
    whatever the model put between answer tags. Returns "" when there is no
    complete answer span.
    """
    span = find_tag_span(normalize(text), "answer")
    if span is None:
        return ""
    return _trim(normalize(text)[span.open_end : span.close_start])


def parse_trajectory(question: str, text: str) -> Trajectory:
    """Parse a transcript into a Trajectory, falling back to the sentinel.

    A malformed transcript yields format_ok 0, no steps, step_count -1, and a
    best-effort answer extraction; raw_text always preserves the input.
    """
    analysis = _analyze(text)
    if not analysis.ok:
        return Trajectory(
            question=_trim(question),
            raw_text=text,
            steps=(),
            answer=extract_answer(text),
            format_ok=0,
            step_count=STEP_COUNT_SENTINEL,
        )
    steps = tuple(
        Step(
            index=i,
            reasoning=raw.reasoning,
            query=raw.query,
            context=raw.context,
            conclusion=raw.conclusion,
            kind=StepKind.SEARCH if raw.query is not None else StepKind.NON_SEARCH,
        )
        for i, raw in enumerate(analysis.steps, start=1)
    )
    return Trajectory(
        question=_trim(question),
        raw_text=text,
        steps=steps,
        answer=analysis.answer,
        format_ok=1,
        step_count=len(steps),
    )
