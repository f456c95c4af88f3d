"""Reference trajectories, corpus builders, scripted backends, and mutators.

The case-study constants are known-good (and known-bad) transcripts used
throughout the tests and demos. The generator and mutator provide unbounded
supplies of well-formed trajectories and of minimally broken variants, one
breakage class at a time. Scripted backends replay canned answers so the
detection and rollout pipelines run deterministically with no network.
"""

from __future__ import annotations

import json
import random
import threading
from collections.abc import Mapping, Sequence
from enum import Enum
from pathlib import Path

from .errors import NoMutationSite
from .grammar import RESERVED_TAGS, RESERVED_TOKENS, find_tag_span
from .retriever import Document

# --- Case study: multi-part question answered in four steps ---

CEO_STOCK_QUESTION = (
    "Who is the current CEO of the company that makes the graphics cards used in the "
    "latest PlayStation, and what was their stock price at the close of the last trading day?"
)

CEO_STOCK_GOLDEN_ANSWERS = ("Lisa Su",)

CEO_STOCK_RAW = """<think>
<step>
<reasoning>
This is a multi-part question. First, I need to identify the latest PlayStation console. Then, I need to find out which company makes its graphics cards. I suspect it's either Sony itself, NVIDIA, or AMD, but I need to be certain. I will start by identifying the latest PlayStation model.
</reasoning>
<search>
latest playstation console model
</search>
<context>
The latest PlayStation console is the PlayStation 5 (PS5).
</context>
<conclusion>
PlayStation 5 (PS5)
</conclusion>
</step>
<step>
<reasoning>
Now that I know the console is the PS5, I need to find the manufacturer of its graphics processing unit (GPU).
</reasoning>
<conclusion>
AMD
</conclusion>
</step>
<step>
<reasoning>
I have identified the company as AMD. Now I need to find its current CEO.
</reasoning>
<search>
current CEO of AMD
</search>
<context>
The current President and CEO of AMD is Dr. Lisa Su.
</context>
<conclusion>
Dr. Lisa Su
</conclusion>
</step>
<step>
<reasoning>
I have the company (AMD) and the CEO (Lisa Su). Now I need to find the stock price. Today is Saturday, July 19, 2025, so I need the closing price from Friday, July 18, 2025.
</reasoning>
<search>
AMD stock price closing July 18 2025
</search>
<context>
AMD (Advanced Micro Devices, Inc.) closed at $175.40 on Friday, July 18, 2025.
</context>
<conclusion>
$175.40
</conclusion>
</step>
</think>
<answer>
Dr. Lisa Su and $175.40.
</answer>"""

# --- Case study: the same question answered inefficiently and efficiently ---

SLOW_DOWN_QUESTION = (
    "What is the place of birth of the performer of song Slow Down (Lacy J. Dalton Song)?"
)

SLOW_DOWN_GOLDEN_ANSWERS = (
    "Bloomsburg, Pennsylvania",
    "The Only Town in Pennsylvania",
    "Bloomsburg",
)

SLOW_DOWN_BASELINE_RAW = """<think>
<step>
<reasoning>I don't have direct information about the performer of the song 'Slow Down' and their place of birth.</reasoning>
<search>What is the performer of the song 'Slow Down'?</search>
<context>... [Returns Doc 1: Bobby Valentino, Doc 2: Douwe Bob, Doc 3: Selena Gomez] ...</context>
<conclusion>Based on the search results, 'Slow Down' is a song by three different performers: Bobby Valentino, Douwe Bob, and Selena Gomez. I don't have information about the place of birth of the performer of this song.</conclusion>
</step>
<step>
<reasoning>Since I don't have information about the performer's place of birth, I will first need to determine who the performer of the song 'Slow Down' is.</reasoning>
<search>Who is the performer of the song 'Slow Down'?</search>
<context>... [Returns Doc 1: Bobby Valentino, Doc 2: Douwe Bob, Doc 3: Selena Gomez] ...</context>
<conclusion>Based on the search results, the performer of the song 'Slow Down' can be either Bobby Valentino, Douwe Bob, or Selena Gomez.</conclusion>
</step>
<step>
<reasoning>Now that I know the performers, I will need to find out the place of birth of each of them...</reasoning>
<search>What is the place of birth of Bobby Valentino?</search>
<context>... [Returns birthplace: Chatham, Kent] ...</context>
<conclusion>Based on the search results, Bobby Valentino was born in Chatham, Kent.</conclusion>
</step>
<step>
<reasoning>Now that I have the place of birth of Bobby Valentino, I will need to find out the place of birth of Douwe Bob.</reasoning>
<search>What is the place of birth of Douwe Bob?</search>
<context>[Returns birthplace: Amsterdam, Netherlands]</context>
<conclusion>Based on the search results, Douwe Bob was born in Amsterdam, Netherlands.</conclusion>
</step>
<step>
<reasoning>Finally, I will need to find out the place of birth of Selena Gomez.</reasoning>
<search>What is the place of birth of Selena Gomez?</search>
<context>[Returns birthplace: Grand Prairie, Texas]</context>
<conclusion>Based on the search results, Selena Gomez was born in Grand Prairie, Texas.</conclusion>
</step>
</think>
<answer>Based on the information gathered, the performer of the song 'Slow Down' can be either Bobby Valentino, Douwe Bob, or Selena Gomez. Bobby Valentino was born in Chatham, Kent. Douwe Bob was born in Amsterdam, Netherlands. Selena Gomez was born in Grand Prairie, Texas.</answer>"""

#: Generator emissions that, replayed through the rollout driver with a
#: step budget of 2 against the single-document corpus below, reproduce
#: SLOW_DOWN_EFFICIENT_RAW byte for byte.
SLOW_DOWN_EFFICIENT_DELTAS = (
    "What do I need to know to answer this question? First, I need to find this performer of "
    "Slow Down. Then I need to find out the place of birth of the performer.</reasoning>\n"
    "<conclusion>According to the question, the performer of the song Slow Down "
    "(Lacy J. Dalton Song) is Lacy J. Dalton...</conclusion>",
    "Now that I have the answer to the first part, I need to find the place of birth of the "
    "performer. Where can I find this information? I will need to search for it.</reasoning>\n"
    "<search>Place of birth of Lacy J. Dalton</search>",
    "According to the context, the place of birth of Lacy J. Dalton is Bloomsburg, "
    "Pennsylvania.</conclusion>",
    "According to the information found, the place of birth of the performer of the song "
    "Slow Down (Lacy J. Dalton Song) is Bloomsburg, Pennsylvania. Lacy J. Dalton was born on "
    "October 13, 1946, in Bloomsburg, Pennsylvania.</answer>",
)

SLOW_DOWN_EFFICIENT_RAW = (
    "<think><step><reasoning>What do I need to know to answer this question? First, I need to "
    "find this performer of Slow Down. Then I need to find out the place of birth of the "
    "performer.</reasoning>\n"
    "<conclusion>According to the question, the performer of the song Slow Down "
    "(Lacy J. Dalton Song) is Lacy J. Dalton...</conclusion></step><step><reasoning>Now that "
    "I have the answer to the first part, I need to find the place of birth of the performer. "
    "Where can I find this information? I will need to search for it.</reasoning>\n"
    "<search>Place of birth of Lacy J. Dalton</search><context>Doc 1(Title: \"Lacy J. Dalton\") "
    "Lacy J. Dalton (born Jill Lynne Byrem; October 13, 1946, Bloomsburg, Pennsylvania) is an "
    "American country singer...</context><conclusion>According to the context, the place of "
    "birth of Lacy J. Dalton is Bloomsburg, Pennsylvania.</conclusion></step></think>"
    "<answer>According to the information found, the place of birth of the performer of the "
    "song Slow Down (Lacy J. Dalton Song) is Bloomsburg, Pennsylvania. Lacy J. Dalton was born "
    "on October 13, 1946, in Bloomsburg, Pennsylvania.</answer>"
)

LACY_DALTON_DOC = Document(
    id="lacy-j-dalton",
    title="Lacy J. Dalton",
    body=(
        "Lacy J. Dalton (born Jill Lynne Byrem; October 13, 1946, Bloomsburg, Pennsylvania) "
        "is an American country singer..."
    ),
)


def slow_down_corpus() -> list[Document]:
    """The one-document corpus behind the efficient case-study rollout."""
    return [LACY_DALTON_DOC]


def build_mini_corpus() -> list[Document]:
    """A small, self-consistent corpus covering both case studies."""
    return [
        LACY_DALTON_DOC,
        Document(
            id="slow-down-bobby-valentino",
            title="Slow Down (Bobby Valentino song)",
            body=(
                "Slow Down is a song by singer Bobby Valentino, released in 2005 as the lead "
                "single from his self-titled debut album."
            ),
        ),
        Document(
            id="bobby-valentino",
            title="Bobby Valentino",
            body=(
                "Bobby Valentino is a British musician born in Chatham, Kent, known for his "
                "violin and session work."
            ),
        ),
        Document(
            id="douwe-bob",
            title="Douwe Bob",
            body=(
                "Douwe Bob Posthuma is a Dutch singer-songwriter born in Amsterdam, "
                "Netherlands. He released the single Slow Down in 2016."
            ),
        ),
        Document(
            id="selena-gomez",
            title="Selena Gomez",
            body=(
                "Selena Gomez is an American singer and actress born in Grand Prairie, Texas. "
                "Her song Slow Down appeared on the album Stars Dance."
            ),
        ),
        Document(
            id="playstation-5",
            title="PlayStation 5",
            body=(
                "The PlayStation 5 (PS5) is a home video game console developed by Sony "
                "Interactive Entertainment, released in November 2020, with a custom GPU based "
                "on AMD RDNA 2 architecture."
            ),
        ),
        Document(
            id="lisa-su",
            title="Lisa Su",
            body=(
                "Dr. Lisa Su is the chair, president and chief executive officer of Advanced "
                "Micro Devices (AMD), a role she has held since 2014."
            ),
        ),
        Document(
            id="amd",
            title="AMD",
            body=(
                "Advanced Micro Devices, Inc. (AMD) is an American semiconductor company that "
                "designs processors and graphics technologies, including the custom GPU of the "
                "PlayStation 5."
            ),
        ),
    ]


# --- Random well-formed trajectories ---

_VOCAB = (
    "granite", "harbor", "meadow", "copper", "lantern", "orchard", "ribbon", "saddle",
    "timber", "velvet", "walnut", "anchor", "basket", "cedar", "dune", "ember",
)

_GAPS = ("", " ", "  ", "\t", "\n", "\n  ", " \n\t", "\r\n")


def _words(rng: random.Random, allow_empty: bool = True) -> str:
    if allow_empty and rng.random() < 0.1:
        return ""
    count = rng.randint(1, 8)
    separator = "\n" if rng.random() < 0.1 else " "
    return separator.join(rng.choice(_VOCAB) for _ in range(count))


def generate_valid_trajectory(seed: int, max_steps: int = 5) -> str:
    """A random trajectory that passes the format check by construction.

    Step count, search/non-search mix, inter-tag whitespace (including CRLF
    runs collapsed by normalization), and contents (occasionally empty) all
    vary with the seed. Contents never contain reserved tags, so the parsed
    step count always equals the number of step tokens in the text.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    rng = random.Random(seed)
    gap = lambda: rng.choice(_GAPS)
    parts = [gap(), "<think>"]
    for _ in range(rng.randint(1, max_steps)):
        parts += [gap(), "<step>", gap(), "<reasoning>", _words(rng), "</reasoning>", gap()]
        if rng.random() < 0.5:
            parts += ["<search>", _words(rng), "</search>", gap()]
            parts += ["<context>", _words(rng), "</context>", gap()]
        parts += ["<conclusion>", _words(rng), "</conclusion>", gap(), "</step>"]
    parts += [gap(), "</think>", gap()]
    parts += ["<answer>", _words(rng, allow_empty=False), "</answer>", gap()]
    return "".join(parts)


# --- Single-fault mutations ---


class Mutation(str, Enum):
    """One minimal way to break a well-formed trajectory."""

    DROP_TAG = "drop_tag"
    DUPLICATE_TAG = "duplicate_tag"
    SWAP_TAGS = "swap_tags"
    INJECT_TEXT = "inject_text"


def _token_occurrences(text: str) -> list[tuple[int, str]]:
    sites = []
    for token in RESERVED_TOKENS:
        start = 0
        while True:
            position = text.find(token, start)
            if position < 0:
                break
            sites.append((position, token))
            start = position + 1
    sites.sort()
    return sites


def _pair_sites(text: str) -> list[tuple[int, str]]:
    """(insertion offset, tag name) for every complete tag pair."""
    sites = []
    for tag in RESERVED_TAGS:
        start = 0
        while True:
            span = find_tag_span(text, tag, start)
            if span is None:
                break
            sites.append((span.close_end, tag))
            start = span.open_end
    sites.sort()
    return sites


_SWAP_CANDIDATES = (
    ("reasoning", "search"),
    ("search", "context"),
    ("context", "conclusion"),
    ("reasoning", "conclusion"),
    ("think", "answer"),
)


def _adjacent_pair_sites(text: str) -> list[tuple[int, int, int, int]]:
    """Offsets of two whole tag pairs separated only by whitespace."""
    sites = []
    for first_tag, second_tag in _SWAP_CANDIDATES:
        start = 0
        while True:
            first = find_tag_span(text, first_tag, start)
            if first is None:
                break
            second = find_tag_span(text, second_tag, first.close_end)
            if second is not None and not text[first.close_end : second.open_start].strip():
                sites.append((first.open_start, first.close_end, second.open_start, second.close_end))
            start = first.open_end
    sites.sort()
    return sites


def _injection_sites(text: str) -> list[int]:
    """Structural whitespace positions where non-whitespace text breaks the format.

    Every gap between adjacent reserved tokens qualifies except the contents
    of a single pair (an open token followed by its own close token), plus
    the blank regions before the first and after the last token.
    """
    tokens = _token_occurrences(text)
    if not tokens:
        return []
    sites = []
    first_position = tokens[0][0]
    if not text[:first_position].strip():
        sites.append(0)
    for (position, token), (next_position, next_token) in zip(tokens, tokens[1:]):
        end = position + len(token)
        if text[end:next_position].strip():
            continue
        if not token.startswith("</") and next_token == "</" + token[1:]:
            continue
        sites.append(end)
    last_position, last_token = tokens[-1]
    if not text[last_position + len(last_token) :].strip():
        sites.append(last_position + len(last_token))
    return sites


def mutate_trajectory(text: str, mutation: Mutation, seed: int) -> str:
    """Apply one structural fault; the result always fails the format check.

    The seed picks among candidate sites. Raises NoMutationSite when the text
    offers nowhere to apply the requested class (never the case for outputs
    of generate_valid_trajectory).
    """
    rng = random.Random(seed)
    if mutation is Mutation.DROP_TAG:
        sites = _token_occurrences(text)
        if not sites:
            raise NoMutationSite("no reserved tag tokens to drop")
        position, token = sites[rng.randrange(len(sites))]
        return text[:position] + text[position + len(token) :]
    if mutation is Mutation.DUPLICATE_TAG:
        sites = _pair_sites(text)
        if not sites:
            raise NoMutationSite("no complete tag pair to duplicate")
        position, tag = sites[rng.randrange(len(sites))]
        return text[:position] + f"<{tag}></{tag}>" + text[position:]
    if mutation is Mutation.SWAP_TAGS:
        sites = _adjacent_pair_sites(text)
        if not sites:
            raise NoMutationSite("no adjacent tag pairs to swap")
        a_start, a_end, b_start, b_end = sites[rng.randrange(len(sites))]
        return (
            text[:a_start]
            + text[b_start:b_end]
            + text[a_end:b_start]
            + text[a_start:a_end]
            + text[b_end:]
        )
    if mutation is Mutation.INJECT_TEXT:
        sites = _injection_sites(text)
        if not sites:
            raise NoMutationSite("no structural whitespace to pollute")
        position = sites[rng.randrange(len(sites))]
        return text[:position] + "stray" + text[position:]
    raise ValueError(f"unknown mutation {mutation!r}")


# --- Scripted backends ---


class ScriptedGenerator:
    """Replays a fixed list of emissions; empty output once exhausted.

    One instance is one generation session, so use a fresh instance per
    rollout. Running dry returns "", which the driver reports as a stall.
    """

    def __init__(self, deltas: Sequence[str]) -> None:
        self._deltas = list(deltas)
        self._cursor = 0

    def generate(self, transcript: str, stop_markers: Sequence[str], mode: str) -> str:
        if self._cursor >= len(self._deltas):
            return ""
        delta = self._deltas[self._cursor]
        self._cursor += 1
        return delta


class ScriptedPolicy:
    """Standalone answers from a fixed query-to-answer mapping."""

    def __init__(self, answers: Mapping[str, str], *, strict: bool = True, default: str = "") -> None:
        self._answers = dict(answers)
        self._strict = strict
        self._default = default

    def answer_standalone(self, query: str) -> str:
        if query in self._answers:
            return self._answers[query]
        if self._strict:
            raise KeyError(f"no scripted answer for query {query!r}")
        return self._default


class ScriptedJudge:
    """Judge replies keyed on the exact rendered user message.

    A value may be a list of replies consumed call by call (the last entry
    repeats), which makes retry behavior scriptable. Safe to share across
    threads.
    """

    def __init__(
        self,
        replies: Mapping[str, str | Sequence[str]],
        *,
        strict: bool = True,
        default: str = "",
    ) -> None:
        self._replies = dict(replies)
        self._strict = strict
        self._default = default
        self._cursors: dict[str, int] = {}
        self._lock = threading.Lock()

    def complete(self, system_prompt: str, user_message: str) -> str:
        if user_message not in self._replies:
            if self._strict:
                raise KeyError(f"no scripted reply for message {user_message!r}")
            return self._default
        value = self._replies[user_message]
        if isinstance(value, str):
            return value
        with self._lock:
            cursor = self._cursors.get(user_message, 0)
            self._cursors[user_message] = cursor + 1
        return value[min(cursor, len(value) - 1)]


def load_policy_script(path: str | Path, *, strict: bool = True) -> ScriptedPolicy:
    """Read a JSONL policy script with query and answer fields per line."""
    answers: dict[str, str] = {}
    for record in _read_jsonl(path):
        answers[record["query"]] = record["answer"]
    return ScriptedPolicy(answers, strict=strict)


def load_judge_script(path: str | Path, *, strict: bool = True) -> ScriptedJudge:
    """Read a JSONL judge script keyed by user_message, with reply or replies."""
    replies: dict[str, str | list[str]] = {}
    for record in _read_jsonl(path):
        replies[record["user_message"]] = record.get("replies", record.get("reply", ""))
    return ScriptedJudge(replies, strict=strict)


def load_generator_script(path: str | Path) -> dict[str, list[str]]:
    """Read a JSONL generator script mapping record id to emission list."""
    scripts: dict[str, list[str]] = {}
    for record in _read_jsonl(path):
        scripts[record["id"]] = list(record["deltas"])
    return scripts


def _read_jsonl(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records
