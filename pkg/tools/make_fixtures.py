"""Materialize the frozen fixture set under fixtures/v1/.

The detection tables below are an oracle authored by hand: every verdict,
reason prefix, and count was tallied on paper before the detection code
existed, and this script transcribes those tables without touching the
package, so a bug in the implementation cannot leak into the expected
outputs. The rollout files are different: they are inputs, not expected
outputs, so they reuse the hand-typed case-study literals from
stepscore.fixtures instead of re-typing them. Rerunning the script must
be byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from stepscore.fixtures import (
    LACY_DALTON_DOC,
    SLOW_DOWN_EFFICIENT_DELTAS,
    SLOW_DOWN_GOLDEN_ANSWERS,
    SLOW_DOWN_QUESTION,
    build_mini_corpus,
)

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "v1"

SEARCH = "search"
PLAIN = "non_search"

TRUE_REPLY = "<answer>True</answer>"
FALSE_REPLY = "<answer>False</answer>"


def step(kind, reasoning, conclusion, *, query=None, context=None,
         policy_answer=None, judge=None, verdict=None, reason_prefix=None):
    return {
        "kind": kind,
        "reasoning": reasoning,
        "query": query,
        "context": context,
        "conclusion": conclusion,
        "policy_answer": policy_answer,
        "judge": judge,
        "verdict": verdict,
        "reason_prefix": reason_prefix,
    }


# Datasets alpha (d01-d12) and beta (d13-d20). Hand tally, frozen:
#   alpha: 12 records, 11 parsed, 7 correct, 9 search steps, 6 plain steps,
#          3 over-search, 3 under-search, 3 unjudged
#   beta:   8 records,  7 parsed, 4 correct, 5 search steps, 5 plain steps,
#          3 over-search, 2 under-search, 0 unjudged
DETECTION_RECORDS = [
    {
        "id": "d01",
        "dataset": "alpha",
        "question": "What is the capital of France?",
        "golden_answers": ["Paris"],
        "answer": "Paris.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "I should confirm the capital of France before answering.",
                 "The capital of France is Paris.",
                 query="capital of France",
                 context='Doc 1(Title: "France") Paris is the capital and largest city of France.',
                 policy_answer="Paris is the capital of France.",
                 judge=TRUE_REPLY,
                 verdict="over_search"),
        ],
    },
    {
        "id": "d02",
        "dataset": "alpha",
        "question": "What is the population of Reykjavik in 2024?",
        "golden_answers": ["140,000"],
        "answer": "About 140,000 people live there.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "Population figures change year to year, so I need current data.",
                 "Reykjavik had about 140,000 residents in 2024.",
                 query="population of Reykjavik 2024",
                 context='Doc 1(Title: "Reykjavik") The capital of Iceland had about 140,000 residents in 2024.',
                 policy_answer="I do not know the current population of Reykjavik.",
                 judge=FALSE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d03",
        "dataset": "alpha",
        "question": "What is 2 + 2?",
        "golden_answers": ["4"],
        "answer": "The sum is 4.",
        "cem": 1,
        "steps": [
            step(PLAIN,
                 "Two plus two equals four by basic arithmetic.",
                 "2 + 2 = 4.",
                 judge=TRUE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d04",
        "dataset": "alpha",
        "question": "What is the tallest mountain in the world?",
        "golden_answers": ["Mount Everest", "Everest"],
        "answer": "K2.",
        "cem": 0,
        "steps": [
            step(PLAIN,
                 "I recall K2 being the tallest mountain on Earth.",
                 "K2 is the tallest mountain in the world.",
                 judge=FALSE_REPLY,
                 verdict="under_search"),
        ],
    },
    {
        "id": "d05",
        "dataset": "alpha",
        "question": "What is the chemical symbol for gold and where does it come from?",
        "golden_answers": ["Au"],
        "answer": "Au, from the Latin aurum.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "I want to double-check the symbol for gold.",
                 "The chemical symbol for gold is Au.",
                 query="chemical symbol for gold",
                 context='Doc 1(Title: "Gold") Gold is a chemical element with symbol Au.',
                 policy_answer="The symbol for gold is Au.",
                 judge=TRUE_REPLY,
                 verdict="over_search"),
            step(PLAIN,
                 "The symbol Au comes from the Latin name for gold, aurum.",
                 "Au derives from the Latin word aurum.",
                 judge=TRUE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d06",
        "dataset": "alpha",
        "question": "In which years did the Berlin Wall fall and Germany reunify?",
        "golden_answers": ["1989 and 1990"],
        "answer": "Both happened in 1989.",
        "cem": 0,
        "steps": [
            step(SEARCH,
                 "I need the exact year the Berlin Wall fell.",
                 "The Berlin Wall fell in 1989.",
                 query="year Berlin Wall fell",
                 context='Doc 1(Title: "Berlin Wall") The Berlin Wall fell on 9 November 1989.',
                 policy_answer="I am not certain; it was sometime in the late 1980s.",
                 judge=FALSE_REPLY,
                 verdict="optimal"),
            step(PLAIN,
                 "Reunification followed immediately, in the same year the wall fell.",
                 "Germany reunified in 1989.",
                 judge=FALSE_REPLY,
                 verdict="under_search"),
        ],
    },
    {
        "id": "d07",
        "dataset": "alpha",
        "question": "Who wrote Don Quixote?",
        "golden_answers": ["Miguel de Cervantes", "Cervantes"],
        "answer": "Miguel de Cervantes wrote it.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "A quick check on the author of Don Quixote.",
                 "Don Quixote was written by Miguel de Cervantes.",
                 query="author of Don Quixote",
                 context='Doc 1(Title: "Don Quixote") The novel was written by Miguel de Cervantes.',
                 policy_answer="Miguel de Cervantes wrote Don Quixote.",
                 judge=["I think they match.", "They are equivalent statements."],
                 verdict="unjudged",
                 reason_prefix="unparseable verdict"),
        ],
    },
    {
        "id": "d08",
        "dataset": "alpha",
        "question": "What did the empty search find?",
        "golden_answers": ["nothing useful"],
        "answer": "The search found no results.",
        "cem": 0,
        "steps": [
            step(SEARCH,
                 "I will search even though I have no query in mind.",
                 "Nothing was found.",
                 query="",
                 context="No results.",
                 verdict="unjudged",
                 reason_prefix="empty query"),
        ],
    },
    {
        "id": "d09",
        "dataset": "alpha",
        "question": "What is the capital of Italy?",
        "golden_answers": ["Rome"],
        "cem": 1,
        "raw_text": ("<think><step><reasoning>Rome is the capital of Italy.</reasoning>"
                     "<conclusion>Rome.</conclusion></step><answer>Rome</answer>"),
        "steps": None,
    },
    {
        "id": "d10",
        "dataset": "alpha",
        "question": "At what temperature does tungsten melt?",
        "golden_answers": ["3422"],
        "answer": "It melts at a very high temperature.",
        "cem": 0,
        "steps": [
            step(SEARCH,
                 "Tungsten's melting point is a specific number I should verify.",
                 "Tungsten melts at 3422 degrees Celsius.",
                 query="melting point of tungsten",
                 context='Doc 1(Title: "Tungsten") Tungsten melts at 3422 degrees Celsius.',
                 verdict="unjudged",
                 reason_prefix="empty regenerated answer"),
        ],
    },
    {
        "id": "d11",
        "dataset": "alpha",
        "question": "What is the largest planet in the solar system?",
        "golden_answers": ["Jupiter"],
        "answer": "Jupiter.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "Check which planet is largest.",
                 "Jupiter is the largest planet in the solar system.",
                 query="largest planet in the solar system",
                 context='Doc 1(Title: "Jupiter") Jupiter is the largest planet in the Solar System.',
                 policy_answer="The largest planet is Jupiter.",
                 judge=TRUE_REPLY,
                 verdict="over_search"),
            step(SEARCH,
                 "I also want to know how many moons Mars has for context.",
                 "Mars has two moons, Phobos and Deimos.",
                 query="how many moons does Mars have",
                 context='Doc 1(Title: "Mars") Mars has two moons, Phobos and Deimos.',
                 policy_answer="I am not sure how many moons Mars has.",
                 judge=FALSE_REPLY,
                 verdict="optimal"),
            step(PLAIN,
                 "Jupiter being larger than every other planet answers the question directly.",
                 "Jupiter is the answer.",
                 judge=TRUE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d12",
        "dataset": "alpha",
        "question": "Can astronauts see the Great Wall of China from the Moon?",
        "golden_answers": ["No"],
        "answer": "Yes, they can see it clearly.",
        "cem": 0,
        "steps": [
            step(PLAIN,
                 "The Great Wall is famously visible from space, so from the Moon it must be visible too.",
                 "The Great Wall of China is visible from the Moon.",
                 judge=["Let me think about this one.", FALSE_REPLY],
                 verdict="under_search"),
        ],
    },
    {
        "id": "d13",
        "dataset": "beta",
        "question": "At what temperature does water boil at sea level?",
        "golden_answers": ["100 degrees Celsius", "100 C"],
        "answer": "Water boils at around 212 F at sea level.",
        "cem": 0,
        "steps": [
            step(SEARCH,
                 "Boiling point of water is worth confirming.",
                 "Water boils at 100 degrees Celsius at sea level.",
                 query="boiling point of water at sea level",
                 context='Doc 1(Title: "Water") Water boils at 100 degrees Celsius (212 Fahrenheit) at sea level.',
                 policy_answer="Water boils at 100 degrees Celsius at sea level, which is 212 Fahrenheit.",
                 judge=TRUE_REPLY,
                 verdict="over_search"),
        ],
    },
    {
        "id": "d14",
        "dataset": "beta",
        "question": "Who was the world chess champion in 2016?",
        "golden_answers": ["Magnus Carlsen", "Carlsen"],
        "answer": "Magnus Carlsen retained his title in 2016.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "Chess titles change hands, so I should look this up.",
                 "Magnus Carlsen was the world chess champion in 2016.",
                 query="world chess champion 2016",
                 context='Doc 1(Title: "World Chess Championship 2016") Magnus Carlsen defended his title against Sergey Karjakin in 2016.',
                 policy_answer="I cannot recall who held the chess title in 2016.",
                 judge=FALSE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d15",
        "dataset": "beta",
        "question": "How many days are in a week?",
        "golden_answers": ["seven", "7"],
        "answer": "There are seven days in a week.",
        "cem": 1,
        "steps": [
            step(PLAIN,
                 "A week has seven days by definition.",
                 "There are seven days in a week.",
                 judge=TRUE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d16",
        "dataset": "beta",
        "question": "Are sharks mammals?",
        "golden_answers": ["no, they are fish"],
        "answer": "Sharks are mammals.",
        "cem": 0,
        "steps": [
            step(PLAIN,
                 "Sharks give birth to live young, which makes them mammals.",
                 "Sharks are mammals.",
                 judge=FALSE_REPLY,
                 verdict="under_search"),
        ],
    },
    {
        "id": "d17",
        "dataset": "beta",
        "question": "What is the speed of light and how many continents are there?",
        "golden_answers": ["299,792,458"],
        "answer": "Light travels at about 300,000 km per second and there are seven continents.",
        "cem": 0,
        "steps": [
            step(SEARCH,
                 "The exact speed of light is a constant I can verify quickly.",
                 "The speed of light is 299,792,458 meters per second.",
                 query="speed of light in meters per second",
                 context='Doc 1(Title: "Speed of light") The speed of light is 299,792,458 meters per second.',
                 policy_answer="The speed of light is 299,792,458 meters per second.",
                 judge=TRUE_REPLY,
                 verdict="over_search"),
            step(SEARCH,
                 "I should also confirm the number of continents.",
                 "There are seven continents.",
                 query="how many continents are there",
                 context='Doc 1(Title: "Continent") The most common model lists seven continents.',
                 policy_answer="There are seven continents.",
                 judge=TRUE_REPLY,
                 verdict="over_search"),
        ],
    },
    {
        "id": "d18",
        "dataset": "beta",
        "question": "What is the chemical formula of water, and are whales fish?",
        "golden_answers": ["H2O"],
        "answer": "Water is H2O; whales, however, are mammals.",
        "cem": 1,
        "steps": [
            step(PLAIN,
                 "Water is two hydrogen atoms bonded to one oxygen atom.",
                 "The chemical formula of water is H2O.",
                 judge=TRUE_REPLY,
                 verdict="optimal"),
            step(PLAIN,
                 "Whales live in the ocean, so they are fish.",
                 "Whales are fish.",
                 judge=FALSE_REPLY,
                 verdict="under_search"),
        ],
    },
    {
        "id": "d19",
        "dataset": "beta",
        "question": "What is the currency of Japan?",
        "golden_answers": ["yen"],
        "answer": "The currency of Japan is the yen.",
        "cem": 1,
        "steps": [
            step(SEARCH,
                 "I am not fully sure about the currency, so I will check.",
                 "The currency of Japan is the yen.",
                 query="currency of Japan",
                 context='Doc 1(Title: "Japanese yen") The yen is the official currency of Japan.',
                 policy_answer="I believe it might be the yuan, but I am not sure.",
                 judge=FALSE_REPLY,
                 verdict="optimal"),
            step(PLAIN,
                 "With the currency confirmed as the yen, the answer is settled.",
                 "The yen is the answer.",
                 judge=TRUE_REPLY,
                 verdict="optimal"),
        ],
    },
    {
        "id": "d20",
        "dataset": "beta",
        "question": "What is the longest river in the world?",
        "golden_answers": ["Nile"],
        "cem": 0,
        "raw_text": ("<think><step><reasoning>The Nile is the longest river.</reasoning>"
                     "<conclusion>The Nile.</conclusion></step></think><answer>incomplete"),
        "steps": None,
    },
]

HAND_COUNTS = {
    "alpha": dict(total=12, parsed=11, correct=7, search=9, non_search=6,
                  over=3, under=3, unjudged=3),
    "beta": dict(total=8, parsed=7, correct=4, search=5, non_search=5,
                 over=3, under=2, unjudged=0),
}


def build_raw(steps, answer):
    parts = ["<think>"]
    for entry in steps:
        parts.append(f"\n<step><reasoning>{entry['reasoning']}</reasoning>")
        if entry["kind"] == SEARCH:
            parts.append(f"<search>{entry['query']}</search><context>{entry['context']}</context>")
        parts.append(f"<conclusion>{entry['conclusion']}</conclusion></step>")
    parts.append(f"\n</think>\n<answer>{answer}</answer>")
    return "".join(parts)


def cross_check():
    """Re-tally the record table and compare against the frozen hand counts."""
    for dataset, expected in HAND_COUNTS.items():
        rows = [r for r in DETECTION_RECORDS if r["dataset"] == dataset]
        tally = dict(total=len(rows), parsed=0, correct=0, search=0, non_search=0,
                     over=0, under=0, unjudged=0)
        for row in rows:
            tally["correct"] += row["cem"]
            if row["steps"] is None:
                continue
            tally["parsed"] += 1
            for entry in row["steps"]:
                tally["search" if entry["kind"] == SEARCH else "non_search"] += 1
                bucket = {"over_search": "over", "under_search": "under",
                          "unjudged": "unjudged", "optimal": "optimal"}[entry["verdict"]]
                tally[bucket] = tally.get(bucket, 0) + 1
        for key, value in expected.items():
            if tally[key] != value:
                raise AssertionError(f"{dataset}.{key}: table gives {tally[key]}, hand count {value}")


def rate(numerator, denominator):
    return float(Fraction(numerator, denominator)) if denominator else 0.0


def metrics_row(dataset, c):
    return {
        "dataset": dataset,
        "total_records": c["total"],
        "parsed_records": c["parsed"],
        "correct_records": c["correct"],
        "search_steps": c["search"],
        "non_search_steps": c["non_search"],
        "over_search_flags": c["over"],
        "under_search_flags": c["under"],
        "unjudged_steps": c["unjudged"],
        "cem_rate": rate(c["correct"], c["total"]),
        "over_search_rate": rate(c["over"], c["search"]),
        "under_search_rate": rate(c["under"], c["non_search"]),
    }


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def write_json(path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, indent=2)
        handle.write("\n")


def emit_detection():
    out = OUT / "detection"
    trajectories = []
    policy_rows = []
    over_rows = []
    under_rows = []
    label_rows = []
    for row in DETECTION_RECORDS:
        raw = row["raw_text"] if row["steps"] is None else build_raw(row["steps"], row["answer"])
        trajectories.append({
            "id": row["id"],
            "dataset": row["dataset"],
            "question": row["question"],
            "golden_answers": row["golden_answers"],
            "raw_text": raw,
        })
        labels = []
        for entry in row["steps"] or []:
            label = {"verdict": entry["verdict"]}
            if entry["reason_prefix"] is not None:
                label["reason_prefix"] = entry["reason_prefix"]
            labels.append(label)
            if entry["policy_answer"] is not None:
                policy_rows.append({"query": entry["query"], "answer": entry["policy_answer"]})
            if entry["judge"] is None:
                continue
            if entry["kind"] == SEARCH:
                message = (f"Statement 1: {entry['conclusion']}\n"
                           f"Statement 2: {entry['policy_answer']}")
                bucket = over_rows
            else:
                message = (f"<reasoning>{entry['reasoning']}</reasoning>\n"
                           f"<conclusion>{entry['conclusion']}</conclusion>")
                bucket = under_rows
            reply = entry["judge"]
            bucket.append({"user_message": message,
                           "replies" if isinstance(reply, list) else "reply": reply})
        label_rows.append({"id": row["id"], "labels": labels})

    for name, rows, key in (("policy", policy_rows, "query"),
                            ("over judge", over_rows, "user_message"),
                            ("under judge", under_rows, "user_message")):
        keys = [r[key] for r in rows]
        if len(keys) != len(set(keys)):
            raise AssertionError(f"duplicate {key} in {name} script")

    write_jsonl(out / "trajectories.jsonl", trajectories)
    write_jsonl(out / "policy_script.jsonl", policy_rows)
    write_jsonl(out / "over_judge_script.jsonl", over_rows)
    write_jsonl(out / "under_judge_script.jsonl", under_rows)
    write_jsonl(out / "expected_labels.jsonl", label_rows)

    groups = [metrics_row(name, HAND_COUNTS[name]) for name in sorted(HAND_COUNTS)]
    overall_counts = {key: sum(c[key] for c in HAND_COUNTS.values())
                      for key in HAND_COUNTS["alpha"]}
    write_json(out / "expected_metrics.json", {
        "groups": groups,
        "overall": metrics_row("overall", overall_counts),
        "macro_cem_rate": sum(g["cem_rate"] for g in groups) / len(groups),
        "macro_over_search_rate": sum(g["over_search_rate"] for g in groups) / len(groups),
        "macro_under_search_rate": sum(g["under_search_rate"] for g in groups) / len(groups),
    })
    write_json(out / "detect_config.json", {
        "policy": {"type": "scripted", "script_path": "policy_script.jsonl"},
        "over_search_judge": {"type": "scripted", "script_path": "over_judge_script.jsonl"},
        "under_search_verifier": {"type": "scripted", "script_path": "under_judge_script.jsonl"},
        "concurrency": {"workers": 1, "max_in_flight": 4, "max_retries": 1},
    })


def emit_rollout():
    out = OUT / "rollout"
    write_jsonl(OUT / "corpus_mini.jsonl", [doc.to_dict() for doc in build_mini_corpus()])
    write_jsonl(OUT / "slow_down_corpus.jsonl", [LACY_DALTON_DOC.to_dict()])
    write_jsonl(out / "questions.jsonl", [{
        "id": "slow1",
        "dataset": "case_study",
        "question": SLOW_DOWN_QUESTION,
        "golden_answers": list(SLOW_DOWN_GOLDEN_ANSWERS),
    }])
    write_jsonl(out / "generator_script.jsonl",
                [{"id": "slow1", "deltas": list(SLOW_DOWN_EFFICIENT_DELTAS)}])
    write_json(out / "rollout_config.json", {
        "mode": "deterministic",
        "corpus_path": "../slow_down_corpus.jsonl",
        "rollout": {"step_budget": 2, "top_k": 1},
        "generator": {"type": "scripted", "script_path": "generator_script.jsonl"},
    })


def main():
    cross_check()
    emit_detection()
    emit_rollout()
    print(f"fixtures written under {OUT}")


if __name__ == "__main__":
    main()
