"""Walk through the trajectory format check: what passes, what fails, and why.

A trajectory is one <think> block holding one or more <step> blocks, followed
by exactly one non-empty <answer>. Every step opens with <reasoning> and ends
with <conclusion>; a step that searched carries a <search> and <context> pair
in between. Nothing but whitespace may sit between structural tags, and the
reserved tags may not appear inside contents. The checker returns (1, N) with
the step count on success and (0, -1) on any violation.
"""

from __future__ import annotations

from stepscore.fixtures import Mutation, generate_valid_trajectory, mutate_trajectory
from stepscore.grammar import check_format, check_format_detail

WELL_FORMED = """<think>
<step>
<reasoning>The question asks for a capital city, which I already know.</reasoning>
<conclusion>No retrieval is needed for this step.</conclusion>
</step>
<step>
<reasoning>To be safe, I verify the population figure.</reasoning>
<search>population of Reykjavik</search>
<context>Doc 1(Title: "Reykjavik") Around 140,000 people live in the city.</context>
<conclusion>The population is about 140,000.</conclusion>
</step>
</think>
<answer>Reykjavik, with about 140,000 inhabitants.</answer>"""

NEAR_MISSES = (
    ("answer before the think block closes",
     "<think><step><reasoning>r</reasoning><conclusion>c</conclusion></step>"
     "<answer>a</answer></think>"),
    ("search without its context",
     "<think><step><reasoning>r</reasoning><search>q</search>"
     "<conclusion>c</conclusion></step></think><answer>a</answer>"),
    ("stray prose between steps",
     "<think><step><reasoning>r</reasoning><conclusion>c</conclusion></step>"
     "and then I thought some more"
     "<step><reasoning>r</reasoning><conclusion>c</conclusion></step></think>"
     "<answer>a</answer>"),
    ("empty answer",
     "<think><step><reasoning>r</reasoning><conclusion>c</conclusion></step></think>"
     "<answer>   </answer>"),
)


def main() -> None:
    ok, steps = check_format(WELL_FORMED)
    print(f"well-formed trajectory: format_ok={ok}, steps={steps}")
    print()

    print("near misses:")
    for title, text in NEAR_MISSES:
        report = check_format_detail(text)
        print(f"  {title}: format_ok={report.format_ok} ({report.reason})")
    print()

    print("single-fault mutations of generated trajectories:")
    for mutation in Mutation:
        rejected = 0
        for seed in range(200):
            mutant = mutate_trajectory(generate_valid_trajectory(seed), mutation, seed)
            rejected += check_format(mutant) == (0, -1)
        print(f"  {mutation.value}: {rejected}/200 rejected")


if __name__ == "__main__":
    main()
