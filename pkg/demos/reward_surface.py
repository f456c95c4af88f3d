"""Map out the hierarchical reward and the gate that guards its step bonus.

The total is answer_correct * (1 - lambda_f) + lambda_f * format_ok, plus a
bonus of lambda_p scaled by the fraction of optimal steps. The bonus only
flows when both the answer and the format are right, so step-level polish can
never compensate for a wrong answer or broken structure.
"""

from __future__ import annotations

from stepscore.model import RewardConfig
from stepscore.reward import hierarchical_reward


def main() -> None:
    print("reference corners (lambda_f=0.2, lambda_p=0.4):")
    corners = (
        ("correct, well-formed, every step optimal", 1, 1, 4, 4),
        ("correct, well-formed, no step optimal", 1, 1, 4, 0),
        ("correct but malformed", 1, 0, 0, 0),
        ("wrong but well-formed", 0, 1, 4, 4),
    )
    for title, a, f, n, n_corr in corners:
        total = hierarchical_reward(a, f, n, n_corr).total
        print(f"  {title}: {total}")
    print()

    print("bonus ramp for a correct, well-formed eight-step trajectory:")
    for optimal in range(0, 9, 2):
        breakdown = hierarchical_reward(1, 1, 8, optimal)
        print(f"  {optimal}/8 optimal -> bonus_fraction={breakdown.bonus_fraction:.2f}, "
              f"total={breakdown.total:.2f}")
    print()

    print("the same ramp with the gate shut (wrong answer):")
    for optimal in range(0, 9, 2):
        total = hierarchical_reward(0, 1, 8, optimal).total
        print(f"  {optimal}/8 optimal -> total={total:.2f}")
    print()

    print("lambda_p=0 reduces to the outcome-plus-format baseline:")
    flat = RewardConfig(lambda_p=0.0)
    for a, f in ((1, 1), (1, 0), (0, 1), (0, 0)):
        total = hierarchical_reward(a, f, 8, 8, flat).total
        print(f"  answer={a}, format={f} -> total={total:.2f}")


if __name__ == "__main__":
    main()
