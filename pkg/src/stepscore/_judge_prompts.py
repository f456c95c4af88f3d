"""Fixed prompt strings for the step judges and the structured-output format.

These strings are part of the package contract: the scripted judge fixtures
key on the exact rendered user messages, so any edit here invalidates them.
"""

EQUIVALENCE_JUDGE_SYSTEM = (
    "You are an expert in Natural Language Understanding and Semantic Analysis. "
    "Your goal is to determine if these two statements are semantically equivalent—that is, "
    "if they mean the same thing and convey the same core information. "
    'Provide your answers with a single boolean value "True" or "False" in the tag '
    "<answer></answer> (e.g. <answer>True</answer> or <answer>False</answer>)."
)

STEP_VERIFIER_SYSTEM = (
    "You are an expert Fact-Checker and Logic Verifier. "
    "Your task is to evaluate a single, isolated reasoning step from an AI agent.\n"
    "\n"
    "This step was generated without using a search tool. "
    "Your goal is to determine if the agent made a mistake by not searching, "
    "based only on the information within this single step and your own general knowledge.\n"
    "\n"
    "Analyze the provided step by asking two questions:\n"
    "1. Factual Accuracy: Is the statement in the <reasoning></reasoning> and "
    "<conclusion></conclusion> factually correct?\n"
    "2. Internal Logic: Does the <conclusion></conclusion> logically follow from the "
    "<reasoning></reasoning> provided within this same step?\n"
    "\n"
    'If both questions are answered correctly, provide your answers with a single boolean value "True" '
    'or "False" in the tag <answer></answer> (e.g. <answer>True</answer> or <answer>False</answer>).'
)

STRUCTURED_OUTPUT_SYSTEM = (
    "Answer user questions by thinking step-by-step. "
    "Your entire reasoning process must be encapsulated within a single <think></think> block, "
    "which contains one or more <step></step> blocks. "
    "Each step must begin with your analysis in <reasoning>. "
    "If you identify a knowledge gap, you may use <search>query</search> to query a search engine; "
    "search results will then be provided in a <context> tag. "
    "Every step must end with a <conclusion> summarizing what you learned in that step. "
    "After your thinking process is complete, provide the final, conclusive answer inside an "
    "<answer> tag placed immediately after the closing </think> tag. "
    "You can use as many steps as you need. "
    "Ensure all XML tags are properly formed and nested.\n"
    "\n"
    "**## Output Format Specification**\n"
    "\n"
    "Your output must follow this overall structure. The <think> block contains all the steps, "
    "and the <answer> block follows it.\n"
    "\n"
    "<think>\n"
    "<step>\n"
    "  ...\n"
    "</step>\n"
    "<step>\n"
    "  ...\n"
    "</step>\n"
    "</think>\n"
    "<answer>Your final, conclusive answer to the user's question.</answer>\n"
    "\n"
    "**## Step Formats (to be used inside <think>)**\n"
    "\n"
    "Format 1: Step with a Search\n"
    "\n"
    "<step>\n"
    "  <reasoning>Your detailed analysis...</reasoning>\n"
    "  <search>The precise search query...</search>\n"
    "  <context>[Provided by system]</context>\n"
    "  <conclusion>Your conclusion for this step.</conclusion>\n"
    "</step>\n"
    "\n"
    "Format 2: Step without a Search (Internal Reasoning)\n"
    "\n"
    "<step>\n"
    "  <reasoning>Your detailed analysis...</reasoning>\n"
    "  <conclusion>Your conclusion for this step.</conclusion>\n"
    "</step>"
)


def render_equivalence_user(statement_1: str, statement_2: str) -> str:
    """User message pairing a step conclusion with a standalone answer."""
    return f"Statement 1: {statement_1}\nStatement 2: {statement_2}"


def render_verification_user(reasoning: str, conclusion: str) -> str:
    """User message wrapping one non-search step for the fact checker."""
    return f"<reasoning>{reasoning}</reasoning>\n<conclusion>{conclusion}</conclusion>"
