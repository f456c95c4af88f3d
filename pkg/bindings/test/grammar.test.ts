import { describe, expect, it } from "vitest";

import {
  checkFormat,
  checkFormatDetail,
  extractAnswer,
  findTagSpan,
  normalize,
  validateStep,
} from "../src/index.js";

const MINIMAL =
  "<think><step><reasoning>r</reasoning><conclusion>c</conclusion></step></think>" +
  "<answer>a</answer>";

const SEARCH_STEP =
  "<think><step><reasoning>r</reasoning><search>q</search><context>ctx</context>" +
  "<conclusion>c</conclusion></step></think><answer>a</answer>";

describe("checkFormat", () => {
  it("accepts a minimal plain-step trajectory", () => {
    expect(checkFormat(MINIMAL)).toEqual([1, 1]);
  });

  it("accepts a search step and counts steps", () => {
    expect(checkFormat(SEARCH_STEP)).toEqual([1, 1]);
    const two =
      "<think>\n<step>\n<reasoning>r</reasoning>\n<conclusion>c</conclusion>\n</step>\n" +
      "<step><reasoning>r2</reasoning><conclusion>c2</conclusion></step>\n</think>\n" +
      "<answer>a</answer>\n";
    expect(checkFormat(two)).toEqual([1, 2]);
  });

  it("normalizes CRLF and lone CR line endings", () => {
    const crlf = MINIMAL.replace("<think>", "<think>\r\n").replace("</step>", "</step>\r");
    expect(checkFormat(crlf)).toEqual([1, 1]);
    expect(normalize("a\r\nb\rc")).toBe("a\nb\nc");
  });

  it("allows only space, tab, and newline between blocks", () => {
    const tabbed = MINIMAL.replace("</think>", "\t</think>");
    expect(checkFormat(tabbed)).toEqual([1, 1]);
    const nbsp = MINIMAL.replace("</think>", " </think>");
    expect(checkFormat(nbsp)).toEqual([0, -1]);
  });

  it("rejects structural violations with the matching reason", () => {
    const cases: Array<[string, string]> = [
      ["", "need exactly one think block"],
      ["<think></think>", "need exactly one answer block"],
      ["<think></think><answer>a</answer>", "think block has no steps"],
      [`x${MINIMAL}`, "text before the think block"],
      [`${MINIMAL}x`, "text after the answer block"],
      [MINIMAL.replace("<answer>a</answer>", "<answer> \t\n</answer>"), "empty answer"],
      [MINIMAL.replace("<answer>a</answer>", "<answer>a<step></answer>"),
        "reserved tag inside the answer"],
      ["<think><step><reasoning>r</reasoning><conclusion>c</conclusion></step>" +
        "<answer>a</answer></think>", "answer tag inside the think block"],
      [MINIMAL.replace("</step>", "</step>oops"), "stray text inside the think block"],
      [MINIMAL.replace("<step>", "<step><search>q</search>"), "invalid step body at step 1"],
    ];
    for (const [text, reason] of cases) {
      const report = checkFormatDetail(text);
      expect(report.formatOk, text).toBe(0);
      expect(report.stepCount, text).toBe(-1);
      expect(report.reason, text).toBe(reason);
    }
  });
});

describe("validateStep", () => {
  it("requires reasoning then conclusion", () => {
    expect(validateStep("<reasoning>r</reasoning><conclusion>c</conclusion>")).toBe(true);
    expect(validateStep("<conclusion>c</conclusion><reasoning>r</reasoning>")).toBe(false);
    expect(validateStep("<reasoning>r</reasoning>")).toBe(false);
  });

  it("requires search and context to travel together, in order", () => {
    expect(validateStep(
      "<reasoning>r</reasoning><search>q</search><context>x</context><conclusion>c</conclusion>",
    )).toBe(true);
    expect(validateStep(
      "<reasoning>r</reasoning><search>q</search><conclusion>c</conclusion>",
    )).toBe(false);
    expect(validateStep(
      "<reasoning>r</reasoning><context>x</context><search>q</search><conclusion>c</conclusion>",
    )).toBe(false);
  });

  it("rejects stray text between blocks", () => {
    expect(validateStep("<reasoning>r</reasoning>hm<conclusion>c</conclusion>")).toBe(false);
  });
});

describe("extractAnswer", () => {
  it("pulls the first complete answer span from malformed text", () => {
    expect(extractAnswer("<think><answer> Rome </answer>")).toBe("Rome");
    expect(extractAnswer("no tags at all")).toBe("");
    expect(extractAnswer("<answer>unclosed")).toBe("");
  });
});

describe("findTagSpan", () => {
  it("slices content exactly", () => {
    const span = findTagSpan(SEARCH_STEP, "search");
    expect(span).not.toBeNull();
    expect(SEARCH_STEP.slice(span!.openEnd, span!.closeStart)).toBe("q");
    expect(findTagSpan(SEARCH_STEP, "search", span!.closeEnd)).toBeNull();
  });
});
