/**
 * Strict tag grammar for step-structured trajectories.
 *
 * A well-formed trajectory is one <think> block holding one or more <step>
 * blocks, followed by exactly one non-empty <answer> block and nothing else.
 * Each step is <reasoning>, then optionally <search> plus <context>, then
 * <conclusion>, with only whitespace between blocks and no reserved tags
 * inside contents. This mirrors the grammar module of the stepscore Python
 * package token for token; the parity tests hold the two implementations to
 * identical outputs on the shared fixture set.
 */

/** Tag names with reserved meaning; their tokens may not appear in content. */
export const RESERVED_TAGS = [
  "think",
  "step",
  "reasoning",
  "search",
  "context",
  "conclusion",
  "answer",
] as const;

export const RESERVED_TOKENS: readonly string[] = RESERVED_TAGS.flatMap((name) => [
  `<${name}>`,
  `</${name}>`,
]);

/** Characters treated as whitespace between blocks (after newline normalization). */
export const WHITESPACE = " \t\n";

/** step_count value reported for trajectories that fail the format check. */
export const STEP_COUNT_SENTINEL = -1;

const THINK_OPEN = "<think>";
const THINK_CLOSE = "</think>";
const STEP_OPEN = "<step>";
const STEP_CLOSE = "</step>";
const ANSWER_OPEN = "<answer>";
const ANSWER_CLOSE = "</answer>";

const STEP_LEVEL_FORBIDDEN = [
  THINK_OPEN,
  THINK_CLOSE,
  STEP_OPEN,
  STEP_CLOSE,
  ANSWER_OPEN,
  ANSWER_CLOSE,
];
const SEARCH_TOKENS = ["<search>", "</search>", "<context>", "</context>"];

/** Normalize line endings: CRLF and lone CR both become LF. Idempotent. */
export function normalize(text: string): string {
  return text.replace(/\r\n/g, "\n").replace(/\r/g, "\n");
}

function trimBlockWhitespace(text: string): string {
  let start = 0;
  let end = text.length;
  while (start < end && WHITESPACE.includes(text[start])) {
    start += 1;
  }
  while (end > start && WHITESPACE.includes(text[end - 1])) {
    end -= 1;
  }
  return text.slice(start, end);
}

function isBlank(text: string): boolean {
  return trimBlockWhitespace(text).length === 0;
}

function countOccurrences(text: string, token: string): number {
  let count = 0;
  let position = text.indexOf(token);
  while (position >= 0) {
    count += 1;
    position = text.indexOf(token, position + token.length);
  }
  return count;
}

/** Offsets of one tag pair; text.slice(openEnd, closeStart) is the content. */
export interface TagSpan {
  tag: string;
  openStart: number;
  openEnd: number;
  closeStart: number;
  closeEnd: number;
}

/**
 * Locate the first <tag>...</tag> pair at or after start.
 *
 * Returns null when the open tag is missing or no close tag follows it.
 */
export function findTagSpan(text: string, tag: string, start = 0): TagSpan | null {
  const openToken = `<${tag}>`;
  const closeToken = `</${tag}>`;
  const openStart = text.indexOf(openToken, start);
  if (openStart < 0) {
    return null;
  }
  const closeStart = text.indexOf(closeToken, openStart + openToken.length);
  if (closeStart < 0) {
    return null;
  }
  return {
    tag,
    openStart,
    openEnd: openStart + openToken.length,
    closeStart,
    closeEnd: closeStart + closeToken.length,
  };
}

/** Outcome of the format check with a human-readable failure reason. */
export interface FormatReport {
  formatOk: number;
  stepCount: number;
  reason: string | null;
}

interface Analysis {
  ok: boolean;
  reason: string | null;
  stepCount: number;
  answer: string;
}

/**
 * Validate one step body (everything between <step> and </step>).
 *
 * Layout must be reasoning, then search plus context for a search step, then
 * conclusion, with nothing but whitespace between the blocks and after the
 * conclusion.
 */
export function validateStep(body: string): boolean {
  const s = trimBlockWhitespace(body);
  for (const token of STEP_LEVEL_FORBIDDEN) {
    if (s.includes(token)) {
      return false;
    }
  }
  if (countOccurrences(s, "<reasoning>") !== 1 || countOccurrences(s, "</reasoning>") !== 1) {
    return false;
  }
  const reasoning = findTagSpan(s, "reasoning");
  if (reasoning === null || !isBlank(s.slice(0, reasoning.openStart))) {
    return false;
  }
  if (countOccurrences(s, "<conclusion>") !== 1 || countOccurrences(s, "</conclusion>") !== 1) {
    return false;
  }
  const conclusion = findTagSpan(s, "conclusion");
  if (conclusion === null || conclusion.openStart < reasoning.closeEnd) {
    return false;
  }
  if (!isBlank(s.slice(conclusion.closeEnd))) {
    return false;
  }

  if (SEARCH_TOKENS.some((token) => s.includes(token))) {
    if (countOccurrences(s, "<search>") !== 1 || countOccurrences(s, "</search>") !== 1) {
      return false;
    }
    if (countOccurrences(s, "<context>") !== 1 || countOccurrences(s, "</context>") !== 1) {
      return false;
    }
    const search = findTagSpan(s, "search");
    const context = findTagSpan(s, "context");
    if (search === null || context === null) {
      return false;
    }
    const ordered =
      reasoning.closeEnd <= search.openStart &&
      search.closeEnd <= context.openStart &&
      context.closeEnd <= conclusion.openStart;
    if (!ordered) {
      return false;
    }
    if (!isBlank(s.slice(reasoning.closeEnd, search.openStart))) {
      return false;
    }
    if (!isBlank(s.slice(search.closeEnd, context.openStart))) {
      return false;
    }
    if (!isBlank(s.slice(context.closeEnd, conclusion.openStart))) {
      return false;
    }
  } else if (!isBlank(s.slice(reasoning.closeEnd, conclusion.openStart))) {
    return false;
  }
  return true;
}

function analyze(text: string): Analysis {
  const fail = (reason: string): Analysis => ({ ok: false, reason, stepCount: 0, answer: "" });

  const y = normalize(text);
  if (countOccurrences(y, THINK_OPEN) !== 1 || countOccurrences(y, THINK_CLOSE) !== 1) {
    return fail("need exactly one think block");
  }
  const think = findTagSpan(y, "think");
  if (think === null) {
    return fail("think close tag precedes its open tag");
  }
  if (!isBlank(y.slice(0, think.openStart))) {
    return fail("text before the think block");
  }

  if (countOccurrences(y, ANSWER_OPEN) !== 1 || countOccurrences(y, ANSWER_CLOSE) !== 1) {
    return fail("need exactly one answer block");
  }
  const tail = y.slice(think.closeEnd);
  if (countOccurrences(tail, ANSWER_OPEN) !== 1 || countOccurrences(tail, ANSWER_CLOSE) !== 1) {
    return fail("answer tag inside the think block");
  }
  const answer = findTagSpan(tail, "answer");
  if (answer === null) {
    return fail("answer close tag precedes its open tag");
  }
  if (!isBlank(tail.slice(0, answer.openStart))) {
    return fail("text between think block and answer");
  }
  const answerText = tail.slice(answer.openEnd, answer.closeStart);
  if (trimBlockWhitespace(answerText).length === 0) {
    return fail("empty answer");
  }
  if (!isBlank(tail.slice(answer.closeEnd))) {
    return fail("text after the answer block");
  }
  if (RESERVED_TOKENS.some((token) => answerText.includes(token))) {
    return fail("reserved tag inside the answer");
  }

  const inner = y.slice(think.openEnd, think.closeStart);
  let stepCount = 0;
  let position = 0;
  for (;;) {
    const open = inner.indexOf(STEP_OPEN, position);
    if (open < 0) {
      if (!isBlank(inner.slice(position))) {
        return fail("stray text inside the think block");
      }
      break;
    }
    if (!isBlank(inner.slice(position, open))) {
      return fail("stray text between steps");
    }
    const close = inner.indexOf(STEP_CLOSE, open + STEP_OPEN.length);
    if (close < 0) {
      return fail("unclosed step");
    }
    if (!validateStep(inner.slice(open + STEP_OPEN.length, close))) {
      return fail(`invalid step body at step ${stepCount + 1}`);
    }
    stepCount += 1;
    position = close + STEP_CLOSE.length;
  }
  if (stepCount === 0) {
    return fail("think block has no steps");
  }

  return { ok: true, reason: null, stepCount, answer: trimBlockWhitespace(answerText) };
}

/**
 * Binary format check: [1, step count] when well-formed, else [0, -1].
 *
 * All failure modes collapse to the same sentinel; use checkFormatDetail
 * when the reason matters.
 */
export function checkFormat(text: string): [number, number] {
  const analysis = analyze(text);
  return analysis.ok ? [1, analysis.stepCount] : [0, STEP_COUNT_SENTINEL];
}

/** Format check that also reports why a malformed text was rejected. */
export function checkFormatDetail(text: string): FormatReport {
  const analysis = analyze(text);
  if (analysis.ok) {
    return { formatOk: 1, stepCount: analysis.stepCount, reason: null };
  }
  return { formatOk: 0, stepCount: STEP_COUNT_SENTINEL, reason: analysis.reason };
}

/**
 * Best-effort answer extraction: first answer span of the normalized text.
 *
 * Used for malformed trajectories so exact-match scoring can still see
 * whatever the model put between answer tags. Returns "" when there is no
 * complete answer span.
 */
export function extractAnswer(text: string): string {
  const normalized = normalize(text);
  const span = findTagSpan(normalized, "answer");
  if (span === null) {
    return "";
  }
  return trimBlockWhitespace(normalized.slice(span.openEnd, span.closeStart));
}

export { analyze as analyzeTrajectory };
