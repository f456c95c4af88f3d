/**
 * Containment exact match and the hierarchical reward over trajectory records.
 *
 * Record objects follow the JSONL wire schema of the stepscore Python package
 * (snake_case keys), so parsed CLI output can be scored here directly. All
 * arithmetic replays the Python formula in the same operation order, which
 * makes totals bit-identical across the two implementations.
 */

import { analyzeTrajectory, extractAnswer } from "./grammar.js";

export type Verdict = "optimal" | "over_search" | "under_search" | "unjudged";

/** Judged verdict of one step, as serialized by the detect command. */
export interface StepLabelData {
  verdict: Verdict;
  reason?: string;
  judge_raw?: string;
}

/** One evaluation record in the JSONL wire schema; extra keys are ignored. */
export interface EvalRecordData {
  id: string;
  dataset?: string;
  question?: string;
  golden_answers: readonly string[];
  raw_text: string;
  labels?: readonly StepLabelData[];
}

/** All inputs and the total of one trajectory score (wire schema keys). */
export interface RewardBreakdown {
  answer_correct: number;
  format_ok: number;
  step_count: number;
  optimal_steps: number;
  bonus_fraction: number;
  total: number;
}

/** Reward weights; defaults match the Python package. */
export interface RewardOptions {
  /** Weight of the format term. Must lie in [0, 1]. Default: 0.2. */
  lambdaF?: number;
  /** Weight of the gated step bonus. Must be >= 0. Default: 0.4. */
  lambdaP?: number;
}

export type BatchEntry =
  | { id: string; reward: RewardBreakdown }
  | { id: string; error: string };

const DEFAULT_LAMBDA_F = 0.2;
const DEFAULT_LAMBDA_P = 0.4;

function resolveOptions(options?: RewardOptions): { lambdaF: number; lambdaP: number } {
  const lambdaF = options?.lambdaF ?? DEFAULT_LAMBDA_F;
  const lambdaP = options?.lambdaP ?? DEFAULT_LAMBDA_P;
  if (!(lambdaF >= 0 && lambdaF <= 1)) {
    throw new Error(`lambda_f must be in [0, 1], got ${lambdaF}`);
  }
  if (!(lambdaP >= 0)) {
    throw new Error(`lambda_p must be >= 0, got ${lambdaP}`);
  }
  return { lambdaF, lambdaP };
}

function normalizeAnswer(text: string): string {
  return text
    .toLowerCase()
    .split(/\s+/)
    .filter((part) => part.length > 0)
    .join(" ");
}

/**
 * Containment exact match: 1 iff any golden answer is a substring.
 *
 * Both sides are lowercased with whitespace runs collapsed before the
 * substring test. A golden that normalizes to the empty string never matches.
 */
export function cem(generated: string, goldenAnswers: readonly string[]): number {
  if (goldenAnswers.length === 0) {
    throw new Error("cem needs at least one golden answer");
  }
  const haystack = normalizeAnswer(generated);
  for (const golden of goldenAnswers) {
    const needle = normalizeAnswer(golden);
    if (needle.length > 0 && haystack.includes(needle)) {
      return 1;
    }
  }
  return 0;
}

/** Number of steps judged optimal; unjudged steps never count. */
export function countOptimal(labels: readonly StepLabelData[]): number {
  return labels.filter((label) => label.verdict === "optimal").length;
}

/**
 * Combine outcome, format, and per-step quality into one scalar.
 *
 * total = answer_correct * (1 - lambda_f)
 *       + lambda_f * format_ok
 *       + lambda_p * answer_correct * format_ok * (optimal_steps / step_count)
 *
 * The bonus fraction is defined as 0.0 when step_count is 0, so malformed
 * trajectories never earn a bonus. With lambda_p = 0 the total degenerates
 * to the outcome-plus-format baseline.
 */
export function hierarchicalReward(
  answerCorrect: number,
  formatOk: number,
  stepCount: number,
  optimalSteps: number,
  options?: RewardOptions,
): RewardBreakdown {
  const { lambdaF, lambdaP } = resolveOptions(options);
  if (answerCorrect !== 0 && answerCorrect !== 1) {
    throw new Error(`answer_correct must be 0 or 1, got ${answerCorrect}`);
  }
  if (formatOk !== 0 && formatOk !== 1) {
    throw new Error(`format_ok must be 0 or 1, got ${formatOk}`);
  }
  if (!(Number.isInteger(stepCount) && stepCount >= 0)) {
    throw new Error(`step_count must be >= 0, got ${stepCount}`);
  }
  if (!(Number.isInteger(optimalSteps) && optimalSteps >= 0 && optimalSteps <= stepCount)) {
    throw new Error(`optimal_steps must be in [0, step_count], got ${optimalSteps} of ${stepCount}`);
  }
  const bonusFraction = stepCount > 0 ? optimalSteps / stepCount : 0.0;
  const total =
    answerCorrect * (1.0 - lambdaF) +
    lambdaF * formatOk +
    lambdaP * answerCorrect * formatOk * bonusFraction;
  return {
    answer_correct: answerCorrect,
    format_ok: formatOk,
    step_count: stepCount,
    optimal_steps: optimalSteps,
    bonus_fraction: bonusFraction,
    total,
  };
}

/**
 * Score one record end to end.
 *
 * Malformed trajectories score with format_ok 0 and zero steps, so only the
 * outcome term can contribute. Parsed trajectories must carry labels when
 * the step bonus is active (lambda_p > 0); with the bonus disabled, missing
 * labels are tolerated and count as zero optimal steps.
 */
export function scoreTrajectory(record: EvalRecordData, options?: RewardOptions): RewardBreakdown {
  const { lambdaP } = resolveOptions(options);
  const analysis = analyzeTrajectory(record.raw_text);
  const formatOk = analysis.ok ? 1 : 0;
  const stepCount = analysis.ok ? analysis.stepCount : 0;
  const answer = analysis.ok ? analysis.answer : extractAnswer(record.raw_text);
  const answerCorrect = cem(answer, record.golden_answers);
  if (formatOk === 1 && record.labels == null && lambdaP > 0) {
    throw new Error(`record '${record.id}' is parsed but has no step labels`);
  }
  const optimalSteps =
    formatOk === 1 && record.labels != null ? countOptimal(record.labels) : 0;
  return hierarchicalReward(answerCorrect, formatOk, stepCount, optimalSteps, options);
}

/**
 * Score a batch in input order; a record that cannot be scored yields an
 * error entry in its slot instead of failing the whole batch.
 */
export function scoreBatch(
  records: readonly EvalRecordData[],
  options?: RewardOptions,
): BatchEntry[] {
  return records.map((record) => {
    try {
      return { id: record.id, reward: scoreTrajectory(record, options) };
    } catch (error) {
      return { id: record.id, error: error instanceof Error ? error.message : String(error) };
    }
  });
}
