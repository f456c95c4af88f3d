/**
 * Format checking and hierarchical reward for step-structured trajectories,
 * mirroring the stepscore Python package for use inside training loops.
 *
 * The snake_case aliases carry the names the functions have on the Python
 * side, for callers porting code across the boundary.
 */

export {
  RESERVED_TAGS,
  RESERVED_TOKENS,
  STEP_COUNT_SENTINEL,
  WHITESPACE,
  checkFormat,
  checkFormatDetail,
  extractAnswer,
  findTagSpan,
  normalize,
  validateStep,
} from "./grammar.js";
export type { FormatReport, TagSpan } from "./grammar.js";

export {
  cem,
  countOptimal,
  hierarchicalReward,
  scoreBatch,
  scoreTrajectory,
} from "./reward.js";
export type {
  BatchEntry,
  EvalRecordData,
  RewardBreakdown,
  RewardOptions,
  StepLabelData,
  Verdict,
} from "./reward.js";

export { checkFormat as check_format } from "./grammar.js";
export {
  countOptimal as count_optimal,
  hierarchicalReward as hierarchical_reward,
  scoreBatch as score_batch,
  scoreTrajectory as score_trajectory,
} from "./reward.js";

// Boundary names for trainer integrations: the bound_ prefix marks the two
// entry points a host training loop is expected to call per rollout batch.
export { checkFormat as bound_check_format } from "./grammar.js";
export { scoreBatch as bound_score_batch } from "./reward.js";
