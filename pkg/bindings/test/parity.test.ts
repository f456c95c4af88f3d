/**
 * Cross-implementation parity: every result must agree bit for bit with the
 * committed outputs of the Python CLI over the shared fixture set. The files
 * under fixtures/v1/expected were produced by the validate, rollout, detect,
 * and score subcommands; regenerate them with the CLI if the fixtures change.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  bound_check_format,
  bound_score_batch,
  checkFormat,
  checkFormatDetail,
  scoreBatch,
  scoreTrajectory,
} from "../src/index.js";
import type { EvalRecordData, RewardBreakdown } from "../src/index.js";

function fixturePath(relative: string): string {
  return fileURLToPath(new URL(`../../fixtures/v1/${relative}`, import.meta.url));
}

function readJsonl(relative: string): any[] {
  return readFileSync(fixturePath(relative), "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line));
}

const RAW_TEXTS = new Map<string, string>(
  [...readJsonl("detection/trajectories.jsonl"), ...readJsonl("expected/rollout.jsonl")].map(
    (row) => [row.id as string, row.raw_text as string],
  ),
);

describe("format-check parity", () => {
  it("reproduces every validate row, including failure reasons", () => {
    const rows = readJsonl("expected/validate.jsonl");
    expect(rows.length).toBe(21);
    for (const row of rows) {
      const raw = RAW_TEXTS.get(row.id);
      expect(raw, row.id).toBeDefined();
      const report = checkFormatDetail(raw!);
      expect(report.formatOk, row.id).toBe(row.format_ok);
      expect(report.stepCount, row.id).toBe(row.step_count);
      expect(report.reason ?? undefined, row.id).toBe(row.reason);
    }
  });
});

describe("scoring parity", () => {
  const scored = readJsonl("expected/scored.jsonl");

  it("covers the full labeled fixture set", () => {
    expect(scored.length).toBe(20);
  });

  it("reproduces every reward breakdown bit for bit", () => {
    for (const row of scored) {
      const reward = scoreTrajectory(row as EvalRecordData);
      expect(reward, row.id).toEqual(row.reward as RewardBreakdown);
      expect(reward.total, row.id).toBe(row.reward.total);
      expect(reward.bonus_fraction, row.id).toBe(row.reward.bonus_fraction);
    }
  });

  it("reproduces the batch in input order", () => {
    const entries = scoreBatch(scored as EvalRecordData[]);
    expect(entries.map((entry) => entry.id)).toEqual(scored.map((row) => row.id));
    entries.forEach((entry, position) => {
      expect("reward" in entry, entry.id).toBe(true);
      if ("reward" in entry) {
        expect(entry.reward).toEqual(scored[position].reward);
      }
    });
  });

  it("agrees with the labeled records before scoring as well", () => {
    const labeled = readJsonl("expected/labeled.jsonl");
    const entries = scoreBatch(labeled as EvalRecordData[]);
    entries.forEach((entry, position) => {
      if ("reward" in entry) {
        expect(entry.reward).toEqual(scored[position].reward);
      } else {
        throw new Error(`record ${entry.id} failed to score: ${entry.error}`);
      }
    });
  });
});

describe("trainer entry points", () => {
  it("exposes the batch boundary under its bound_ names", () => {
    expect(bound_check_format).toBe(checkFormat);
    expect(bound_score_batch).toBe(scoreBatch);
    expect(bound_check_format("x")).toEqual([0, -1]);
    expect(bound_score_batch([])).toEqual([]);
  });
});
