"""Command-line interface over the validation, rollout, and scoring pipeline.

Commands read and write JSONL; outputs preserve input order and contain no
timestamps, so reruns over the same inputs are byte-identical. Exit codes:
0 success, 1 validation failure under --strict, 2 config error, 3 I/O or
data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .config import (
    RunConfig,
    apply_overrides,
    build_answer_backend,
    build_chat_backend,
    load_run_config,
)
from .detection import label_trajectory
from .errors import ConfigError, StepscoreError
from .fixtures import ScriptedGenerator, load_generator_script
from .grammar import check_format_detail
from .metrics import aggregate_report
from .records import iter_jsonl, read_records, record_to_dict, write_jsonl
from .retriever import CorpusRetriever, index_corpus, load_corpus
from .reward import score_trajectory
from .rollout import run_inference

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _emit(rows: list[dict], output: Path | None) -> None:
    if output is None:
        for row in rows:
            print(json.dumps(row, ensure_ascii=False))
    else:
        write_jsonl(output, rows)


def cmd_validate(args: argparse.Namespace, config: RunConfig) -> int:
    """Format-check raw_text per record; never stops at a bad line."""
    rows = []
    any_failure = False
    with open(args.input, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                if not isinstance(data, dict):
                    raise ValueError("expected a JSON object")
            except ValueError as exc:
                rows.append({"id": f"line-{line_number}", "error": f"line {line_number}: {exc}"})
                any_failure = True
                continue
            record_id = str(data.get("id", f"line-{line_number}"))
            raw_text = data.get("raw_text")
            if not isinstance(raw_text, str):
                rows.append({"id": record_id, "error": f"line {line_number}: missing raw_text"})
                any_failure = True
                continue
            report = check_format_detail(raw_text)
            row: dict = {
                "id": record_id,
                "format_ok": report.format_ok,
                "step_count": report.step_count,
            }
            if report.reason is not None:
                row["reason"] = report.reason
            rows.append(row)
            if report.format_ok == 0:
                any_failure = True
    _emit(rows, args.output)
    return EXIT_VALIDATION if args.strict and any_failure else EXIT_OK


def cmd_rollout(args: argparse.Namespace, config: RunConfig) -> int:
    """Replay scripted generations against the configured corpus."""
    if config.generator is None or config.generator.get("type") != "scripted":
        raise ConfigError("rollout needs a generator section of type 'scripted'")
    if "script_path" not in config.generator:
        raise ConfigError("generator: scripted backend needs script_path")
    if config.corpus_path is None:
        raise ConfigError("rollout needs corpus_path")
    scripts = load_generator_script(config.resolve(config.generator["script_path"]))
    index = index_corpus(load_corpus(config.resolve(config.corpus_path)), config.retriever)
    passages = CorpusRetriever(index)

    rows = []
    for line_number, data in iter_jsonl(args.input):
        record_id = str(data.get("id", f"line-{line_number}"))
        if "question" not in data:
            raise ValueError(f"{args.input}:{line_number}: record missing question")
        question = data["question"]
        deltas = scripts.get(record_id)
        if deltas is None:
            rows.append({"id": record_id, "error": "no generator script for this id"})
            continue
        result = run_inference(
            question, ScriptedGenerator(deltas), passages, config.rollout, mode=config.mode
        )
        trajectory = result.trajectory
        row: dict = {"id": record_id, "dataset": data.get("dataset", "default"), "question": question}
        if "golden_answers" in data:
            row["golden_answers"] = data["golden_answers"]
        row["raw_text"] = trajectory.raw_text
        row["format_ok"] = trajectory.format_ok
        row["step_count"] = trajectory.step_count
        if trajectory.format_ok == 1:
            row["steps"] = [step.to_dict() for step in trajectory.steps]
        if result.diagnostic is not None:
            row["diagnostic"] = result.diagnostic
        rows.append(row)
    _emit(rows, args.output)
    return EXIT_OK


def cmd_detect(args: argparse.Namespace, config: RunConfig) -> int:
    """Label every step of every parsed record; sentinels pass through."""
    records = read_records(args.input)
    judge = build_chat_backend(config.over_search_judge, config, "over_search_judge")
    verifier = build_chat_backend(config.under_search_verifier, config, "under_search_verifier")
    policy = build_answer_backend(config.policy, config)
    if config.reward.over_search_enabled and (judge is None or policy is None):
        raise ConfigError(
            "detect needs over_search_judge and policy sections, or --under-search-only"
        )
    if config.reward.under_search_enabled and verifier is None:
        raise ConfigError("detect needs an under_search_verifier section, or --over-search-only")

    def process(record):
        if record.trajectory.format_ok != 1:
            return record, ()
        labels = label_trajectory(
            record.trajectory,
            policy,
            judge,
            verifier,
            config.reward,
            max_in_flight=config.max_in_flight,
            max_retries=config.max_retries,
        )
        return record, labels

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(process, records))
    rows = []
    for record, labels in results:
        labeled = replace(record, labels=tuple(labels))
        row = record_to_dict(labeled)
        if record.trajectory.format_ok != 1:
            row["note"] = "format check failed; steps unlabeled"
        rows.append(row)
    _emit(rows, args.output)
    return EXIT_OK


def cmd_score(args: argparse.Namespace, config: RunConfig) -> int:
    """Attach a reward breakdown to every record."""
    records = read_records(args.input)
    golden_overrides: dict[str, tuple[str, ...]] = {}
    if args.goldens is not None:
        for line_number, data in iter_jsonl(args.goldens):
            if "id" not in data or "golden_answers" not in data:
                raise ValueError(f"{args.goldens}:{line_number}: need id and golden_answers")
            golden_overrides[str(data["id"])] = tuple(data["golden_answers"])
    rows = []
    for record in records:
        if record.id in golden_overrides:
            record = replace(record, golden_answers=golden_overrides[record.id])
        breakdown = score_trajectory(record, config.reward)
        rows.append(record_to_dict(replace(record, reward=breakdown)))
    _emit(rows, args.output)
    return EXIT_OK


def cmd_report(args: argparse.Namespace, config: RunConfig) -> int:
    """Aggregate labeled records into per-dataset and pooled metrics."""
    records = read_records(args.input)
    report = aggregate_report(records)
    if args.output is not None:
        payload = {"config": config.echo(), "report": report.to_dict()}
        with open(args.output, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, ensure_ascii=False, indent=2)
            handle.write("\n")
    print(report.render_table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run config")
    common.add_argument("--input", type=Path, required=True, help="input JSONL")
    common.add_argument("--output", type=Path, help="output path (default: stdout)")
    common.add_argument("--strict", action="store_true", help="exit 1 on any validation failure")
    common.add_argument("--seed", type=int, help="override config seed")
    common.add_argument("--over-search-only", action="store_true", dest="over_search_only",
                        help="disable under-search detection")
    common.add_argument("--under-search-only", action="store_true", dest="under_search_only",
                        help="disable over-search detection")
    common.add_argument("--lambda-f", type=float, dest="lambda_f", help="format reward weight")
    common.add_argument("--lambda-p", type=float, dest="lambda_p", help="step bonus weight")
    common.add_argument("--top-k", type=int, dest="top_k", help="passages per search")
    common.add_argument("--budget", type=int, help="rollout step budget")
    common.add_argument("--max-in-flight", type=int, dest="max_in_flight",
                        help="concurrent judge calls per record")

    parser = argparse.ArgumentParser(
        prog="stepscore",
        description="Validate, roll out, label, score, and report step-structured trajectories.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    commands = (
        ("validate", cmd_validate, "format-check raw trajectories"),
        ("rollout", cmd_rollout, "run scripted rollouts against a corpus"),
        ("detect", cmd_detect, "label steps with search-efficiency verdicts"),
        ("score", cmd_score, "attach reward breakdowns"),
        ("report", cmd_report, "aggregate metrics across records"),
    )
    for name, func, help_text in commands:
        subparser = subparsers.add_parser(name, parents=[common], help=help_text)
        subparser.set_defaults(func=func)
        if name == "score":
            subparser.add_argument("--goldens", type=Path,
                                   help="JSONL of id and golden_answers overrides")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config) if args.config else RunConfig()
        config = apply_overrides(
            config,
            seed=args.seed,
            lambda_f=args.lambda_f,
            lambda_p=args.lambda_p,
            top_k=args.top_k,
            budget=args.budget,
            max_in_flight=args.max_in_flight,
            over_search_only=args.over_search_only,
            under_search_only=args.under_search_only,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, StepscoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
