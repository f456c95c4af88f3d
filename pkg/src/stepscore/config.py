"""Run configuration for the command-line interface.

Config files are JSON. Credentials never appear in them: backend entries
name an environment variable (api_key_env) and the key is read at request
time. Relative paths inside a config resolve against the config file's own
directory, so fixture bundles stay relocatable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .detection import (
    AnswerBackend,
    ChatBackend,
    HttpAnswerBackend,
    HttpChatBackend,
    JudgeEndpointConfig,
)
from .errors import ConfigError
from .fixtures import load_judge_script, load_policy_script
from .model import RewardConfig
from .retriever import Bm25Params
from .rollout import GENERATION_MODES, RolloutConfig

_TOP_LEVEL_KEYS = {
    "seed",
    "mode",
    "reward",
    "rollout",
    "retriever",
    "corpus_path",
    "concurrency",
    "over_search_judge",
    "under_search_verifier",
    "policy",
    "generator",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run needs beyond its input and output paths."""

    seed: int = 0
    mode: str = "deterministic"
    reward: RewardConfig = field(default_factory=RewardConfig)
    rollout: RolloutConfig = field(default_factory=RolloutConfig)
    retriever: Bm25Params = field(default_factory=Bm25Params)
    corpus_path: str | None = None
    workers: int = 1
    max_in_flight: int = 4
    max_retries: int = 1
    over_search_judge: dict | None = None
    under_search_verifier: dict | None = None
    policy: dict | None = None
    generator: dict | None = None
    base_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self) -> None:
        if self.mode not in GENERATION_MODES:
            raise ConfigError(f"mode must be one of {GENERATION_MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ConfigError(f"concurrency.workers must be >= 1, got {self.workers}")
        if self.max_in_flight < 1:
            raise ConfigError(f"concurrency.max_in_flight must be >= 1, got {self.max_in_flight}")
        if self.max_retries < 0:
            raise ConfigError(f"concurrency.max_retries must be >= 0, got {self.max_retries}")

    def resolve(self, path_value: str) -> Path:
        path = Path(path_value)
        return path if path.is_absolute() else self.base_dir / path

    def echo(self) -> dict:
        """Config summary for report outputs; never includes credentials."""
        summary = {
            "seed": self.seed,
            "mode": self.mode,
            "reward": self.reward.to_dict(),
            "rollout": {
                "step_budget": self.rollout.step_budget,
                "top_k": self.rollout.top_k,
                "max_gen_chars": self.rollout.max_gen_chars,
            },
            "retriever": {"k1": self.retriever.k1, "b": self.retriever.b},
            "concurrency": {
                "workers": self.workers,
                "max_in_flight": self.max_in_flight,
                "max_retries": self.max_retries,
            },
            "over_search_judge_model": _model_of(self.over_search_judge),
            "under_search_verifier_model": _model_of(self.under_search_verifier),
            "policy_model": _model_of(self.policy),
        }
        digest = hashlib.sha256(json.dumps(summary, sort_keys=True).encode("utf-8")).hexdigest()
        summary["config_hash"] = digest
        return summary


def _model_of(spec: dict | None) -> str | None:
    if spec is None:
        return None
    if spec.get("type") == "scripted":
        return "scripted"
    return spec.get("model_name")


def _build_section(data: dict, key: str, builder, default):
    section = data.get(key)
    if section is None:
        return default
    if not isinstance(section, dict):
        raise ConfigError(f"config section {key!r} must be an object")
    try:
        return builder(section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config section {key!r}: {exc}") from exc


def load_run_config(path: str | Path) -> RunConfig:
    """Load and validate a JSON run config; unknown keys are errors."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"{path} has unknown keys: {sorted(unknown)}")

    reward = _build_section(data, "reward", RewardConfig.from_dict, RewardConfig())
    rollout = _build_section(
        data,
        "rollout",
        lambda section: RolloutConfig(
            step_budget=section.get("step_budget", 8),
            top_k=section.get("top_k", 3),
            max_gen_chars=section.get("max_gen_chars", 8192),
        ),
        RolloutConfig(),
    )
    retriever = _build_section(
        data,
        "retriever",
        lambda section: Bm25Params(k1=section.get("k1", 1.5), b=section.get("b", 0.75)),
        Bm25Params(),
    )
    concurrency = data.get("concurrency", {})
    if not isinstance(concurrency, dict):
        raise ConfigError("config section 'concurrency' must be an object")
    for key in ("over_search_judge", "under_search_verifier", "policy", "generator"):
        if key in data and not isinstance(data[key], dict):
            raise ConfigError(f"config section {key!r} must be an object")
    return RunConfig(
        seed=data.get("seed", 0),
        mode=data.get("mode", "deterministic"),
        reward=reward,
        rollout=rollout,
        retriever=retriever,
        corpus_path=data.get("corpus_path"),
        workers=concurrency.get("workers", 1),
        max_in_flight=concurrency.get("max_in_flight", 4),
        max_retries=concurrency.get("max_retries", 1),
        over_search_judge=data.get("over_search_judge"),
        under_search_verifier=data.get("under_search_verifier"),
        policy=data.get("policy"),
        generator=data.get("generator"),
        base_dir=path.parent.resolve(),
    )


def _endpoint_from_spec(spec: dict) -> JudgeEndpointConfig:
    try:
        return JudgeEndpointConfig(
            endpoint_url=spec["endpoint_url"],
            model_name=spec["model_name"],
            api_key_env=spec.get("api_key_env"),
            timeout=spec.get("timeout", 30.0),
            max_retries=spec.get("max_retries", 2),
            max_in_flight=spec.get("max_in_flight", 4),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"http backend spec invalid: {exc}") from exc


def build_chat_backend(spec: dict | None, config: RunConfig, role: str) -> ChatBackend | None:
    """Instantiate a judge or verifier backend from its config entry."""
    if spec is None:
        return None
    kind = spec.get("type")
    if kind == "scripted":
        if "script_path" not in spec:
            raise ConfigError(f"{role}: scripted backend needs script_path")
        return load_judge_script(config.resolve(spec["script_path"]))
    if kind == "http":
        return HttpChatBackend(_endpoint_from_spec(spec))
    raise ConfigError(f"{role}: unknown backend type {kind!r}")


def build_answer_backend(spec: dict | None, config: RunConfig) -> AnswerBackend | None:
    """Instantiate the standalone-answer policy backend from its config entry."""
    if spec is None:
        return None
    kind = spec.get("type")
    if kind == "scripted":
        if "script_path" not in spec:
            raise ConfigError("policy: scripted backend needs script_path")
        return load_policy_script(config.resolve(spec["script_path"]))
    if kind == "http":
        return HttpAnswerBackend(_endpoint_from_spec(spec), instruction=spec.get("instruction"))
    raise ConfigError(f"policy: unknown backend type {kind!r}")


def apply_overrides(
    config: RunConfig,
    *,
    seed: int | None = None,
    lambda_f: float | None = None,
    lambda_p: float | None = None,
    top_k: int | None = None,
    budget: int | None = None,
    max_in_flight: int | None = None,
    over_search_only: bool = False,
    under_search_only: bool = False,
) -> RunConfig:
    """Fold command-line overrides into a loaded config."""
    if over_search_only and under_search_only:
        raise ConfigError("--over-search-only and --under-search-only are mutually exclusive")
    reward = config.reward
    try:
        if lambda_f is not None:
            reward = replace(reward, lambda_f=lambda_f)
        if lambda_p is not None:
            reward = replace(reward, lambda_p=lambda_p)
        if over_search_only:
            reward = replace(reward, over_search_enabled=True, under_search_enabled=False)
        if under_search_only:
            reward = replace(reward, over_search_enabled=False, under_search_enabled=True)
        rollout = config.rollout
        if top_k is not None:
            rollout = replace(rollout, top_k=top_k)
        if budget is not None:
            rollout = replace(rollout, step_budget=budget)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    updated = replace(config, reward=reward, rollout=rollout)
    if seed is not None:
        updated = replace(updated, seed=seed)
    if max_in_flight is not None:
        if max_in_flight < 1:
            raise ConfigError(f"--max-in-flight must be >= 1, got {max_in_flight}")
        updated = replace(updated, max_in_flight=max_in_flight)
    return updated
