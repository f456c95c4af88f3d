"""Step-level reward shaping and search-efficiency auditing for tool-using LLMs.

The package validates step-structured trajectories against a strict tag
grammar, labels each step as optimal, over-search, or under-search with
LLM judges, combines answer, format, and step quality into a hierarchical
reward, and aggregates search-efficiency metrics across datasets.
"""

from .detection import (
    DEFAULT_EQUIVALENCE_JUDGE_MODEL,
    DEFAULT_STEP_VERIFIER_MODEL,
    AnswerBackend,
    ChatBackend,
    HttpAnswerBackend,
    HttpChatBackend,
    JudgeAnswer,
    JudgeEndpointConfig,
    batch_regenerate,
    detect_over_search,
    detect_under_search,
    label_trajectory,
    parse_judge_answer,
)
from .errors import (
    BackendUnavailable,
    BoundsViolation,
    ConfigError,
    DuplicateId,
    EmptyGoldenList,
    FormatNotOk,
    GeneratorStalled,
    InconsistentTrajectory,
    LabelKindMismatch,
    MissingLabels,
    NoMutationSite,
    StepscoreError,
)
from .grammar import (
    RESERVED_TAGS,
    RESERVED_TOKENS,
    FormatReport,
    TagSpan,
    check_format,
    check_format_detail,
    extract_answer,
    find_tag_span,
    normalize,
    parse_trajectory,
    validate_step,
)
from .metrics import (
    DatasetMetrics,
    MetricsReport,
    aggregate_report,
    compute_over_search_rate,
    compute_under_search_rate,
    merge_reports,
)
from .model import (
    STEP_COUNT_SENTINEL,
    EvalRecord,
    RewardBreakdown,
    RewardConfig,
    Step,
    StepKind,
    StepLabel,
    Trajectory,
    Verdict,
)
from .records import read_records, record_from_dict, record_to_dict, write_records
from .retriever import (
    Bm25Params,
    CorpusIndex,
    CorpusRetriever,
    Document,
    index_corpus,
    load_corpus,
    retrieve,
    tokenize,
)
from .reward import cem, count_optimal, hierarchical_reward, score_trajectory
from .rollout import (
    GENERATION_MODES,
    STOP_MARKERS,
    GeneratorBackend,
    RetrieverBackend,
    RolloutConfig,
    RolloutResult,
    format_context,
    run_inference,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerBackend",
    "BackendUnavailable",
    "Bm25Params",
    "BoundsViolation",
    "ChatBackend",
    "ConfigError",
    "CorpusIndex",
    "CorpusRetriever",
    "DatasetMetrics",
    "DEFAULT_EQUIVALENCE_JUDGE_MODEL",
    "DEFAULT_STEP_VERIFIER_MODEL",
    "Document",
    "DuplicateId",
    "EmptyGoldenList",
    "EvalRecord",
    "FormatNotOk",
    "FormatReport",
    "GENERATION_MODES",
    "GeneratorBackend",
    "GeneratorStalled",
    "HttpAnswerBackend",
    "HttpChatBackend",
    "InconsistentTrajectory",
    "JudgeAnswer",
    "JudgeEndpointConfig",
    "LabelKindMismatch",
    "MetricsReport",
    "MissingLabels",
    "NoMutationSite",
    "RESERVED_TAGS",
    "RESERVED_TOKENS",
    "RetrieverBackend",
    "RewardBreakdown",
    "RewardConfig",
    "RolloutConfig",
    "RolloutResult",
    "STEP_COUNT_SENTINEL",
    "STOP_MARKERS",
    "Step",
    "StepKind",
    "StepLabel",
    "StepscoreError",
    "Trajectory",
    "Verdict",
    "aggregate_report",
    "batch_regenerate",
    "cem",
    "check_format",
    "check_format_detail",
    "compute_over_search_rate",
    "compute_under_search_rate",
    "count_optimal",
    "detect_over_search",
    "detect_under_search",
    "extract_answer",
    "find_tag_span",
    "format_context",
    "hierarchical_reward",
    "index_corpus",
    "label_trajectory",
    "load_corpus",
    "merge_reports",
    "normalize",
    "parse_judge_answer",
    "parse_trajectory",
    "read_records",
    "record_from_dict",
    "record_to_dict",
    "retrieve",
    "run_inference",
    "score_trajectory",
    "tokenize",
    "validate_step",
    "write_records",
]
