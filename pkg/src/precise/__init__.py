"""Radiology report simplification toolkit.

Pipeline: filter a report corpus, generate patient-friendly texts through a
pluggable backend, score readability (Flesch Reading Ease, Gunning Fog,
Automated Readability Index), run blind human-grading studies over the two
arms, and compare them with a from-scratch statistical engine.
"""

from .ingest import FilterOutcome, Report, filter_reports, load_reports
from .readability import (
    ReadabilityScores,
    UndefinedMetricError,
    ari,
    ari_grade,
    flesch_reading_ease,
    fre_band,
    gfi_grade,
    gunning_fog,
    score_stats,
    score_text,
)
from .simplify import MockBackend, SimplifiedPair, batch_simplify, build_prompt, mock_simplify
from .stats import (
    cohens_kappa,
    descriptive,
    mann_whitney_u,
    ols_group_regression,
    percent_agreement,
    pvalue_matrix,
    t_test,
)
from .textseg import TokenStats, count_syllables, segment_sentences, text_stats, tokenize_words

__version__ = "0.1.0"

__all__ = [
    "FilterOutcome",
    "MockBackend",
    "ReadabilityScores",
    "Report",
    "SimplifiedPair",
    "TokenStats",
    "UndefinedMetricError",
    "ari",
    "ari_grade",
    "batch_simplify",
    "build_prompt",
    "cohens_kappa",
    "count_syllables",
    "descriptive",
    "filter_reports",
    "flesch_reading_ease",
    "fre_band",
    "gfi_grade",
    "gunning_fog",
    "load_reports",
    "mann_whitney_u",
    "mock_simplify",
    "ols_group_regression",
    "percent_agreement",
    "pvalue_matrix",
    "score_stats",
    "score_text",
    "segment_sentences",
    "t_test",
    "text_stats",
    "tokenize_words",
    "__version__",
]
