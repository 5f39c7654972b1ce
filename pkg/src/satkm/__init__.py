"""Interview saturation analysis toolkit.

Estimates the probability that further interviews would still elicit
new codes (a product-limit survival curve over the interview sequence),
sizes the remaining code universe by capture-recapture, and projects
how many more interviews a study needs under documented stopping rules.
"""

from .crc import (
    CRCEstimate,
    chapman,
    good_turing,
    lincoln_petersen,
    per_interview_series,
)
from .dataset import (
    CodeFrequencyTable,
    DataError,
    DescriptiveStats,
    ElicitationMatrix,
    GroupedCounts,
    GroupRow,
    InterviewSequence,
    StatSummary,
    derive_sequence,
    descriptive_stats,
    matrix_to_wide_csv,
    parse_counts,
    parse_grouped,
    parse_long,
    parse_wide,
    sequence_to_counts_csv,
)
from .planner import (
    InterviewCountPreset,
    ScenarioRow,
    StopDecision,
    StoppingRule,
    Type1Report,
    apply_rule,
    impute_grouped,
    parse_patterns,
    presets,
    scenario_eval,
    type1_assess,
)
from .survival import (
    CODING_NEW_CODE_EVENT,
    CODING_ZERO_EVENT,
    KMCurve,
    KMPoint,
    SaturationSummary,
    fit_line_x_intercept,
    km_estimate,
    saturation_summary,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DataError",
    "ElicitationMatrix",
    "InterviewSequence",
    "CodeFrequencyTable",
    "GroupedCounts",
    "GroupRow",
    "StatSummary",
    "DescriptiveStats",
    "parse_wide",
    "parse_long",
    "parse_grouped",
    "parse_counts",
    "derive_sequence",
    "descriptive_stats",
    "matrix_to_wide_csv",
    "sequence_to_counts_csv",
    "KMPoint",
    "KMCurve",
    "SaturationSummary",
    "CODING_NEW_CODE_EVENT",
    "CODING_ZERO_EVENT",
    "km_estimate",
    "fit_line_x_intercept",
    "saturation_summary",
    "CRCEstimate",
    "lincoln_petersen",
    "chapman",
    "good_turing",
    "per_interview_series",
    "StoppingRule",
    "StopDecision",
    "Type1Report",
    "ScenarioRow",
    "InterviewCountPreset",
    "apply_rule",
    "type1_assess",
    "impute_grouped",
    "scenario_eval",
    "presets",
    "parse_patterns",
]
