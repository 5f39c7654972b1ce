"""Stopping rules, Type I error assessment, grouped-count imputation, and
pragmatic interview-count planning.

A deterministic stopping rule looks only at the run of zero-new-code
interviews; stopping on such a run while later interviews would still
have elicited new codes is the Type I error quantified here, judged
against the observed data as ground truth.

Grouped published summaries (x codes in a block of w consecutive
interviews) are imputed to a per-interview sequence: when the block has
at least as many codes as interviews, every interview gets a code (the
surplus piles onto the block's first interview, which leaves the
zero/nonzero pattern unchanged); otherwise the interviews that receive
one code each are drawn uniformly at random, seeded for reproducibility.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .dataset import GroupedCounts, InterviewSequence
from .survival import km_estimate, saturation_summary

__all__ = [
    "RULE_FIRST_ZERO",
    "RULE_CONSECUTIVE_ZERO",
    "RULE_TEN_PLUS_THREE",
    "METHOD_EXTRAPOLATION",
    "METHOD_RULE_COMPLETION",
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
    "scenarios_to_csv",
    "scenario_to_json_dict",
]

RULE_FIRST_ZERO = "first_zero"
RULE_CONSECUTIVE_ZERO = "consecutive_zero"
RULE_TEN_PLUS_THREE = "ten_plus_three"

METHOD_EXTRAPOLATION = "extrapolation"
METHOD_RULE_COMPLETION = "rule_completion"

SCENARIO_CSV_COLUMNS = (
    "pattern",
    "km_final",
    "ci_low",
    "ci_high",
    "additional_extrapolation",
    "additional_rule_completion",
)

MAX_SEED = 2**64 - 1


@dataclass(frozen=True, slots=True)
class StoppingRule:
    """Deterministic saturation rule.

    ``first_zero`` stops at the first zero-new-code interview;
    ``consecutive_zero`` at the k-th consecutive one; ``ten_plus_three``
    requires at least 10 interviews and 3 consecutive zeros.
    """

    kind: str
    k: int = 1

    def __post_init__(self):
        if self.kind not in (RULE_FIRST_ZERO, RULE_CONSECUTIVE_ZERO, RULE_TEN_PLUS_THREE):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @classmethod
    def first_zero(cls) -> "StoppingRule":
        return cls(kind=RULE_FIRST_ZERO)

    @classmethod
    def consecutive_zero(cls, k: int) -> "StoppingRule":
        return cls(kind=RULE_CONSECUTIVE_ZERO, k=k)

    @classmethod
    def ten_plus_three(cls) -> "StoppingRule":
        return cls(kind=RULE_TEN_PLUS_THREE)

    def label(self) -> str:
        if self.kind == RULE_CONSECUTIVE_ZERO:
            return f"consecutive_zero({self.k})"
        return self.kind


@dataclass(frozen=True, slots=True)
class StopDecision:
    stopped: bool
    stop_seq: int | None = None


@dataclass(frozen=True, slots=True)
class Type1Report:
    """Judgement of a stopping rule against the full observed sequence."""

    rule: StoppingRule
    decision: StopDecision
    is_type1: bool
    missed_codes: int  # new codes elicited after the stop
    extra_interviews_needed: int  # observed interviews after the stop


@dataclass(frozen=True, slots=True)
class ScenarioRow:
    """One planning scenario: a hypothetical 0/1 interview pattern and the
    projected effort to reach an estimated probability of zero."""

    pattern: tuple[int, ...]
    km_final: float
    ci_low: float | None
    ci_high: float | None
    additional_interviews: Mapping[str, int | None]


class InterviewCountPreset(NamedTuple):
    methodology: str
    min_interviews: int
    max_interviews: int | None


def apply_rule(sequence: InterviewSequence, rule: StoppingRule) -> StopDecision:
    """Earliest interview at which the rule declares saturation, if any."""
    run = 0
    for j, n_j in enumerate(sequence.new_codes, start=1):
        run = run + 1 if n_j == 0 else 0
        if rule.kind == RULE_FIRST_ZERO and run >= 1:
            return StopDecision(stopped=True, stop_seq=j)
        if rule.kind == RULE_CONSECUTIVE_ZERO and run >= rule.k:
            return StopDecision(stopped=True, stop_seq=j)
        if rule.kind == RULE_TEN_PLUS_THREE and j >= 10 and run >= 3:
            return StopDecision(stopped=True, stop_seq=j)
    return StopDecision(stopped=False)


def type1_assess(sequence: InterviewSequence, rule: StoppingRule) -> Type1Report:
    """Would stopping under the rule have missed codes the remaining
    observed interviews went on to elicit?"""
    decision = apply_rule(sequence, rule)
    if not decision.stopped:
        return Type1Report(
            rule=rule,
            decision=decision,
            is_type1=False,
            missed_codes=0,
            extra_interviews_needed=0,
        )
    missed = sum(sequence.new_codes[decision.stop_seq :])
    return Type1Report(
        rule=rule,
        decision=decision,
        is_type1=missed >= 1,
        missed_codes=missed,
        extra_interviews_needed=sequence.length - decision.stop_seq,
    )


def impute_grouped(groups: GroupedCounts, seed: int) -> InterviewSequence:
    """Spread each group's code count over its interviews.

    A group with codes_count >= width gives every interview one code and
    its first interview the surplus; a smaller count goes to that many
    uniformly drawn interviews, one code each, leaving the rest at zero.
    The same seed always produces the same sequence.
    """
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    rng = random.Random(seed)
    counts = [0] * groups.n_interviews
    for g in groups.groups:
        seqs = list(range(g.start_seq, g.end_seq + 1))
        if g.codes_count >= g.width:
            for s in seqs:
                counts[s - 1] = 1
            counts[g.start_seq - 1] += g.codes_count - g.width
        else:
            for s in rng.sample(seqs, g.codes_count):
                counts[s - 1] = 1
    return InterviewSequence(new_codes=tuple(counts))


def _trailing_zeros(pattern: Sequence[int]) -> int:
    run = 0
    for v in reversed(pattern):
        if v != 0:
            break
        run += 1
    return run


def scenario_eval(
    pattern: Sequence[int],
    alpha: float = 0.05,
    methods: Iterable[str] = (METHOD_EXTRAPOLATION, METHOD_RULE_COMPLETION),
    rule_k: int = 3,
) -> ScenarioRow:
    """Evaluate one hypothetical 0/1 interview pattern.

    The additional-interview projections answer "how much further to an
    estimated probability of zero" under two documented conventions:

    * ``extrapolation``: interviews up to the ceiling of the upper
      confidence limit's x-intercept (None when no decreasing line can
      be fitted),
    * ``rule_completion``: interviews needed to finish a run of
      ``rule_k`` consecutive zero-new-code interviews.

    Either way the answer is 0 when the estimate already reached zero.
    """
    methods = tuple(methods)
    for m in methods:
        if m not in (METHOD_EXTRAPOLATION, METHOD_RULE_COMPLETION):
            raise ValueError(f"unknown projection method {m!r}")
    for v in pattern:
        if v not in (0, 1):
            raise ValueError(f"pattern must be 0/1, got {v!r}")
    sequence = InterviewSequence(new_codes=tuple(pattern))
    curve = km_estimate(sequence, alpha=alpha)
    final = curve.final
    saturated = final.survival == 0.0

    additional: dict[str, int | None] = {}
    if METHOD_EXTRAPOLATION in methods:
        if saturated:
            additional[METHOD_EXTRAPOLATION] = 0
        else:
            landmark = saturation_summary(curve).upper_ci_extrapolated_zero
            if landmark is None:
                additional[METHOD_EXTRAPOLATION] = None
            else:
                additional[METHOD_EXTRAPOLATION] = max(0, math.ceil(landmark) - sequence.length)
    if METHOD_RULE_COMPLETION in methods:
        trailing = _trailing_zeros(pattern)
        if saturated or trailing >= rule_k:
            additional[METHOD_RULE_COMPLETION] = 0
        else:
            additional[METHOD_RULE_COMPLETION] = rule_k - trailing

    return ScenarioRow(
        pattern=tuple(pattern),
        km_final=final.survival,
        ci_low=final.ci_low,
        ci_high=final.ci_high,
        additional_interviews=additional,
    )


def presets() -> list[InterviewCountPreset]:
    """Published deterministic interview-count ranges, as reference constants."""
    return [
        InterviewCountPreset("ethnography_ethnoscience", 30, 60),
        InterviewCountPreset("grounded_theory", 30, 50),
        InterviewCountPreset("phenomenology", 5, 25),
        InterviewCountPreset("all_qualitative", 15, None),
        InterviewCountPreset("funded_time_limited", 1, 95),
    ]


def parse_patterns(data: bytes | str) -> list[tuple[int, ...]]:
    """Parse a scenario batch file: one comma-separated 0/1 pattern per line.

    Blank lines and lines starting with ``#`` are skipped but still count
    toward the line numbers used in diagnostics.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    patterns = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        pattern = []
        for token in line.split(","):
            token = token.strip()
            if token not in ("0", "1"):
                raise ValueError(f"non-binary token {token!r} at line {lineno}")
            pattern.append(int(token))
        patterns.append(tuple(pattern))
    return patterns


def _cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def scenarios_to_csv(rows: list[ScenarioRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCENARIO_CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                ",".join(str(v) for v in row.pattern),
                _cell(row.km_final),
                _cell(row.ci_low),
                _cell(row.ci_high),
                _cell(row.additional_interviews.get(METHOD_EXTRAPOLATION)),
                _cell(row.additional_interviews.get(METHOD_RULE_COMPLETION)),
            ]
        )
    return out.getvalue()


def scenario_to_json_dict(row: ScenarioRow) -> dict:
    return {
        "pattern": list(row.pattern),
        "km_final": row.km_final,
        "ci_low": row.ci_low,
        "ci_high": row.ci_high,
        "additional_interviews": dict(row.additional_interviews),
    }
