"""Kaplan-Meier estimate of the probability that saturation has not been
reached, with Greenwood log-scale confidence intervals and linear
extrapolation of the curve to its zero crossing.

Each interview is one observation whose time is its sequence number, so
all times are distinct and the number at risk at interview ``j`` out of
``J`` is ``J - j + 1``.  Under the default coding an interview that
elicits at least one new code is an event and a zero-new-code interview
is censored; the estimate therefore starts at 1 (no interviews, no
evidence of saturation) and can only step down, reaching exactly 0 when
the final interview is an event.

Confidence intervals use the Greenwood cumulative sum on the log scale,

    V(j) = sum over event interviews i <= j of d_i / (n_i (n_i - d_i)),
    CI   = S(j) * exp(-z sqrt(V)), S(j) * exp(+z sqrt(V)),

with the upper limit clipped to 1 and the interval reported as not
estimable once S(j) = 0.  Product-limit estimator after Kaplan & Meier
(1958); variance after Greenwood (1926).

Because every interview enters every earlier risk set, appending
interviews (even censored ones) rescales the whole curve.  The estimate
at the final interview is retrospective: it is the value the full
observed sequence assigns, not a quantity frozen when that interview
happened.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from statistics import NormalDist

from .dataset import InterviewSequence

__all__ = [
    "CODING_NEW_CODE_EVENT",
    "CODING_ZERO_EVENT",
    "KMPoint",
    "KMCurve",
    "SaturationSummary",
    "km_estimate",
    "fit_line",
    "fit_line_x_intercept",
    "saturation_summary",
    "curve_to_csv",
    "curve_to_json_dict",
]

# Default coding: an interview with >= 1 new codes is the KM event.
CODING_NEW_CODE_EVENT = "new-code"
# Alternative coding: a zero-new-code interview is the KM event.
CODING_ZERO_EVENT = "zero"

CURVE_CSV_COLUMNS = ("seq", "n_at_risk", "event", "S", "V", "ci_low", "ci_high")


@dataclass(frozen=True, slots=True)
class KMPoint:
    seq: int
    n_at_risk: int
    event: int  # 1 = event, 0 = censored
    survival: float  # probability of not being saturated, S(j)
    variance_log: float  # Greenwood cumulative sum V(j); inf once S reaches 0
    ci_low: float | None  # None when the interval is not estimable
    ci_high: float | None


@dataclass(frozen=True, slots=True)
class KMCurve:
    points: tuple[KMPoint, ...]
    alpha: float
    z: float

    @property
    def final(self) -> KMPoint:
        return self.points[-1]

    def event_points(self) -> tuple[KMPoint, ...]:
        return tuple(p for p in self.points if p.event)


@dataclass(frozen=True, slots=True)
class SaturationSummary:
    """The three saturation landmarks read off a curve.

    ``km_zero_seq`` is the first interview where the estimate is exactly
    zero, if any; the extrapolated landmarks are x-intercepts of least
    squares lines through the event-time points of the estimate and of
    the upper confidence limit.  An exact zero supersedes the estimate's
    own extrapolation.  Landmarks that cannot be computed (too few event
    points, non-decreasing fit) are None, never errors.
    """

    km_zero_seq: int | None
    km_extrapolated_zero: float | None
    upper_ci_extrapolated_zero: float | None


def km_estimate(
    sequence: InterviewSequence,
    alpha: float = 0.05,
    coding: str = CODING_NEW_CODE_EVENT,
) -> KMCurve:
    """Estimate the probability of not being saturated after each interview.

    ``alpha`` is the two-sided confidence level (0.05 gives 95% intervals).
    ``coding`` selects which interviews count as events; the default
    treats new-code interviews as events and zero-new-code interviews as
    censored.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if coding not in (CODING_NEW_CODE_EVENT, CODING_ZERO_EVENT):
        raise ValueError(f"unknown event coding {coding!r}")
    counts = sequence.new_codes
    if not counts:
        raise ValueError("empty sequence")

    z = NormalDist().inv_cdf(1 - alpha / 2)
    total = len(counts)
    survival = 1.0
    var_log = 0.0
    points = []
    for j, n_j in enumerate(counts, start=1):
        if coding == CODING_NEW_CODE_EVENT:
            d = 1 if n_j >= 1 else 0
        else:
            d = 1 if n_j == 0 else 0
        n = total - j + 1
        if d:
            survival *= 1.0 - 1.0 / n
            var_log = var_log + 1.0 / (n * (n - 1)) if n > 1 else math.inf
        if survival <= 0.0:
            survival = 0.0
            ci_low = ci_high = None
        else:
            halfwidth = z * math.sqrt(var_log)
            ci_low = survival * math.exp(-halfwidth)
            ci_high = min(1.0, survival * math.exp(halfwidth))
        points.append(
            KMPoint(
                seq=j,
                n_at_risk=n,
                event=d,
                survival=survival,
                variance_log=var_log,
                ci_low=ci_low,
                ci_high=ci_high,
            )
        )
    return KMCurve(points=tuple(points), alpha=alpha, z=z)


def fit_line(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Ordinary least squares line through the points: (slope, intercept)."""
    if len(points) < 2:
        raise ValueError("need at least 2 points to fit a line")
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    if len(set(xs)) < 2:
        raise ValueError("need at least 2 distinct x values")
    slope, intercept = statistics.linear_regression(xs, ys)
    return slope, intercept


def fit_line_x_intercept(points: list[tuple[float, float]]) -> float:
    """X-axis crossing of the least squares line through the points.

    The slope must be negative; a flat or rising fit has no meaningful
    crossing and raises instead.
    """
    slope, intercept = fit_line(points)
    if slope >= 0:
        raise ValueError("non-negative slope: no extrapolated saturation")
    return -intercept / slope


def saturation_summary(curve: KMCurve) -> SaturationSummary:
    """Read the saturation landmarks off a curve.

    Extrapolations use event-time points only; censored interviews add no
    step and would only flatten the fit.
    """
    km_zero_seq = next((p.seq for p in curve.points if p.survival == 0.0), None)

    km_extrapolated = None
    if km_zero_seq is None:
        try:
            km_extrapolated = fit_line_x_intercept(
                [(p.seq, p.survival) for p in curve.event_points()]
            )
        except ValueError:
            km_extrapolated = None

    upper_ci_extrapolated = None
    try:
        upper_ci_extrapolated = fit_line_x_intercept(
            [(p.seq, p.ci_high) for p in curve.event_points() if p.ci_high is not None]
        )
    except ValueError:
        upper_ci_extrapolated = None

    return SaturationSummary(
        km_zero_seq=km_zero_seq,
        km_extrapolated_zero=km_extrapolated,
        upper_ci_extrapolated_zero=upper_ci_extrapolated,
    )


def _csv_cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def curve_to_csv(curve: KMCurve) -> str:
    """Full-precision CSV rendering, one row per interview."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CURVE_CSV_COLUMNS)
    for p in curve.points:
        writer.writerow(
            [
                p.seq,
                p.n_at_risk,
                p.event,
                _csv_cell(p.survival),
                "inf" if math.isinf(p.variance_log) else _csv_cell(p.variance_log),
                _csv_cell(p.ci_low),
                _csv_cell(p.ci_high),
            ]
        )
    return out.getvalue()


def _json_number(value: float | None) -> float | None:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return None
    return value


def curve_to_json_dict(curve: KMCurve, summary: SaturationSummary | None = None) -> dict:
    """JSON-safe dict mirroring the CSV columns; non-finite values are null."""
    doc: dict = {
        "alpha": curve.alpha,
        "z": curve.z,
        "points": [
            {
                "seq": p.seq,
                "n_at_risk": p.n_at_risk,
                "event": p.event,
                "S": p.survival,
                "V": _json_number(p.variance_log),
                "ci_low": _json_number(p.ci_low),
                "ci_high": _json_number(p.ci_high),
            }
            for p in curve.points
        ],
    }
    if summary is not None:
        doc["summary"] = {
            "km_zero_seq": summary.km_zero_seq,
            "km_extrapolated_zero": _json_number(summary.km_extrapolated_zero),
            "upper_ci_extrapolated_zero": _json_number(summary.upper_ci_extrapolated_zero),
        }
    return doc
