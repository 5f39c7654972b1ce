"""Capture-recapture estimators of the total number of codes.

Treats the interview history 1..j-1 as the first source (codes "marked")
and interview j as the second (codes "captured", of which the previously
seen ones are "recaptured").  Three estimators of the total code count
are computed after each interview:

* Lincoln-Petersen  N = M C / R          (not estimable when R = 0),
* Chapman           N = (M+1)(C+1)/(R+1) - 1   (always estimable),
* Good-Turing       N = D / (1 - f1/n)   (coverage-based; not estimable
  when every observed code is a singleton or nothing has been observed).

Estimates are real numbers, never rounded to integers.  Chapman never
exceeds Lincoln-Petersen when both exist; the gap is
(M-R)(C-R) / (R(R+1)), zero exactly when R equals M or C.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .dataset import CodeFrequencyTable, ElicitationMatrix

__all__ = [
    "CRCEstimate",
    "lincoln_petersen",
    "chapman",
    "good_turing",
    "per_interview_series",
    "series_to_csv",
    "series_to_json_list",
]

SERIES_CSV_COLUMNS = (
    "seq",
    "M",
    "C",
    "R",
    "lp",
    "chapman",
    "good_turing",
    "remaining_lp",
    "remaining_chapman",
    "remaining_good_turing",
)


@dataclass(frozen=True, slots=True)
class CRCEstimate:
    """Total-code estimates after one interview.

    ``remaining_*`` is the estimate minus the distinct codes observed so
    far, floored at zero (Lincoln-Petersen and Chapman can undershoot the
    observed count).  None marks a not-estimable value.
    """

    seq: int
    marked: int  # distinct codes elicited in interviews 1..j-1
    captured: int  # codes elicited at interview j
    recaptured: int  # captured codes that were already marked
    lp: float | None
    chapman: float | None
    good_turing: float | None
    remaining_lp: float | None
    remaining_chapman: float | None
    remaining_good_turing: float | None


def lincoln_petersen(marked: int, captured: int, recaptured: int) -> float | None:
    """Two-source total-population estimate M*C/R; None when R = 0."""
    _check_mcr(marked, captured, recaptured)
    if recaptured == 0:
        return None
    return marked * captured / recaptured


def chapman(marked: int, captured: int, recaptured: int) -> float:
    """Bias-adjusted two-source estimate (M+1)(C+1)/(R+1) - 1."""
    _check_mcr(marked, captured, recaptured)
    return (marked + 1) * (captured + 1) / (recaptured + 1) - 1


def good_turing(freq: CodeFrequencyTable) -> float | None:
    """Coverage-based total estimate D / (1 - f1/n).

    The sample coverage 1 - f1/n estimates the probability mass of the
    codes already observed; dividing the observed distinct count by it
    projects the total.  None when n = 0 or every code is a singleton.
    """
    n = freq.total
    if n < 1:
        return None
    coverage = 1.0 - freq.singletons / n
    if coverage <= 0.0:
        return None
    return freq.distinct / coverage


def per_interview_series(matrix: ElicitationMatrix) -> list[CRCEstimate]:
    """All three estimators after each interview.

    The first interview has an empty history (M = 0), so its row carries
    no estimates.  From the second interview on, every estimator that is
    defined is reported; a missing Lincoln-Petersen value is never
    silently replaced by Chapman.
    """
    estimates: list[CRCEstimate] = []
    seen: set[str] = set()
    counts: dict[str, int] = {}
    for (iid, seq), row in zip(matrix.interviews, matrix.elicited):
        current = {code for code, v in zip(matrix.codes, row) if v}
        marked = len(seen)
        captured = len(current)
        recaptured = len(current & seen)
        for code in current:
            counts[code] = counts.get(code, 0) + 1
        seen |= current
        distinct = len(seen)

        if seq == 1:
            lp_est = chap_est = gt_est = None
        else:
            lp_est = lincoln_petersen(marked, captured, recaptured)
            chap_est = chapman(marked, captured, recaptured)
            gt_est = good_turing(CodeFrequencyTable(counts=dict(counts)))

        def remaining(estimate: float | None) -> float | None:
            return None if estimate is None else max(0.0, estimate - distinct)

        estimates.append(
            CRCEstimate(
                seq=seq,
                marked=marked,
                captured=captured,
                recaptured=recaptured,
                lp=lp_est,
                chapman=chap_est,
                good_turing=gt_est,
                remaining_lp=remaining(lp_est),
                remaining_chapman=remaining(chap_est),
                remaining_good_turing=remaining(gt_est),
            )
        )
    return estimates


def _check_mcr(marked: int, captured: int, recaptured: int) -> None:
    if marked < 0 or captured < 0 or recaptured < 0:
        raise ValueError("marked, captured, and recaptured must be non-negative")
    if recaptured > min(marked, captured):
        raise ValueError(
            f"recaptured ({recaptured}) cannot exceed marked ({marked}) or captured ({captured})"
        )


def _cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def series_to_csv(series: list[CRCEstimate]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SERIES_CSV_COLUMNS)
    for e in series:
        writer.writerow(
            [
                e.seq,
                e.marked,
                e.captured,
                e.recaptured,
                _cell(e.lp),
                _cell(e.chapman),
                _cell(e.good_turing),
                _cell(e.remaining_lp),
                _cell(e.remaining_chapman),
                _cell(e.remaining_good_turing),
            ]
        )
    return out.getvalue()


def series_to_json_list(series: list[CRCEstimate]) -> list[dict]:
    return [
        {
            "seq": e.seq,
            "M": e.marked,
            "C": e.captured,
            "R": e.recaptured,
            "lp": e.lp,
            "chapman": e.chapman,
            "good_turing": e.good_turing,
            "remaining_lp": e.remaining_lp,
            "remaining_chapman": e.remaining_chapman,
            "remaining_good_turing": e.remaining_good_turing,
        }
        for e in series
    ]
