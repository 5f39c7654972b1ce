"""Interview/code data structures, file parsers, and descriptive statistics.

The core object is an elicitation matrix: one row per interview (in
chronological order), one column per code, and a 0/1 indicator telling
whether the code was elicited at that interview.  A code's first
elicitation "marks" it; every later elicitation is a "recapture".  The
recapture indicators are always derived from the elicitation indicators,
never stored independently.

Three interchange formats are supported, all UTF-8 CSV with a mandatory
header row:

* wide: ``interview_id,seq,<code id>,<code id>,...`` with one 0/1 cell
  per code,
* long: a manifest file ``interview_id,seq`` (listing every interview,
  including zero-code ones) plus an elicitation file ``seq,code_id``,
* grouped: ``start_seq,end_seq,codes_count`` rows giving only the number
  of codes per block of consecutive interviews.

Parsers reject unknown columns and validate sequence contiguity.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

__all__ = [
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
]

WIDE_ID_COLUMNS = ("interview_id", "seq")
LONG_MANIFEST_COLUMNS = ("interview_id", "seq")
LONG_ELICITATION_COLUMNS = ("seq", "code_id")
GROUPED_COLUMNS = ("start_seq", "end_seq", "codes_count")
COUNTS_COLUMNS = ("seq", "new_codes")


class DataError(ValueError):
    """Invalid input data; carries row/column context for diagnostics."""

    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        parts = [message]
        if row is not None:
            parts.append(f"row {row}")
        if column is not None:
            parts.append(f"column {column!r}")
        super().__init__(": ".join([parts[0], ", ".join(parts[1:])]) if len(parts) > 1 else message)


@dataclass(frozen=True, slots=True)
class ElicitationMatrix:
    """Per-interview by per-code elicitation and recapture indicators.

    ``elicited[j-1][k]`` is 1 iff code ``codes[k]`` was elicited at the
    interview with sequence number ``j``; ``recaptured`` flags the
    elicitations whose code was already elicited at an earlier interview.
    Rows are ordered by sequence number, which runs 1..J without gaps.
    """

    interviews: tuple[tuple[str, int], ...]  # (interview_id, seq), sorted by seq
    codes: tuple[str, ...]
    elicited: tuple[tuple[int, ...], ...]
    recaptured: tuple[tuple[int, ...], ...] = field(default=())

    @classmethod
    def build(
        cls,
        interviews: Sequence[tuple[str, int]],
        codes: Sequence[str],
        elicited: Sequence[Sequence[int]],
        *,
        allow_phantom_codes: bool = False,
    ) -> "ElicitationMatrix":
        """Validate invariants, derive recapture flags, and freeze the matrix."""
        rows = sorted(zip(interviews, elicited), key=lambda pair: pair[0][1])
        interviews = [pair[0] for pair in rows]
        elicited = [tuple(int(v) for v in pair[1]) for pair in rows]

        seen_ids: set[str] = set()
        for iid, seq in interviews:
            if iid in seen_ids:
                raise DataError(f"duplicate interview_id {iid!r}")
            seen_ids.add(iid)
        seqs = [seq for _, seq in interviews]
        if len(set(seqs)) != len(seqs):
            dup = next(s for s in seqs if seqs.count(s) > 1)
            raise DataError(f"duplicate seq {dup}")
        if seqs != list(range(1, len(seqs) + 1)):
            expected = 1
            for s in seqs:
                if s != expected:
                    raise DataError(f"non-contiguous seq: expected {expected}, got {s}")
                expected += 1

        if len(set(codes)) != len(codes):
            dup = next(c for c in codes if list(codes).count(c) > 1)
            raise DataError(f"duplicate code id {dup!r}")
        for row in elicited:
            if len(row) != len(codes):
                raise DataError("row length does not match code count")
            for v in row:
                if v not in (0, 1):
                    raise DataError(f"non-binary cell {v!r}")

        if not allow_phantom_codes:
            for k, code in enumerate(codes):
                if not any(row[k] for row in elicited):
                    raise DataError(f"phantom code {code!r}: never elicited", column=code)

        recaptured = []
        seen = [False] * len(codes)
        for row in elicited:
            rec = []
            for k, v in enumerate(row):
                rec.append(1 if v and seen[k] else 0)
                if v:
                    seen[k] = True
            recaptured.append(tuple(rec))

        return cls(
            interviews=tuple(interviews),
            codes=tuple(codes),
            elicited=tuple(elicited),
            recaptured=tuple(recaptured),
        )

    @property
    def n_interviews(self) -> int:
        return len(self.interviews)

    @property
    def n_codes(self) -> int:
        return len(self.codes)

    def codes_at(self, seq: int) -> frozenset[str]:
        """Codes elicited at the interview with the given sequence number."""
        row = self.elicited[seq - 1]
        return frozenset(c for c, v in zip(self.codes, row) if v)


@dataclass(frozen=True, slots=True)
class InterviewSequence:
    """Chronological counts of codes first elicited at each interview."""

    new_codes: tuple[int, ...]

    def __post_init__(self):
        if len(self.new_codes) < 1:
            raise DataError("interview sequence must contain at least one interview")
        if any(n < 0 for n in self.new_codes):
            raise DataError("new-code counts must be non-negative")

    @property
    def length(self) -> int:
        return len(self.new_codes)

    def events(self) -> tuple[int, ...]:
        """0/1 pattern: 1 where the interview elicited at least one new code."""
        return tuple(1 if n >= 1 else 0 for n in self.new_codes)


@dataclass(frozen=True, slots=True)
class CodeFrequencyTable:
    """Cumulative per-code elicitation counts with the derived totals used
    by coverage estimators."""

    counts: Mapping[str, int]

    @property
    def distinct(self) -> int:
        """Number of codes observed at least once."""
        return sum(1 for m in self.counts.values() if m >= 1)

    @property
    def total(self) -> int:
        """Total elicitation events, with multiplicity."""
        return sum(self.counts.values())

    @property
    def singletons(self) -> int:
        """Number of codes elicited exactly once."""
        return sum(1 for m in self.counts.values() if m == 1)

    @classmethod
    def from_matrix(cls, matrix: ElicitationMatrix, through_seq: int | None = None) -> "CodeFrequencyTable":
        """Counts over interviews 1..through_seq (defaults to the full matrix)."""
        limit = matrix.n_interviews if through_seq is None else through_seq
        counts: dict[str, int] = {}
        for row in matrix.elicited[:limit]:
            for code, v in zip(matrix.codes, row):
                if v:
                    counts[code] = counts.get(code, 0) + 1
        return cls(counts=counts)


@dataclass(frozen=True, slots=True)
class GroupRow:
    start_seq: int
    end_seq: int
    codes_count: int

    @property
    def width(self) -> int:
        return self.end_seq - self.start_seq + 1


@dataclass(frozen=True, slots=True)
class GroupedCounts:
    """Code counts per block of consecutive interviews, tiling 1..J."""

    groups: tuple[GroupRow, ...]

    def __post_init__(self):
        if not self.groups:
            raise DataError("no groups")
        expected = 1
        for g in self.groups:
            if g.codes_count < 0:
                raise DataError(f"negative count in group ({g.start_seq},{g.end_seq})")
            if g.end_seq < g.start_seq:
                raise DataError(f"group ({g.start_seq},{g.end_seq}) ends before it starts")
            if g.start_seq < expected:
                raise DataError(f"overlap at seq {g.start_seq}")
            if g.start_seq > expected:
                raise DataError(f"gap at seq {expected}")
            expected = g.end_seq + 1

    @property
    def n_interviews(self) -> int:
        return self.groups[-1].end_seq


@dataclass(frozen=True, slots=True)
class StatSummary:
    """Count, mean, median, and sample standard deviation of one series."""

    total: int
    mean: float
    median: float
    std: float | None  # None when fewer than two observations


@dataclass(frozen=True, slots=True)
class DescriptiveStats:
    """Per-interview marked (first elicitation) and recapture summaries."""

    marked_per_interview: tuple[int, ...]
    recaptured_per_interview: tuple[int, ...]
    marked: StatSummary
    recaptured: StatSummary
    recapture_frequency: Mapping[int, int]  # per-code recapture count -> number of codes


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data.lstrip("﻿")


def _read_rows(data: bytes | str) -> list[list[str]]:
    text = _decode(data)
    reader = csv.reader(io.StringIO(text))
    return [row for row in reader if row and any(cell.strip() for cell in row)]


def _parse_int(cell: str, *, row: int, column: str, minimum: int | None = None) -> int:
    try:
        value = int(cell.strip())
    except ValueError:
        raise DataError(f"expected an integer, got {cell!r}", row=row, column=column) from None
    if minimum is not None and value < minimum:
        raise DataError(f"expected an integer >= {minimum}, got {value}", row=row, column=column)
    return value


def parse_wide(data: bytes | str) -> ElicitationMatrix:
    """Parse the wide CSV layout: header of code ids, one row per interview.

    The first two columns must be exactly ``interview_id`` and ``seq``;
    every remaining header cell names a code and every data cell under it
    must be 0 or 1.
    """
    rows = _read_rows(data)
    if not rows:
        raise DataError("empty input: missing header row")
    header = [h.strip() for h in rows[0]]
    if tuple(header[:2]) != WIDE_ID_COLUMNS:
        raise DataError(
            f"unknown columns {header[:2]!r}: wide input must start with {','.join(WIDE_ID_COLUMNS)}"
        )
    codes = header[2:]
    for code in codes:
        if not code:
            raise DataError("empty code id in header")
        if code in WIDE_ID_COLUMNS:
            raise DataError(f"code id {code!r} collides with a reserved column name")
    if len(rows) == 1:
        raise DataError("no interviews")

    interviews: list[tuple[str, int]] = []
    elicited: list[list[int]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"expected {len(header)} cells, got {len(row)}", row=lineno)
        iid = row[0].strip()
        if not iid:
            raise DataError("empty interview_id", row=lineno, column="interview_id")
        seq = _parse_int(row[1], row=lineno, column="seq", minimum=1)
        cells = []
        for code, cell in zip(codes, row[2:]):
            v = cell.strip()
            if v not in ("0", "1"):
                raise DataError(f"non-binary cell {cell!r}", row=lineno, column=code)
            cells.append(int(v))
        interviews.append((iid, seq))
        elicited.append(cells)

    return ElicitationMatrix.build(interviews, codes, elicited)


def parse_long(interviews_data: bytes | str, codes_data: bytes | str) -> ElicitationMatrix:
    """Parse the long layout: interview manifest plus elicitation list.

    The manifest must list every interview, including zero-code ones;
    each elicitation row attaches one code to one interview by seq.
    """
    manifest_rows = _read_rows(interviews_data)
    if not manifest_rows:
        raise DataError("empty manifest: missing header row")
    header = tuple(h.strip() for h in manifest_rows[0])
    if header != LONG_MANIFEST_COLUMNS:
        raise DataError(
            f"unknown columns {list(header)!r}: manifest must be {','.join(LONG_MANIFEST_COLUMNS)}"
        )
    if len(manifest_rows) == 1:
        raise DataError("no interviews")
    interviews: list[tuple[str, int]] = []
    for lineno, row in enumerate(manifest_rows[1:], start=2):
        if len(row) != 2:
            raise DataError(f"expected 2 cells, got {len(row)}", row=lineno)
        iid = row[0].strip()
        if not iid:
            raise DataError("empty interview_id", row=lineno, column="interview_id")
        seq = _parse_int(row[1], row=lineno, column="seq", minimum=1)
        interviews.append((iid, seq))
    known_seqs = {seq for _, seq in interviews}

    elic_rows = _read_rows(codes_data)
    if not elic_rows:
        raise DataError("empty elicitation file: missing header row")
    header = tuple(h.strip() for h in elic_rows[0])
    if header != LONG_ELICITATION_COLUMNS:
        raise DataError(
            f"unknown columns {list(header)!r}: elicitations must be {','.join(LONG_ELICITATION_COLUMNS)}"
        )
    codes: list[str] = []
    pairs: set[tuple[int, str]] = set()
    per_seq: dict[int, set[str]] = {seq: set() for _, seq in interviews}
    for lineno, row in enumerate(elic_rows[1:], start=2):
        if len(row) != 2:
            raise DataError(f"expected 2 cells, got {len(row)}", row=lineno)
        seq = _parse_int(row[0], row=lineno, column="seq", minimum=1)
        code = row[1].strip()
        if not code:
            raise DataError("empty code_id", row=lineno, column="code_id")
        if seq not in known_seqs:
            raise DataError(f"unknown seq {seq}", row=lineno, column="seq")
        if (seq, code) in pairs:
            raise DataError(f"duplicate (seq, code_id) pair ({seq}, {code!r})", row=lineno)
        pairs.add((seq, code))
        if code not in per_seq[seq]:
            per_seq[seq].add(code)
        if code not in codes:
            codes.append(code)

    elicited = [[1 if code in per_seq[seq] else 0 for code in codes] for _, seq in interviews]
    return ElicitationMatrix.build(interviews, codes, elicited)


def parse_grouped(data: bytes | str) -> GroupedCounts:
    """Parse grouped counts: ``start_seq,end_seq,codes_count`` per row."""
    rows = _read_rows(data)
    if not rows:
        raise DataError("empty input: missing header row")
    header = tuple(h.strip() for h in rows[0])
    if header != GROUPED_COLUMNS:
        raise DataError(
            f"unknown columns {list(header)!r}: grouped input must be {','.join(GROUPED_COLUMNS)}"
        )
    if len(rows) == 1:
        raise DataError("no groups")
    groups = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"expected 3 cells, got {len(row)}", row=lineno)
        start = _parse_int(row[0], row=lineno, column="start_seq", minimum=1)
        end = _parse_int(row[1], row=lineno, column="end_seq", minimum=1)
        count = _parse_int(row[2], row=lineno, column="codes_count")
        if count < 0:
            raise DataError(f"negative count {count}", row=lineno, column="codes_count")
        groups.append(GroupRow(start, end, count))
    groups.sort(key=lambda g: g.start_seq)
    return GroupedCounts(groups=tuple(groups))


def parse_counts(data: bytes | str) -> InterviewSequence:
    """Parse a bare count sequence: ``seq,new_codes`` per row.

    This is the layout ``sequence_to_counts_csv`` emits, so imputed
    sequences round-trip through files without code identities.
    """
    rows = _read_rows(data)
    if not rows:
        raise DataError("empty input: missing header row")
    header = tuple(h.strip() for h in rows[0])
    if header != COUNTS_COLUMNS:
        raise DataError(
            f"unknown columns {list(header)!r}: counts input must be {','.join(COUNTS_COLUMNS)}"
        )
    if len(rows) == 1:
        raise DataError("no interviews")
    by_seq: dict[int, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise DataError(f"expected 2 cells, got {len(row)}", row=lineno)
        seq = _parse_int(row[0], row=lineno, column="seq", minimum=1)
        count = _parse_int(row[1], row=lineno, column="new_codes", minimum=0)
        if seq in by_seq:
            raise DataError(f"duplicate seq {seq}", row=lineno, column="seq")
        by_seq[seq] = count
    expected = list(range(1, len(by_seq) + 1))
    if sorted(by_seq) != expected:
        missing = next(s for s in expected if s not in by_seq)
        raise DataError(f"non-contiguous seq: missing {missing}")
    return InterviewSequence(new_codes=tuple(by_seq[s] for s in expected))


def sequence_to_counts_csv(sequence: InterviewSequence) -> str:
    """Render a count sequence to the ``seq,new_codes`` layout."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COUNTS_COLUMNS)
    for seq, count in enumerate(sequence.new_codes, start=1):
        writer.writerow([seq, count])
    return out.getvalue()


def derive_sequence(matrix: ElicitationMatrix) -> InterviewSequence:
    """Count, per interview, the codes elicited there for the first time."""
    new_codes = [
        sum(1 for e, r in zip(erow, rrow) if e and not r)
        for erow, rrow in zip(matrix.elicited, matrix.recaptured)
    ]
    return InterviewSequence(new_codes=tuple(new_codes))


def _summary(values: Sequence[int]) -> StatSummary:
    return StatSummary(
        total=int(sum(values)),
        mean=statistics.fmean(values),
        median=float(statistics.median(values)),
        std=statistics.stdev(values) if len(values) >= 2 else None,
    )


def descriptive_stats(matrix: ElicitationMatrix) -> DescriptiveStats:
    """Summaries of first elicitations and recaptures.

    Marked counts per interview are first elicitations (so they sum to
    the number of distinct codes); recapture counts per interview sum to
    the number of repeat elicitations.  The frequency table maps a
    per-code recapture count to the number of codes with that count, so
    its entries sum to the number of distinct codes.
    """
    marked = tuple(
        sum(1 for e, r in zip(erow, rrow) if e and not r)
        for erow, rrow in zip(matrix.elicited, matrix.recaptured)
    )
    recaptured = tuple(sum(rrow) for rrow in matrix.recaptured)
    per_code = [
        sum(matrix.recaptured[j][k] for j in range(matrix.n_interviews))
        for k in range(matrix.n_codes)
    ]
    freq: dict[int, int] = {}
    for count in per_code:
        freq[count] = freq.get(count, 0) + 1
    return DescriptiveStats(
        marked_per_interview=marked,
        recaptured_per_interview=recaptured,
        marked=_summary(marked),
        recaptured=_summary(recaptured),
        recapture_frequency=dict(sorted(freq.items())),
    )


def matrix_to_wide_csv(matrix: ElicitationMatrix) -> str:
    """Render a matrix back to the wide CSV layout (parse_wide's inverse)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([*WIDE_ID_COLUMNS, *matrix.codes])
    for (iid, seq), row in zip(matrix.interviews, matrix.elicited):
        writer.writerow([iid, seq, *row])
    return out.getvalue()
