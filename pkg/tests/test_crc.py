import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from satkm.crc import (
    chapman,
    good_turing,
    lincoln_petersen,
    per_interview_series,
    series_to_csv,
    series_to_json_list,
)
from satkm.dataset import CodeFrequencyTable, parse_wide

# Hand-derived before the build: M=3 codes known, C=3 captured, R=2
# recaptured; counts {2,1,1} give D=3, n=4, f1=2, coverage 1/2.
LP_332 = 4.5
CHAPMAN_332 = 13 / 3
GOOD_TURING_211 = 6.0


class TestPointOracles:
    def test_lincoln_petersen(self):
        assert lincoln_petersen(3, 3, 2) == LP_332

    def test_chapman(self):
        assert math.isclose(chapman(3, 3, 2), CHAPMAN_332, rel_tol=1e-15)

    def test_good_turing(self):
        freq = CodeFrequencyTable(counts={"A": 2, "B": 1, "C": 1})
        assert math.isclose(good_turing(freq), GOOD_TURING_211, rel_tol=1e-15)

    def test_lp_not_estimable_without_recaptures(self):
        assert lincoln_petersen(3, 3, 0) is None

    def test_chapman_defined_without_recaptures(self):
        assert chapman(3, 3, 0) == 15.0

    def test_good_turing_not_estimable(self):
        assert good_turing(CodeFrequencyTable(counts={})) is None
        assert good_turing(CodeFrequencyTable(counts={"A": 1, "B": 1})) is None

    @pytest.mark.parametrize("m,c,r", [(-1, 2, 0), (2, -1, 0), (2, 2, -1), (2, 3, 3), (3, 2, 3)])
    def test_invalid_triples_rejected(self, m, c, r):
        with pytest.raises(ValueError):
            lincoln_petersen(m, c, r)
        with pytest.raises(ValueError):
            chapman(m, c, r)


class TestChapmanLpOrdering:
    """Chapman never exceeds Lincoln-Petersen; they agree exactly when
    one source adds no unmarked animals, i.e. (M-R)(C-R) = 0."""

    def test_seeded_triples(self):
        rng = random.Random(987654)
        for _ in range(2000):
            r = rng.randint(1, 60)
            m = r + rng.randint(0, 200)
            c = r + rng.randint(0, 200)
            self._check(m, c, r)

    @given(
        r=st.integers(min_value=1, max_value=80),
        dm=st.integers(min_value=0, max_value=300),
        dc=st.integers(min_value=0, max_value=300),
    )
    @settings(max_examples=300, deadline=None)
    def test_hypothesis_triples(self, r, dm, dc):
        self._check(r + dm, r + dc, r)

    @staticmethod
    def _check(m, c, r):
        lp_exact = oracle.lp_fraction(m, c, r)
        chapman_exact = oracle.chapman_fraction(m, c, r)
        assert chapman_exact <= lp_exact
        assert (chapman_exact == lp_exact) == ((m - r) * (c - r) == 0)
        # The identity behind the ordering, exactly.
        assert lp_exact - chapman_exact == Fraction((m - r) * (c - r), r * (r + 1))
        # Library floats agree with the exact values.
        assert math.isclose(lincoln_petersen(m, c, r), float(lp_exact), rel_tol=1e-12)
        assert math.isclose(chapman(m, c, r), float(chapman_exact), rel_tol=1e-12)


class TestPerInterviewSeries:
    def test_two_interview_hand_case(self):
        # I1={A,B,C}, I2={A,B,D}: M=3, C=3, R=2 at the second interview.
        m = parse_wide("interview_id,seq,A,B,C,D\nI1,1,1,1,1,0\nI2,2,1,1,0,1\n")
        series = per_interview_series(m)
        row = series[1]
        assert (row.marked, row.captured, row.recaptured) == (3, 3, 2)
        assert row.lp == LP_332
        assert math.isclose(row.chapman, CHAPMAN_332, rel_tol=1e-15)
        # Counts {A:2, B:2, C:1, D:1}: D=4, n=6, f1=2 -> 4/(1-2/6) = 6.
        assert math.isclose(row.good_turing, 6.0, rel_tol=1e-15)
        assert row.remaining_lp == 0.5  # 4.5 estimated minus 4 observed
        assert math.isclose(row.remaining_good_turing, 2.0, rel_tol=1e-15)

    def test_first_interview_never_estimable(self, five_interview_csv):
        series = per_interview_series(parse_wide(five_interview_csv))
        first = series[0]
        assert first.seq == 1
        assert first.marked == 0
        assert first.lp is None and first.chapman is None and first.good_turing is None
        assert first.remaining_lp is None

    def test_single_interview_input(self):
        series = per_interview_series(parse_wide("interview_id,seq,A\nI1,1,1\n"))
        assert len(series) == 1
        assert series[0].lp is None and series[0].chapman is None

    def test_zero_recapture_interview_keeps_lp_absent(self):
        m = parse_wide("interview_id,seq,A,B\nI1,1,1,0\nI2,2,0,1\n")
        series = per_interview_series(m)
        assert series[1].recaptured == 0
        assert series[1].lp is None  # never silently replaced by Chapman
        assert series[1].chapman == 3.0  # (1+1)(1+1)/(0+1) - 1

    def test_oracle_agreement_on_random_matrices(self):
        rng = random.Random(424242)
        for _ in range(50):
            n_codes = rng.randint(1, 12)
            n_interviews = rng.randint(1, 12)
            codes = [f"c{k}" for k in range(n_codes)]
            rows = []
            for j in range(n_interviews):
                rows.append([rng.randint(0, 1) for _ in codes])
            # Ensure no phantom columns: give each code one elicitation.
            for k in range(n_codes):
                rows[rng.randrange(n_interviews)][k] = 1
            csv_text = "interview_id,seq," + ",".join(codes) + "\n"
            for j, row in enumerate(rows, start=1):
                csv_text += f"I{j},{j}," + ",".join(map(str, row)) + "\n"
            matrix = parse_wide(csv_text)
            series = per_interview_series(matrix)

            seen: set[str] = set()
            counts: dict[str, int] = {}
            for j, row in enumerate(rows, start=1):
                current = {codes[k] for k, v in enumerate(row) if v}
                expected_m = len(seen)
                expected_c = len(current)
                expected_r = len(current & seen)
                for code in current:
                    counts[code] = counts.get(code, 0) + 1
                seen |= current
                got = series[j - 1]
                assert (got.marked, got.captured, got.recaptured) == (
                    expected_m,
                    expected_c,
                    expected_r,
                )
                if j == 1:
                    assert got.lp is None and got.chapman is None and got.good_turing is None
                    continue
                lp_exact = oracle.lp_fraction(expected_m, expected_c, expected_r)
                if lp_exact is None:
                    assert got.lp is None
                else:
                    assert math.isclose(got.lp, float(lp_exact), rel_tol=1e-12)
                assert math.isclose(
                    got.chapman,
                    float(oracle.chapman_fraction(expected_m, expected_c, expected_r)),
                    rel_tol=1e-12,
                )
                gt_exact = oracle.good_turing_fraction(counts)
                if gt_exact is None:
                    assert got.good_turing is None
                else:
                    assert math.isclose(got.good_turing, float(gt_exact), rel_tol=1e-12)
                    assert got.remaining_good_turing == pytest.approx(
                        max(0.0, float(gt_exact) - len(seen)), rel=1e-12, abs=1e-12
                    )


class TestRenderers:
    def test_csv_shape(self, tiny_matrix_csv):
        series = per_interview_series(parse_wide(tiny_matrix_csv))
        lines = series_to_csv(series).strip().split("\n")
        assert lines[0] == (
            "seq,M,C,R,lp,chapman,good_turing,"
            "remaining_lp,remaining_chapman,remaining_good_turing"
        )
        assert lines[1].startswith("1,0,2,0,,")

    def test_json_matches_csv_numbers(self, tiny_matrix_csv):
        series = per_interview_series(parse_wide(tiny_matrix_csv))
        docs = series_to_json_list(series)
        csv_rows = series_to_csv(series).strip().split("\n")[1:]
        for doc, row in zip(docs, csv_rows):
            cells = row.split(",")
            assert doc["seq"] == int(cells[0])
            assert doc["lp"] == (float(cells[4]) if cells[4] else None)
            assert doc["chapman"] == (float(cells[5]) if cells[5] else None)
