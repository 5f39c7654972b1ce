import random
import threading

import pytest
from fastapi.testclient import TestClient

from satkm.dataset import derive_sequence, parse_wide
from satkm.service import create_app
from tests_common import FRONT_LOADED_CODES, offline_state


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(tmp_path / "sessions"))


def make_session(client, name="study", alpha=0.05):
    response = client.post("/api/sessions", json={"name": name, "alpha": alpha})
    assert response.status_code == 201
    return response.json()["session_id"]


def assert_replay_equal(client, tmp_path, session_id):
    served = client.get(f"/api/sessions/{session_id}").json()
    replayed = offline_state(tmp_path / "sessions" / f"{session_id}.jsonl")
    assert served == replayed


class TestSessionLifecycle:
    def test_create_empty_session(self, client):
        response = client.post("/api/sessions", json={"name": "studyA", "alpha": 0.05})
        assert response.status_code == 201
        doc = response.json()
        assert doc["name"] == "studyA"
        assert doc["interviews"] == []
        assert doc["curve"] is None
        assert doc["crc"] == []

    def test_distinct_ids(self, client):
        assert make_session(client) != make_session(client)

    def test_invalid_alpha_rejected(self, client):
        response = client.post("/api/sessions", json={"name": "x", "alpha": 1.5})
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "validation_error"
        assert "alpha" in body["message"]

    def test_unknown_session_404(self, client):
        response = client.get("/api/sessions/nope")
        assert response.status_code == 404
        assert response.json() == {"code": "not_found", "message": "unknown session 'nope'"}


class TestAppend:
    def test_first_interview(self, client):
        sid = make_session(client)
        response = client.post(
            f"/api/sessions/{sid}/interviews",
            json={"interview_id": "I1", "code_ids": ["A", "B"]},
        )
        assert response.status_code == 200
        doc = response.json()
        assert doc["new_codes"] == [2]
        assert doc["interviews"][0]["new_codes"] == 2
        # A single interview is the whole risk set, so its event drops
        # the estimate to zero.
        assert doc["curve"]["points"][-1]["S"] == 0.0

    def test_zero_code_interview(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        doc = (
            client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I2", "code_ids": []})
        ).json()
        assert doc["new_codes"] == [1, 0]
        assert doc["curve"]["points"][-1]["S"] == 0.5

    def test_duplicate_interview_id_conflict(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        response = client.post(
            f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["B"]}
        )
        assert response.status_code == 409
        assert response.json()["code"] == "conflict"

    def test_count_entry_degrades_crc(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        doc = (
            client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I2", "new_codes": 2})
        ).json()
        assert doc["crc_degraded"] is True
        assert doc["interviews"][1]["mode"] == "count"
        assert doc["interviews"][1]["code_ids"] == ["auto:2:1", "auto:2:2"]
        assert doc["new_codes"] == [1, 2]

    def test_exactly_one_entry_mode_required(self, client):
        sid = make_session(client)
        both = client.post(
            f"/api/sessions/{sid}/interviews",
            json={"interview_id": "I1", "code_ids": ["A"], "new_codes": 1},
        )
        neither = client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1"})
        assert both.status_code == 422
        assert neither.status_code == 422

    def test_reserved_auto_prefix_rejected(self, client):
        sid = make_session(client)
        response = client.post(
            f"/api/sessions/{sid}/interviews",
            json={"interview_id": "I1", "code_ids": ["auto:1:1"]},
        )
        assert response.status_code == 422
        assert "auto:" in response.json()["message"]

    def test_front_loaded_sequence_reaches_published_values(self, client):
        sid = make_session(client)
        for j, codes in enumerate(FRONT_LOADED_CODES, start=1):
            response = client.post(
                f"/api/sessions/{sid}/interviews", json={"interview_id": f"I{j}", "code_ids": codes}
            )
            assert response.status_code == 200
        final = response.json()["curve"]["points"][-1]
        assert final["S"] == pytest.approx(0.5, rel=1e-12)
        assert final["ci_low"] == pytest.approx(0.2690273550635448, rel=1e-12)
        assert final["ci_high"] == pytest.approx(0.9292735303476833, rel=1e-12)
        rules = response.json()["stopping_rules"]
        assert rules["first_zero"] == {"stopped": True, "stop_seq": 6}
        assert rules["consecutive_zero(3)"] == {"stopped": True, "stop_seq": 8}
        assert rules["ten_plus_three"] == {"stopped": True, "stop_seq": 10}


class TestUndo:
    def test_round_trip(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        before = client.get(f"/api/sessions/{sid}").json()
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I2", "code_ids": ["B"]})
        after_undo = client.post(f"/api/sessions/{sid}/undo").json()
        assert after_undo == before

    def test_two_appends_one_undo(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I2", "code_ids": ["B"]})
        doc = client.post(f"/api/sessions/{sid}/undo").json()
        assert len(doc["interviews"]) == 1

    def test_undo_empty_conflict(self, client):
        sid = make_session(client)
        response = client.post(f"/api/sessions/{sid}/undo")
        assert response.status_code == 409
        assert response.json()["code"] == "conflict"

    def test_interview_id_reusable_after_undo(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        client.post(f"/api/sessions/{sid}/undo")
        response = client.post(
            f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["B"]}
        )
        assert response.status_code == 200


class TestWhatIf:
    def test_empty_pattern_equals_current_state(self, client):
        sid = make_session(client)
        for j, codes in enumerate(FRONT_LOADED_CODES, start=1):
            client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": f"I{j}", "code_ids": codes})
        state = client.get(f"/api/sessions/{sid}").json()
        projection = client.post(f"/api/sessions/{sid}/whatif", json={"pattern": []}).json()
        final = state["curve"]["points"][-1]
        assert projection["km_final"] == final["S"]
        assert projection["ci_low"] == final["ci_low"]
        assert projection["ci_high"] == final["ci_high"]
        # The projected curve for an empty pattern is the realized curve,
        # point for point, so clients can overlay without recomputing.
        assert projection["curve"] == state["curve"]

    def test_zero_tail_projection(self, client):
        sid = make_session(client)
        for j in range(1, 6):
            client.post(
                f"/api/sessions/{sid}/interviews", json={"interview_id": f"I{j}", "code_ids": [f"c{j}"]}
            )
        projection = client.post(
            f"/api/sessions/{sid}/whatif", json={"pattern": [0, 0, 0, 0, 0]}
        ).json()
        assert projection["km_final"] == pytest.approx(0.5, rel=1e-12)
        assert projection["pattern"] == [1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
        assert projection["realized_interviews"] == 5
        assert projection["hypothetical_interviews"] == 5
        assert len(projection["curve"]["points"]) == 10
        assert projection["curve"]["points"][-1]["S"] == pytest.approx(0.5, rel=1e-12)

    def test_non_binary_pattern_rejected(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        response = client.post(f"/api/sessions/{sid}/whatif", json={"pattern": [2]})
        assert response.status_code == 422

    def test_whatif_never_mutates(self, client, tmp_path):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        before = client.get(f"/api/sessions/{sid}").json()
        first = client.post(f"/api/sessions/{sid}/whatif", json={"pattern": [0, 1]}).json()
        second = client.post(f"/api/sessions/{sid}/whatif", json={"pattern": [0, 1]}).json()
        assert first == second
        assert client.get(f"/api/sessions/{sid}").json() == before

    def test_empty_session_empty_pattern_rejected(self, client):
        sid = make_session(client)
        response = client.post(f"/api/sessions/{sid}/whatif", json={"pattern": []})
        assert response.status_code == 422

    def test_methods_subset(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        projection = client.post(
            f"/api/sessions/{sid}/whatif",
            json={"pattern": [0], "methods": ["rule_completion"], "rule_k": 2},
        ).json()
        assert projection["additional_interviews"] == {"rule_completion": 1}


class TestExport:
    def test_csv_round_trips_through_parser(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A", "B"]})
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I2", "code_ids": ["A", "C"]})
        response = client.get(f"/api/sessions/{sid}/export?format=csv")
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/csv")
        matrix = parse_wide(response.text)
        assert derive_sequence(matrix).new_codes == (2, 1)

    def test_json_export_equals_get(self, client):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A"]})
        assert (
            client.get(f"/api/sessions/{sid}/export?format=json").json()
            == client.get(f"/api/sessions/{sid}").json()
        )

    def test_unknown_format_rejected(self, client):
        sid = make_session(client)
        response = client.get(f"/api/sessions/{sid}/export?format=xml")
        assert response.status_code == 422

    def test_empty_session_csv(self, client):
        sid = make_session(client)
        response = client.get(f"/api/sessions/{sid}/export?format=csv")
        assert response.text == "interview_id,seq\n"


class TestReplayAndRestart:
    def test_offline_replay_after_each_operation(self, client, tmp_path):
        sid = make_session(client)
        for j, codes in enumerate(FRONT_LOADED_CODES[:6], start=1):
            client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": f"I{j}", "code_ids": codes})
            assert_replay_equal(client, tmp_path, sid)
        client.post(f"/api/sessions/{sid}/undo")
        assert_replay_equal(client, tmp_path, sid)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "IC", "new_codes": 2})
        assert_replay_equal(client, tmp_path, sid)

    def test_restart_preserves_state(self, client, tmp_path):
        sid = make_session(client)
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I1", "code_ids": ["A", "B"]})
        client.post(f"/api/sessions/{sid}/interviews", json={"interview_id": "I2", "new_codes": 0})
        before = client.get(f"/api/sessions/{sid}").json()
        fresh = TestClient(create_app(tmp_path / "sessions"))
        assert fresh.get(f"/api/sessions/{sid}").json() == before

    def test_scripted_random_sessions(self, client, tmp_path):
        rng = random.Random(31337)
        for script in range(3):
            sid = make_session(client, name=f"script{script}")
            appended = 0
            entries = 0
            for op in range(rng.randint(10, 30)):
                if entries > 0 and rng.random() < 0.3:
                    assert client.post(f"/api/sessions/{sid}/undo").status_code == 200
                    entries -= 1
                elif rng.random() < 0.25:
                    count = rng.randint(0, 3)
                    appended += 1
                    assert (
                        client.post(
                            f"/api/sessions/{sid}/interviews",
                            json={"interview_id": f"N{appended}", "new_codes": count},
                        ).status_code
                        == 200
                    )
                    entries += 1
                else:
                    pool = [f"code{k}" for k in range(8)]
                    codes = rng.sample(pool, rng.randint(0, 4))
                    appended += 1
                    assert (
                        client.post(
                            f"/api/sessions/{sid}/interviews",
                            json={"interview_id": f"N{appended}", "code_ids": codes},
                        ).status_code
                        == 200
                    )
                    entries += 1
                assert_replay_equal(client, tmp_path, sid)
            # Survives a restart at whatever point the script ended.
            before = client.get(f"/api/sessions/{sid}").json()
            fresh = TestClient(create_app(tmp_path / "sessions"))
            assert fresh.get(f"/api/sessions/{sid}").json() == before


class TestConcurrency:
    def test_parallel_appends_serialize(self, tmp_path):
        client = TestClient(create_app(tmp_path / "sessions"))
        sid = make_session(client)
        errors = []

        def append(k):
            try:
                response = client.post(
                    f"/api/sessions/{sid}/interviews",
                    json={"interview_id": f"T{k}", "code_ids": [f"c{k}"]},
                )
                if response.status_code != 200:
                    errors.append(response.status_code)
            except Exception as exc:
                errors.append(exc)

        threads = [threading.Thread(target=append, args=(k,)) for k in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        doc = client.get(f"/api/sessions/{sid}").json()
        assert len(doc["interviews"]) == 8
