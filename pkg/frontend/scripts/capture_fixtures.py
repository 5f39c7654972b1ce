"""Record real API traffic into the walkthrough fixture.

Drives the backend in-process and writes every exchange (method, path,
request body, status, response body) to tests/fixtures/walkthrough.json.
The frontend test suite replays that script through a mocked fetch, so
every number the UI tests assert on originated from the live service.

Run from the frontend directory:

    python3 scripts/capture_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from satkm.service import create_app

FRONT_LOADED_INTERVIEWS = [
    ("INT-01", ["sleep quality", "daytime fatigue", "appetite loss", "mobility"]),
    ("INT-02", ["pain flare", "concentration", "social withdrawal"]),
    ("INT-03", ["medication side effects"]),
    ("INT-04", ["work absence", "financial strain"]),
    ("INT-05", ["mood swings"]),
    ("INT-06", []),
    ("INT-07", []),
    ("INT-08", []),
    ("INT-09", []),
    ("INT-10", []),
]

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "walkthrough.json"


def main() -> None:
    client = TestClient(create_app(tempfile.mkdtemp()))
    exchanges = []

    def record(method: str, path: str, body=None):
        if method == "GET":
            response = client.get(path)
        else:
            response = client.post(path, json=body)
        exchanges.append(
            {
                "method": method,
                "path": path,
                "body": body,
                "status": response.status_code,
                "response": response.json(),
            }
        )
        return response.json()

    # Front-loaded session: all new codes arrive in the first five
    # interviews, then five that elicit nothing new.
    created = record("POST", "/api/sessions", {"name": "front-loaded demo", "alpha": 0.05})
    sid = created["session_id"]
    for interview_id, codes in FRONT_LOADED_INTERVIEWS:
        record(
            "POST",
            f"/api/sessions/{sid}/interviews",
            {"interview_id": interview_id, "code_ids": codes},
        )
    record("GET", f"/api/sessions/{sid}")
    record("POST", f"/api/sessions/{sid}/whatif", {"pattern": []})
    record("POST", f"/api/sessions/{sid}/whatif", {"pattern": [0, 0]})

    # Error shapes the UI must surface inline.
    record(
        "POST",
        f"/api/sessions/{sid}/interviews",
        {"interview_id": "INT-10", "code_ids": ["anything"]},
    )
    record("POST", f"/api/sessions/{sid}/whatif", {"pattern": [2]})
    record("GET", "/api/sessions/missing")
    record("POST", f"/api/sessions/{sid}/undo")

    # Second session: five code-bearing interviews, then ask what five
    # empty ones would do.
    second = record("POST", "/api/sessions", {"name": "projection demo", "alpha": 0.05})
    sid2 = second["session_id"]
    for j in range(1, 6):
        record(
            "POST",
            f"/api/sessions/{sid2}/interviews",
            {"interview_id": f"P-{j}", "code_ids": [f"theme {j}"]},
        )
    record("POST", f"/api/sessions/{sid2}/whatif", {"pattern": [0, 0, 0, 0, 0]})

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"exchanges": exchanges}, indent=1) + "\n")
    print(f"wrote {OUT} ({len(exchanges)} exchanges)")


if __name__ == "__main__":
    main()
