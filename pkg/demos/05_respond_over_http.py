"""Exercise the call-and-response REST endpoint in-process.

Shows the wire format both ways, the seeded-determinism guarantee, and
the error codes returned for malformed or out-of-range calls. Uses the
FastAPI test client, so no network port is needed; `touchjam serve`
exposes the same app over real HTTP.

Run:  python3 demos/05_respond_over_http.py
"""

import json

from fastapi.testclient import TestClient

from touchjam.model import Model, ModelConfig
from touchjam.service import create_app


def main():
    model = Model.build(ModelConfig(layer_count=1, units=16, mixtures=4), seed=2)
    client = TestClient(create_app(model=model))

    print("GET /health ->", client.get("/health").json())
    print("GET /api/v1/model ->", client.get("/api/v1/model").json())

    body = {
        "performance": {
            "version": 1,
            "events": [
                {"x": 0.2, "y": 0.3, "t": 0.0, "moving": False},
                {"x": 0.4, "y": 0.5, "t": 0.3, "moving": True},
            ],
        },
        "seed": 42,
        "current_mapping": "drums",
    }
    r = client.post("/api/v1/respond", json=body)
    reply = r.json()
    print(f"\nPOST /api/v1/respond -> {r.status_code}, mapping={reply['mapping']!r}, "
          f"{len(reply['response']['events'])} events")
    print("first events:", json.dumps(reply["response"]["events"][:3]))

    again = client.post("/api/v1/respond", json=body)
    print("same seed, byte-identical body:", r.content == again.content)

    bad = dict(body, performance={"version": 1, "events": [{"x": 2.0, "y": 0.1, "t": 0.0}]})
    r = client.post("/api/v1/respond", json=bad)
    print(f"out-of-range call -> {r.status_code} {r.json()['error_code']}")

    r = client.post("/api/v1/respond", content=b"{nope",
                    headers={"content-type": "application/json"})
    print(f"malformed JSON -> {r.status_code} {r.json()['error_code']}")


if __name__ == "__main__":
    main()
