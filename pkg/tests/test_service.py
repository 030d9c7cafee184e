"""HTTP contract of the service layer.

The endpoints are pure functions of their payloads, so the tests pin exact
response shapes: analytic values against the frozen reference-network
numbers, 400 for domain validation errors, 500 for numerical failures, 422
for malformed payloads, and determinism of simulation responses.
"""

import math

import pytest
from fastapi.testclient import TestClient

import nomalab
from conftest import ANCHOR_PICO, MU
from nomalab.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def _network(pico=ANCHOR_PICO, *, user_intensity=MU, group_size=2):
    return {
        "tiers": [
            {"power": 20.0, "intensity": 1e-6},
            {"power": 5.0, "intensity": pico},
        ],
        "user_intensity": user_intensity,
        "alpha": 4.0,
        "group_size": group_size,
        "sir_threshold": 1.0,
    }


def _metrics_body(tier=1, scheme="non_coordinated", alloc=(0.25, 0.75), **net_kw):
    return {
        "network": _network(**net_kw),
        "alloc": list(alloc),
        "tier": tier,
        "scheme": scheme,
    }


# ---------------------------------------------------------------------------
# meta endpoints


def test_health(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "version": nomalab.__version__}


def test_recipe_listing(client):
    assert client.get("/recipes").json() == {
        "recipes": ["fig1", "fig2", "fig3", "fig4"]
    }
    detail = client.get("/recipes/fig1").json()
    assert detail["name"] == "fig1"
    assert detail["alloc"] == [0.25, 0.75]
    assert detail["trials"] == 100_000
    assert detail["sweep"]["variable"] == "lambda_2"

    missing = client.get("/recipes/fig9")
    assert missing.status_code == 404
    assert missing.json() == {"detail": "unknown recipe 'fig9'", "error_type": "spec"}


# ---------------------------------------------------------------------------
# analytics endpoints against frozen reference values


def test_derived_stats_endpoint(client):
    body = client.post("/network/derived-stats", json={"network": _network()}).json()
    assert body["cell_load"] == pytest.approx([1.232249735946485] * 2, rel=1e-12)
    assert body["nonvoid_prob"] == pytest.approx([0.6520624024720373] * 2, rel=1e-12)
    assert body["assoc_prob"] == pytest.approx(
        [0.0024644994718929698, 0.997535500528107], rel=1e-12
    )
    assert body["scaled_total_intensity"] == pytest.approx(
        0.0004057619047619048, rel=1e-12
    )


def test_coverage_endpoint(client):
    body = client.post("/analytics/coverage", json=_metrics_body(tier=1)).json()
    assert body["per_user"] == pytest.approx(
        [0.795410524198013, 0.6809349868182543], rel=1e-12
    )
    assert body["cell"] == pytest.approx(0.7381727555081337, rel=1e-12)

    jt = client.post(
        "/analytics/coverage", json=_metrics_body(tier=1, scheme="coordinated_jt")
    ).json()
    assert jt["per_user"] == pytest.approx(
        [0.795410524198013, 0.9056983165607728], rel=1e-12
    )
    assert jt["cell"] == pytest.approx(0.8505544203793929, rel=1e-12)


def test_throughput_endpoint(client):
    body = client.post("/analytics/throughput", json=_metrics_body(tier=1)).json()
    assert body["per_user"] == pytest.approx(
        [2.9912862475924697, 0.8706586858018832], rel=1e-12
    )
    assert body["cell"] == pytest.approx(3.488559369592531, rel=1e-12)
    assert body["single_user"] == pytest.approx(2.8755506520317113, rel=1e-12)


def test_cell_metrics_endpoint(client):
    body = client.post("/analytics/cell-metrics", json=_metrics_body(tier=2)).json()
    assert body == {
        "cell_coverage": pytest.approx(0.4739383644146795, rel=1e-12),
        "cell_throughput": pytest.approx(2.240697364755621, rel=1e-12),
        "single_user_throughput": pytest.approx(1.8753409957688232, rel=1e-12),
    }


def test_feasibility_endpoint(client):
    ok = client.post(
        "/allocations/feasibility",
        json={"alloc": [0.25, 0.75], "theta": 1.0, "scheme": "non_coordinated"},
    ).json()
    assert ok == {"feasible": True, "violation": None}
    bad = client.post(
        "/allocations/feasibility",
        json={"alloc": [0.5, 0.5], "theta": 1.0, "scheme": "non_coordinated"},
    ).json()
    assert bad == {
        "feasible": False,
        "violation": "user 2 decode margin: beta[2] > theta * sum(beta[1..1]) (slack 0)",
    }


def test_optimize_endpoint(client):
    body = client.post(
        "/optimize",
        json={
            "network": _network(MU),
            "tier": 1,
            "scheme": "non_coordinated",
            "objective": "cell_coverage",
            "method": "grid",
            "resolution": 0.01,
        },
    ).json()
    assert body == {
        "best_alloc": [0.21, 0.79],
        "best_value": pytest.approx(0.7626088318853135, rel=1e-12),
        "evaluations": 49,
        "method": "grid",
    }


# ---------------------------------------------------------------------------
# simulation endpoint


def test_simulate_shape_and_determinism(client):
    payload = {
        "network": _network(),
        "alloc": [0.25, 0.75],
        "tier": 2,
        "scheme": "non_coordinated",
        "trials": 300,
        "seed": 9,
    }
    first = client.post("/simulate", json=payload).json()
    again = client.post("/simulate", json=payload).json()
    assert first == again
    assert first["trials"] == 300 and first["seed"] == 9
    assert first["mode"] == "fast_path" and first["scheme"] == "non_coordinated"
    assert first["coverage"]["n_samples"] == [300, 300]
    assert all(0.0 <= p <= 1.0 for p in first["coverage"]["per_user"])
    assert all(n <= 300 for n in first["throughput"]["n_samples"])
    for block in (first["coverage"], first["throughput"]):
        for value in block["per_user"] + block["ci95_halfwidth"]:
            assert value is None or math.isfinite(value)


def test_simulate_degenerate_split_returns_nulls(client):
    body = client.post(
        "/simulate",
        json={
            "network": _network(),
            "alloc": [0.5, 0.5],
            "tier": 2,
            "scheme": "non_coordinated",
            "trials": 500,
            "seed": 2,
        },
    ).json()
    assert body["coverage"]["per_user"] == [0.0, 0.0]
    # user 1 never decodes, so its conditional throughput is null
    assert body["throughput"]["per_user"][0] is None
    assert body["throughput"]["n_samples"][0] == 0


# ---------------------------------------------------------------------------
# experiments endpoint


def test_experiments_run_recipe(client):
    body = client.post(
        "/experiments/run",
        json={"recipe": "fig1", "trials": 200, "seed": 1, "jobs": 2},
    ).json()
    assert body["name"] == "fig1"
    assert len(body["rows"]) == 8 * 2 * 2 * 2
    assert body["warnings"] == []
    assert body["sidecar"]["trials"] == 200
    assert body["sidecar"]["seed"] == 1
    assert body["sidecar"]["point_seed_rule"] == (
        "SeedSequence(entropy=seed, spawn_key=(point_index,))"
    )


def test_experiments_run_inline_spec(client):
    spec = {
        "name": "inline",
        "network": _network(MU),
        "sweep": {"variable": "lambda_2", "values": [2e-4, 5e-4]},
        "alloc": [0.25, 0.75],
        "sources": ["analytic"],
    }
    body = client.post("/experiments/run", json={"spec": spec}).json()
    assert body["name"] == "inline"
    assert len(body["rows"]) == 2 * 2 * 2  # points x tiers x users


def test_experiments_run_requires_exactly_one_source(client):
    neither = client.post("/experiments/run", json={})
    assert neither.status_code == 400
    assert neither.json() == {
        "detail": "provide exactly one of 'recipe' or 'spec'",
        "error_type": "spec",
    }
    both = client.post(
        "/experiments/run", json={"recipe": "fig1", "spec": {"name": "x"}}
    )
    assert both.status_code == 400

    unknown = client.post("/experiments/run", json={"recipe": "fig9"})
    assert unknown.status_code == 400
    assert unknown.json()["error_type"] == "spec"


# ---------------------------------------------------------------------------
# error mapping


def test_tier_out_of_range_maps_to_400(client):
    resp = client.post("/analytics/coverage", json=_metrics_body(tier=5))
    assert resp.status_code == 400
    assert resp.json() == {"detail": "tier 5 out of range 1..2", "error_type": "spec"}


def test_domain_validation_maps_to_400(client):
    resp = client.post(
        "/analytics/coverage", json=_metrics_body(alloc=(0.75, 0.25))
    )
    assert resp.status_code == 400
    assert resp.json()["error_type"] == "spec"


def test_numeric_failure_maps_to_500(client):
    # a vanishing user density makes the sole-user tail integral diverge
    resp = client.post(
        "/analytics/throughput",
        json=_metrics_body(user_intensity=1e-110),
    )
    assert resp.status_code == 500
    assert resp.json()["error_type"] == "numeric"


def test_retry_budget_maps_to_500(client):
    resp = client.post(
        "/simulate",
        json={
            "network": {
                "tiers": [{"power": 1.0, "intensity": 1e-4}],
                "user_intensity": 1e-8,
                "alpha": 4.0,
                "group_size": 1,
                "sir_threshold": 1.0,
            },
            "alloc": [1.0],
            "tier": 1,
            "scheme": "non_coordinated",
            "mode": "full_network",
            "trials": 4,
            "seed": 0,
            "window_radius": 300.0,
            "retry_budget": 5,
        },
    )
    assert resp.status_code == 500
    body = resp.json()
    assert body["error_type"] == "numeric"
    assert "failed to collect" in body["detail"]


def test_payload_validation_maps_to_422(client):
    # missing required field
    assert client.post("/analytics/coverage", json={}).status_code == 422
    # extra fields are forbidden
    bad = _metrics_body()
    bad["surprise"] = 1
    assert client.post("/analytics/coverage", json=bad).status_code == 422
    # bad literal
    assert (
        client.post("/analytics/coverage", json=_metrics_body(scheme="tdma")
    ).status_code) == 422
    # out-of-range scalar
    neg = _metrics_body()
    neg["network"]["tiers"][0]["power"] = -1.0
    assert client.post("/analytics/coverage", json=neg).status_code == 422
    # trials above the cap
    sim = {
        "network": _network(),
        "alloc": [0.25, 0.75],
        "tier": 1,
        "scheme": "non_coordinated",
        "trials": 3_000_000,
        "seed": 0,
    }
    assert client.post("/simulate", json=sim).status_code == 422
