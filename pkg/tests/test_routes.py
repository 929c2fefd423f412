import pytest

from qftverify.exceptions import InvalidParameterError
from qftverify.main import create_app
from qftverify.routes import channels


@pytest.fixture
def client():
    app = create_app()
    app.config.update(TESTING=True)
    return app.test_client()


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.get_json() == {"status": "ok"}


def test_run_demo_suite(client, demo_config):
    response = client.post("/suites/run", json=demo_config)
    assert response.status_code == 200
    body = response.get_json()
    assert body["suite"] == "adversarial_demo"
    assert body["all_passed"] is True
    assert body["summary"]["total"] == 5


def test_run_reports_config_errors(client, demo_config):
    del demo_config["seed"]
    response = client.post("/suites/run", json=demo_config)
    assert response.status_code == 422
    assert {"loc": "seed", "msg": "Field required"} in response.get_json()["errors"]


def test_run_needs_a_body(client):
    response = client.post("/suites/run", data="not json", content_type="text/plain")
    assert response.status_code == 422


def test_closeness_endpoint(client):
    response = client.post("/channels/closeness", json={"kind": "depolarized", "n": 2, "p": 0.1})
    assert response.status_code == 200
    body = response.get_json()
    assert body["s3"] == pytest.approx(0.90625, abs=1e-12)
    assert body["t3"] is None


def test_closeness_forward_side(client):
    response = client.post(
        "/channels/closeness", json={"id": "f", "kind": "perturbed_unitary", "n": 2, "eps": 0.1, "target": "forward"}
    )
    body = response.get_json()
    assert response.status_code == 200
    assert body["s1"] is None
    assert 0.0 < body["t3"] <= 1.0


def test_closeness_rejects_bad_spec(client):
    response = client.post("/channels/closeness", json={"kind": "bogus", "n": 2})
    assert response.status_code == 422
    assert any(err["loc"] == "kind" for err in response.get_json()["errors"])


def test_domain_errors_are_bad_requests(client, monkeypatch):
    def broken(spec):
        raise InvalidParameterError("strength out of range")

    monkeypatch.setattr(channels, "build_channel", broken)
    response = client.post("/channels/closeness", json={"kind": "depolarized", "n": 2, "p": 0.1})
    assert response.status_code == 400
    assert response.get_json()["type"] == "InvalidParameterError"
