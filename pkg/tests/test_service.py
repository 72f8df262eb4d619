"""HTTP service: lifecycle, idempotency, persistence, concurrency."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from bandit_tutor.service import create_app
from bandit_tutor.session import start_session

from conftest import build_curriculum


@pytest.fixture
def curriculum():
    return build_curriculum(
        {
            "s1": {
                "c1": {"problems": [("easy", 1.0), ("mid", 3.0), ("hard", 5.0)]},
                "c2": {"prereqs": ["c1"], "problems": [("b1", 3.0)]},
            }
        }
    )


@pytest.fixture
def client(curriculum, tmp_path):
    app = create_app(curriculum, data_dir=tmp_path / "data", curriculum_id="demo")
    with TestClient(app) as client:
        yield client


def create(client, seed=1234, section="s1"):
    response = client.post(
        "/api/sessions",
        json={"curriculum_id": "demo", "section_id": section, "seed": seed},
    )
    assert response.status_code == 201
    return response.json()


def answer_correctly(client, sid, problem):
    # conftest curricula always put the right answer at index 0
    return client.post(
        f"/api/sessions/{sid}/answer",
        json={"problem_id": problem, "choice_index": 0},
    )


class TestDescribeCurriculum:
    def test_sections_listed_without_sensitive_fields(self, client):
        body = client.get("/api/curriculum").json()
        assert body["curriculum_id"] == "demo"
        assert [s["id"] for s in body["sections"]] == ["s1"]
        assert "difficulty" not in body and "correct" not in str(body)


class TestStaticUi:
    def test_ui_served_at_root(self, curriculum, tmp_path):
        ui_dir = tmp_path / "ui"
        ui_dir.mkdir()
        (ui_dir / "index.html").write_text("<html><body>quiz</body></html>")
        app = create_app(
            curriculum, data_dir=tmp_path / "data", curriculum_id="demo",
            ui_dir=ui_dir,
        )
        with TestClient(app) as client:
            response = client.get("/")
            assert response.status_code == 200
            assert "quiz" in response.text
            # API still takes precedence over the static mount
            assert client.get("/api/curriculum").status_code == 200


class TestCreateSession:
    def test_create_returns_progress_and_seed(self, client):
        body = create(client)
        assert body["seed"] == 1234
        beliefs = {c["concept_id"]: c["belief"] for c in body["progress"]["concepts"]}
        assert beliefs == {"c1": "unlocked_unmastered", "c2": "locked"}

    def test_server_generates_seed_when_omitted(self, client):
        response = client.post(
            "/api/sessions", json={"curriculum_id": "demo", "section_id": "s1"}
        )
        assert response.status_code == 201
        assert isinstance(response.json()["seed"], int)

    def test_unknown_section_404(self, client):
        response = client.post(
            "/api/sessions", json={"curriculum_id": "demo", "section_id": "zzz"}
        )
        assert response.status_code == 404

    def test_unknown_curriculum_404(self, client):
        response = client.post(
            "/api/sessions", json={"curriculum_id": "other", "section_id": "s1"}
        )
        assert response.status_code == 404

    def test_malformed_body_400(self, client):
        response = client.post("/api/sessions", json={"curriculum_id": "demo"})
        assert response.status_code == 400
        response = client.post(
            "/api/sessions",
            content=b"not json",
            headers={"content-type": "application/json"},
        )
        assert response.status_code == 400


class TestNext:
    def test_idempotent_while_outstanding(self, client):
        sid = create(client)["session_id"]
        first = client.get(f"/api/sessions/{sid}/next").json()
        second = client.get(f"/api/sessions/{sid}/next").json()
        assert first == second
        assert set(first) == {"concept_id", "problem_id", "prompt", "choices"}

    def test_unknown_session_404(self, client):
        assert client.get("/api/sessions/ghost/next").status_code == 404

    def test_complete_session_409_with_progress(self, client):
        sid = create(client)["session_id"]
        while True:
            rec = client.get(f"/api/sessions/{sid}/next")
            if rec.status_code == 409:
                break
            done = answer_correctly(client, sid, rec.json()["problem_id"]).json()
            if done["complete"]:
                break
        response = client.get(f"/api/sessions/{sid}/next")
        assert response.status_code == 409
        assert response.json()["progress"]["complete"] is True

    def test_new_problem_after_correct_answer(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()
        answer_correctly(client, sid, rec["problem_id"])
        following = client.get(f"/api/sessions/{sid}/next").json()
        assert following["problem_id"] != rec["problem_id"]


class TestAnswer:
    def test_correct_answer_flow(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()
        response = answer_correctly(client, sid, rec["problem_id"])
        assert response.status_code == 200
        body = response.json()
        assert body["correct"] is True
        assert body["problem_mastered"] is True

    def test_wrong_choice_marked_incorrect(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()
        response = client.post(
            f"/api/sessions/{sid}/answer",
            json={"problem_id": rec["problem_id"], "choice_index": 1},
        )
        assert response.json()["correct"] is False

    def test_non_recommended_problem_409(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()
        other = next(p for p in ("easy", "mid", "hard") if p != rec["problem_id"])
        response = client.post(
            f"/api/sessions/{sid}/answer",
            json={"problem_id": other, "choice_index": 0},
        )
        assert response.status_code == 409

    def test_duplicate_answer_409(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()
        assert answer_correctly(client, sid, rec["problem_id"]).status_code == 200
        assert answer_correctly(client, sid, rec["problem_id"]).status_code == 409

    def test_bad_choice_index_400(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()
        response = client.post(
            f"/api/sessions/{sid}/answer",
            json={"problem_id": rec["problem_id"], "choice_index": 5},
        )
        assert response.status_code == 400

    def test_single_problem_concept_masters_end_to_end(self, client):
        sid = create(client)["session_id"]
        while True:
            rec = client.get(f"/api/sessions/{sid}/next").json()
            body = answer_correctly(client, sid, rec["problem_id"]).json()
            if rec["concept_id"] == "c2":
                beliefs = {
                    c["concept_id"]: c["belief"]
                    for c in body["progress"]["concepts"]
                }
                assert beliefs["c2"] == "mastered"  # one problem, bank exhausted
                break
            if body["complete"]:
                break


class TestState:
    def test_fresh_multipliers_on_difficulty_bell(self, client):
        sid = create(client)["session_id"]
        state = client.get(f"/api/sessions/{sid}/state").json()
        multipliers = {
            p["problem_id"]: p["multiplier"] for p in state["problems"]["c1"]
        }
        side = math.exp(-4.0 / 7.37)
        assert multipliers["easy"] == pytest.approx(side, abs=1e-12)
        assert multipliers["mid"] == 1.0
        assert multipliers["hard"] == pytest.approx(side, abs=1e-12)

    def test_rank_shift_visible_after_answer(self, client):
        sid = create(client)["session_id"]
        while True:  # drive until the mid problem is recommended, then answer it
            rec = client.get(f"/api/sessions/{sid}/next").json()
            before = {
                p["problem_id"]: p["multiplier"]
                for p in client.get(f"/api/sessions/{sid}/state").json()["problems"]["c1"]
            }
            answer_correctly(client, sid, rec["problem_id"])
            if rec["problem_id"] == "mid":
                break
        after = {
            p["problem_id"]: p["multiplier"]
            for p in client.get(f"/api/sessions/{sid}/state").json()["problems"]["c1"]
        }
        assert after["hard"] == pytest.approx(before["hard"] * 1.3, rel=1e-12)
        assert after["easy"] == pytest.approx(before["easy"] / 1.3, rel=1e-12)

    def test_state_is_stable_across_gets(self, client):
        sid = create(client)["session_id"]
        client.get(f"/api/sessions/{sid}/next")
        a = client.get(f"/api/sessions/{sid}/state").json()
        b = client.get(f"/api/sessions/{sid}/state").json()
        assert a == b

    def test_unknown_session_404(self, client):
        assert client.get("/api/sessions/ghost/state").status_code == 404


class TestPersistence:
    def test_crash_restart_resumes_identically(self, curriculum, tmp_path):
        data_dir = tmp_path / "data"
        answers = [0, 1, 0, 1, 1]

        def drive(client, sid, raw_answers):
            seen = []
            for raw in raw_answers:
                rec = client.get(f"/api/sessions/{sid}/next").json()
                seen.append(rec["problem_id"])
                client.post(
                    f"/api/sessions/{sid}/answer",
                    json={
                        "problem_id": rec["problem_id"],
                        "choice_index": 0 if raw else 1,
                    },
                )
            return seen

        with TestClient(create_app(curriculum, data_dir, "demo")) as client:
            sid = create(client, seed=77)["session_id"]
            first_half = drive(client, sid, answers[:3])
            outstanding = client.get(f"/api/sessions/{sid}/next").json()

        # "crash": a brand-new app instance over the same data directory
        with TestClient(create_app(curriculum, data_dir, "demo")) as client:
            resumed = client.get(f"/api/sessions/{sid}/next").json()
            assert resumed == outstanding
            second_half = drive(client, sid, answers[3:])

        # reference run without the crash
        with TestClient(
            create_app(curriculum, tmp_path / "data2", "demo")
        ) as client:
            sid2 = create(client, seed=77)["session_id"]
            reference = drive(client, sid2, answers)
        assert first_half + second_half == reference

    def test_concurrent_answers_exactly_one_succeeds(self, client):
        sid = create(client)["session_id"]
        rec = client.get(f"/api/sessions/{sid}/next").json()

        def submit(_):
            return client.post(
                f"/api/sessions/{sid}/answer",
                json={"problem_id": rec["problem_id"], "choice_index": 0},
            ).status_code

        with ThreadPoolExecutor(max_workers=8) as pool:
            codes = list(pool.map(submit, range(8)))
        assert sorted(codes) == [200] + [409] * 7

    def test_service_adds_no_stochasticity(self, client, curriculum):
        """Scripted replay through the API equals a direct engine run."""
        seed = 4242
        raw_answers = [1, 0, 1, 1, 0, 1, 1, 1, 1, 1, 1]
        sid = create(client, seed=seed)["session_id"]
        for raw in raw_answers:
            rec = client.get(f"/api/sessions/{sid}/next")
            if rec.status_code == 409:
                break
            client.post(
                f"/api/sessions/{sid}/answer",
                json={
                    "problem_id": rec.json()["problem_id"],
                    "choice_index": 0 if raw else 1,
                },
            )
        service_log = client.get(f"/api/sessions/{sid}/state").json()["log"]

        session = start_session(curriculum, "s1", seed=seed)
        for raw in raw_answers:
            if session.complete:
                break
            rec = session.next_recommendation()
            session.record_answer(rec.problem_id, raw, now=0.0)
        engine_log = session.log
        # timestamps are caller-supplied by design; compare everything else
        assert [tuple(e[1:]) for e in service_log] == [
            tuple(e[1:]) for e in engine_log
        ]
