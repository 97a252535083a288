"""Session service: HTTP endpoints, move legality, streaming, RLE overlays."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from seglab.grid import Grid2D
from seglab.scene import SceneDescription
from seglab.server import create_app, rle_decode, rle_encode
from seglab.strategies import GameContext, GameState


@pytest.fixture()
def client():
    return TestClient(create_app())


def body_for(scene, pursuers, evaders, controller="stationary", **extra):
    payload = {"scene": scene.to_json(), "m": 16, "controller": controller,
               "start": {"pursuers": pursuers, "evaders": evaders}}
    payload.update(extra)
    return payload


@pytest.fixture()
def session(client, circle_scene):
    view = client.post("/sessions", json=body_for(
        circle_scene, [[8, 2]], [[10, 7]])).json()
    return view["id"]


class TestRunLength:
    def test_round_trips_any_mask(self, rng):
        mask = rng.random(256) < 0.3
        runs = rle_encode(mask)
        assert np.array_equal(rle_decode(runs, 256), mask)
        assert sum(count for count, _ in runs) == 256
        # runs alternate, so consecutive values always differ
        values = [v for _, v in runs]
        assert all(a != b for a, b in zip(values, values[1:]))

    def test_degenerate_masks(self):
        assert rle_encode(np.zeros(0, dtype=bool)) == []
        assert rle_encode(np.ones(5, dtype=bool)) == [[5, 1]]
        assert rle_encode(np.zeros(4, dtype=bool)) == [[4, 0]]

    def test_decode_checks_coverage(self):
        with pytest.raises(ValueError):
            rle_decode([[3, 1]], 4)


class TestCreateSession:
    def test_default_start_has_moves_to_offer(self, client, circle_scene):
        resp = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]]))
        assert resp.status_code == 200
        view = resp.json()
        assert view["status"] == "active"
        assert view["turn"] == 0
        assert len(view["valid_moves"]) > 0
        assert view["pursuers"] == [[4, 8]]
        assert view["evaders"] == [[3, 13]]
        assert [3, 13] in view["valid_moves"]

    def test_obstacle_overlay_matches_the_scene(self, client, circle_scene):
        view = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]])).json()
        m = view["m"]
        decoded = rle_decode(view["obstacles"]["rle"], m * m).reshape(m, m)
        ctx = GameContext(circle_scene, Grid2D(m))
        assert np.array_equal(decoded, ~ctx.free)
        shadow = rle_decode(view["shadow"]["rle"], m * m).reshape(m, m)
        assert np.array_equal(shadow, ctx.shadow_mask(((4, 8),)))

    def test_occluded_start_rejected(self, client, circle_scene):
        resp = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[13, 3]]))
        assert resp.status_code == 400
        assert "already occluded" in resp.json()["detail"]

    def test_invalid_start_rejected(self, client, circle_scene):
        inside = client.post("/sessions", json=body_for(
            circle_scene, [[8, 8]], [[3, 13]]))
        assert inside.status_code == 400
        bad_scene = body_for(circle_scene, [[4, 8]], [[3, 13]])
        bad_scene["scene"] = {"shapes": [{"kind": "blob"}]}
        assert client.post("/sessions", json=bad_scene).status_code == 400

    def test_two_pursuers_both_listed(self, client, circle_scene):
        scene = SceneDescription(shapes=circle_scene.shapes, f_p=2.0, f_e=1.0, k_p=2)
        view = client.post("/sessions", json=body_for(
            scene, [[0, 0], [15, 15]], [[2, 13]])).json()
        assert view["pursuers"] == [[0, 0], [15, 15]]

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/999").status_code == 404
        resp = client.post("/sessions/999/moves", json={"cell": [1, 1]})
        assert resp.status_code == 404


class TestSubmitMove:
    def test_legal_move_advances_one_turn(self, client, session):
        view = client.post(f"/sessions/{session}/moves",
                           json={"cell": [10, 6]}).json()
        assert view["turn"] == 1
        assert view["status"] == "active"
        assert view["evaders"] == [[10, 6]]
        assert client.get(f"/sessions/{session}").json() == view

    def test_illegal_cell_rejected_without_side_effects(self, client, session):
        before = client.get(f"/sessions/{session}").json()
        for cell in ([8, 8], [2, 2], [10, 9]):  # obstacle, far away, inside wall
            resp = client.post(f"/sessions/{session}/moves", json={"cell": cell})
            assert resp.status_code == 409
        assert client.get(f"/sessions/{session}").json() == before

    def test_malformed_body_rejected(self, client, session):
        resp = client.post(f"/sessions/{session}/moves", json={"cell": "north"})
        assert resp.status_code == 400
        assert client.post(f"/sessions/{session}/moves", json={}).status_code == 400

    def test_stepping_into_shadow_wins(self, client, session):
        # (10,8) is hidden from the stationary pursuer at (8,2)
        view = client.post(f"/sessions/{session}/moves",
                           json={"cell": [10, 8]}).json()
        assert view["status"] == "evader-won"
        assert view["valid_moves"] == []
        resp = client.post(f"/sessions/{session}/moves", json={"cell": [10, 7]})
        assert resp.status_code == 409
        assert "evader-won" in resp.json()["detail"]

    def test_surviving_the_horizon_loses(self, client, circle_scene):
        view = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]], k_max=1)).json()
        done = client.post(f"/sessions/{view['id']}/moves",
                           json={"cell": [3, 13]}).json()
        assert done["status"] == "pursuer-won"
        assert done["turn"] == 1

    def test_moves_only_come_from_the_published_set(self, client, circle_scene):
        view = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]], controller="distance",
            k_max=50)).json()
        sid = view["id"]
        rng = np.random.default_rng(5)
        for _ in range(6):
            if view["status"] != "active":
                break
            published = [tuple(c) for c in view["valid_moves"]]
            outside = (int(view["evaders"][0][0] + 5) % 16, 15)
            if outside not in published:
                assert client.post(f"/sessions/{sid}/moves",
                                   json={"cell": list(outside)}).status_code == 409
            pick = published[int(rng.integers(len(published)))]
            resp = client.post(f"/sessions/{sid}/moves", json={"cell": list(pick)})
            assert resp.status_code == 200
            view = resp.json()
            assert view["evaders"][0] == list(pick)

    def test_policy_overlay_fills_in_after_a_move(self, client, circle_scene):
        view = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]], controller="distance")).json()
        m = view["m"]
        empty = rle_decode(view["policy"]["rle"], m * m)
        assert not empty.any()
        view = client.post(f"/sessions/{view['id']}/moves",
                           json={"cell": [3, 12]}).json()
        filled = rle_decode(view["policy"]["rle"], m * m)
        assert filled.any()


class TestMoveLogReplay:
    def test_log_replays_to_the_live_state(self, client, circle_scene):
        view = client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]], controller="distance",
            k_max=50)).json()
        sid = view["id"]
        path = [[3, 12], [4, 11], [4, 10], [5, 10]]
        for cell in path:
            view = client.post(f"/sessions/{sid}/moves", json={"cell": cell}).json()
            if view["status"] != "active":
                break
        log = client.get(f"/sessions/{sid}/log").json()["moves"]
        assert [entry["turn"] for entry in log] == list(range(1, len(log) + 1))

        state = GameState(((4, 8),), ((3, 13),))
        for entry in log:
            state = GameState(tuple(tuple(c) for c in entry["pursuer_action"]),
                              (tuple(entry["evader_move"]),), state.turn + 1)
        assert [list(c) for c in state.pursuers] == view["pursuers"]
        assert [list(c) for c in state.evaders] == view["evaders"]
        assert state.turn == view["turn"]


class TestStream:
    def test_pushes_initial_and_per_turn_frames(self, client, session):
        with client.websocket_connect(f"/sessions/{session}/stream") as ws:
            first = json.loads(ws.receive_text())
            assert first == client.get(f"/sessions/{session}").json()
            moved = client.post(f"/sessions/{session}/moves",
                                json={"cell": [10, 6]}).json()
            pushed = json.loads(ws.receive_text())
            assert pushed == moved
            assert pushed["turn"] == 1

    def test_unknown_session_closes(self, client):
        with pytest.raises(Exception):
            with client.websocket_connect("/sessions/999/stream") as ws:
                ws.receive_text()


class TestStaticFrontend:
    def test_mounts_when_directory_exists(self, tmp_path, circle_scene):
        (tmp_path / "index.html").write_text("<html><body>board</body></html>")
        client = TestClient(create_app(frontend_dir=tmp_path))
        resp = client.get("/")
        assert resp.status_code == 200
        assert "board" in resp.text
        # API still routes ahead of the static mount
        assert client.post("/sessions", json=body_for(
            circle_scene, [[4, 8]], [[3, 13]])).status_code == 200

    def test_absent_directory_skips_the_mount(self, client):
        assert client.get("/").status_code == 404
