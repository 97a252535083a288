"""HTTP + WebSocket service for human-vs-AI sessions.

The human drives evader 0; the pursuer team runs a server-side controller.
Move order within a turn: the controller is computed against the PRE-move
state (it cannot see the human's choice for the turn), then the pursuer
move and the human move are applied together and any remaining evaders
answer with the standard rule.  This preserves the engine's pursuers-first
semantics.
"""

from __future__ import annotations

import asyncio
import itertools
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .engine import Controller, make_controller
from .grid import Grid2D
from .scene import SceneDescription
from .strategies import GameContext, GameState, Policy

_ids = itertools.count(1)


def rle_encode(mask: np.ndarray) -> list[list[int]]:
    """Run-length encode a boolean mask, row-major (i outer): [[count, 0|1], ...]."""
    flat = np.asarray(mask, dtype=np.uint8).ravel()
    runs: list[list[int]] = []
    if flat.size == 0:
        return runs
    start = 0
    for k in range(1, flat.size + 1):
        if k == flat.size or flat[k] != flat[start]:
            runs.append([k - start, int(flat[start])])
            start = k
    return runs


def rle_decode(runs: list[list[int]], size: int) -> np.ndarray:
    out = np.zeros(size, dtype=bool)
    pos = 0
    for count, value in runs:
        out[pos:pos + count] = bool(value)
        pos += count
    if pos != size:
        raise ValueError(f"RLE covers {pos} cells, expected {size}")
    return out


@dataclass
class Session:
    id: str
    ctx: GameContext
    controller: Controller
    state: GameState
    k_max: int
    rng: np.random.Generator
    status: str = "active"
    last_policy: Policy | None = None
    move_log: list = dc_field(default_factory=list)
    subscribers: list = dc_field(default_factory=list)
    lock: asyncio.Lock = dc_field(default_factory=asyncio.Lock)

    def policy_mask(self) -> np.ndarray:
        """Cells strongly favored by the controller's last move weights."""
        m = self.ctx.grid.m
        marginal = np.zeros((m, m))
        if self.last_policy is not None:
            for act, w in zip(self.last_policy.support, self.last_policy.weights):
                for cell in act:
                    marginal[cell] += w
        top = marginal.max()
        return marginal >= 0.5 * top if top > 0 else np.zeros((m, m), dtype=bool)

    def valid_moves(self) -> list[tuple[int, int]]:
        if self.status != "active":
            return []
        return self.ctx.action_set(self.state.evaders[0], "evader")

    def view(self) -> dict:
        ctx = self.ctx
        return {
            "id": self.id,
            "m": ctx.grid.m,
            "h": ctx.grid.h,
            "status": self.status,
            "turn": self.state.turn,
            "k_max": self.k_max,
            "pursuers": [list(c) for c in self.state.pursuers],
            "evaders": [list(c) for c in self.state.evaders],
            "obstacles": {"rle": rle_encode(~ctx.free)},
            "shadow": {"rle": rle_encode(ctx.shadow_mask(self.state.pursuers))},
            "policy": {"rle": rle_encode(self.policy_mask())},
            "valid_moves": [list(c) for c in self.valid_moves()],
        }

    async def broadcast(self) -> None:
        view = self.view()
        for queue in list(self.subscribers):
            await queue.put(view)


def create_app(frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="surveillance-evasion sessions")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def _get(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/sessions")
    async def create_session(body: dict):
        try:
            scene = SceneDescription.from_json(body.get("scene", {}))
            m = int(body.get("m", 16))
            ctx = GameContext(scene, Grid2D(m), dt=body.get("dt"))
            controller = make_controller(body.get("controller", "blend"))
            start_spec = body.get("start", {})
            state = GameState(
                tuple(tuple(c) for c in start_spec["pursuers"]),
                tuple(tuple(c) for c in start_spec["evaders"]),
            )
            ctx.validate_state(state)
        except (KeyError, ValueError, TypeError) as err:
            raise HTTPException(status_code=400, detail=str(err))
        if ctx.is_end_game(state):
            raise HTTPException(status_code=400, detail="start is already occluded")
        seed = int(body.get("seed", 0))
        session = Session(
            id=str(next(_ids)), ctx=ctx, controller=controller, state=state,
            k_max=int(body.get("k_max", 100)),
            rng=np.random.default_rng(np.random.SeedSequence(seed)))
        sessions[session.id] = session
        return session.view()

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _get(session_id).view()

    @app.post("/sessions/{session_id}/moves")
    async def submit_move(session_id: str, body: dict):
        session = _get(session_id)
        async with session.lock:
            if session.status != "active":
                raise HTTPException(status_code=409, detail=f"session is {session.status}")
            try:
                cell = tuple(int(v) for v in body["cell"])
            except (KeyError, TypeError, ValueError):
                raise HTTPException(status_code=400, detail="body needs a cell [i, j]")
            if cell not in session.valid_moves():
                raise HTTPException(status_code=409,
                                    detail=f"cell {list(cell)} is not a valid move")

            ctx = session.ctx
            state = session.state
            # controller answers the pre-move state; then both moves land
            action, policy = session.controller.select(ctx, state, session.rng)
            session.last_policy = policy
            moved = GameState(action, state.evaders, state.turn)
            others = ctx.evader_rule(moved)[1:] if len(state.evaders) > 1 else ()
            new_state = GameState(action, (cell,) + tuple(others), state.turn + 1)
            session.state = new_state
            session.move_log.append({
                "turn": new_state.turn,
                "evader_move": list(cell),
                "pursuer_action": [list(c) for c in action],
            })
            if ctx.is_end_game(new_state):
                session.status = "evader-won"
            elif new_state.turn >= session.k_max:
                session.status = "pursuer-won"
            await session.broadcast()
            return session.view()

    @app.get("/sessions/{session_id}/log")
    async def get_log(session_id: str):
        return {"moves": _get(session_id).move_log}

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        session = sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.append(queue)
        try:
            await websocket.send_text(json.dumps(session.view(), sort_keys=True))
            while True:
                view = await queue.get()
                await websocket.send_text(json.dumps(view, sort_keys=True))
        except WebSocketDisconnect:
            pass
        finally:
            session.subscribers.remove(queue)

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
