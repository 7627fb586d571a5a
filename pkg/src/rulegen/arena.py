"""Blind pairwise-judging service: serves pairs of generated games on the
same level, steps them in lockstep with the judge's actions, records a
four-way preference vote per session and tallies decisive votes.

Votes persist in an append-only JSONL file; generator identities never
appear in any payload sent before the session's vote is stored.
"""

import json
import os
import random
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import engine, fixtures
from .vgdl import parse_ruleset, validate_ruleset

CHOICES = ("First", "Second", "Both", "Neither")

# precedence used for canonical pair naming in the tally
GENERATOR_ORDER = ("search", "constructive", "random")


class ArenaError(ValueError):
    def __init__(self, message, status=400):
        super().__init__(message)
        self.status = status


@dataclass
class PoolEntry:
    game_label: str
    generator: str
    ruleset: object
    path: str


class RulesetPool:
    """Directory of generated rulesets named <game>__<generator>__<id>.txt."""

    def __init__(self, root):
        self.root = Path(root)
        self.entries = {}
        for path in sorted(self.root.glob("*.txt")):
            parts = path.stem.split("__")
            if len(parts) < 3:
                continue
            game_label, generator = parts[0], parts[1]
            try:
                game, _ = fixtures.load(game_label)
                ruleset = parse_ruleset(path.read_text())
            except Exception:
                continue
            if validate_ruleset(game, ruleset).errors:
                continue
            self.entries.setdefault(game_label, []).append(
                PoolEntry(game_label, generator, ruleset, str(path)))

    def for_game(self, game_label):
        return self.entries.get(game_label, [])


@dataclass
class _GameSlot:
    entry: PoolEntry
    compiled: object
    state: object = None
    plays: int = 0


@dataclass
class Session:
    id: str
    game_label: str
    slots: list
    created_at: float
    rng: random.Random
    voted: bool = False

    def slot(self, index):
        if index not in (0, 1):
            raise ArenaError("gameIndex must be 0 or 1")
        return self.slots[index]


class VoteStore:
    """Append-only JSONL vote log; records are never mutated or deleted."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record):
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            with open(self.path, "a") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        return record["id"]

    def records(self):
        if not self.path.exists():
            return []
        out = []
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out


class ArenaService:
    def __init__(self, pool, store, seed=None, max_frames=2000):
        self.pool = pool
        self.store = store
        self.rng = random.Random(seed)
        self.max_frames = max_frames
        self.sessions = {}

    # -- sessions ---------------------------------------------------------

    def create_session(self, game_label):
        entries = self.pool.for_game(game_label)
        if len(entries) < 2:
            raise ArenaError(
                f"pool holds fewer than 2 rulesets for {game_label!r}")
        game, level = fixtures.load(game_label)
        first, second = self.rng.sample(entries, 2)
        if self.rng.random() < 0.5:
            first, second = second, first
        slots = [
            _GameSlot(entry=e, compiled=engine.compile_game(
                game, level, e.ruleset))
            for e in (first, second)
        ]
        sid = secrets.token_hex(8)
        session = Session(
            id=sid, game_label=game_label, slots=slots,
            created_at=time.time(),
            rng=random.Random(self.rng.randrange(2**63)),
        )
        self.sessions[sid] = session
        return session

    def get_session(self, sid):
        session = self.sessions.get(sid)
        if session is None:
            raise ArenaError(f"unknown session {sid!r}", status=404)
        return session

    def session_view(self, session):
        """Blind payload: no generator labels before the vote."""
        return {
            "sessionId": session.id,
            "game": session.game_label,
            "plays": [s.plays for s in session.slots],
            "statuses": [
                s.state.status if s.state is not None else "NotStarted"
                for s in session.slots
            ],
            "actions": session.slots[0].compiled.legal_actions(),
            "voted": session.voted,
        }

    def restart(self, sid, index):
        session = self.get_session(sid)
        slot = session.slot(index)
        slot.state = engine.init_compiled(
            slot.compiled, seed=session.rng.randrange(2**31))
        slot.plays += 1
        return engine.trace_record(slot.state)

    def advance(self, sid, index, action):
        session = self.get_session(sid)
        slot = session.slot(index)
        if action not in slot.compiled.legal_actions():
            raise ArenaError(f"action {action!r} not legal for this avatar")
        if slot.state is None:
            self.restart(sid, index)
        elif slot.state.status != engine.RUNNING:
            raise ArenaError("game over; restart required", status=409)
        elif slot.state.frame >= self.max_frames:
            raise ArenaError("frame limit reached; restart required", status=409)
        else:
            slot.state.step(action)
        return engine.trace_record(slot.state)

    # -- votes ------------------------------------------------------------

    def record_vote(self, sid, choice, comment=""):
        session = self.get_session(sid)
        if choice not in CHOICES:
            raise ArenaError(f"choice must be one of {CHOICES}")
        if session.voted:
            raise ArenaError("session already voted", status=409)
        if any(s.plays == 0 for s in session.slots):
            raise ArenaError("both games must be played before voting")
        record = {
            "id": secrets.token_hex(8),
            "sessionId": sid,
            "gameLabel": session.game_label,
            "generatorA": session.slots[0].entry.generator,
            "generatorB": session.slots[1].entry.generator,
            "choice": choice,
            "comment": comment,
            "timestamp": time.time(),
        }
        self.store.append(record)
        session.voted = True
        return record["id"]

    def tally(self):
        return tally_preferences(self.store.records())


def tally_preferences(records):
    """Per (generator pair, game): decisive wins for the canonical
    first-listed generator over total decisive votes.

    Both/Neither votes are excluded from numerator and denominator.
    """
    cells = {}
    for rec in records:
        choice = rec.get("choice")
        if choice not in ("First", "Second"):
            continue
        gen_a, gen_b = rec["generatorA"], rec["generatorB"]
        if gen_a == gen_b:
            continue
        winner = gen_a if choice == "First" else gen_b

        def rank(g):
            return GENERATOR_ORDER.index(g) if g in GENERATOR_ORDER else 99

        pair = tuple(sorted((gen_a, gen_b), key=rank))
        key = (pair, rec["gameLabel"])
        wins, total = cells.get(key, (0, 0))
        cells[key] = (wins + (1 if winner == pair[0] else 0), total + 1)
    return {
        "cells": [
            {
                "first": pair[0],
                "second": pair[1],
                "game": game,
                "wins": wins,
                "total": total,
                "display": f"{wins}/{total}",
            }
            for (pair, game), (wins, total) in sorted(cells.items())
        ]
    }


# -- HTTP/WebSocket app ------------------------------------------------------

def create_app(pool, store, seed=None):
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from fastapi.responses import JSONResponse
    from pydantic import BaseModel

    service = ArenaService(pool, store, seed=seed)
    app = FastAPI(title="rule arena")
    app.state.service = service

    class CreateSession(BaseModel):
        game: str

    class Vote(BaseModel):
        choice: str
        comment: str = ""

    @app.exception_handler(ArenaError)
    async def arena_error(request, exc):
        return JSONResponse(status_code=exc.status,
                            content={"error": str(exc)})

    @app.post("/sessions")
    def create_session(body: CreateSession):
        session = service.create_session(body.game)
        return {"sessionId": session.id}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return service.session_view(service.get_session(sid))

    @app.post("/sessions/{sid}/restart/{index}")
    def restart(sid: str, index: int):
        return service.restart(sid, index)

    @app.post("/sessions/{sid}/vote")
    def vote(sid: str, body: Vote):
        return {"voteId": service.record_vote(sid, body.choice, body.comment)}

    @app.get("/tally")
    def tally():
        return service.tally()

    @app.websocket("/sessions/{sid}/ws")
    async def ws(websocket: WebSocket, sid: str):
        await websocket.accept()
        try:
            while True:
                msg = await websocket.receive_json()
                try:
                    frame = service.advance(
                        sid, int(msg.get("gameIndex", 0)),
                        msg.get("action", "NIL"))
                except ArenaError as exc:
                    await websocket.send_json({"error": str(exc)})
                    continue
                await websocket.send_json(frame)
        except WebSocketDisconnect:
            pass

    return app


def serve(pool_dir, votes_path, port=8000, seed=None, host="127.0.0.1"):
    import uvicorn

    app = create_app(RulesetPool(pool_dir), VoteStore(votes_path), seed=seed)
    uvicorn.run(app, host=host, port=port)
