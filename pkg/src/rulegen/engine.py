"""Public forward-model API on top of the simulation core.

The core lives in `rulegen._simcore`; when the Cython-compiled build
(`rulegen._simcore_c`) is present it is used instead.  Both are built from
the same source file, so behavior is identical and the choice only
affects speed.  Set RULEGEN_PURE=1 to force the pure-Python core.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import _simcore as _pure_core
from .vgdl import validate_ruleset

if os.environ.get("RULEGEN_PURE"):
    _core = _pure_core
else:
    try:
        from . import _simcore_c as _core  # type: ignore[attr-defined]
    except ImportError:
        _core = _pure_core

BACKEND = "compiled" if _core is not _pure_core else "pure"

NIL, UP, DOWN, LEFT, RIGHT, USE = (
    _core.NIL, _core.UP, _core.DOWN, _core.LEFT, _core.RIGHT, _core.USE)
ACTIONS = _core.ACTIONS
RUNNING, WIN, LOSE = _core.RUNNING, _core.WIN, _core.LOSE
EngineError = _core.EngineError
GameState = _core.GameState
compile_game = _core.compile_game
check_termination = _core.check_termination


@dataclass
class SimulationOutcome:
    """Aggregate record of one play-through."""

    status: str
    score: int
    steps: int
    triggered_rules: frozenset
    bad_frames: int
    total_frames: int
    errors: int = 0
    warnings: int = 0

    @property
    def win(self):
        return self.status == WIN


def init_state(game, level, seed, ruleset=None):
    """Build a fresh GameState; validation errors are raised up front."""
    rs = ruleset if ruleset is not None else game.ruleset
    report = validate_ruleset(game, rs)
    if report.errors:
        raise EngineError("invalid ruleset: " + "; ".join(report.errors))
    compiled = compile_game(game, level, rs)
    return GameState(compiled, seed)


def init_compiled(compiled, seed):
    """Fresh state from an already-compiled game (skips re-validation)."""
    return GameState(compiled, seed)


def copy_forward_model(state):
    """Independent deep copy for rollouts; never shares mutable state."""
    return state.copy()


def legal_actions(state):
    return state.game.legal_actions()


def simulate(game, level, agent, max_steps, seed, ruleset=None):
    """Run one play-through with `agent` and collect the outcome.

    Engine faults during stepping are converted to an error count and end
    the run rather than propagating.
    """
    rs = ruleset if ruleset is not None else game.ruleset
    report = validate_ruleset(game, rs)
    if report.errors:
        return SimulationOutcome(
            status=LOSE, score=0, steps=0, triggered_rules=frozenset(),
            bad_frames=0, total_frames=max_steps,
            errors=len(report.errors), warnings=len(report.warnings),
        )
    compiled = compile_game(game, level, rs)
    state = GameState(compiled, seed)
    return simulate_state(state, agent, max_steps,
                          warnings=len(report.warnings))


def simulate_state(state, agent, max_steps, warnings=0):
    """Drive an existing state to completion; see `simulate`."""
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    errors = 0
    steps = 0
    try:
        while state.status == RUNNING and steps < max_steps:
            state.step(agent.act(state))
            steps += 1
    except EngineError:
        raise
    except Exception:
        errors = 1
    return SimulationOutcome(
        status=state.status,
        score=state.score,
        steps=steps,
        triggered_rules=frozenset(state.triggered),
        bad_frames=state.bad_frames,
        total_frames=max_steps,
        errors=errors,
        warnings=warnings,
    )


def trace_record(state):
    """One frame-trace record: frame, score, status and the full grid with
    comma-separated sprite-name lists per cell."""
    game = state.game
    grid = [["" for _ in range(game.width)] for _ in range(game.height)]
    cells = {}
    for s in state.sprites:
        if s.alive and 0 <= s.x < game.width and 0 <= s.y < game.height:
            cells.setdefault((s.x, s.y), []).append(s.name)
    for (x, y), names in cells.items():
        grid[y][x] = ",".join(names)
    return {
        "frame": state.frame,
        "score": state.score,
        "status": state.status,
        "grid": grid,
    }
