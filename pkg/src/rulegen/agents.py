"""Game-playing agents: do-nothing, random, closed-loop MCTS and an
open-loop MCTS variant used as the "smart" player.

Budgets are iteration counts by default so runs are hardware-independent;
a wall-clock cap can be enabled per budget for timed play.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .engine import NIL, RUNNING, copy_forward_model, legal_actions

AGENT_NAMES = ("donothing", "random", "mcts", "olets")


@dataclass(frozen=True)
class AgentBudget:
    iterations: int = 100
    rollout_depth: int = 10
    exploration: float = 1.41
    time_ms: float | None = None  # optional wall-clock cap per decision

    def __post_init__(self):
        if self.iterations < 1 or self.rollout_depth < 1:
            raise ValueError("iterations and rollout_depth must be >= 1")


class DoNothingAgent:
    name = "donothing"

    def act(self, state):
        return NIL


class RandomAgent:
    name = "random"

    def __init__(self, rng):
        self.rng = rng

    def act(self, state):
        actions = legal_actions(state)
        if not actions:
            raise ValueError("no legal actions")
        return actions[self.rng.randrange(len(actions))]


def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _evaluate(state, score_before):
    """Rollout value in (0,1): squashed score delta plus a terminal bonus."""
    raw = _sigmoid(state.score - score_before)
    if state.status == "Win":
        raw += 1.0
    elif state.status == "Lose":
        raw -= 1.0
    return (raw + 1.0) / 3.0


def _rollout(state, depth, rng):
    actions = state.game.legal_actions()
    n = len(actions)
    d = 0
    while state.status == RUNNING and d < depth:
        state.step(actions[rng.randrange(n)])
        d += 1


class _Node:
    __slots__ = ("children", "visits", "total", "best", "untried")

    def __init__(self, actions):
        self.children = {}
        self.visits = 0
        self.total = 0.0
        self.best = 0.0
        self.untried = list(actions)


def _ucb(node, child, c, mix_max):
    mean = child.total / child.visits
    value = 0.5 * (mean + child.best) if mix_max else mean
    return value + c * math.sqrt(math.log(node.visits) / child.visits)


def _search(root_state, budget, rng, open_loop):
    """Shared tree search.  Closed-loop MCTS keeps per-node determinized
    states implicitly by stepping a copy along the selected path, which is
    also exactly what the open-loop variant does; the difference is the
    node value (mean vs mean+max mix) used during selection."""
    actions = root_state.game.legal_actions()
    root = _Node(actions)
    deadline = None
    if budget.time_ms is not None:
        deadline = time.perf_counter() + budget.time_ms / 1000.0
    for _ in range(budget.iterations):
        if deadline is not None and time.perf_counter() >= deadline:
            break
        state = copy_forward_model(root_state)
        score_before = state.score
        node = root
        path = [root]
        # selection
        while not node.untried and node.children and state.status == RUNNING:
            act, node = max(
                node.children.items(),
                key=lambda kv: _ucb(path[-1], kv[1], budget.exploration,
                                    open_loop),
            )
            state.step(act)
            path.append(node)
        # expansion
        if node.untried and state.status == RUNNING:
            act = node.untried.pop(rng.randrange(len(node.untried)))
            child = _Node(actions)
            node.children[act] = child
            state.step(act)
            node = child
            path.append(node)
        _rollout(state, budget.rollout_depth, rng)
        value = _evaluate(state, score_before)
        for n in path:
            n.visits += 1
            n.total += value
            if value > n.best:
                n.best = value
    if not root.children:
        return actions[rng.randrange(len(actions))]
    best_visits = max(c.visits for c in root.children.values())
    for act in actions:  # fixed order tie-break
        child = root.children.get(act)
        if child is not None and child.visits == best_visits:
            return act
    return NIL


class MctsAgent:
    """Closed-loop UCT with uniform random rollouts."""

    name = "mcts"

    def __init__(self, rng, budget=None):
        self.rng = rng
        self.budget = budget or AgentBudget()

    def act(self, state):
        return _search(state, self.budget, self.rng, open_loop=False)


class OletsAgent:
    """Open-loop variant: the tree stores action sequences only and every
    traversal re-simulates from the root; selection mixes mean and max
    child value."""

    name = "olets"

    def __init__(self, rng, budget=None):
        self.rng = rng
        self.budget = budget or AgentBudget()

    def act(self, state):
        return _search(state, self.budget, self.rng, open_loop=True)


def make_agent(name, rng=None, budget=None):
    """Agent factory keyed by the CLI/service name strings."""
    if name == "donothing":
        return DoNothingAgent()
    if name == "random":
        return RandomAgent(rng)
    if name == "mcts":
        return MctsAgent(rng, budget)
    if name == "olets":
        return OletsAgent(rng, budget)
    raise ValueError(f"unknown agent {name!r}")
