import random

import pytest

from rulegen import engine
from rulegen.agents import (
    AgentBudget, DoNothingAgent, MctsAgent, OletsAgent, RandomAgent,
    make_agent,
)

from conftest import load_micro


def micro_state(seed=0):
    game, level = load_micro()
    return engine.init_state(game, level, seed)


def test_do_nothing_always_nil():
    agent = DoNothingAgent()
    state = micro_state()
    assert all(agent.act(state) == "NIL" for _ in range(5))


def test_random_agent_stays_legal():
    agent = RandomAgent(random.Random(4))
    state = micro_state()
    legal = set(engine.legal_actions(state))
    assert all(agent.act(state) in legal for _ in range(50))


def test_make_agent_names():
    for name, cls in [("donothing", DoNothingAgent), ("random", RandomAgent),
                      ("mcts", MctsAgent), ("olets", OletsAgent)]:
        assert isinstance(make_agent(name, rng=random.Random(0)), cls)
    with pytest.raises(ValueError):
        make_agent("alphabeta")


@pytest.mark.parametrize("name", ["mcts", "olets"])
def test_search_agents_win_micro(name):
    budget = AgentBudget(iterations=80, rollout_depth=8)
    agent = make_agent(name, rng=random.Random(2), budget=budget)
    state = micro_state(seed=2)
    for _ in range(10):
        state.step(agent.act(state))
        if state.status != engine.RUNNING:
            break
    assert state.status == engine.WIN


@pytest.mark.parametrize("name", ["mcts", "olets"])
def test_search_agents_deterministic_given_seed(name):
    budget = AgentBudget(iterations=40)
    picks = []
    for _ in range(2):
        agent = make_agent(name, rng=random.Random(9), budget=budget)
        state = micro_state(seed=7)
        picks.append([agent.act(state) for _ in range(3)])
    assert picks[0] == picks[1]


def test_agents_leave_state_untouched():
    budget = AgentBudget(iterations=30)
    state = micro_state(seed=1)
    before = engine.trace_record(state)
    make_agent("mcts", rng=random.Random(0), budget=budget).act(state)
    assert engine.trace_record(state) == before
    assert state.frame == 0


def test_time_budget_respected():
    import time
    budget = AgentBudget(iterations=10**9, time_ms=50)
    agent = make_agent("mcts", rng=random.Random(0), budget=budget)
    state = micro_state()
    started = time.monotonic()
    agent.act(state)
    assert time.monotonic() - started < 2.0
