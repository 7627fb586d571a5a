"""End-to-end acceptance checks, one test per criterion.

Each test prints a single `criterion N: PASS/FAIL` line (visible with
pytest -s or in captured output on failure) in addition to asserting.
"""

import json
import random
import statistics

import pytest

from rulegen import engine, fixtures
from rulegen.agents import AgentBudget, make_agent
from rulegen.arena import tally_preferences
from rulegen.generators import make_sld
from rulegen.generators.constructive import generate_constructive
from rulegen.generators.evolution import EvolutionConfig, generate_search
from rulegen.generators.fitness import (
    agent_objective, check_constraints, feasibility_score, is_feasible,
    relative_performance, rule_coverage,
)
from rulegen.generators.random_gen import generate_random
from rulegen.similarity import min_distance_profile
from rulegen.vgdl import parse_ruleset, serialize_ruleset, validate_ruleset

TOL = 1e-9


def _verdict(n, label, ok):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {label}")
    assert ok, f"criterion {n} failed: {label}"


def _all_slds():
    return {name: make_sld(*fixtures.load(name))
            for name in fixtures.FIXTURE_NAMES}


def test_criterion_01_feasibility_units():
    checks = [
        abs(feasibility_score(0, 40, 0, 0, 1000) - 1.0) < TOL,
        all(abs(feasibility_score(1, 0, 1, n, n) - 0.25) < TOL
            for n in (1, 7, 1000)),
        abs(feasibility_score(0, 20, 3, 30, 100) - 0.66) < TOL,
    ]
    _verdict(1, "constraint-score unit values", all(checks))


def test_criterion_02_fitness_units():
    smart, base, rnd = 0.95, 0.5, 0.05
    checks = [
        abs(agent_objective(1, 0) - 0.95) < TOL,
        abs(relative_performance(smart, base, rnd) - 0.2025) < TOL,
        abs(rule_coverage(3, 12) - 0.25) < TOL,
        relative_performance(base, base, rnd) * 1.0 == 0.0,
        relative_performance(smart, base, rnd) * rule_coverage(0, 5) == 0.0,
    ]
    _verdict(2, "fitness unit values and zero factors", all(checks))


def test_criterion_03_engine_determinism():
    rng = random.Random(2024)
    ok = True
    for _ in range(100):
        name = rng.choice(fixtures.FIXTURE_NAMES)
        game, level = fixtures.load(name)
        seed = rng.randrange(2**31)
        actions = [rng.choice(engine.ACTIONS) for _ in range(40)]
        replays = []
        for _ in range(2):
            state = engine.init_state(game, level, seed)
            records = []
            for a in actions:
                if state.status != engine.RUNNING:
                    break
                state.step(a)
                records.append(engine.trace_record(state))
            replays.append(json.dumps(records, sort_keys=True))
        if replays[0] != replays[1]:
            ok = False
            break
    _verdict(3, "100 replayed action sequences bit-identical", ok)


def test_criterion_04_generator_validity():
    ok = True
    for name, sld in _all_slds().items():
        avatar = sld.game.avatar.name
        for seed in range(1000):
            rs = generate_random(sld, random.Random(seed))
            if validate_ruleset(sld.game, rs).errors:
                ok = False
            if not 1 <= len(rs.interactions) <= 5:
                ok = False
            lose = [t for t in rs.terminations
                    if t.kind == "SpriteCounter" and not t.win
                    and t.sprites == (avatar,)]
            if len(lose) != 1:
                ok = False
        for seed in range(100):
            rs = generate_constructive(sld, random.Random(seed))
            if validate_ruleset(sld.game, rs).errors:
                ok = False
            lose = [t for t in rs.terminations
                    if t.kind == "SpriteCounter" and not t.win
                    and t.sprites == (avatar,)]
            if len(lose) != 1:
                ok = False
        if not ok:
            break
    _verdict(4, "random x1000 and constructive x100 outputs valid", ok)


def test_criterion_05_constructive_playability():
    # single playthrough per role keeps the 60-ruleset sweep inside the
    # wall-clock budget; the constraint thresholds themselves are unchanged
    config = EvolutionConfig(playthroughs=1)
    ok = True
    for name, sld in _all_slds().items():
        feasible = 0
        for seed in range(20):
            rs = generate_constructive(sld, random.Random(seed))
            passed, _ = check_constraints(
                sld.game, sld.level, rs, config,
                random.Random(f"c5:{name}:{seed}"))
            feasible += passed
        print(f"  constructive feasibility {name}: {feasible}/20")
        if feasible < 16:
            ok = False
    _verdict(5, ">=80% of constructive rulesets satisfy all constraints", ok)


def test_criterion_06_distance_ordering():
    sld = make_sld(*fixtures.load("aliens"))
    constructive = [generate_constructive(sld, random.Random(s))
                    for s in range(50)]
    rand = [generate_random(sld, random.Random(s)) for s in range(50)]
    mean_c = statistics.mean(min_distance_profile(constructive).per_game)
    mean_r = statistics.mean(min_distance_profile(rand).per_game)
    print(f"  mean min-distance: constructive={mean_c:.4f} random={mean_r:.4f}")
    _verdict(6, "constructive outputs cluster tighter than random", mean_c < mean_r)


def test_criterion_07_agent_skill_ordering():
    game, level = fixtures.load("aliens")
    budget = AgentBudget(iterations=100, rollout_depth=10)
    results = {}
    for agent_name in ("olets", "mcts", "random"):
        outs = []
        for seed in range(20):
            agent = make_agent(agent_name, rng=random.Random(f"c7:{seed}"),
                               budget=budget)
            outs.append(engine.simulate(game, level, agent, 400, seed))
        win = sum(o.win for o in outs) / len(outs)
        score = sum(o.score for o in outs) / len(outs)
        results[agent_name] = (win, agent_objective(win, score))
        print(f"  {agent_name}: winRate={win:.2f} "
              f"objective={results[agent_name][1]:.4f}")
    ok = (results["mcts"][0] > results["random"][0]
          and results["olets"][1] >= results["mcts"][1])
    _verdict(7, "skill ordering olets >= mcts > random on the shooter", ok)


def test_criterion_08_search_invariants():
    sld = make_sld(*fixtures.load("aliens"))
    config = EvolutionConfig(
        population_size=50, generations=10, seed=17,
        playthroughs=1, agent_iterations=4, rollout_depth=4, max_frames=150)
    history = []

    def progress(generation, feasible, infeasible):
        best = max((c.fitness for c in feasible), default=0.0)
        history.append((generation, len(feasible), len(infeasible), best,
                        [c for c in feasible]))

    ruleset = generate_search(sld, config, progress=progress)
    sizes_ok = all(f + i == 50 for _, f, i, _, _ in history)
    bests = [b for _, _, _, b, _ in history]
    elite_ok = all(b2 >= b1 - TOL for b1, b2 in zip(bests, bests[1:]))
    constraints_ok = all(
        is_feasible(c.measures, config)
        for *_, feas in history for c in feas)
    result_ok = (not validate_ruleset(sld.game, ruleset).errors
                 and any(t.win for t in ruleset.terminations)
                 and any(not t.win for t in ruleset.terminations))
    print(f"  generations={len(history) - 1} best-fitness-curve="
          f"{[round(b, 4) for b in bests]}")
    _verdict(8, "search run conserves population, elite, constraints",
             sizes_ok and elite_ok and constraints_ok and result_ok)


def test_criterion_09_tally_oracle():
    table = {
        ("search", "random"): {"aliens": (2, 8), "boulderdash": (7, 7),
                               "solarfox": (11, 15)},
        ("search", "constructive"): {"aliens": (0, 14), "boulderdash": (8, 14),
                                     "solarfox": (6, 18)},
        ("constructive", "random"): {"aliens": (9, 10), "boulderdash": (10, 11),
                                     "solarfox": (4, 5)},
    }
    records = []
    for (first, second), games in table.items():
        for game, (wins, total) in games.items():
            for i in range(total):
                records.append({
                    "choice": "First" if i < wins else "Second",
                    "generatorA": first, "generatorB": second,
                    "gameLabel": game,
                })
    cells = tally_preferences(records)["cells"]
    got = {(c["first"], c["second"], c["game"]): c["display"] for c in cells}
    want = {(p[0], p[1], g): f"{w}/{t}"
            for p, games in table.items() for g, (w, t) in games.items()}
    _verdict(9, "synthetic votes reproduce the user-study table", got == want)


def test_criterion_10_round_trip():
    ok = True
    slds = _all_slds()
    for i in range(100):
        sld = slds[fixtures.FIXTURE_NAMES[i % 3]]
        rng = random.Random(i)
        rs = (generate_random(sld, rng) if i % 2 else
              generate_constructive(sld, rng))
        if parse_ruleset(serialize_ruleset(rs)) != rs:
            ok = False
            break
    _verdict(10, "100 generated rulesets survive serialize/parse", ok)


def test_criterion_11_arena_end_to_end(tmp_path):
    from starlette.testclient import TestClient
    from rulegen.arena import ArenaService, RulesetPool, VoteStore, create_app
    from rulegen.generators import generate

    pool_dir = tmp_path / "pool"
    pool_dir.mkdir()
    sld = make_sld(*fixtures.load("aliens"))
    for gen in ("constructive", "random"):
        for i in range(2):
            (pool_dir / f"aliens__{gen}__{i}.txt").write_text(
                serialize_ruleset(generate(gen, sld, rng=random.Random(i))))
    votes = tmp_path / "votes.jsonl"
    app = create_app(RulesetPool(pool_dir), VoteStore(votes), seed=13)
    client = TestClient(app)

    blind = []
    sid = client.post("/sessions", json={"game": "aliens"}).json()["sessionId"]
    blind.append(client.get(f"/sessions/{sid}").json())
    with client.websocket_connect(f"/sessions/{sid}/ws") as ws:
        for idx in (0, 1):
            frames = 0
            while frames < 50:
                ws.send_json({"gameIndex": idx, "action": "NIL"})
                payload = ws.receive_json()
                blind.append(payload)
                if "error" in payload:  # terminal: restart and keep going
                    client.post(f"/sessions/{sid}/restart/{idx}")
                    continue
                frames += 1
    blind.append(client.get(f"/sessions/{sid}").json())

    leak = any(
        label in json.dumps(p)
        for p in blind for label in ("constructive", "random", "search"))
    r = client.post(f"/sessions/{sid}/vote", json={"choice": "First"})
    stored = [json.loads(l) for l in votes.read_text().splitlines()]
    cells = client.get("/tally").json()["cells"]
    ok = (not leak and r.status_code == 200 and len(stored) == 1
          and stored[0]["choice"] == "First" and len(cells) == 1
          and cells[0]["total"] == 1)
    _verdict(11, "blind session, lockstep play, decisive vote tallied", ok)
