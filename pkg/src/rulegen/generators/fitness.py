"""Constraint checks and the fitness pipeline for search-based generation.

A candidate ruleset is feasible when the engine accepts it without
errors, a do-nothing player survives the opening 40 frames, and at most
30% of simulated frames have sprites off screen.  Feasible candidates are
scored by relative agent performance, rule coverage and game length.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .. import engine
from ..agents import AgentBudget, DoNothingAgent, MctsAgent, OletsAgent, RandomAgent
from ..vgdl import validate_ruleset


@dataclass
class ConstraintMeasures:
    n_errors: int = 0
    n_warnings: int = 0
    n_do_nothing: int = 0
    n_bad_frames: int = 0
    n_frames: int = 1


def sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def feasibility_score(n_errors, n_do_nothing, n_warnings, n_bad_frames, n_frames):
    """Weighted constraint satisfaction in (0, 1]."""
    return (0.3 / (n_errors + 1)
            + 0.2 * n_do_nothing / 40.0
            + 0.2 / (n_warnings + 1)
            + 0.3 * (1.0 - n_bad_frames / n_frames))


def agent_objective(avg_win, avg_score):
    """Per-agent objective: win rate dominates, score tie-breaks."""
    return 0.9 * avg_win + 0.1 * sigmoid(avg_score)


def relative_performance(o_smart, o_baseline, o_random):
    """Positive when skill ordering holds with real gaps between tiers."""
    return (o_smart - o_baseline) * (o_baseline - o_random)


def rule_coverage(r_unique, r_total):
    if r_total <= 0:
        raise ValueError("rule coverage needs at least one rule")
    return r_unique / r_total


def game_length_score(avg_frames):
    """Linear ramp up to the 500-frame playability threshold."""
    return min(1.0, avg_frames / 500.0)


def _derived_rng(seed, *parts):
    return random.Random(":".join(str(p) for p in (seed,) + parts))


def _budget(config):
    return AgentBudget(
        iterations=config.agent_iterations,
        rollout_depth=config.rollout_depth,
        exploration=config.exploration,
    )


def _playthroughs(compiled, agent_factory, count, max_steps, rng, warnings=0):
    outcomes = []
    for i in range(count):
        state = engine.init_compiled(compiled, seed=rng.randrange(2**31))
        agent = agent_factory()
        outcomes.append(
            engine.simulate_state(state, agent, max_steps, warnings=warnings))
    return outcomes


def run_protocol(game, level, ruleset, config, rng):
    """Run the full evaluation protocol and return (measures, outcomes).

    The smart agent plays first at the full frame cap; its best game's
    step count caps the baseline and random runs.  Outcomes are keyed by
    agent role; an empty dict means validation already failed.
    """
    report = validate_ruleset(game, ruleset)
    measures = ConstraintMeasures(
        n_errors=len(report.errors), n_warnings=len(report.warnings))
    if report.errors:
        return measures, {}

    compiled = engine.compile_game(game, level, ruleset)
    dn_state = engine.init_compiled(compiled, seed=rng.randrange(2**31))
    dn = engine.simulate_state(
        dn_state, DoNothingAgent(), config.do_nothing_frames)
    measures.n_do_nothing = dn.steps

    budget = _budget(config)
    smart = _playthroughs(
        compiled, lambda: OletsAgent(random.Random(rng.randrange(2**31)), budget),
        config.playthroughs, config.max_frames, rng)
    best = max(smart, key=lambda o: (o.win, o.score, o.steps))
    cap = max(1, best.steps)
    baseline = _playthroughs(
        compiled, lambda: MctsAgent(random.Random(rng.randrange(2**31)), budget),
        config.playthroughs, cap, rng)
    rnd = _playthroughs(
        compiled, lambda: RandomAgent(random.Random(rng.randrange(2**31))),
        config.playthroughs, cap, rng)

    outcomes = {"smart": smart, "baseline": baseline, "random": rnd}
    all_runs = smart + baseline + rnd
    measures.n_bad_frames = sum(o.bad_frames for o in all_runs)
    measures.n_frames = max(1, sum(o.steps for o in all_runs))
    measures.n_errors += sum(o.errors for o in all_runs)
    return measures, outcomes


def is_feasible(measures, config):
    return (measures.n_errors == 0
            and measures.n_do_nothing >= config.do_nothing_frames
            and measures.n_bad_frames / measures.n_frames
            <= config.bad_frame_threshold)


def check_constraints(game, level, ruleset, config, rng):
    """Standalone constraint check: (feasible, ConstraintMeasures)."""
    measures, _ = run_protocol(game, level, ruleset, config, rng)
    return is_feasible(measures, config), measures


def fitness_from_outcomes(ruleset, outcomes):
    """Combine play-through outcomes into the overall fitness product."""
    if not outcomes:
        return 0.0
    objectives = {}
    for role, runs in outcomes.items():
        avg_win = sum(1.0 for o in runs if o.win) / len(runs)
        avg_score = sum(o.score for o in runs) / len(runs)
        objectives[role] = agent_objective(avg_win, avg_score)
    s_final = relative_performance(
        objectives["smart"], objectives["baseline"], objectives["random"])
    all_runs = [o for runs in outcomes.values() for o in runs]
    triggered = set()
    for o in all_runs:
        triggered |= o.triggered_rules
    total = len(ruleset.interactions)
    s_rules = rule_coverage(len(triggered), total) if total else 0.0
    avg_len = sum(o.steps for o in all_runs) / len(all_runs)
    return s_final * s_rules * game_length_score(avg_len)


def chromosome_fitness(game, level, ruleset, config, rng):
    """Full evaluation to a single fitness value (feasible rulesets)."""
    _, outcomes = run_protocol(game, level, ruleset, config, rng)
    return fitness_from_outcomes(ruleset, outcomes)
