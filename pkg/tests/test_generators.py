import random

import pytest

from rulegen.generators import generate, make_sld
from rulegen.generators.constructive import generate_constructive
from rulegen.generators.evolution import (
    Chromosome, EvolutionConfig, cleanse, crossover_one_point, evaluate,
    initial_population, load_config, mutate, save_config,
    _repair_terminations,
)
from rulegen.generators.fitness import (
    agent_objective, feasibility_score, fitness_from_outcomes,
    game_length_score, relative_performance, rule_coverage, sigmoid,
)
from rulegen.generators.random_gen import MAX_INTERACTIONS, generate_random
from rulegen.vgdl import validate_ruleset

TOL = 1e-9


# -- scoring functions ------------------------------------------------------

def test_feasibility_score_values():
    assert feasibility_score(0, 40, 0, 0, 1000) == pytest.approx(1.0, abs=TOL)
    for n in (1, 50, 1000):
        assert feasibility_score(1, 0, 1, n, n) == pytest.approx(0.25, abs=TOL)
    assert feasibility_score(0, 20, 3, 30, 100) == pytest.approx(0.66, abs=TOL)


def test_agent_objective_values():
    assert agent_objective(1, 0) == pytest.approx(0.95, abs=TOL)
    assert agent_objective(0, 0) == pytest.approx(0.05, abs=TOL)
    assert sigmoid(0) == 0.5


def test_relative_performance_values():
    assert relative_performance(0.95, 0.5, 0.05) == pytest.approx(
        0.2025, abs=TOL)
    # broken ordering goes negative
    assert relative_performance(0.5, 0.95, 0.05) < 0


def test_rule_coverage_values():
    assert rule_coverage(3, 12) == pytest.approx(0.25, abs=TOL)
    with pytest.raises(ValueError):
        rule_coverage(0, 0)


def test_game_length_score_saturates():
    assert game_length_score(250) == pytest.approx(0.5, abs=TOL)
    assert game_length_score(5000) == 1.0


class _Run:
    def __init__(self, win, score, steps, triggered):
        self.win = win
        self.score = score
        self.steps = steps
        self.triggered_rules = set(triggered)


def _outcomes(smart_win=1.0, triggered=(0,), steps=500):
    def runs(win):
        return [_Run(win, 0, steps, triggered) for _ in range(3)]
    return {"smart": runs(smart_win), "baseline": runs(0), "random": runs(0)}


def test_fitness_zero_when_any_factor_zero(fixture_sld):
    ruleset = fixture_sld.game.ruleset
    # equal agent objectives: relative performance factor is 0
    assert fitness_from_outcomes(ruleset, _outcomes(smart_win=0)) == 0.0
    # no rules ever triggered: coverage factor is 0
    zero_cov = {k: [_Run(o.win, 0, 500, ()) for o in v]
                for k, v in _outcomes().items()}
    assert fitness_from_outcomes(ruleset, zero_cov) == 0.0
    # zero-length games: length factor is 0
    assert fitness_from_outcomes(ruleset, _outcomes(steps=0)) == 0.0
    assert fitness_from_outcomes(ruleset, {}) == 0.0


def test_fitness_product_hand_value(fixture_sld):
    ruleset = fixture_sld.game.ruleset
    out = _outcomes(triggered=range(len(ruleset.interactions) // 2))
    expected = (relative_performance(0.95, 0.05, 0.05)
                * ((len(ruleset.interactions) // 2)
                   / len(ruleset.interactions)))
    assert fitness_from_outcomes(ruleset, out) == pytest.approx(
        expected, abs=TOL)


# -- random generator -------------------------------------------------------

def test_random_outputs_valid(fixture_sld):
    for seed in range(50):
        rs = generate_random(fixture_sld, random.Random(seed))
        report = validate_ruleset(fixture_sld.game, rs)
        assert report.errors == []
        assert 1 <= len(rs.interactions) <= MAX_INTERACTIONS
        lose = [t for t in rs.terminations
                if t.kind == "SpriteCounter" and not t.win
                and t.sprites == (fixture_sld.game.avatar.name,)]
        assert len(lose) == 1


def test_random_deterministic(fixture_sld):
    a = generate_random(fixture_sld, random.Random(5))
    b = generate_random(fixture_sld, random.Random(5))
    assert a == b


# -- constructive generator -------------------------------------------------

def test_constructive_outputs_valid(fixture_sld):
    for seed in range(20):
        rs = generate_constructive(fixture_sld, random.Random(seed))
        report = validate_ruleset(fixture_sld.game, rs,
                                  level=fixture_sld.level)
        assert report.errors == []
        lose = [t for t in rs.terminations
                if t.kind == "SpriteCounter" and not t.win
                and t.sprites == (fixture_sld.game.avatar.name,)]
        assert len(lose) == 1
        assert any(t.win for t in rs.terminations)


def test_constructive_do_nothing_survives(fixture_sld):
    from rulegen.agents import DoNothingAgent
    rs = generate_constructive(fixture_sld, random.Random(0))
    out = fixture_sld.simulate(rs, DoNothingAgent(), seed=0, steps=40)
    assert out.steps >= 40 or out.win


def test_generate_dispatch(fixture_sld):
    for name in ("random", "constructive"):
        rs = generate(name, fixture_sld, rng=random.Random(1))
        assert validate_ruleset(fixture_sld.game, rs).errors == []
    with pytest.raises(ValueError):
        generate("genetic", fixture_sld)


# -- evolution machinery ----------------------------------------------------

def test_config_round_trip(tmp_path):
    config = EvolutionConfig(population_size=10, generations=3, seed=9)
    path = tmp_path / "evo.cfg"
    save_config(config, path)
    assert load_config(path) == config


def test_config_rejects_bad_fractions():
    with pytest.raises(ValueError):
        EvolutionConfig(init_random_frac=0.9, init_constructive_frac=0.9,
                        init_mutated_frac=0.9)


def test_cleanse_removes_duplicates(fixture_sld):
    rs = fixture_sld.game.ruleset
    doubled = type(rs)(rs.interactions * 2, rs.terminations * 2)
    assert cleanse(doubled) == cleanse(rs)


def test_mutation_preserves_validity(fixture_sld):
    rng = random.Random(1)
    chrom = Chromosome(cleanse(generate_constructive(fixture_sld, rng)))
    for _ in range(300):
        chrom = mutate(chrom, fixture_sld, rng)
        report = validate_ruleset(fixture_sld.game, chrom.ruleset)
        assert report.errors == []
        assert chrom.ruleset.terminations


def test_crossover_children_from_parent_rules(fixture_sld):
    rng = random.Random(2)
    a = Chromosome(cleanse(generate_random(fixture_sld, random.Random(3))))
    b = Chromosome(cleanse(generate_constructive(fixture_sld,
                                                 random.Random(4))))
    from rulegen.vgdl import serialize_interaction, serialize_termination

    def keys(rs):
        return {serialize_interaction(r) for r in rs.interactions} | {
            serialize_termination(t) for t in rs.terminations}

    parent_rules = keys(a.ruleset) | keys(b.ruleset)
    for _ in range(50):
        c, d = crossover_one_point(a, b, rng)
        for child in (c, d):
            assert keys(child.ruleset) <= parent_rules


def test_repair_terminations(fixture_sld):
    from rulegen.vgdl import Ruleset
    repaired = _repair_terminations(Ruleset(), fixture_sld)
    assert any(t.win for t in repaired.terminations)
    assert any(not t.win for t in repaired.terminations)


def test_initial_population_size_and_mix(fixture_sld):
    config = EvolutionConfig(population_size=10)
    pop = initial_population(fixture_sld, config, random.Random(0))
    assert len(pop) == 10
    assert all(not c.evaluated for c in pop)


def test_evaluate_fills_cache(fixture_sld):
    config = EvolutionConfig(population_size=4, playthroughs=1,
                             agent_iterations=4, rollout_depth=3,
                             max_frames=60)
    chrom = Chromosome(cleanse(generate_constructive(fixture_sld,
                                                     random.Random(0))))
    evaluate(chrom, fixture_sld, config, random.Random(1))
    assert chrom.evaluated
    assert 0.0 < chrom.feasibility <= 1.0
    if chrom.feasible:
        assert chrom.measures.n_errors == 0
