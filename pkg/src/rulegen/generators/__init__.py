"""The three ruleset generators and the evolutionary machinery."""

from .. import engine
from ..analyzer import SLDescription
from .constructive import generate_constructive
from .evolution import (
    Chromosome, EvolutionConfig, cleanse, crossover_one_point,
    evaluate, evolve_generation, generate_search, initial_population,
    load_config, mutate, save_config,
)
from .fitness import (
    agent_objective, check_constraints, chromosome_fitness,
    feasibility_score, fitness_from_outcomes, game_length_score,
    relative_performance, rule_coverage,
)
from .random_gen import generate_random

GENERATOR_NAMES = ("random", "constructive", "search")


def make_sld(game, level, max_steps=500):
    """SLDescription over a game/level pair with a live simulate hook."""

    def simulate(ruleset, agent, seed, steps=max_steps):
        return engine.simulate(game, level, agent, steps, seed,
                               ruleset=ruleset)

    return SLDescription(game=game, level=level, simulate=simulate)


def generate(name, sld, rng=None, config=None):
    """Dispatch by generator name string."""
    if name == "random":
        return generate_random(sld, rng)
    if name == "constructive":
        return generate_constructive(sld, rng)
    if name == "search":
        if config is None:
            raise ValueError("search generator needs an EvolutionConfig")
        return generate_search(sld, config)
    raise ValueError(f"unknown generator {name!r}")
