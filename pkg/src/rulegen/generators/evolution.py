"""Two-population (feasible/infeasible) evolutionary search over rulesets.

Feasible chromosomes compete on fitness, infeasible ones on constraint
satisfaction; offspring migrate between populations based on where their
evaluation lands them.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, fields, replace

from ..vgdl import InteractionRule, Ruleset, TerminationRule
from .constructive import generate_constructive
from .fitness import (
    ConstraintMeasures, feasibility_score, fitness_from_outcomes,
    is_feasible, run_protocol,
)
from .random_gen import (
    SCORE_RANGE, random_interaction, random_termination,
)


@dataclass
class EvolutionConfig:
    population_size: int = 50
    init_random_frac: float = 0.4
    init_constructive_frac: float = 0.2
    init_mutated_frac: float = 0.4
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    max_mutations: int = 2
    elitism: int = 1
    bad_frame_threshold: float = 0.3
    do_nothing_frames: int = 40
    playthroughs: int = 3
    min_game_frames: int = 500
    time_budget: float = 300.0  # seconds; ignored when generations is set
    generations: int = 0  # 0 = run on wall clock
    seed: int = 0
    # evaluation knobs (desk-scale defaults; the engine frame cap and the
    # per-decision search budget dominate run time)
    max_frames: int = 500
    agent_iterations: int = 10
    rollout_depth: int = 6
    exploration: float = 1.41

    def __post_init__(self):
        total = (self.init_random_frac + self.init_constructive_frac
                 + self.init_mutated_frac)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("initialization fractions must sum to 1")
        for p in (self.crossover_prob, self.mutation_prob,
                  self.bad_frame_threshold):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0,1]")


def load_config(path):
    """Read a key=value config file into an EvolutionConfig."""
    values = {}
    types = {f.name: f.type for f in fields(EvolutionConfig)}
    defaults = EvolutionConfig()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            current = getattr(defaults, key)
            values[key] = type(current)(raw.strip())
    return replace(defaults, **values)


def save_config(config, path):
    with open(path, "w") as fh:
        for f in fields(EvolutionConfig):
            fh.write(f"{f.name}={getattr(config, f.name)}\n")


@dataclass
class Chromosome:
    ruleset: Ruleset
    feasible: bool = False
    measures: ConstraintMeasures = field(default_factory=ConstraintMeasures)
    feasibility: float = 0.0
    fitness: float = 0.0
    evaluated: bool = False

    def clone(self):
        return Chromosome(self.ruleset, self.feasible, self.measures,
                          self.feasibility, self.fitness, self.evaluated)


def cleanse(ruleset):
    """Drop structurally duplicated rules, keeping first occurrences."""
    seen = set()
    interactions = []
    for r in ruleset.interactions:
        key = (r.first, r.second, r.effect, r.score_change,
               tuple(sorted(r.params.items())))
        if key not in seen:
            seen.add(key)
            interactions.append(r)
    terminations = []
    for t in ruleset.terminations:
        key = (t.kind, t.sprites, t.limit, t.win)
        if key not in seen:
            seen.add(key)
            terminations.append(t)
    return Ruleset(tuple(interactions), tuple(terminations))


def crossover_one_point(a, b, rng):
    """One-point crossover over the concatenated rule sequences; children
    are re-split by rule type and cleansed."""
    seq_a = list(a.ruleset.interactions) + list(a.ruleset.terminations)
    seq_b = list(b.ruleset.interactions) + list(b.ruleset.terminations)
    if not seq_a or not seq_b:
        return a.clone(), b.clone()
    cut = rng.randint(0, min(len(seq_a), len(seq_b)))
    child_a = seq_a[:cut] + seq_b[cut:]
    child_b = seq_b[:cut] + seq_a[cut:]

    def rebuild(seq):
        inter = [r for r in seq if isinstance(r, InteractionRule)]
        term = [r for r in seq if isinstance(r, TerminationRule)]
        return Chromosome(cleanse(Ruleset(tuple(inter), tuple(term))))

    return rebuild(child_a), rebuild(child_b)


# -- mutation ---------------------------------------------------------------

_OPTIONAL_PARAMS = {
    "collectResource": ("limit",),
    "addHealthPoints": ("limit",),
}


def _reroll_param(rule, rng):
    choices = ["scoreChange"]
    choices += list(rule.params)
    pick = choices[rng.randrange(len(choices))]
    if pick == "scoreChange":
        return replace(rule, score_change=rng.randint(*SCORE_RANGE))
    params = dict(rule.params)
    if pick == "stype":
        return rule  # sprite references are rerolled at rule level
    params[pick] = rng.randint(1, 10)
    return replace(rule, params=params)


def _mutate_interactions(rules, sld, rng):
    kind = rng.randrange(3)  # insert / delete / modify
    param_level = rng.random() < 0.5
    rules = list(rules)
    if kind == 0 and not param_level:
        rule = random_interaction(sld, rng)
        if rule is not None:
            rules.insert(rng.randint(0, len(rules)), rule)
        return rules
    if not rules:
        rule = random_interaction(sld, rng)
        return [rule] if rule is not None else rules
    idx = rng.randrange(len(rules))
    rule = rules[idx]
    if kind == 0:  # parameter insertion
        extras = [p for p in _OPTIONAL_PARAMS.get(rule.effect, ())
                  if p not in rule.params]
        if extras:
            params = dict(rule.params)
            params[extras[rng.randrange(len(extras))]] = rng.randint(1, 10)
            rules[idx] = replace(rule, params=params)
        elif rule.score_change == 0:
            rules[idx] = replace(rule, score_change=rng.randint(*SCORE_RANGE))
        else:
            rules[idx] = _reroll_param(rule, rng)
    elif kind == 1:
        if param_level:
            removable = [p for p in rule.params if p != "stype"]
            if removable:
                params = dict(rule.params)
                del params[removable[rng.randrange(len(removable))]]
                rules[idx] = replace(rule, params=params)
            elif rule.score_change != 0:
                rules[idx] = replace(rule, score_change=0)
            else:
                del rules[idx]
        else:
            del rules[idx]
    else:
        if param_level:
            rules[idx] = _reroll_param(rule, rng)
        else:
            new = random_interaction(sld, rng, first=rule.first,
                                     second=rule.second)
            if new is not None:
                rules[idx] = new
    return rules


def _mutate_terminations(rules, sld, rng):
    kind = rng.randrange(3)
    param_level = rng.random() < 0.5
    rules = list(rules)
    if kind == 0 and not param_level:
        rules.insert(rng.randint(0, len(rules)), random_termination(sld, rng))
        return rules
    if kind == 1 and not param_level and len(rules) > 1:
        del rules[rng.randrange(len(rules))]
        return rules
    # everything else (incl. blocked deletes) modifies an existing rule
    if not rules:
        return [random_termination(sld, rng)]
    idx = rng.randrange(len(rules))
    rule = rules[idx]
    if param_level:
        if rule.kind == "Timeout" or rng.random() < 0.5:
            limit = max(0, rule.limit + rng.randint(-100, 100))
            rules[idx] = replace(rule, limit=limit)
        else:
            rules[idx] = replace(rule, win=not rule.win)
    else:
        fresh = random_termination(sld, rng)
        rules[idx] = replace(fresh, win=rule.win)
    return rules


def mutate(chromosome, sld, rng, max_mutations=2):
    """1..max rounds, each touching either the interaction or the
    termination list; the result still validates error-free."""
    interactions = list(chromosome.ruleset.interactions)
    terminations = list(chromosome.ruleset.terminations)
    for _ in range(rng.randint(1, max(1, max_mutations))):
        if rng.random() < 0.5:
            interactions = _mutate_interactions(interactions, sld, rng)
        else:
            terminations = _mutate_terminations(terminations, sld, rng)
    return Chromosome(cleanse(Ruleset(tuple(interactions), tuple(terminations))))


# -- population machinery ---------------------------------------------------

def evaluate(chromosome, sld, config, rng):
    """Constraint + fitness evaluation; fills all cached fields."""
    measures, outcomes = run_protocol(
        sld.game, sld.level, chromosome.ruleset, config, rng)
    chromosome.measures = measures
    chromosome.feasible = is_feasible(measures, config)
    chromosome.feasibility = feasibility_score(
        measures.n_errors, min(measures.n_do_nothing, 40),
        measures.n_warnings, measures.n_bad_frames, measures.n_frames)
    chromosome.fitness = (
        fitness_from_outcomes(chromosome.ruleset, outcomes)
        if chromosome.feasible else 0.0)
    chromosome.evaluated = True
    return chromosome


def _rank_select(population, rng):
    """Rank-proportional draw; population must be sorted worst-to-best."""
    n = len(population)
    total = n * (n + 1) // 2
    pick = rng.randrange(total)
    acc = 0
    for i, member in enumerate(population):
        acc += i + 1
        if pick < acc:
            return member
    return population[-1]


def _sorted_pop(pop, feasible):
    key = (lambda c: c.fitness) if feasible else (lambda c: c.feasibility)
    return sorted(pop, key=key)


def best_chromosome(feasible_pop, infeasible_pop):
    if feasible_pop:
        return max(feasible_pop, key=lambda c: c.fitness)
    if infeasible_pop:
        return max(infeasible_pop, key=lambda c: c.feasibility)
    return None


def evolve_generation(feasible_pop, infeasible_pop, sld, config, rng,
                      evaluate_fn=None):
    """One generation step; returns (feasible', infeasible').

    Offspring counts are split across the two populations proportionally
    to their sizes; each offspring is evaluated and routed to whichever
    population its constraint status dictates.  The single elite keeps its
    cached evaluation.
    """
    evaluate_fn = evaluate_fn or (
        lambda c, r: evaluate(c, sld, config, r))
    total = len(feasible_pop) + len(infeasible_pop)
    if total == 0:
        return [], []
    n_offspring = max(0, total - config.elitism)

    pools = []
    if feasible_pop:
        pools.append(_sorted_pop(feasible_pop, feasible=True))
    if infeasible_pop:
        pools.append(_sorted_pop(infeasible_pop, feasible=False))
    shares = [len(p) / total for p in pools]
    counts = [int(round(s * n_offspring)) for s in shares]
    while sum(counts) > n_offspring:
        counts[counts.index(max(counts))] -= 1
    while sum(counts) < n_offspring:
        counts[counts.index(min(counts))] += 1

    offspring = []
    for pool, count in zip(pools, counts):
        produced = 0
        while produced < count:
            pa = _rank_select(pool, rng)
            pb = _rank_select(pool, rng)
            if rng.random() < config.crossover_prob:
                ca, cb = crossover_one_point(pa, pb, rng)
            else:
                ca, cb = pa.clone(), pb.clone()
                if rng.random() < config.mutation_prob:
                    ca = mutate(ca, sld, rng, config.max_mutations)
                if rng.random() < config.mutation_prob:
                    cb = mutate(cb, sld, rng, config.max_mutations)
            for child in (ca, cb):
                if produced < count:
                    child.evaluated = False
                    offspring.append(child)
                    produced += 1

    next_feasible = []
    next_infeasible = []
    for i, child in enumerate(offspring):
        child_rng = random.Random(f"{config.seed}:{rng.random()}:{i}")
        evaluate_fn(child, child_rng)
        (next_feasible if child.feasible else next_infeasible).append(child)

    elite = best_chromosome(feasible_pop, infeasible_pop)
    if elite is not None and config.elitism > 0:
        kept = elite.clone()
        (next_feasible if kept.feasible else next_infeasible).append(kept)
    return next_feasible, next_infeasible


def initial_population(sld, config, rng):
    """Seed mix: random rulesets, constructive rulesets, and mutated
    constructive rulesets, all cleansed."""
    from .random_gen import generate_random

    n = config.population_size
    n_random = int(round(n * config.init_random_frac))
    n_constructive = int(round(n * config.init_constructive_frac))
    n_mutated = n - n_random - n_constructive
    pop = []
    for _ in range(n_random):
        pop.append(Chromosome(cleanse(generate_random(sld, rng))))
    for _ in range(n_constructive):
        pop.append(Chromosome(cleanse(generate_constructive(sld, rng))))
    for _ in range(n_mutated):
        base = Chromosome(cleanse(generate_constructive(sld, rng)))
        pop.append(mutate(base, sld, rng, config.max_mutations))
    return pop


def _repair_terminations(ruleset, sld):
    """Guarantee the returned ruleset has a win and a lose rule."""
    terms = list(ruleset.terminations)
    if not any(t.win for t in terms):
        terms.append(TerminationRule("Timeout", (), 1000, True))
    if not any(not t.win for t in terms):
        avatar = sld.game.avatar.name
        terms.append(TerminationRule("SpriteCounter", (avatar,), 0, False))
    return Ruleset(ruleset.interactions, tuple(terms))


def generate_search(sld, config, progress=None):
    """FI2Pop search; returns the best ruleset found within the budget.

    With `config.generations` set the run is generation-counted and fully
    deterministic for a given seed; otherwise it stops when
    `config.time_budget` seconds elapse.
    """
    rng = random.Random(config.seed)
    deadline = None
    if config.generations <= 0:
        deadline = time.monotonic() + config.time_budget

    pop = initial_population(sld, config, rng)
    for i, chrom in enumerate(pop):
        evaluate(chrom, sld, config, random.Random(f"{config.seed}:init:{i}"))
    feasible = [c for c in pop if c.feasible]
    infeasible = [c for c in pop if not c.feasible]

    generation = 0
    while True:
        if progress is not None:
            progress(generation, feasible, infeasible)
        generation += 1
        if config.generations > 0 and generation > config.generations:
            break
        if deadline is not None and time.monotonic() >= deadline:
            break
        feasible, infeasible = evolve_generation(
            feasible, infeasible, sld, config, rng)

    best = best_chromosome(feasible, infeasible)
    return _repair_terminations(best.ruleset, sld)
