"""Batch entry points: ruleset generation, agent simulation, similarity
analysis and the judging service."""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import click

from . import engine, fixtures
from .agents import AGENT_NAMES, AgentBudget, make_agent
from .generators import (
    EvolutionConfig, GENERATOR_NAMES, generate as run_generator,
    load_config, make_sld,
)
from .similarity import min_distance_profile, write_profile_csv
from .vgdl import (
    VGDLParseError, parse_game, parse_level, parse_ruleset,
    serialize_ruleset, validate_ruleset,
)


def _parse_budget(text):
    """'90', '90s', '5m', '2h' -> seconds."""
    text = text.strip().lower()
    factor = 1.0
    if text.endswith("ms"):
        factor, text = 0.001, text[:-2]
    elif text.endswith("s"):
        text = text[:-1]
    elif text.endswith("m"):
        factor, text = 60.0, text[:-1]
    elif text.endswith("h"):
        factor, text = 3600.0, text[:-1]
    try:
        return float(text) * factor
    except ValueError:
        raise click.BadParameter(f"bad budget {text!r}")


def _load_game_level(game, level):
    """`game` is a fixture name or a description path; `level` optionally
    overrides the fixture's level."""
    if game in fixtures.FIXTURE_NAMES:
        desc = fixtures.load_game(game)
        grid = (parse_level(Path(level).read_text(), desc.mapping)
                if level else fixtures.load_level(game, desc))
        return desc, grid, game
    desc = parse_game(Path(game).read_text())
    if not level:
        raise click.UsageError("--level is required for non-fixture games")
    return desc, parse_level(Path(level).read_text(), desc.mapping), Path(game).stem


@click.group()
def main():
    """Rule generation toolkit for grid video games."""


@main.command()
@click.option("--game", required=True, help="fixture name or description file")
@click.option("--level", default=None, help="level file (defaults to fixture level)")
@click.option("--generator", "generator_name", required=True,
              type=click.Choice(GENERATOR_NAMES))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--budget", default="5m", show_default=True,
              help="wall-clock budget; exceeded runs write nothing")
@click.option("--generations", default=0, show_default=True, type=int,
              help="search: stop after N generations instead of the wall clock")
@click.option("--config", "config_path", default=None,
              help="key=value evolution config file")
@click.option("--out", "out_path", default=None, help="output ruleset file")
def generate(game, level, generator_name, seed, budget, generations,
             config_path, out_path):
    """Generate a ruleset for a level and write it as ruleset text."""
    desc, grid, label = _load_game_level(game, level)
    budget_s = _parse_budget(budget)
    sld = make_sld(desc, grid)
    config = load_config(config_path) if config_path else EvolutionConfig()
    config.seed = seed
    config.time_budget = budget_s
    if generations:
        config.generations = generations
    started = time.monotonic()
    ruleset = run_generator(
        generator_name, sld, rng=random.Random(seed), config=config)
    elapsed = time.monotonic() - started
    if elapsed > budget_s:
        click.echo(f"budget exceeded ({elapsed:.1f}s > {budget_s:.1f}s); "
                   "no output written", err=True)
        sys.exit(2)
    text = serialize_ruleset(ruleset)
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--game", required=True)
@click.option("--level", default=None)
@click.option("--ruleset", "ruleset_path", default=None,
              help="ruleset file (defaults to the game's own rules)")
@click.option("--agent", "agent_name", default="random",
              type=click.Choice(AGENT_NAMES), show_default=True)
@click.option("--plays", default=1, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--max-steps", default=1000, show_default=True, type=int)
@click.option("--iterations", default=100, show_default=True, type=int,
              help="search agent rollouts per decision")
def simulate(game, level, ruleset_path, agent_name, plays, seed, max_steps,
             iterations):
    """Play a game with an agent and report outcomes."""
    desc, grid, _ = _load_game_level(game, level)
    ruleset = (parse_ruleset(Path(ruleset_path).read_text())
               if ruleset_path else None)
    report = validate_ruleset(desc, ruleset if ruleset else desc.ruleset)
    if report.errors:
        for err in report.errors:
            click.echo(f"error: {err}", err=True)
        sys.exit(1)
    budget = AgentBudget(iterations=iterations)
    wins = 0
    scores = []
    steps = []
    for i in range(plays):
        rng = random.Random(f"{seed}:{i}")
        agent = make_agent(agent_name, rng=rng, budget=budget)
        out = engine.simulate(desc, grid, agent, max_steps, seed + i,
                              ruleset=ruleset)
        wins += 1 if out.win else 0
        scores.append(out.score)
        steps.append(out.steps)
        click.echo(f"play {i}: {out.status} score={out.score} "
                   f"steps={out.steps} badFrames={out.bad_frames}")
    if plays > 0:
        click.echo(f"aggregate: winRate={wins / plays:.2f} "
                   f"avgScore={sum(scores) / plays:.2f} "
                   f"avgSteps={sum(steps) / plays:.1f}")


@main.command()
@click.argument("ruleset_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, help="output CSV")
@click.option("--seed", default=0, show_default=True, type=int)
def similarity(ruleset_dir, out_path, seed):
    """Minimum-distance profile over a directory of ruleset files."""
    paths = sorted(Path(ruleset_dir).glob("*.txt"))
    if len(paths) < 2:
        click.echo("need at least 2 ruleset files", err=True)
        sys.exit(1)
    groups = {}
    for path in paths:
        try:
            ruleset = parse_ruleset(path.read_text())
        except VGDLParseError as exc:
            click.echo(f"{path}: {exc}", err=True)
            sys.exit(1)
        parts = path.stem.split("__")
        key = (parts[1] if len(parts) >= 3 else "",
               parts[0] if len(parts) >= 3 else "")
        groups.setdefault(key, []).append(ruleset)
    profiles = []
    for (generator, game), rulesets in sorted(groups.items()):
        if len(rulesets) < 2:
            continue
        profiles.append(
            min_distance_profile(rulesets, generator_label=generator,
                                 game_label=game))
    if not profiles:
        # no labeled groups: profile the whole directory as one set
        rulesets = [parse_ruleset(p.read_text()) for p in paths]
        profiles = [min_distance_profile(rulesets)]
    write_profile_csv(out_path, profiles)
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--pool", "pool_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="directory of <game>__<generator>__<id>.txt rulesets")
@click.option("--votes", "votes_path", required=True, help="vote log file")
@click.option("--seed", default=None, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, pool_dir, votes_path, seed, host):
    """Run the pairwise judging service."""
    from .arena import serve as run_serve

    run_serve(pool_dir, votes_path, port=port, seed=seed, host=host)


if __name__ == "__main__":
    main()
