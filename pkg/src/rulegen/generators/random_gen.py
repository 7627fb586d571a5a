"""Random ruleset generator: a handful of arbitrary interactions that
validate cleanly, plus a random win condition and an avatar-death loss."""

from __future__ import annotations

from ..vgdl import (
    EFFECTS, EOS, InteractionRule, Ruleset, TerminationRule, validate_ruleset,
)

MAX_INTERACTIONS = 5
SCORE_RANGE = (-2, 2)
TIMEOUT_RANGE = (500, 1500)
_DRAW_RETRIES = 20

_EFFECT_POOL = tuple(sorted(EFFECTS))


def random_interaction(sld, rng, first=None, second=None):
    """One random interaction over level sprites that validates error-free,
    or None if no valid draw was found within the retry budget."""
    game = sld.game
    names = sorted(sld.level_names())
    if not names:
        return None
    for _ in range(_DRAW_RETRIES):
        a = first if first is not None else names[rng.randrange(len(names))]
        pool = names + [EOS]
        b = second if second is not None else pool[rng.randrange(len(pool))]
        if a == EOS:
            continue
        effect = _EFFECT_POOL[rng.randrange(len(_EFFECT_POOL))]
        params = {}
        if effect == "transformTo":
            params["stype"] = names[rng.randrange(len(names))]
        elif effect == "addHealthPoints":
            params["value"] = rng.randint(1, 5)
        score = rng.randint(*SCORE_RANGE)
        rule = InteractionRule(a, b, effect, score, params)
        probe = Ruleset((rule,), (TerminationRule("Timeout", (), 100, True),))
        if not validate_ruleset(game, probe).errors:
            return rule
    return None


def random_win_termination(sld, rng):
    """Timeout after a random limit, or a random non-avatar sprite count
    reaching zero."""
    avatar = sld.game.avatar.name
    candidates = sorted(n for n in sld.level_names() if n != avatar)
    if candidates and rng.random() < 0.5:
        name = candidates[rng.randrange(len(candidates))]
        return TerminationRule("SpriteCounter", (name,), 0, True)
    return TerminationRule("Timeout", (), rng.randint(*TIMEOUT_RANGE), True)


def random_termination(sld, rng):
    """Any termination rule; used by mutation."""
    rule = random_win_termination(sld, rng)
    if rng.random() < 0.5:
        rule = TerminationRule(rule.kind, rule.sprites, rule.limit, not rule.win)
    return rule


def generate_random(sld, rng):
    """Random ruleset: 1..5 interactions drawn over the level's sprites
    (second slot may be EOS), one win and one avatar-death lose rule."""
    avatar = sld.game.avatar.name
    n_sprites = len(sld.level_names())
    count = rng.randint(1, max(1, min(MAX_INTERACTIONS, n_sprites)))
    interactions = []
    for _ in range(count):
        rule = random_interaction(sld, rng)
        if rule is not None:
            interactions.append(rule)
    if not interactions:
        names = sorted(sld.level_names())
        interactions.append(InteractionRule(names[0], EOS, "killSprite"))
    terminations = [
        random_win_termination(sld, rng),
        TerminationRule("SpriteCounter", (avatar,), 0, False),
    ]
    return Ruleset(tuple(interactions), tuple(terminations))
