"""Constructive ruleset generator: fills in stock interactions per sprite
category (resources, score/spike, NPCs, spawners, portals, movables,
walls, avatar bullets) and finishes with a win/lose pair."""

from __future__ import annotations

from ..analyzer import avatar_bullet, categorize, compute_stats, moving_sprites
from ..vgdl import EOS, InteractionRule, Ruleset, TerminationRule


def _spawn_sources(sld, names, present):
    """Closure of `names` with any present spawner-like sprite that emits a
    member; keeps sprite-counter win rules from firing on frame 0 when the
    counted sprites only appear mid-game."""
    out = set(names)
    changed = True
    while changed:
        changed = False
        for s in sld.sprites:
            if s.name in present and s.name not in out:
                if s.params.get("stype") in out and s.kind in (
                        "SpawnPoint", "Bomber"):
                    out.add(s.name)
                    changed = True
    return out


def generate_constructive(sld, rng):
    level_counts = {}
    for row in sld.level.cells:
        for cell in row:
            for name in cell:
                level_counts[name] = level_counts.get(name, 0) + 1
    present = set(level_counts)

    stats = compute_stats(sld)
    cats = categorize(stats, sld, rng)
    avatar = cats.avatar
    kinds = {s.name: s.kind for s in sld.sprites}
    params = {s.name: s.params for s in sld.sprites}

    rules = []
    harmful = set()
    collectibles = list(cats.collectibles)

    # resources are always collectible
    for name in cats.resources:
        rules.append(InteractionRule(name, avatar, "collectResource"))

    # low-coverage immovables: one scoring sprite, one 50/50 spike
    if cats.score:
        rules.append(InteractionRule(cats.score, avatar, "killSprite", 1))
    if cats.spike:
        if rng.random() < 0.5:
            rules.append(InteractionRule(avatar, cats.spike, "killSprite"))
            harmful.add(cats.spike)
        else:
            rules.append(InteractionRule(cats.spike, avatar, "killSprite", 2))
            collectibles.append(cats.spike)

    # NPCs by kind
    for name in cats.fleeing:
        chaser = params[name].get("stype") or avatar
        rules.append(InteractionRule(name, chaser, "killSprite", 1))
    for name in cats.bombers:
        rules.append(InteractionRule(avatar, name, "killSprite"))
        harmful.add(name)
        spawn = params[name].get("stype")
        if spawn:
            if rng.random() < 0.5:
                rules.append(InteractionRule(spawn, avatar, "killSprite", 1))
            else:
                rules.append(InteractionRule(avatar, spawn, "killSprite"))
                harmful.add(spawn)
    for name in cats.chasers:
        chased = params[name].get("stype")
        if not chased:
            continue
        if chased != avatar and rng.random() < 0.5:
            rules.append(InteractionRule(name, chased, "cloneSprite"))
        rules.append(InteractionRule(chased, name, "killSprite"))
        if chased == avatar:
            harmful.add(name)
    for name in cats.random_npcs:
        if rng.random() < 0.5:
            rules.append(InteractionRule(avatar, name, "killSprite"))
            harmful.add(name)
        else:
            rules.append(InteractionRule(name, avatar, "killSprite", 1))

    # spawner products
    for name in cats.spawners:
        spawn = params[name].get("stype")
        if not spawn:
            continue
        if rng.random() < 0.5:
            rules.append(InteractionRule(avatar, spawn, "killSprite"))
            harmful.add(spawn)
        else:
            rules.append(InteractionRule(spawn, avatar, "killSprite", 1))

    # portals: doors die to the avatar, true portals teleport it
    for name in cats.doors:
        rules.append(InteractionRule(name, avatar, "killSprite", 1))
    for name in cats.portals:
        if params[name].get("stype"):
            rules.append(InteractionRule(avatar, name, "teleportToExit"))

    # loose movables
    for name in cats.movables:
        if rng.random() < 0.5:
            rules.append(InteractionRule(name, avatar, "killSprite", 1))
        else:
            rules.append(InteractionRule(avatar, name, "killSprite"))
            harmful.add(name)

    # walls: level-resident movers (avatar included) always bounce, so a
    # self-propelled avatar can't drift into a lethal wall and wandering
    # NPCs can't burn themselves up and trigger a win with no player input;
    # spawned projectiles either bounce or die at walls
    movers = moving_sprites(sld)
    wall_effect = "stepBack" if rng.random() < 0.5 else "killSprite"
    for name in movers:
        effect = wall_effect if name not in present else "stepBack"
        rules.append(InteractionRule(name, cats.wall, effect))

    # avatar bullets clear whatever can kill the avatar
    bullet = avatar_bullet(sld)
    if bullet:
        for name in sorted(harmful):
            rules.append(InteractionRule(name, bullet, "killSprite", 1))

    # terminations: one applicable win, avatar-death lose
    win_options = []
    for name in cats.doors:
        if level_counts.get(name, 0) > 0:
            win_options.append(
                TerminationRule("SpriteCounter", (name,), 0, True))
    for group in (harmful, set(cats.fleeing), set(collectibles)):
        if not group:
            continue
        counted = sorted(_spawn_sources(sld, group, present))
        if sum(level_counts.get(n, 0) for n in counted) == 0:
            continue
        if len(counted) == 1:
            win_options.append(
                TerminationRule("SpriteCounter", (counted[0],), 0, True))
        else:
            win_options.append(
                TerminationRule("MultiSpriteCounter", tuple(counted), 0, True))
    win_options.append(
        TerminationRule("Timeout", (), rng.randint(500, 1500), True))
    win = win_options[rng.randrange(len(win_options))]
    terminations = (win, TerminationRule("SpriteCounter", (avatar,), 0, False))
    return Ruleset(tuple(rules), terminations)
