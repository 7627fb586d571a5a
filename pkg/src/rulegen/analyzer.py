"""Level analysis: sprite statistics and the category view the
constructive generator works from."""

from __future__ import annotations

from dataclasses import dataclass, field

from .vgdl import AVATAR_KINDS, EOS, MOVING_KINDS, SHOOTING_AVATAR_KINDS


@dataclass
class SLDescription:
    """Generator-facing view: sprite defs, the level as a grid of name
    lists, and a simulate hook (ruleset, agent, seed) -> SimulationOutcome."""

    game: object
    level: object
    simulate: object = None

    @property
    def sprites(self):
        return self.game.sprites

    def level_names(self):
        return self.level.names_present()


@dataclass(frozen=True)
class SpriteStats:
    name: str
    kind: str
    count: int
    coverage: float
    on_border: bool


@dataclass
class SpriteCategories:
    avatar: str
    wall: str = EOS
    score: str | None = None
    spike: str | None = None
    fleeing: list = field(default_factory=list)
    bombers: list = field(default_factory=list)
    chasers: list = field(default_factory=list)
    random_npcs: list = field(default_factory=list)
    spawners: list = field(default_factory=list)
    portals: list = field(default_factory=list)
    doors: list = field(default_factory=list)
    movables: list = field(default_factory=list)
    resources: list = field(default_factory=list)
    collectibles: list = field(default_factory=list)


def compute_stats(sld):
    """Per-sprite level statistics: instance count, cell coverage fraction
    and whether the sprite occupies every border cell."""
    level = sld.level
    total_cells = level.width * level.height
    if total_cells == 0:
        raise ValueError("empty level")
    counts = {s.name: 0 for s in sld.sprites}
    occupied = {s.name: 0 for s in sld.sprites}
    border_hits = {s.name: 0 for s in sld.sprites}
    border_cells = 0
    for y, row in enumerate(level.cells):
        for x, cell in enumerate(row):
            on_border = (x == 0 or y == 0 or
                         x == level.width - 1 or y == level.height - 1)
            if on_border:
                border_cells += 1
            seen_here = set()
            for name in cell:
                counts[name] += 1
                if name not in seen_here:
                    occupied[name] += 1
                    seen_here.add(name)
                    if on_border:
                        border_hits[name] += 1
    return [
        SpriteStats(
            name=s.name,
            kind=s.kind,
            count=counts[s.name],
            coverage=occupied[s.name] / total_cells,
            on_border=border_cells > 0 and border_hits[s.name] == border_cells,
        )
        for s in sld.sprites
    ]


def categorize(stats, sld, rng):
    """Partition level sprites into the roles the constructive generator
    uses.  Wall: an Immovable covering every border cell with at most 50%
    total coverage, else EOS.  Score/spike: two distinct low-coverage
    (<=10%) Immovables drawn without replacement."""
    present = {st.name for st in stats if st.count > 0}
    present = spawn_closure(sld, present)
    kinds = {s.name: s.kind for s in sld.sprites}

    avatar = None
    for s in sld.sprites:
        if s.kind in AVATAR_KINDS and s.name in present:
            avatar = s.name
    if avatar is None:
        raise ValueError("no avatar present in the level")

    cats = SpriteCategories(avatar=avatar)

    wall_candidates = sorted(
        st.name for st in stats
        if st.kind == "Immovable" and st.count > 0 and st.on_border
        and st.coverage <= 0.5
    )
    if wall_candidates:
        cats.wall = wall_candidates[0]

    small = sorted(
        st.name for st in stats
        if st.kind == "Immovable" and st.count > 0 and st.coverage <= 0.1
        and st.name != cats.wall
    )
    if len(small) == 1:
        cats.score = small[0]
    elif small:
        picks = rng.sample(small, 2)
        cats.score, cats.spike = picks[0], picks[1]

    for name in sorted(present):
        kind = kinds.get(name)
        if kind == "Fleeing":
            cats.fleeing.append(name)
        elif kind == "Bomber":
            cats.bombers.append(name)
        elif kind == "Chaser":
            cats.chasers.append(name)
        elif kind == "RandomNPC":
            cats.random_npcs.append(name)
        elif kind == "SpawnPoint":
            cats.spawners.append(name)
        elif kind == "Door":
            cats.doors.append(name)
        elif kind == "Portal":
            cats.portals.append(name)
        elif kind == "Resource":
            cats.resources.append(name)
        elif kind in ("Passive", "Missile") and name != avatar:
            cats.movables.append(name)
    if cats.score:
        cats.collectibles.append(cats.score)
    return cats


def spawn_closure(sld, names):
    """Names plus everything reachable through spawner/bomber outputs."""
    out = set(names)
    changed = True
    while changed:
        changed = False
        for s in sld.sprites:
            if s.name in out and s.kind in ("SpawnPoint", "Bomber"):
                target = s.params.get("stype")
                if target and target not in out:
                    out.add(target)
                    changed = True
    return out


def avatar_bullet(sld):
    """Name of the projectile the avatar shoots, if it shoots at all."""
    av = sld.game.avatar
    if av.kind in SHOOTING_AVATAR_KINDS:
        return av.params.get("stype")
    return None


def moving_sprites(sld, extra=()):
    """Names of everything that can leave its cell: moving kinds present in
    the level, spawner/bomber outputs, and any extras (e.g. bullets)."""
    names = set(extra)
    present = spawn_closure(sld, sld.level_names())
    for s in sld.sprites:
        if s.kind in MOVING_KINDS and s.name in present:
            names.add(s.name)
    bullet = avatar_bullet(sld)
    if bullet:
        names.add(bullet)
    return sorted(names)
