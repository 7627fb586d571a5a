"""Hot simulation core: game state, frame stepping, collision resolution.

This module is deliberately plain Python with no third-party imports so it
can be compiled to a C extension (see setup.py) while staying importable
as-is.  `rulegen.engine` picks the compiled build when available; both
paths share this exact source, so trajectories are bit-identical.
"""

import random

NIL, UP, DOWN, LEFT, RIGHT, USE = "NIL", "UP", "DOWN", "LEFT", "RIGHT", "USE"
ACTIONS = (NIL, UP, DOWN, LEFT, RIGHT, USE)

_DIR_VECTORS = {
    "UP": (0, -1),
    "DOWN": (0, 1),
    "LEFT": (-1, 0),
    "RIGHT": (1, 0),
}
# fixed tie-break order for target-seeking movement
_MOVE_ORDER = ((0, -1), (0, 1), (-1, 0), (1, 0))

RUNNING, WIN, LOSE, TIMEOUT = "Running", "Win", "Lose", "Timeout"

_CULL_MARGIN = 10

_AVATAR_KINDS = frozenset({
    "FlakAvatar", "ShootAvatar", "MovingAvatar", "OngoingAvatar",
})


class EngineError(RuntimeError):
    """Engine-level contract violation (e.g. stepping a finished game)."""


class SpriteInstance:
    __slots__ = ("id", "name", "x", "y", "dx", "dy", "resources", "health",
                 "alive", "spawned")

    def __init__(self, iid, name, x, y, dx=0, dy=0):
        self.id = iid
        self.name = name
        self.x = x
        self.y = y
        self.dx = dx
        self.dy = dy
        self.resources = {}
        self.health = 1
        self.alive = True
        self.spawned = 0  # spawner bookkeeping

    def clone(self):
        c = SpriteInstance(self.id, self.name, self.x, self.y, self.dx, self.dy)
        c.resources = dict(self.resources)
        c.health = self.health
        c.alive = self.alive
        c.spawned = self.spawned
        return c


class SpriteSpec:
    """Per-defname behavior parameters resolved once at compile time."""

    __slots__ = ("name", "kind", "period", "prob", "total", "stype",
                 "orient", "moving", "is_avatar")

    def __init__(self, name, kind, params):
        self.name = name
        self.kind = kind
        self.stype = params.get("stype")
        self.prob = float(params.get("prob", 0.1))
        total = params.get("total", params.get("limit"))
        self.total = int(total) if total is not None else -1
        orient = params.get("orientation")
        self.orient = _DIR_VECTORS.get(orient, (0, 0))
        self.is_avatar = kind in _AVATAR_KINDS
        self.moving = self.is_avatar or kind in (
            "Passive", "Missile", "RandomNPC", "Chaser", "Fleeing", "Bomber")
        cooldown = params.get("cooldown")
        speed = params.get("speed")
        if cooldown is not None:
            self.period = max(1, int(cooldown))
        elif speed is not None and float(speed) > 0:
            self.period = max(1, int(round(1.0 / float(speed))))
        elif self.is_avatar or kind == "Missile":
            self.period = 1
        elif self.moving or kind in ("SpawnPoint", "Bomber"):
            self.period = 2
        else:
            self.period = 1


class CompiledGame:
    """Immutable, lookup-friendly form of a game description + ruleset."""

    __slots__ = ("specs", "avatar_name", "avatar_kind", "avatar_stype",
                 "interactions", "terminations", "width", "height",
                 "initial_placement")

    def __init__(self, specs, avatar_name, interactions, terminations, level):
        self.specs = specs
        self.avatar_name = avatar_name
        self.avatar_kind = specs[avatar_name].kind
        self.avatar_stype = specs[avatar_name].stype
        self.interactions = tuple(interactions)
        self.terminations = tuple(terminations)
        self.width = level.width
        self.height = level.height
        placement = []
        for y, row in enumerate(level.cells):
            for x, cell in enumerate(row):
                for name in cell:
                    placement.append((name, x, y))
        self.initial_placement = tuple(placement)

    def legal_actions(self):
        kind = self.avatar_kind
        if kind == "FlakAvatar":
            return (NIL, LEFT, RIGHT, USE)
        if kind == "ShootAvatar":
            return (NIL, UP, DOWN, LEFT, RIGHT, USE)
        return (NIL, UP, DOWN, LEFT, RIGHT)


def compile_game(game, level, ruleset=None):
    """Build a CompiledGame; `ruleset` overrides the description's own."""
    rs = ruleset if ruleset is not None else game.ruleset
    specs = {s.name: SpriteSpec(s.name, s.kind, s.params) for s in game.sprites}
    inter = tuple(
        (r.first, r.second, r.effect, r.score_change, r.params)
        for r in rs.interactions
    )
    term = tuple(
        (t.kind, t.sprites, t.limit, t.win) for t in rs.terminations
    )
    return CompiledGame(specs, game.avatar.name, inter, term, level)


class GameState:
    __slots__ = ("game", "frame", "score", "sprites", "rng", "status",
                 "triggered", "bad_frames", "next_id", "avatar_id",
                 "prev_positions")

    def __init__(self, game, seed):
        self.game = game
        self.frame = 0
        self.score = 0
        self.status = RUNNING
        self.triggered = set()
        self.bad_frames = 0
        self.rng = random.Random(seed)
        self.sprites = []
        self.next_id = 0
        self.avatar_id = -1
        self.prev_positions = {}
        for name, x, y in game.initial_placement:
            inst = self._spawn(name, x, y)
            if name == game.avatar_name:
                self.avatar_id = inst.id

    def _spawn(self, name, x, y, dx=0, dy=0):
        spec = self.game.specs[name]
        if spec.orient != (0, 0):
            dx, dy = spec.orient
        inst = SpriteInstance(self.next_id, name, x, y, dx, dy)
        self.next_id += 1
        self.sprites.append(inst)
        return inst

    # -- queries ----------------------------------------------------------

    def avatar(self):
        for s in self.sprites:
            if s.id == self.avatar_id and s.alive:
                return s
        return None

    def live_count(self, name):
        n = 0
        for s in self.sprites:
            if s.alive and s.name == name:
                n += 1
        return n

    def in_bounds(self, x, y):
        return 0 <= x < self.game.width and 0 <= y < self.game.height

    def copy(self):
        c = GameState.__new__(GameState)
        c.game = self.game
        c.frame = self.frame
        c.score = self.score
        c.status = self.status
        c.triggered = set(self.triggered)
        c.bad_frames = self.bad_frames
        c.rng = random.Random()
        c.rng.setstate(self.rng.getstate())
        c.sprites = [s.clone() for s in self.sprites]
        c.next_id = self.next_id
        c.avatar_id = self.avatar_id
        c.prev_positions = dict(self.prev_positions)
        return c

    # -- stepping ---------------------------------------------------------

    def step(self, action):
        if self.status != RUNNING:
            raise EngineError("cannot step a finished game")
        game = self.game
        prev = {}
        for s in self.sprites:
            if s.alive:
                prev[s.id] = (s.x, s.y)
        self.prev_positions = prev

        self._avatar_act(action)
        self._autonomous_act(len(prev))
        self._resolve_collisions(prev)
        self._check_bad_frame()
        status = check_termination(self)
        self.frame += 1
        if status != RUNNING:
            self.status = status
        return self

    def _avatar_act(self, action):
        av = self.avatar()
        if av is None:
            return
        game = self.game
        spec = game.specs[av.name]
        kind = spec.kind
        if self.frame % spec.period != 0:
            return
        vec = _DIR_VECTORS.get(action)
        if kind == "MovingAvatar" or kind == "ShootAvatar":
            if vec is not None:
                av.dx, av.dy = vec
                av.x += vec[0]
                av.y += vec[1]
            if action == USE and kind == "ShootAvatar" and spec.stype:
                dx = av.dx if (av.dx or av.dy) else 0
                dy = av.dy if (av.dx or av.dy) else -1
                bullet = self._spawn(spec.stype, av.x + dx, av.y + dy)
                if bullet.dx == 0 and bullet.dy == 0:
                    bullet.dx, bullet.dy = dx, dy
        elif kind == "FlakAvatar":
            if action == LEFT or action == RIGHT:
                av.dx, av.dy = vec
                av.x += vec[0]
            elif action == USE and spec.stype:
                self._spawn(spec.stype, av.x, av.y)
        elif kind == "OngoingAvatar":
            if vec is not None:
                av.dx, av.dy = vec
            av.x += av.dx
            av.y += av.dy

    def _autonomous_act(self, live_at_start):
        rng = self.rng
        game = self.game
        frame = self.frame
        # snapshot: sprites spawned this frame do not act
        actors = list(self.sprites)
        for inst in actors:
            if not inst.alive or inst.id == self.avatar_id:
                continue
            spec = game.specs[inst.name]
            kind = spec.kind
            if kind == "Immovable" or kind == "Passive" or kind == "Resource" \
                    or kind == "Door" or kind == "Portal":
                continue
            if frame % spec.period != 0:
                continue
            if kind == "Missile":
                inst.x += inst.dx
                inst.y += inst.dy
            elif kind == "SpawnPoint":
                if spec.stype and (spec.total < 0 or inst.spawned < spec.total):
                    if rng.random() < spec.prob:
                        self._spawn(spec.stype, inst.x, inst.y)
                        inst.spawned += 1
                        if spec.total >= 0 and inst.spawned >= spec.total:
                            inst.alive = False
                elif spec.total >= 0 and inst.spawned >= spec.total:
                    inst.alive = False
            elif kind == "Bomber":
                if spec.stype and rng.random() < spec.prob:
                    if spec.total < 0 or inst.spawned < spec.total:
                        self._spawn(spec.stype, inst.x, inst.y)
                        inst.spawned += 1
                inst.x += inst.dx
                inst.y += inst.dy
            elif kind == "RandomNPC":
                inst.dx, inst.dy = _MOVE_ORDER[rng.randrange(4)]
                inst.x += inst.dx
                inst.y += inst.dy
            elif kind == "Chaser":
                self._seek(inst, spec.stype, flee=False)
            elif kind == "Fleeing":
                self._seek(inst, spec.stype, flee=True)

    def _seek(self, inst, target_name, flee):
        if not target_name:
            return
        targets = [
            (s.x, s.y) for s in self.sprites
            if s.alive and s.name == target_name
        ]
        if not targets:
            return
        best_vec = None
        best_d = None
        for dx, dy in _MOVE_ORDER:
            nx = inst.x + dx
            ny = inst.y + dy
            d = min((nx - tx) * (nx - tx) + (ny - ty) * (ny - ty)
                    for tx, ty in targets)
            if best_d is None or (d > best_d if flee else d < best_d):
                best_d = d
                best_vec = (dx, dy)
        inst.dx, inst.dy = best_vec
        inst.x += best_vec[0]
        inst.y += best_vec[1]

    def _resolve_collisions(self, prev):
        game = self.game
        width = game.width
        height = game.height
        # occupancy and per-name indices over post-movement positions
        by_cell = {}
        by_name = {}
        oob = {}
        for s in self.sprites:
            if not s.alive:
                continue
            by_name.setdefault(s.name, []).append(s)
            if 0 <= s.x < width and 0 <= s.y < height:
                by_cell.setdefault((s.x, s.y), []).append(s)
            else:
                oob.setdefault(s.name, []).append(s)

        for idx, (first, second, effect, score, params) in enumerate(
                game.interactions):
            if second == "EOS":
                candidates = oob.get(first, ())
                for a in sorted(candidates, key=_cell_order):
                    if a.alive and not self.in_bounds(a.x, a.y):
                        if self._apply_effect(idx, effect, score, params,
                                              a, None, prev):
                            return
            else:
                firsts = by_name.get(first, ())
                for a in sorted(firsts, key=_cell_order):
                    if not a.alive:
                        continue
                    cell = by_cell.get((a.x, a.y), ())
                    for b in cell:
                        if b.alive and b.id != a.id and b.name == second:
                            if self._apply_effect(idx, effect, score, params,
                                                  a, b, prev):
                                return
                            break

    def _apply_effect(self, idx, effect, score, params, a, b, prev):
        """Fire one interaction; returns True when collision handling must
        stop for this frame (undoAll)."""
        self.score += score
        self.triggered.add(idx)
        if effect == "killSprite":
            a.alive = False
        elif effect == "killBoth":
            a.alive = False
            if b is not None:
                b.alive = False
        elif effect == "collectResource":
            a.alive = False
            if b is not None:
                cap = params.get("limit")
                if cap is None:
                    spec = self.game.specs.get(a.name)
                    cap = spec.total if spec is not None and spec.total >= 0 else None
                have = b.resources.get(a.name, 0) + 1
                if cap is not None:
                    have = min(have, int(cap))
                b.resources[a.name] = have
        elif effect == "transformTo":
            target = params.get("stype")
            if target in self.game.specs:
                a.name = target
                spec = self.game.specs[target]
                if spec.orient != (0, 0):
                    a.dx, a.dy = spec.orient
        elif effect == "stepBack":
            pos = prev.get(a.id)
            if pos is not None:
                a.x, a.y = pos
        elif effect == "undoAll":
            for s in self.sprites:
                if s.alive:
                    pos = prev.get(s.id)
                    if pos is not None:
                        s.x, s.y = pos
            return True
        elif effect == "reverseDirection":
            a.dx = -a.dx
            a.dy = -a.dy
        elif effect == "turnAround":
            pos = prev.get(a.id)
            if pos is not None:
                a.x, a.y = pos
            a.y += 1
            a.dx = -a.dx
            a.dy = -a.dy
        elif effect == "cloneSprite":
            c = self._spawn(a.name, a.x, a.y)
            c.dx, c.dy = a.dx, a.dy
        elif effect == "addHealthPoints":
            a.health += int(params.get("value", 1))
            cap = params.get("limit")
            if cap is not None:
                a.health = min(a.health, int(cap))
        elif effect == "teleportToExit":
            target = None
            if b is not None:
                target = self.game.specs[b.name].stype
            if target:
                exits = [s for s in self.sprites if s.alive and s.name == target]
                if exits:
                    chosen = exits[self.rng.randrange(len(exits))] \
                        if len(exits) > 1 else exits[0]
                    a.x, a.y = chosen.x, chosen.y
        return False

    def _check_bad_frame(self):
        game = self.game
        width = game.width
        height = game.height
        bad = False
        for s in self.sprites:
            if not s.alive:
                continue
            if 0 <= s.x < width and 0 <= s.y < height:
                continue
            spec = game.specs[s.name]
            if spec.kind != "Immovable":
                bad = True
            if (s.x < -_CULL_MARGIN or s.x >= width + _CULL_MARGIN or
                    s.y < -_CULL_MARGIN or s.y >= height + _CULL_MARGIN):
                s.alive = False
        if bad:
            self.bad_frames += 1


def _cell_order(inst):
    return (inst.y, inst.x, inst.id)


def check_termination(state):
    """First satisfied termination rule wins; Running otherwise.

    The timeout status is reported as Win/Lose per the rule's flag; a
    rule-less game never terminates on its own.
    """
    for kind, sprites, limit, win in state.game.terminations:
        fired = False
        if kind == "Timeout":
            fired = state.frame >= limit
        elif kind == "SpriteCounter":
            fired = state.live_count(sprites[0]) <= limit
        elif kind == "MultiSpriteCounter":
            total = 0
            for name in sprites:
                total += state.live_count(name)
            fired = total <= limit
        if fired:
            return WIN if win else LOSE
    return RUNNING


def run_playthrough(state, policy, max_steps):
    """Advance `state` with actions from `policy(state)` until terminal or
    `max_steps` frames elapse; returns the number of frames stepped."""
    steps = 0
    while state.status == RUNNING and steps < max_steps:
        state.step(policy(state))
        steps += 1
    return steps
