"""Data model, parser and serializer for the VGDL subset.

A game description has four sections (SpriteSet, LevelMapping,
InteractionSet, TerminationSet) under a `BasicGame` header, indented with
4 spaces.  A ruleset file carries only the InteractionSet/TerminationSet
sections.  Levels are rectangular character grids decoded through the
level mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

EOS = "EOS"

SPRITE_KINDS = frozenset({
    "Immovable", "Passive", "Resource", "Door", "Portal", "SpawnPoint",
    "Bomber", "Missile", "RandomNPC", "Chaser", "Fleeing",
    "FlakAvatar", "ShootAvatar", "MovingAvatar", "OngoingAvatar",
})

AVATAR_KINDS = frozenset({
    "FlakAvatar", "ShootAvatar", "MovingAvatar", "OngoingAvatar",
})

# Kinds that move on their own or can be pushed around; Immovable and the
# stationary structural kinds never leave their cell.
MOVING_KINDS = frozenset({
    "Passive", "Missile", "RandomNPC", "Chaser", "Fleeing", "Bomber",
}) | AVATAR_KINDS

SHOOTING_AVATAR_KINDS = frozenset({"FlakAvatar", "ShootAvatar"})

EFFECTS = frozenset({
    "killSprite", "killBoth", "collectResource", "transformTo", "stepBack",
    "undoAll", "reverseDirection", "turnAround", "cloneSprite",
    "addHealthPoints", "teleportToExit",
})

TERMINATION_KINDS = frozenset({"Timeout", "SpriteCounter", "MultiSpriteCounter"})

DIRECTIONS = ("UP", "DOWN", "LEFT", "RIGHT")

# Parameters that hold sprite-name references (validated against the set).
_STYPE_PARAMS = frozenset({"stype"})


class VGDLParseError(ValueError):
    """Raised on malformed game/level text; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class SpriteDef:
    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))


@dataclass(frozen=True)
class InteractionRule:
    first: str
    second: str
    effect: str
    score_change: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))


@dataclass(frozen=True)
class TerminationRule:
    kind: str
    sprites: tuple = ()
    limit: int = 0
    win: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sprites", tuple(self.sprites))


@dataclass(frozen=True)
class Ruleset:
    interactions: tuple = ()
    terminations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "interactions", tuple(self.interactions))
        object.__setattr__(self, "terminations", tuple(self.terminations))


@dataclass(frozen=True)
class LevelMapping:
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "entries", {c: tuple(v) for c, v in self.entries.items()}
        )


@dataclass(frozen=True)
class GameDescription:
    sprites: tuple
    ruleset: Ruleset
    mapping: LevelMapping

    def __post_init__(self):
        object.__setattr__(self, "sprites", tuple(self.sprites))

    def sprite(self, name):
        for s in self.sprites:
            if s.name == name:
                return s
        raise KeyError(name)

    def sprite_names(self):
        return [s.name for s in self.sprites]

    @property
    def avatar(self):
        for s in self.sprites:
            if s.kind in AVATAR_KINDS:
                return s
        raise ValueError("no avatar sprite defined")

    def with_ruleset(self, ruleset):
        return GameDescription(self.sprites, ruleset, self.mapping)


@dataclass(frozen=True)
class LevelGrid:
    width: int
    height: int
    cells: tuple  # cells[y][x] -> tuple of sprite names

    def __post_init__(self):
        object.__setattr__(
            self, "cells", tuple(tuple(tuple(c) for c in row) for row in self.cells)
        )

    def names_present(self):
        present = set()
        for row in self.cells:
            for cell in row:
                present.update(cell)
        return present


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors


# ---------------------------------------------------------------------------
# parsing

_INT_PARAMS = frozenset({"cooldown", "limit", "total", "value"})
_FLOAT_PARAMS = frozenset({"prob", "speed"})


def _parse_value(key, raw, line):
    if key in _INT_PARAMS:
        try:
            return int(raw)
        except ValueError:
            raise VGDLParseError(f"parameter {key} expects an integer, got {raw!r}", line)
    if key in _FLOAT_PARAMS:
        try:
            return float(raw)
        except ValueError:
            raise VGDLParseError(f"parameter {key} expects a number, got {raw!r}", line)
    if key == "win":
        if raw not in ("True", "False"):
            raise VGDLParseError(f"win expects True or False, got {raw!r}", line)
        return raw == "True"
    return raw


def _parse_params(tokens, line):
    params = {}
    for tok in tokens:
        if "=" not in tok:
            raise VGDLParseError(f"expected key=value, got {tok!r}", line)
        key, _, raw = tok.partition("=")
        if not key or not raw:
            raise VGDLParseError(f"expected key=value, got {tok!r}", line)
        params[key] = _parse_value(key, raw, line)
    return params


def _indent_of(line):
    return len(line) - len(line.lstrip(" "))


def _section_lines(text):
    """Yield (lineno, indent, stripped) skipping blanks and comments."""
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        if "\t" in raw[:_indent_of(raw) + 1]:
            raise VGDLParseError("tabs are not allowed in indentation", i)
        yield i, _indent_of(stripped), stripped.strip()


def _parse_sprite_line(body, line):
    if ">" not in body:
        raise VGDLParseError("sprite line needs '<name> > <Kind> ...'", line)
    left, _, right = body.partition(">")
    name = left.strip()
    tokens = right.split()
    if not name or not tokens:
        raise VGDLParseError("sprite line needs '<name> > <Kind> ...'", line)
    kind = tokens[0]
    if kind not in SPRITE_KINDS:
        raise VGDLParseError(f"unknown sprite kind {kind!r}", line)
    return SpriteDef(name, kind, _parse_params(tokens[1:], line))


def _parse_mapping_line(body, line):
    left, sep, right = body.partition(">")
    char = left.strip()
    names = right.split()
    if not sep or len(char) != 1:
        raise VGDLParseError("mapping line needs '<char> > <name> ...'", line)
    # a bare '<char> >' maps to an empty cell
    return char, names


def parse_interaction_line(body, line=None):
    left, sep, right = body.partition(">")
    pair = left.split()
    tokens = right.split()
    if not sep or len(pair) != 2 or not tokens:
        raise VGDLParseError("interaction needs '<name> <name> > <effect> ...'", line)
    first, second = pair
    effect = tokens[0]
    if effect not in EFFECTS:
        raise VGDLParseError(f"unknown effect {effect!r}", line)
    params = _parse_params(tokens[1:], line)
    score = params.pop("scoreChange", 0)
    try:
        score = int(score)
    except (TypeError, ValueError):
        raise VGDLParseError(f"scoreChange expects an integer, got {score!r}", line)
    return InteractionRule(first, second, effect, score, params)


def parse_termination_line(body, line=None):
    tokens = body.split()
    kind = tokens[0]
    if kind not in TERMINATION_KINDS:
        raise VGDLParseError(f"unknown termination kind {kind!r}", line)
    params = _parse_params(tokens[1:], line)
    sprites = []
    if kind == "SpriteCounter":
        if "stype" not in params:
            raise VGDLParseError("SpriteCounter needs stype=<name>", line)
        sprites = [params.pop("stype")]
    elif kind == "MultiSpriteCounter":
        i = 1
        while f"stype{i}" in params:
            sprites.append(params.pop(f"stype{i}"))
            i += 1
        if len(sprites) < 2:
            raise VGDLParseError("MultiSpriteCounter needs stype1=.. stype2=..", line)
    if "win" not in params:
        raise VGDLParseError("termination needs win=True|False", line)
    win = params.pop("win")
    limit = int(params.pop("limit", 0))
    if limit < 0:
        raise VGDLParseError("limit must be >= 0", line)
    if params:
        raise VGDLParseError(f"unexpected parameters {sorted(params)}", line)
    return TerminationRule(kind, tuple(sprites), limit, win)


_SECTIONS = ("SpriteSet", "LevelMapping", "InteractionSet", "TerminationSet")


def _split_sections(text, required, allow_header=True):
    sections = {}
    current = None
    saw_root = False
    for lineno, indent, body in _section_lines(text):
        if indent == 0 and body == "BasicGame" and allow_header:
            if saw_root:
                raise VGDLParseError("duplicate BasicGame header", lineno)
            saw_root = True
            continue
        if body in _SECTIONS and indent <= 4:
            if body in sections:
                raise VGDLParseError(f"duplicate section {body}", lineno)
            sections[body] = []
            current = body
            continue
        if current is None:
            raise VGDLParseError(f"unexpected line outside any section: {body!r}", lineno)
        sections[current].append((lineno, body))
    missing = [s for s in required if s not in sections]
    if missing:
        raise VGDLParseError(f"missing section(s): {', '.join(missing)}")
    return sections


def parse_game(text):
    """Parse a full game description; raises VGDLParseError on bad input."""
    sections = _split_sections(text, required=_SECTIONS)

    sprites = []
    seen = set()
    for lineno, body in sections["SpriteSet"]:
        sd = _parse_sprite_line(body, lineno)
        if sd.name in seen:
            raise VGDLParseError(f"duplicate sprite name {sd.name!r}", lineno)
        if sd.name == EOS:
            raise VGDLParseError("EOS is reserved for the screen boundary", lineno)
        seen.add(sd.name)
        sprites.append(sd)
    if sum(1 for s in sprites if s.kind in AVATAR_KINDS) != 1:
        raise VGDLParseError("game must define exactly one avatar sprite")

    entries = {}
    for lineno, body in sections["LevelMapping"]:
        char, names = _parse_mapping_line(body, lineno)
        for n in names:
            if n not in seen:
                raise VGDLParseError(f"mapping references unknown sprite {n!r}", lineno)
        entries[char] = names

    interactions = [
        parse_interaction_line(body, lineno)
        for lineno, body in sections["InteractionSet"]
    ]
    terminations = [
        parse_termination_line(body, lineno)
        for lineno, body in sections["TerminationSet"]
    ]

    for s in sprites:
        for key, val in s.params.items():
            if key in _STYPE_PARAMS and val not in seen:
                raise VGDLParseError(
                    f"sprite {s.name!r} references unknown sprite {val!r}"
                )
            if key == "prob" and not 0.0 <= float(val) <= 1.0:
                raise VGDLParseError(f"sprite {s.name!r}: prob must lie in [0,1]")

    return GameDescription(
        sprites=tuple(sprites),
        ruleset=Ruleset(tuple(interactions), tuple(terminations)),
        mapping=LevelMapping(entries),
    )


def parse_ruleset(text):
    """Parse a ruleset exchange file (InteractionSet/TerminationSet only)."""
    sections = _split_sections(
        text, required=("InteractionSet", "TerminationSet"), allow_header=True
    )
    for extra in ("SpriteSet", "LevelMapping"):
        if extra in sections:
            raise VGDLParseError(f"ruleset file must not contain {extra}")
    interactions = [
        parse_interaction_line(body, lineno)
        for lineno, body in sections["InteractionSet"]
    ]
    terminations = [
        parse_termination_line(body, lineno)
        for lineno, body in sections["TerminationSet"]
    ]
    return Ruleset(tuple(interactions), tuple(terminations))


def parse_level(text, mapping):
    """Decode a rectangular character block into a LevelGrid."""
    rows = [r.rstrip("\r") for r in text.splitlines()]
    while rows and not rows[-1].strip():
        rows.pop()
    if not rows:
        raise VGDLParseError("empty level")
    width = len(rows[0])
    cells = []
    for y, row in enumerate(rows):
        if len(row) != width:
            raise VGDLParseError(
                f"ragged level row: expected width {width}, got {len(row)}", y + 1
            )
        out_row = []
        for ch in row:
            if ch == " ":
                out_row.append(())
            elif ch in mapping.entries:
                out_row.append(tuple(mapping.entries[ch]))
            else:
                raise VGDLParseError(f"unmapped level character {ch!r}", y + 1)
        cells.append(tuple(out_row))
    return LevelGrid(width=width, height=len(rows), cells=tuple(cells))


# ---------------------------------------------------------------------------
# serialization

def _format_value(val):
    if isinstance(val, bool):
        return "True" if val else "False"
    if isinstance(val, float):
        return repr(val)
    return str(val)


def serialize_interaction(rule):
    parts = [f"{rule.first} {rule.second} > {rule.effect}"]
    if rule.score_change != 0:
        parts.append(f"scoreChange={rule.score_change}")
    for key in sorted(rule.params):
        parts.append(f"{key}={_format_value(rule.params[key])}")
    return " ".join(parts)


def serialize_termination(rule):
    parts = [rule.kind]
    if rule.kind == "SpriteCounter":
        parts.append(f"stype={rule.sprites[0]}")
    elif rule.kind == "MultiSpriteCounter":
        for i, name in enumerate(rule.sprites, start=1):
            parts.append(f"stype{i}={name}")
    parts.append(f"limit={rule.limit}")
    parts.append(f"win={_format_value(rule.win)}")
    return " ".join(parts)


def serialize_ruleset(ruleset):
    """Render a Ruleset as the exchange format; parse_ruleset round-trips it."""
    lines = ["InteractionSet"]
    lines += [f"    {serialize_interaction(r)}" for r in ruleset.interactions]
    lines.append("TerminationSet")
    lines += [f"    {serialize_termination(t)}" for t in ruleset.terminations]
    return "\n".join(lines) + "\n"


def serialize_game(game):
    lines = ["BasicGame", "    SpriteSet"]
    for s in game.sprites:
        parts = [f"{s.name} > {s.kind}"]
        parts += [f"{k}={_format_value(v)}" for k, v in sorted(s.params.items())]
        lines.append("        " + " ".join(parts))
    lines.append("    LevelMapping")
    for char, names in game.mapping.entries.items():
        lines.append(f"        {char} > {' '.join(names)}")
    lines.append("    InteractionSet")
    lines += [f"        {serialize_interaction(r)}" for r in game.ruleset.interactions]
    lines.append("    TerminationSet")
    lines += [f"        {serialize_termination(t)}" for t in game.ruleset.terminations]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation

def validate_ruleset(game, ruleset, level=None):
    """Static checks for a ruleset against a game's sprite set.

    Errors block the engine (undefined sprites, malformed params, no
    terminations); warnings flag rules that can never matter (duplicates,
    rules on sprites absent from the given level).
    """
    report = ValidationReport()
    known = set(game.sprite_names())

    def check_name(name, ctx, allow_eos=False):
        if name == EOS:
            if not allow_eos:
                report.errors.append(f"{ctx}: EOS not allowed here")
            return
        if name not in known:
            report.errors.append(f"{ctx}: undefined sprite {name!r}")

    for i, rule in enumerate(ruleset.interactions):
        ctx = f"interaction {i}"
        if rule.effect not in EFFECTS:
            report.errors.append(f"{ctx}: unknown effect {rule.effect!r}")
            continue
        if rule.first == EOS:
            report.errors.append(f"{ctx}: first sprite may not be EOS")
        else:
            check_name(rule.first, ctx)
        check_name(rule.second, ctx, allow_eos=True)
        if rule.effect == "transformTo":
            stype = rule.params.get("stype")
            if stype is None:
                report.errors.append(f"{ctx}: transformTo requires stype")
            else:
                check_name(stype, ctx)
        if rule.effect == "teleportToExit":
            if rule.second == EOS:
                report.errors.append(f"{ctx}: teleportToExit needs a portal sprite")
            elif rule.second in known:
                target = game.sprite(rule.second).params.get("stype")
                if target is None:
                    report.errors.append(
                        f"{ctx}: teleportToExit portal {rule.second!r} has no stype"
                    )
        if rule.effect == "addHealthPoints":
            value = rule.params.get("value", 1)
            if not isinstance(value, int):
                report.errors.append(f"{ctx}: addHealthPoints value must be an integer")

    if not ruleset.terminations:
        report.errors.append("ruleset has no termination rules")
    for i, rule in enumerate(ruleset.terminations):
        ctx = f"termination {i}"
        if rule.kind not in TERMINATION_KINDS:
            report.errors.append(f"{ctx}: unknown kind {rule.kind!r}")
            continue
        if rule.kind == "Timeout" and rule.sprites:
            report.errors.append(f"{ctx}: Timeout takes no sprites")
        if rule.kind == "SpriteCounter" and len(rule.sprites) != 1:
            report.errors.append(f"{ctx}: SpriteCounter takes exactly one sprite")
        if rule.kind == "MultiSpriteCounter" and len(rule.sprites) < 2:
            report.errors.append(f"{ctx}: MultiSpriteCounter takes at least two sprites")
        for name in rule.sprites:
            check_name(name, ctx)
        if rule.limit < 0:
            report.errors.append(f"{ctx}: negative limit")

    seen_rules = set()
    for i, rule in enumerate(ruleset.interactions):
        key = ("i", rule.first, rule.second, rule.effect, rule.score_change,
               tuple(sorted(rule.params.items())))
        if key in seen_rules:
            report.warnings.append(f"interaction {i}: duplicate rule")
        seen_rules.add(key)
    for i, rule in enumerate(ruleset.terminations):
        key = ("t", rule.kind, rule.sprites, rule.limit, rule.win)
        if key in seen_rules:
            report.warnings.append(f"termination {i}: duplicate rule")
        seen_rules.add(key)

    if level is not None:
        present = level.names_present() | {EOS}
        # sprites reachable through spawners/avatars can appear mid-game
        reachable = set(present)
        changed = True
        while changed:
            changed = False
            for s in game.sprites:
                if s.name in reachable:
                    target = s.params.get("stype")
                    if target and target not in reachable:
                        reachable.add(target)
                        changed = True
            for rule in ruleset.interactions:
                if rule.effect == "transformTo" and rule.first in reachable:
                    target = rule.params.get("stype")
                    if target and target not in reachable:
                        reachable.add(target)
                        changed = True
        for i, rule in enumerate(ruleset.interactions):
            names = {rule.first, rule.second}
            if not names <= reachable:
                report.warnings.append(
                    f"interaction {i}: unreachable (sprite never appears in level)"
                )
    return report
