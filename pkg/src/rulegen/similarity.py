"""Expressive-range analysis: pairwise ruleset distance and per-game
minimum-distance profiles.

Rules are decomposed into labeled parts; a rule's mismatch against
another is the number of parts whose values differ.  Each rule greedily
takes its best match on the other side, the mismatch total is normalized
by part count, and the two directions are symmetrized by max, giving a
distance in [0,1] where 0 means identical rulesets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass


@dataclass(frozen=True)
class DistanceProfile:
    per_game: tuple
    generator_label: str = ""
    game_label: str = ""


def _interaction_parts(rule):
    parts = {
        "first": rule.first,
        "second": rule.second,
        "effect": rule.effect,
        "scoreChange": rule.score_change,
    }
    for key, val in rule.params.items():
        parts[f"param:{key}"] = val
    return parts


def _termination_parts(rule):
    parts = {"kind": rule.kind, "limit": rule.limit, "win": rule.win}
    for i, name in enumerate(rule.sprites):
        parts[f"sprite:{i}"] = name
    return parts


def _mismatch(parts_a, parts_b):
    return sum(1 for key, val in parts_a.items() if parts_b.get(key) != val)


def _directed(rules_a, rules_b):
    """Total best-match mismatch of a's rules against b's, plus a's part
    count.  A rule with no candidate on the other side mismatches fully."""
    mismatch = 0
    total = 0
    for parts in rules_a:
        total += len(parts)
        if rules_b:
            mismatch += min(_mismatch(parts, other) for other in rules_b)
        else:
            mismatch += len(parts)
    return mismatch, total


def ruleset_distance(a, b):
    """Symmetric distance in [0,1]; 0 iff structurally identical parts."""
    parts_a = ([_interaction_parts(r) for r in a.interactions],
               [_termination_parts(t) for t in a.terminations])
    parts_b = ([_interaction_parts(r) for r in b.interactions],
               [_termination_parts(t) for t in b.terminations])

    def direction(src, dst):
        mismatch = 0
        total = 0
        for src_rules, dst_rules in zip(src, dst):
            m, t = _directed(src_rules, dst_rules)
            mismatch += m
            total += t
        return mismatch / total if total else 0.0

    return max(direction(parts_a, parts_b), direction(parts_b, parts_a))


def min_distance_profile(games, generator_label="", game_label=""):
    """Per game: minimum distance to any other game in the list."""
    if len(games) < 2:
        raise ValueError("need at least two games to profile")
    per_game = []
    for i, g in enumerate(games):
        per_game.append(min(
            ruleset_distance(g, h) for j, h in enumerate(games) if j != i))
    return DistanceProfile(tuple(per_game), generator_label, game_label)


def write_profile_csv(path, profiles):
    """CSV rows (generator, game, minDistance), one per profiled game."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generator", "game", "minDistance"])
        for profile in profiles:
            for d in profile.per_game:
                writer.writerow(
                    [profile.generator_label, profile.game_label, f"{d:.6f}"])
