import random

import pytest

from rulegen.analyzer import (
    SLDescription, avatar_bullet, categorize, compute_stats, moving_sprites,
    spawn_closure,
)
from rulegen.vgdl import EOS, parse_game, parse_level

from conftest import load_micro


def micro_sld(level_text=None):
    if level_text is None:
        game, level = load_micro()
    else:
        game, level = load_micro(level_text=level_text)
    return SLDescription(game, level)


def stats_by_name(sld):
    return {st.name: st for st in compute_stats(sld)}


def test_compute_stats_counts_and_coverage():
    sld = micro_sld()
    st = stats_by_name(sld)
    assert st["avatar"].count == 1
    assert st["gem"].count == 1
    assert st["wall"].count == 16
    assert st["wall"].coverage == pytest.approx(16 / 25)
    assert st["gem"].coverage == pytest.approx(1 / 25)


def test_border_detection():
    sld = micro_sld()
    st = stats_by_name(sld)
    assert st["wall"].on_border
    assert not st["floor"].on_border
    assert not st["gem"].on_border


def test_partial_border_not_wall():
    # knock one wall cell out of the border: no longer a wall candidate
    sld = micro_sld("wwwww\nw.A.w\nw...w\nw.g.w\nwwww.")
    st = stats_by_name(sld)
    assert not st["wall"].on_border
    cats = categorize(compute_stats(sld), sld, random.Random(0))
    assert cats.wall == EOS


def test_categorize_micro():
    # 8x6 keeps the border at exactly half the cells, inside the wall cutoff
    sld = micro_sld(
        "wwwwwwww\nw.A....w\nw......w\nw.g....w\nw......w\nwwwwwwww")
    cats = categorize(compute_stats(sld), sld, random.Random(0))
    assert cats.avatar == "avatar"
    assert cats.wall == "wall"
    assert cats.score == "gem"
    assert cats.spike is None
    assert cats.collectibles == ["gem"]


def test_high_coverage_border_sprite_rejected():
    # a 5x5 level where "wall" covers 64% of cells: falls back to EOS
    sld = micro_sld("wwwww\nwwAww\nww.ww\nwwgww\nwwwww")
    st = stats_by_name(sld)
    assert st["wall"].coverage > 0.5
    cats = categorize(compute_stats(sld), sld, random.Random(0))
    assert cats.wall == EOS


def test_score_spike_drawn_without_replacement():
    game = parse_game("""\
BasicGame
    SpriteSet
        wall > Immovable
        a > Immovable
        b > Immovable
        avatar > MovingAvatar
    LevelMapping
        w > wall
        a > a
        b > b
        A > avatar
        . > wall
    InteractionSet
        avatar wall > stepBack
    TerminationSet
        Timeout limit=10 win=False
""")
    level = parse_level("wwwww\nwaAbw\nwwwww", game.mapping)
    sld = SLDescription(game, level)
    seen = set()
    for seed in range(20):
        cats = categorize(compute_stats(sld), sld, random.Random(seed))
        assert {cats.score, cats.spike} == {"a", "b"}
        seen.add(cats.score)
    assert seen == {"a", "b"}  # both orders occur across seeds


def test_spawn_closure_follows_chains(fixture_sld):
    names = spawn_closure(fixture_sld, fixture_sld.level_names())
    if "portal" in fixture_sld.level_names():  # the shooter fixture
        assert "alien" in names
        assert "bomb" in names  # two hops: portal -> alien -> bomb


def test_avatar_bullet():
    assert avatar_bullet(micro_sld()) is None


def test_moving_sprites_includes_spawned_and_bullets():
    from rulegen import fixtures
    game, level = fixtures.load("aliens")
    sld = SLDescription(game, level)
    names = moving_sprites(sld)
    assert {"alien", "bomb", "sam", "avatar"} <= set(names)


def test_no_avatar_raises():
    sld = micro_sld("wwwww\nw.g.w\nwwwww")
    with pytest.raises(ValueError):
        categorize(compute_stats(sld), sld, random.Random(0))
