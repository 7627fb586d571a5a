import random

import pytest

from rulegen import fixtures
from rulegen.generators import make_sld
from rulegen.vgdl import parse_game, parse_level

# small closed game used by engine and agent tests: collect the gem, avoid
# nothing, walls bounce
MICRO_GAME = """\
BasicGame
    SpriteSet
        floor > Immovable
        wall > Immovable
        avatar > MovingAvatar
        gem > Immovable
    LevelMapping
        . > floor
        w > wall
        A > avatar
        g > gem
    InteractionSet
        avatar wall > stepBack
        gem avatar > killSprite scoreChange=1
    TerminationSet
        SpriteCounter stype=gem limit=0 win=True
        Timeout limit=100 win=False
"""

MICRO_LEVEL = """\
wwwww
w.A.w
w...w
w.g.w
wwwww
"""


def load_micro(game_text=MICRO_GAME, level_text=MICRO_LEVEL):
    game = parse_game(game_text)
    return game, parse_level(level_text, game.mapping)


@pytest.fixture(params=fixtures.FIXTURE_NAMES)
def fixture_name(request):
    return request.param


@pytest.fixture
def fixture_pair(fixture_name):
    return fixtures.load(fixture_name)


@pytest.fixture
def fixture_sld(fixture_pair):
    game, level = fixture_pair
    return make_sld(game, level)


@pytest.fixture
def micro():
    return load_micro()


@pytest.fixture
def rng():
    return random.Random(0)
