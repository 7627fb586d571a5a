"""Built-in test games: Aliens, Boulderdash and Solarfox, each with one
level.  These are small ports tailored to the engine's sprite subset."""

from importlib import resources

from ..vgdl import parse_game, parse_level

FIXTURE_NAMES = ("aliens", "boulderdash", "solarfox")


def _read(name):
    return resources.files(__package__).joinpath(name).read_text()


def load_game(name):
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return parse_game(_read(f"{name}_game.txt"))


def load_level(name, game=None):
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    game = game or load_game(name)
    return parse_level(_read(f"{name}_level.txt"), game.mapping)


def load(name):
    """Returns (GameDescription, LevelGrid) for a fixture name."""
    game = load_game(name)
    return game, load_level(name, game)
