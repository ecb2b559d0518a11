import pytest

from errors import UsageError
from presets import PRESET_NAMES, preset


@pytest.mark.parametrize("name", [
    "schur", "ap3", "quadruple", "multidim-brauer", "poly-brauer", "brauer-2", "brauer-rows-2",
    "folkman-3", "chain-3", "mpc-2-1-2", "multidim-brauer-2-2", "poly-brauer-2",
])
def test_presets_build(name):
    config = preset(name)
    assert config.shape.m >= 1
    seed = [tuple(i + 1 for _ in range(config.d)) for i in range(config.seed_length)]
    assert config.points(seed)


def test_schur_points():
    assert set(preset("schur").points([(2,), (3,)])) == {(2,), (3,), (5,)}


def test_ap3_points():
    assert set(preset("ap3").points([(2,), (1,)])) == {(1,), (3,), (5,)}


def test_brauer_rows_points():
    assert set(preset("brauer-rows-2").points([(3,), (1,)])) == {(3,), (1,), (4,), (7,)}


def test_folkman_holds_finite_sums():
    points = {p[0] for p in preset("folkman-2").points([(1,), (2,), (4,)])}
    assert {1, 2, 4, 3, 5, 6, 7} <= points


def test_quadruple_points():
    points = set(preset("quadruple").points([(2,), (1,), (5,)]))
    assert points == {(2,), (5,), (6,)}


def test_unknown_preset():
    with pytest.raises(UsageError):
        preset("nope")
    assert "schur" in PRESET_NAMES
