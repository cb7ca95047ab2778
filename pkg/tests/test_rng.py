import numpy as np

from climbsim import rng


def test_same_path_same_stream():
    a = rng.stream(7, "climb", 0, 3).random(16)
    b = rng.stream(7, "climb", 0, 3).random(16)
    assert np.array_equal(a, b)


def test_different_components_diverge():
    base = rng.stream(7, "climb", 0, 3).random(8)
    assert not np.array_equal(base, rng.stream(8, "climb", 0, 3).random(8))
    assert not np.array_equal(base, rng.stream(7, "climb", 0, 4).random(8))
    assert not np.array_equal(base, rng.stream(7, "study", 0, 3).random(8))


def test_string_components_stable():
    a = rng.stream(0, "reliability", 4, 1, 0).random(4)
    b = rng.stream(0, "reliability", 4, 1, 0).random(4)
    assert np.array_equal(a, b)
