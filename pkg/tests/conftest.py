import pytest

from basinlab import analyze_parabolic


@pytest.fixture(scope="session")
def quad_map():
    """f(z) = z + z^2, the workhorse one-petal map."""
    fm, vs = analyze_parabolic([0, 1, 1])
    return fm, vs


@pytest.fixture(scope="session")
def cubic_map():
    """f(z) = z + z^3, two petals along the imaginary axis."""
    fm, vs = analyze_parabolic([0, 1, 0, 1])
    return fm, vs


@pytest.fixture(scope="session")
def perturbed_map():
    """f(z) = z + z^2 + z^3, one petal plus a genuine higher-order term."""
    fm, vs = analyze_parabolic([0, 1, 1, 1])
    return fm, vs
