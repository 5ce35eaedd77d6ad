import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from wignerlab.errors import ConfigurationError
from wignerlab.potential import PotentialProfile, barrier_profile
from wignerlab.wigner_potential import QuadratureSpec, wigner_potential


@pytest.fixture
def barrier():
    return barrier_profile()


@pytest.fixture
def quad():
    return QuadratureSpec(l_y=31, dy=0.5)


class TestQuadratureSpec:
    def test_node_count(self, quad):
        assert quad.n_y == 62

    def test_nonpositive_rejected(self):
        with pytest.raises(ConfigurationError):
            QuadratureSpec(l_y=-1.0, dy=0.5)
        with pytest.raises(ConfigurationError):
            QuadratureSpec(l_y=4.0, dy=0.0)

    def test_non_integral_ratio_rejected(self):
        with pytest.raises(ConfigurationError):
            QuadratureSpec(l_y=1.0, dy=0.3)


def _oracle(profile, x, v, quad):
    """The same finite sum, evaluated with 50-digit arithmetic."""
    with mpmath.workdps(50):
        dy = mpmath.mpf(quad.dy)
        acc = mpmath.mpf(0)
        for j in range(1, quad.n_y + 1):
            y = j * dy
            dv = mpmath.mpf(float(profile(float(x + y / 2)))) - mpmath.mpf(
                float(profile(float(x - y / 2))))
            acc += dv * mpmath.sin(y * mpmath.mpf(v))
        return float(-acc * dy / mpmath.pi)


def test_matches_extended_precision_oracle(barrier, quad):
    got = wigner_potential(barrier, 10.0, 0.5, quad)
    want = _oracle(barrier, 10.0, 0.5, quad)
    assert got == pytest.approx(want, rel=1e-12)


def test_oracle_on_more_points(barrier, quad):
    for x in (0.7, 2.0, 9.5):
        for v in (0.1, -1.3, 2.9):
            got = wigner_potential(barrier, x, v, quad)
            want = _oracle(barrier, x, v, quad)
            assert got == pytest.approx(want, rel=1e-11, abs=1e-15)


def test_zero_potential_gives_zero(quad):
    profile = PotentialProfile(segments=())
    v = np.linspace(-3, 3, 11)
    np.testing.assert_array_equal(wigner_potential(profile, 1.0, v, quad), 0.0)


def test_symmetric_point_gives_zero(barrier, quad):
    v = np.linspace(-3, 3, 11)
    np.testing.assert_array_equal(wigner_potential(barrier, 0.0, v, quad), 0.0)


def test_zero_velocity_is_exactly_zero(barrier, quad):
    assert wigner_potential(barrier, 10.0, 0.0, quad) == 0.0


@given(v=st.floats(-10, 10), x=st.floats(-20, 20))
def test_odd_in_velocity(v, x):
    barrier = barrier_profile()
    quad = QuadratureSpec(l_y=8, dy=1.0)
    plus = wigner_potential(barrier, x, v, quad)
    minus = wigner_potential(barrier, x, -v, quad)
    assert abs(plus + minus) <= 1e-14


def test_linear_in_profile_values(quad):
    base = barrier_profile(height=0.2)
    scaled = barrier_profile(height=0.6)
    v = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(wigner_potential(scaled, 10.0, v, quad),
                               3 * wigner_potential(base, 10.0, v, quad),
                               rtol=1e-14, atol=1e-300)


def test_bound(barrier, quad):
    bound = (1 / np.pi) * quad.n_y * quad.dy * 2 * barrier.max_abs
    v = np.linspace(-20, 20, 401)
    for x in (-2.0, 1.0, 10.0):
        assert np.abs(wigner_potential(barrier, x, v, quad)).max() <= bound
