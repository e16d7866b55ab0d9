import math

import numpy as np
import pytest

from ptlab import numerics
from ptlab.errors import BlowUpError, ConvergenceError, NoSignChangeError, NumericalError
from ptlab.numerics import EventSpec, OdeSettings

# high-precision values computed once with mpmath
LOGGAMMA_QUARTER = 1.28802252469807745737
LOGGAMMA_HALF_2I = complex(-2.22265586405325821907, -0.59253698197703458893)
ESCAPE_QUARTIC = 0.92703733865068595922      # int_0^inf dx / (2 sqrt(1 + x^4))


def test_log_gamma_quarter():
    assert abs(numerics.log_gamma(0.25) - LOGGAMMA_QUARTER) < 1e-13


def test_log_gamma_complex_argument():
    assert abs(numerics.log_gamma(0.5 + 2j) - LOGGAMMA_HALF_2I) < 1e-13


def test_log_gamma_recurrence():
    z = 0.3 + 0.7j
    lhs = numerics.log_gamma(z + 1)
    rhs = numerics.log_gamma(z) + np.log(z)
    assert abs(np.exp(lhs) - np.exp(rhs)) < 1e-13


@pytest.mark.parametrize("z", [0, -1, -7])
def test_log_gamma_poles(z):
    with pytest.raises(NumericalError):
        numerics.log_gamma(z)


def test_gamma_real():
    assert abs(numerics.gamma(5.0) - 24.0) < 1e-12
    assert abs(numerics.gamma(0.5) - math.sqrt(math.pi)) < 1e-14


def test_find_root_bracketed():
    r = numerics.find_root_bracketed(lambda x: x * x - 2, 0, 3)
    assert abs(r - math.sqrt(2)) < 1e-12


def test_find_root_bracketed_no_sign_change():
    with pytest.raises(NoSignChangeError):
        numerics.find_root_bracketed(lambda x: x * x + 1, -1, 1)


def test_find_root_complex_secular():
    # det(H - E) for [[2i, 1], [1, -2i]] is E^2 + 3
    r = numerics.find_root_complex(lambda z: z * z + 3, 1.5j)
    assert abs(r - 1j * math.sqrt(3)) < 1e-11


def test_find_root_complex_trust_radius():
    with pytest.raises(ConvergenceError):
        numerics.find_root_complex(lambda z: z - 100, 0.0, trust_radius=1.0)


def test_ode_settings_validation():
    with pytest.raises(ValueError):
        OdeSettings(rel_tol=0)


def test_event_spec_validation():
    with pytest.raises(ValueError):
        EventSpec("nope")
    with pytest.raises(ValueError):
        EventSpec("proximity-to-point", target=0j, radius=0)


def test_integrate_harmonic_rotation():
    res = numerics.integrate_ode(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], (0, 2 * math.pi))
    np.testing.assert_allclose(res.y[-1], [1, 0], atol=1e-9)


def test_integrate_real_part_zero_events():
    # x = e^{it}: Re x crosses zero at pi/2 and 3 pi/2
    res = numerics.integrate_ode(lambda t, y: np.array([1j * y[0]]), [1.0], (0, 2 * math.pi),
                                 events=[EventSpec("real-part-zero")])
    times = [t for t, kind, _ in res.events]
    np.testing.assert_allclose(times, [math.pi / 2, 3 * math.pi / 2], atol=1e-9)


def test_integrate_return_to_start():
    res = numerics.integrate_ode(lambda t, y: np.array([1j * y[0]]), [1.0], (0, 7.0),
                                 events=[EventSpec("return-to-start", direction=1)])
    times = [t for t, _, _ in res.events if t > 1]
    assert abs(times[0] - 2 * math.pi) < 1e-8


def test_integrate_blowup_keeps_partial():
    # x' = x^2 from x=1 blows up at t=1
    with pytest.raises(BlowUpError) as info:
        numerics.integrate_ode(lambda t, y: y ** 2, [1.0], (0, 2), OdeSettings(blowup_radius=1e6))
    assert 0.99 < info.value.t_blowup <= 1.0
    assert info.value.partial.t.size > 2


def test_quad_path_straight_and_bent():
    # z^2 is entire, so the integral only depends on the endpoints
    a = numerics.quad_path(lambda z: z * z, [0, 2])
    b = numerics.quad_path(lambda z: z * z, [0, 1 + 1j, 2])
    assert abs(a - 8 / 3) < 1e-12
    assert abs(b - 8 / 3) < 1e-12


def test_quad_path_half_line():
    val = numerics.quad_path(lambda x: 0.5 / np.sqrt(1 + x ** 4), [0.0, math.inf], tol=1e-11)
    assert abs(val - ESCAPE_QUARTIC) < 1e-10


def test_quad_path_endpoint_singularities():
    # int_{-1}^{1} dx / sqrt(1 - x^2) = pi
    val = numerics.quad_path(lambda x: 1 / np.sqrt(1 - x * x), [-1, 1], singular=(0, 1))
    assert abs(val - math.pi) < 1e-10
