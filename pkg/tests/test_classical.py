import math

import numpy as np
import pytest
from scipy import integrate

from ptlab import classical, model
from ptlab.errors import NumericalError

# mpmath reference values
ESCAPE_QUARTIC = 0.92703733865068595922     # int_0^inf dx / (2 sqrt(1 + x^4)) = Gamma(1/4)^2 / (8 sqrt(pi))
ESCAPE_SEXTIC = 0.70109105266272713059      # int_0^inf dx / (2 sqrt(1 + x^6))

UPSIDE_QUARTIC = model.PolynomialPotential(1.0, (0, 0, 0, 0, -1))
SEXTIC = model.PolynomialPotential(1.0, (0, 0, 0, 0, 0, 0, 1))
DOUBLE_WELL = model.PolynomialPotential(1.0, (0, 0, -5, 0, 1))


def test_upside_down_quartic_period():
    P = classical.period(UPSIDE_QUARTIC, 1.0, -2j)
    assert abs(P - 2 * ESCAPE_QUARTIC) < 1e-8


def test_energy_conserved_along_orbit():
    tr = classical.trajectory(UPSIDE_QUARTIC, 1.0, -2j, t_max=3.0)
    assert tr.energy_drift(UPSIDE_QUARTIC) < 1e-8
    assert tr.closed


def test_escape_times():
    assert abs(classical.escape_time(4) - ESCAPE_QUARTIC) < 1e-10
    assert abs(classical.escape_time(6) - ESCAPE_SEXTIC) < 1e-10
    assert classical.escape_time(2) == math.inf
    with pytest.raises(ValueError):
        classical.escape_time(4, E=-1)


def test_escape_time_energy_scaling():
    # T(E) = T(1) E^(-1/4) for N = 4
    assert abs(classical.escape_time(4, 16.0) - ESCAPE_QUARTIC / 2) < 1e-10


def test_density_normalized():
    x = np.linspace(-400, 400, 400_001)
    rho = classical.density_on_axis(1.0, x)
    mass = integrate.trapezoid(rho, x)
    # the tails beyond |x| = 400 carry 2 c / 400
    assert abs(mass + 2 * classical.density_constant(1.0) / 400 - 1) < 1e-6
    assert abs(classical.density_constant(1.0) - 1 / (4 * ESCAPE_QUARTIC)) < 1e-12


def test_launch_momentum_sign():
    p = classical.launch_momentum(SEXTIC, 1.0, 0.5, 1)
    assert abs(p - math.sqrt(1 - 0.5 ** 6)) < 1e-14
    assert classical.launch_momentum(SEXTIC, 1.0, 0.5, -1) == -p
    with pytest.raises(ValueError):
        classical.launch_momentum(SEXTIC, 1.0, 0.5, 0)


def test_open_orbit_raises():
    with pytest.raises(NumericalError):
        classical.period(SEXTIC, 1 + 0.2j, 1.167j, t_max=5.0)


def test_real_energy_stays_in_one_region():
    seq = classical.region_sequence(SEXTIC, 1.0, 1.167j, 30.0)
    assert len(seq.labels) == 1


def test_complex_energy_region_prefix():
    seq = classical.region_sequence(SEXTIC, 1 + 0.2j, 1.167j, 60.0)
    assert seq.labels[:6] == ["U", "M", "L", "M", "L", "M"]
    assert all(a != b for a, b in zip(seq.labels, seq.labels[1:]))
    assert seq.heights[0] > seq.heights[1] > seq.heights[2]


def test_region_sequence_needs_pairs():
    with pytest.raises(ValueError):
        classical.region_sequence(model.PolynomialPotential(1.0, (0, 0, 1)), 1 + 0.1j, 0.5, 5.0)


def test_anomaly_changes_period_only_with_hbar():
    p_pt, p_anom, p_plain = classical.anomaly_period_compare()
    assert abs(p_pt - p_plain) < 1e-6
    assert abs(p_anom - 2.4954673242) < 1e-6


def test_resonance_bracket_validation():
    with pytest.raises(ValueError):
        classical.resonance_search(DOUBLE_WELL, -1.0, (1.7, 1.4))


def test_closest_approach_hits_target_at_resonance():
    # outer left turning point to inner right one
    E = complex(-1.0, 1.5732127601)
    pts = sorted(model.turning_points(DOUBLE_WELL, E), key=lambda z: z.real)
    miss, t = classical.closest_approach(DOUBLE_WELL, E, pts[0], pts[2])
    assert abs(miss) < 1e-8
    assert abs(2 * t - 8.4931332) < 1e-5
