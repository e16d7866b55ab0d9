import math

import numpy as np
import pytest

from ptlab import model, spectrum
from ptlab.errors import NumericalError, PhaseError

HARMONIC = model.ShiftedOscillator(0.0)          # p^2/2 + x^2/2
CUBIC = model.MonomialDeformed(1, 1, 1.0)
SEXTIC = model.PolynomialPotential(1.0, (0, 0, 0, 0, 0, 0, 1))

# eps = 1 levels from a fine independent run (rtol 1e-13, sweep continuation)
CUBIC_LEVELS = [1.156267072, 4.109228752, 7.562273855]


def test_harmonic_mismatch_vanishes_at_ground_state():
    c = model.default_contour(HARMONIC, 2.0)
    assert abs(spectrum.mismatch(HARMONIC, c, np.array([0.5]))[0]) < 1e-9
    assert abs(spectrum.mismatch(HARMONIC, c, np.array([0.7]))[0]) > 1e-3


def test_quartic_mismatch_small_at_eigenvalue():
    spec = model.MonomialDeformed(1, 1, 2.0)
    E0 = spectrum.eigenvalues_real_scan(spec, e_max=3).real()[0]
    assert abs(E0 - 1.477) < 5e-4
    c = model.default_contour(spec, 5.0)
    assert abs(spectrum.mismatch(spec, c, np.array([E0]))[0]) < 1e-6


def test_cubic_levels():
    E = spectrum.eigenvalues_real_scan(CUBIC, e_max=8).real()
    np.testing.assert_allclose(E[:3], CUBIC_LEVELS, rtol=1e-8)


def test_records_carry_residuals():
    sp = spectrum.eigenvalues_real_scan(CUBIC, e_max=5)
    assert [r.index for r in sp.records] == list(range(len(sp.records)))
    assert all(r.method == "shooting" and r.residual < 1e-6 for r in sp.records)


def test_shifted_oscillator_integer_levels():
    E = spectrum.eigenvalues_real_scan(model.ShiftedOscillator(1.0), e_max=6.5).real()
    np.testing.assert_allclose(E, [1, 2, 3, 4, 5, 6], atol=1e-8)


def test_rotated_sectors_flip_harmonic_signs():
    E = spectrum.eigenvalues_rotated_sign_flip(model.MonomialDeformed(1, 1, 0.0), e_max=6).real()
    np.testing.assert_allclose(E, [-1, -3, -5], atol=1e-8)


def test_rotated_sectors_flip_sextic_signs():
    E = spectrum.eigenvalues_rotated_sign_flip(SEXTIC, e_max=16).real()
    np.testing.assert_allclose(E, -np.array([1.145, 4.339, 9.073, 14.935]), rtol=2e-3)


def test_hermitian_grid_quartic():
    # x^4 with k = 1: 1.0603620905, 3.7996730298
    E = spectrum.hermitian_grid(model.PolynomialPotential(1.0, (0, 0, 0, 0, 1)), 2).real()
    np.testing.assert_allclose(E, [1.0603620905, 3.7996730298], rtol=1e-7)


def test_hermitian_grid_rejects_complex_potential():
    with pytest.raises(NumericalError):
        spectrum.hermitian_grid(CUBIC, 3)


def test_refine_complex_conjugate_pair():
    spec = model.MonomialDeformed(1, 1, -0.6)
    c = model.default_contour(spec, 10.0)
    z = spectrum.refine_complex(spec, c, 3.77 + 0.38j, trust_radius=1.0)
    assert z.imag > 0.1
    zc = spectrum.refine_complex(spec, c, z.conjugate() + 0.01, trust_radius=1.0)
    assert abs(zc - z.conjugate()) < 1e-8


def test_short_sweep_reaches_cubic():
    res = spectrum.sweep_epsilon(model.MonomialDeformed(1, 1, 0.0), [0.0, 0.5, 1.0], level_count=3)
    np.testing.assert_allclose(res.values[0].real, [1, 3, 5], atol=1e-9)
    np.testing.assert_allclose(res.values[-1].real, CUBIC_LEVELS, rtol=1e-8)
    assert res.events == []


def test_sweep_validates_grid():
    with pytest.raises(ValueError):
        spectrum.sweep_epsilon(CUBIC, [0.0, 0.5, 0.2])
    with pytest.raises(ValueError):
        spectrum.sweep_epsilon(CUBIC, [0.0, 0.5], level_count=1)


@pytest.fixture(scope="module")
def harmonic_modes():
    return spectrum.modes_for(model.MonomialDeformed(1, 1, 0.0), 20)


def test_harmonic_norm_signs(harmonic_modes):
    assert [m.norm_sign for m in harmonic_modes[:6]] == [1, -1, 1, -1, 1, -1]


def test_harmonic_first_excited_is_imaginary_times_x(harmonic_modes):
    # PT-normalized phi_1 is i times a real odd function on the real axis
    m = harmonic_modes[1]
    x = np.array([0.5, 1.0])
    v = m(x)
    assert np.all(np.abs(v.real) < 1e-8 * np.abs(v))
    np.testing.assert_allclose(m(-x), -v, rtol=1e-8)


def test_harmonic_completeness(harmonic_modes):
    def f(x):
        return np.exp(-(x - 0.3) ** 2)

    def g(x):
        return np.exp(-(x + 0.2) ** 2)
    assert spectrum.completeness_residual(harmonic_modes, f, g) < 1e-3
    assert spectrum.c_squared_residual(harmonic_modes, f, g) < 1e-3


def test_harmonic_c_kernel_is_parity(harmonic_modes):
    # int C(x, y) f(y) dy = f(-x) when C = P
    m0 = harmonic_modes[0]
    y, w = m0.x, m0.weights
    f = np.exp(-(y - 0.4) ** 2)
    for x in (0.3, -0.7):
        val = np.sum(spectrum.c_kernel(harmonic_modes, np.array([x]), y) * f * w)
        assert abs(val - math.exp(-(-x - 0.4) ** 2)) < 1e-5      # N = 20 truncation


def test_cubic_mode_signs_and_csquared():
    modes = spectrum.modes_for(CUBIC, 20)
    assert [m.norm_sign for m in modes[:4]] == [1, -1, 1, -1]

    def f(x):
        return np.exp(-(x - 0.3 + 0.5j) ** 2)

    def g(x):
        return np.exp(-(x + 0.2 + 0.5j) ** 2)
    assert spectrum.c_squared_residual(modes, f, g) < 1e-2


def test_pt_normalize_needs_symmetric_contour():
    spec = model.MonomialDeformed(1, 1, 0.0)
    c = model.ContourSpec(0.1 + 0j, -math.pi, 0.0, 8.0)
    mode = spectrum.compute_mode(spec, c, 1.0)
    with pytest.raises(PhaseError):
        spectrum.pt_normalize([mode], c)


def test_zeta_closed_form_frozen():
    # oracle: eigenvalue sum with a WKB tail (independent of the closed form)
    assert abs(spectrum.spectral_zeta_closed(1.0) - 2.835094933970) < 1e-10


def test_zeta_closed_form_harmonic_limit():
    # sum over odd integers of 1/(2n+1) diverges, so eps -> 0 grows without bound
    assert spectrum.spectral_zeta_closed(1e-3) > spectrum.spectral_zeta_closed(0.5)
    assert spectrum.spectral_zeta_closed(0.0) == math.inf
