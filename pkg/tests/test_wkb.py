import math

import numpy as np
import pytest

from ptlab import model, wkb

SEXTIC = model.PolynomialPotential(1.0, (0, 0, 0, 0, 0, 0, 1))
PT_X6_GROUND = 2.2650893724022997      # mpmath quadrature of the action along the radial legs


def test_pt_x6_ground_state_against_quadrature_oracle():
    assert abs(wkb.wkb_closed_form("pt-x6", 0) - PT_X6_GROUND) < 1e-12
    assert abs(wkb.wkb_quantize_numeric(SEXTIC, 2, 0) - PT_X6_GROUND) < 1e-9


def test_pt_x6_third_level():
    assert abs(wkb.wkb_closed_form("pt-x6", 2) - 25.324) < 1e-3


def test_pt_to_hermitian_sextic_factor():
    # the PT level is 2^(3/2) times the Hermitian one
    for n in range(4):
        r = wkb.wkb_closed_form("pt-x6", n) / wkb.wkb_closed_form("hermitian-x6", n)
        assert abs(r - 2 ** 1.5) < 1e-12


def test_monomial_formula_matches_named_families():
    assert abs(wkb.monomial_wkb(4, 3) - wkb.wkb_closed_form("pt-quartic", 3)) < 1e-10
    assert abs(wkb.monomial_wkb(6, 1) - wkb.wkb_closed_form("pt-x6", 1)) < 1e-10
    assert wkb.wkb_closed_form("pt-monomial", 2, N=3) == wkb.monomial_wkb(3, 2)


def test_harmonic_wkb_is_exact():
    # p^2 + x^2: E_n = 2n + 1
    for n in range(4):
        assert abs(wkb.monomial_wkb(2, n) - (2 * n + 1)) < 1e-12


def test_numeric_quantization_follows_reference_pair():
    spec = model.MonomialDeformed(1, 1, 1.0)
    ref = model.pt_pair(model.turning_points(spec, 1.0))[0]
    for n in range(3):
        E = wkb.wkb_quantize_numeric(spec, ref, n)
        assert abs(E / wkb.monomial_wkb(3, n) - 1) < 1e-8


def test_action_is_real_at_quantized_level():
    E = wkb.wkb_closed_form("pt-quartic", 1)
    S = wkb.action(model.PolynomialPotential(1.0, (0, 0, 0, 0, -1)), E, 1)
    assert abs(S.real - 1.5 * math.pi) < 1e-9
    assert abs(S.imag) < 1e-9


def test_bad_inputs():
    with pytest.raises(ValueError):
        wkb.wkb_closed_form("pt-x6", -1)
    with pytest.raises(ValueError):
        wkb.wkb_closed_form("nope", 0)
    with pytest.raises(ValueError):
        wkb.wkb_closed_form("pt-monomial", 0)


def test_x10_levels_grow_with_lower_pairs():
    vals = np.array([[wkb.wkb_closed_form(f, n) for f in ("x10-hermitian", "x10-middle", "x10-lower")]
                     for n in range(3)])
    assert np.all(np.diff(vals, axis=1) > 0)
