import numpy as np
import pytest
import sympy

from ptlab import opalgebra as oa
from ptlab.errors import NumericalError
from ptlab.opalgebra import H0, H1, NCPoly, Pop, X

_x = sympy.Symbol("x")
_f = sympy.exp(_x ** 2 / 3) * (1 + _x) ** 2


def act(poly: NCPoly, expr):
    """Apply a normal-ordered poly as a differential operator, p = -i d/dx."""
    out = 0
    for (j, k), c in poly.terms.items():
        g = expr
        for _ in range(k):
            g = -sympy.I * sympy.diff(g, _x)
        out += oa.QQ_I.to_sympy(c) * _x ** j * g
    return sympy.simplify(out)


def test_canonical_commutator():
    assert oa.commutator(X, Pop) == NCPoly.const(sympy.I)


@pytest.mark.parametrize("b,c", [(1, 1), (2, 3), (3, 2)])
def test_reordering_against_differential_operators(b, c):
    prod = Pop ** b * X ** c
    seq = act(Pop ** b, _x ** c * _f)
    assert sympy.simplify(act(prod, _f) - seq) == 0


def test_q1_exact():
    A, B = oa.solve_q1()
    assert A == sympy.Rational(-4, 3) and B == -2
    assert str(oa.q1_poly()) == "(-2)*x^2*p + (-4/3)*p^3 + (2*I)*x"


def test_q1_equation():
    assert (oa.commutator(H0, oa.q1_poly()) + 2 * H1).is_zero()


def test_q1_parity():
    assert oa.is_q_parity(oa.q1_poly())
    assert not oa.is_q_parity(X)


def test_q3_solution():
    q3, res = oa.solve_q3()
    assert res.rank == len(res.basis)
    assert (oa.commutator(H0, q3) - oa.q3_rhs()).is_zero()
    assert oa.is_q_parity(q3)
    assert q3.terms[(4, 1)] == oa.QQ_I(8, 0)
    assert q3.terms[(0, 5)] == oa.QQ_I.from_sympy(sympy.Rational(128, 15))


def test_ansatz_inconsistency_detected():
    # [H0, .] of p^3 alone cannot produce i x^3
    with pytest.raises(NumericalError):
        oa._solve_ansatz([Pop ** 3], -2 * H1)


def test_ho_matrix_of_number_operator():
    N = 12
    h = oa.ho_matrix(H0, N).data
    # exact except in the last row/column touched by truncation
    np.testing.assert_allclose(np.diag(h)[:-1], np.arange(N - 1) + 0.5, atol=1e-12)


def test_q3_matrix_residual():
    assert oa.q3_matrix_residual(40) < 1e-8


def test_shifted_exact_c():
    assert oa.verify_exact_q_shifted(0.3, 60) < 1e-8
    with pytest.raises(ValueError):
        oa.verify_exact_q_shifted(0.3, 10)


def test_shifted_levels():
    eps = 0.3
    w = oa.shifted_levels(eps, 60, 6)
    np.testing.assert_allclose(w.real, np.arange(6) + 0.5 + eps ** 2 / 2, atol=1e-8)
    np.testing.assert_allclose(w.imag, 0, atol=1e-8)
