import math

import numpy as np
import pytest

from ptlab import matrixpt
from ptlab.errors import PhaseError
from ptlab.matrixpt import Matrix2Spec, PtPhase

SPEC = Matrix2Spec(1.0, 0.3, 2.0)


def test_broken_secular_roots():
    spec = Matrix2Spec.from_abg(0.0, 2.0, 1.0)
    eig = matrixpt.eigen2(spec)
    assert eig.phase is PtPhase.BROKEN
    assert abs(eig.e_plus - 1j * math.sqrt(3)) < 1e-14
    assert abs(eig.e_minus + 1j * math.sqrt(3)) < 1e-14


def test_exceptional_point():
    spec = Matrix2Spec(1.0, math.pi / 2, 1.0)
    assert matrixpt.classify(spec) is PtPhase.EXCEPTIONAL
    assert matrixpt.eigen2(spec).states is None
    with pytest.raises(PhaseError):
        matrixpt.c_matrix(spec)


def test_unbroken_eigenvalues_match_numpy():
    eig = matrixpt.eigen2(SPEC)
    w = np.sort(np.linalg.eigvals(SPEC.matrix).real)
    np.testing.assert_allclose([eig.e_minus.real, eig.e_plus.real], w, atol=1e-13)


def test_pt_norm_signs():
    n_plus, n_minus = matrixpt.pt_norms(matrixpt.eigen2(SPEC).states)
    assert abs(n_plus - 1) < 1e-12 and abs(n_minus + 1) < 1e-12


def test_broken_phase_norms_vanish():
    st = matrixpt.eigen2(Matrix2Spec(1.0, math.pi / 2, 0.5)).states
    np.testing.assert_allclose(matrixpt.pt_norms(st), [0, 0], atol=1e-12)


def test_c_reduces_to_parity_for_real_matrix():
    np.testing.assert_allclose(matrixpt.c_matrix(Matrix2Spec(1.0, 0.0, 0.7)), matrixpt.P, atol=1e-15)


def test_c_closed_form_elements():
    a = matrixpt.alpha(SPEC)
    want = np.array([[1j * math.sin(a), 1], [1, -1j * math.sin(a)]]) / math.cos(a)
    np.testing.assert_allclose(matrixpt.c_matrix(SPEC), want, atol=1e-14)


def test_identities_hold():
    res = matrixpt.identity_residuals(SPEC)
    assert max(res.values()) < 1e-12


def test_q_exponential_gives_c():
    C = matrixpt.c_matrix(SPEC)
    np.testing.assert_allclose(matrixpt.exp_q(matrixpt.q_matrix(SPEC)) @ matrixpt.P, C, atol=1e-12)


def test_cpt_norm_of_basis_vector():
    a = matrixpt.alpha(SPEC)
    assert abs(matrixpt.cpt_norm(SPEC, [1, 0]) - 1 / math.cos(a)) < 1e-13
    assert abs(matrixpt.cpt_norm_closed(SPEC, [1, 0]) - 1 / math.cos(a)) < 1e-13


def test_cpt_norm_closed_matches_matrix(rng):
    for _ in range(50):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert abs(matrixpt.cpt_norm(SPEC, psi) - matrixpt.cpt_norm_closed(SPEC, psi)) < 1e-12


def test_negative_coupling_is_gated():
    spec = Matrix2Spec(1.0, 0.3, -2.0)
    assert matrixpt.classify(spec) is PtPhase.UNBROKEN
    assert matrixpt.eigen2(spec).states is None
    with pytest.raises(PhaseError):
        matrixpt.q_matrix(spec)


def test_alpha_undefined_when_broken():
    with pytest.raises(PhaseError):
        matrixpt.alpha(Matrix2Spec(1.0, math.pi / 2, 0.5))


def test_transition_scan():
    scan = matrixpt.transition_scan(0.5, 1.0, np.linspace(-2, 2, 9))
    assert sorted(scan.transitions) == [-1.0, 1.0]
    phases = [p for _, p in scan.rows]
    assert phases[0] is PtPhase.UNBROKEN and phases[4] is PtPhase.BROKEN
    with pytest.raises(ValueError):
        matrixpt.transition_scan(0, 1, [0.0, 1.0, 0.5])


def test_random_pt_matrix_symmetry(rng):
    H = matrixpt.random_pt_matrix(4, rng)
    J = np.eye(4)[::-1]
    np.testing.assert_allclose(J @ H.conj() @ J, H, atol=1e-15)
    assert matrixpt.conjugate_pair_defect(H) < 1e-10


def test_spec_rejects_nonfinite():
    with pytest.raises(ValueError):
        Matrix2Spec(float("nan"), 0.0, 1.0)
