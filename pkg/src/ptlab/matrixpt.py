"""Closed-form PT machinery for the 2x2 matrix Hamiltonian.

H = [[r e^{i theta}, g], [g, r e^{-i theta}]] with parity P = [[0, 1], [1, 0]] and
time reversal acting as complex conjugation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .errors import PhaseError

EP_TOL = 1e-12

P = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]])


class PtPhase(str, Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"
    EXCEPTIONAL = "exceptional"


@dataclass(frozen=True)
class Matrix2Spec:
    r: float
    theta: float
    g: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.r, self.theta, self.g)):
            raise ValueError("matrix parameters must be finite")

    @classmethod
    def from_abg(cls, a: float, b: float, g: float) -> "Matrix2Spec":
        """H = [[a + ib, g], [g, a - ib]]."""
        return cls(math.hypot(a, b), math.atan2(b, a), g)

    @property
    def matrix(self) -> np.ndarray:
        d = self.r * cmath.exp(1j * self.theta)
        return np.array([[d, self.g], [self.g, d.conjugate()]])

    @property
    def discriminant(self) -> float:
        return self.g ** 2 - (self.r * math.sin(self.theta)) ** 2


@dataclass
class Eigen2:
    e_plus: complex
    e_minus: complex
    states: np.ndarray | None     # columns |E+>, |E->
    phase: PtPhase
    alpha: float | None = None


def classify(spec: Matrix2Spec) -> PtPhase:
    d = spec.discriminant
    if abs(d) <= EP_TOL:
        return PtPhase.EXCEPTIONAL
    return PtPhase.UNBROKEN if d > 0 else PtPhase.BROKEN


def alpha(spec: Matrix2Spec) -> float:
    """sin(alpha) = (r/g) sin(theta), defined in the unbroken phase."""
    phase = classify(spec)
    if phase is not PtPhase.UNBROKEN:
        raise PhaseError(f"alpha is undefined in the {phase.value} phase")
    return math.asin(spec.r * math.sin(spec.theta) / spec.g)


def eigen2(spec: Matrix2Spec) -> Eigen2:
    phase = classify(spec)
    root = cmath.sqrt(spec.discriminant)
    if phase is PtPhase.EXCEPTIONAL:
        root = 0j
    c = spec.r * math.cos(spec.theta)
    ep, em = c + root, c - root
    if phase is PtPhase.UNBROKEN:
        if spec.g < 0:
            # closed-form states assume g > 0
            return Eigen2(ep, em, None, phase)
        a = alpha(spec)
        return Eigen2(ep, em, _closed_states(a), phase, a)
    if phase is PtPhase.BROKEN:
        w, v = np.linalg.eig(spec.matrix)
        order = np.argsort(-w.imag)
        v = v[:, order] / np.linalg.norm(v[:, order], axis=0)
        return Eigen2(complex(w[order[0]]), complex(w[order[1]]), v, phase)
    return Eigen2(ep, em, None, phase)


def _closed_states(a: float) -> np.ndarray:
    n = math.sqrt(2 * math.cos(a))
    up = np.array([cmath.exp(0.5j * a), cmath.exp(-0.5j * a)]) / n
    dn = 1j * np.array([cmath.exp(-0.5j * a), -cmath.exp(0.5j * a)]) / n
    return np.column_stack([up, dn])


def pt_apply(u: np.ndarray) -> np.ndarray:
    return P @ np.conj(u)


def pt_inner(u: np.ndarray, v: np.ndarray) -> complex:
    """(u, v)^PT = (PT u) . v, no further conjugation."""
    return complex(pt_apply(u) @ v)


def pt_norms(states: np.ndarray) -> tuple[float, float]:
    """PT norms of the two eigenstate columns; (+1, -1) in the unbroken phase."""
    vals = [pt_inner(states[:, k], states[:, k]) for k in range(2)]
    return vals[0].real, vals[1].real


def _gate(spec):
    phase = classify(spec)
    if phase is PtPhase.EXCEPTIONAL:
        raise PhaseError("C is singular at the exceptional point (cos alpha = 0)")
    if phase is PtPhase.BROKEN:
        raise PhaseError("C is not defined in the broken phase")
    if spec.g < 0:
        raise PhaseError("closed-form C needs g > 0")
    return alpha(spec)


def c_matrix(spec: Matrix2Spec) -> np.ndarray:
    a = _gate(spec)
    s = math.sin(a)
    return np.array([[1j * s, 1], [1, -1j * s]]) / math.cos(a)


def q_matrix(spec: Matrix2Spec) -> np.ndarray:
    """Q with exp(Q) P = C."""
    a = _gate(spec)
    s = math.sin(a)
    return 0.5 * SIGMA2 * math.log((1 - s) / (1 + s))


def exp_q(Q: np.ndarray) -> np.ndarray:
    """exp of a multiple of sigma_2 through cosh/sinh."""
    beta = Q[1, 0] / 1j
    return math.cosh(beta.real) * np.eye(2) + math.sinh(beta.real) * SIGMA2


def cpt_apply(spec: Matrix2Spec, u: np.ndarray) -> np.ndarray:
    return c_matrix(spec) @ pt_apply(u)


def cpt_norm(spec: Matrix2Spec, psi) -> float:
    """(CPT psi) . psi, real and positive for psi != 0 in the unbroken phase."""
    psi = np.asarray(psi, dtype=complex)
    return complex(cpt_apply(spec, psi) @ psi).real


def cpt_norm_closed(spec: Matrix2Spec, psi) -> float:
    a = _gate(spec)
    (x, y), (u, v) = [(complex(z).real, complex(z).imag) for z in psi]
    return (x * x + v * v + y * y + u * u + 2 * (x * v - y * u) * math.sin(a)) / math.cos(a)


def spectral_c(spec: Matrix2Spec) -> np.ndarray:
    """sum over n of s_n |E_n><E_n| with <u| = (CPT u)^T."""
    st = eigen2(spec).states
    bras = [cpt_apply(spec, st[:, k]) for k in range(2)]
    return np.outer(st[:, 0], bras[0]) - np.outer(st[:, 1], bras[1])


def completeness(spec: Matrix2Spec) -> np.ndarray:
    st = eigen2(spec).states
    bras = [cpt_apply(spec, st[:, k]) for k in range(2)]
    return np.outer(st[:, 0], bras[0]) + np.outer(st[:, 1], bras[1])


def identity_residuals(spec: Matrix2Spec) -> dict[str, float]:
    """Max-abs residuals of the closed-form identities for one unbroken spec."""
    H = spec.matrix
    eig = eigen2(spec)
    C = c_matrix(spec)
    st = eig.states
    out = {
        "eigen": max(np.abs(H @ st[:, 0] - eig.e_plus * st[:, 0]).max(),
                     np.abs(H @ st[:, 1] - eig.e_minus * st[:, 1]).max()),
        "pt_norms": max(abs(pt_norms(st)[0] - 1), abs(pt_norms(st)[1] + 1)),
        "pt_orthogonal": abs(pt_inner(st[:, 0], st[:, 1])),
        "c_squared": np.abs(C @ C - np.eye(2)).max(),
        "c_commutes": np.abs(C @ H - H @ C).max(),
        "c_eigen": max(np.abs(C @ st[:, 0] - st[:, 0]).max(), np.abs(C @ st[:, 1] + st[:, 1]).max()),
        "c_spectral": np.abs(spectral_c(spec) - C).max(),
        "completeness": np.abs(completeness(spec) - np.eye(2)).max(),
    }
    Q = q_matrix(spec)
    out["q_closed"] = np.abs(exp_q(Q) @ P - C).max()
    out["q_expm"] = np.abs(expm(Q) @ P - C).max()
    return {k: float(v) for k, v in out.items()}


@dataclass
class TransitionScan:
    rows: list[tuple[float, PtPhase]]
    transitions: list[float]


def transition_scan(a: float, b: float, g_grid) -> TransitionScan:
    """Phase of [[a+ib, g], [g, a-ib]] along g; E = a +- sqrt(g^2 - b^2)."""
    grid = np.asarray(g_grid, dtype=float)
    if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
        raise ValueError("g grid must be strictly monotone")
    rows = [(float(g), classify(Matrix2Spec.from_abg(a, b, g))) for g in grid]
    # the discriminant g^2 - b^2 vanishes at g = +-|b|; keep the roots where the phase changes
    trans = []
    for (g0, p0), (g1, p1) in zip(rows[:-1], rows[1:]):
        if p0 is p1:
            continue
        lo, hi = min(g0, g1), max(g0, g1)
        for t in (-abs(b), abs(b)):
            if lo <= t <= hi and t not in trans:
                trans.append(t)
    return TransitionScan(rows, trans)


def random_pt_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random H with P H* P = H for the exchange matrix P."""
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    J = np.eye(n)[::-1]
    return (A + J @ A.conj() @ J) / 2


def conjugate_pair_defect(H: np.ndarray) -> float:
    """Distance between the spectrum and its complex conjugate (matched greedily)."""
    w = list(np.linalg.eigvals(H))
    left = list(np.conj(w))
    worst = 0.0
    for z in w:
        k = int(np.argmin([abs(z - c) for c in left]))
        worst = max(worst, abs(z - left.pop(k)))
    return worst / max(1.0, max(abs(z) for z in w))
