"""Physics built on the spectra: QES quartic levels, binding energies, isospectral pairs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy

from . import model, spectrum
from .errors import NumericalError

_x, _E = sympy.symbols("x E")
A_SYM, B_SYM = sympy.symbols("a b")


@dataclass
class QesResult:
    a: float
    b: float
    J: int
    coefficients: list          # Q_J(E), highest power first, monic
    roots: np.ndarray


def qes_polynomial_symbolic(J: int, a=A_SYM, b=B_SYM) -> sympy.Poly:
    """Monic Q_J(E) from psi = exp(-i x^3/3 - a x^2/2 - i b x) P_{J-1}(x).

    Substitution gives -P'' - 2 S' P' + (V - S'' - S'^2 - E) P = 0; the
    coefficients of x^0 .. x^(J-1) form a homogeneous linear system in the
    coefficients of P whose determinant is Q_J(E).
    """
    if J < 1:
        raise ValueError("J must be at least 1")
    x, E = _x, _E
    c = sympy.symbols(f"c0:{J}")
    P = sum(c[k] * x ** k for k in range(J))
    S1 = -sympy.I * x ** 2 - a * x - sympy.I * b
    V = -x ** 4 + 2 * sympy.I * a * x ** 3 + (a ** 2 - 2 * b) * x ** 2 + 2 * sympy.I * (a * b - J) * x
    expr = sympy.expand(-sympy.diff(P, x, 2) - 2 * S1 * sympy.diff(P, x)
                        + (V - sympy.diff(S1, x) - S1 ** 2 - E) * P)
    poly = sympy.Poly(expr, x)
    if any(poly.coeff_monomial(x ** m) != 0 for m in range(J, poly.degree() + 1)):
        raise NumericalError("QES ansatz leaves high powers of x uncancelled")
    M = sympy.Matrix([[sympy.diff(poly.coeff_monomial(x ** m), c[k]) for k in range(J)]
                      for m in range(J)])
    det = sympy.Poly(sympy.expand(M.det()), E)
    return sympy.Poly(sympy.expand(det.as_expr() / det.LC()), E)


REFERENCE_Q = {
    1: _E - B_SYM ** 2 - A_SYM,
    2: _E ** 2 - (2 * B_SYM ** 2 + 4 * A_SYM) * _E + B_SYM ** 4 + 4 * A_SYM * B_SYM ** 2 - 4 * B_SYM
    + 3 * A_SYM ** 2,
    3: _E ** 3 - (3 * B_SYM ** 2 + 9 * A_SYM) * _E ** 2
    + (3 * B_SYM ** 4 + 18 * A_SYM * B_SYM ** 2 - 16 * B_SYM + 23 * A_SYM ** 2) * _E
    - B_SYM ** 6 - 9 * A_SYM * B_SYM ** 4 + 16 * B_SYM ** 3 - 23 * A_SYM ** 2 * B_SYM ** 2
    + 48 * A_SYM * B_SYM - 15 * A_SYM ** 3 - 16,
}


def matches_reference(J: int) -> bool:
    return sympy.expand(qes_polynomial_symbolic(J).as_expr() - REFERENCE_Q[J]) == 0


def qes_polynomial(a: float, b: float, J: int) -> QesResult:
    poly = qes_polynomial_symbolic(J, sympy.nsimplify(a), sympy.nsimplify(b))
    coeffs = [complex(c) for c in poly.all_coeffs()]
    roots = np.roots(coeffs) if J > 1 else np.array([-coeffs[1]])
    roots = roots[np.argsort(roots.real)]
    return QesResult(a, b, J, coeffs, roots)


# ---------------------------------------------------------------- binding energies

BOUND_DEADBAND = 1e-8
GRID_L = 14.0


@dataclass
class BindingReport:
    g: float
    alpha: float
    spectrum: spectrum.Spectrum
    M: float
    B: list = field(default_factory=list)      # B_2, B_3, ...
    bound_count: int = 0

    @property
    def energies(self) -> np.ndarray:
        return self.spectrum.real()


def binding_report(g: float, alpha: float, level_count: int = 10, h: float = 0.004,
                   L: float = GRID_L) -> BindingReport:
    """Mass gap and binding energies B_n = (E_n - E_0) - n M of the anomalous quartic (m = mu = hbar = 1)."""
    if g <= 0:
        raise ValueError("g must be positive")
    if level_count < 3:
        raise ValueError("level_count must be at least 3")
    spec = model.TildeAnomalous(m=1.0, mu2=1.0, g=g, alpha=alpha, hbar=1.0)
    sp = spectrum.hermitian_grid(spec, level_count, h=h, L=L)
    E = sp.real()
    M = float(E[1] - E[0])
    B = [float((E[n] - E[0]) - n * M) for n in range(2, level_count)]
    count = sum(1 for v in B if v < -BOUND_DEADBAND)
    return BindingReport(g, alpha, sp, M, B, count)


class NoTransitionError(NumericalError):
    pass


def bound_counts(alpha: float, g_grid, level_count: int = 12) -> list[tuple[float, int]]:
    return [(float(g), binding_report(g, alpha, level_count).bound_count) for g in g_grid]


def critical_g_scan(alpha: float, g_grid, level_count: int = 12) -> tuple[float, float]:
    """Adjacent grid pair across which bound_count drops to zero."""
    rows = bound_counts(alpha, sorted(g_grid), level_count)
    for (g0, n0), (g1, n1) in zip(rows[:-1], rows[1:]):
        if n0 > 0 and n1 == 0:
            return g0, g1
    raise NoTransitionError(f"bound states never disappear on the grid: {rows}")


# ---------------------------------------------------------------- isospectral pairs

def isospectral_pair(name: str, g: float = 1.0, mu2: float = 1.0):
    """(PT-symmetric spec, Hermitian partner) for a named pair.

    quartic:  p^2 - g x^4                     vs  p^2 - 2 sqrt(g) z + 4 g z^4
    quadratic: p^2 + mu2 x^2 - g x^4           vs  p^2 - 2 sqrt(g) z + 4 g (z^2 - mu2/(4g))^2
    massive:  p^2/2 + mu2 x^2/2 - g x^4       vs  p^2/2 - sqrt(2g) z + 4 g (z^2 - mu2/(8g))^2
    """
    if name == "quartic":
        return (model.AnharmonicPT(m=0.5, mu2=0.0, g=g),
                model.TildeAnomalous(m=0.5, mu2=0.0, g=g, alpha=1.0, hbar=1.0))
    if name == "quadratic":
        return (model.AnharmonicPT(m=0.5, mu2=2 * mu2, g=g),
                model.TildeAnomalous(m=0.5, mu2=2 * mu2, g=g, alpha=1.0, hbar=1.0))
    if name == "massive":
        return (model.AnharmonicPT(m=1.0, mu2=mu2, g=g),
                model.TildeAnomalous(m=1.0, mu2=mu2, g=g, alpha=1.0, hbar=1.0))
    raise ValueError(f"unknown isospectral pair {name!r}")


PAIRS = ("quartic", "quadratic", "massive")


@dataclass
class IsospectralReport:
    pair: str
    pt_levels: np.ndarray
    hermitian_levels: np.ndarray
    max_rel_dev: float
    ok: bool


def isospectral_check(pair: str, k: int = 5, tol: float = 1e-4, g: float | None = None,
                      mu2: float = 1.0) -> IsospectralReport:
    """First k levels from contour shooting vs the real-axis grid solver."""
    if g is None:
        g = 0.1 if pair == "massive" else 1.0
    pt_spec, herm_spec = isospectral_pair(pair, g, mu2)
    e_max = 4.0
    while True:
        sp = spectrum.eigenvalues_real_scan(pt_spec, e_max=e_max)
        if len(sp.records) > k:
            break
        e_max *= 1.8
    pt = sp.real()[:k]
    herm = spectrum.hermitian_grid(herm_spec, k, L=GRID_L).real()
    dev = float(np.max(np.abs(pt - herm) / np.abs(pt)))
    return IsospectralReport(pair, pt, herm, dev, dev <= tol)
