"""Leading-order WKB eigenvalues: numeric action integrals and Gamma-function closed forms."""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import model
from .errors import NumericalError
from .numerics import find_root_bracketed, log_gamma, quad_path

FAMILIES = ("hermitian-x6", "pt-x6", "pt-quartic", "x10-hermitian", "x10-middle", "x10-lower",
            "pt-monomial")


def _g(z: float) -> float:
    return math.exp(log_gamma(z).real)


def monomial_wkb(N: float, n: int) -> float:
    """WKB level n of p^2 + x^2 (ix)^(N-2) for the PT pair of turning points."""
    base = _g(1.5 + 1 / N) * math.sqrt(math.pi) * (n + 0.5) / (math.sin(math.pi / N) * _g(1 + 1 / N))
    return base ** (2 * N / (N + 2))


def wkb_closed_form(family: str, n: int, N: float | None = None) -> float:
    """Closed-form WKB level for one of the tagged families (N only for pt-monomial)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    sp = math.sqrt(math.pi)
    if family == "hermitian-x6":
        return ((4 * n + 2) * sp * _g(2 / 3) / _g(1 / 6)) ** 1.5
    if family == "pt-x6":
        return ((8 * n + 4) * sp * _g(2 / 3) / _g(1 / 6)) ** 1.5
    if family == "pt-quartic":
        return ((6 * n + 3) * math.sqrt(2 * math.pi) * _g(0.75) / (2 * _g(0.25))) ** (4 / 3)
    if family in ("x10-hermitian", "x10-middle", "x10-lower"):
        c = {"x10-hermitian": 1.0, "x10-middle": math.cos(math.pi / 5),
             "x10-lower": math.cos(2 * math.pi / 5)}[family]
        return ((6 * n + 3) * sp * _g(0.6) / (c * _g(0.1))) ** (5 / 3)
    if family == "pt-monomial":
        if N is None:
            raise ValueError("pt-monomial needs N = 2 + eps")
        return monomial_wkb(N, n)
    raise ValueError(f"unknown WKB family {family!r}")


def _select_pair(spec, E, ref):
    pairs = model.pt_pair(model.turning_points(spec, E))
    if isinstance(ref, int):
        return pairs[ref]
    am, ap = cmath.phase(ref[0]), cmath.phase(ref[1])

    def dist(pr):
        return abs(cmath.exp(1j * cmath.phase(pr[0])) - cmath.exp(1j * am)) + \
            abs(cmath.exp(1j * cmath.phase(pr[1])) - cmath.exp(1j * ap))
    return min(pairs, key=dist)


def action(spec: model.HamiltonianSpec, E: float, pair, anchor: complex = 0j) -> complex:
    """int sqrt((E - V)/k) dx from x_- through the anchor to x_+.

    The square-root branch is continuous along the path, fixed so that the integrand
    has positive real part at the midpoint of the first segment.
    """
    xm, xp = _select_pair(spec, E, pair)
    k = model.kinetic_coefficient(spec)
    mid = (xm + anchor) / 2
    ref = cmath.sqrt((E - complex(model.potential(spec, mid))) / k)
    if ref.real < 0:
        ref = -ref
    phi = cmath.phase(ref) * 2          # reference argument of E - V

    def root(w):
        # cut placed opposite the reference direction
        return cmath.exp(0.5j * phi) * cmath.sqrt(w * cmath.exp(-1j * phi))

    def f(x):
        return root((E - complex(model.potential(spec, x))) / k)

    _check_branch(f, [xm, anchor, xp])
    return quad_path(f, [xm, anchor, xp], tol=1e-12, singular=(0, 2))


def _check_branch(f, pts, samples=64):
    prev = None
    for a, b in zip(pts[:-1], pts[1:]):
        for u in np.linspace(0.02, 0.98, samples):
            v = f(a + (b - a) * u)
            if prev is not None and abs(v) > 1e-8 and abs(prev) > 1e-8:
                if abs(cmath.phase(v / prev)) > math.pi / 2:
                    raise NumericalError("square-root branch jumps along the WKB path")
            prev = v


def wkb_quantize_numeric(spec: model.HamiltonianSpec, pair, n: int, anchor: complex = 0j,
                         E_prev: float | None = None) -> float:
    """Solve Re action(E) = (n + 1/2) pi for E.

    ``pair`` is an index into the PT pair list (descending midpoint height) or a
    reference (x_-, x_+) whose directions identify the pair at other energies.
    """
    target = (n + 0.5) * math.pi

    def g(E):
        return action(spec, E, pair, anchor).real - target
    lo = E_prev if E_prev is not None else 1e-6
    hi = 4 * lo + 1
    while g(hi) < 0:
        lo, hi = hi, 4 * hi + 1
        if hi > 1e12:
            raise NumericalError("WKB action never reaches the quantization target")
    return find_root_bracketed(g, lo, hi, tol=1e-13)
