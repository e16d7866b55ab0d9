"""Hamiltonian families, potentials, turning points, Stokes sectors and contours.

Every family has the form H = k p^2 + V(x) with a kinetic coefficient k, except
MonomialDeformed with m > 1, which is accepted as a description but has no
second-order Schroedinger form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, fields
from typing import Union

import numpy as np

from .errors import BranchCutError, NumericalError


@dataclass(frozen=True)
class MonomialDeformed:
    """H = p^(2m) + x^(2n) (ix)^eps."""
    m: int = 1
    n: int = 1
    eps: float = 0.0
    family = "monomial"


@dataclass(frozen=True)
class ShiftedOscillator:
    """H = p^2/2 + x^2/2 + i eps x."""
    eps: float = 0.0
    family = "shifted"


@dataclass(frozen=True)
class PolynomialPotential:
    """H = kinetic_coeff p^2 + sum_j coeffs[j] x^j."""
    kinetic_coeff: float = 1.0
    coeffs: tuple = (0.0, 0.0, 1.0)
    family = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))


@dataclass(frozen=True)
class AnharmonicPT:
    """H = p^2/(2m) + (mu2/2) x^2 - g x^4."""
    m: float = 0.5
    mu2: float = 0.0
    g: float = 1.0
    family = "anharmonic-pt"


@dataclass(frozen=True)
class TildeAnomalous:
    """H = p^2/(2m) - alpha hbar sqrt(2g/m) z + 4g (z^2 - mu2/(8g))^2 on the real z axis."""
    m: float = 0.5
    mu2: float = 0.0
    g: float = 1.0
    alpha: float = 1.0
    hbar: float = 1.0
    family = "tilde"


@dataclass(frozen=True)
class QESQuartic:
    """H = p^2 - x^4 + 2i a x^3 + (a^2 - 2b) x^2 + 2i (ab - J) x."""
    a: float = 0.0
    b: float = 0.0
    J: int = 1
    family = "qes"


@dataclass(frozen=True)
class CubicPT:
    """H = p^2/2 + x^2/2 + i eps x^3."""
    eps: float = 0.0
    family = "cubic"


HamiltonianSpec = Union[MonomialDeformed, ShiftedOscillator, PolynomialPotential, AnharmonicPT,
                        TildeAnomalous, QESQuartic, CubicPT]

FAMILIES = {cls.family: cls for cls in (MonomialDeformed, ShiftedOscillator, PolynomialPotential,
                                        AnharmonicPT, TildeAnomalous, QESQuartic, CubicPT)}


def spec_to_dict(spec: HamiltonianSpec) -> dict:
    d = {"family": spec.family}
    for k, v in asdict(spec).items():
        if k == "coeffs":
            v = [[c.real, c.imag] for c in v]
        d[k] = v
    return d


def spec_from_dict(d: dict) -> HamiltonianSpec:
    d = dict(d)
    try:
        cls = FAMILIES[d.pop("family")]
    except KeyError as exc:
        raise ValueError(f"unknown or missing family tag in {d}") from exc
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise ValueError(f"unexpected fields for {cls.family}: {sorted(unknown)}")
    if "coeffs" in d:
        d["coeffs"] = tuple(complex(*c) if isinstance(c, (list, tuple)) else complex(c)
                            for c in d["coeffs"])
    return cls(**d)


def kinetic_coefficient(spec: HamiltonianSpec) -> float:
    """k in H = k p^2 + V."""
    if isinstance(spec, MonomialDeformed):
        if spec.m != 1:
            raise NotImplementedError("only m = 1 (second-order) monomial families are solvable")
        return 1.0
    if isinstance(spec, (ShiftedOscillator, CubicPT)):
        return 0.5
    if isinstance(spec, PolynomialPotential):
        return float(spec.kinetic_coeff)
    if isinstance(spec, (AnharmonicPT, TildeAnomalous)):
        return 1.0 / (2.0 * spec.m)
    if isinstance(spec, QESQuartic):
        return 1.0
    raise TypeError(f"unsupported spec {spec!r}")


def _is_int(v: float) -> bool:
    return float(v) == math.floor(v)


def polynomial_coeffs(spec: HamiltonianSpec):
    """Ascending coefficients of V when V is a polynomial, else None."""
    if isinstance(spec, MonomialDeformed):
        if not _is_int(spec.eps) or 2 * spec.n + spec.eps < 0:
            return None
        e = int(spec.eps)
        c = np.zeros(2 * spec.n + e + 1, dtype=complex)
        c[-1] = 1j ** e
        return c
    if isinstance(spec, ShiftedOscillator):
        return np.array([0, 1j * spec.eps, 0.5], dtype=complex)
    if isinstance(spec, PolynomialPotential):
        return np.trim_zeros(np.array(spec.coeffs, dtype=complex), "b")
    if isinstance(spec, AnharmonicPT):
        return np.array([0, 0, spec.mu2 / 2, 0, -spec.g], dtype=complex)
    if isinstance(spec, TildeAnomalous):
        s = spec.mu2 / (8 * spec.g)
        lin = -spec.alpha * spec.hbar * math.sqrt(2 * spec.g / spec.m)
        return np.array([4 * spec.g * s * s, lin, -8 * spec.g * s, 0, 4 * spec.g], dtype=complex)
    if isinstance(spec, QESQuartic):
        a, b, J = spec.a, spec.b, spec.J
        return np.array([0, 2j * (a * b - J), a * a - 2 * b, 2j * a, -1], dtype=complex)
    if isinstance(spec, CubicPT):
        return np.array([0, 0, 0.5, 1j * spec.eps], dtype=complex)
    raise TypeError(f"unsupported spec {spec!r}")


def _ix_pow(x: np.ndarray, eps: float) -> np.ndarray:
    """(ix)^eps on the principal sheet; the cut lies on the positive imaginary x axis."""
    if np.any((x.real == 0) & (x.imag > 0)) or (eps < 0 and np.any(x == 0)):
        raise BranchCutError("x lies on the branch cut (positive imaginary axis)")
    return np.exp(eps * np.log(1j * x))


def potential(spec: HamiltonianSpec, x):
    """V(x), vectorized over x."""
    x = np.asarray(x, dtype=complex)
    c = polynomial_coeffs(spec)
    if c is not None:
        return np.polynomial.polynomial.polyval(x, c)
    return x ** (2 * spec.n) * _ix_pow(x, spec.eps)


def potential_function(spec: HamiltonianSpec):
    """V as a vectorized closure with the family dispatch done once (for hot loops)."""
    c = polynomial_coeffs(spec)
    if c is not None:
        rev = [complex(v) for v in reversed(c)]

        def V(x):
            acc = rev[0] * np.ones_like(x, dtype=complex)
            for a in rev[1:]:
                acc = acc * x + a
            return acc
        return V
    two_n, eps = 2 * spec.n, spec.eps
    return lambda x: x ** two_n * np.exp(eps * np.log(1j * x))


def dpotential(spec: HamiltonianSpec, x):
    """V'(x), vectorized over x."""
    x = np.asarray(x, dtype=complex)
    c = polynomial_coeffs(spec)
    if c is not None:
        return np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(c))
    return (2 * spec.n + spec.eps) * x ** (2 * spec.n - 1) * _ix_pow(x, spec.eps)


def degree(spec: HamiltonianSpec) -> float:
    c = polynomial_coeffs(spec)
    if c is not None:
        return len(c) - 1
    return 2 * spec.n + spec.eps


def leading_coeff(spec: HamiltonianSpec) -> complex:
    c = polynomial_coeffs(spec)
    if c is not None:
        return complex(c[-1])
    return cmath.exp(1j * math.pi * spec.eps / 2)


@dataclass(frozen=True)
class StokesSector:
    center_angle: float
    opening_angle: float

    def contains(self, theta: float) -> bool:
        d = (theta - self.center_angle + math.pi) % (2 * math.pi) - math.pi
        return abs(d) < self.opening_angle / 2

    @property
    def edges(self):
        h = self.opening_angle / 2
        return self.center_angle - h, self.center_angle + h


def stokes_sectors(spec: HamiltonianSpec, kind: str = "pt") -> tuple[StokesSector, StokesSector]:
    """(left, right) pair of sectors in which the eigenfunctions decay.

    kind="pt" gives the family's PT-symmetric pair (the real axis for Hermitian
    families), kind="rotated" the pair centered on the +/- imaginary axis.
    """
    N = degree(spec)
    opening = 2 * math.pi / (N + 2)
    if kind == "rotated":
        return StokesSector(math.pi / 2, opening), StokesSector(-math.pi / 2, opening)
    if kind != "pt":
        raise ValueError(f"unknown sector kind {kind!r}")
    if isinstance(spec, MonomialDeformed):
        right = -math.pi * spec.eps / (4 * spec.n + 4 + 2 * spec.eps)
    else:
        # Centers satisfy (N+2) theta + arg(c_N) = 0 mod 2 pi; take the one in (-pi/2, 0].
        phase = cmath.phase(leading_coeff(spec))
        k = math.floor((phase / (2 * math.pi)))
        cands = [(2 * math.pi * j - phase) / (N + 2) for j in range(k - 2, k + N + 4)]
        right = max(t for t in cands if t <= 1e-12)
        right = 0.0 if abs(right) < 1e-12 else right
    return StokesSector(-math.pi - right, opening), StokesSector(right, opening)


def turning_points(spec: HamiltonianSpec, E: complex) -> list[complex]:
    """All principal-sheet solutions of V(x) = E, sorted by descending argument."""
    E = complex(E)
    c = polynomial_coeffs(spec)
    if c is not None:
        shifted = c.copy()
        shifted[0] -= E
        roots = np.polynomial.polynomial.polyroots(shifted)
        der = np.polynomial.polynomial.polyder(shifted)
        for _ in range(3):
            roots = roots - np.polynomial.polynomial.polyval(roots, shifted) / np.polynomial.polynomial.polyval(roots, der)
        expected = len(c) - 1
    else:
        if E == 0:
            raise ValueError("E = 0 is a degenerate turning-point problem for monomial families")
        N = 2 * spec.n + spec.eps
        r = abs(E) ** (1 / N)
        phi = cmath.phase(E)
        roots = []
        for k in range(-int(N) - 3, int(N) + 4):
            theta = (phi + 2 * math.pi * k - spec.eps * math.pi / 2) / N
            if -1.5 * math.pi < theta <= 0.5 * math.pi:
                roots.append(r * cmath.exp(1j * theta))
        roots = np.array(roots, dtype=complex)
        expected = len(roots)
    roots = [complex(z) for z in roots]
    if len(roots) != expected:
        raise NumericalError("turning-point count mismatch")
    scale = max(1.0, abs(E))
    for z in roots:
        if abs(complex(potential(spec, z)) - E) > 1e-10 * scale * max(1.0, abs(z)) ** degree(spec):
            raise NumericalError(f"turning point {z} failed to polish")
    return sorted(roots, key=lambda z: -cmath.phase(z))


def pt_pair(points, tol: float = 1e-9) -> list[tuple[complex, complex]]:
    """Group points into PT-mirror pairs (x-, x+) with x+ = -conj(x-).

    Points on the imaginary axis are their own mirror and are skipped.  Pairs are
    ordered by descending imaginary part of their midpoints.
    """
    pts = [complex(z) for z in points]
    used = [False] * len(pts)
    pairs = []
    for i, z in enumerate(pts):
        if used[i]:
            continue
        mirror = -z.conjugate()
        if abs(mirror - z) <= tol * max(1.0, abs(z)):
            used[i] = True
            continue
        j = min((j for j in range(len(pts)) if not used[j] and j != i),
                key=lambda j: abs(pts[j] - mirror), default=None)
        if j is None or abs(pts[j] - mirror) > tol * max(1.0, abs(z)):
            raise NumericalError(f"no PT partner for turning point {z}")
        used[i] = used[j] = True
        lo, hi = (z, pts[j]) if z.real < pts[j].real else (pts[j], z)
        pairs.append((lo, hi))
    pairs.sort(key=lambda p: -(p[0].imag + p[1].imag))
    return pairs


@dataclass(frozen=True)
class ContourSpec:
    """Straight segments from left endpoint to anchor to right endpoint.

    The endpoints sit at radius * exp(i angle) measured from the origin.
    """
    anchor: complex
    left_angle: float
    right_angle: float
    radius: float
    anchor_power: float | None = None     # anchor(E) = anchor * |E|^power when set

    def anchor_at(self, E) -> np.ndarray:
        E = np.atleast_1d(np.asarray(E, dtype=complex))
        if self.anchor_power is None:
            return np.full(E.shape, complex(self.anchor))
        # floored so E = 0 does not put the anchor on a branch point
        return self.anchor * np.maximum(np.abs(E), 1e-2) ** self.anchor_power

    def at(self, E: complex) -> "ContourSpec":
        """The same rays with the anchor frozen at its position for energy E."""
        return ContourSpec(complex(self.anchor_at(E)[0]), self.left_angle, self.right_angle, self.radius)

    @property
    def left_end(self) -> complex:
        return self.radius * cmath.exp(1j * self.left_angle)

    @property
    def right_end(self) -> complex:
        return self.radius * cmath.exp(1j * self.right_angle)

    def points(self, n: int = 400) -> np.ndarray:
        """Sample points running left end -> anchor -> right end."""
        s = np.linspace(0.0, 1.0, n)
        a = self.left_end + (self.anchor - self.left_end) * s
        b = self.anchor + (self.right_end - self.anchor) * s[1:]
        return np.concatenate([a, b])


DECAY_BUDGET = 25.0


def _decay_radius(spec: HamiltonianSpec, theta: float, anchor: complex, E: float, r0: float) -> float:
    k = kinetic_coefficient(spec)
    R = max(2 * r0, 1.0)
    for _ in range(60):
        s = np.linspace(r0, R, 2000)
        x = s * np.exp(1j * theta)
        q = np.sqrt((potential(spec, x) - E) / k + 0j) * np.exp(1j * theta)
        action = np.trapezoid(np.abs(q.real), s)
        if action >= DECAY_BUDGET:
            return R
        R *= 1.25
    raise NumericalError("could not reach the decay budget")


def turning_radius(spec: HamiltonianSpec, E: float) -> float:
    return abs(complex(E) / leading_coeff(spec)) ** (1.0 / degree(spec))


def default_contour(spec: HamiltonianSpec, E_scale: float = 1.0, kind: str = "pt",
                    radius: float | None = None) -> ContourSpec:
    """Contour whose rays run along the sector centers.

    The anchor is the origin when the sectors include the real or imaginary axis.
    For deformed monomials with sectors below the axis it moves with the energy,
    sitting level with the midpoint of the relevant turning pair, so the two legs
    meet inside the oscillatory region at every level.  Other families use -i c,
    with c half the unit-energy turning-point radius (a tenth of it when the
    sectors tilt upward and the origin is a branch point).  The radius is set so
    the WKB decay exponent at E_scale exceeds 25.
    """
    left, right = stokes_sectors(spec, kind)
    r_tp = turning_radius(spec, max(abs(E_scale), 1e-3))
    r_one = turning_radius(spec, 1.0)
    power = None
    if kind == "rotated" or abs(right.center_angle) < 1e-12:
        anchor = 0j
    elif right.center_angle < 0 and isinstance(spec, MonomialDeformed):
        # follow the midpoint of the turning pair nearest the sector centers; it scales as E^(1/N)
        pairs = pt_pair(turning_points(spec, 1.0))
        xm, xp = min(pairs, key=lambda pr: abs(cmath.phase(pr[1]) - right.center_angle))
        anchor = 1j * ((xm + xp) / 2).imag
        power = 1.0 / degree(spec)
    elif right.center_angle < 0:
        anchor = -0.5j * r_one
    else:
        anchor = -0.1j * r_one
    if radius is None:
        radius = max(_decay_radius(spec, right.center_angle, anchor, abs(E_scale), r_tp),
                     _decay_radius(spec, left.center_angle, anchor, abs(E_scale), r_tp))
    return ContourSpec(anchor, left.center_angle, right.center_angle, float(radius), power)
