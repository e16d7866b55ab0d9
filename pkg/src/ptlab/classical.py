"""Complex classical mechanics for H = k p^2 + V(x).

Hamilton's equations x' = 2 k p, p' = -V'(x) are integrated in the complex plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import model
from .errors import BlowUpError, NoSignChangeError, NumericalError
from .numerics import EventSpec, OdeSettings, integrate_ode, quad_path

SETTINGS = OdeSettings(rel_tol=1e-12, abs_tol=1e-12)
CLOSE_TOL = 1e-6
CLEAN_LANDING = 1e-10


@dataclass
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    energy: complex
    events: list = field(default_factory=list)    # (time, kind, payload)
    closed: bool = False
    period: float | None = None
    sol: object = None

    def energy_drift(self, spec) -> float:
        k = model.kinetic_coefficient(spec)
        H = k * self.momenta ** 2 + model.potential(spec, self.positions)
        return float(np.max(np.abs(H - self.energy)))

    def at(self, t):
        """Dense (x, p) at times t."""
        y = self.sol(np.atleast_1d(t))
        return y[0], y[1]


def _flow(spec):
    k = model.kinetic_coefficient(spec)
    c = model.polynomial_coeffs(spec)
    if c is not None:
        dc = np.polynomial.polynomial.polyder(c)

        def dV(x):
            return np.polynomial.polynomial.polyval(x, dc)
    else:
        def dV(x):
            return model.dpotential(spec, x)

    def f(t, y):
        return np.array([2 * k * y[1], -dV(y[0])])
    return f


def launch_momentum(spec, E: complex, x0: complex, sign: int = 1) -> complex:
    """p(0) = sign sqrt((E - V(x0)) / k)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = model.kinetic_coefficient(spec)
    return sign * cmath.sqrt((complex(E) - complex(model.potential(spec, x0))) / k)


def trajectory(spec, E: complex, x0: complex, sign: int = 1, t_max: float = 10.0,
               p0: complex | None = None, events=(), settings: OdeSettings = SETTINGS,
               detect_period: bool = True) -> Trajectory:
    """Integrate one complex orbit and annotate it.

    Events recorded: crossings of Re x = 0 ("axis"), returns through the starting
    point in the launch direction ("return"), plus any extra EventSpec.  The first
    return within CLOSE_TOL of the initial phase point sets ``closed`` and ``period``.
    """
    x0 = complex(x0)
    if p0 is None:
        p0 = launch_momentum(spec, E, x0, sign)
    specs = [EventSpec("real-part-zero"), EventSpec("return-to-start", direction=1)] + list(events)
    res = integrate_ode(_flow(spec), [x0, p0], (0.0, t_max), settings, specs)
    return _wrap(res, E, x0, p0, detect_period)


def _wrap(res, E, x0, p0, detect_period):
    names = {"real-part-zero": "axis", "return-to-start": "return", "proximity-to-point": "near"}
    evs = [(t, names[k], complex(y[0])) for t, k, y in res.events]
    tr = Trajectory(res.t, res.y[:, 0], res.y[:, 1], complex(E), evs, sol=res.sol)
    if detect_period:
        for t, kind, y in res.events:
            if kind == "return-to-start" and t > 1e-8:
                if abs(y[0] - x0) + abs(y[1] - p0) <= CLOSE_TOL:
                    tr.closed, tr.period = True, float(t)
                    break
    return tr


def period(spec, E: complex, x0: complex, sign: int = 1, t_max: float = 50.0) -> float:
    """Period of the closed orbit through x0; raises if the orbit does not close by t_max."""
    tr = trajectory(spec, E, x0, sign, t_max)
    if not tr.closed:
        raise NumericalError(f"orbit from x0 = {x0} did not close before t = {t_max}")
    return tr.period


def escape_time(N: float, E: float = 1.0) -> float:
    """Time for H = p^2 - x^N to carry a particle from the origin to +infinity.

    Returns math.inf when N <= 2 (the integral diverges).
    """
    if N <= 0 or E <= 0:
        raise ValueError("need N > 0 and E > 0")
    if N <= 2:
        return math.inf
    return quad_path(lambda x: 0.5 / cmath.sqrt(E + x ** N), [0.0, math.inf], tol=1e-11).real


def density_on_axis(E: float, x) -> np.ndarray:
    """Normalized real-axis density rho(x) = c / sqrt(E + x^4) of the -x^4 particle."""
    c = density_constant(E)
    x = np.asarray(x, dtype=float)
    return c / np.sqrt(E + x ** 4)


def density_constant(E: float) -> float:
    # int_{-inf}^{inf} dx / sqrt(E + x^4) is four escape times
    return 1.0 / (4.0 * escape_time(4, E))


# ---------------------------------------------------------------- region hopping

@dataclass
class RegionVisit:
    label: str
    pair: tuple
    t_start: float
    t_end: float


@dataclass
class RegionSequence:
    labels: list
    visits: list
    heights: list          # band heights (mean Im of each PT pair), top first
    t_max: float

    @property
    def mean_dwell(self) -> float:
        return self.t_max / len(self.visits)


def _band_names(count):
    return ["U", "M", "L"] if count == 3 else [f"B{i}" for i in range(count)]


def region_sequence(spec, E: complex, x0: complex, t_max: float, sign: int = 1,
                    settings: OdeSettings = SETTINGS) -> RegionSequence:
    """Compressed sequence of turning-point-pair regions visited by the orbit.

    Each stretch between crossings of Re x = 0 is labelled by the pair whose band
    height (mean imaginary part of the pair's turning points at Re E) is closest
    to the mean Im x over the stretch.
    """
    pairs = model.pt_pair(model.turning_points(spec, complex(E).real))
    if len(pairs) < 2:
        raise ValueError("need at least two PT pairs of turning points")
    heights = [0.5 * (a.imag + b.imag) for a, b in pairs]
    names = _band_names(len(pairs))
    tr = trajectory(spec, E, x0, sign, t_max, settings=settings, detect_period=False)
    cross = [t for t, kind, _ in tr.events if kind == "axis"]
    edges = np.concatenate([[0.0], cross, [t_max]])
    raw = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        xs, _ = tr.at(np.linspace(a, b, 50))
        m = float(np.mean(xs.imag))
        d = np.abs(np.array(heights) - m)
        i = int(np.argmin(d))
        srt = np.sort(d)
        if srt[1] - srt[0] < 1e-6:
            raise NumericalError(f"epoch [{a:.4g}, {b:.4g}] sits on a band boundary")
        raw.append((i, a, b))
    visits = []
    for i, a, b in raw:
        if visits and visits[-1].label == names[i]:
            visits[-1].t_end = b
        else:
            visits.append(RegionVisit(names[i], pairs[i], a, b))
    return RegionSequence([v.label for v in visits], visits, heights, t_max)


def mean_dwell_time(spec, E: complex, starts=(0.5j, 1.167j, -1.5j), t_max: float = 500.0,
                    escape_radius: float = 50.0) -> tuple[float, int]:
    """Mean time per region visit pooled over several orbits (both launch signs).

    Orbits that wander beyond ``escape_radius`` pass close to infinity, where the
    band rule is meaningless; they are skipped.  Returns (dwell, orbits used).
    """
    total_t, total_v, used = 0.0, 0, 0
    settings = OdeSettings(rel_tol=1e-12, abs_tol=1e-12, blowup_radius=escape_radius)
    for x0 in starts:
        for sign in (1, -1):
            try:
                seq = region_sequence(spec, E, x0, t_max, sign, settings)
            except BlowUpError:
                continue
            total_t += t_max
            total_v += len(seq.visits)
            used += 1
    if not used:
        raise NumericalError("every orbit escaped")
    return total_t / total_v, used


# ---------------------------------------------------------------- resonances

def _split_wells(spec, E):
    tps = model.turning_points(spec, E)
    left = sorted([t for t in tps if t.real < 0], key=lambda z: z.imag)
    right = sorted([t for t in tps if t.real > 0], key=lambda z: -z.imag)
    return left, right


def closest_approach(spec, E: complex, start: complex, target: complex, t_cap: float = 30.0,
                     delta: float = 0.05):
    """Signed miss distance at the first local minimum of |x - target| inside radius delta.

    The orbit starts at rest on ``start``.  The sign is that of Im[(x - target) conj(v)],
    i.e. which side of the target the orbit passes.  Returns (miss, time) or (nan, nan).
    """
    f = _flow(spec)
    k = model.kinetic_coefficient(spec)

    def enter(t, y):
        return abs(y[0] - target) - delta
    enter.terminal, enter.direction = True, -1

    def closest(t, y):
        return ((y[0] - target) * np.conj(2 * k * y[1])).real
    closest.terminal, closest.direction = True, 1

    y0 = np.array([start, 0j])
    t0 = 0.0
    while t0 < t_cap:
        s1 = integrate.solve_ivp(f, (t0, t_cap), y0, method="DOP853", rtol=1e-11, atol=1e-12,
                                 events=[enter])
        if not s1.t_events[0].size:
            return math.nan, math.nan
        t0, y0 = s1.t_events[0][0], s1.y_events[0][0]
        s2 = integrate.solve_ivp(f, (t0, t_cap), y0, method="DOP853", rtol=1e-11, atol=1e-12,
                                 events=[closest])
        if not s2.t_events[0].size:
            return math.nan, math.nan
        te, ye = s2.t_events[0][0], s2.y_events[0][0]
        x, v = ye[0], 2 * k * ye[1]
        d = abs(x - target)
        if d < delta:
            return math.copysign(d, ((x - target) * np.conj(v)).imag), float(te)
        t0, y0 = te, ye
    return math.nan, math.nan


@dataclass
class Resonance:
    im_E: float
    period: float
    start: complex
    target: complex
    miss: float


def resonance_search(spec, re_E: float, bracket: tuple[float, float], scan: int = 9,
                     t_cap: float = 30.0, delta: float = 0.05) -> Resonance:
    """Im E at which the orbit from a left-well turning point lands on a right-well one.

    Every (left, right) turning-point combination is scanned over the bracket; sign
    changes of the signed miss with continuous pass times are refined by Brent's
    method and kept when the landing error is below 1e-4.  Landings within
    CLEAN_LANDING are preferred, then the candidate nearest the bracket midpoint.
    The period is twice the connection time.
    """
    lo, hi = bracket
    if not lo < hi:
        raise ValueError("bracket must be increasing")
    grid = np.linspace(lo, hi, scan)
    found = []
    for li in range(2):
        for ri in range(2):
            def obj(im, li=li, ri=ri):
                L, R = _split_wells(spec, complex(re_E, im))
                return closest_approach(spec, complex(re_E, im), L[li], R[ri], t_cap, delta)
            vals = [obj(g) for g in grid]
            for (g1, (m1, t1)), (g2, (m2, t2)) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
                if not (np.isfinite(m1) and np.isfinite(m2)) or np.sign(m1) == np.sign(m2):
                    continue
                if abs(t1 - t2) > 0.25 * max(t1, t2):
                    continue
                try:
                    im = optimize.brentq(lambda s: np.nan_to_num(obj(s)[0], nan=delta), g1, g2,
                                         xtol=1e-12)
                except ValueError:
                    continue
                miss, t = obj(im)
                if np.isfinite(miss) and abs(miss) < 1e-4:
                    L, R = _split_wells(spec, complex(re_E, im))
                    found.append(Resonance(im, 2 * t, L[li], R[ri], abs(miss)))
    if not found:
        raise NoSignChangeError(f"no resonance for Re E = {re_E} in [{lo}, {hi}]")
    # clean landings first (outer-pair roots tend to be glancing), then nearest the midpoint
    mid = 0.5 * (lo + hi)
    return min(found, key=lambda r: (r.miss > CLEAN_LANDING, abs(r.im_E - mid)))


# ---------------------------------------------------------------- quartic anomaly periods

def anomaly_period_compare(g: float = 1.0, m: float = 1.0, mu2: float = 0.0, E: float = 1.0,
                           x0_pt: complex = 2j, x0_tilde: complex = -1.0) -> tuple[float, float, float]:
    """Periods of the PT quartic orbit and of its Hermitian partner with and without the anomaly."""
    pt = model.AnharmonicPT(m=m, mu2=mu2, g=g)
    p_pt = period(pt, E, x0_pt)
    out = [p_pt]
    for hbar in (1.0, 0.0):
        spec = model.TildeAnomalous(m=m, mu2=mu2, g=g, alpha=1.0, hbar=hbar)
        out.append(period(spec, E, x0_tilde))
    return tuple(out)
