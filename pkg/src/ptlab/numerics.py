"""Special functions, root finding, complex ODE integration and path quadrature."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import BlowUpError, ConvergenceError, NoSignChangeError, NumericalError


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z)."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise NumericalError(f"Gamma has a pole at z = {z.real:g}")
    return complex(special.loggamma(z))


def gamma(x: float) -> float:
    """Real Gamma function evaluated through log_gamma."""
    return cmath.exp(log_gamma(x)).real


def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float,
                        tol: float = 1e-12, maxiter: int = 200) -> float:
    """Root of a real function inside a sign-changing bracket (Brent's method)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f = {flo:.3g}, {fhi:.3g}")
    try:
        return optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=maxiter)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc


def find_root_complex(f: Callable[[complex], complex], z0: complex, tol: float = 1e-12,
                      step: complex | None = None, trust_radius: float | None = None,
                      maxiter: int = 60) -> complex:
    """Secant iteration for an analytic function, started from z0.

    Iterates that wander farther than ``trust_radius`` from z0 raise ConvergenceError.
    Convergence is declared when |f| <= tol or the update is below tol relative to |z|.
    """
    z0 = complex(z0)
    if step is None:
        step = 1e-4 * max(1.0, abs(z0))
    if trust_radius is None:
        trust_radius = max(1.0, abs(z0))
    z1 = z0 + step
    f0, f1 = f(z0), f(z1)
    if abs(f0) <= tol:
        return z0
    for _ in range(maxiter):
        if abs(f1) <= tol:
            return z1
        denom = f1 - f0
        if denom == 0:
            raise ConvergenceError("secant denominator vanished")
        z2 = z1 - f1 * (z1 - z0) / denom
        if abs(z2 - z0) > trust_radius:
            raise ConvergenceError(f"iterate {z2} left trust radius {trust_radius} around {z0}")
        z0, f0 = z1, f1
        z1, f1 = z2, f(z2)
        if abs(z1 - z0) <= tol * max(1.0, abs(z1)):
            return z1
    raise ConvergenceError(f"no convergence after {maxiter} secant steps (|f| = {abs(f1):.3g})")


@dataclass(frozen=True)
class OdeSettings:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 1_000_000
    blowup_radius: float = 1e8

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_steps <= 0:
            raise ValueError("tolerances and max_steps must be positive")


@dataclass(frozen=True)
class EventSpec:
    """Event on the first state component (the position).

    kind: "real-part-zero", "proximity-to-point" or "return-to-start".
    direction follows scipy: +1 rising, -1 falling, 0 both.
    """

    kind: str
    target: complex | None = None
    radius: float | None = None
    direction: int = 0
    terminal: bool = False

    def __post_init__(self):
        if self.kind not in ("real-part-zero", "proximity-to-point", "return-to-start"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == "proximity-to-point" and (self.radius is None or self.radius <= 0):
            raise ValueError("proximity events need radius > 0")


@dataclass
class OdeResult:
    t: np.ndarray
    y: np.ndarray                      # shape (len(t), dim), complex
    events: list = field(default_factory=list)   # (time, kind, state)
    sol: Callable | None = None        # dense output t -> state


def _event_function(spec: EventSpec, y0: np.ndarray, v0: complex):
    if spec.kind == "real-part-zero":
        def g(t, y):
            return y[0].real
    elif spec.kind == "proximity-to-point":
        def g(t, y):
            return abs(y[0] - spec.target) - spec.radius
    else:
        # Signed displacement along the launch velocity; crosses zero upward
        # each time the orbit passes the starting point in the launch direction.
        def g(t, y):
            return ((y[0] - y0[0]) * np.conj(v0)).real
    g.terminal = spec.terminal
    g.direction = spec.direction
    return g


def integrate_ode(f: Callable[[float, np.ndarray], np.ndarray], y0: Sequence[complex],
                  t_span: tuple[float, float], settings: OdeSettings = OdeSettings(),
                  events: Sequence[EventSpec] = ()) -> OdeResult:
    """Adaptive Dormand-Prince 8(5,3) integration of a complex system.

    Event times are located by root finding on the dense interpolant.  A step-size
    underflow or an excursion beyond ``settings.blowup_radius`` raises BlowUpError
    carrying the partial solution.
    """
    y0 = np.asarray(y0, dtype=complex)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t0 == t1:
        raise ValueError("degenerate time span")
    v0 = complex(f(t0, y0)[0])
    fns = [_event_function(e, y0, v0) for e in events]

    def guard(t, y):
        return settings.blowup_radius - abs(y[0])
    guard.terminal = True
    guard.direction = -1

    nfev = 0

    def rhs(t, y):
        nonlocal nfev
        nfev += 1
        if nfev > 12 * settings.max_steps:
            raise NumericalError(f"max_steps={settings.max_steps} exceeded at t={t:.6g}")
        return f(t, y)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = integrate.solve_ivp(rhs, (t0, t1), y0, method="DOP853", rtol=settings.rel_tol,
                                  atol=settings.abs_tol, max_step=settings.max_step,
                                  events=fns + [guard], dense_output=True)
    out_events = []
    for spec, times, states in zip(events, res.t_events, res.y_events):
        for te, ye in zip(times, states):
            out_events.append((float(te), spec.kind, ye))
    out_events.sort(key=lambda e: e[0])
    result = OdeResult(t=res.t, y=res.y.T.copy(), events=out_events, sol=res.sol)
    blew = len(res.t_events[-1]) > 0
    if res.status == -1 or blew:
        t_end = float(res.t[-1])
        raise BlowUpError(f"trajectory blew up near t = {t_end:.6g} ({res.message})",
                          t_blowup=t_end, partial=result)
    return result


def quad_path(f: Callable[[complex], complex], waypoints: Sequence[complex], tol: float = 1e-10,
              singular: Sequence[int] = (), limit: int = 200) -> complex:
    """Integral of f along straight segments joining the waypoints.

    ``singular`` lists waypoint indices where f has an integrable inverse-square-root
    singularity; those ends are smoothed by a quadratic substitution before the
    adaptive Gauss-Kronrod rule is applied.  A final waypoint of +inf or -inf extends
    the last segment to infinity along the real direction.
    """
    pts = list(waypoints)
    if len(pts) < 2:
        raise ValueError("need at least two waypoints")
    sing = set(singular)
    total = 0j
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        if isinstance(b, float) and math.isinf(b):
            direction = 1.0 if b > 0 else -1.0
            a = complex(a)

            def g(u, a=a, d=direction):
                return f(a + d * u) * d
            total += _quad_complex(g, 0.0, math.inf, tol, limit)
            continue
        a, b = complex(a), complex(b)
        h = b - a
        sa, sb = k in sing, (k + 1) in sing
        if sa and sb:
            # x = a + h (1 - cos(pi u)) / 2 removes both inverse-square-root ends
            def g(u, a=a, h=h):
                return f(a + h * (1 - math.cos(math.pi * u)) / 2) * h * math.pi * math.sin(math.pi * u) / 2
        elif sa:
            def g(u, a=a, h=h):
                return f(a + h * u * u) * 2 * h * u
        elif sb:
            def g(u, a=a, h=h):
                return f(a + h * (1 - (1 - u) ** 2)) * 2 * h * (1 - u)
        else:
            def g(u, a=a, h=h):
                return f(a + h * u) * h
        total += _quad_complex(g, 0.0, 1.0, tol, limit)
    return total


def _quad_complex(g, lo, hi, tol, limit):
    vals = []
    for part in (lambda u: g(u).real, lambda u: g(u).imag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info = integrate.quad(part, lo, hi, epsabs=tol / 2, epsrel=0.0,
                                            limit=limit, full_output=1)[:3]
        if err > tol:
            raise ConvergenceError(f"quadrature error estimate {err:.2e} exceeds tol {tol:.1e}")
        vals.append(val)
    return complex(vals[0], vals[1])

