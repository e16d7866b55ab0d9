"""Eigenvalues and eigenfunctions under complex-contour boundary conditions.

The Schroedinger equation k psi'' = (V - E) psi is integrated inward from both
contour endpoints, each started on the decaying physical-optics WKB solution, and
the two solutions are compared at the anchor through their Wronskian.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special
from scipy.linalg import eigh_tridiagonal

from . import model, wkb
from .errors import ConvergenceError, NumericalError, PhaseError
from .model import ContourSpec, HamiltonianSpec
from .numerics import find_root_bracketed, find_root_complex

RTOL = 1e-11


@dataclass
class EigenRecord:
    index: int
    energy: complex
    residual: float
    method: str


@dataclass
class Spectrum:
    spec: HamiltonianSpec
    contour: ContourSpec | None
    records: list = field(default_factory=list)

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def real(self) -> np.ndarray:
        return self.energies.real


def _legs(contour: ContourSpec, E=None):
    """Endpoints (2,) and leg vectors, (2,) for a fixed anchor or (2, n) per energy."""
    ends = np.array([contour.left_end, contour.right_end])
    if contour.anchor_power is None or E is None:
        return ends, contour.anchor - ends
    return ends, contour.anchor_at(E)[None, :] - ends[:, None]


def _initial_state(spec, ends, d, E, k):
    """Decaying WKB data psi = 1, psi' = (-sqrt(Q) - Q'/(4Q)) at each endpoint."""
    V = model.potential(spec, ends)[:, None]
    dV = model.dpotential(spec, ends)[:, None]
    Q = (V - E[None, :]) / k
    sq = np.sqrt(Q)
    outward = -d / np.abs(d)
    if outward.ndim == 1:
        outward = outward[:, None]
    sq = np.where((sq * outward).real < 0, -sq, sq)
    psi = np.ones_like(Q)
    dpsi = (-sq - dV / (4 * k * Q)) * psi
    return np.stack([psi, dpsi], axis=1)          # (side, component, energy)


def _shoot(spec, contour, E, rtol=RTOL, dense=False):
    """Integrate both legs for every energy in E at once.

    Returns the (side, component, energy) state at the anchor and, with dense=True,
    the scipy dense-output object over the path parameter s in [0, 1].
    """
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    k = model.kinetic_coefficient(spec)
    ends, d = _legs(contour, E)
    y0 = _initial_state(spec, ends, d, E, k)
    n = E.size

    V = model.potential_function(spec)
    dcol = d if d.ndim == 2 else d[:, None]
    coef = dcol / k
    start = ends[:, None]

    def rhs(s, y):
        y = y.reshape(2, 2, n)
        out = np.empty_like(y)
        out[:, 0] = dcol * y[:, 1]
        out[:, 1] = coef * (V(start + s * dcol) - E) * y[:, 0]
        return out.ravel()

    sol = integrate.solve_ivp(rhs, (0.0, 1.0), y0.ravel(), method="DOP853", rtol=rtol,
                              atol=1e-300, dense_output=dense)
    if sol.status != 0:
        raise NumericalError(f"shooting integration failed: {sol.message}")
    final = sol.y[:, -1].reshape(2, 2, n)
    if not np.all(np.isfinite(final)):
        raise NumericalError("overflow while shooting; increase the anchor distance or reduce the radius")
    return final, (sol.sol if dense else None)


def wronskian(spec: HamiltonianSpec, contour: ContourSpec, E, rtol=RTOL):
    """Raw Wronskian psi_L psi_R' - psi_L' psi_R at the anchor (analytic in E)."""
    st, _ = _shoot(spec, contour, E, rtol)
    (pl, dpl), (pr, dpr) = st
    return pl * dpr - dpl * pr, st


def _norms(st):
    (pl, dpl), (pr, dpr) = st
    return np.hypot(np.abs(pl), np.abs(dpl)) * np.hypot(np.abs(pr), np.abs(dpr))


def mismatch(spec: HamiltonianSpec, contour: ContourSpec, E, rtol=RTOL):
    """Scale-invariant Wronskian mismatch; vanishes exactly at eigenvalues."""
    W, st = wronskian(spec, contour, E, rtol)
    out = W / _norms(st)
    return out[0] if np.ndim(E) == 0 else out


def _real_phase(values: np.ndarray) -> float:
    """Common phase (mod pi) of a function that is real up to a constant factor."""
    ang = np.angle(values[np.abs(values) > 1e-8]) % np.pi
    if ang.size == 0:
        return 0.0
    # circular mean of 2*angle handles the wrap at pi
    z = np.mean(np.exp(2j * ang))
    return float(np.angle(z) / 2)


class _RealReduction:
    """Real-valued eigenvalue function g(E) for PT-symmetric contours and real E."""

    def __init__(self, spec, contour, rtol=RTOL):
        self.spec, self.contour, self.rtol = spec, contour, rtol
        self.phase = None

    def __call__(self, E):
        m = mismatch(self.spec, self.contour, np.atleast_1d(np.asarray(E, dtype=float)), self.rtol)
        if self.phase is None:
            self.phase = _real_phase(m)
        g = m * np.exp(-1j * self.phase)
        return g.real, np.abs(g.imag)


def eigenvalues_real_scan(spec: HamiltonianSpec, contour: ContourSpec | None = None,
                          e_max: float = 20.0, tol: float = 1e-12, e_min: float = 0.0,
                          n_grid: int | None = None, rtol: float = RTOL) -> Spectrum:
    """All real eigenvalues in (e_min, e_max) by a sign-change scan plus Brent refinement."""
    if contour is None:
        contour = model.default_contour(spec, max(abs(e_max), abs(e_min)))
    red = _RealReduction(spec, contour, rtol)
    n = n_grid or 800
    roots = np.array([])
    for attempt in range(2):
        grid = np.linspace(e_min, e_max, n)
        g, _ = red(grid)
        idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
        if idx.size:
            lo, hi = grid[idx], grid[idx + 1]
            roots = _safeguarded_secant(lambda e: red(e)[0], lo, hi, g[idx], g[idx + 1],
                                        0.5 * (lo + hi), red(0.5 * (lo + hi))[0], tol)
        step = grid[1] - grid[0]
        if len(roots) < 2 or np.min(np.diff(roots)) > 3 * step:
            break
        n *= 4
    else:
        warnings.warn("closely spaced eigenvalues: some roots may be missed", RuntimeWarning)
    res = np.abs(mismatch(spec, contour, roots, rtol)) if len(roots) else []
    recs = [EigenRecord(i, complex(r), float(e), "shooting") for i, (r, e) in enumerate(zip(roots, res))]
    return Spectrum(spec, contour, recs)


def eigenvalues_rotated_sign_flip(spec: HamiltonianSpec, e_max: float = 20.0, **kw) -> Spectrum:
    """Spectrum with sectors centered on the imaginary axis, scanned over (-e_max, 0)."""
    contour = model.default_contour(spec, e_max, kind="rotated")
    sp = eigenvalues_real_scan(spec, contour, e_max=-1e-9, e_min=-e_max, **kw)
    recs = sorted(sp.records, key=lambda r: -r.energy.real)
    for i, r in enumerate(recs):
        r.index = i
    sp.records = recs
    return sp


def refine_complex(spec: HamiltonianSpec, contour: ContourSpec, E0: complex, tol: float = 1e-11,
                   trust_radius: float | None = None) -> complex:
    """Polish a (possibly complex) eigenvalue by secant iteration on the raw Wronskian."""
    scale = [None]

    def f(E):
        W, st = wronskian(spec, contour, np.array([E]))
        if scale[0] is None:
            scale[0] = _norms(st)[0]
        return W[0] / scale[0]
    return find_root_complex(f, E0, tol=tol, trust_radius=trust_radius)


# ---------------------------------------------------------------- Hermitian reference

def _fd_levels(k, V, L, h, count):
    x = np.arange(-L, L + h / 2, h)[1:-1]
    diag = 2 * k / h ** 2 + V(x)
    off = np.full(x.size - 1, -k / h ** 2)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1), eigvals_only=True)


def hermitian_grid(spec: HamiltonianSpec, count: int, h: float = 0.004, L: float | None = None,
                   richardson: bool = True) -> Spectrum:
    """Lowest levels of a real-axis Hermitian problem by second differences.

    Richardson extrapolation over h and h/2 removes the O(h^2) error.
    """
    k = model.kinetic_coefficient(spec)
    probe = model.potential(spec, np.linspace(-3, 3, 7))
    if np.max(np.abs(probe.imag)) > 1e-12:
        raise NumericalError("hermitian_grid needs a real potential on the real axis")

    def V(x):
        return model.potential(spec, x).real
    if L is None:
        # WKB scale of the highest requested level sets the box
        guess = _fd_levels(k, V, 12.0, 0.02, count)[-1]
        L = model.default_contour(spec, max(abs(guess), 1.0)).radius
    a = _fd_levels(k, V, L, h, count)
    if richardson:
        b = _fd_levels(k, V, L, h / 2, count)
        vals, err = (4 * b - a) / 3, np.abs(b - a) / 3
    else:
        vals, err = a, np.full(count, np.nan)
    recs = [EigenRecord(i, complex(v), float(e), "hermitian-grid") for i, (v, e) in enumerate(zip(vals, err))]
    return Spectrum(spec, None, recs)


# ---------------------------------------------------------------- continuation in eps

@dataclass
class SweepResult:
    eps: np.ndarray
    values: np.ndarray           # (len(eps), level_count) complex; nan where lost
    events: list                 # (eps_lo, eps_hi, kind, levels)


def _safeguarded_secant(fun, lo, hi, flo, fhi, x0, f0, tol, maxiter=60):
    """Vectorized secant iteration kept inside sign-changing brackets.

    Each root starts from x0 (with value f0) inside [lo, hi]; iterates that leave the
    current bracket are replaced by its midpoint.
    """
    lo, hi, flo, fhi, xa, fa = (np.array(v, dtype=float) for v in (lo, hi, flo, fhi, x0, f0))

    def shrink(x, fx):
        nonlocal lo, hi, flo, fhi
        left = np.sign(fx) == np.sign(flo)
        lo, flo = np.where(left, x, lo), np.where(left, fx, flo)
        hi, fhi = np.where(~left, x, hi), np.where(~left, fx, fhi)
    shrink(xa, fa)
    # first step is regula falsi on the narrowed bracket
    xb, fb = lo.copy(), flo.copy()
    use_hi = np.abs(hi - xa) > np.abs(lo - xa)
    xb, fb = np.where(use_hi, hi, lo), np.where(use_hi, fhi, flo)
    for _ in range(maxiter):
        den = fa - fb
        with np.errstate(divide="ignore", invalid="ignore"):
            x = xa - fa * (xa - xb) / den
        bad = ~np.isfinite(x) | (x <= lo) | (x >= hi)
        x = np.where(bad, 0.5 * (lo + hi), x)
        fx = fun(x)
        shrink(x, fx)
        xb, fb, xa, fa = xa, fa, x, fx
        if np.all((np.abs(xa - xb) <= tol * np.maximum(1, np.abs(xa))) | (fx == 0) | (hi - lo <= tol)):
            return x
    raise ConvergenceError("bracketed secant did not converge")


def _vector_secant(fun, z0, tol, step=1e-6, maxiter=40):
    z0 = np.asarray(z0, dtype=complex)
    z1 = z0 + step * np.maximum(1, np.abs(z0))
    f0, f1 = fun(z0), fun(z1)
    for _ in range(maxiter):
        den = f1 - f0
        den = np.where(den == 0, 1e-300, den)
        z2 = z1 - f1 * (z1 - z0) / den
        z0, f0 = z1, f1
        z1, f1 = z2, fun(z2)
        if np.all(np.abs(z1 - z0) <= tol * np.maximum(1, np.abs(z1))):
            return z1
    raise ConvergenceError("complex corrector did not converge")


def _contour_for(template, eps, e_scale):
    spec = model.MonomialDeformed(template.m, template.n, float(eps))
    return spec, model.default_contour(spec, e_scale)


def _level_guess(n_levels, template, eps):
    """Upper energy estimate for the first n_levels at deformation eps."""
    N = 2 * template.n + eps
    return 1.5 * wkb.monomial_wkb(max(N, 1.2), n_levels) + 5


def _extrapolate(hist, eps, template=None):
    """Per-branch polynomial extrapolation through the last (up to three) nodes.

    Only nodes where a branch keeps its character (real or complex) are used.  A
    real branch with a single usable node is scaled by the ratio of WKB levels.
    """
    e_last, v_last = hist[-1]
    pred = v_last.copy()
    for i in range(v_last.size):
        if not np.isfinite(v_last[i]):
            continue
        is_real = abs(v_last[i].imag) < 1e-12
        pts = [(e, v[i]) for e, v in hist[-3:]
               if np.isfinite(v[i]) and (abs(v[i].imag) < 1e-12) == is_real]
        if len(pts) < 2:
            if is_real and template is not None:
                n_old, n_new = (max(2 * template.n + e, 1.2) for e in (e_last, eps))
                pred[i] = v_last[i] * wkb.monomial_wkb(n_new, i) / wkb.monomial_wkb(n_old, i)
            continue
        acc = 0j
        for a, (ea, va) in enumerate(pts):
            w = 1.0
            for b, (eb, _) in enumerate(pts):
                if a != b:
                    w *= (eps - eb) / (ea - eb)
            acc += w * va
        pred[i] = acc.real if is_real else acc
    return pred


def sweep_epsilon(template: model.MonomialDeformed, eps_grid, level_count: int = 5,
                  rtol: float = 1e-10) -> SweepResult:
    """Continue the lowest level_count eigenvalues of p^2 + x^(2n)(ix)^eps across eps_grid.

    Continuation starts at the grid node nearest eps = 0 and runs outward in both
    directions.  Real levels are corrected inside brackets between neighbours;
    when an adjacent pair loses its sign changes the pair is flagged as an
    exceptional point and followed as a complex-conjugate pair.  A failed
    corrector step is retried with the eps step bisected up to six times before
    the branch is marked lost (nan from then on).
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    d = np.diff(eps_grid)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("eps grid must be strictly monotone")
    if level_count < 2:
        raise ValueError("level_count must be at least 2")
    order = np.argsort(eps_grid)
    eps_sorted = eps_grid[order]
    start = int(np.argmin(np.abs(eps_sorted)))
    values = np.full((eps_sorted.size, level_count), np.nan + 0j)
    events = []

    e0 = eps_sorted[start]
    guess = _level_guess(level_count, template, e0)
    spec, contour = _contour_for(template, e0, guess)
    sp = eigenvalues_real_scan(spec, contour, e_max=guess, n_grid=max(1500, 60 * level_count), rtol=rtol)
    if len(sp.records) < level_count:
        raise NumericalError(f"only {len(sp.records)} real levels found at eps = {e0}")
    values[start] = sp.energies[:level_count].real

    for direction in (+1, -1):
        hist = [(e0, values[start].copy())]
        j = start + direction
        while 0 <= j < eps_sorted.size:
            if np.all(np.isnan(hist[-1][1])):
                break
            new, evs = _advance(template, hist, eps_sorted[j], rtol, 0)
            values[j] = new
            events.extend(evs)
            hist.append((eps_sorted[j], new.copy()))
            j += direction
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return SweepResult(eps_grid, values[inv], sorted(events, key=lambda e: -e[1]))


def _advance(template, hist, eps, rtol, depth):
    new, evs, failed = _sweep_step(template, hist, eps, rtol)
    if failed and depth < 6:
        mid = 0.5 * (hist[-1][0] + eps)
        m, ev1 = _advance(template, hist, mid, rtol, depth + 1)
        new, ev2 = _advance(template, hist + [(mid, m)], eps, rtol, depth + 1)
        return new, ev1 + ev2
    lo, hi = sorted((float(hist[-1][0]), float(eps)))
    for i in failed:
        evs.append((lo, hi, "lost", (int(i),)))
        new[i] = np.nan
    return new, evs


def _sweep_step(template, hist, eps, rtol):
    """Advance all branches from the last history node to eps.

    Returns the new values, events and the indices whose corrector failed.
    """
    eps_prev, prev = hist[-1]
    pred = _extrapolate(hist, eps, template)
    lo_e, hi_e = sorted((float(eps_prev), float(eps)))
    emax = np.nanmax(np.abs(pred)) * 1.2 + 5
    spec, contour = _contour_for(template, eps, emax)
    red = _RealReduction(spec, contour, rtol)
    events, failed = [], []
    new = np.full(prev.shape, np.nan + 0j)
    real_idx = [i for i in range(prev.size) if np.isfinite(prev[i]) and abs(prev[i].imag) < 1e-12]
    upper = [i for i in range(prev.size) if np.isfinite(prev[i]) and prev[i].imag > 1e-12]
    born = []

    if real_idx:
        p = np.maximum.accumulate(pred[real_idx].real)
        gaps = np.diff(p)
        mids = p[:-1] + gaps / 2
        below = gaps[0] / 2 if gaps.size else 1.0
        above = gaps[-1] / 2 if gaps.size else 1.0
        edges = np.concatenate([[max(p[0] - 1.5 * below, 1e-9 if p[0] > 0 else p[0] - 3 * below)],
                                mids, [p[-1] + 1.5 * above]])
        vals, _ = red(np.concatenate([edges, p]))
        g, gp = vals[:edges.size], vals[edges.size:]
        if np.all(np.sign(g[:-1]) != np.sign(g[1:])):
            lo_b, hi_b, glo, ghi = edges[:-1], edges[1:], g[:-1], g[1:]
            x0, f0 = p, gp
        else:
            # the window reaches past the top prediction in case the step was poorly predicted
            drift = abs(p[-1] - prev[real_idx[-1]].real)
            fine = np.linspace(edges[0], edges[-1] + 2 * drift + 2 * above, 60 * edges.size)
            gf, _ = red(fine)
            cross = np.nonzero(np.sign(gf[:-1]) != np.sign(gf[1:]))[0]
            alive = list(real_idx)
            prev_re = {i: prev[i].real for i in real_idx}
            while len(alive) > len(cross):
                if len(alive) - len(cross) == 1:
                    events.append((lo_e, hi_e, "lost", (int(alive[-1]),)))
                    alive.pop()
                    continue
                # the closest adjacent pair has merged
                k = int(np.argmin([prev_re[alive[a + 1]] - prev_re[alive[a]] for a in range(len(alive) - 1)]))
                pair = (int(alive[k]), int(alive[k + 1]))
                events.append((lo_e, hi_e, "exceptional-point", pair))
                born.append(pair)
                del alive[k:k + 2]
            cross = cross[:len(alive)]
            real_idx = alive
            lo_b, hi_b, glo, ghi = fine[cross], fine[cross + 1], gf[cross], gf[cross + 1]
            x0, f0 = 0.5 * (lo_b + hi_b), None
        if real_idx:
            if f0 is None:
                f0, _ = red(x0)
            roots = _safeguarded_secant(lambda x: red(x)[0], lo_b, hi_b, glo, ghi, x0, f0, 1e-13)
            new[real_idx] = roots

    def wfun(z, scale=[None]):
        W, st = wronskian(spec, contour, z, rtol)
        return W / _norms(st)

    seeds, owners = [], []
    for a, b in born:
        mid = 0.5 * (prev[a].real + prev[b].real)
        half = max(0.5 * abs(prev[b].real - prev[a].real), 0.05)
        re = np.linspace(mid - 2 * half, mid + 2 * half, 21)
        im = np.linspace(0.05 * half, 4 * half, 20)
        box = (re[None, :] + 1j * im[:, None]).ravel()
        seeds.append(box[np.argmin(np.abs(wfun(box)))])
        owners.append((a, b))
    for i in upper:
        partner = [j for j in range(prev.size) if j != i and np.isfinite(prev[j])
                   and abs(prev[j] - np.conj(prev[i])) < 1e-9 * max(1, abs(prev[i]))]
        seeds.append(pred[i])
        owners.append((i, partner[0] if partner else None))
    if seeds:
        seeds = np.array(seeds)
        try:
            z = _vector_secant(wfun, seeds, 1e-11)
        except ConvergenceError:
            z = np.array([_polish_one(wfun, s) for s in seeds])
        for (i, j), zi, s in zip(owners, z, seeds):
            if not np.isfinite(zi) or abs(zi - s) > max(1.0, 0.25 * abs(s)) or abs(zi.imag) < 1e-9:
                failed.extend([i] + ([j] if j is not None else []))
                continue
            zi = complex(zi.real, abs(zi.imag))
            new[i] = zi
            if j is not None:
                new[j] = zi.conjugate()
    return new, events, failed


def _polish_one(wfun, seed):
    try:
        return find_root_complex(lambda z: wfun(np.array([z]))[0], seed, tol=1e-11,
                                 trust_radius=max(1.0, 0.25 * abs(seed)))
    except ConvergenceError:
        return complex(np.nan, np.nan)


# ---------------------------------------------------------------- modes and PT machinery

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


@dataclass
class Mode:
    """Eigenfunction sampled along the contour.

    ``x``, ``psi`` and ``dpsi`` run from the left end through the anchor to the
    right end on Gauss-Legendre nodes; ``weights`` are the matching dx weights.
    """
    record: EigenRecord
    x: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    weights: np.ndarray
    _evaluators: tuple = field(default=(), repr=False)
    scale: complex = 1.0

    def __call__(self, z) -> np.ndarray:
        """psi at points on the contour legs."""
        return self.scale * _eval_on_contour(self._evaluators, z)


def _gauss_on_legs(contour: ContourSpec, panels: int):
    """Gauss nodes in path parameter s for each leg, ordered left end -> anchor -> right end."""
    edges = np.linspace(0, 1, panels + 1)
    s = np.concatenate([lo + (hi - lo) * (_GL_X + 1) / 2 for lo, hi in zip(edges[:-1], edges[1:])])
    w = np.concatenate([(hi - lo) / 2 * _GL_W for lo, hi in zip(edges[:-1], edges[1:])])
    return s, w


def _eval_on_contour(evaluators, z):
    ends, d, c, sol = evaluators
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.full(z.shape, np.nan + 0j)
    for side, scale in ((0, c), (1, 1.0)):
        s = (z - ends[side]) / d[side]
        on = (np.abs(s.imag) < 1e-9) & (s.real >= -1e-12) & (s.real <= 1 + 1e-12)
        if np.any(on):
            # state layout is (side, component) for a single energy
            out[on] = scale * sol(np.clip(s[on].real, 0, 1))[2 * side]
    if np.any(np.isnan(out)):
        raise ValueError("point not on the contour")
    return out


def compute_mode(spec: HamiltonianSpec, contour: ContourSpec, E: complex, index: int = 0,
                 panels: int = 16, rtol: float = RTOL) -> Mode:
    """Eigenfunction for eigenvalue E on Gauss nodes along the contour."""
    contour = contour.at(E) if contour.anchor_power is not None else contour
    st, sol = _shoot(spec, contour, np.array([E]), rtol, dense=True)
    (pl, dpl), (pr, dpr) = st[:, :, 0]
    # scale the left solution onto the right one at the anchor (least squares on psi, psi')
    c = (pr * np.conj(pl) + dpr * np.conj(dpl)) / (abs(pl) ** 2 + abs(dpl) ** 2)
    ends, d = _legs(contour)
    s, w = _gauss_on_legs(contour, panels)
    y = sol(s)
    left_x = ends[0] + s * d[0]
    right_x = ends[1] + s * d[1]
    # right leg runs from the anchor outward, so reverse it
    x = np.concatenate([left_x, right_x[::-1]])
    psi = np.concatenate([c * y[0], y[2][::-1]])
    dpsi = np.concatenate([c * y[1], y[3][::-1]])
    weights = np.concatenate([w * d[0], (w * -d[1])[::-1]])
    res = float(abs(pl * dpr - dpl * pr) / (np.hypot(abs(pl), abs(dpl)) * np.hypot(abs(pr), abs(dpr))))
    rec = EigenRecord(index, complex(E), res, "shooting")
    # the legs grow enormously from their decaying ends; rescale to unit peak
    peak = float(np.max(np.abs(psi)))
    return Mode(rec, x, psi / peak, dpsi / peak, weights, (ends, d, c, sol), 1.0 / peak)


def _mirror_values(mode: Mode) -> np.ndarray:
    """[psi(-conj x)]^* on the same nodes, using the mirror symmetry of the node set."""
    return np.conj(mode.psi[::-1])


def _check_symmetric(contour: ContourSpec):
    if abs(contour.anchor.real) > 1e-12 or abs(contour.left_angle + math.pi + contour.right_angle) > 1e-12:
        raise PhaseError("PT inner products need a left-right symmetric contour")


def pt_inner(a: Mode, b: Mode) -> complex:
    """PT inner product  int_C [a(-x)]^* b(x) dx."""
    return complex(np.sum(_mirror_values(a) * b.psi * a.weights))


def pt_normalize(modes: list, contour: ContourSpec, strict: bool = False) -> list:
    """Rescale modes so that PT phi = phi and the PT norm is +-1.

    The PT eigenvalue lambda = e^{i alpha} is extracted with magnitude weighting;
    the mode is multiplied by e^{i alpha/2} and a positive real factor.  The sign of
    the resulting norm is stored on the mode as ``norm_sign``; with strict=True a
    sign different from (-1)^n raises PhaseError.
    """
    _check_symmetric(contour)
    out = []
    for m in modes:
        mir = _mirror_values(m)
        lam = np.sum(mir * np.conj(m.psi) * np.abs(m.psi) ** 2) / np.sum(np.abs(m.psi) ** 4)
        alpha = np.angle(lam)
        factor = np.exp(0.5j * alpha)
        psi = factor * m.psi
        norm = np.sum(psi * psi * m.weights)          # PT phi = phi makes the norm int phi^2
        sign = 1 if norm.real > 0 else -1
        r = 1 / math.sqrt(abs(norm.real))
        nm = Mode(m.record, m.x, psi * r, factor * m.dpsi * r, m.weights, m._evaluators, m.scale * factor * r)
        nm.norm_sign = sign
        nm.pt_phase = float(alpha)
        if strict and sign != (-1) ** m.record.index:
            raise PhaseError(f"PT norm sign {sign} for n = {m.record.index}")
        out.append(nm)
    return out


def modes_for(spec: HamiltonianSpec, count: int, e_max: float | None = None,
              contour: ContourSpec | None = None, panels: int = 16) -> list:
    """First ``count`` PT-normalized modes of a family with a real spectrum."""
    if e_max is None:
        e_max = 10.0
        while True:
            cont = contour or model.default_contour(spec, e_max)
            sp = eigenvalues_real_scan(spec, cont, e_max=e_max)
            if len(sp.records) >= count:
                break
            e_max *= 1.6
    else:
        cont = contour or model.default_contour(spec, e_max)
        sp = eigenvalues_real_scan(spec, cont, e_max=e_max)
    if cont.anchor_power is not None:
        # every mode must live on the same path for kernels and inner products
        cont = cont.at(math.sqrt(max(sp.records[min(count, len(sp.records)) - 1].energy.real, 1.0)))
    raw = [compute_mode(spec, cont, r.energy.real, r.index, panels) for r in sp.records[:count]]
    return pt_normalize(raw, cont)


def c_kernel(modes: list, x, y, N: int | None = None):
    """C(x, y) = sum_{n<N} phi_n(x) phi_n(y) for points on the contour."""
    N = len(modes) if N is None else N
    return sum(m(x) * m(y) for m in modes[:N])


def _projections(modes, f):
    m0 = modes[0]
    fx = f(m0.x)
    return np.array([np.sum(fx * m.psi * m.weights) for m in modes])


def completeness_residual(modes: list, f, g, N: int | None = None) -> float:
    """Relative defect of  sum_n (-1)^n phi_n(x) phi_n(y) = delta(x - y)  against f, g."""
    N = len(modes) if N is None else N
    ms = modes[:N]
    fp, gp = _projections(ms, f), _projections(ms, g)
    signs = np.array([(-1) ** m.record.index for m in ms])
    lhs = np.sum(signs * fp * gp)
    m0 = modes[0]
    rhs = np.sum(f(m0.x) * g(m0.x) * m0.weights)
    return float(abs(lhs - rhs) / abs(rhs))


def c_squared_residual(modes: list, f, g, N: int | None = None) -> float:
    """Relative defect of  int C(x,y) C(y,z) dy = delta(x - z)  against f, g."""
    N = len(modes) if N is None else N
    ms = modes[:N]
    fp, gp = _projections(ms, f), _projections(ms, g)
    gram = np.array([[np.sum(a.psi * b.psi * a.weights) for b in ms] for a in ms])
    lhs = fp @ gram @ gp
    m0 = modes[0]
    rhs = np.sum(f(m0.x) * g(m0.x) * m0.weights)
    return float(abs(lhs - rhs) / abs(rhs))


# ---------------------------------------------------------------- spectral zeta

def spectral_zeta_closed(eps: float) -> float:
    """Closed form of sum_n 1/E_n for H = p^2 + x^2 (ix)^eps, eps > 0."""
    if eps <= 0:
        return math.inf
    e = float(eps)
    pref = 1 + (math.cos(3 * e * math.pi / (2 * e + 8)) * math.sin(math.pi / (4 + e))
                / (math.cos(e * math.pi / (2 * e + 8)) * math.sin(3 * math.pi / (4 + e))))
    lg = special.gammaln
    num = lg(1 / (4 + e)) + lg(2 / (4 + e)) + lg(e / (4 + e))
    den = (4 + 2 * e) / (4 + e) * math.log(4 + e) + lg((1 + e) / (4 + e)) + lg((2 + e) / (4 + e))
    return pref * math.exp(num - den)


def spectral_zeta_sum(eps: float, modes: int = 40, rtol: float = 1e-12):
    """Sum of 1/E_n: shooting levels below ``modes`` plus a WKB tail.

    The tail uses the WKB levels with their leading 1/(n+1/2)^2 correction fitted
    on the highest computed levels; both pieces are Hurwitz zeta values.
    """
    spec = model.MonomialDeformed(1, 1, float(eps))
    e_max = wkb.monomial_wkb(2 + eps, modes) * 1.05 + 2
    contour = model.default_contour(spec, e_max)
    sp = eigenvalues_real_scan(spec, contour, e_max=e_max, n_grid=max(800, 40 * modes), rtol=rtol)
    E = sp.real()[:modes]
    if E.size < modes:
        raise NumericalError(f"found only {E.size} levels below {e_max}")
    N = 2 + eps
    p = 2 * N / (N + 2)
    C = wkb.monomial_wkb(N, 0) / 0.5 ** p               # E_n^WKB = C (n + 1/2)^p
    n = np.arange(modes)
    ratio = E / (C * (n + 0.5) ** p) - 1
    top = slice(modes - 8, modes)
    c2 = float(np.mean(ratio[top] * (n[top] + 0.5) ** 2))
    tail = (special.zeta(p, modes + 0.5) - c2 * special.zeta(p + 2, modes + 0.5)) / C
    return float(np.sum(1 / E) + tail), E
