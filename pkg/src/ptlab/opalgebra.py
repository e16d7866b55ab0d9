"""Exact polynomial algebra in x and p with [x, p] = i, plus oscillator-basis matrices.

Polynomials are kept in normal order (every x to the left of every p) with
Gaussian-rational coefficients from sympy's QQ_I domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy
from scipy.linalg import expm
from sympy.polys.domains import QQ_I

from .errors import NumericalError

_I = QQ_I(0, 1)


def _coef(c):
    if isinstance(c, type(QQ_I.zero)):
        return c
    return QQ_I.from_sympy(sympy.nsimplify(c))


class NCPoly:
    """Sum of c * x^j p^k; the terms dict maps (j, k) to a QQ_I coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for key, c in (terms or {}).items():
            c = _coef(c)
            if c != QQ_I.zero:
                self.terms[(int(key[0]), int(key[1]))] = c

    @classmethod
    def x(cls, j: int = 1):
        return cls({(j, 0): 1})

    @classmethod
    def p(cls, k: int = 1):
        return cls({(0, k): 1})

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, QQ_I.zero) + c
        return NCPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            return nc_mul(self, other)
        c = _coef(other)
        return NCPoly({k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other):
        return _lift(other) * self

    def __pow__(self, n: int):
        out = NCPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, NCPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((j + k for j, k in self.terms), default=-1)

    def conj_map(self, sx: int, sp: int) -> "NCPoly":
        """Antilinear substitution x -> sx x, p -> sp p, i -> -i.

        It preserves [x, p] = i when sx * sp = -1, and keeps normal order.
        """
        return NCPoly({(j, k): QQ_I(c.x, -c.y) * (sx ** j) * (sp ** k)
                       for (j, k), c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (j, k) in sorted(self.terms, key=lambda t: (-(t[0] + t[1]), -t[0])):
            c = QQ_I.to_sympy(self.terms[(j, k)])
            mono = "*".join(f for f in (_pw("x", j), _pw("p", k)) if f)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def _pw(s, n):
    if n == 0:
        return ""
    return s if n == 1 else f"{s}^{n}"


def _lift(v) -> NCPoly:
    return v if isinstance(v, NCPoly) else NCPoly.const(v)


@lru_cache(maxsize=None)
def _p_past_x(b: int, c: int):
    """p^b x^c = sum_m C(b,m) C(c,m) m! (-i)^m x^(c-m) p^(b-m)."""
    out = []
    for m in range(min(b, c) + 1):
        w = math.comb(b, m) * math.comb(c, m) * math.factorial(m)
        out.append((c - m, b - m, QQ_I.from_sympy(sympy.Integer(w) * (-sympy.I) ** m)))
    return tuple(out)


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    out = {}
    for (ja, ka), ca in a.terms.items():
        for (jb, kb), cb in b.terms.items():
            for dx, dp, w in _p_past_x(ka, jb):
                key = (ja + dx, dp + kb)
                out[key] = out.get(key, QQ_I.zero) + ca * cb * w
    return NCPoly(out)


def commutator(a: NCPoly, b: NCPoly) -> NCPoly:
    return nc_mul(a, b) - nc_mul(b, a)


X, Pop = NCPoly.x(), NCPoly.p()
HALF = sympy.Rational(1, 2)
H0 = HALF * Pop ** 2 + HALF * X ** 2
H1 = sympy.I * X ** 3          # H = H0 + eps H1 for the cubic oscillator


def is_q_parity(q: NCPoly) -> bool:
    """Even in x and odd in p, read through the antilinear maps that preserve [x, p]."""
    return q.conj_map(-1, 1) == q and q.conj_map(1, -1) == -q


@dataclass
class LinearSolve:
    basis: list
    coefficients: list
    rank: int
    equations: int


def _solve_ansatz(basis: list[NCPoly], rhs: NCPoly) -> LinearSolve:
    """Coefficients c with [H0, sum c_m basis_m] = rhs, exactly."""
    images = [commutator(H0, b) for b in basis]
    keys = sorted(set(rhs.terms).union(*[im.terms for im in images]))
    A = sympy.Matrix([[QQ_I.to_sympy(im.terms.get(k, QQ_I.zero)) for im in images] for k in keys])
    bvec = sympy.Matrix([QQ_I.to_sympy(rhs.terms.get(k, QQ_I.zero)) for k in keys])
    rank = A.rank()
    aug = A.row_join(bvec).rank()
    if aug != rank:
        raise NumericalError(f"inconsistent system: rank {rank}, augmented rank {aug}, "
                             f"{len(keys)} equations, {len(basis)} unknowns")
    if rank < len(basis):
        raise NumericalError(f"underdetermined system: rank {rank} < {len(basis)} unknowns")
    sol, _ = A.gauss_jordan_solve(bvec)
    return LinearSolve(basis, [sympy.nsimplify(sympy.expand(v)) for v in sol], rank, len(keys))


def solve_q1() -> tuple[sympy.Rational, sympy.Rational]:
    """A, B in Q1 = A p^3 + B x p x solving [H0, Q1] = -2 H1."""
    res = _solve_ansatz([Pop ** 3, X * Pop * X], -2 * H1)
    A, B = res.coefficients
    return A, B


def q1_poly() -> NCPoly:
    A, B = solve_q1()
    return A * Pop ** 3 + B * X * Pop * X


def q3_rhs(q1: NCPoly | None = None) -> NCPoly:
    q1 = q1_poly() if q1 is None else q1
    return sympy.Rational(-1, 6) * commutator(q1, commutator(q1, H1))


def solve_q3(max_degree: int = 5) -> tuple[NCPoly, LinearSolve]:
    """Q3 from [H0, Q3] = -1/6 [Q1, [Q1, H1]] over odd-degree normal-ordered monomials.

    The degree cap is raised by two when the system is inconsistent.
    """
    rhs = q3_rhs()
    for deg in (max_degree, max_degree + 2):
        basis = [NCPoly({(j, k): 1}) for d in range(1, deg + 1, 2) for j in range(d + 1)
                 for k in [d - j]]
        try:
            res = _solve_ansatz(basis, rhs)
        except NumericalError as exc:
            if "inconsistent" in str(exc) and deg == max_degree:
                continue
            raise
        q3 = NCPoly()
        for b, c in zip(basis, res.coefficients):
            q3 = q3 + c * b
        return q3, res
    raise AssertionError("unreachable")


# --- oscillator-basis images ------------------------------------------------

@dataclass
class HoMatrix:
    N: int
    data: np.ndarray

    def block(self, n: int | None = None) -> np.ndarray:
        n = self.N // 2 if n is None else n
        return self.data[:n, :n]


def ladder(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated x and p in the number basis."""
    if N < 2:
        raise ValueError("N must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, N)), 1).astype(complex)
    ad = a.conj().T
    return (a + ad) / math.sqrt(2), 1j * (ad - a) / math.sqrt(2)


def ho_matrix(op: NCPoly, N: int) -> HoMatrix:
    x, p = ladder(N)
    out = np.zeros((N, N), dtype=complex)
    for (j, k), c in op.terms.items():
        cval = complex(float(c.x), float(c.y))
        out += cval * np.linalg.matrix_power(x, j) @ np.linalg.matrix_power(p, k)
    return HoMatrix(N, out)


def q3_matrix_residual(N: int = 60) -> float:
    """Max deviation of the two sides of the Q3 equation on the top-left N/2 block."""
    q3, _ = solve_q3()
    lhs = ho_matrix(commutator(H0, q3), N).block()
    rhs = ho_matrix(q3_rhs(), N).block()
    # independent matrix-side evaluation of the right-hand side
    x, p = ladder(N)
    Q1 = ho_matrix(q1_poly(), N).data
    h1 = 1j * x @ x @ x
    h0 = 0.5 * (p @ p + x @ x)
    inner = Q1 @ h1 - h1 @ Q1
    rhs_m = -(Q1 @ inner - inner @ Q1) / 6
    Q3 = ho_matrix(q3, N).data
    lhs_m = h0 @ Q3 - Q3 @ h0
    n = N // 2
    return float(max(np.abs(lhs - rhs).max(), np.abs(lhs_m[:n, :n] - rhs_m[:n, :n]).max()))


def shifted_hamiltonian(eps: float, N: int) -> np.ndarray:
    """H = p^2/2 + x^2/2 + i eps x in the number basis (exact diagonal part)."""
    x, _ = ladder(N)
    return np.diag(np.arange(N) + 0.5).astype(complex) + 1j * eps * x


def exact_c_shifted(eps: float, N: int) -> np.ndarray:
    """C = exp(Q) P with Q = -2 eps p, P = diag((-1)^n)."""
    _, p = ladder(N)
    return expm(-2 * eps * p) @ np.diag((-1.0) ** np.arange(N))


def verify_exact_q_shifted(eps: float, N: int) -> float:
    """||[C, H]|| + ||C^2 - I|| (max-abs) on the top-left N/2 block."""
    if N < 20:
        raise ValueError("N must be at least 20")
    H = shifted_hamiltonian(eps, N)
    C = exact_c_shifted(eps, N)
    n = N // 2
    comm = (C @ H - H @ C)[:n, :n]
    sq = (C @ C)[:n, :n] - np.eye(n)
    return float(np.abs(comm).max() + np.abs(sq).max())


def shifted_levels(eps: float, N: int, count: int = 10) -> np.ndarray:
    w = np.linalg.eigvals(shifted_hamiltonian(eps, N))
    return np.sort_complex(w)[:count]
