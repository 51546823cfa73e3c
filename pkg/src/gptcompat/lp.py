"""Dense two-phase primal simplex with Bland's rule.

Works on float64 arrays or on object arrays of ``fractions.Fraction`` (exact
mode).  Infeasible problems come back with a Farkas covector read off the
phase-1 duals; every certificate is re-checked by substitution before it is
returned.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


class LpNumericalError(RuntimeError):
    """Iteration cap hit or a certificate failed its re-verification."""


def to_fraction_array(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, Fraction):
            out[idx] = Fraction(int(v.numerator), int(v.denominator))
        elif isinstance(v, (np.integer, int)):
            out[idx] = Fraction(int(v))
        else:
            out[idx] = Fraction(float(v) if isinstance(v, np.floating) else v)
    return out


def _as(a, exact, shape=None):
    if a is None:
        return np.zeros(shape, dtype=object if exact else float) if shape is not None else None
    if exact:
        return to_fraction_array(a)
    return np.asarray(a, dtype=float)


@dataclass(frozen=True)
class LpProblem:
    """minimize c.x  s.t.  A_eq x = b_eq, A_ub x <= b_ub, x >= 0 except where ``free``."""

    n: int
    c: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    free: np.ndarray | None = None
    exact: bool = False
    tol: float = 1e-9

    def arrays(self):
        ex, n = self.exact, self.n
        c = _as(self.c, ex, (n,))
        Ae = _as(self.A_eq, ex, (0, n)).reshape(-1, n)
        be = _as(self.b_eq, ex, (0,)).reshape(-1)
        Au = _as(self.A_ub, ex, (0, n)).reshape(-1, n)
        bu = _as(self.b_ub, ex, (0,)).reshape(-1)
        free = np.zeros(n, bool) if self.free is None else np.asarray(self.free, bool)
        if Ae.shape[0] != be.shape[0] or Au.shape[0] != bu.shape[0] or c.shape != (n,):
            raise ValueError("inconsistent LP dimensions")
        return c, Ae, be, Au, bu, free


@dataclass(frozen=True)
class LpCertificate:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    value: object = None
    y_eq: np.ndarray | None = None  # duals, or the Farkas covector when infeasible
    y_ub: np.ndarray | None = None
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


class _Tableau:
    def __init__(self, A, b, exact, tol):
        m, n = A.shape
        self.m, self.n, self.exact = m, n, exact
        dt = object if exact else float
        T = np.zeros((m + 1, n + m + 1), dtype=dt)
        if exact:
            T[:] = Fraction(0)
        T[:m, :n] = A
        for i in range(m):
            T[i, n + i] = Fraction(1) if exact else 1.0
        T[:m, -1] = b
        self.T = T
        self.basis = list(range(n, n + m))
        self.rows = list(range(m))  # original row index of each tableau row
        self.piv_tol = 0 if exact else 1e-11
        self.opt_tol = 0 if exact else 1e-11
        self.iters = 0

    def pivot(self, r, j):
        T = self.T
        T[r] = T[r] / T[r, j]
        colj = T[:, j].copy()
        colj[r] = 0
        if self.exact:
            T -= np.outer(colj, T[r])
        else:
            T -= np.outer(colj, T[r])
            T[:, j] = 0.0
            T[r, j] = 1.0
        self.basis[r] = j
        self.iters += 1

    def set_objective(self, cost):
        """cost over all n+m columns; builds reduced-cost row for current basis."""
        T = self.T
        cb = np.array([cost[k] for k in self.basis], dtype=T.dtype)
        row = np.empty(T.shape[1], dtype=T.dtype)
        row[:-1] = cost - cb @ T[:-1, :-1]
        row[-1] = -(cb @ T[:-1, -1])
        T[-1] = row
        self.cost = cost

    def run(self, allowed, max_iter):
        """Bland's rule on columns where ``allowed`` is true; returns status."""
        T = self.T
        while True:
            if self.iters > max_iter:
                raise LpNumericalError("simplex iteration cap exceeded")
            rc = T[-1, :-1]
            cand = np.nonzero(allowed & (rc < -self.opt_tol))[0]
            if cand.size == 0:
                return "optimal"
            j = int(cand[0])
            col = T[:-1, j]
            pos = np.nonzero(col > self.piv_tol)[0]
            if pos.size == 0:
                self.unbounded_col = j
                return "unbounded"
            ratios = T[pos, -1] / col[pos]
            rmin = ratios.min()
            if self.exact:
                ties = pos[ratios == rmin]
            else:
                ties = pos[ratios <= rmin + 1e-12 * (1 + abs(rmin))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)

    def drop_row(self, r):
        self.T = np.delete(self.T, r, axis=0)
        del self.basis[r]
        del self.rows[r]

    def binv(self):
        """Rows of B^{-1}: tableau block under the artificial columns."""
        return self.T[:-1, self.n:self.n + self.m]


def _solve_standard(A, b, c, exact, tol, max_iter):
    """min c x, Ax=b, x>=0 with b>=0. Returns (status, x, duals u, farkas y, iters)."""
    m, n = A.shape
    tb = _Tableau(A, b, exact, tol)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    cost1 = np.array([zero] * n + [one] * m, dtype=tb.T.dtype)
    tb.set_objective(cost1)
    allowed = np.zeros(n + m, bool)
    allowed[:n] = True
    tb.run(allowed, max_iter)
    w = -tb.T[-1, -1]
    bscale = 1 + (max(abs(v) for v in b) if m else 0)
    if (w > 0) if exact else (w > tol * bscale):
        cb = np.array([cost1[k] for k in tb.basis], dtype=tb.T.dtype)
        u = np.array([zero] * m, dtype=tb.T.dtype)
        u[:] = cb @ tb.binv()
        return "infeasible", None, None, -u, tb.iters
    # drive remaining artificials out of the basis
    r = 0
    while r < len(tb.basis):
        if tb.basis[r] >= n:
            row = tb.T[r, :n]
            nz = np.nonzero(np.abs(row) > (0 if exact else 1e-9))[0]
            if nz.size:
                j = int(nz[np.argmax(np.abs(row[nz]).astype(float))])
                tb.pivot(r, j)
            else:
                tb.drop_row(r)
                continue
        r += 1
    cost2 = np.concatenate([np.asarray(c, dtype=tb.T.dtype), np.array([zero] * m, dtype=tb.T.dtype)])
    tb.set_objective(cost2)
    status = tb.run(allowed, max_iter)
    x = np.array([zero] * n, dtype=tb.T.dtype)
    for r, k in enumerate(tb.basis):
        if k < n:
            x[k] = tb.T[r, -1]
    if not exact:
        x = np.maximum(x, 0.0)
    cb = np.array([cost2[k] for k in tb.basis], dtype=tb.T.dtype)
    u = np.array([zero] * m, dtype=tb.T.dtype)
    if len(tb.basis):
        u[:] = cb @ tb.binv()
    if status == "unbounded":
        return "unbounded", x, None, None, tb.iters
    return "optimal", x, u, None, tb.iters


def solve(problem: LpProblem, max_iter: int | None = None) -> LpCertificate:
    """Solve ``problem``; the Farkas branch is returned as status 'infeasible'."""
    exact, tol = problem.exact, problem.tol
    c, Ae, be, Au, bu, free = problem.arrays()
    n = problem.n
    me, mu = Ae.shape[0], Au.shape[0]
    nf = int(free.sum())
    fidx = np.nonzero(free)[0]
    dt = object if exact else float
    N = n + nf + mu
    A = np.zeros((me + mu, N), dtype=dt)
    if exact:
        A[:] = Fraction(0)
    A[:me, :n] = Ae
    A[me:, :n] = Au
    A[:me, n:n + nf] = -Ae[:, fidx]
    A[me:, n:n + nf] = -Au[:, fidx]
    for i in range(mu):
        A[me + i, n + nf + i] = Fraction(1) if exact else 1.0
    b = np.concatenate([be, bu]).astype(dt)
    cc = np.zeros(N, dtype=dt)
    if exact:
        cc[:] = Fraction(0)
    cc[:n] = c
    cc[n:n + nf] = -c[fidx]
    sign = np.array([-1 if v < 0 else 1 for v in b], dtype=int)
    A = A * sign[:, None].astype(dt) if not exact else A * np.array([Fraction(int(s)) for s in sign], dtype=object)[:, None]
    b = b * (sign if not exact else np.array([Fraction(int(s)) for s in sign], dtype=object))
    if max_iter is None:
        max_iter = 50 * (A.shape[0] + N) + 1000
    status, xs, u, y, iters = _solve_standard(A, b, cc, exact, tol, max_iter)
    sgn = sign if not exact else np.array([Fraction(int(s)) for s in sign], dtype=object)
    if status == "infeasible":
        y = y * sgn
        cert = LpCertificate("infeasible", y_eq=y[:me], y_ub=y[me:], iterations=iters)
        _verify_farkas(problem, cert)
        return cert
    x = xs[:n].copy()
    x[fidx] = x[fidx] - xs[n:n + nf]
    if status == "unbounded":
        return LpCertificate("unbounded", x=x, iterations=iters)
    u = u * sgn
    value = c @ x
    cert = LpCertificate("optimal", x=x, value=value, y_eq=u[:me], y_ub=u[me:], iterations=iters)
    _verify_primal(problem, cert)
    return cert


def _verify_primal(problem, cert):
    c, Ae, be, Au, bu, free = problem.arrays()
    x = cert.x
    if problem.exact:
        ok = all(Ae @ x == be) and all(Au @ x <= bu) and all(x[~free] >= 0)
    else:
        t = 10 * problem.tol
        scale = 1 + np.abs(x).max(initial=0)
        ok = (np.all(np.abs(Ae @ x - be) <= t * scale) and np.all(Au @ x - bu <= t * scale)
              and np.all(x[~free] >= -t))
    if not ok:
        raise LpNumericalError("primal point failed re-verification")


def _verify_farkas(problem, cert):
    c, Ae, be, Au, bu, free = problem.arrays()
    ye, yu = cert.y_eq, cert.y_ub
    g = Ae.T @ ye + Au.T @ yu if (Ae.size or Au.size) else np.zeros(problem.n)
    gap = be @ ye + bu @ yu
    if problem.exact:
        ok = all(g[~free] >= 0) and all(g[free] == 0) and all(yu >= 0) and gap < 0
    else:
        s = max(np.abs(ye).max(initial=0), np.abs(yu).max(initial=0), 1e-300)
        g, gap, yu_n = g / s, gap / s, yu / s
        t = 10 * problem.tol
        ok = (np.all(g[~free] >= -t) and np.all(np.abs(g[free]) <= t) and np.all(yu_n >= -t)
              and gap < -problem.tol)
    if not ok:
        raise LpNumericalError("Farkas certificate failed re-verification")


def lp_feasible(problem: LpProblem) -> LpCertificate:
    """Feasibility only: the objective of ``problem`` is ignored."""
    p = LpProblem(problem.n, None, problem.A_eq, problem.b_eq, problem.A_ub, problem.b_ub,
                  problem.free, problem.exact, problem.tol)
    return solve(p)
