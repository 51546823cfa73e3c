"""Crossnorms on l1^g (x) X and l_inf^g (x) X, the rho-norm LPs, and closed forms."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gpt import Gpt, NonPolyhedralError, base_norm, order_unit_norm, vector_norm
from .lp import LpNumericalError, LpProblem, solve

SIGN_CAP = 24
RHO_DUALITY_TOL = 1e-7


@lru_cache(maxsize=32)
def sign_vectors(g: int) -> np.ndarray:
    if g > SIGN_CAP:
        raise ValueError(f"g = {g} too large for sign enumeration")
    return np.array(list(itertools.product([1, -1], repeat=g)), dtype=float).reshape(-1, g)


@dataclass(frozen=True, eq=False)
class TensorElement:
    blocks: np.ndarray  # g x dim

    def __post_init__(self):
        b = np.asarray(self.blocks, float)
        if b.ndim != 2:
            raise ValueError("blocks must be a g x dim array")
        object.__setattr__(self, "blocks", b)

    @property
    def g(self) -> int:
        return self.blocks.shape[0]


def _blocks(z):
    return z.blocks if isinstance(z, TensorElement) else np.atleast_2d(np.asarray(z, float))


def make_norm(X):
    """Accept a callable, a norm tag ('l1', 'l2', 'linf'), or a (Gpt, 'V'|'A') pair."""
    if callable(X):
        return X
    if isinstance(X, str):
        return lambda v: vector_norm(X, v)
    gpt, side = X
    return (lambda v: base_norm(gpt, v)) if side == "V" else (lambda v: order_unit_norm(gpt, v))


# ---- l1^g (x) X --------------------------------------------------------

def injective_norm_l1(z, X) -> float:
    """sup over signs of ||sum_i eps_i z_i||_X."""
    B = _blocks(z)
    nrm = make_norm(X)
    return max(nrm(e @ B) for e in sign_vectors(B.shape[0]))


def projective_norm_l1(z, X) -> float:
    B = _blocks(z)
    nrm = make_norm(X)
    return float(sum(nrm(b) for b in B))


# ---- l_inf^g (x) X -----------------------------------------------------

def injective_norm_linf(z, X) -> float:
    B = _blocks(z)
    nrm = make_norm(X)
    return max(nrm(b) for b in B)


def projective_norm_linf_pair(z, X) -> float:
    """g = 2: l_inf^2 is isometric to l1^2, giving (||x1+x2|| + ||x1-x2||)/2."""
    B = _blocks(z)
    if B.shape[0] != 2:
        raise ValueError("pair formula needs g = 2")
    nrm = make_norm(X)
    return 0.5 * (nrm(B[0] + B[1]) + nrm(B[0] - B[1]))


def polytope_ball_vertices(tag: str, n: int) -> np.ndarray:
    """Extreme points of the unit ball of l1^n or l_inf^n."""
    if tag == "l1":
        return np.vstack([np.eye(n), -np.eye(n)])
    if tag == "linf":
        return sign_vectors(n).copy()
    raise ValueError("polytope vertices only for l1 / linf")


def projective_norm_linf(z, ball_vertices) -> float:
    """min sum |lambda| over z = sum lambda_{eps,v} eps (x) v, eps signs, v ball vertices.

    Extreme points of the projective unit ball are the products of extreme points.
    """
    B = _blocks(z)
    g, n = B.shape
    V = np.asarray(ball_vertices, float)
    S = sign_vectors(g)
    # atoms: eps (x) v, flattened g*n; include both signs through lambda >= 0 on +-atoms
    atoms = np.einsum("ei,vk->evik", S, V).reshape(-1, g * n)
    # eps and -eps give opposite atoms, so nonnegative weights suffice
    A = atoms.T
    r = solve(LpProblem(A.shape[1], c=np.ones(A.shape[1]), A_eq=A, b_eq=B.reshape(-1)))
    if r.status != "optimal":
        raise LpNumericalError("projective norm LP failed")
    return float(r.value)


def projective_norm_linf_dual(gpt: Gpt, z) -> float:
    """l_inf^g (x)_pi A via duality: max sum <p_i, v_i> s.t. ||sum eps_i v_i||_V <= 1 for all eps."""
    gpt.require_polyhedral()
    B = _blocks(z)
    g, d = B.shape
    G = np.asarray(gpt.states, float)
    u = G @ np.asarray(gpt.unit, float)
    N = G.shape[0]
    S = sign_vectors(g)
    E = len(S)
    # variables: v (g*d, free), then per eps: mu_eps (N), nu_eps (N)
    nv = g * d + 2 * E * N
    A_eq = np.zeros((E * d, nv))
    A_ub = np.zeros((E, nv))
    for e, eps in enumerate(S):
        rows = slice(e * d, (e + 1) * d)
        for i in range(g):
            A_eq[rows, i * d:(i + 1) * d] = eps[i] * np.eye(d)
        off = g * d + 2 * e * N
        A_eq[rows, off:off + N] = -G.T
        A_eq[rows, off + N:off + 2 * N] = G.T
        A_ub[e, off:off + 2 * N] = np.concatenate([u, u])
    c = np.zeros(nv)
    c[:g * d] = -B.reshape(-1)
    free = np.zeros(nv, bool)
    free[:g * d] = True
    r = solve(LpProblem(nv, c=c, A_eq=A_eq, b_eq=np.zeros(E * d), A_ub=A_ub, b_ub=np.ones(E), free=free))
    return float(-r.value)


# ---- rho norm ------------------------------------------------------------

def phi_bar_blocks(gpt: Gpt, effects) -> np.ndarray:
    one = np.asarray(gpt.unit, float)
    return np.array([2 * np.asarray(f, float) - one for f in effects])


def rho_norm_primal(gpt: Gpt, phi_bar) -> float:
    """inf{lambda : lambda c1 (x) 1 - phi_bar in (E_g+)* (x)min A+}.

    (E_g+)* is generated by c1 + sum eps_i c_i (check-normalised), so with
    mu_{eps,l} >= 0 on generators eps (x) a_l:  sum mu a_l = lambda 1 and
    sum mu eps_i a_l = -p_i.
    """
    gpt.require_polyhedral()
    P = _blocks(phi_bar)
    g, d = P.shape
    F = np.asarray(gpt.effect_cone_generators, float)
    L = F.shape[0]
    S = sign_vectors(g)
    E = len(S)
    nv = 1 + E * L
    A = np.zeros(((g + 1) * d, nv))
    A[:d, 0] = -np.asarray(gpt.unit, float)
    for e, eps in enumerate(S):
        cols = slice(1 + e * L, 1 + (e + 1) * L)
        A[:d, cols] = F.T
        for i in range(g):
            A[(i + 1) * d:(i + 2) * d, cols] = eps[i] * F.T
    b = np.concatenate([np.zeros(d), -P.reshape(-1)])
    c = np.zeros(nv)
    c[0] = 1
    r = solve(LpProblem(nv, c=c, A_eq=A, b_eq=b))
    if r.status != "optimal":
        raise LpNumericalError(f"rho primal LP ended with status {r.status}")
    return float(r.value)


def rho_norm_dual(gpt: Gpt, phi_bar, return_point: bool = False):
    """max sum <p_i, y_i> s.t. 1(y0) <= 1, y0 + sum eps_i y_i in V+ for all eps.

    y0 in V+ follows by averaging over eps; y_i are free (the y+ - y- split of the
    conic form is done by the LP layer).
    """
    gpt.require_polyhedral()
    P = _blocks(phi_bar)
    g, d = P.shape
    Fv = np.asarray(gpt.cone.facets, float)  # V+ facets
    m = Fv.shape[0]
    S = sign_vectors(g)
    nv = (g + 1) * d
    A_ub = np.zeros((len(S) * m + 1, nv))
    for e, eps in enumerate(S):
        rows = slice(e * m, (e + 1) * m)
        A_ub[rows, :d] = -Fv
        for i in range(g):
            A_ub[rows, (i + 1) * d:(i + 2) * d] = -eps[i] * Fv
    A_ub[-1, :d] = np.asarray(gpt.unit, float)
    b_ub = np.zeros(len(S) * m + 1)
    b_ub[-1] = 1
    c = np.concatenate([np.zeros(d), -P.reshape(-1)])
    r = solve(LpProblem(nv, c=c, A_ub=A_ub, b_ub=b_ub, free=np.ones(nv, bool)))
    if r.status != "optimal":
        raise LpNumericalError(f"rho dual LP ended with status {r.status}")
    val = float(-r.value)
    if return_point:
        x = np.asarray(r.x, float)
        return val, x[:d], x[d:].reshape(g, d)
    return val


def rho_norm(gpt: Gpt, phi_bar, check_duality: bool = True) -> float:
    """||phi_bar||_rho; primal and dual LP values must agree (strong duality self-test)."""
    p = rho_norm_primal(gpt, phi_bar)
    if check_duality:
        q = rho_norm_dual(gpt, phi_bar)
        if abs(p - q) > RHO_DUALITY_TOL * max(1.0, abs(p)):
            raise LpNumericalError(f"rho primal {p} and dual {q} disagree")
    return p


def rho_dual_norm(gpt: Gpt, z) -> float:
    """Gauge of the witness set: min t with 1(z0) = t, z0 + sum eps_i z_i in V+."""
    gpt.require_polyhedral()
    Z = _blocks(z)
    g, d = Z.shape
    Fv = np.asarray(gpt.cone.facets, float)
    S = sign_vectors(g)
    # variables z0 (free, d); minimise 1(z0); constraints Fv (z0 + sum eps z_i) >= 0
    A_ub = np.vstack([-Fv for _ in S])
    b_ub = np.concatenate([Fv @ (eps @ Z) for eps in S])
    r = solve(LpProblem(d, c=np.asarray(gpt.unit, float), A_ub=A_ub, b_ub=b_ub, free=np.ones(d, bool)))
    return float(r.value)


def gamma_from_rho(rho: float) -> float:
    return 1.0 if rho <= 1 else 1.0 / rho


# ---- closed forms --------------------------------------------------------

def region_hypercube(g: int, n: int, s, tol: float = 0.0) -> bool:
    """sum over any <= n coordinates is <= 1: check the top-min(g,n) entries."""
    s = np.asarray(s, float)
    if s.shape != (g,):
        raise ValueError("s must have g entries")
    top = np.sort(s)[::-1][:min(g, n)]
    return bool(top.sum() <= 1 + tol)


@dataclass(frozen=True)
class BallRegionAnswer:
    member: bool
    exact: bool  # False: membership is sufficient only (g > n)

    def __bool__(self):
        return self.member


def region_ball(g: int, n: int, s, tol: float = 1e-12) -> BallRegionAnswer:
    s = np.asarray(s, float)
    if s.shape != (g,):
        raise ValueError("s must have g entries")
    return BallRegionAnswer(bool((s * s).sum() <= 1 + tol), g <= n)


def gamma_hypercube(g: int, n: int) -> float:
    return 1.0 / min(g, n)


def gamma_crosspolytope(g: int) -> float:
    if g < 1:
        raise ValueError("g >= 1")
    h = g // 2 + 1
    return h * math.comb(g, h) / (g * 2 ** (g - 1))


def h_function(n: int) -> float:
    """1 / pi_1(l2^n) = Gamma(n/2) / (sqrt(pi) Gamma((n+1)/2))."""
    return math.exp(math.lgamma(n / 2) - math.lgamma((n + 1) / 2)) / math.sqrt(math.pi)


S1_CONSTANT = 7.79


def one_summing(tag: str, n: int) -> float:
    if n < 1:
        raise ValueError("n >= 1")
    if tag == "linf":
        return float(n)
    if tag == "l2":
        return 1.0 / h_function(n)
    if tag == "l1":
        return 1.0 / gamma_crosspolytope(n)
    if tag == "S1_selfadjoint_bound":
        return S1_CONSTANT * n
    raise ValueError(f"unknown space tag {tag!r}")


# reference constants, not recomputed
REFERENCE = {
    "gamma_upper_g2": 1 / math.sqrt(2),
    "qubit_lower_g_ge_4": 0.5,
    "qubit_upper_g_ge_4": 1 / math.sqrt(3),
    "qubit_numerical_g4": 0.56,
}


def gamma_upper_g(g: int) -> float:
    return math.sqrt(2.0 / g)


def gamma_lower_bound(gpt: Gpt, k) -> tuple:
    """Best closed-form lower bound on gamma(k; V, V+) known for the model."""
    g = len(k)
    if any(x != 2 for x in k):
        kd = (2,) * sum(x - 1 for x in k)
        base, src = gamma_lower_bound(gpt, kd)
        lifted = base / max(x - 1 for x in k) ** 2
        return (max(1.0 / g, lifted), "symmetrization lift / trivial simplex")
    if gpt.name == "classical":
        return (1.0, "simplicial cone: all measurements compatible")
    n = gpt.n
    if gpt.name == "hypercube":
        return (gamma_hypercube(g, n), "hypercube closed form")
    if gpt.name == "crosspolytope":
        cands = [gamma_crosspolytope(g), gamma_crosspolytope(n), 1.0 / min(g, n)]
        return (max(cands), "cross-polytope f(g), f(n), 1/min(g,n)")
    if gpt.name == "ball":
        cands = [1 / math.sqrt(g), h_function(n), 1.0 / min(g, n)]
        return (max(cands), "QC_g diagonal, 1/pi_1(l2^n), 1/min(g,n)")
    if gpt.cs is not None:
        return (1.0 / min(g, gpt.dim - 1), "centrally symmetric 1/min(g,n)")
    return (1.0 / min(g, gpt.dim), "generic 1/min(g, dim V)")


def gamma_upper_reference(gpt: Gpt, k) -> tuple:
    g = len(k)
    if gpt.name == "ball":
        n = gpt.n
        if g <= n:
            return (1 / math.sqrt(g), "QC_g exact for g <= n")
        return (min(1 / math.sqrt(2), 1 / math.sqrt(n)), "reference upper bound for g > n")
    return (1.0, "none")


def rho_ratio_estimate(X, g: int, dim: int, budget: int = 200, seed: int = 0, candidates=None):
    """[lower, upper] for max ||z||_pi / ||z||_eps on l1^g (x) X.

    Lower bound from explicit candidates (diagonal constructions first), then random
    and sign-pattern search; upper bound min(g, dim).
    """
    rng = np.random.default_rng(seed)
    best = 1.0
    cands = list(candidates) if candidates is not None else []
    m = min(g, dim)
    D = np.zeros((g, dim))
    D[np.arange(m), np.arange(m)] = 1.0
    cands.append(D)
    for _ in range(budget):
        kind = rng.integers(3)
        if kind == 0:
            Z = rng.normal(size=(g, dim))
        elif kind == 1:
            Z = rng.choice([-1.0, 0.0, 1.0], size=(g, dim))
        else:
            Z = (rng.random((g, dim)) < 0.3) * rng.choice([-1.0, 1.0], size=(g, dim))
        cands.append(Z)
    for Z in cands:
        e = injective_norm_l1(Z, X)
        if e > 1e-12:
            best = max(best, projective_norm_l1(Z, X) / e)
    return (best, float(min(g, dim)))
