"""Generalised spectrahedra: the GPT jewel, D_f, inclusion, D_min / D_max."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import PolyCone, max_tensor_member, min_tensor
from .gpt import Gpt, MeasurementFamily
from .lp import LpNumericalError, LpProblem, lp_feasible, solve
from .polysimplex import _p_vectors, build_outcome_space, sign_vectors_k


@dataclass(frozen=True, eq=False)
class SpectraPoint:
    z0: np.ndarray
    z: tuple  # per measurement i: array (k_i - 1) x dim L

    def __post_init__(self):
        object.__setattr__(self, "z0", np.asarray(self.z0, float))
        object.__setattr__(self, "z", tuple(np.atleast_2d(np.asarray(zi, float)) for zi in self.z))

    @property
    def k(self) -> tuple:
        return tuple(zi.shape[0] + 1 for zi in self.z)

    def stacked(self) -> np.ndarray:
        """Rows in basis order: z0, then z_j^(i)."""
        return np.vstack([self.z0[None, :]] + list(self.z))

    @classmethod
    def dichotomic(cls, z0, zs) -> "SpectraPoint":
        return cls(z0, tuple(np.asarray(zi, float)[None, :] for zi in zs))


def _cone_facets(L):
    if isinstance(L, Gpt):
        L.require_polyhedral()
        return np.asarray(L.cone.facets, float)
    if L.facets is None:
        raise ValueError("cone needs an H-representation")
    return np.asarray(L.facets, float)


def _cone_gens(L):
    return np.asarray(L.states if isinstance(L, Gpt) else L.generators, float)


def jewel_corners(k, z: SpectraPoint) -> np.ndarray:
    """z_kappa = z0 + sum w_j^(i)(kappa) z_j^(i) for all kappa (rows)."""
    sp = build_outcome_space(tuple(k))
    return sp.wf() @ z.stacked()


def jewel_member(k, L_cone, z: SpectraPoint, tol: float = 1e-9) -> bool:
    if tuple(k) != z.k:
        raise ValueError("point does not match outcome vector")
    F = _cone_facets(L_cone)
    if z.z0.shape[0] != F.shape[1]:
        raise ValueError("dimension mismatch")
    return bool((jewel_corners(k, z) @ F.T).min() >= -tol)


def diamond_member(L_cone, z0, zs, tol: float = 1e-9) -> bool:
    """k = (2,...,2) form: z0 + sum eps_i z_i in L+ for every sign vector."""
    F = _cone_facets(L_cone)
    Z = np.atleast_2d(np.asarray(zs, float))
    S = sign_vectors_k(Z.shape[0])
    pts = np.asarray(z0, float)[None, :] + S @ Z
    return bool((pts @ F.T).min() >= -tol)


def df_element(gpt: Gpt, fam: MeasurementFamily, z: SpectraPoint) -> np.ndarray:
    """1 (x) z0 + sum p_j^(i) (x) z_j^(i) as an (dim A) x (dim L) array."""
    P = _p_vectors(gpt, fam)
    return P.T @ z.stacked()


def df_member(gpt: Gpt, fam: MeasurementFamily, z: SpectraPoint, L_cone=None, tol: float = 1e-9) -> bool:
    """Membership in A+ (x)min L+ via an LP over product generators."""
    gpt.require_polyhedral()
    L_cone = gpt if L_cone is None else L_cone
    X = df_element(gpt, fam, z)
    A_gen = np.asarray(gpt.effect_cone_generators, float)
    L_gen = _cone_gens(L_cone)
    cone = min_tensor(PolyCone(A_gen), PolyCone(L_gen))
    r = lp_feasible(LpProblem(cone.generators.shape[0], A_eq=cone.generators.T, b_eq=X.reshape(-1), tol=tol))
    return r.feasible


@dataclass(frozen=True, eq=False)
class InclusionResult:
    included: bool
    value: float                 # min of sum <p, z> over the normalised jewel; included iff >= -1
    point: SpectraPoint | None   # jewel point outside D_f when not included
    refuted_by_sampling: bool = False


def _jewel_lp(gpt: Gpt, P: np.ndarray, k, L_cone=None):
    """min sum <p_b, z_b> over jewel points with 1(z0) = 1 (L = V)."""
    sp = build_outcome_space(tuple(k))
    W = sp.wf()
    Fv = _cone_facets(gpt if L_cone is None else L_cone)
    dE = W.shape[1]
    d = Fv.shape[1]
    nv = dE * d
    # corners: (W (x) Fv) vec(Z) >= 0
    A_ub = -np.multiply.outer(W, Fv).transpose(0, 2, 1, 3).reshape(W.shape[0] * Fv.shape[0], nv)
    b_ub = np.zeros(A_ub.shape[0])
    A_eq = np.zeros((1, nv))
    A_eq[0, :d] = np.asarray(gpt.unit, float)
    c = np.asarray(P, float).copy()
    c[0] = 0
    r = solve(LpProblem(nv, c=c.reshape(-1), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                        free=np.ones(nv, bool)))
    if r.status != "optimal":
        raise LpNumericalError(f"jewel LP ended with status {r.status}")
    Z = np.asarray(r.x, float).reshape(dE, d)
    pt = SpectraPoint(Z[0], tuple(Z[1 + sum(x - 1 for x in k[:i]):1 + sum(x - 1 for x in k[:i + 1])]
                                  for i in range(len(k))))
    return float(r.value), pt


def jewel_inclusion(gpt: Gpt, fam: MeasurementFamily, sampler=None, tol: float = 1e-9,
                    verify: bool = True) -> InclusionResult:
    """Decide D_jewel(k; V, V+) within D_f(k; V, V+).

    The pairing with chi is nonnegative on A+ (x)min V+, so a jewel point with
    1(z0) + sum <p, z> < 0 lies outside D_f; conversely that LP being >= 0 on the
    normalised jewel is the witness form of compatibility.  ``sampler`` (a callable
    returning SpectraPoints) only provides an optional fast refutation pass.
    """
    gpt.require_polyhedral()
    if sampler is not None:
        for z in sampler():
            if jewel_member(fam.k, gpt, z) and not df_member(gpt, fam, z, tol=tol):
                return InclusionResult(False, float("nan"), z, True)
    P = _p_vectors(gpt, fam)
    val, pt = _jewel_lp(gpt, P, fam.k)
    included = val >= -1 - tol
    if not included and verify and df_member(gpt, fam, pt, tol=tol):
        raise LpNumericalError("jewel LP minimiser unexpectedly lies in D_f")
    return InclusionResult(included, val, None if included else pt)


def scaled_jewel_inclusion(gpt: Gpt, fam: MeasurementFamily, s, tol: float = 1e-9) -> bool:
    """(1, s) . D_jewel within D_f: the z_j^(i) blocks are scaled by s_i."""
    P = _p_vectors(gpt, fam).copy()
    r = 1
    for i, ki in enumerate(fam.k):
        P[r:r + ki - 1] *= s[i]
        r += ki - 1
    val, _ = _jewel_lp(gpt, P, fam.k)
    return val >= -1 - tol


def level1_inclusion(gpt: Gpt, fam: MeasurementFamily, tol: float = 1e-9) -> bool:
    """D_jewel(k; R, R+) within D_f(k; R, R+), one LP per extreme state."""
    P = _p_vectors(gpt, fam)
    for v in np.asarray(gpt.states, float):
        Pv = (P @ v)[:, None]
        val, _ = _jewel_lp_scalar(Pv, fam.k)
        if Pv[0, 0] + val < -tol:
            return False
    return True


def _jewel_lp_scalar(Pv, k):
    sp = build_outcome_space(tuple(k))
    W = sp.wf()
    dE = W.shape[1]
    A_ub = -W
    A_eq = np.zeros((1, dE))
    A_eq[0, 0] = 1
    c = Pv[:, 0].copy()
    c[0] = 0
    r = solve(LpProblem(dE, c=c, A_ub=A_ub, b_ub=np.zeros(W.shape[0]), A_eq=A_eq, b_eq=[1.0],
                        free=np.ones(dE, bool)))
    return float(r.value), r.x


# ---- D_min / D_max / D_a ---------------------------------------------------

def dmin_member(C: PolyCone, L: PolyCone, v, tol: float = 1e-9) -> bool:
    """(v_1..v_g) in C (x)min L+: LP over generators c (x) l."""
    V = np.asarray(v, float).reshape(C.dim, L.dim)
    cone = min_tensor(C, L)
    return lp_feasible(LpProblem(cone.generators.shape[0], A_eq=np.asarray(cone.generators, float).T,
                                 b_eq=V.reshape(-1), tol=tol)).feasible


def dmax_member(C: PolyCone, L: PolyCone, v, tol: float = 1e-9) -> bool:
    """sum h_i v_i in L+ for all h in C*: dual-generator check."""
    return max_tensor_member(C, L, np.asarray(v, float).reshape(-1), tol)


def da_member(a, C_member, v) -> bool:
    """(v_i) in D_a(L, C) iff sum a_i (x) v_i in C; ``C_member`` decides the tensor cone."""
    a = np.atleast_2d(np.asarray(a, float))
    V = np.atleast_2d(np.asarray(v, float))
    X = sum(np.outer(a[i], V[i]) for i in range(a.shape[0]))
    return C_member(X.reshape(-1))


def da_real_cone(a, M: PolyCone) -> PolyCone:
    """C = D_a(R, M+) = {x : sum x_i a_i in M+} for a basis tuple a of M."""
    a = np.asarray(a, float)
    if a.shape[0] != a.shape[1] or abs(np.linalg.det(a)) < 1e-12:
        raise ValueError("a must be a basis of M")
    Ainv = np.linalg.inv(a)
    gens = np.asarray(M.generators, float) @ Ainv
    facets = np.asarray(M.facets, float) @ a.T
    return PolyCone(gens, facets)


def cube_cone(g: int) -> PolyCone:
    """cone{(1, eps)}: (E_g+)* in w* coordinates for two-outcome measurements."""
    S = sign_vectors_k(g)
    gens = np.hstack([np.ones((len(S), 1)), S])
    facets = np.vstack([np.hstack([np.ones((g, 1)), s * np.eye(g)]) for s in (1, -1)])
    return PolyCone(gens, facets)


def l1_ball_cone(g: int) -> PolyCone:
    """cone over the l1^g unit ball."""
    c = cube_cone(g)
    return PolyCone(c.facets, c.generators)


def rho_ball_member(gpt: Gpt, blocks, tol: float = 1e-9) -> bool:
    """||phi_bar||_rho <= 1 iff (1, p_1, .., p_g) in D_min(cube cone; A, A+)."""
    P = np.atleast_2d(np.asarray(blocks, float))
    v = np.vstack([np.asarray(gpt.unit, float)[None, :], P])
    A = PolyCone(np.asarray(gpt.effect_cone_generators, float), np.asarray(gpt.states, float))
    return dmin_member(cube_cone(P.shape[0]), A, v, tol)


# ---- functional range and C_a ---------------------------------------------

def functional_range_points(gpt: Gpt, a) -> np.ndarray:
    """W(a) = conv{(a_i(v)/1(v))_i : v extreme rays of V+}: returns the spanning points."""
    G = np.asarray(gpt.states, float)
    u = G @ np.asarray(gpt.unit, float)
    return (G @ np.asarray(a, float).T) / u[:, None]


def c_a_member(gpt: Gpt, a, x, tol: float = 1e-9) -> bool:
    """x in C_a iff 1 - sum x_i a_i in A+."""
    a = np.atleast_2d(np.asarray(a, float))
    f = np.asarray(gpt.unit, float) - np.asarray(x, float) @ a
    return bool((np.asarray(gpt.states, float) @ f).min() >= -tol)


def polar_member(points, x, tol: float = 1e-9) -> bool:
    """x in conv(points)^polar = {x : <x, w> <= 1 for all w}."""
    return bool((np.asarray(points, float) @ np.asarray(x, float)).max() <= 1 + tol)
