"""Compatibility: joint-measurement LP, positive-extension LP, regions and degrees."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gpt import (Gpt, Measurement, MeasurementFamily, NonPolyhedralError, add_noise_family,
                  dichotomic_family, extreme_effects, random_family, validate_family)
from .lp import LpCertificate, LpProblem, lp_feasible, to_fraction_array
from .polysimplex import _p_vectors, build_outcome_space, effect_tensor


@dataclass(frozen=True, eq=False)
class CompatResult:
    compatible: bool
    joint: np.ndarray | None = None            # K x dim, rows h_kappa
    certificate: LpCertificate | None = None
    farkas_blocks: list | None = None          # per measurement, k_i x dim
    jewel_point: tuple | None = None           # (z0, [z^(i) arrays (k_i-1) x dim]) normalised
    method: str = "joint"
    extra: dict = field(default_factory=dict)


def _prep(gpt: Gpt, fam: MeasurementFamily, exact: bool):
    gpt.require_polyhedral()
    if fam.dim != gpt.dim:
        raise ValueError("family lives on a different space")
    if exact:
        gpt = gpt.with_exact(True)
        F = to_fraction_array(gpt.effect_cone_generators)
    else:
        F = np.asarray(gpt.effect_cone_generators, float)
    return gpt, F


def _outer_rows(M, Ft):
    """Constraint matrix for rows (r, c), columns (kappa, l): M[r, kappa] * Ft[c, l]."""
    R, K = M.shape
    d, L = Ft.shape
    return np.multiply.outer(M, Ft).transpose(0, 2, 1, 3).reshape(R * d, K * L)


def _marginal_rows(k):
    """Indicator rows of {kappa : kappa_i = j}; for i >= 1 the last outcome is dropped
    (it is implied by the normalisation carried by measurement 1)."""
    kappas = list(np.ndindex(*k))
    rows, labels = [], []
    for i, ki in enumerate(k):
        for j in range(ki if i == 0 else ki - 1):
            rows.append([1 if kap[i] == j else 0 for kap in kappas])
            labels.append((i, j))
    return np.array(rows, dtype=int), labels


def _unpack_joint(x, K, F):
    L = F.shape[0]
    lam = x.reshape(K, L)
    return lam @ F


def is_compatible(gpt: Gpt, fam: MeasurementFamily, exact: bool = False, tol: float = 1e-9,
                  check: bool = True) -> CompatResult:
    """Joint measurement h_kappa in A+ with the prescribed marginals."""
    gpt, F = _prep(gpt, fam, exact)
    if check and not validate_family(gpt, fam if not exact else fam.with_exact(True), max(tol, 1e-9)):
        raise ValueError("invalid measurement family")
    k = fam.k
    K = int(np.prod(k))
    M, labels = _marginal_rows(k)
    if exact:
        M = to_fraction_array(M)
        effs = [to_fraction_array(m.effects) for m in fam.measurements]
    else:
        effs = [np.asarray(m.effects, float) for m in fam.measurements]
    A = _outer_rows(M, F.T)
    b = np.concatenate([effs[i][j] for i, j in labels])
    cert = lp_feasible(LpProblem(A.shape[1], A_eq=A, b_eq=b, exact=exact, tol=tol))
    if cert.feasible:
        return CompatResult(True, joint=_unpack_joint(cert.x, K, F), certificate=cert)
    d = gpt.dim
    Y = cert.y_eq.reshape(len(labels), d)
    zero = np.array([Fraction(0)] * d, dtype=object) if exact else np.zeros(d)
    blocks = []
    for i, ki in enumerate(k):
        rows = [Y[labels.index((i, j))] if (i, j) in labels else zero for j in range(ki)]
        blocks.append(np.array(rows, dtype=object if exact else float))
    return CompatResult(False, certificate=cert, farkas_blocks=blocks,
                        jewel_point=farkas_to_jewel(gpt, blocks))


def farkas_to_jewel(gpt: Gpt, blocks):
    """Map Farkas blocks y_ij to a normalised jewel point (z0, z_j^(i)).

    z_kappa = sum_i y_{i,kappa_i} lies in V+, z0 is the barycentre and
    z_j^(i) = (y_ij - y_{i,k_i}) / 2; the pairing <phi^(f), z> equals b.y < 0.
    """
    z0 = sum(B.sum(axis=0) / B.shape[0] for B in blocks)
    zs = [(B[:-1] - B[-1]) / 2 for B in blocks]
    norm = z0 @ gpt.unit
    if norm <= 0:
        return None
    return z0 / norm, [z / norm for z in zs]


def is_compatible_via_extension(gpt: Gpt, fam: MeasurementFamily, exact: bool = False,
                                tol: float = 1e-9) -> CompatResult:
    """Positive extension of Phi^(f) to (R^K, R^K_+): h_kappa = ext(e_kappa) in A+ with
    sum_kappa w_b(kappa) h_kappa = Phi^(f)(w_b) for every w basis vector."""
    gpt, F = _prep(gpt, fam, exact)
    sp = build_outcome_space(fam.k)
    W = sp.w_basis if exact else sp.wf()
    P = _p_vectors(gpt, fam, exact)
    A = _outer_rows(W.T, F.T)
    b = P.reshape(-1)
    cert = lp_feasible(LpProblem(A.shape[1], A_eq=A, b_eq=b, exact=exact, tol=tol))
    joint = _unpack_joint(cert.x, sp.K, F) if cert.feasible else None
    return CompatResult(cert.feasible, joint=joint, certificate=cert, method="extension")


def is_compatible_projected(gpt: Gpt, fam: MeasurementFamily, tol: float = 1e-9) -> CompatResult:
    """phi^(f) in (J_k (x) id)(R^K_+ (x) A+), written in the standard basis of R^K (x) A.

    The K*d rows have rank dim(E)*d only, so this also exercises redundant-row handling.
    """
    gpt, F = _prep(gpt, fam, False)
    sp = build_outcome_space(fam.k)
    J = np.asarray(sp.J, float)
    phi_full = effect_tensor(gpt, fam).full()
    A = _outer_rows(J, F.T)
    cert = lp_feasible(LpProblem(A.shape[1], A_eq=A, b_eq=phi_full.reshape(-1), tol=tol))
    joint = _unpack_joint(cert.x, sp.K, F) if cert.feasible else None
    return CompatResult(cert.feasible, joint=joint, certificate=cert, method="projected")


def marginals_of_joint(joint, k):
    H = np.asarray(joint, float).reshape(*k, -1)
    out = []
    for i in range(len(k)):
        ax = tuple(a for a in range(len(k)) if a != i)
        out.append(H.sum(axis=ax) if ax else H)
    return out


# ---- noise, regions, degrees ----------------------------------------------

def region_membership(gpt: Gpt, fam: MeasurementFamily, s, exact: bool = False, tol: float = 1e-9) -> bool:
    s = list(s)
    if len(s) != fam.g or any(not (0 <= v <= 1) for v in s):
        raise ValueError("s must lie in [0,1]^g")
    noisy = add_noise_family(gpt, fam.with_exact(True) if exact else fam, s)
    return is_compatible(gpt, noisy, exact=exact, tol=tol, check=False).compatible


def gamma_of_family(gpt: Gpt, fam: MeasurementFamily, tol: float = 1e-6, max_iter: int = 40) -> float:
    """Largest s with (s,...,s) in Gamma(f), by bisection."""
    if region_membership(gpt, fam, [1.0] * fam.g):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if region_membership(gpt, fam, [mid] * fam.g):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def worst_case_tuples(gpt: Gpt, g: int):
    """Multisets of g extreme effects (one per relabelling class) for dichotomic search."""
    E = extreme_effects(gpt, nontrivial=True, mod_relabel=True)
    return [tuple(E[list(c)]) for c in itertools.combinations_with_replacement(range(len(E)), g)]


def model_region_membership(gpt: Gpt, s, tuples=None, exact: bool = False) -> bool:
    """s in Gamma(g; V, V+) for dichotomic measurements.

    Gamma(f) only gets smaller as f moves outward, and the noisy tensor is linear in f,
    so it is enough to intersect over tuples of extreme effects.  Since s is not
    permutation invariant, every ordered tuple is checked.
    """
    g = len(s)
    if tuples is None:
        E = extreme_effects(gpt, nontrivial=True, mod_relabel=True)
        tuples = itertools.product(*([E] * g))
    for t in tuples:
        fam = dichotomic_family(gpt, [to_fraction_array(f) if exact else f for f in t])
        if not region_membership(gpt, fam, s, exact=exact):
            return False
    return True


@dataclass(frozen=True)
class GammaInterval:
    lower: float
    upper: float
    lower_source: str
    upper_source: str
    evaluations: int = 0

    def as_tuple(self):
        return (self.lower, self.upper)


def gamma_model(gpt: Gpt, g: int, k=None, budget: int = 200, seed: int = 0) -> GammaInterval:
    """[lower, upper] for the compatibility degree; upper from adversarial search."""
    from . import tensor_norms as tn

    k = tuple(k) if k is not None else (2,) * g
    if len(k) != g:
        raise ValueError("k must have g entries")
    lower, lsrc = tn.gamma_lower_bound(gpt, k)
    if gpt.cone is None:
        upper, usrc = tn.gamma_upper_reference(gpt, k)
        return GammaInterval(lower, upper, lsrc, usrc, 0)
    upper, evals = 1.0, 0
    rng = np.random.default_rng(seed)
    if all(x == 2 for x in k):
        for t in worst_case_tuples(gpt, g):
            if evals >= budget:
                break
            rho = tn.rho_norm(gpt, tn.phi_bar_blocks(gpt, t))
            upper = min(upper, 1.0 if rho <= 1 else 1.0 / rho)
            evals += 1
        while evals < budget:
            fam = random_family(gpt, k, rng)
            rho = tn.rho_norm(gpt, tn.phi_bar_blocks(gpt, [m.effects[0] for m in fam.measurements]))
            upper = min(upper, 1.0 if rho <= 1 else 1.0 / rho)
            evals += 1
    else:
        while evals < budget:
            fam = random_family(gpt, k, rng)
            upper = min(upper, gamma_of_family(gpt, fam))
            evals += 1
    return GammaInterval(min(lower, upper), upper, lsrc, "adversarial search", evals)


def symmetrization_lift(s, k):
    """((k_1-1)^-2 s_1, ..., (k_g-1)^-2 s_g)."""
    if len(s) != len(k):
        raise ValueError("one entry per measurement")
    out = []
    for si, ki in zip(s, k):
        c = Fraction(1, (ki - 1) ** 2)
        out.append(c * si if isinstance(si, (Fraction, int)) else float(c) * si)
    return tuple(out)


def euclidean_pair_gamma(a, b, gpt: Gpt | None = None) -> float:
    """gamma for two unbiased qubit-type effects with Bloch vectors a, b.

    Returns 2 / (|a+b| + |a-b|) capped at 1.  The un-inverted half-sum is the rho
    norm of the pair, not gamma itself.
    """
    if gpt is not None and (gpt.cs is None or gpt.cs.norm != "l2"):
        raise ValueError("closed form only holds for Euclidean-ball models")
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if np.linalg.norm(a) > 1 + 1e-12 or np.linalg.norm(b) > 1 + 1e-12:
        raise ValueError("Bloch vectors must lie in the unit ball")
    rho = 0.5 * float(np.linalg.norm(a + b) + np.linalg.norm(a - b))
    return 1.0 if rho <= 1 else 1.0 / rho
