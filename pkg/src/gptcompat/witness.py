"""Incompatibility witnesses for two-outcome effect tuples."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compat import is_compatible, model_region_membership
from .gpt import Gpt, base_norm, dichotomic_family, random_state
from .lp import LpProblem, solve
from .tensor_norms import phi_bar_blocks, sign_vectors

WITNESS_G_CAP = 20


@dataclass(frozen=True, eq=False)
class Witness:
    z: np.ndarray                 # g x dim
    z0: np.ndarray | None = None  # state in K certifying membership

    def __post_init__(self):
        object.__setattr__(self, "z", np.atleast_2d(np.asarray(self.z, float)))
        if self.z0 is not None:
            object.__setattr__(self, "z0", np.asarray(self.z0, float))

    @property
    def g(self) -> int:
        return self.z.shape[0]

    def to_json(self, gpt: Gpt) -> dict:
        return {"z0": None if self.z0 is None else self.z0.tolist(), "z": self.z.tolist(),
                "strict": is_strict(gpt, self), "pi_norm": pi_norm(gpt, self)}


def _z(w):
    return w.z if isinstance(w, Witness) else np.atleast_2d(np.asarray(w, float))


def is_witness(gpt: Gpt, z, tol: float = 1e-9):
    """Return z0 in K with z0 + sum eps_i z_i in V+ for every eps, or None."""
    gpt.require_polyhedral()
    Z = _z(z)
    g, d = Z.shape
    if g > WITNESS_G_CAP:
        raise ValueError(f"g = {g} exceeds {WITNESS_G_CAP}")
    Fv = np.asarray(gpt.cone.facets, float)
    S = sign_vectors(g)
    A_ub = np.vstack([-Fv for _ in S])
    b_ub = np.concatenate([Fv @ (eps @ Z) for eps in S]) + tol
    r = solve(LpProblem(d, A_ub=A_ub, b_ub=b_ub, A_eq=np.asarray(gpt.unit, float)[None, :], b_eq=[1.0],
                        free=np.ones(d, bool)))
    if not r.feasible:
        return None
    return np.asarray(r.x, float)


def pi_norm(gpt: Gpt, z) -> float:
    return float(sum(base_norm(gpt, zi) for zi in _z(z)))


def is_strict(gpt: Gpt, z, tol: float = 1e-9) -> bool:
    if is_witness(gpt, z, tol) is None:
        raise ValueError("not a witness")
    return pi_norm(gpt, z) > 1 + tol


def evaluate(z, phi_bar) -> float:
    """<z, phi_bar> = sum_i <2 f_i - 1, z_i>."""
    Z = _z(z)
    P = np.atleast_2d(np.asarray(phi_bar, float))
    if Z.shape != P.shape:
        raise ValueError("dimension mismatch")
    return float((Z * P).sum())


def extract_witness(gpt: Gpt, effects, tol: float = 1e-9) -> Witness | None:
    """Witness from the Farkas certificate of the joint-measurement LP, or None if compatible.

    The jewel point (z0, z_i) with 1(z0) = 1 has sum <2f_i - 1, z_i> < -1, so
    w_i = -z_i (with the same z0, the diamond being sign symmetric) evaluates above 1.
    """
    fam = dichotomic_family(gpt, effects)
    res = is_compatible(gpt, fam, tol=tol)
    if res.compatible or res.jewel_point is None:
        return None
    z0, zs = res.jewel_point
    z0 = np.asarray(z0, float)
    W = -np.vstack([np.asarray(zi, float) for zi in zs])
    return Witness(W, z0)


def optimal_witness(gpt: Gpt, effects) -> Witness:
    """Maximiser of the rho dual LP: a witness with <z, phi_bar> = ||phi_bar||_rho."""
    from .tensor_norms import rho_norm_dual
    _, y0, Y = rho_norm_dual(gpt, phi_bar_blocks(gpt, effects), return_point=True)
    t = float(np.asarray(gpt.unit, float) @ y0)
    if t <= 1e-12:
        return Witness(np.zeros_like(Y), None)
    return Witness(Y / t, y0 / t) if t < 1 - 1e-12 else Witness(Y, y0)


def sample_witnesses(gpt: Gpt, g: int, n: int, rng) -> list:
    """Random boundary points of the witness set: random state z0 and directions D,
    scaled by the largest t with z0 + t sum eps_i D_i in V+ for all eps."""
    Fv = np.asarray(gpt.cone.facets, float)
    S = sign_vectors(g)
    out = []
    while len(out) < n:
        z0 = random_state(gpt, rng)
        D = rng.normal(size=(g, gpt.dim))
        if rng.random() < 0.5:
            D[:, 0] = 0.0
        a = Fv @ z0                     # >= 0
        b = (S @ D) @ Fv.T              # eps x facets
        neg = b < -1e-15
        if not neg.any():
            continue
        t = np.min(a[None, :].repeat(len(S), 0)[neg] / -b[neg])
        out.append(Witness(t * D, z0))
    return out


@dataclass(frozen=True)
class BlindRegionAnswer:
    exact: bool            # answer from the compatibility region
    sampled: bool          # answer from sampled witnesses (True = no violation found)
    violating: Witness | None = None

    def __bool__(self):
        return self.exact


def blind_region_member(gpt: Gpt, s, witnesses=None, tuples=None) -> BlindRegionAnswer:
    """s in Pi: both the exact route (Pi = Gamma) and sum s_i ||z_i||_V <= 1 over samples."""
    s = np.asarray(s, float)
    exact = model_region_membership(gpt, s, tuples=tuples)
    viol = None
    s_sorted = np.sort(s)[::-1]
    for w in witnesses or []:
        # permuting the blocks of a witness gives a witness; pair largest with largest
        norms = np.sort([base_norm(gpt, zi) for zi in w.z])[::-1]
        if s_sorted @ norms > 1 + 1e-9:
            viol = w
            break
    return BlindRegionAnswer(exact, viol is None, viol)


def extreme_witnesses(gpt: Gpt, g: int) -> list:
    """Farkas and rho-optimal witnesses of every incompatible tuple of extreme effects."""
    from .compat import worst_case_tuples
    out = []
    for t in worst_case_tuples(gpt, g):
        w = extract_witness(gpt, list(t))
        if w is not None:
            out.append(w)
            out.append(optimal_witness(gpt, list(t)))
    return out


def pi_prime_member(vbar_norm, s, candidates) -> bool:
    """Sampled Pi' test: sum s_i ||zbar_i|| <= ||zbar||_eps for candidate zbar tuples."""
    from .tensor_norms import injective_norm_l1
    s = np.asarray(s, float)
    for Z in candidates:
        Z = np.atleast_2d(np.asarray(Z, float))
        lhs = sum(si * vbar_norm(zi) for si, zi in zip(s, Z))
        if lhs > injective_norm_l1(Z, vbar_norm) + 1e-9:
            return False
    return True
