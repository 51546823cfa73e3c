"""Outcome space E_k of the polysimplex, its w / w* bases, J_k, and effect tensors.

Outcome tuples kappa are linearised row-major with measurement 1 varying slowest
(``np.ndindex(k)`` order).  Basis index 0 is the constant function; index
(i, j) with j in 0..k_i-2 is w_j^(i).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cones import MapTensor, PolyCone
from .gpt import Gpt, MeasurementFamily, validate_family
from .lp import to_fraction_array

OUTCOME_CAP = 2 ** 16


def _frac_inv(M):
    """Gauss-Jordan inverse over Fractions."""
    n = M.shape[0]
    A = np.concatenate([M.copy(), to_fraction_array(np.eye(n, dtype=int))], axis=1)
    for c in range(n):
        p = next(r for r in range(c, n) if A[r, c] != 0)
        A[[c, p]] = A[[p, c]]
        A[c] = A[c] / A[c, c]
        for r in range(n):
            if r != c and A[r, c] != 0:
                A[r] = A[r] - A[r, c] * A[c]
    return A[:, n:]


@dataclass(frozen=True, eq=False)
class OutcomeSpace:
    k: tuple
    w_basis: np.ndarray   # K x dimE, exact Fractions
    w_dual: np.ndarray    # K x dimE, exact Fractions
    J: np.ndarray         # K x K, exact Fractions
    labels: tuple         # basis labels: None for the constant, (i, j) otherwise

    @property
    def g(self) -> int:
        return len(self.k)

    @property
    def K(self) -> int:
        return int(np.prod(self.k))

    @property
    def dim_E(self) -> int:
        return 1 - self.g + sum(self.k)

    @property
    def kappas(self):
        return list(np.ndindex(*self.k))

    def wf(self) -> np.ndarray:
        """w basis as floats (K x dimE)."""
        return np.asarray(self.w_basis, float)

    def index(self, i, j) -> int:
        return self.labels.index((i, j))

    def dual_cone_generators(self, exact=False) -> np.ndarray:
        """(E+)* generators J(e_kappa) in w* coordinates: rows (1, w_b(kappa))."""
        return self.w_basis if exact else self.wf()

    def eta_w_coords(self, exact=False) -> np.ndarray:
        """Generators eta_j^(i) of E+ written in the w basis (rows)."""
        rows = []
        for i, ki in enumerate(self.k):
            for j in range(ki):
                r = [Fraction(0)] * self.dim_E
                r[0] = Fraction(1, ki)
                if j < ki - 1:
                    r[self.index(i, j)] = Fraction(1, 2)
                else:
                    for jj in range(ki - 1):
                        r[self.index(i, jj)] = Fraction(-1, 2)
                rows.append(r)
        a = np.array(rows, dtype=object)
        return a if exact else np.asarray(a, float)

    def dual_cone(self, exact=False) -> PolyCone:
        """(E_k+)* in w* coordinates, with the eta's as facets."""
        return PolyCone(self.dual_cone_generators(exact), self.eta_w_coords(exact), exact)

    def marginals(self, p) -> list:
        p = np.asarray(p, float).reshape(self.k)
        out = []
        for i in range(self.g):
            ax = tuple(a for a in range(self.g) if a != i)
            out.append(p.sum(axis=ax))
        return out

    def sign_permutation(self, eps) -> np.ndarray:
        """Permutation of kappa induced by swapping outcomes 0 <-> 1 where eps_i = -1 (k_i = 2)."""
        perm = []
        for kap in self.kappas:
            img = tuple((1 - c) if (e == -1) else c for c, e in zip(kap, eps))
            perm.append(int(np.ravel_multi_index(img, self.k)))
        return np.array(perm)


@lru_cache(maxsize=64)
def build_outcome_space(k) -> OutcomeSpace:
    k = tuple(int(x) for x in k)
    if not k or any(x < 2 for x in k):
        raise ValueError("every k_i must be >= 2")
    K = int(np.prod(k))
    if K > OUTCOME_CAP:
        raise ValueError(f"outcome grid of size {K} exceeds cap {OUTCOME_CAP}")
    kappas = list(np.ndindex(*k))
    labels = [None] + [(i, j) for i, ki in enumerate(k) for j in range(ki - 1)]
    W = np.empty((K, len(labels)), dtype=object)
    Wd = np.empty((K, len(labels)), dtype=object)
    for r, kap in enumerate(kappas):
        W[r, 0] = Fraction(1)
        Wd[r, 0] = Fraction(1, K)
        for c, (i, j) in enumerate(labels[1:], start=1):
            ki = k[i]
            W[r, c] = Fraction(-2, ki) + (2 if kap[i] == j else 0)
            vstar = Fraction(1, 2) if kap[i] == j else (Fraction(-1, 2) if kap[i] == ki - 1 else 0)
            Wd[r, c] = Fraction(int(ki), int(K)) * vstar
    G = W.T @ W
    J = W @ _frac_inv(G) @ W.T
    sp = OutcomeSpace(k, W, Wd, J, tuple(labels))
    _check_space(sp)
    return sp


def _check_space(sp: OutcomeSpace):
    D = sp.w_dual.T @ sp.w_basis
    if not all(D[a, b] == (1 if a == b else 0) for a in range(D.shape[0]) for b in range(D.shape[1])):
        raise AssertionError("w* is not dual to w")
    J = sp.J
    if not np.all(J @ J == J) or not np.all(J == J.T):
        raise AssertionError("J is not an orthogonal projection")
    if np.linalg.matrix_rank(np.asarray(J, float)) != sp.dim_E:
        raise AssertionError("rank(J) != dim E")


# ---- maps and tensors ------------------------------------------------------

def _p_vectors(gpt: Gpt, fam: MeasurementFamily, exact=False):
    """p_0 = 1 and p_j^(i) = 2 f_j^(i) - (2/k_i) 1, stacked in basis order."""
    if exact:
        one = to_fraction_array(gpt.unit)
        rows = [one]
        for m in fam.measurements:
            E = to_fraction_array(m.effects)
            for j in range(m.k - 1):
                rows.append(2 * E[j] - Fraction(2, m.k) * one)
        return np.array(rows, dtype=object)
    one = np.asarray(gpt.unit, float)
    rows = [one]
    for m in fam.measurements:
        E = np.asarray(m.effects, float)
        for j in range(m.k - 1):
            rows.append(2 * E[j] - (2.0 / m.k) * one)
    return np.array(rows)


def phi_map(gpt: Gpt, fam: MeasurementFamily, check=True, tol=1e-9) -> MapTensor:
    """Phi^(f): E_k -> A in the w basis (columns = images of basis vectors)."""
    if check and not validate_family(gpt, fam, tol):
        raise ValueError("invalid measurement family")
    return MapTensor(_p_vectors(gpt, fam).T)


def apply_phi(gpt, fam, u) -> np.ndarray:
    """Phi^(f)(u) for u in E_k given as a vector in R^K."""
    sp = build_outcome_space(fam.k)
    coeffs = np.asarray(sp.w_dual, float).T @ np.asarray(u, float)  # w-coordinates
    return phi_map(gpt, fam, check=False)(coeffs)


def eta_vector(k, i, j) -> np.ndarray:
    """eta_j^(i) = 1 (x) .. (x) e_j (x) .. (x) 1 in R^K."""
    return np.array([1.0 if kap[i] == j else 0.0 for kap in np.ndindex(*k)])


@dataclass(frozen=True, eq=False)
class EffectTensor:
    k: tuple
    coeffs: np.ndarray        # dimE x dimA, rows p_b in w* coordinates
    gpt: Gpt

    @property
    def p0(self):
        return self.coeffs[0]

    def p(self, i, j) -> np.ndarray:
        return self.coeffs[build_outcome_space(self.k).index(i, j)]

    @property
    def blocks(self) -> np.ndarray:
        """phi_bar blocks 2 f_i - 1 (dichotomic case), g x dimA."""
        if any(x != 2 for x in self.k):
            raise ValueError("reduced tensor only for two-outcome families")
        return self.coeffs[1:]

    def full(self) -> np.ndarray:
        """Coefficients in the standard basis of R^K (x) A."""
        sp = build_outcome_space(self.k)
        return np.asarray(sp.w_dual, float) @ np.asarray(self.coeffs, float)

    def cs_split(self):
        """(y_f, xi_bar): scalar biases 2 alpha_i - 1 and blocks 2 fbar_i."""
        if self.gpt.cs is None:
            raise ValueError("model is not centrally symmetric")
        B = np.asarray(self.blocks, float)
        return B[:, 0].copy(), B[:, 1:].copy()


def effect_tensor(gpt: Gpt, fam: MeasurementFamily, exact=False) -> EffectTensor:
    return EffectTensor(fam.k, _p_vectors(gpt, fam, exact), gpt)


def effect_tensor_dichotomic(gpt: Gpt, effects, exact=False) -> EffectTensor:
    from .gpt import dichotomic_family
    return effect_tensor(gpt, dichotomic_family(gpt, effects), exact)


def phi_bar(gpt: Gpt, effects) -> np.ndarray:
    """Blocks p_i = 2 f_i - 1 of phi_bar = sum_i c_i-check (x) (2 f_i - 1)."""
    one = np.asarray(gpt.unit, float)
    return np.array([2 * np.asarray(f, float) - one for f in effects])


def sign_vectors_k(g: int) -> np.ndarray:
    """All eps in {+1,-1}^g, first coordinate slowest (matches kappa order for k = 2^g)."""
    return np.array(list(itertools.product([1, -1], repeat=g)), dtype=float).reshape(-1, g)


def c_vectors(g: int) -> np.ndarray:
    """c_i = (1,1)^{(x)(i-1)} (x) (1,-1) (x) (1,1)^{(x)(g-i)}, rows."""
    out = []
    for i in range(g):
        v = np.ones(1)
        for a in range(g):
            v = np.kron(v, np.array([1.0, -1.0]) if a == i else np.ones(2))
        out.append(v)
    return np.array(out)


def effect_tensor_in_max(gpt: Gpt, fam: MeasurementFamily, tol=1e-9) -> bool:
    """phi^(f) in (E_k+)* (x)max A+."""
    from .cones import max_tensor_member
    sp = build_outcome_space(fam.k)
    et = effect_tensor(gpt, fam)
    return max_tensor_member(sp.dual_cone(), PolyCone(gpt.effect_cone_generators, gpt.states),
                             np.asarray(et.coeffs, float).ravel(), tol)
