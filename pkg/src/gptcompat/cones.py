"""Polyhedral cones: membership, duality, min/max tensor products, chi."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lp import LpCertificate, LpNumericalError, LpProblem, lp_feasible, solve, to_fraction_array

__all__ = [
    "PolyCone", "DegenerateConeError", "CanonicalTensor", "MapTensor",
    "member", "dual_cone", "min_tensor", "max_tensor_member", "lp_feasible",
    "LpProblem", "LpCertificate", "LpNumericalError", "solve", "dumps", "parse_number",
]

MIN_TENSOR_CAP = 200_000


class DegenerateConeError(ValueError):
    """Cone is {0}, the whole space, or otherwise not proper."""


def _arr(a, exact):
    if exact:
        return to_fraction_array(a)
    return np.asarray(a, dtype=float)


@dataclass(frozen=True, eq=False)
class PolyCone:
    """cone(generators) = {x : facets @ x >= 0}.  ``facets`` may be None (implicit)."""

    generators: np.ndarray
    facets: np.ndarray | None = None
    exact: bool = False

    def __post_init__(self):
        g = _arr(self.generators, self.exact)
        if g.ndim != 2 or g.shape[0] == 0:
            raise DegenerateConeError("cone needs at least one generator")
        object.__setattr__(self, "generators", g)
        if self.facets is not None:
            f = _arr(self.facets, self.exact).reshape(-1, g.shape[1])
            if f.shape[0] == 0:
                raise DegenerateConeError("no facets: cone is the full space")
            object.__setattr__(self, "facets", f)
        if not np.any(np.asarray(g, float) != 0):
            raise DegenerateConeError("zero cone")

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def check(self, tol=1e-9, samples=0, seed=0):
        """Verify generator/facet consistency and properness."""
        G = np.asarray(self.generators, float)
        if np.linalg.matrix_rank(G) < self.dim:
            raise DegenerateConeError("generators do not span the space")
        if self.facets is None:
            return True
        F = np.asarray(self.facets, float)
        if np.linalg.matrix_rank(F) < self.dim:
            raise DegenerateConeError("cone contains a line")
        if (F @ G.T).min() < -tol:
            raise ValueError("a generator violates a facet inequality")
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            x = rng.normal(size=self.dim)
            if member(self, x, tol) != _lp_member(self.generators, x, tol):
                raise ValueError("V- and H-representations disagree")
        return True

    def to_json(self) -> dict:
        d = {"dim": self.dim, "generators": self.generators.tolist()}
        if self.facets is not None:
            d["facets"] = self.facets.tolist()
        return d

    @classmethod
    def from_json(cls, d, exact=False) -> "PolyCone":
        gens = [[parse_number(v, exact) for v in row] for row in d["generators"]]
        facets = d.get("facets")
        if facets is not None:
            facets = [[parse_number(v, exact) for v in row] for row in facets]
        cone = cls(np.array(gens, dtype=object if exact else float), None if facets is None else
                   np.array(facets, dtype=object if exact else float), exact)
        if "dim" in d and int(d["dim"]) != cone.dim:
            raise ValueError("dim field does not match generator length")
        return cone


def parse_number(v, exact=False):
    if isinstance(v, str):
        f = Fraction(v)
        return f if exact else float(f)
    if exact:
        return to_fraction_array([v])[0]
    return float(v)


def _fmt(o):
    if isinstance(o, (float, np.floating)):
        if o != o or o in (float("inf"), float("-inf")):
            return json.dumps(float(o))
        return format(float(o) + 0.0, ".17g")
    if isinstance(o, Fraction):
        return _fmt(float(o))
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if o is None:
        return "null"
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, np.ndarray):
        return _fmt(o.tolist())
    if isinstance(o, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in o.items()) + "}"
    if isinstance(o, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in o) + "]"
    raise TypeError(f"cannot serialize {type(o)}")


def dumps(obj) -> str:
    """JSON with floats printed at 17 significant digits (deterministic key order kept)."""
    return _fmt(obj)


def _lp_member(generators, x, tol, exact=False) -> bool:
    G = generators
    p = LpProblem(G.shape[0], A_eq=G.T, b_eq=x, exact=exact, tol=tol)
    return lp_feasible(p).feasible


def member(cone: PolyCone, x, tol: float = 1e-9) -> bool:
    x = _arr(x, cone.exact)
    if x.shape != (cone.dim,):
        raise ValueError(f"expected vector of length {cone.dim}")
    if cone.facets is not None:
        v = cone.facets @ x
        return bool(all(v >= 0)) if cone.exact else bool(v.min() >= -tol)
    return _lp_member(cone.generators, x, tol, cone.exact)


def member_certificate(cone: PolyCone, x, tol: float = 1e-9) -> LpCertificate:
    """LP over generators; Farkas covector separates x when infeasible."""
    x = _arr(x, cone.exact)
    return lp_feasible(LpProblem(cone.generators.shape[0], A_eq=cone.generators.T, b_eq=x,
                                 exact=cone.exact, tol=tol))


def dual_cone(cone: PolyCone) -> PolyCone:
    if cone.facets is None:
        raise DegenerateConeError("dual needs an explicit H-representation")
    if np.linalg.matrix_rank(np.asarray(cone.facets, float)) < cone.dim:
        raise DegenerateConeError("non-proper cone has a non-full-dimensional dual")
    return PolyCone(cone.facets, cone.generators, cone.exact)


def _kron_rows(A, B):
    return np.multiply.outer(A, B).transpose(0, 2, 1, 3).reshape(A.shape[0] * B.shape[0], -1)


def min_tensor(c1: PolyCone, c2: PolyCone, cap: int = MIN_TENSOR_CAP) -> PolyCone:
    """Generators are Kronecker products (row-major: index a*d2+b); facets implicit."""
    n = c1.generators.shape[0] * c2.generators.shape[0]
    if n > cap:
        raise ValueError(f"min tensor would have {n} generators (cap {cap})")
    ex = c1.exact or c2.exact
    G = _kron_rows(_arr(c1.generators, ex), _arr(c2.generators, ex))
    return PolyCone(G, None, ex)


def max_tensor_member(c1: PolyCone, c2: PolyCone, y, tol: float = 1e-9) -> bool:
    if c1.facets is None or c2.facets is None:
        raise DegenerateConeError("max tensor needs both H-representations")
    ex = c1.exact or c2.exact
    Y = _arr(y, ex).reshape(c1.dim, c2.dim)
    vals = _arr(c1.facets, ex) @ Y @ _arr(c2.facets, ex).T
    return bool(np.all(vals >= 0)) if ex else bool(vals.min() >= -tol)


@dataclass(frozen=True)
class CanonicalTensor:
    """chi_L = sum_i e_i* (x) e_i, identity coefficients in a dual basis pair."""

    dim: int

    @property
    def coeffs(self) -> np.ndarray:
        return np.eye(self.dim)

    def pair(self, alpha, v) -> float:
        return float(np.asarray(alpha) @ self.coeffs @ np.asarray(v))


@dataclass(frozen=True, eq=False)
class MapTensor:
    """Linear map Phi with matrix ``coeffs`` (codomain x domain)."""

    coeffs: np.ndarray

    @property
    def domain_dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.coeffs.shape[0]

    def __call__(self, w):
        return self.coeffs @ np.asarray(w)

    def adjoint(self, v):
        return self.coeffs.T @ np.asarray(v)

    def tensor(self) -> np.ndarray:
        """phi^Phi as (domain x codomain) array: <phi, w (x) v> = <Phi(w), v>."""
        return np.asarray(self.coeffs).T

    def tensor_from_chi(self) -> np.ndarray:
        """(Phi* (x) id)(chi) computed column by column."""
        chi = CanonicalTensor(self.codomain_dim).coeffs
        return np.stack([self.adjoint(chi[:, b]) for b in range(self.codomain_dim)], axis=1)


def polytope_vertices(A, b, tol: float = 1e-9) -> np.ndarray:
    """Vertices of {x : A x <= b} by brute force over d-subsets of tight rows.

    Only meant for the small effect polytopes used here (d <= 6, a few dozen rows).
    """
    import itertools

    A = np.asarray(A, float)
    b = np.asarray(b, float)
    m, d = A.shape
    verts = []
    for rows in itertools.combinations(range(m), d):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ x <= b + tol) and not any(np.allclose(x, v, atol=1e-9) for v in verts):
            verts.append(x)
    return np.array(verts).reshape(-1, d)
