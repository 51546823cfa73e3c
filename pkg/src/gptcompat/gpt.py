"""GPT triples (V, V+, 1), standard models, norms, effects and measurements."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cones import PolyCone, dual_cone, parse_number
from .lp import LpProblem, solve, to_fraction_array

NORM_TAGS = ("l1", "l2", "linf", "custom-polytope")
DUAL_TAG = {"l1": "linf", "linf": "l1", "l2": "l2"}


class NonPolyhedralError(ValueError):
    """LP-based operation requested on a model without a polyhedral cone."""


@dataclass(frozen=True)
class CsStructure:
    """V = R v0 (+) Vbar, with x in V+ iff ||xbar|| <= x0.  v0 is coordinate 0."""

    norm: str
    v0_index: int = 0

    def vnorm(self, xbar) -> float:
        return vector_norm(self.norm, xbar)

    def anorm(self, abar) -> float:
        return vector_norm(DUAL_TAG[self.norm], abar)


def vector_norm(tag: str, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return 0.0
    if tag == "l1":
        return float(np.abs(x).sum())
    if tag == "l2":
        return float(np.sqrt((x * x).sum()))
    if tag == "linf":
        return float(np.abs(x).max())
    raise ValueError(f"unknown norm tag {tag!r}")


@dataclass(frozen=True, eq=False)
class Gpt:
    dim: int
    cone: PolyCone | None
    unit: np.ndarray
    cs: CsStructure | None = None
    name: str = "custom"
    n: int | None = None

    def __post_init__(self):
        u = to_fraction_array(self.unit) if self.exact else np.asarray(self.unit, dtype=float)
        object.__setattr__(self, "unit", u)
        if u.shape != (self.dim,):
            raise ValueError("unit has wrong length")
        if self.cone is not None:
            if self.cone.dim != self.dim:
                raise ValueError("cone dimension mismatch")
            vals = self.cone.generators @ u
            if not all(v > 0 for v in vals):
                raise ValueError("unit is not strictly positive on the state cone")

    @property
    def exact(self) -> bool:
        return self.cone is not None and self.cone.exact

    @property
    def polyhedral(self) -> bool:
        return self.cone is not None

    def require_polyhedral(self):
        if self.cone is None:
            raise NonPolyhedralError(f"{self.name} model is not polyhedral")
        if self.cone.facets is None:
            raise NonPolyhedralError("model cone needs an H-representation")

    @property
    def states(self) -> np.ndarray:
        """Generators of V+ (rays), as rows."""
        self.require_polyhedral()
        return self.cone.generators

    @property
    def effect_cone_generators(self) -> np.ndarray:
        """Generators of A+ = (V+)*, i.e. the facets of V+."""
        self.require_polyhedral()
        return self.cone.facets

    def effect_cone(self) -> PolyCone:
        self.require_polyhedral()
        return dual_cone(self.cone)

    def with_exact(self, exact: bool = True) -> "Gpt":
        if self.cone is None or self.cone.exact == exact:
            return self
        if exact:
            cone = PolyCone(to_fraction_array(self.cone.generators), to_fraction_array(self.cone.facets), True)
        else:
            cone = PolyCone(np.asarray(self.cone.generators, float), np.asarray(self.cone.facets, float), False)
        return Gpt(self.dim, cone, self.unit if exact else np.asarray(self.unit, float), self.cs, self.name, self.n)

    def to_json(self) -> dict:
        d = {"model": self.name, "n": self.n}
        if self.name == "custom":
            d["cone"] = self.cone.to_json()
            d["unit"] = self.unit.tolist()
        return d


def _num(exact):
    return (lambda v: to_fraction_array([v])[0]) if exact else float


def make_classical(d: int, exact: bool = False) -> Gpt:
    if d < 1:
        raise ValueError("d must be >= 1")
    I = np.eye(d, dtype=int)
    cone = PolyCone(I, I, exact)
    return Gpt(d, cone, np.ones(d, dtype=int), None, "classical", d)


def _signs(n):
    return np.array(list(itertools.product([1, -1], repeat=n)), dtype=int).reshape(-1, n)


def make_hypercube(n: int, exact: bool = False) -> Gpt:
    if n < 1:
        raise ValueError("n must be >= 1")
    gens = np.hstack([np.ones((2 ** n, 1), int), _signs(n)])
    facets = np.vstack([np.hstack([np.ones((n, 1), int), s * np.eye(n, dtype=int)]) for s in (1, -1)])
    cone = PolyCone(gens, facets, exact)
    unit = np.zeros(n + 1, int)
    unit[0] = 1
    return Gpt(n + 1, cone, unit, CsStructure("linf"), "hypercube", n)


def make_crosspolytope(n: int, exact: bool = False) -> Gpt:
    if n < 1:
        raise ValueError("n must be >= 1")
    h = make_hypercube(n, exact)
    cone = PolyCone(h.cone.facets, h.cone.generators, exact)
    return Gpt(n + 1, cone, h.unit, CsStructure("l1"), "crosspolytope", n)


def make_ball(n: int) -> Gpt:
    if n < 1:
        raise ValueError("n must be >= 1")
    unit = np.zeros(n + 1)
    unit[0] = 1
    return Gpt(n + 1, None, unit, CsStructure("l2"), "ball", n)


def make_custom(cone: PolyCone, unit) -> Gpt:
    if cone.facets is None:
        raise ValueError("custom cones need both generators and facets")
    cone.check()
    return Gpt(cone.dim, cone, unit, None, "custom", None)


MODELS = {"classical": make_classical, "hypercube": make_hypercube,
          "crosspolytope": make_crosspolytope}


def gpt_from_json(d: dict, exact: bool = False) -> Gpt:
    kind = d.get("model")
    if kind in MODELS:
        return MODELS[kind](int(d["n"]), exact)
    if kind == "ball":
        return make_ball(int(d["n"]))
    if kind == "custom":
        cone = PolyCone.from_json(d["cone"], exact)
        if "unit" not in d:
            raise ValueError("custom model needs a 'unit' covector")
        return make_custom(cone, [parse_number(v, exact) for v in d["unit"]])
    raise ValueError(f"unknown model {kind!r}")


# ---- norms ---------------------------------------------------------------

def base_norm(gpt: Gpt, x, method: str = "auto") -> float:
    """inf{1(y)+1(z) : x = y - z, y, z in V+}."""
    x = np.asarray(x, dtype=float)
    if x.shape != (gpt.dim,):
        raise ValueError("dimension mismatch")
    if gpt.cs is not None and (method == "closed" or (method == "auto" and gpt.cone is None)):
        return max(abs(x[0]), gpt.cs.vnorm(x[1:]))
    gpt.require_polyhedral()
    G = np.asarray(gpt.states, float)
    u = G @ np.asarray(gpt.unit, float)
    N = G.shape[0]
    res = solve(LpProblem(2 * N, c=np.concatenate([u, u]), A_eq=np.hstack([G.T, -G.T]), b_eq=x))
    return float(res.value)


def order_unit_norm(gpt: Gpt, a, method: str = "auto") -> float:
    """inf{t : -t1 <= a <= t1}; for polyhedral V+ this is max_v |a(v)|/1(v) over generators."""
    a = np.asarray(a, dtype=float)
    if a.shape != (gpt.dim,):
        raise ValueError("dimension mismatch")
    if gpt.cs is not None and (method == "closed" or (method == "auto" and gpt.cone is None)):
        return abs(a[0]) + gpt.cs.anorm(a[1:])
    gpt.require_polyhedral()
    G = np.asarray(gpt.states, float)
    return float(np.max(np.abs(G @ a) / (G @ np.asarray(gpt.unit, float))))


def order_unit_norm_lp(gpt: Gpt, a) -> float:
    """Same quantity as an explicit LP over A+ generators (min t, t1 -+ a in A+)."""
    gpt.require_polyhedral()
    a = np.asarray(a, float)
    F = np.asarray(gpt.effect_cone_generators, float)
    m, d = F.shape
    one = np.asarray(gpt.unit, float)
    # variables: t (free), mu (m), nu (m);  t1 - a = F^T mu,  t1 + a = F^T nu
    A = np.zeros((2 * d, 1 + 2 * m))
    A[:d, 0] = one
    A[:d, 1:1 + m] = -F.T
    A[d:, 0] = one
    A[d:, 1 + m:] = -F.T
    b = np.concatenate([a, -a])
    c = np.zeros(1 + 2 * m)
    c[0] = 1
    free = np.zeros(1 + 2 * m, bool)
    free[0] = True
    return float(solve(LpProblem(1 + 2 * m, c=c, A_eq=A, b_eq=b, free=free)).value)


def dual_ball_max(gpt: Gpt, x) -> float:
    """sup{|<a,x>| : ||a||_A <= 1}: the order interval [-1,1] as an LP."""
    gpt.require_polyhedral()
    x = np.asarray(x, float)
    G = np.asarray(gpt.states, float)
    u = G @ np.asarray(gpt.unit, float)
    d = gpt.dim
    # max <a,x> s.t. -u <= G a <= u, a free
    A_ub = np.vstack([G, -G])
    b_ub = np.concatenate([u, u])
    r = solve(LpProblem(d, c=-x, A_ub=A_ub, b_ub=b_ub, free=np.ones(d, bool)))
    return float(-r.value)


def in_state_cone(gpt: Gpt, x, tol: float = 1e-9) -> bool:
    x = np.asarray(x, float)
    if gpt.cone is None:
        return gpt.cs.vnorm(x[1:]) <= x[0] + tol
    return bool((np.asarray(gpt.cone.facets, float) @ x).min() >= -tol)


def in_effect_cone(gpt: Gpt, f, tol: float = 1e-9) -> bool:
    if gpt.cone is None:
        f = np.asarray(f, float)
        return gpt.cs.anorm(f[1:]) <= f[0] + tol
    vals = gpt.cone.generators @ (to_fraction_array(f) if gpt.exact and _is_exact(f) else np.asarray(f, float))
    if vals.dtype == object:
        return all(v >= 0 for v in vals)
    return bool(np.min(vals) >= -tol)


def _is_exact(f) -> bool:
    a = np.asarray(f, dtype=object)
    return all(isinstance(v, (Fraction, int, np.integer)) for v in a.ravel())


# ---- effects and measurements ---------------------------------------------

@dataclass(frozen=True, eq=False)
class Measurement:
    effects: np.ndarray  # k x dim

    def __post_init__(self):
        e = self.effects
        if not (isinstance(e, np.ndarray) and e.dtype == object):
            e = np.asarray(e, dtype=float)
        if e.ndim != 2 or e.shape[0] < 2:
            raise ValueError("a measurement needs k >= 2 effects")
        object.__setattr__(self, "effects", e)

    @property
    def k(self) -> int:
        return self.effects.shape[0]

    @property
    def exact(self) -> bool:
        return self.effects.dtype == object


@dataclass(frozen=True, eq=False)
class MeasurementFamily:
    measurements: tuple

    def __post_init__(self):
        ms = tuple(m if isinstance(m, Measurement) else Measurement(m) for m in self.measurements)
        if not ms:
            raise ValueError("empty family")
        if len({m.effects.shape[1] for m in ms}) != 1:
            raise ValueError("measurements live on different spaces")
        object.__setattr__(self, "measurements", ms)

    @property
    def k(self) -> tuple:
        return tuple(m.k for m in self.measurements)

    @property
    def g(self) -> int:
        return len(self.measurements)

    @property
    def dim(self) -> int:
        return self.measurements[0].effects.shape[1]

    @property
    def exact(self) -> bool:
        return all(m.exact for m in self.measurements)

    def __getitem__(self, i) -> Measurement:
        return self.measurements[i]

    def to_json(self) -> dict:
        return {"k": list(self.k), "effects": [m.effects.tolist() for m in self.measurements]}

    def with_exact(self, exact=True) -> "MeasurementFamily":
        conv = to_fraction_array if exact else (lambda e: np.asarray(e, dtype=float))
        return MeasurementFamily(tuple(Measurement(conv(m.effects)) for m in self.measurements))


def dichotomic_family(gpt: Gpt, effects) -> MeasurementFamily:
    """(f_i, 1 - f_i) for each effect f_i."""
    ms = []
    for f in effects:
        if gpt.exact and _is_exact(f):
            f = to_fraction_array(f)
            ms.append(Measurement(np.array([f, gpt.unit - f], dtype=object)))
        else:
            f = np.asarray(f, float)
            ms.append(Measurement(np.array([f, np.asarray(gpt.unit, float) - f])))
    return MeasurementFamily(tuple(ms))


def family_from_json(d: dict, exact: bool = False) -> MeasurementFamily:
    eff = d["effects"]
    k = d.get("k", [len(m) for m in eff])
    if len(k) != len(eff) or any(int(ki) != len(m) for ki, m in zip(k, eff)):
        raise ValueError("'k' does not match the effect lists")
    dt = object if exact else float
    return MeasurementFamily(tuple(
        Measurement(np.array([[parse_number(v, exact) for v in f] for f in m], dtype=dt)) for m in eff))


def validate_effect(gpt: Gpt, f, tol: float = 1e-9) -> bool:
    f = f if (isinstance(f, np.ndarray) and f.dtype == object) else np.asarray(f, float)
    if f.shape != (gpt.dim,):
        return False
    one = gpt.unit if f.dtype == object else np.asarray(gpt.unit, float)
    return in_effect_cone(gpt, f, tol) and in_effect_cone(gpt, one - f, tol)


def validate_measurement(gpt: Gpt, m: Measurement, tol: float = 1e-9) -> bool:
    if m.effects.shape[1] != gpt.dim:
        return False
    if not all(in_effect_cone(gpt, f, tol) for f in m.effects):
        return False
    s = m.effects.sum(axis=0)
    if m.exact and gpt.exact:
        return all(s == gpt.unit)
    return bool(np.abs(np.asarray(s, float) - np.asarray(gpt.unit, float)).max() <= tol)


def validate_family(gpt: Gpt, fam: MeasurementFamily, tol: float = 1e-9) -> bool:
    return all(validate_measurement(gpt, m, tol) for m in fam.measurements)


def add_noise(gpt: Gpt, m: Measurement, s) -> Measurement:
    """s f_j + (1 - s) 1/k."""
    if not (0 <= s <= 1):
        raise ValueError("noise parameter must lie in [0, 1]")
    k = m.k
    if m.exact and isinstance(s, (Fraction, int)):
        s = Fraction(s)
        unit = to_fraction_array(gpt.unit)
        return Measurement(np.array([[s * v + (1 - s) * u / k for v, u in zip(f, unit)]
                                     for f in m.effects], dtype=object))
    one = np.asarray(gpt.unit, float)
    return Measurement(float(s) * np.asarray(m.effects, float) + (1 - float(s)) * one / k)


def add_noise_family(gpt: Gpt, fam: MeasurementFamily, s) -> MeasurementFamily:
    s = list(s) if np.ndim(s) else [s] * fam.g
    if len(s) != fam.g:
        raise ValueError("one noise parameter per measurement")
    return MeasurementFamily(tuple(add_noise(gpt, m, si) for m, si in zip(fam.measurements, s)))


def trivial_family(gpt: Gpt, k) -> MeasurementFamily:
    one = np.asarray(gpt.unit, float)
    return MeasurementFamily(tuple(Measurement(np.tile(one / ki, (ki, 1))) for ki in k))


def random_state(gpt: Gpt, rng) -> np.ndarray:
    """Random convex combination of extreme states (normalised generators)."""
    if gpt.cone is None:
        v = rng.normal(size=gpt.dim - 1)
        v *= rng.random() ** (1 / (gpt.dim - 1)) / max(np.linalg.norm(v), 1e-300)
        return np.concatenate([[1.0], v])
    G = np.asarray(gpt.states, float)
    G = G / (G @ np.asarray(gpt.unit, float))[:, None]
    w = rng.dirichlet(np.ones(G.shape[0]) * 0.5)
    return w @ G


def random_measurement(gpt: Gpt, k: int, rng, sharpness: float | None = None) -> Measurement:
    """f_j = t a_j + (1 - tS) w_j, a_j random in A+, t the largest admissible scale."""
    gpt.require_polyhedral()
    F = np.asarray(gpt.effect_cone_generators, float)
    G = np.asarray(gpt.states, float)
    one = np.asarray(gpt.unit, float)
    a = np.zeros((k, gpt.dim))
    for j in range(k):
        nz = rng.integers(1, F.shape[0] + 1)
        idx = rng.choice(F.shape[0], size=nz, replace=False)
        a[j] = rng.exponential(size=nz) @ F[idx]
    S = a.sum(axis=0)
    t = np.min((G @ one) / np.maximum(G @ S, 1e-300))
    w = rng.dirichlet(np.ones(k))
    eff = t * a + np.outer(w, one - t * S)
    if sharpness is not None:
        eff = sharpness * eff + (1 - sharpness) * one / k
    return Measurement(eff)


def random_family(gpt: Gpt, k, rng, sharpness=None) -> MeasurementFamily:
    return MeasurementFamily(tuple(random_measurement(gpt, ki, rng, sharpness) for ki in k))


def extreme_effects(gpt: Gpt, nontrivial: bool = True, mod_relabel: bool = False) -> np.ndarray:
    """Vertices of the effect interval [0, 1] in A.

    ``nontrivial`` drops 0 and 1; ``mod_relabel`` keeps one of each pair {f, 1 - f}.
    """
    from .cones import polytope_vertices

    gpt.require_polyhedral()
    G = np.asarray(gpt.states, float)
    u = G @ np.asarray(gpt.unit, float)
    V = polytope_vertices(np.vstack([-G, G]), np.concatenate([np.zeros(len(u)), u]))
    one = np.asarray(gpt.unit, float)
    if nontrivial:
        V = np.array([v for v in V if not (np.allclose(v, 0) or np.allclose(v, one))]).reshape(-1, gpt.dim)
    if mod_relabel:
        kept = []
        for v in V:
            if not any(np.allclose(one - v, w) for w in kept):
                kept.append(v)
        V = np.array(kept).reshape(-1, gpt.dim)
    # deterministic order
    order = np.lexsort(np.round(V, 12).T[::-1]) if len(V) else []
    return V[order]
