import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gptcompat.compat import (euclidean_pair_gamma, gamma_model, gamma_of_family, is_compatible,
                              is_compatible_projected, is_compatible_via_extension,
                              marginals_of_joint, model_region_membership, region_membership,
                              symmetrization_lift, worst_case_tuples)
from gptcompat.gpt import (dichotomic_family, in_effect_cone, make_ball, make_classical,
                           make_crosspolytope, make_hypercube, random_family, trivial_family)
from gptcompat.spectra import df_member

linprog = pytest.importorskip("scipy.optimize").linprog

SHARP = [[0.5, 0.5, 0], [0.5, 0, 0.5]]


def oracle_compatible(gpt, fam):
    """Independent formulation: joint effects as free vectors, positivity on extreme states."""
    k = fam.k
    d = gpt.dim
    kappas = list(np.ndindex(*k))
    K = len(kappas)
    S = np.asarray(gpt.states, float)
    A_eq, b_eq = [], []
    for i, m in enumerate(fam.measurements):
        for j in range(m.k):
            for c in range(d):
                row = np.zeros(K * d)
                for r, kap in enumerate(kappas):
                    if kap[i] == j:
                        row[r * d + c] = 1
                A_eq.append(row)
                b_eq.append(m.effects[j][c])
    A_ub = np.zeros((K * len(S), K * d))
    for r in range(K):
        A_ub[r * len(S):(r + 1) * len(S), r * d:(r + 1) * d] = -S
    res = linprog(np.zeros(K * d), A_ub=A_ub, b_ub=np.zeros(len(A_ub)), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(None, None)] * (K * d), method="highs")
    return res.status == 0


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 2), (2, 3), (3, 3), (2, 2, 2)]),
       st.sampled_from(["HC2", "X2", "CM3"]), st.floats(0.3, 1.0))
def test_joint_lp_matches_independent_oracle(seed, k, name, sharp):
    gpt = {"HC2": make_hypercube(2), "X2": make_crosspolytope(2), "CM3": make_classical(3)}[name]
    fam = random_family(gpt, k, np.random.default_rng(seed), sharpness=sharp)
    r = is_compatible(gpt, fam)
    assert r.compatible == oracle_compatible(gpt, fam)
    assert r.compatible == is_compatible_via_extension(gpt, fam).compatible
    assert r.compatible == is_compatible_projected(gpt, fam).compatible


def test_joint_is_a_valid_joint_measurement(rng):
    gpt = make_hypercube(2)
    fam = random_family(gpt, (2, 3), rng, sharpness=0.4)
    r = is_compatible(gpt, fam)
    assert r.compatible
    for h in r.joint:
        assert in_effect_cone(gpt, h, 1e-9)
    for marg, m in zip(marginals_of_joint(r.joint, fam.k), fam.measurements):
        assert np.allclose(marg, m.effects, atol=1e-9)


def test_classical_always_compatible(rng):
    gpt = make_classical(3)
    for _ in range(10):
        assert is_compatible(gpt, random_family(gpt, (3, 2, 2), rng)).compatible


def test_trivial_and_single_measurements(model, rng):
    assert is_compatible(model, trivial_family(model, (2, 3))).compatible
    assert is_compatible(model, random_family(model, (3,), rng)).compatible


def test_sharp_pair_and_farkas_pairing():
    gpt = make_hypercube(2)
    fam = dichotomic_family(gpt, SHARP)
    r = is_compatible(gpt, fam)
    assert not r.compatible
    z0, zs = r.jewel_point
    assert z0 @ gpt.unit == pytest.approx(1)
    # the jewel point lies in the jewel but outside D_f
    from gptcompat.spectra import SpectraPoint, jewel_member
    pt = SpectraPoint(z0, zs)
    assert jewel_member(fam.k, gpt, pt) and not df_member(gpt, fam, pt)


def test_exact_mode_agrees():
    gpt = make_hypercube(2)
    h = Fraction(1, 2)
    for s in (Fraction(1, 2), Fraction(51, 100)):
        fam = dichotomic_family(gpt, [[h, s / 2, 0], [h, 0, s / 2]]).with_exact(True)
        r = is_compatible(gpt, fam, exact=True)
        assert r.compatible == (s <= h)
        assert r.compatible == is_compatible_via_extension(gpt, fam, exact=True).compatible
        if r.compatible:
            assert all(isinstance(v, Fraction) for v in r.joint.ravel())


def test_region_membership_monotone(rng):
    gpt = make_hypercube(2)
    fam = dichotomic_family(gpt, SHARP)
    grid = np.linspace(0, 1, 6)
    inside = {s: region_membership(gpt, fam, s) for s in itertools.product(grid, repeat=2)}
    for (a, b), v in inside.items():
        if v:
            for (c, d), w in inside.items():
                if c <= a and d <= b:
                    assert w
    with pytest.raises(ValueError):
        region_membership(gpt, fam, [1.2, 0])


def test_gamma_of_family_sharp_pair():
    gpt = make_hypercube(2)
    assert gamma_of_family(gpt, dichotomic_family(gpt, SHARP)) == pytest.approx(0.5, abs=1e-6)
    assert gamma_of_family(gpt, trivial_family(gpt, (2, 2))) == 1.0


def test_model_region_and_gamma_model():
    gpt = make_hypercube(2)
    assert len(worst_case_tuples(gpt, 2)) == 3
    assert model_region_membership(gpt, [1, 0])
    assert model_region_membership(gpt, [0.5, 0.5])
    assert not model_region_membership(gpt, [0.6, 0.5])
    iv = gamma_model(gpt, 2, budget=10)
    assert iv.lower <= iv.upper and iv.upper == pytest.approx(0.5)
    a = gamma_model(gpt, 2, budget=12, seed=5)
    b = gamma_model(gpt, 2, budget=12, seed=5)
    assert a == b
    ball = gamma_model(make_ball(3), 2)
    assert ball.lower <= ball.upper


def test_symmetrization_lift_and_pair_formula():
    assert symmetrization_lift([1, Fraction(1, 2)], [3, 2]) == (Fraction(1, 4), Fraction(1, 2))
    assert euclidean_pair_gamma([1, 0, 0], [0, 1, 0]) == pytest.approx(2 ** -0.5, abs=1e-12)
    assert euclidean_pair_gamma([0.3, 0.4], [0.3, 0.4]) == 1.0
    with pytest.raises(ValueError):
        euclidean_pair_gamma([1, 0], [0, 1], gpt=make_hypercube(2))
