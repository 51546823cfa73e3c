import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gptcompat.compat import is_compatible
from gptcompat.gpt import dichotomic_family, make_crosspolytope, make_hypercube, random_family
from gptcompat.tensor_norms import phi_bar_blocks, rho_dual_norm
from gptcompat.witness import (Witness, blind_region_member, evaluate, extract_witness,
                               extreme_witnesses, is_strict, is_witness, optimal_witness,
                               pi_norm, pi_prime_member, sample_witnesses)

SHARP = [[0.5, 0.5, 0], [0.5, 0, 0.5]]


def test_farkas_witness_on_sharp_pair():
    gpt = make_hypercube(2)
    w = extract_witness(gpt, SHARP)
    assert is_witness(gpt, w) is not None
    assert is_strict(gpt, w)
    assert evaluate(w, phi_bar_blocks(gpt, SHARP)) > 1
    d = w.to_json(gpt)
    assert set(d) == {"z0", "z", "strict", "pi_norm"}


def test_compatible_family_has_no_witness():
    gpt = make_hypercube(2)
    assert extract_witness(gpt, [[0.5, 0.25, 0], [0.5, 0, 0.25]]) is None


def test_optimal_witness_attains_rho():
    gpt = make_hypercube(2)
    w = optimal_witness(gpt, SHARP)
    assert is_witness(gpt, w) is not None
    assert evaluate(w, phi_bar_blocks(gpt, SHARP)) == pytest.approx(2)
    assert pi_norm(gpt, w) == pytest.approx(2)


@settings(derandomize=True, max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sampled_witnesses_are_witnesses_on_boundary(seed):
    gpt = make_crosspolytope(2)
    for w in sample_witnesses(gpt, 2, 3, np.random.default_rng(seed)):
        assert is_witness(gpt, w, tol=1e-8) is not None
        assert rho_dual_norm(gpt, w.z) <= 1 + 1e-8


@settings(derandomize=True, max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_witness_soundness_random(seed):
    gpt = make_hypercube(2)
    rng = np.random.default_rng(seed)
    effs = [m.effects[0] for m in random_family(gpt, (2, 2, 2), rng).measurements]
    w = extract_witness(gpt, effs)
    compatible = is_compatible(gpt, dichotomic_family(gpt, effs)).compatible
    assert (w is None) == compatible
    if w is not None:
        assert is_witness(gpt, w) is not None
        assert evaluate(w, phi_bar_blocks(gpt, effs)) > 1


def test_not_a_witness():
    gpt = make_hypercube(2)
    bad = Witness(np.array([[0, 2.0, 0]]))
    assert is_witness(gpt, bad) is None
    with pytest.raises(ValueError):
        is_strict(gpt, bad)
    with pytest.raises(ValueError):
        evaluate(bad, np.zeros((2, 3)))


def test_blind_region_equals_compat_region():
    gpt = make_hypercube(2)
    W = extreme_witnesses(gpt, 2)
    inside = blind_region_member(gpt, [0.5, 0.5], W)
    assert inside.exact and inside.sampled
    outside = blind_region_member(gpt, [0.6, 0.6], W)
    assert not outside.exact and not outside.sampled and outside.violating is not None


def test_pi_prime_member():
    nrm = lambda v: float(np.abs(v).max())
    cands = [np.eye(2)]
    assert pi_prime_member(nrm, [0.5, 0.5], cands)
    assert not pi_prime_member(nrm, [0.6, 0.6], cands)
