from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gptcompat.lp import LpNumericalError, LpProblem, lp_feasible, solve, to_fraction_array

linprog = pytest.importorskip("scipy.optimize").linprog


def _scipy(c, Ae, be, Au, bu):
    return linprog(c, A_ub=Au, b_ub=bu, A_eq=Ae, b_eq=be, bounds=[(0, None)] * len(c), method="highs")


@settings(derandomize=True, max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5), st.integers(1, 5), st.integers(2, 8))
def test_matches_scipy_oracle(seed, me, mu, n):
    r = np.random.default_rng(seed)
    Ae = r.integers(-3, 4, (me, n)).astype(float)
    be = r.integers(-3, 4, me).astype(float)
    Au = r.integers(-3, 4, (mu, n)).astype(float)
    bu = r.integers(0, 5, mu).astype(float)
    c = r.integers(-3, 4, n).astype(float)
    ref = _scipy(c, Ae, be, Au, bu)
    mine = solve(LpProblem(n, c, Ae, be, Au, bu))
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert mine.status == expected
    if expected == "optimal":
        assert mine.value == pytest.approx(ref.fun, abs=1e-7)


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_farkas_certificate_separates(seed):
    r = np.random.default_rng(seed)
    A = r.integers(-2, 3, (4, 6)).astype(float)
    b = r.integers(-4, 5, 4).astype(float)
    cert = lp_feasible(LpProblem(6, A_eq=A, b_eq=b))
    if cert.feasible:
        assert np.allclose(A @ cert.x, b) and cert.x.min() >= -1e-9
    else:
        assert (A.T @ cert.y_eq).min() >= -1e-9
        assert b @ cert.y_eq < 0


def test_exact_mode_matches_float():
    r = np.random.default_rng(7)
    for _ in range(20):
        A = r.integers(-3, 4, (3, 5))
        b = r.integers(-3, 4, 3)
        c = r.integers(-2, 3, 5)
        f = solve(LpProblem(5, c, A, b))
        e = solve(LpProblem(5, c, A, b, exact=True))
        assert f.status == e.status
        if e.status == "optimal":
            assert isinstance(e.value, Fraction)
            assert float(e.value) == pytest.approx(f.value, abs=1e-9)
            assert all(isinstance(v, Fraction) for v in e.x)


def test_exact_infeasible_certificate_is_rational():
    A = to_fraction_array([[1, 1], [1, 1]])
    cert = solve(LpProblem(2, A_eq=A, b_eq=[Fraction(1), Fraction(2)], exact=True))
    assert cert.status == "infeasible"
    ye = cert.y_eq
    assert all((A.T @ ye) >= 0) and (ye @ np.array([1, 2])) < 0


def test_beale_cycling_example_terminates():
    # classic degenerate LP that cycles under the largest-coefficient rule
    c = np.array([-0.75, 150, -0.02, 6, 0, 0, 0])
    A = np.array([[0.25, -60, -0.04, 9, 1, 0, 0],
                  [0.5, -90, -0.02, 3, 0, 1, 0],
                  [0, 0, 1, 0, 0, 0, 1]])
    b = np.array([0, 0, 1.0])
    r = solve(LpProblem(7, c, A, b))
    assert r.status == "optimal"
    assert r.value == pytest.approx(-0.05)


def test_free_variables_and_inequalities():
    # min x + y, x free, x >= -2 via ub row, y >= 0, x + y >= 1
    r = solve(LpProblem(2, [1, 2], A_ub=[[-1, 0], [-1, -1]], b_ub=[2, -1], free=[True, False]))
    assert r.status == "optimal" and r.value == pytest.approx(1.0)


def test_unbounded():
    r = solve(LpProblem(2, [-1, 0], A_ub=[[0, 1]], b_ub=[1]))
    assert r.status == "unbounded"


def test_iteration_cap_raises():
    c = np.array([-1.0, -1, -1])
    A = np.array([[1.0, 2, 3], [3, 1, 2]])
    with pytest.raises(LpNumericalError):
        solve(LpProblem(3, c, A_ub=A, b_ub=[4, 5]), max_iter=0)


def test_bad_dimensions():
    with pytest.raises(ValueError):
        solve(LpProblem(2, [1, 2, 3]))
