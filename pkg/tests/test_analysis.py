import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import instances
from tave import analysis
from tave.analysis import (
    Property,
    Verdict,
    condition_report,
    copositivity_value,
    estimate_lambda,
    falsify_structure,
    fixed_point_condition,
    lambda_on_grid,
    p_tensor_value,
    phi,
    solution_bounds,
    sphere_grid,
    zero_residual,
)
from tave.solver import SolverConfig, solve, solve_multistart
from tave.tensor_core import contract_to_vector, semi_symmetrize, unit_tensor


# -- fixed-point existence condition ------------------------------------------

def test_fixed_point_holds_on_constructed_instances():
    for seed in range(5):
        P, _ = instances.fixed_point_instance(seed)
        fp = fixed_point_condition(P.A, P.B)
        assert fp.applicable and fp.left_inverse_exists and fp.holds
        assert fp.g_inf_norm == pytest.approx(0.5, rel=1e-12)


def test_fixed_point_unit_pair():
    # A = I, B = 0.3 I: M(A)^{-1} . B = 0.3 I with inf-norm 0.3
    fp = fixed_point_condition(unit_tensor(4, 3), 0.3 * unit_tensor(4, 3))
    assert fp.holds and fp.g_inf_norm == pytest.approx(0.3)


@pytest.mark.parametrize("A, B, reason", [
    (np.ones((2, 2, 2)), np.ones((2, 2, 2)), "even orders"),
    (np.ones((2,) * 4), np.ones((2,) * 4), "row diagonal"),
    (0 * unit_tensor(4, 2).array, np.ones((2,) * 4), "singular"),
])
def test_fixed_point_not_applicable(A, B, reason):
    fp = fixed_point_condition(A, B)
    assert not fp.holds and reason in fp.reason


def test_fixed_point_fails_for_large_b():
    fp = fixed_point_condition(unit_tensor(4, 2), 2 * unit_tensor(4, 2))
    assert fp.left_inverse_exists and not fp.holds and fp.g_inf_norm == pytest.approx(2.0)


def test_fixed_point_instances_are_solvable():
    for seed in range(5):
        P, radius = instances.fixed_point_instance(seed)
        rep, _ = solve_multistart(P, SolverConfig(), restarts=10, radius=radius, seed=seed)
        assert rep.converged


# -- lambda --------------------------------------------------------------------

def test_lambda_of_unit_tensor():
    # ||x^{[2]}||^2 = sum x_i^4 is minimized at the uniform direction: 1/n
    lam, x = estimate_lambda(unit_tensor(3, 3))
    assert lam == pytest.approx(1 / 3, rel=1e-8)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    grid, _ = lambda_on_grid(unit_tensor(3, 3))
    assert grid == pytest.approx(1 / 3, abs=1e-3)


def test_lambda_of_identity_matrix():
    lam, _ = estimate_lambda(np.eye(4))
    assert lam == pytest.approx(1.0)


def test_lambda_of_matrix_is_smallest_squared_singular_value():
    M = np.random.default_rng(0).normal(size=(4, 4))
    lam, _ = estimate_lambda(M)
    assert lam == pytest.approx(np.linalg.svd(M, compute_uv=False)[-1] ** 2, rel=1e-8)


@pytest.mark.parametrize("seed", range(8))
def test_lambda_multistart_vs_grid(seed):
    rng = np.random.default_rng(seed)
    n, p = 2 + seed % 2, 3 + seed % 2
    A = semi_symmetrize(rng.uniform(-1, 1, (n,) * p))
    lam, x = estimate_lambda(A, seed=seed)
    assert phi(A, x) == pytest.approx(lam)
    coarse, _ = lambda_on_grid(A, 10_000)
    fine, _ = lambda_on_grid(A, 400_000)
    assert lam <= coarse + 1e-3
    assert lam >= fine - 1e-3


def test_lambda_is_seed_deterministic():
    A = np.random.default_rng(1).normal(size=(4, 4, 4))
    assert estimate_lambda(A, seed=3)[0] == estimate_lambda(A, seed=3)[0]


def test_sphere_grid():
    for n in (1, 2, 3):
        X = sphere_grid(n, 500)
        np.testing.assert_allclose(np.linalg.norm(X, axis=1), 1.0)
    with pytest.raises(ValueError):
        sphere_grid(4)


# -- bounds --------------------------------------------------------------------

def test_lower_bound_scalar_case():
    # n = 1, A = [[1]], B = 0: x = b exactly and lower = |b|
    upper, lower = solution_bounds(np.eye(1), np.zeros((1, 1)), np.array([2.5]), 0.0, 1.0)
    assert lower == pytest.approx(2.5) and upper == pytest.approx(2.5)


def test_lower_bound_identity_matrix():
    # ||I||_F = sqrt(n)
    b = np.array([3.0, 4.0])
    _, lower = solution_bounds(np.eye(2), np.zeros((2, 2)), b, 0.0, 1.0)
    assert lower == pytest.approx(5.0 / math.sqrt(2))


def test_upper_bound_absent_when_b_too_large():
    upper, _ = solution_bounds(np.eye(2), 2 * np.eye(2), np.ones(2), 0.0, 1.0)
    assert upper is None


def test_bounds_need_equal_orders():
    with pytest.raises(ValueError, match="p == q"):
        solution_bounds(np.eye(2), np.ones((2, 2, 2)), np.ones(2), 0.0, 1.0)


@pytest.mark.parametrize("seed", range(6))
def test_bounds_sandwich(seed):
    P, _, lam = instances.bounds_instance(seed)
    rep = solve(P)
    assert rep.converged
    upper, lower = solution_bounds(P.A, P.B, P.b, 1e-5, lam)
    assert lower <= np.linalg.norm(rep.x_final) <= upper + 1e-9


def test_condition_report():
    P, _, _ = instances.bounds_instance(0)
    rep = condition_report(P.A, P.B, P.b)
    assert rep.lambda_method == "grid"
    assert rep.upper_bound is not None and rep.lower_bound < rep.upper_bound
    d = rep.to_dict()
    assert d["fixed_point_condition_holds"] is False and d["notes"]
    P4, _ = instances.fixed_point_instance(1)
    rep4 = condition_report(P4.A, P4.B, P4.b, budget=5)
    assert rep4.fixed_point_condition_holds and rep4.left_inverse_exists
    assert rep4.g_inf_norm < 1
    assert rep4.lambda_method == "multistart"


# -- falsifiers ----------------------------------------------------------------

@pytest.mark.parametrize("name, prop", [
    ("copositive", Property.STRICTLY_COPOSITIVE),
    ("p-tensor", Property.P_TENSOR),
    ("H+", Property.H_PLUS),
    ("wh_plus", Property.WH_PLUS),
    ("Nonsingular", Property.NONSINGULAR),
    ("PairHPlus", Property.PAIR_H_PLUS),
])
def test_property_parse(name, prop):
    assert Property.parse(name) is prop


def test_property_parse_unknown():
    with pytest.raises(ValueError, match="unknown property"):
        Property.parse("bogus")


def test_copositivity_falsified_on_example_matrix():
    A = instances.example_matrix()
    v = falsify_structure(A, "copositive")
    assert v.verdict is Verdict.FALSIFIED and v.falsified
    np.testing.assert_array_equal(v.witness_x, [0.0, 1.0])
    assert v.value == -2.0
    # scaling the witness to (0, 4) gives the value -32
    assert copositivity_value(A, 4 * v.witness_x) == -32.0
    assert v.to_dict()["certificate"] is False


def test_example_matrix_other_properties():
    A = instances.example_matrix()
    h = falsify_structure(A, Property.H_PLUS, samples=20)
    assert h.falsified
    assert np.linalg.norm(zero_residual(A, h.witness_x, h.witness_t)) <= 1e-8
    # -1 is not an eigenvalue but 3 is: (A + 3I) has a kernel
    assert h.witness_t == pytest.approx(3.0, abs=1e-6)
    assert not falsify_structure(A, Property.WH_PLUS, samples=20).falsified
    assert not falsify_structure(A, Property.NONSINGULAR, samples=20).falsified


def test_identity_is_not_falsified_as_p_tensor():
    for samples in (10, 200):
        assert not falsify_structure(np.eye(3), Property.P_TENSOR, samples=samples).falsified


def test_h_plus_example():
    A = instances.example_h_plus()
    assert not falsify_structure(A, Property.H_PLUS, samples=40).falsified
    v = falsify_structure(A, Property.P_TENSOR)
    assert v.falsified and p_tensor_value(A, v.witness_x) <= 0


def test_pair_h_plus_example():
    A = np.zeros((2,) * 4)
    A[1, 0, 0, 0] = 1.0
    A[0, 1, 1, 1] = -2.0
    B = np.zeros((2,) * 4)
    B[0, 0, 0, 0] = -1.0
    B[1, 1, 1, 1] = 1.0
    v = falsify_structure(A, Property.PAIR_H_PLUS, samples=30, B=B)
    assert not v.falsified and v.value > 0.1
    with pytest.raises(ValueError, match="needs the second tensor"):
        falsify_structure(A, Property.PAIR_H_PLUS)


def test_pair_h_plus_falsified_when_b_cancels_a():
    # B = -A on the nonnegative orthant leaves (tI) x^{p-1}; t = 0 gives a root
    A = unit_tensor(3, 2).array
    v = falsify_structure(A, Property.PAIR_H_PLUS, samples=10, B=-A)
    assert v.falsified
    assert np.linalg.norm(zero_residual(A, v.witness_x, v.witness_t, -A)) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(2, 3), st.integers(0, 2**32 - 1),
       st.sampled_from(list(Property)[:5]))
def test_falsified_witnesses_recheck(m, n, seed, prop):
    A = np.random.default_rng(seed).uniform(-1, 1, (n,) * m)
    v = falsify_structure(A, prop, samples=10, seed=seed)
    assert v.samples_used >= 1
    if not v.falsified:
        assert v.witness_x is None
        return
    x = v.witness_x
    if prop is Property.STRICTLY_COPOSITIVE:
        assert np.all(x >= 0) and copositivity_value(A, x) <= 0
    elif prop is Property.P_TENSOR:
        assert p_tensor_value(A, x) <= 0
    else:
        assert np.linalg.norm(x) == pytest.approx(1.0)
        assert v.witness_t is None or v.witness_t >= 0
        assert np.linalg.norm(zero_residual(A, x, v.witness_t or 0.0)) <= 1e-8
        if prop is Property.WH_PLUS:
            assert np.all(x >= -1e-12)


def test_falsifier_budget_validation():
    with pytest.raises(ValueError):
        falsify_structure(np.eye(2), "copositive", samples=0)


def test_strict_copositivity_boundary():
    # x^T A x = x1 x2 is zero at the vertices: copositive but not strictly
    A = np.array([[0.0, 0.5], [0.5, 0.0]])
    assert falsify_structure(A, "copositive").falsified
    assert not falsify_structure(np.eye(2), "copositive").falsified


def test_t_grid():
    assert analysis.T_GRID[0] == 0.0 and len(analysis.T_GRID) == 26
    assert analysis.T_GRID[1] == pytest.approx(1e-3) and analysis.T_GRID[-1] == pytest.approx(1e3)


def test_form_values_match_definitions():
    A = np.random.default_rng(2).normal(size=(3, 3, 3))
    x = np.array([0.2, -0.5, 1.0])
    y = contract_to_vector(A, x)
    assert copositivity_value(A, x) == pytest.approx(x @ y)
    assert p_tensor_value(A, x) == pytest.approx(np.max(x * y))
