import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbgp.assembly import Assembler
from tbgp.basis import QuadratureRule, build_tensor_basis
from tbgp.scalars import Dual, value_of
from tbgp.models import CstrNondimModel, FunctionModel, reduced_steady_residual
from tbgp.solvers import (
    RNG_ALGORITHM,
    ContinuationOptions,
    NewtonError,
    NewtonOptions,
    NodeSolveError,
    SgSolution,
    UniformParameter,
    adjoint_sensitivity,
    arclength_continuation,
    bdf_integrate,
    cost_ratio,
    forward_sensitivity,
    histogram,
    is_stable,
    min_abs_eigenvalue,
    newton_solve,
    nisp_project,
    observed_order,
    sample_surrogate,
    sg_block_jacobian,
    sg_newton_solve,
    sg_parameter_coeffs,
    stability_eigenvalues,
    tangent_at,
    turning_point_continuation,
    turning_point_solve,
)

from conftest import FOLD_B, FOLD_BETA

TIGHT = NewtonOptions(atol=1e-14, rtol=0.0, max_iters=50)


def scalar_model(fn, x0=0.0, p0=()):
    return FunctionModel(lambda xd, x, p: [fn(x[0], p)], n=1, m=len(p0), x0=[x0], p0=list(p0))


def fold_model():
    return CstrNondimModel(D=0.05, B=FOLD_B, beta=FOLD_BETA)


def steady_roots(D=0.05):
    xs = np.linspace(0.0, 1.0, 10_001)
    h = reduced_steady_residual(xs, D, FOLD_B, FOLD_BETA)
    idx = np.flatnonzero(np.sign(h[1:]) != np.sign(h[:-1]))
    return [np.array([xs[i], FOLD_B * xs[i] / (1 + FOLD_BETA)]) for i in idx]


# -- Newton ---------------------------------------------------------------------


def test_newton_quadratic_convergence():
    res = newton_solve(scalar_model(lambda x, p: x * x - 4.0, 3.0), [3.0], [], TIGHT)
    assert res.converged and res.x[0] == 2.0
    errs = [abs(x[0] - 2.0) for x in res.iterates if abs(x[0] - 2.0) > 0]
    ratios = [b / a ** 2 for a, b in zip(errs[:-1], errs[1:])]
    assert max(ratios) < 1.0


def test_newton_linear_problem_one_iteration():
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    b = np.array([1.0, -1.0])
    model = FunctionModel(lambda xd, x, p: list(A @ np.array(x, dtype=object) - b), n=2, m=0)
    res = newton_solve(model, [0.0, 0.0], [], TIGHT)
    assert res.iterations == 1
    np.testing.assert_allclose(A @ res.x, b, atol=1e-15)


def test_newton_finds_three_distinct_roots():
    model = fold_model()
    roots = [newton_solve(model, g.round(2), model.p0).x for g in steady_roots()]
    assert len(roots) == 3
    for i in range(3):
        assert np.max(np.abs(Assembler(model).residual(roots[i], model.p0))) <= 1e-10
        for j in range(i):
            assert np.linalg.norm(roots[i] - roots[j]) > 0.1


def test_newton_error_reasons():
    model = scalar_model(lambda x, p: x * x + 1.0, 0.0)
    with pytest.raises(NewtonError) as err:
        newton_solve(model, [0.0], [])
    assert err.value.reason == "singular"
    with pytest.raises(NewtonError) as err:
        newton_solve(model, [0.5], [], NewtonOptions(max_iters=5))
    assert err.value.reason == "max_iterations"
    assert len(err.value.result.residual_norms) >= 5
    with pytest.raises(NewtonError) as err:
        newton_solve(scalar_model(lambda x, p: math.inf * x + 1.0), [1.0], [])
    assert err.value.reason == "non_finite"


def test_line_search_rescues_overshoot():
    model = scalar_model(lambda x, p: math.atan(x) if isinstance(x, float) else _atan(x), 3.0)
    with pytest.raises(NewtonError):
        newton_solve(model, [3.0], [], NewtonOptions(max_iters=30))
    res = newton_solve(model, [3.0], [], NewtonOptions(line_search=True, max_iters=30))
    assert abs(res.x[0]) <= 1e-10


def _atan(x):
    # d/dx atan = 1 / (1 + x^2)
    v = value_of(x)
    if isinstance(x, Dual):
        return Dual(math.atan(v), x.derivs * (1.0 / (1.0 + v * v)))
    return math.atan(v)


def test_newton_options_validated():
    with pytest.raises(ValueError):
        NewtonOptions(atol=0.0)


# -- sensitivities ----------------------------------------------------------------


def test_sensitivity_of_identity_map():
    model = scalar_model(lambda x, p: x - p[0], 0.0, [2.0])
    assert forward_sensitivity(model, [2.0], [2.0]).ds_dp[0, 0] == 1.0


def test_sensitivity_of_square():
    model = scalar_model(lambda x, p: x - p[0] * p[0], 0.0, [3.0])
    fwd = forward_sensitivity(model, [9.0], [3.0])
    adj = adjoint_sensitivity(model, [9.0], [3.0])
    assert fwd.ds_dp[0, 0] == 6.0 == adj.ds_dp[0, 0]


def test_solve_counts_for_one_response_three_parameters():
    model = FunctionModel(lambda xd, x, p: [x[0] - p[0] * p[1], x[1] - p[2]], n=2, m=3, p0=[1.0, 2.0, 3.0],
                          response_fn=lambda x, p: [x[0] + x[1]])
    x = [2.0, 3.0]
    fwd = forward_sensitivity(model, x, model.p0)
    adj = adjoint_sensitivity(model, x, model.p0)
    assert (fwd.solves, adj.transpose_solves, adj.solves) == (3, 1, 0)
    np.testing.assert_allclose(adj.ds_dp, fwd.ds_dp, rtol=1e-15)
    np.testing.assert_allclose(fwd.ds_dp, [[2.0, 1.0, 1.0]])


def test_low_branch_sensitivity_matches_fd_around_solver():
    model = fold_model()
    k = model.param_index("D")
    x = newton_solve(model, steady_roots()[0], model.p0, TIGHT).x
    fwd = forward_sensitivity(model, x, model.p0, [k]).dx_dp[:, 0]
    h = 1e-7
    pp, pm = model.p0.copy(), model.p0.copy()
    pp[k] += h
    pm[k] -= h
    fd = (newton_solve(model, x, pp, TIGHT).x - newton_solve(model, x, pm, TIGHT).x) / (2 * h)
    np.testing.assert_allclose(fwd, fd, rtol=1e-6)


def test_full_model_sensitivities_agree(full):
    idx = [full.param_index(n) for n in ("F", "T_f", "k0")]
    x = newton_solve(full, [0.5, 310.0], full.p0, NewtonOptions(atol=1e-11, rtol=0.0)).x
    fwd = forward_sensitivity(full, x, full.p0, idx)
    adj = adjoint_sensitivity(full, x, full.p0, idx)
    np.testing.assert_allclose(adj.ds_dp, fwd.ds_dp, rtol=1e-10, atol=1e-14)


# -- stability ---------------------------------------------------------------------


def test_linear_decay_eigenvalue():
    model = FunctionModel(lambda xd, x, p: [xd[0] + x[0]], n=1, m=0)
    ev = stability_eigenvalues(model, [0.0], [])
    np.testing.assert_allclose(ev.values, [-1.0])
    assert ev.stable


def test_middle_branch_unstable_outer_branches_stable():
    model = fold_model()
    roots = [newton_solve(model, g, model.p0).x for g in steady_roots()]
    assert [is_stable(model, r, model.p0) for r in roots] == [True, False, True]


def test_middle_branch_instability_shows_in_time():
    model = fold_model()
    mid = newton_solve(model, steady_roots()[1], model.p0, TIGHT).x
    tr = bdf_integrate(model, mid + [1e-4, 0.0], model.p0, (0.0, 10.0), 0.05, 2)
    assert np.linalg.norm(tr.x[-1] - mid) > 0.1


# -- continuation -----------------------------------------------------------------------


def test_linear_continuation_is_straight():
    model = scalar_model(lambda x, p: x - p[0], 0.0, [0.0])
    opts = ContinuationOptions(ds=0.1, ds_max=0.1, lam_min=0.0, lam_max=1.0)
    res = arclength_continuation(model, [0.0], [0.0], 0, opts, tag_stability=False)
    assert res.status == "complete" and len(res.points) > 5
    for pt in res.points:
        assert abs(pt.x[0] - pt.lam) <= 1e-12
        assert pt.newton_iters <= 2
    assert res.lams[-1] <= 1.0


@pytest.fixture(scope="module")
def s_curve():
    model = CstrNondimModel(D=0.01, B=FOLD_B, beta=FOLD_BETA)
    k = model.param_index("D")
    x0 = newton_solve(model, model.x0, model.p0).x
    opts = ContinuationOptions(ds=0.02, ds_max=0.1, lam_min=0.0, lam_max=0.12, max_steps=400)
    return model, k, opts, arclength_continuation(model, x0, model.p0, k, opts)


def test_s_curve_points_reconverge(s_curve):
    model, k, _, res = s_curve
    asm = Assembler(model)
    for pt in res.points:
        p = model.p0.copy()
        p[k] = pt.lam
        x = newton_solve(asm, pt.x, p, TIGHT).x
        assert np.max(np.abs(x - pt.x)) <= 1e-10


def test_s_curve_stability_flips_at_folds(s_curve):
    _, _, _, res = s_curve
    a, b = res.folds
    flags = [pt.stable for pt in res.points]
    assert all(flags[:a]) and not any(flags[a + 1:b]) and all(flags[b + 1:])


def test_restart_reproduces_remaining_curve(s_curve):
    model, k, opts, res = s_curve
    j = len(res.points) // 3
    again = arclength_continuation(model, None, model.p0, k, opts, restart=res.restart_state(j))
    tail = res.points[j:]
    n = min(len(tail), len(again.points))
    assert n > 5
    for a, b in zip(tail[:n], again.points[:n]):
        assert abs(a.lam - b.lam) <= 1e-8
        assert np.max(np.abs(a.x - b.x)) <= 1e-8


def test_continuation_options_validated():
    with pytest.raises(ValueError):
        ContinuationOptions(ds=1.0, ds_max=0.5)


# -- folds ---------------------------------------------------------------------------------


def test_normal_form_fold():
    model = scalar_model(lambda x, p: p[0] - x * x, 0.4, [0.1])
    fold = turning_point_solve(model, [0.4], [0.1], 0)
    assert abs(fold.x[0]) <= 1e-10 and abs(fold.value) <= 1e-10


def test_fold_second_derivative_routes_agree(s_curve):
    model, k, _, res = s_curve
    i = res.folds[0]
    p = model.p0.copy()
    p[k] = res.points[i].lam
    t = tangent_at(res, i)
    ad = turning_point_solve(model, res.points[i].x, p, k, tangent=t)
    fd = turning_point_solve(model, res.points[i].x, p, k, tangent=t, second_derivs="fd",
                             opts=NewtonOptions(atol=1e-10, rtol=0.0, max_iters=40))
    assert abs(ad.value - fd.value) <= 1e-7
    np.testing.assert_allclose(ad.x, fd.x, atol=1e-7)


def test_cstr_fold_certificates(s_curve):
    model, k, _, res = s_curve
    for i in res.folds:
        p = model.p0.copy()
        p[k] = res.points[i].lam
        fold = turning_point_solve(model, res.points[i].x, p, k, tangent=tangent_at(res, i))
        _, J = Assembler(model).jacobian(fold.x, fold.p)
        assert abs(fold.sigma) <= 1e-8 and min_abs_eigenvalue(J) <= 1e-6
        assert min(abs(stability_eigenvalues(model, fold.x, fold.p).values.real)) <= 1e-6


def test_fold_locus_independent_of_inert_parameter():
    model = FunctionModel(lambda xd, x, p: [p[0] - x[0] * x[0] + 0.0 * p[1]], n=1, m=2, p0=[0.0, 0.0])
    fold = turning_point_solve(model, [0.3], [0.0, 0.0], 0)
    res = turning_point_continuation(model, fold, 1, ContinuationOptions(ds=0.1, ds_max=0.1, max_steps=10))
    for pt in res.points:
        assert abs(pt.x[0]) <= 1e-6 and abs(pt.x[1]) <= 1e-10


def test_cstr_fold_curve_points_reconverge(s_curve):
    model, k, _, res = s_curve
    i = res.folds[0]
    p = model.p0.copy()
    p[k] = res.points[i].lam
    fold = turning_point_solve(model, res.points[i].x, p, k, tangent=tangent_at(res, i))
    kb = model.param_index("B")
    opts = ContinuationOptions(ds=0.05, ds_max=0.2, max_steps=12)
    curve = turning_point_continuation(model, fold, kb, opts)
    assert len(curve.points) == 13
    for pt in curve.points[1:]:
        q = fold.p.copy()
        q[k], q[kb] = pt.x[-1], pt.lam
        again = turning_point_solve(model, pt.x[:-1], q, k, a=fold.a, b=fold.b)
        assert abs(again.value - pt.x[-1]) <= 1e-8
        assert abs(again.sigma) <= 1e-8


def test_fold_needs_distinct_parameters():
    model = scalar_model(lambda x, p: p[0] - x * x, 0.4, [0.0, 0.0])
    fold = turning_point_solve(model, [0.4], [0.0, 0.0], 0)
    with pytest.raises(ValueError):
        turning_point_continuation(model, fold, 0)


# -- BDF ------------------------------------------------------------------------------------


@pytest.fixture
def decay():
    return FunctionModel(lambda xd, x, p: [xd[0] + x[0]], n=1, m=0, x0=[1.0])


def test_bdf1_closed_form(decay):
    h = 0.1
    tr = bdf_integrate(decay, [1.0], [], (0.0, 1.0), h, order=1, opts=TIGHT)
    expected = (1.0 / (1.0 + h)) ** np.arange(11)
    np.testing.assert_allclose(tr.x[:, 0], expected, rtol=1e-13)
    np.testing.assert_allclose(tr.t, np.linspace(0.0, 1.0, 11), atol=1e-15)


def test_bdf2_first_step_is_bdf1(decay):
    tr = bdf_integrate(decay, [1.0], [], (0.0, 0.2), 0.1, order=2, opts=TIGHT)
    assert abs(tr.x[1, 0] - 1.0 / 1.1) <= 1e-14


def test_consistent_initial_rate(decay):
    tr = bdf_integrate(decay, [2.0], [], (0.0, 0.1), 0.1, order=1)
    assert abs(tr.xdot[0, 0] + 2.0) <= 1e-12


def test_bdf_argument_checks(decay):
    with pytest.raises(ValueError):
        bdf_integrate(decay, [1.0], [], (0.0, 1.0), 0.1, order=3)
    with pytest.raises(ValueError):
        bdf_integrate(decay, [1.0], [], (0.0, 1.0), 0.3)


def test_bdf_reports_failed_step():
    model = FunctionModel(lambda xd, x, p: [xd[0] - x[0] * x[0]], n=1, m=0)
    tr = bdf_integrate(model, [1.0], [], (0.0, 2.0), 0.1, order=1)
    assert tr.status == "failed" and tr.failure_index is not None
    assert len(tr.t) == tr.failure_index


def test_cstr_oscillation_is_sustained():
    model = CstrNondimModel(D=0.31, B=10.0, beta=2.5)
    s = newton_solve(model, [0.69, 1.97], model.p0).x
    ev = stability_eigenvalues(model, s, model.p0).values
    assert np.all(ev.real > 0) and np.all(np.abs(ev.imag) > 1.0)
    tr = bdf_integrate(model, s + [0.01, 0.0], model.p0, (0.0, 40.0), 0.02, 2)
    assert tr.status == "complete"
    y = tr.x[:, 1]
    peaks = [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]
    late = [i for i in peaks if tr.t[i] > 20.0]
    assert len(late) >= 5
    assert np.all(np.diff(y[late]) > -1e-6)
    assert y[len(y) // 2:].max() - y[len(y) // 2:].min() > 1.0
    assert np.all(np.abs(tr.x) < 10.0)


def test_observed_order_of_exact_sequences():
    assert abs(observed_order([1.0 + 0.4, 1.0 + 0.1, 1.0 + 0.025]) - 2.0) <= 1e-12


# -- stochastic Galerkin and NISP ---------------------------------------------------------


def germ_model():
    return scalar_model(lambda x, p: x - p[0], 0.0, [0.0])


def test_sg_of_linear_germ_is_exact():
    basis = build_tensor_basis(1, 3)
    sol = sg_newton_solve(germ_model(), basis, [UniformParameter(0, -1.0, 1.0)])
    np.testing.assert_allclose(sol.coeffs[:, 0], [0.0, 1.0, 0.0, 0.0], atol=1e-15)


def test_nisp_of_linear_germ():
    basis = build_tensor_basis(1, 3)
    sol = nisp_project(germ_model(), basis, [UniformParameter(0, -1.0, 1.0)])
    np.testing.assert_allclose(sol.coeffs[:, 0], [0.0, 1.0, 0.0, 0.0], atol=1e-14)


def test_nisp_of_constant_solution():
    model = scalar_model(lambda x, p: x - 2.0 + 0.0 * p[0], 0.0, [0.0])
    basis = build_tensor_basis(1, 3)
    sol = nisp_project(model, basis, [UniformParameter(0, -1.0, 1.0)])
    assert sol.coeffs[0, 0] == pytest.approx(2.0, abs=1e-14)
    np.testing.assert_allclose(sol.coeffs[1:, 0], 0.0, atol=1e-14)


@pytest.mark.parametrize("order, tol", [(2, 1e-4), (4, 1e-6), (6, 1e-8)])
def test_sg_reciprocal_matches_nisp(order, tol):
    model = scalar_model(lambda x, p: x - 1.0 / (1.0 + 0.1 * p[0]), 1.0, [0.0])
    basis = build_tensor_basis(1, order)
    pm = [UniformParameter(0, -1.0, 1.0)]
    sg = sg_newton_solve(model, basis, pm)
    ni = nisp_project(model, basis, pm, QuadratureRule.tensor(1, 20))
    np.testing.assert_allclose(sg.coeffs, ni.coeffs, atol=tol)
    assert abs(ni.coeffs[0, 0] - 5.0 * math.log(1.1 / 0.9)) <= 1e-14


def test_block_jacobian_of_mean_only_operator_is_block_diagonal():
    basis = build_tensor_basis(2, 2)
    Jk = np.zeros((basis.size, 2, 2))
    Jk[0] = [[1.0, 2.0], [3.0, 4.0]]
    K = sg_block_jacobian(Jk, basis)
    np.testing.assert_allclose(K, np.kron(np.eye(basis.size), Jk[0]), atol=1e-15)


def test_uniform_parameter_validation():
    with pytest.raises(ValueError):
        UniformParameter(0, 1.0, 1.0)
    up = UniformParameter(0, 7.0, 8.0)
    assert (up.mid, up.half, float(up.at(1.0))) == (7.5, 0.5, 8.0)


def test_node_failure_reports_node():
    model = scalar_model(lambda x, p: x * x + p[0], 1.0, [0.0])
    basis = build_tensor_basis(1, 2)
    with pytest.raises(NodeSolveError) as err:
        nisp_project(model, basis, [UniformParameter(0, 0.5, 1.0)])
    assert err.value.node == 0


@pytest.fixture(scope="module")
def cstr_uq():
    model = CstrNondimModel()
    box = (("D", 0.03, 0.05), ("B", 7.0, 8.0), ("beta", 0.05, 1.05))
    pm = [UniformParameter(model.param_index(n), lo, hi) for n, lo, hi in box]
    basis = build_tensor_basis(3, 4)
    return model, basis, pm, sg_newton_solve(model, basis, pm), nisp_project(model, basis, pm)


def test_cstr_sg_converges_with_35_terms(cstr_uq):
    model, basis, pm, sg, _ = cstr_uq
    assert basis.size == 35 and sg.coeffs.shape == (35, 2)
    p = model.p0.copy()
    for up in pm:
        p[up.index] = up.mid
    F = Assembler(model, basis).sg_residual(sg.coeffs, p, sg_parameter_coeffs(pm, basis, model.m))
    assert np.max(np.abs(F)) <= 1e-10


def test_cstr_sg_and_nisp_moments_close(cstr_uq):
    *_, sg, ni = cstr_uq
    np.testing.assert_allclose(sg.mean(), ni.mean(), atol=1e-5)
    np.testing.assert_allclose(sg.std(), ni.std(), atol=1e-4)


@pytest.mark.xfail(strict=True, reason=(
    "order-4 truncation error on this box is ~4e-6 in the mean and ~3.5e-5 in the std; "
    "a fold just outside the box limits convergence"))
def test_cstr_sg_moments_match_nisp_to_1e_6(cstr_uq):
    *_, sg, ni = cstr_uq
    assert np.max(np.abs(sg.mean() - ni.mean())) <= 1e-6
    assert np.max(np.abs(sg.std() - ni.std())) <= 1e-6


@pytest.mark.xfail(strict=True, reason=(
    "order-4 Galerkin and projection coefficients differ by ~7e-4 on this box"))
def test_cstr_sg_coefficients_match_nisp_to_1e_6(cstr_uq):
    *_, sg, ni = cstr_uq
    assert np.max(np.abs(sg.coeffs - ni.coeffs)) <= 1e-6


def test_threaded_nisp_matches_serial():
    model = CstrNondimModel()
    pm = [UniformParameter(0, 0.03, 0.05), UniformParameter(1, 7.0, 8.0)]
    basis = build_tensor_basis(2, 3)
    serial = nisp_project(model, basis, pm)
    a = nisp_project(model, basis, pm, threads=3)
    b = nisp_project(model, basis, pm, threads=3)
    assert np.array_equal(a.coeffs, b.coeffs)
    np.testing.assert_allclose(a.coeffs, serial.coeffs, atol=1e-11)


# -- surrogate sampling ---------------------------------------------------------------------


def test_constant_expansion_gives_single_bin():
    basis = build_tensor_basis(2, 2)
    coeffs = np.zeros((basis.size, 1))
    coeffs[0] = 3.0
    s = sample_surrogate(SgSolution(coeffs, basis), 1000, rng_seed=1)
    assert s.std[0] == 0.0 and np.all(s.samples == 3.0)
    edges, counts = s.histograms[0]
    assert list(counts) == [1000] and len(edges) == 2


def test_linear_expansion_moments():
    basis = build_tensor_basis(1, 1)
    n = 50_000
    s = sample_surrogate(SgSolution([[0.0], [1.0]], basis), n, rng_seed=3)
    bar = 3 / math.sqrt(n)
    assert abs(s.mean[0]) <= bar
    assert abs(s.std[0] ** 2 - 1 / 3) <= bar


def test_fixed_seed_is_bitwise_reproducible():
    basis = build_tensor_basis(2, 2)
    sol = SgSolution(np.arange(12, dtype=float).reshape(6, 2), basis)
    a, b = sample_surrogate(sol, 500, 11), sample_surrogate(sol, 500, 11)
    assert np.array_equal(a.samples, b.samples)
    assert all(np.array_equal(x[1], y[1]) for x, y in zip(a.histograms, b.histograms))
    assert a.algorithm == RNG_ALGORITHM == "PCG64"
    assert not np.array_equal(a.samples, sample_surrogate(sol, 500, 12).samples)


def test_histogram_bins_and_total():
    edges, counts = histogram(np.linspace(0, 1, 1001), bins=100)
    assert len(edges) == 101 and counts.sum() == 1001


def test_solution_shape_checked():
    with pytest.raises(ValueError):
        SgSolution(np.zeros((3, 1)), build_tensor_basis(1, 1))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_coefficient_moments_match_quadrature(c):
    basis = build_tensor_basis(2, 2)
    sol = SgSolution(np.array(c)[:, None], basis)
    q = QuadratureRule.tensor(2, 4)
    vals = sol(q.points)[:, 0]
    mean = q.integrate(vals)
    var = q.integrate((vals - mean) ** 2)
    assert abs(sol.mean()[0] - mean) <= 1e-12
    assert abs(sol.variance()[0] - var) <= 1e-11


# -- cost ---------------------------------------------------------------------------------


def test_cost_ratio_bounded_for_both_variants(full):
    model = fold_model()
    assert 1.0 < cost_ratio(model, [0.3, 1.5], model.p0, 10) <= 25.0
    assert 1.0 < cost_ratio(full, [0.5, 310.0], full.p0, 10) <= 25.0


def test_cost_grows_with_directions():
    model = fold_model()
    r2 = cost_ratio(model, [0.3, 1.5], model.p0, 2)
    r10 = cost_ratio(model, [0.3, 1.5], model.p0, 10)
    assert r10 > r2
