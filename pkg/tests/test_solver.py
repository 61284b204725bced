"""Mode system, closed-form spot checks, and series evaluation."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracbessel.errors import SolvabilityError
from fracbessel.fracops import OperatorParams
from fracbessel.quadrature import gauss_jacobi_rule
from fracbessel.solver import (Forcing, ModeRecord, ProblemSpec,
                               SeriesSolution, compute_Delta_k, compute_Fk,
                               compute_Gk, delta_limit, eval_u,
                               eval_u_derivatives, solve_modes)
from fracbessel.specfun import (MLParams, bessel_j, gamma, mittag_leffler,
                                rgamma)
from fracbessel.spectrum import Eigenvalue, bessel_zero, eigenvalue_table

DEFAULT_FORCING = Forcing(kind="separable_builtin", space_poly=(1.0,),
                          time_poly=(1.0, 0.5))


def ones(t):
    return np.ones_like(np.asarray(t, dtype=float))


def small_spec(op, N=6, points=((0.6, -1.0),), forcing=DEFAULT_FORCING):
    return ProblemSpec(op=op, T=1.0, nonlocal_points=points,
                       forcing=forcing, N=N)


class TestForcing:
    def test_builtin_value_is_separable(self):
        f = DEFAULT_FORCING
        x, t = 0.5, 0.25
        assert_allclose(f.value(x, t), f.spatial(x) * f.time_factor(t),
                        rtol=1e-15)
        assert f.hypothesis_status() == "satisfied"

    def test_builtin_spatial_vanishing(self):
        f = DEFAULT_FORCING
        assert f.spatial(0.0) == 0.0
        assert f.spatial(1.0) == 0.0

    def test_tabulated_bilinear(self):
        f = Forcing(kind="tabulated", x_grid=(0.0, 0.5, 1.0),
                    t_grid=(-1.0, 0.0, 1.0),
                    samples=((0.0, 1.0, 2.0), (3.0, 4.0, 5.0),
                             (6.0, 7.0, 8.0)))
        assert f.hypothesis_status() == "unverifiable"
        # grid nodes reproduce samples
        assert_allclose(f.value(0.5, 0.0), 4.0, rtol=1e-15)
        assert_allclose(f.value(1.0, 1.0), 8.0, rtol=1e-15)
        # cell centre is the average of its four corners
        assert_allclose(f.value(0.25, -0.5), (0.0 + 1.0 + 3.0 + 4.0) / 4.0,
                        rtol=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            Forcing(kind="mystery")
        with pytest.raises(ValueError):
            Forcing(kind="separable_builtin", space_poly=())
        with pytest.raises(ValueError):
            Forcing(kind="tabulated", x_grid=(0.0, 1.0))
        with pytest.raises(ValueError):
            Forcing(kind="tabulated", x_grid=(0.0, 0.0),
                    t_grid=(-1.0, 1.0), samples=((1.0, 2.0), (3.0, 4.0)))
        with pytest.raises(ValueError):
            Forcing(kind="tabulated", x_grid=(0.0, 1.0),
                    t_grid=(-1.0, 1.0), samples=((1.0, 2.0),))


class TestProblemSpec:
    def test_nonlocal_ordering_message(self, default_op):
        with pytest.raises(ValueError, match=r"ordering fails at indices \[1\]"):
            small_spec(default_op, points=((0.3, -0.2), (0.4, -0.6)))

    def test_xi_domain(self, default_op):
        with pytest.raises(ValueError, match="xi_1"):
            small_spec(default_op, points=((0.3, 0.2),))
        with pytest.raises(ValueError, match="xi_1"):
            small_spec(default_op, points=((0.3, -2.0),))

    def test_misc_validation(self, default_op):
        with pytest.raises(ValueError):
            ProblemSpec(op=default_op, T=0.0, nonlocal_points=((0.6, -1.0),),
                        forcing=DEFAULT_FORCING)
        with pytest.raises(ValueError):
            small_spec(default_op, points=())
        with pytest.raises(ValueError):
            small_spec(default_op, N=0)
        with pytest.raises(ValueError):
            ProblemSpec(op=default_op, T=1.0, nonlocal_points=((0.6, -1.0),),
                        forcing=DEFAULT_FORCING, delta_variant="other")
        with pytest.raises(ValueError):
            ProblemSpec(op=default_op, T=1.0, nonlocal_points=((0.6, -1.0),),
                        forcing=DEFAULT_FORCING, delta_floor=0.0)

    def test_tabulated_grid_must_cover_domain(self, default_op):
        narrow = Forcing(kind="tabulated", x_grid=(0.0, 1.0),
                         t_grid=(-0.5, 0.5), samples=((1.0, 1.0), (1.0, 1.0)))
        with pytest.raises(ValueError, match="cover"):
            small_spec(default_op, forcing=narrow)


class TestGkClosedForms:
    def test_zero_at_zero(self, default_op):
        mode = ModeRecord(ev=bessel_zero(3), f_k=ones, op=default_op)
        assert compute_Gk(mode, 0.0) == 0.0

    def test_requires_operator(self):
        mode = ModeRecord(ev=bessel_zero(3), f_k=ones)
        with pytest.raises(ValueError):
            compute_Gk(mode, 0.5)

    def test_constant_forcing_relaxation(self, default_op):
        """f_k = 1 integrates to (1 - E_{a,1}(-cb t^{pa})) / lam^2."""
        op = default_op
        ev = bessel_zero(3)
        mode = ModeRecord(ev=ev, f_k=ones, op=op)
        cb = ev.lam ** 2 / op.p ** op.alpha1
        for t in (0.15, 0.6, 1.0):
            E = float(mittag_leffler(MLParams(alpha=op.alpha1, beta=1.0),
                                     -cb * t ** (op.p * op.alpha1)))
            want = (1.0 - E) / ev.lam ** 2
            assert_allclose(compute_Gk(mode, t), want, rtol=1e-6,
                            err_msg=f"t={t}")

    def test_small_eigenvalue_limit(self, default_op):
        op = default_op
        ev = Eigenvalue(k=1, lam=1e-4, norm_sq=0.5)
        mode = ModeRecord(ev=ev, f_k=ones, op=op)
        t = 0.8
        pa = op.p * op.alpha1
        want = t ** pa / (op.p ** op.alpha1 * gamma(op.alpha1 + 1.0))
        assert_allclose(compute_Gk(mode, t), want, rtol=1e-6)

    def test_alternate_quadrature_route(self, default_op):
        op = default_op
        spec = small_spec(op)
        sol = solve_modes(spec)
        m = sol.modes[0]
        rule = gauss_jacobi_rule(320, op.p - 1.0, op.alpha1 - 1.0)
        direct = compute_Gk(m, 0.35)
        mapped = compute_Gk(m, 0.35, quad=rule)
        assert_allclose(mapped, direct, rtol=1e-5)


class TestFk:
    def test_against_in_test_assembly(self, default_op):
        """Rebuild F_k here from its definition with a plain Jacobi rule
        on the mapped history integral; the package uses scaled panels."""
        op = default_op
        spec = small_spec(op)
        sol = solve_modes(spec)
        d2, g2 = op.delta2, op.gamma2
        rule = gauss_jacobi_rule(320, d2 - g2 + 1.0, 0.0)
        kernel = MLParams(alpha=d2, beta=d2 - g2 + 2.0)
        for idx in (0, 2):
            m = sol.modes[idx]
            total = compute_Gk(m, spec.T)
            for p_i, xi in spec.nonlocal_points:
                x = rule.nodes
                kern = mittag_leffler(kernel,
                                      -m.ev.lam ** 2 * (-xi) ** d2 * x ** d2)
                fv = np.asarray(m.f_k(xi * (1.0 - x)), dtype=float)
                total -= p_i * (-xi) ** (d2 - g2 + 2.0) * float(
                    rule.weights @ (kern * fv))
            assert_allclose(compute_Fk(m, spec), total, rtol=1e-7,
                            err_msg=f"k={m.ev.k}")

    def test_quad_route_where_weights_coincide(self):
        """The caller-rule route shares one rule between the terminal
        and history terms, so it is exercised at a parameter point
        where both carry the same Jacobi pair."""
        op = OperatorParams(1.0, -0.3, 1.3, 1.5, 1.0)
        spec = small_spec(op, N=4)
        sol = solve_modes(spec)
        m = sol.modes[1]
        pair = (op.delta2 - op.gamma2 + 1.0, 0.0)
        assert pair[0] == pytest.approx(op.p - 1.0)
        rule = gauss_jacobi_rule(192, *pair)
        assert_allclose(compute_Fk(m, spec, quad=rule),
                        compute_Fk(m, spec), rtol=1e-6)


class TestDeltaK:
    def test_small_eigenvalue_limit(self, default_op):
        spec = small_spec(default_op)
        ev = Eigenvalue(k=1, lam=1e-8, norm_sq=0.5)
        mode = ModeRecord(ev=ev, f_k=ones, op=default_op)
        want = sum(p for p, _ in spec.nonlocal_points) - 1.0
        assert_allclose(compute_Delta_k(mode, spec), want, atol=1e-10)

    def test_variants_coincide_at_unit_history_time(self, default_op):
        spec = small_spec(default_op, points=((0.6, -1.0),))
        mode = ModeRecord(ev=bessel_zero(4), f_k=ones, op=default_op)
        dc = compute_Delta_k(mode, spec, variant="consistent")
        dl = compute_Delta_k(mode, spec, variant="paper-literal")
        assert dc == dl

    def test_variants_differ_inside_interval(self, default_op):
        spec = small_spec(default_op, points=((0.6, -0.6),))
        mode = ModeRecord(ev=bessel_zero(4), f_k=ones, op=default_op)
        dc = compute_Delta_k(mode, spec, variant="consistent")
        dl = compute_Delta_k(mode, spec, variant="paper-literal")
        assert abs(dc - dl) > 1e-6

    def test_unknown_variant(self, default_op):
        spec = small_spec(default_op)
        mode = ModeRecord(ev=bessel_zero(4), f_k=ones, op=default_op)
        with pytest.raises(ValueError):
            compute_Delta_k(mode, spec, variant="bogus")

    def test_limit_value_and_approach(self, default_op):
        spec = small_spec(default_op)
        L = delta_limit(spec)
        op = default_op
        want = 0.6 / (op.p ** op.alpha1 * gamma(op.alpha1)
                      * gamma(2.0 - op.delta2))
        assert_allclose(L, want, rtol=1e-14)
        eigs = eigenvalue_table(100)
        gaps = {}
        for k in (10, 100):
            mode = ModeRecord(ev=eigs[k - 1], f_k=ones, op=op)
            gaps[k] = abs(compute_Delta_k(mode, spec) - L)
        assert gaps[100] < gaps[10]
        # the approach is quadratic in 1/lam
        ratio = gaps[100] / gaps[10]
        quad_ratio = (eigs[9].lam / eigs[99].lam) ** 2
        assert ratio < 5.0 * quad_ratio
        assert gaps[100] <= 1e-3

    def test_limit_variants_scale_by_history_power(self, default_op):
        spec_c = small_spec(default_op, points=((0.6, -0.6),))
        lc = delta_limit(spec_c)
        ll = delta_limit(spec_c, variant="paper-literal")
        assert_allclose(lc / ll, 0.6 ** (1.0 - default_op.delta2), rtol=1e-13)

    def test_limit_rejects_zero_history_time(self, default_op):
        spec = small_spec(default_op, points=((0.5, -0.5), (0.5, 0.0)))
        with pytest.raises(ValueError):
            delta_limit(spec)


class TestTerminalCondition:
    def test_zero_weight_reduces_to_final_value_problem(self, default_op):
        """p_1 = 0 wipes the history sum: Delta_k is minus the forward
        relaxation factor and u(., T) must vanish."""
        op = default_op
        spec = small_spec(op, N=4, points=((0.0, -0.5),))
        sol = solve_modes(spec)
        for m in sol.modes:
            cb = m.ev.lam ** 2 / op.p ** op.alpha1
            E = float(mittag_leffler(MLParams(alpha=op.alpha1, beta=1.0),
                                     -cb * spec.T ** (op.p * op.alpha1)))
            assert_allclose(m.Delta_k, -E, rtol=1e-13)
            # solve_modes integrates F_k on its own panel count, so this
            # is a two-route comparison, not an identity
            assert_allclose(m.tau_k, -compute_Gk(m, spec.T) / E, rtol=1e-8)
        scale = abs(eval_u(sol, 0.5, 0.5 * spec.T))
        for x in (0.3, 0.7):
            assert abs(eval_u(sol, x, spec.T)) <= 1e-10 * scale


class TestZeroForcing:
    def test_solution_is_identically_zero(self, default_op):
        spec = small_spec(default_op, N=8,
                          forcing=Forcing(kind="separable_builtin",
                                          space_poly=(0.0,),
                                          time_poly=(1.0,)))
        sol = solve_modes(spec)
        assert all(m.tau_k == 0.0 for m in sol.modes)
        assert sol.tail_estimate == 0.0
        xs = np.linspace(0.0, 1.0, 11)
        for t in (-0.8, -0.2, 0.3, 1.0):
            assert np.max(np.abs(eval_u(sol, xs, t))) == 0.0


class TestSolveInvariants:
    def test_coefficient_relations(self, default_solution):
        sol = default_solution
        op = sol.spec.op
        coef = 1.0 / (op.p ** op.alpha1 * gamma(op.alpha1))
        for m in sol.modes:
            assert m.phi_k == m.tau_k
            assert_allclose(m.psi_k, -m.ev.lam ** 2 * coef * m.tau_k,
                            rtol=1e-15)
            assert_allclose(m.tau_k, m.F_k / m.Delta_k, rtol=1e-15)
            assert math.isfinite(m.Delta_k) and m.Delta_k != 0.0

    def test_structure(self, default_solution):
        sol = default_solution
        assert len(sol.modes) == sol.spec.N
        assert [m.ev.k for m in sol.modes] == list(range(1, sol.spec.N + 1))
        assert np.all(np.diff(sol.lams) > 0.0)
        assert math.isfinite(sol.tail_estimate)
        assert sol.tail_estimate >= 0.0

    def test_modes_must_stay_sorted(self, default_op):
        m2 = ModeRecord(ev=bessel_zero(2), f_k=ones, op=default_op)
        m1 = ModeRecord(ev=bessel_zero(1), f_k=ones, op=default_op)
        spec = small_spec(default_op, N=2)
        with pytest.raises(ValueError):
            SeriesSolution(spec=spec, modes=(m2, m1), tail_estimate=0.0)

    def test_solvability_error_names_first_bad_mode(self, default_op):
        spec = ProblemSpec(op=default_op, T=1.0,
                           nonlocal_points=((0.6, -1.0),),
                           forcing=DEFAULT_FORCING, N=4, delta_floor=10.0)
        with pytest.raises(SolvabilityError, match="k=1") as ei:
            solve_modes(spec)
        assert ei.value.k == 1


class TestEvalU:
    def test_interface_traces(self, default_solution):
        """u is genuinely singular at t -> 0-: the solution behaves as
        (-t)^{gamma2-2} there and only the weighted limit is finite.
        Both one-sided traces must recover sum tau_k J0(lam_k x)."""
        sol = default_solution
        op = sol.spec.op
        g2 = op.gamma2
        x = 0.5
        base = float(sol.taus @ bessel_j(0, sol.lams * x))
        fwd = eval_u(sol, x, 1e-8)
        assert_allclose(fwd, base, rtol=1e-3)
        q = 1e-6
        back = eval_u(sol, x, -q) * q ** (2.0 - g2)
        assert_allclose(back, base * rgamma(g2 - 1.0), rtol=1e-3)

    def test_boundary_condition(self, default_solution):
        sol = default_solution
        scale = abs(eval_u(sol, 0.0, 0.5))
        for t in (-0.7, -0.1, 0.4, 1.0):
            assert abs(eval_u(sol, 1.0, t)) <= sol.spec.N * 1e-12 * max(
                1.0, scale)

    def test_axis_flux_condition(self, default_solution):
        # lim x u_x = 0 at the axis
        sol = default_solution
        t = 0.5
        scale = abs(eval_u(sol, 0.0, t))
        for x in (1e-3, 1e-2):
            ux, _ = eval_u_derivatives(sol, x, t)
            assert abs(x * ux) <= 1e-4 * scale

    def test_vectorized_matches_scalar(self, default_solution):
        sol = default_solution
        xs = np.array([0.0, 0.3, 0.8, 1.0])
        t = -0.4
        vec = eval_u(sol, xs, t)
        assert vec.shape == (4,)
        for x, v in zip(xs, vec):
            assert eval_u(sol, float(x), t) == pytest.approx(v, rel=1e-14)

    def test_domain_errors(self, default_solution):
        sol = default_solution
        with pytest.raises(ValueError):
            eval_u(sol, 1.5, 0.1)
        with pytest.raises(ValueError):
            eval_u(sol, 0.5, 2.0 * sol.spec.T)


class TestDerivatives:
    def test_radial_ode_identity_single_mode(self, default_op):
        """With one mode, u_xx + u_x / x = -lam^2 u pointwise."""
        spec = small_spec(default_op, N=1)
        sol = solve_modes(spec)
        lam = sol.lams[0]
        for x, t in ((0.4, 0.3), (0.7, -0.6)):
            u = eval_u(sol, x, t)
            ux, uxx = eval_u_derivatives(sol, x, t)
            resid = uxx + ux / x + lam ** 2 * u
            assert abs(resid) <= 1e-10 * lam ** 2 * abs(u)

    def test_finite_difference_cross_check(self, default_solution):
        sol = default_solution
        x, t = 0.5, 0.5
        ux, uxx = eval_u_derivatives(sol, x, t)
        h = 1e-5
        fd_x = (eval_u(sol, x + h, t) - eval_u(sol, x - h, t)) / (2 * h)
        assert_allclose(ux, fd_x, rtol=1e-4)
        h2 = 1e-4
        fd_xx = (eval_u(sol, x + h2, t) - 2 * eval_u(sol, x, t)
                 + eval_u(sol, x - h2, t)) / h2 ** 2
        assert_allclose(uxx, fd_xx, rtol=1e-4)

    def test_axis_values(self, default_solution):
        ux, uxx = eval_u_derivatives(default_solution, 0.0, 0.5)
        assert ux == 0.0
        assert math.isfinite(uxx)
