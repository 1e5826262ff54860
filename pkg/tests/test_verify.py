import math

import numpy as np
import pytest

from qcomp.comparison import (ComparisonProfile, barrier_elliptic, evolve_profile,
                              invert_profile)
from qcomp.eigen import shoot_1d_model
from qcomp.errors import DegenerateFit, PreconditionFailed, TimeMismatch
from qcomp.geometry import (ZERO, CurvatureParams, ExprDensity, WeightedInterval,
                            comparison_drift, model_density)
from qcomp.operators import NO_SOURCE, SourceTerm, catalog
from qcomp.pde import Field1D, SolverConfig, solve_elliptic, solve_parabolic
from qcomp.report import CheckReport
from qcomp.verify import (
    RadialProfile,
    check_decay,
    check_eigen_comparison,
    check_gradient_bound,
    check_mc_dominated,
    check_supersolution_boundary,
    check_two_point_drift,
    decay_rate_estimate,
    modulus_of_continuity,
)

LAP = catalog("laplacian")
NORM3 = catalog("normalized_p_laplacian", {"p": 3})
FLAT = CurvatureParams(0, 0, 3)


def field(values, grid):
    sp = WeightedInterval(float(grid[-1] - grid[0]), m=grid.size - 1)
    return Field1D(sp, values, bc="free")


def brute_modulus(u, grid, s):
    x, y = np.meshgrid(grid, grid)
    diff = np.abs(u[None, :] - u[:, None])
    return np.array([0.5 * np.max(diff[np.abs(x - y) <= 2 * si + 1e-12]) for si in s])


def heat_run(m, u0=np.sin, op=LAP, t_end=1.0, density=ZERO, L=math.pi, bc="dirichlet_zero"):
    sp = WeightedInterval(L, density, m)
    tr = solve_parabolic(Field1D.from_function(sp, u0, bc), op, NO_SOURCE,
                         SolverConfig(t_end=t_end, snapshot_every=100))
    return sp, tr


class TestModulus:
    def test_constant(self):
        grid = np.linspace(0, 1, 33)
        assert np.all(modulus_of_continuity(field(np.full(33, 2.0), grid)).omega == 0)

    def test_linear(self):
        grid = np.linspace(0, 1, 41)
        mc = modulus_of_continuity(field(grid.copy(), grid))
        np.testing.assert_allclose(mc.omega, mc.s_grid, atol=1e-14)
        assert mc.s_grid[-1] == pytest.approx(0.5)

    def test_sine_against_pair_scan(self):
        grid = np.linspace(0, math.pi, 201)
        u = np.sin(grid)
        mc = modulus_of_continuity(field(u, grid))
        np.testing.assert_allclose(mc.omega, brute_modulus(u, grid, mc.s_grid), atol=1e-14)
        # the endpoints rule out the symmetric pairs, so the best pair starts at 0
        np.testing.assert_allclose(mc.omega, np.sin(2 * np.minimum(mc.s_grid, math.pi / 4)) / 2, atol=(grid[1] - grid[0]) ** 2)

    def test_invariants(self):
        rng = np.random.default_rng(3)
        grid = np.linspace(0, 2, 51)
        u = rng.normal(size=51)
        mc = modulus_of_continuity(field(u, grid))
        assert np.all(np.diff(mc.omega) >= 0) and mc.omega[0] >= 0
        assert mc.omega[-1] == pytest.approx((u.max() - u.min()) / 2)


class TestMcDominated:
    def test_zero_trajectory(self):
        sp, tr = heat_run(50, u0=lambda s: 0 * s, t_end=0.2)
        prof = evolve_profile(LAP, 0.0, NO_SOURCE, lambda s: s, np.linspace(0, math.pi / 2, 51),
                              snapshot_times=tr.times)
        rep = check_mc_dominated(tr, prof)
        assert rep.passed and rep.worst_violation <= 0

    @pytest.mark.parametrize("m", [50, 100])
    def test_heat_with_linear_barrier(self, m):
        sp, tr = heat_run(m, t_end=0.5)
        prof = evolve_profile(LAP, 0.0, NO_SOURCE, lambda s: s, np.linspace(0, math.pi / 2, m + 1),
                              snapshot_times=tr.times)
        rep = check_mc_dominated(tr, prof, space=sp)
        assert rep.passed, rep
        assert rep.metadata["interior_worst"] < 0

    def test_flipped_drift_fails(self):
        # the violation grows linearly with amplitude, the tolerance does not
        params = CurvatureParams(-1, -0.3, 3)
        amp = 20.0
        sp, tr = heat_run(100, u0=lambda s: amp * np.sin(s),
                          density=model_density(params, math.pi))
        drift = comparison_drift(params)
        prof = evolve_profile(LAP, lambda s: -drift(s), NO_SOURCE, lambda s: amp * np.sin(s),
                              np.linspace(0, math.pi / 2, 101), snapshot_times=tr.times)
        assert not check_mc_dominated(tr, prof, space=sp).passed

    def test_start_condition(self):
        sp, tr = heat_run(50, u0=lambda s: 4 * np.sin(s), t_end=0.1)
        prof = evolve_profile(LAP, 0.0, NO_SOURCE, np.sin, np.linspace(0, math.pi / 2, 51),
                              snapshot_times=tr.times)
        with pytest.raises(PreconditionFailed):
            check_mc_dominated(tr, prof, space=sp)

    def test_time_mismatch(self):
        sp, tr = heat_run(50, t_end=0.1)
        prof = evolve_profile(LAP, 0.0, NO_SOURCE, np.sin, np.linspace(0, math.pi / 2, 51),
                              snapshot_times=[0.05, 0.1 + 1e-3])
        with pytest.raises(TimeMismatch):
            check_mc_dominated(tr, prof)


class TestDecay:
    def setup_method(self):
        self.eig = shoot_1d_model(LAP, FLAT, math.pi / 2, 1.0)

    def barrier(self, tr):
        return ComparisonProfile.separable(np.linspace(0, math.pi / 2, 401), tr.times,
                                           self.eig.shape, self.eig.lam,
                                           self.eig.shape_derivative)

    def u0(self, c):
        return lambda s: c * self.eig.shape(np.minimum(s, math.pi - s))

    def test_half_amplitude(self):
        sp, tr = heat_run(64, u0=self.u0(0.5))
        rep = check_decay(tr, self.barrier(tr), sp)
        # boundary nodes sit on the barrier, the interior stays half a unit below it
        assert rep.passed and rep.worst_violation <= 0
        assert rep.metadata["slack"] == pytest.approx(0.5, abs=1e-3)

    def test_equality_case(self):
        sp, tr = heat_run(100, u0=self.u0(1.0))
        rep = check_decay(tr, self.barrier(tr), sp)
        assert rep.passed
        assert -rep.tolerance_used <= rep.metadata["slack"] <= 5 * rep.tolerance_used

    def test_exceeding_start(self):
        sp, tr = heat_run(64, u0=self.u0(1.01), t_end=0.05)
        with pytest.raises(PreconditionFailed):
            check_decay(tr, self.barrier(tr), sp)


class TestSupersolution:
    @pytest.mark.parametrize("kappa,lam", [(-1, 0), (0, -0.3), (-1, 0.2)])
    def test_model_equality(self, kappa, lam):
        params = CurvatureParams(kappa, lam, 3)
        sp = WeightedInterval(1.0, model_density(params, 1.0), 200)
        rep = check_supersolution_boundary(RadialProfile.from_expression("sin(s)"), sp, LAP, params)
        assert rep.passed and rep.metadata["slack"] >= -1e-8

    def test_strict_on_better_curved(self):
        sp = WeightedInterval(1.0, ZERO, 200)
        params = CurvatureParams(-1, -0.5, 3)
        rep = check_supersolution_boundary(RadialProfile.from_expression("1 - exp(-2*s)"), sp,
                                           LAP, params)
        assert rep.passed and rep.worst_violation < -1e-3

    def test_overclaimed(self):
        sp = WeightedInterval(1.0, model_density(CurvatureParams(-1, 0, 3), 1.0), 200)
        rep = check_supersolution_boundary(RadialProfile.from_expression("s"), sp, LAP, FLAT)
        assert not rep.passed and "precondition" in rep.metadata

    def test_decreasing_profile(self):
        with pytest.raises(PreconditionFailed):
            check_supersolution_boundary(RadialProfile.from_expression("-s"),
                                         WeightedInterval(1.0), LAP, CurvatureParams(-1, -1, 3))


class TestTwoPoint:
    def test_flat(self):
        rep = check_two_point_drift(WeightedInterval(1.0, ZERO, 50), FLAT)
        assert rep.passed and rep.worst_violation == 0

    @pytest.mark.parametrize("kappa", [-1.0, 0.5])
    def test_centred_model(self, kappa):
        params = CurvatureParams(kappa, 0, 3)
        sp = WeightedInterval(2.0, model_density(params, 2.0, shift=1.0), 200)
        rep = check_two_point_drift(sp, params)
        assert rep.passed and rep.metadata["slack"] >= -1e-8

    def test_strict_for_convex_density(self):
        sp = WeightedInterval(2.0, ExprDensity("s**2"), 100)
        rep = check_two_point_drift(sp, CurvatureParams(0, 0, math.inf))
        assert rep.passed and rep.worst_violation < 0

    def test_concave_density_fails(self):
        sp = WeightedInterval(2.0, ExprDensity("-5*s**2"), 100)
        rep = check_two_point_drift(sp, CurvatureParams(0, 0, math.inf))
        assert not rep.passed and not rep.metadata["ricci_hypothesis_holds"]


class TestGradient:
    def test_profile_itself(self):
        s = np.linspace(0, 1, 101)
        prof = ComparisonProfile.from_table(s, [0.0], np.sin(s)[None, :])
        sp = WeightedInterval(1.0, m=100)
        rep = check_gradient_bound(Field1D(sp, np.sin(s), bc="free"), invert_profile(prof))
        assert rep.passed and abs(rep.worst_violation) < 1e-3

    def test_poisson(self):
        sp = WeightedInterval(1.0, m=101)
        src = SourceTerm.from_expressions(b="10")
        fld = solve_elliptic(LAP, src, sp, "dirichlet_zero")
        prof = barrier_elliptic(LAP, src, 0.0, (fld.values.min(), fld.values.max()), 5.2)
        assert check_gradient_bound(fld, invert_profile(prof)).passed
        assert not check_gradient_bound(fld, invert_profile(prof.slope_scaled(0.9))).passed


class TestEigenComparison:
    def test_doubled_model(self):
        a = shoot_1d_model(LAP, FLAT, 1.0, 1.0)
        from qcomp.eigen import shoot_weighted_interval
        b = shoot_weighted_interval(LAP, WeightedInterval(2.0), "dirichlet_both", 1.0)
        rep = check_eigen_comparison(b, a)
        assert rep.passed and abs(rep.metadata["rel_gap"]) <= 1e-6

    def test_deficit_fails(self):
        a = shoot_1d_model(LAP, FLAT, 1.0, 1.0)
        b = shoot_1d_model(LAP, FLAT, 1.1, 1.0)
        rep = check_eigen_comparison(b, a)
        assert not rep.passed and rep.worst_violation > 0.1


class TestDecayRate:
    def test_heat(self):
        _, tr = heat_run(100)
        assert decay_rate_estimate(tr) == pytest.approx(1.0, rel=0.02)

    def test_higher_mode_washes_out(self):
        u0 = lambda s: np.sin(s) + 0.3 * np.sin(2 * s)  # noqa: E731
        _, short = heat_run(64, u0=u0, t_end=0.5)
        _, long = heat_run(64, u0=u0, t_end=3.0)
        assert abs(decay_rate_estimate(long) - 1) < abs(decay_rate_estimate(short) - 1)
        assert decay_rate_estimate(long) == pytest.approx(1.0, rel=0.02)

    def test_scaling_invariance(self):
        rates = {}
        for op in (LAP, NORM3):
            for c in (1.0, 3.0):
                _, tr = heat_run(64, u0=lambda s, c=c: c * np.sin(s), op=op)
                rates[op.name, c] = decay_rate_estimate(tr)
        assert rates["laplacian", 3.0] == pytest.approx(rates["laplacian", 1.0], rel=1e-6)
        name = NORM3.name
        assert rates[name, 3.0] == pytest.approx(rates[name, 1.0], rel=1e-2)

    def test_degenerate(self):
        _, tr = heat_run(32, u0=lambda s: 0 * s, t_end=0.1)
        with pytest.raises(DegenerateFit):
            decay_rate_estimate(tr)


def test_report_invariant():
    rep = CheckReport.from_violation("x", 0.1, 0.1)
    assert rep.passed
    assert not CheckReport.from_violation("x", 0.2, 0.1).passed
    assert "PASS" in str(rep)
