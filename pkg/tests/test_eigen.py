import csv
import json
import math

import numpy as np
import pytest

from qcomp.eigen import (
    neumann_1d_model,
    neumann_shift_model,
    pi_p,
    rayleigh_p,
    shoot_1d_model,
    shoot_weighted_interval,
)
from qcomp.errors import DomainError, InvalidParameter
from qcomp.geometry import ZERO, CurvatureParams, ExprDensity, WeightedInterval, model_density
from qcomp.operators import catalog

LAP = catalog("laplacian")
FLAT = CurvatureParams(0, 0, 3)

# fixed-step RK4 + bisection, scripts/generalized_sine_oracle.py, D = 2, 20000 steps
GENERALIZED_SINE_D2 = {1.5: 1.8804508095131283, 3.0: 3.536095246998565, 4.0: 4.566051142195752}


def p_lap(p):
    return catalog("p_laplacian", {"p": p})


def sign_changes(v, floor=1e-10):
    v = v[np.abs(v) > floor * np.max(np.abs(v))]
    return int(np.sum(np.diff(np.sign(v)) != 0))


class TestClosedForms:
    def test_pi_p(self):
        assert pi_p(2) == pytest.approx(math.pi)

    def test_mixed_unit(self):
        assert shoot_1d_model(LAP, FLAT, 1.0, 1.0).lam == pytest.approx(math.pi**2 / 4, abs=1e-6)

    def test_mixed_scaling(self):
        assert shoot_1d_model(LAP, FLAT, 2.0, 1.0).lam == pytest.approx(math.pi**2 / 16, abs=1e-7)

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
    def test_mixed_generalized_sine(self, p):
        lam = shoot_1d_model(p_lap(p), FLAT, 1.0, p - 1).lam
        assert lam == pytest.approx(GENERALIZED_SINE_D2[p], rel=1e-8)

    def test_dirichlet_interval(self):
        res = shoot_weighted_interval(LAP, WeightedInterval(math.pi), "dirichlet_both", 1.0)
        assert res.lam == pytest.approx(1.0, abs=1e-6)

    def test_neumann_interval(self):
        res = shoot_weighted_interval(LAP, WeightedInterval(math.pi), "neumann_both", 1.0)
        assert res.lam == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("variant,N", [("finite_N", 3.0), ("finite_N", 7.5), ("infinite_N", math.inf)])
    def test_neumann_model_flat(self, variant, N):
        res = neumann_1d_model(LAP, 0.0, CurvatureParams(0, 0, N), math.pi, 1.0, variant)
        assert res.lam == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
    def test_neumann_model_p(self, p):
        res = neumann_1d_model(p_lap(p), 0.0, FLAT, 2.0, p - 1)
        assert res.lam == pytest.approx(GENERALIZED_SINE_D2[p], rel=1e-8)
        assert res.lam == pytest.approx((p - 1) * (pi_p(p) / 2.0) ** p, rel=1e-9)


class TestModelDensityEquality:
    @pytest.mark.parametrize("kappa,lam", [(-1, 0.2), (1, 0.3), (0, -0.3)])
    def test_weighted_equals_model(self, kappa, lam):
        params = CurvatureParams(kappa, lam, 3)
        sp = WeightedInterval(1.0, model_density(params, 1.0))
        a = shoot_weighted_interval(LAP, sp, "dirichlet_left_neumann_right", 1.0).lam
        b = shoot_1d_model(LAP, params, 1.0, 1.0).lam
        assert a == pytest.approx(b, rel=1e-8)

    @pytest.mark.parametrize("kappa", [-1.0, 0.5])
    def test_symmetric_neumann_infinite_N(self, kappa):
        # the centred density kappa (s - D/2)^2 / 2 has Ric_f = kappa exactly
        D = 2.0
        sp = WeightedInterval(D, ExprDensity(f"{kappa}*(s - 1)**2/2"))
        truth = shoot_weighted_interval(LAP, sp, "neumann_both", 1.0).lam
        model = neumann_1d_model(LAP, kappa, CurvatureParams(0, 0, math.inf), D, 1.0, "infinite_N")
        assert model.lam == pytest.approx(truth, rel=1e-8)

    def test_unsymmetrized_model_differs(self):
        shifted = neumann_shift_model(LAP, -1.0, 2.0, 1.0).lam
        model = neumann_1d_model(LAP, -1.0, CurvatureParams(0, 0, math.inf), 2.0, 1.0,
                                 "infinite_N").lam
        assert shifted > model * 1.05


class TestRayleigh:
    def test_flat_dirichlet(self):
        assert rayleigh_p(WeightedInterval(math.pi), 2.0, "dirichlet_both") == pytest.approx(1.0, abs=1e-5)

    def test_linear_density(self):
        sp = WeightedInterval(1.0, ExprDensity("s"))
        shoot = shoot_weighted_interval(LAP, sp, "dirichlet_both", 1.0).lam
        assert rayleigh_p(sp, 2.0, "dirichlet_both") == pytest.approx(shoot, rel=1e-5)

    def test_p3_dirichlet(self):
        sp = WeightedInterval(math.pi)
        shoot = shoot_weighted_interval(p_lap(3), sp, "dirichlet_both", 2.0).lam
        assert rayleigh_p(sp, 3.0, "dirichlet_both") == pytest.approx(shoot, rel=1e-4)

    @pytest.mark.parametrize("p,bc", [(1.5, "neumann_both"), (2.5, "dirichlet_left_neumann_right")])
    def test_weighted_cross_check(self, p, bc):
        sp = WeightedInterval(1.3, ExprDensity("0.4*s + 0.2*sin(3*s)"))
        shoot = shoot_weighted_interval(p_lap(p), sp, bc, p - 1).lam
        assert rayleigh_p(sp, p, bc) == pytest.approx(shoot, rel=1e-5)

    def test_validation(self):
        with pytest.raises(InvalidParameter):
            rayleigh_p(WeightedInterval(1.0), 1.0, "dirichlet_both")
        with pytest.raises(InvalidParameter):
            rayleigh_p(WeightedInterval(1.0), 2.0, "robin")


class TestInvariants:
    COMBOS = [
        (LAP, FLAT, 1.0),
        (p_lap(2.5), CurvatureParams(-1, 0.2, 3), 1.5),
        (catalog("normalized_p_laplacian", {"p": 3}), CurvatureParams(0, -0.3, 3), 1.0),
    ]

    @pytest.mark.parametrize("op,params,gamma", COMBOS)
    def test_domain_monotonicity(self, op, params, gamma):
        lams = [shoot_1d_model(op, params, R, gamma).lam for R in (0.5, 1.0, 2.0)]
        assert lams[0] > lams[1] > lams[2]

    @pytest.mark.parametrize("op,params,gamma", COMBOS)
    def test_slope_normalization(self, op, params, gamma):
        a = shoot_1d_model(op, params, 1.0, gamma)
        b = shoot_1d_model(op, params, 1.0, gamma, slope=3.0)
        assert b.lam == pytest.approx(a.lam, rel=1e-9)
        np.testing.assert_allclose(b.eigenfunction, 3.0 * a.eigenfunction, rtol=1e-6, atol=1e-9)

    @pytest.mark.parametrize("op,params,gamma", COMBOS)
    def test_certificate_and_residual(self, op, params, gamma):
        res = shoot_1d_model(op, params, 1.0, gamma)
        lo, hi = res.bracket
        assert lo <= res.lam <= hi
        assert hi - lo <= 1e-10 * res.lam
        assert res.bracket_signs[0] == -res.bracket_signs[1] != 0
        assert res.residual <= 1e-6 * (1 + res.lam)

    @pytest.mark.parametrize("bc", ["dirichlet_both", "dirichlet_left_neumann_right", "neumann_both"])
    def test_sign_structure(self, bc):
        sp = WeightedInterval(1.5, ExprDensity("0.3*s**2 - 0.5*s"))
        res = shoot_weighted_interval(p_lap(2.5), sp, bc, 1.5)
        assert res.residual <= 1e-6 * (1 + res.lam)
        interior = res.eigenfunction[1:-1]
        if bc == "neumann_both":
            assert sign_changes(res.eigenfunction) == 1
        else:
            assert np.all(interior > 0) or np.all(interior < 0)

    def test_model_past_first_zero(self):
        with pytest.raises(DomainError):
            shoot_1d_model(LAP, CurvatureParams(1, 0, 3), 2.0, 1.0)

    def test_gamma_must_match(self):
        with pytest.raises(InvalidParameter):
            shoot_1d_model(p_lap(3), FLAT, 1.0, 1.0)


class TestSerialization:
    def test_json_and_csv(self, tmp_path):
        res = shoot_weighted_interval(LAP, WeightedInterval(1.0, ZERO), "dirichlet_both", 1.0)
        doc = json.loads(res.dumps())
        assert set(doc) >= {"lambda", "residual", "bracket", "bc", "iterations", "grid"}
        path = tmp_path / "eig.csv"
        res.to_csv(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["s", "phi", "phi_s"] and len(rows) == res.grid.size + 1
