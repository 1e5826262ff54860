"""Numerical checks of the comparison inequalities.

Every check returns a :class:`~qcomp.report.CheckReport`. Tolerances for
evolved quantities scale with the discretization, ``tol_model * (h + dt)``;
checks of closed-form identities use a fixed floor that is recorded in the
report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy

from .errors import DegenerateFit, InvalidParameter, PreconditionFailed, TimeMismatch
from .geometry import CurvatureParams, effective_bounds, parse_expression, t_kappa_lambda
from .operators import DEFAULT_EPS, evaluate_radial
from .report import CheckReport

TOL_MODEL = 20.0
IDENTITY_TOL = 1e-8
EIGEN_REL_TOL = 1e-4


# ---------------------------------------------------------------------------
# modulus of continuity


@dataclass
class ModulusCurve:
    """``omega(s) = max_{|x - y| <= 2s} (u(y) - u(x)) / 2`` on the half-lag grid."""

    s_grid: np.ndarray
    omega: np.ndarray
    time: float = 0.0

    def to_columns(self):
        return {"s": self.s_grid, "omega": self.omega}


def _values_grid_time(obj):
    if hasattr(obj, "values") and hasattr(obj, "grid"):
        return np.asarray(obj.values, float), np.asarray(obj.grid, float), float(
            getattr(obj, "time", 0.0))
    raise InvalidParameter("expected a Field1D-like object with values and grid")


def _lag_maxima(u):
    """``max_i |u[i+k] - u[i]|`` for every lag ``k``; O(m^2)."""
    n = u.size
    out = np.zeros(n)
    for k in range(1, n):
        out[k] = np.max(np.abs(u[k:] - u[:-k]))
    return out


def modulus_of_continuity(field) -> ModulusCurve:
    """Exact discrete modulus of a field on a uniform grid.

    Node ``k`` of the result sits at ``s = k h / 2`` (pairs ``k`` cells apart),
    so the curve spans ``[0, D/2]`` with ``D`` the interval length.
    """
    u, grid, time = _values_grid_time(field)
    h = grid[1] - grid[0]
    omega = 0.5 * np.maximum.accumulate(_lag_maxima(u))
    s = 0.5 * h * np.arange(u.size)
    return ModulusCurve(s, omega, time)


def _slice_index(profile, t):
    if profile.t_grid.size == 1:
        return 0
    k = profile.time_index(t)
    if k is None:
        raise TimeMismatch(f"profile has no slice at t={t:.12g}")
    return k


def _profile_on(profile, k, s):
    """Profile slice ``k`` evaluated at ``s`` (exact on coinciding nodes)."""
    smax = profile.s_grid[-1]
    if np.max(s) > smax * (1 + 1e-12) + 1e-14:
        raise InvalidParameter(f"profile covers [0, {smax:.6g}] but {np.max(s):.6g} is needed")
    return profile.at(np.minimum(s, smax), k)


def check_mc_dominated(traj, profile, tol_model: float = TOL_MODEL, space=None) -> CheckReport:
    """``omega(s, t) <= phi(s, t) + tol_model (h + dt)`` at every stored time.

    With ``space`` given, the Dirichlet-case start condition
    ``|u(x, 0)| <= phi(d(x, boundary), 0)`` is audited first.
    """
    h = float(traj.grid[1] - traj.grid[0])
    tol = tol_model * (h + float(traj.dt))
    if space is not None:
        d = space.distance_to_boundary(traj.grid)
        start = np.abs(traj.values[0]) - _profile_on(profile, _slice_index(profile, traj.times[0]), d)
        if np.max(start) > tol:
            raise PreconditionFailed(f"|u0| exceeds phi0(d) by {np.max(start):.3e}")
    worst, loc = -np.inf, ()
    interior = -np.inf
    per_time = []
    for j, t in enumerate(traj.times):
        k = _slice_index(profile, t)
        curve = modulus_of_continuity(_Snapshot(traj.grid, traj.values[j], t))
        gap = curve.omega - _profile_on(profile, k, curve.s_grid)
        i = int(np.argmax(gap))
        per_time.append(float(gap[i]))
        interior = max(interior, float(np.max(gap[1:])))
        if gap[i] > worst:
            worst, loc = float(gap[i]), (i, float(t))
    # s = 0 always gives omega = phi = 0; the interior maximum shows how close the
    # barrier comes elsewhere
    return CheckReport.from_violation("modulus dominated by barrier", worst, tol, loc, h=h,
                                      dt=float(traj.dt), per_time=per_time,
                                      interior_worst=interior)


@dataclass
class _Snapshot:
    grid: np.ndarray
    values: np.ndarray
    time: float = 0.0


# ---------------------------------------------------------------------------
# decay against a distance-to-boundary barrier


def _boundary_distance(traj, space):
    """Distance to the Dirichlet part of the boundary (reflecting ends do not count)."""
    s = np.asarray(traj.grid, float)
    bc = traj.bc
    lo, hi = s[0], s[-1]
    left = bc is None or bc.left == "dirichlet"
    right = bc is None or bc.right == "dirichlet"
    if left and right:
        return np.minimum(s - lo, hi - s)
    if left:
        return s - lo
    if right:
        return hi - s
    raise InvalidParameter("decay needs a Dirichlet end")


def check_decay(traj, profile, space=None, tol_model: float = TOL_MODEL,
                precondition_tol: float = 1e-12) -> CheckReport:
    """``u(s, t) <= phi(d(s), t)`` at every stored time, ``d`` the distance to the Dirichlet ends.

    ``metadata['slack']`` is ``max(phi - u)`` over nodes and times; for the
    separable eigen barrier started on itself it is the sharpness gap.
    """
    h = float(traj.grid[1] - traj.grid[0])
    tol = tol_model * (h + float(traj.dt))
    d = _boundary_distance(traj, space)
    k0 = _slice_index(profile, traj.times[0])
    excess0 = traj.values[0] - _profile_on(profile, k0, d)
    if np.max(excess0) > precondition_tol:
        i = int(np.argmax(excess0))
        raise PreconditionFailed(f"u0 exceeds the barrier by {excess0[i]:.3e} at s={traj.grid[i]:.4g}")
    worst, loc, slack = -np.inf, (), -np.inf
    for j, t in enumerate(traj.times):
        gap = traj.values[j] - _profile_on(profile, _slice_index(profile, t), d)
        i = int(np.argmax(gap))
        if gap[i] > worst:
            worst, loc = float(gap[i]), (i, float(t))
        slack = max(slack, float(np.max(-gap)))
    return CheckReport.from_violation("decay below boundary barrier", worst, tol, loc, h=h,
                                      dt=float(traj.dt), slack=slack)


# ---------------------------------------------------------------------------
# steady supersolution checks


@dataclass
class RadialProfile:
    """A profile with exact first and second derivatives."""

    value: object
    d1: object
    d2: object
    text: str = ""

    @classmethod
    def from_expression(cls, text):
        expr = parse_expression(text)
        s = sympy.Symbol("s", real=True)
        fns = [sympy.lambdify(s, e, ["scipy", "numpy"]) for e in (expr, sympy.diff(expr, s),
                                                       sympy.diff(expr, s, 2))]

        def vec(fn):
            return lambda x: np.broadcast_to(np.asarray(fn(np.asarray(x, float)), float),
                                             np.shape(x)).astype(float)

        return cls(*(vec(f) for f in fns), text=str(text))


def _bounds_hold(space, params, slack=1e-9):
    k_eff, l_eff = effective_bounds(space, params)
    ok = k_eff >= params.kappa - slack and l_eff >= params.lam - slack
    return ok, k_eff, l_eff


def check_supersolution_boundary(profile: RadialProfile, space, op, params: CurvatureParams,
                                 tol: float = IDENTITY_TOL, eps=DEFAULT_EPS) -> CheckReport:
    """``Q[phi(d)] <= (alpha phi'' - (N-1) T beta phi')(d)`` away from the midpoint.

    ``d = min(s, L - s)``; the node at the midpoint is skipped. A report with
    ``passed=False`` and ``metadata['precondition']`` is returned when the
    claimed ``(kappa, Lambda)`` exceed the effective bounds of the space.
    """
    ok, k_eff, l_eff = _bounds_hold(space, params)
    s = space.grid
    L = space.length
    if not ok:
        return CheckReport("supersolution of distance profile", False, math.inf, (), tol,
                           {"precondition": f"claimed (kappa, Lambda)=({params.kappa}, {params.lam}) "
                                            f"exceed effective ({k_eff:.6g}, {l_eff:.6g})"})
    keep = np.abs(s - 0.5 * L) > 0.5 * space.h
    s = s[keep]
    d = np.minimum(s, L - s)
    sign = np.where(s < 0.5 * L, 1.0, -1.0)
    p0, p1, p2 = profile.value(d), profile.d1(d), profile.d2(d)
    if np.min(p1) < 0:
        raise PreconditionFailed("profile must be non-decreasing")
    lhs = evaluate_radial(op, space.drift, sign * p1, p2, s, eps, u=p0)
    if params.finite_N:
        model_drift = -(params.bigN - 1.0) * t_kappa_lambda(params, d)
    else:
        model_drift = np.zeros_like(d)
    rhs = evaluate_radial(op, model_drift, p1, p2, d, eps, u=p0)
    gap = lhs - rhs
    i = int(np.argmax(gap))
    return CheckReport.from_violation("supersolution of distance profile", gap[i], tol,
                                      (int(np.nonzero(keep)[0][i]),), slack=float(-np.max(gap)),
                                      min_slack=float(-np.max(gap)), kappa_eff=k_eff,
                                      lambda_eff=l_eff)


def _t_kappa_zero(kappa, t):
    """``T_{kappa,0}``; raises DomainError where ``C_{kappa,0}`` vanishes."""
    return t_kappa_lambda(CurvatureParams(kappa, 0.0), t)


def check_two_point_drift(space, params: CurvatureParams, tol: float = IDENTITY_TOL) -> CheckReport:
    """``f'(y) - f'(x) >= 2 (N-1) T_{kappa,0}((y-x)/2)`` (finite N) or ``>= kappa (y - x)`` over all node pairs."""
    s = space.grid
    fp = np.asarray(space.density.d1(s), float)
    i, j = np.triu_indices(s.size, k=1)
    lhs = fp[j] - fp[i]
    sep = s[j] - s[i]
    if params.finite_N:
        rhs = 2.0 * (params.bigN - 1.0) * _t_kappa_zero(params.kappa, 0.5 * sep)
    else:
        rhs = params.kappa * sep
    gap = rhs - lhs
    w = int(np.argmax(gap))
    k_eff, _ = effective_bounds(space, params)
    ok = k_eff >= params.kappa - 1e-9
    return CheckReport.from_violation("two-point drift inequality", gap[w], tol,
                                      (int(i[w]), int(j[w])), slack=float(-np.max(gap)),
                                      ricci_hypothesis_holds=bool(ok), kappa_eff=k_eff)


# ---------------------------------------------------------------------------
# gradient bounds through the inverse barrier


def check_gradient_bound(traj, inverse, tol=None, tol_model: float = TOL_MODEL,
                         range_tol: float = 0.0) -> CheckReport:
    """Pairwise ``Psi(u(y)) - Psi(u(x)) <= |y - x|`` and pointwise ``|Du| <= phi'(Psi(u))``.

    ``traj`` is a Trajectory or a single Field1D (a steady state). ``inverse``
    is an :class:`~qcomp.comparison.InverseProfile`; single-slice barriers are
    used at every time.
    """
    if hasattr(traj, "times"):
        times, rows, dt = traj.times, traj.values, float(traj.dt)
    else:
        times, rows, dt = [float(getattr(traj, "time", 0.0))], [traj.values], 0.0
    grid = np.asarray(traj.grid, float)
    h = float(grid[1] - grid[0])
    tol = tol_model * (h + dt) if tol is None else tol
    profile = inverse.profile
    worst_pair, loc_pair = -np.inf, ()
    worst_point, loc_point = -np.inf, ()
    for t, u in zip(times, rows):
        k = _slice_index(profile, t)
        psi = inverse.psi(u, k, range_tol)
        i, j = np.triu_indices(grid.size, k=1)
        pair = np.abs(psi[j] - psi[i]) - (grid[j] - grid[i])
        w = int(np.argmax(pair))
        if pair[w] > worst_pair:
            worst_pair, loc_pair = float(pair[w]), (int(i[w]), int(j[w]), float(t))
        du = np.abs(u[2:] - u[:-2]) / (2 * h)
        bound = inverse.slope_at_value(u[1:-1], k, range_tol)
        point = du - bound
        w = int(np.argmax(point))
        if point[w] > worst_point:
            worst_point, loc_point = float(point[w]), (w + 1, float(t))
    worst = max(worst_pair, worst_point)
    loc = loc_pair if worst_pair >= worst_point else loc_point
    return CheckReport.from_violation("gradient bound from inverse barrier", worst, tol, loc,
                                      pairwise=worst_pair, pointwise=worst_point, h=h, dt=dt)


# ---------------------------------------------------------------------------
# eigenvalues and decay rates


def _eigen_converged(res):
    return res.residual <= 1e-6 * (1.0 + res.lam)


def check_eigen_comparison(lambda_M, lambda_model, rel_tol: float = EIGEN_REL_TOL) -> CheckReport:
    """Pass iff ``lambda_M >= lambda_model (1 - rel_tol)``; the violation is the relative deficit."""
    meta = {"lambda_M": lambda_M.lam, "lambda_model": lambda_model.lam,
            "gap": lambda_M.lam - lambda_model.lam,
            "rel_gap": (lambda_M.lam - lambda_model.lam) / lambda_model.lam}
    for tag, res in (("M", lambda_M), ("model", lambda_model)):
        if not _eigen_converged(res):
            meta["precondition"] = f"{tag} residual {res.residual:.3e} above 1e-6 (1 + lambda)"
            return CheckReport("eigenvalue comparison", False, math.inf, (), rel_tol, meta)
    deficit = (lambda_model.lam - lambda_M.lam) / lambda_model.lam
    return CheckReport.from_violation("eigenvalue comparison", deficit, rel_tol, (), **meta)


def decay_rate_estimate(traj, window: float = 0.5, floor: float = 1e-250) -> float:
    """Least-squares decay rate of ``log ||u(., t)||_inf`` over the last ``window`` of the run."""
    norms = traj.sup_norms()
    t = np.asarray(traj.times, float)
    keep = t >= t[-1] - window * (t[-1] - t[0])
    if keep.sum() < 2:
        raise DegenerateFit("fewer than two snapshots in the fit window")
    n = norms[keep]
    if np.min(n) <= floor or not np.all(np.isfinite(n)):
        raise DegenerateFit("sup-norm reached numerical zero")
    if np.any(np.diff(n) >= 0):
        raise DegenerateFit("sup-norm is not decreasing over the fit window")
    slope = np.polyfit(t[keep], np.log(n), 1)[0]
    return float(-slope)
