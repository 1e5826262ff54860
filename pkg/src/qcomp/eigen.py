"""First eigenvalues of one-dimensional model problems and weighted intervals.

The eigen ODE is ``alpha(|u'|) u'' + drift(s) beta(|u'|) u' = -lam |u|^(gamma-1) u``.
For power-law operators (``alpha = a g^m``, ``beta = b g^m``) it is integrated
in the momentum ``Phi = |u'|^m u'``::

    u'   = sign(Phi) |Phi|^(1/(m+1))
    Phi' = (m+1)/a * (-lam |u|^(gamma-1) u - drift(s) b Phi)

which stays regular where ``u' = 0``. The eigenvalue is located by a
bracketed regula falsi (Illinois variant, with bisection fallback) on a
shooting defect; the final bracket is returned as a certificate.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .errors import (BracketingFailure, DegenerateOperator, DomainError, InvalidParameter,
                     MatchingFailure, NonConvergence)
from .geometry import (CurvatureParams, WeightedInterval, comparison_drift, first_zero)
from .operators import DEFAULT_EPS, evaluate_radial

RTOL = 1e-11
ATOL = 1e-13
FINAL_RTOL = 1e-13
FINAL_ATOL = 1e-15
BISECTION_RTOL = 1e-10
MAX_EXPANSIONS = 20
BC_KINDS = ("dirichlet_both", "dirichlet_left_neumann_right", "neumann_both")


def pi_p(p: float) -> float:
    """Half period of the generalized sine, ``2 pi / (p sin(pi / p))``."""
    return 2.0 * math.pi / (p * math.sin(math.pi / p))


@dataclass
class EigenResult:
    lam: float
    grid: np.ndarray
    eigenfunction: np.ndarray
    derivative: np.ndarray
    residual: float
    iterations: int
    bc: str
    bracket: tuple = (math.nan, math.nan)
    bracket_signs: tuple = (0, 0)
    meta: dict = field(default_factory=dict)
    dense: object = field(default=None, repr=False)

    def shape(self, s):
        """Eigenfunction at arbitrary points (dense output of the integrator)."""
        return self.dense(np.asarray(s, dtype=float))[0]

    def shape_derivative(self, s):
        return self.dense(np.asarray(s, dtype=float))[1]

    def to_json(self):
        return {
            "lambda": self.lam,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "bc": self.bc,
            "iterations": self.iterations,
            "grid": {"start": float(self.grid[0]), "stop": float(self.grid[-1]),
                     "nodes": int(self.grid.size)},
        }

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "phi", "phi_s"])
            for s, u, du in zip(self.grid, self.eigenfunction, self.derivative):
                w.writerow([f"{s:.17g}", f"{u:.17g}", f"{du:.17g}"])

    def dumps(self):
        return json.dumps(self.to_json())


# ---------------------------------------------------------------------------
# ODE right-hand sides


class _Shooter:
    """Integrates the eigen ODE for a fixed operator, drift and homogeneity."""

    def __init__(self, op, drift, gamma, eps=DEFAULT_EPS, rtol=RTOL, atol=ATOL):
        self.op = op
        self.drift = drift
        self.gamma = float(gamma)
        self.eps = eps
        self.rtol, self.atol = rtol, atol
        self.power = op.power
        if self.power is None:
            if float(np.asarray(op.alpha(np.array([1.0])))[0]) <= 0:
                raise DegenerateOperator(f"{op.name}: alpha vanishes, shooting is ill-posed")
        elif self.power.a <= 0:
            raise DegenerateOperator(f"{op.name}: alpha vanishes, shooting is ill-posed")
        # exponent linking u and Phi under rescaling
        self.k = (self.power.m + 1.0) if self.power is not None else 1.0

    def slope_from_momentum(self, Phi):
        if self.power is None:
            return Phi
        return np.sign(Phi) * np.abs(Phi) ** (1.0 / (self.power.m + 1.0))

    def momentum_from_slope(self, du):
        if self.power is None:
            return du
        return np.sign(du) * np.abs(du) ** (self.power.m + 1.0)

    def _source(self, lam, u):
        return -lam * np.sign(u) * np.abs(u) ** self.gamma

    def rhs(self, lam):
        drift, src = self.drift, self._source
        if self.power is not None:
            a, b, m = self.power.a, self.power.b, self.power.m
            inv = 1.0 / (m + 1.0)
            scale = (m + 1.0) / a

            def f(s, y):
                u, Phi = y
                du = math.copysign(abs(Phi) ** inv, Phi)
                return [du, scale * (src(lam, u) - float(drift(s)) * b * Phi)]

            return f
        op, eps = self.op, self.eps

        def f(s, y):
            u, du = y
            g = np.array([max(abs(du), eps)])
            alpha, beta = op.coefficients(g)
            alpha, beta = float(alpha[0]), float(beta[0])
            if alpha <= 0:
                raise DegenerateOperator(f"alpha vanished along the trajectory at s={s:.6g}")
            return [du, (src(lam, u) - float(drift(s)) * beta * du) / alpha]

        return f

    def integrate(self, lam, s0, s1, y0, events=(), dense=False):
        # the stored eigenfunction gets a tighter tolerance than the root search
        rtol, atol = (min(self.rtol, FINAL_RTOL), min(self.atol, FINAL_ATOL)) if dense else (
            self.rtol, self.atol)
        return solve_ivp(self.rhs(lam), (s0, s1), y0, method="DOP853", rtol=rtol,
                         atol=atol, events=list(events) or None, dense_output=dense)

    def residual(self, lam, sol, grid, delta=1e-3, pieces=None, where=False):
        """Max nodal defect of the eigen ODE along the dense solution.

        Power-law operators are checked in momentum form over a small window
        ``[a, b]`` around each node::

            a/(m+1) (Phi(b) - Phi(a)) / (b - a) + mean(b drift Phi + lam |u|^(gamma-1) u)

        which stays meaningful where ``u' = 0`` or where ``|u|^gamma`` is not
        smooth. Other operators go through :func:`evaluate_radial` with a
        five-point ``u''``. Windows never straddle ``breaks`` (points where
        two one-sided solutions were spliced); ``pieces`` lists
        ``(lo, hi, dense)`` for each one-sided solution.
        """
        d = delta * (grid[-1] - grid[0]) / max(grid.size - 1, 1)
        pieces = pieces or [(grid[0], grid[-1], sol)]
        worst, at = 0.0, float(grid[0])
        for lo, hi, piece in pieces:
            mask = (grid >= lo) & (grid <= hi)
            if not mask.any():
                continue
            r = self._piece_residual(lam, piece, grid[mask], lo, hi, d)
            k = int(np.argmax(r))
            if r[k] > worst:
                worst, at = float(r[k]), float(grid[mask][k])
        return (worst, at) if where else worst

    def _piece_residual(self, lam, sol, grid, lo, hi, d):
        a = np.maximum(grid - d, lo)
        b = np.minimum(grid + d, hi)
        if self.power is not None:
            pa, pb, m = self.power.a, self.power.b, self.power.m
            xg, wg = np.polynomial.legendre.leggauss(20)
            pts = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * xg[None, :]
            y = sol(pts.ravel())
            u, Phi = y[0].reshape(pts.shape), y[1].reshape(pts.shape)
            drift = np.array([float(self.drift(x)) for x in pts.ravel()]).reshape(pts.shape)
            lower = pb * drift * Phi - self._source(lam, u)
            mean_lower = 0.5 * (lower @ wg)
            dPhi = (sol(b)[1] - sol(a)[1]) / (b - a)
            defect = pa / (m + 1.0) * dPhi + mean_lower
            return np.abs(defect)
        u, du = sol(grid)
        ddu = _fd_derivative(lambda x: sol(x)[1], grid, lo, hi, d)
        drift = np.array([float(self.drift(x)) for x in grid])
        lhs = evaluate_radial(self.op, drift, du, ddu, grid, self.eps)
        return np.abs(lhs - self._source(lam, u))


def _fd_derivative(fn, x, lo, hi, d):
    """Fourth-order derivative estimate of a vectorized ``fn`` kept inside ``[lo, hi]``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    left = x - 2 * d < lo
    right = (x + 2 * d > hi) & ~left
    mid = ~(left | right)
    if mid.any():
        xm = x[mid]
        out[mid] = (fn(xm - 2 * d) - 8 * fn(xm - d) + 8 * fn(xm + d) - fn(xm + 2 * d)) / (12 * d)
    one_sided = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * d)
    for mask, sign in ((left, 1.0), (right, -1.0)):
        if mask.any():
            xs = x[mask]
            out[mask] = sign * sum(c * fn(xs + sign * k * d) for k, c in enumerate(one_sided))
    return out


def _event(index, direction=-1):
    def ev(s, y):
        return y[index]

    ev.terminal = False
    ev.direction = direction
    return ev


# ---------------------------------------------------------------------------
# bracketed root finding


def _bracketed_root(F, lo, hi, rel_tol=BISECTION_RTOL, max_iter=300):
    """Root of a decreasing defect between ``lo`` (positive) and ``hi`` (negative).

    ``F(x)`` returns ``(sign, value)``; ``value`` may be None when only the
    sign is trustworthy, which forces a bisection step.
    """
    slo, flo = F(lo)
    shi, fhi = F(hi)
    if not (slo > 0 and shi < 0):
        raise BracketingFailure(f"no sign change on [{lo:.6g}, {hi:.6g}]")
    side = 0
    it = 0
    for it in range(1, max_iter + 1):
        width = hi - lo
        if width <= rel_tol * hi:
            break
        floor = 0.45 * rel_tol * hi
        if flo is None or fhi is None or side == 0 and it > 1:
            x = 0.5 * (lo + hi)
        else:
            x = (lo * fhi - hi * flo) / (fhi - flo)
        if not np.isfinite(x):
            x = 0.5 * (lo + hi)
        x = min(max(x, lo + floor), hi - floor)
        sx, fx = F(x)
        if sx > 0:
            if side == 1 and fhi is not None:
                fhi *= 0.5
            lo, flo, side = x, fx, 1
        else:
            if side == -1 and flo is not None:
                flo *= 0.5
            hi, fhi, side = x, fx, -1
    else:
        raise BracketingFailure(f"bracket did not close after {max_iter} iterations")
    return 0.5 * (lo + hi), (lo, hi), it


def _expand_bracket(F, guess):
    lo, hi = 0.5 * guess, 2.0 * guess
    for _ in range(MAX_EXPANSIONS):
        if F(lo)[0] > 0:
            break
        hi, lo = lo, 0.5 * lo
    else:
        raise BracketingFailure(f"no lower bracket down to {lo:.3e}")
    for _ in range(MAX_EXPANSIONS):
        if F(hi)[0] < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketingFailure(f"no upper bracket up to {hi:.3e}")
    return lo, hi


def _guess(op, length, kind):
    """Zero-drift eigenvalue of the matching power-law problem."""
    if op.power is not None:
        a, p = op.power.a, op.power.m + 2.0
        ref = pi_p(p) if p != 2.0 else math.pi
        span = 2.0 * length if kind == "dirichlet_left_neumann_right" else length
        return a * (ref / span) ** p
    alpha1 = float(np.asarray(op.alpha(np.array([1.0])))[0])
    span = 2.0 * length if kind == "dirichlet_left_neumann_right" else length
    return alpha1 * (math.pi / span) ** 2


# ---------------------------------------------------------------------------
# solvers for each boundary configuration


def _check_gamma(op, gamma):
    if op.gamma is None:
        raise InvalidParameter(f"{op.name} is not homogeneous; no eigenvalue problem")
    if not math.isclose(op.gamma, gamma, rel_tol=1e-12):
        raise InvalidParameter(f"{op.name} has homogeneity {op.gamma}, not {gamma}")


def _solve_mixed(shooter, R, guess, nodes=201, slope=1.0):
    """``u(0) = 0, u'(0) = slope``, first zero of ``u'`` exactly at ``R``."""
    y0 = [0.0, float(shooter.momentum_from_slope(slope))]
    ev = _event(1)

    def F(lam):
        sol = shooter.integrate(lam, 0.0, R, y0, events=[ev])
        if sol.status < 0:
            return -1, None
        zeros = sol.t_events[0]
        zeros = zeros[zeros < R * (1 - 1e-14)]
        Phi = float(sol.y[1, -1])
        if zeros.size == 0:
            return (1, Phi) if Phi > 0 else (-1, Phi)
        return (-1, Phi) if zeros.size == 1 else (-1, None)

    lo, hi = _expand_bracket(F, guess)
    lam, bracket, its = _bracketed_root(F, lo, hi)
    sol = shooter.integrate(lam, 0.0, R, y0, dense=True)
    grid = np.linspace(0.0, R, nodes)
    return lam, bracket, its, sol.sol, grid


def _solve_neumann(shooter, L, guess, nodes=201):
    """``u(0) = -1, u'(0) = 0``; ``u'`` returns to zero exactly at ``L``."""
    y0 = [-1.0, 0.0]
    ev = _event(1)

    def F(lam):
        sol = shooter.integrate(lam, 0.0, L, y0, events=[ev])
        if sol.status < 0:
            return -1, None
        zeros = sol.t_events[0]
        zeros = zeros[(zeros > 0) & (zeros < L * (1 - 1e-14))]
        Phi = float(sol.y[1, -1])
        if zeros.size == 0:
            return (1, Phi) if Phi > 0 else (-1, Phi)
        return (-1, Phi) if zeros.size == 1 else (-1, None)

    lo, hi = _expand_bracket(F, guess)
    lam, bracket, its = _bracketed_root(F, lo, hi)
    sol = shooter.integrate(lam, 0.0, L, y0, dense=True)
    grid = np.linspace(0.0, L, nodes)
    return lam, bracket, its, sol.sol, grid


def _solve_two_sided(shooter, L, guess, nodes=201, meet=None):
    """Shoot from both Dirichlet ends and match scale-free log-derivatives at ``meet``."""
    meet = 0.5 * L if meet is None else meet
    kexp = shooter.k
    ev = _event(0)
    yl = [0.0, 1.0]
    yr = [0.0, -1.0]

    def ratio(y):
        u, Phi = y
        return Phi / (abs(u) ** (kexp - 1.0) * u)

    def F(lam):
        left = shooter.integrate(lam, 0.0, meet, yl, events=[ev])
        right = shooter.integrate(lam, L, meet, yr, events=[ev])
        if left.status < 0 or right.status < 0:
            return -1, None
        if left.t_events[0].size or right.t_events[0].size:
            return -1, None
        if left.y[0, -1] <= 0 or right.y[0, -1] <= 0:
            return -1, None
        gap = ratio(left.y[:, -1]) - ratio(right.y[:, -1])
        return (1, gap) if gap > 0 else (-1, gap)

    lo, hi = _expand_bracket(F, guess)
    lam, bracket, its = _bracketed_root(F, lo, hi)
    left = shooter.integrate(lam, 0.0, meet, yl, dense=True)
    right = shooter.integrate(lam, L, meet, yr, dense=True)
    ul, ur = left.y[0, -1], right.y[0, -1]
    if ul <= 0 or ur <= 0:
        raise MatchingFailure("one-sided solutions are not positive at the meeting point")
    c = ul / ur
    cmom = c**kexp
    lsol, rsol = left.sol, right.sol

    def dense(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((2, s.size))
        mask = s <= meet
        if mask.any():
            out[:, mask] = lsol(s[mask])
        if (~mask).any():
            r = rsol(s[~mask])
            out[0, ~mask] = c * r[0]
            out[1, ~mask] = cmom * r[1]
        return out

    def right_scaled(s):
        r = rsol(s)
        return np.vstack([c * r[0], cmom * r[1]])

    grid = np.linspace(0.0, L, nodes)
    gap = abs(ratio(lsol(meet)) - ratio(rsol(meet)))
    pieces = [(0.0, meet, lsol), (meet, L, right_scaled)]
    return lam, bracket, its, dense, grid, gap, pieces


def _finish(shooter, lam, bracket, its, dense, grid, bc, pieces=None, **meta):
    y = dense(grid)
    u = y[0]
    du = shooter.slope_from_momentum(y[1])
    res = shooter.residual(lam, dense, grid, pieces=pieces)

    def dense_slope(s):
        z = dense(s)
        return np.vstack([z[0], shooter.slope_from_momentum(z[1])])

    return EigenResult(lam, grid, u, du, res, its, bc, tuple(bracket), (1, -1), meta, dense_slope)


def shoot_1d_model(op, params: CurvatureParams, R: float, gamma: float, *, nodes=201,
                   slope=1.0, eps=DEFAULT_EPS) -> EigenResult:
    """First eigenvalue of the model problem on ``[0, R]``:
    ``alpha u'' - (N-1) T_{kappa,Lambda} beta u' = -lam |u|^(gamma-1) u``,
    ``u(0) = 0``, ``u'(R) = 0``. For ``N = inf`` the drift is dropped.
    """
    _check_gamma(op, gamma)
    if params.finite_N and first_zero(params) <= R:
        raise DomainError(f"C_(kappa={params.kappa}, Lambda={params.lam}) vanishes in [0, {R}]")
    drift = comparison_drift(params)
    shooter = _Shooter(op, lambda s: drift(s), gamma, eps)
    lam, bracket, its, dense, grid = _solve_mixed(shooter, R, _guess(op, R, "dirichlet_left_neumann_right"),
                                                  nodes, slope)
    return _finish(shooter, lam, bracket, its, dense, grid, "dirichlet_left_neumann_right",
                   model=params.to_json(), R=R)


def shoot_weighted_interval(op, space: WeightedInterval, bc: str, gamma: float, *, nodes=201,
                            eps=DEFAULT_EPS, meet=None) -> EigenResult:
    """First (Dirichlet-type) or first nonzero (Neumann) eigenvalue with drift ``-f'``."""
    _check_gamma(op, gamma)
    if bc not in BC_KINDS:
        raise InvalidParameter(f"bc must be one of {BC_KINDS}")
    d1 = space.density.d1
    shooter = _Shooter(op, lambda s: -d1(s), gamma, eps)
    L = space.length
    guess = _guess(op, L, bc)
    if bc == "dirichlet_left_neumann_right":
        out = _solve_mixed(shooter, L, guess, nodes)
        return _finish(shooter, *out, bc)
    if bc == "neumann_both":
        out = _solve_neumann(shooter, L, guess, nodes)
        return _finish(shooter, *out, bc)
    lam, bracket, its, dense, grid, gap, pieces = _solve_two_sided(shooter, L, guess, nodes, meet)
    return _finish(shooter, lam, bracket, its, dense, grid, bc, pieces=pieces, matching_gap=gap)


def neumann_1d_model(op, kappa: float, params: CurvatureParams, D: float, gamma: float,
                     variant: str = "finite_N", *, nodes=201, eps=DEFAULT_EPS) -> EigenResult:
    """First nonzero Neumann eigenvalue of the model on a segment of length ``D``.

    Both variants use the odd symmetry of the model drift about the midpoint:
    the eigenfunction is odd, so it suffices to solve on ``[0, D/2]`` with
    ``u(0) = 0`` and ``u'(D/2) = 0``. The drift is ``-(N-1) T_{kappa,0}(s)`` for
    finite ``N`` and ``-kappa s`` for ``N = inf``.
    """
    _check_gamma(op, gamma)
    half = 0.5 * D
    if variant == "finite_N":
        model = CurvatureParams(kappa, 0.0, params.bigN, params.n)
        if not model.finite_N:
            raise InvalidParameter("finite_N variant needs finite N")
        if first_zero(model) <= half:
            raise DomainError(f"C_(kappa={kappa}, 0) vanishes in [0, D/2]")
        drift = comparison_drift(model)
        shooter = _Shooter(op, lambda s: drift(s), gamma, eps)
    elif variant == "infinite_N":
        shooter = _Shooter(op, lambda s: -kappa * s, gamma, eps)
    else:
        raise InvalidParameter("variant must be 'finite_N' or 'infinite_N'")
    out = _solve_mixed(shooter, half, _guess(op, half, "dirichlet_left_neumann_right"), nodes)
    return _finish(shooter, *out, "neumann_odd_half", variant=variant, kappa=kappa, D=D)


def neumann_shift_model(op, kappa: float, D: float, gamma: float, *, nodes=201,
                        eps=DEFAULT_EPS) -> EigenResult:
    """Neumann problem on ``[0, D]`` with drift ``-kappa s`` (not symmetrized)."""
    _check_gamma(op, gamma)
    shooter = _Shooter(op, lambda s: -kappa * s, gamma, eps)
    out = _solve_neumann(shooter, D, _guess(op, D, "neumann_both"), nodes)
    return _finish(shooter, *out, "neumann_both", kappa=kappa, D=D)


# ---------------------------------------------------------------------------
# variational cross-check


def _rayleigh_discrete(space, p, bc, m, max_iter, tol, u0=None):
    L = space.length
    s = np.linspace(0.0, L, m + 1)
    h = L / m
    mid = 0.5 * (s[:-1] + s[1:])
    w_mid = np.exp(-np.asarray(space.density(mid), dtype=float))
    w_node = np.exp(-np.asarray(space.density(s), dtype=float))
    trap = np.full(m + 1, h)
    trap[[0, -1]] *= 0.5
    mass = trap * w_node

    free = np.ones(m + 1, dtype=bool)
    if bc in ("dirichlet_both", "dirichlet_left_neumann_right"):
        free[0] = False
    if bc == "dirichlet_both":
        free[-1] = False

    if u0 is None:
        if bc == "dirichlet_both":
            u = np.sin(math.pi * s / L)
        elif bc == "dirichlet_left_neumann_right":
            u = np.sin(0.5 * math.pi * s / L)
        else:
            u = -np.cos(math.pi * s / L)
    else:
        u = np.asarray(u0, dtype=float).copy()
    u[~free] = 0.0

    def project(v):
        if bc != "neumann_both":
            return v

        def moment(c):
            d = v - c
            return float(np.sum(mass * np.sign(d) * np.abs(d) ** (p - 1)))

        c = brentq(moment, float(v.min()), float(v.max()), xtol=1e-15, rtol=1e-15)
        return v - c

    def normalize(v):
        return v / (np.sum(mass * np.abs(v) ** p)) ** (1.0 / p)

    def quotient(v):
        d = np.diff(v) / h
        num = np.sum(h * w_mid * np.abs(d) ** p)
        den = np.sum(mass * np.abs(v) ** p)
        return num / den

    def gradient(v):
        d = np.diff(v) / h
        flux = w_mid * p * np.sign(d) * np.abs(d) ** (p - 1)
        gn = np.zeros_like(v)
        gn[1:] += flux
        gn[:-1] -= flux
        gd = mass * p * np.sign(v) * np.abs(v) ** (p - 1)
        num = np.sum(h * w_mid * np.abs(d) ** p)
        den = np.sum(mass * np.abs(v) ** p)
        return (gn - (num / den) * gd) / den

    def precondition(v, g, r):
        # frozen weighted stiffness A(v); a unit step along -A^{-1} g / p is one
        # nonlinear inverse iteration v -> R A(v)^{-1} B(v) v
        d = np.abs(np.diff(v) / h)
        k = w_mid * np.maximum(d, 1e-3 * float(d.max())) ** (p - 2) / h
        diag = np.zeros(m + 1)
        diag[1:] += k
        diag[:-1] += k
        if bc == "neumann_both":
            # constants span the kernel of A; a small mass shift makes it invertible
            av = np.abs(v)
            diag += 0.1 * r * mass * np.maximum(av, 1e-3 * float(av.max())) ** (p - 2)
        idx = np.nonzero(free)[0]
        n = idx.size
        ab = np.zeros((3, n))
        ab[1] = diag[idx]
        ab[0, 1:] = -k[idx[:-1]]
        ab[2, :-1] = -k[idx[:-1]]
        out = np.zeros_like(v)
        out[idx] = solve_banded((1, 1), ab, g[idx]) / p
        return out

    u = normalize(project(u))
    r = quotient(u)
    gnorm = np.inf
    for it in range(1, max_iter + 1):
        g = gradient(u)
        g[~free] = 0.0
        direction = -precondition(u, g, r)
        gnorm = float(np.sqrt(abs(np.dot(g, direction))))
        slope = float(np.dot(g, direction))
        step = 1.0
        while True:
            trial = u + step * direction
            trial[~free] = 0.0
            trial = normalize(project(trial))
            rt = quotient(trial)
            if rt <= r + 1e-4 * step * slope or step < 1e-10:
                break
            step *= 0.5
        if rt > r:
            # no descent left at floating-point resolution
            return r, u, it, gnorm
        change = r - rt
        u, r = trial, rt
        if change <= tol * r:
            return r, u, it, gnorm
    raise NonConvergence(f"Rayleigh descent did not settle in {max_iter} iterations "
                         f"(value {r:.12g}, gradient norm {gnorm:.3e})", last_value=r,
                         residual=gnorm)


def rayleigh_p(space: WeightedInterval, p: float, bc: str, *, m=None, max_iter=2000,
               tol=1e-14, extrapolate=True) -> float:
    """Minimize ``int |u'|^p e^{-f} / int |u|^p e^{-f}`` by preconditioned descent.

    The search metric is the weighted ``W^{1,p}`` stiffness frozen at the
    current iterate (a Sobolev gradient). For ``neumann_both`` iterates are
    shifted so that ``int |u|^(p-2) u e^{-f} = 0``, the constraint satisfied by
    first nonzero Neumann eigenfunctions. Two grids are combined by
    Richardson extrapolation (second order) unless ``extrapolate=False``.
    """
    if not p > 1:
        raise InvalidParameter("p must exceed 1")
    if bc not in BC_KINDS:
        raise InvalidParameter(f"bc must be one of {BC_KINDS}")
    m = m or max(space.m, 400)
    r1, u1, _, _ = _rayleigh_discrete(space, p, bc, m, max_iter, tol)
    if not extrapolate:
        return float(r1)
    fine_start = np.interp(np.linspace(0, space.length, 2 * m + 1),
                           np.linspace(0, space.length, m + 1), u1)
    r2, _, _, _ = _rayleigh_discrete(space, p, bc, 2 * m, max_iter, tol, fine_start)
    return float((4.0 * r2 - r1) / 3.0)
