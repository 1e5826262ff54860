"""One-dimensional barriers: evolved comparison profiles, their inverses and
steady barrier ODEs.

A profile ``phi(s, t)`` is stored as a space-time table on a uniform
``s``-grid. Evolved profiles solve the model inequality with equality, which
gives the tightest admissible barrier.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import scheme
from .errors import (DomainExhausted, InvalidParameter, MonotonicityLost, NotInvertible,
                     RangeError, SlopeCollapse)
from .operators import DEFAULT_EPS, NO_SOURCE
from .report import CheckReport
from .scheme import Boundary


@dataclass
class ComparisonProfile:
    s_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray      # (len(t_grid), len(s_grid))
    derivative: np.ndarray  # same shape
    dt: float = 0.0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_table(cls, s_grid, t_grid, values, dt=0.0, **meta):
        s_grid = np.asarray(s_grid, dtype=float)
        values = np.atleast_2d(np.asarray(values, dtype=float))
        deriv = np.gradient(values, s_grid, axis=1, edge_order=2)
        return cls(s_grid, np.atleast_1d(np.asarray(t_grid, dtype=float)), values, deriv, dt, meta)

    @classmethod
    def separable(cls, s_grid, t_grid, shape, rate, shape_derivative=None, **meta):
        """``phi(s, t) = exp(-rate t) shape(s)``."""
        s_grid = np.asarray(s_grid, dtype=float)
        t_grid = np.asarray(t_grid, dtype=float)
        base = np.asarray(shape(s_grid), dtype=float)
        decay = np.exp(-rate * t_grid)[:, None]
        if shape_derivative is None:
            dbase = np.gradient(base, s_grid, edge_order=2)
        else:
            dbase = np.asarray(shape_derivative(s_grid), dtype=float)
        return cls(s_grid, t_grid, decay * base, decay * dbase, 0.0, meta)

    @property
    def h(self) -> float:
        return float(self.s_grid[1] - self.s_grid[0])

    def slope_scaled(self, c) -> "ComparisonProfile":
        """``phi(c s, t)``: same values on the grid ``s / c``, slopes times ``c``."""
        return ComparisonProfile(self.s_grid / c, self.t_grid, self.values.copy(),
                                 c * self.derivative, self.dt, dict(self.meta, slope_scale=c))

    def time_index(self, t, rtol=1e-9):
        k = int(np.argmin(np.abs(self.t_grid - t)))
        if abs(self.t_grid[k] - t) > rtol * max(1.0, abs(t)):
            return None
        return k

    def at(self, s, k):
        """Monotone interpolation of slice ``k`` at arbitrary ``s``."""
        return PchipInterpolator(self.s_grid, self.values[k], extrapolate=False)(s)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "s", "phi", "phi_s"])
            for k, t in enumerate(self.t_grid):
                for i, s in enumerate(self.s_grid):
                    w.writerow([f"{t:.17g}", f"{s:.17g}", f"{self.values[k, i]:.17g}",
                                f"{self.derivative[k, i]:.17g}"])


def _times_plan(t_end, dt, snapshot_times, snapshot_every):
    """Times at which the table stores a slice, starting at 0."""
    if snapshot_times is None:
        n = max(1, math.ceil(t_end / dt - 1e-9))
        every = snapshot_every or n
        marks = [k * (t_end / n) for k in range(0, n + 1, every)]
        if not math.isclose(marks[-1], t_end):
            marks.append(t_end)
        snapshot_times = marks
    times = np.asarray(snapshot_times, dtype=float)
    if times[0] != 0.0:
        times = np.concatenate([[0.0], times])
    return times


def evolve_profile(op, drift, source=NO_SOURCE, phi0=None, s_grid=None,
                   bc="pinned_left+neumann_right", dt=None, t_end=1.0, *, snapshot_times=None,
                   snapshot_every=None, eps=DEFAULT_EPS, cfl=0.9, claim_monotone=True):
    """Explicit monotone evolution of ``phi_t = alpha phi'' + drift beta phi' + q``.

    ``phi0`` is an array on ``s_grid`` or a callable. When ``snapshot_times``
    is given the step is shortened inside each interval so every requested
    time is hit exactly. Raises MonotonicityLost if a claimed monotone profile
    dips below ``-10 h`` in slope.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    h = float(s_grid[1] - s_grid[0])
    if not np.allclose(np.diff(s_grid), h, rtol=1e-9, atol=0):
        raise InvalidParameter("s_grid must be uniform")
    phi = np.asarray(phi0(s_grid) if callable(phi0) else phi0, dtype=float).copy()
    # pinned ends hold their initial values
    bc = Boundary.parse(bc, (phi[0], phi[-1]))
    bvals = np.asarray(drift(s_grid) if callable(drift) else np.broadcast_to(drift, s_grid.shape),
                       dtype=float)
    if dt is None:
        dt = scheme.stable_dt(phi, h, bvals, op, eps, bc, cfl)
    times = _times_plan(t_end, dt, snapshot_times, snapshot_every)
    tol_mono = 10.0 * h
    out = [phi.copy()]
    t = 0.0
    for t_next in times[1:]:
        n = max(1, math.ceil((t_next - t) / dt - 1e-9))
        step = (t_next - t) / n
        t0 = t
        for k in range(n):
            phi, _ = scheme.explicit_step(phi, step, h, bvals, op, eps, bc, t=t0 + k * step,
                                          cfl=cfl, q=source.q)
        t = t_next
        if claim_monotone:
            dphi = np.diff(phi) / h
            if np.min(dphi) < -tol_mono:
                i = int(np.argmin(dphi))
                raise MonotonicityLost(f"phi' = {dphi[i]:.3e} at s={s_grid[i]:.4g}, t={t:.4g}")
        out.append(phi.copy())
    return ComparisonProfile.from_table(s_grid, times, np.array(out), dt,
                                        bc=bc.to_json(), operator=op.to_json())


THEOREM_HYPOTHESES = {
    "MC_Dirichlet": ("monotone", "concave", "pinned", "inequality"),
    "MC_Neumann": ("monotone", "inequality"),
    "Decay": ("monotone", "pinned", "inequality"),
}


def check_profile_admissible(profile: ComparisonProfile, for_theorem: str, op=None, drift=None,
                             source=NO_SOURCE, eps=DEFAULT_EPS) -> CheckReport:
    """Audit each hypothesis the chosen estimate places on the barrier.

    The differential inequality ``phi_t >= alpha phi'' + drift beta phi' + q``
    is checked at interior nodes and stored times ``t > 0`` (only when ``op``
    and ``drift`` are given) with tolerance ``10 (h^2 + dt_table)``;
    ``dt_table`` is the largest gap between stored times, which bounds the
    error of the tabulated ``phi_t``.
    """
    if for_theorem not in THEOREM_HYPOTHESES:
        raise InvalidParameter(f"unknown theorem key {for_theorem!r}")
    h = profile.h
    phi = profile.values
    items = []

    def add(name, viol, tol, loc):
        items.append({"name": name, "passed": bool(viol <= tol), "worst_violation": float(viol),
                      "tolerance": float(tol), "location": list(loc)})

    for hyp in THEOREM_HYPOTHESES[for_theorem]:
        if hyp == "monotone":
            d = -profile.derivative
            k, i = np.unravel_index(np.argmax(d), d.shape)
            add("phi' >= 0", d[k, i], 10.0 * h, (int(i), float(profile.t_grid[k])))
        elif hyp == "concave":
            d2 = (phi[:, 2:] - 2 * phi[:, 1:-1] + phi[:, :-2]) / h**2
            k, i = np.unravel_index(np.argmax(d2), d2.shape)
            add("phi'' <= 0", d2[k, i], 10.0 * h, (int(i) + 1, float(profile.t_grid[k])))
        elif hyp == "pinned":
            d = np.abs(phi[:, 0])
            k = int(np.argmax(d))
            add("phi(0, t) = 0", d[k], 1e-12, (0, float(profile.t_grid[k])))
        elif hyp == "inequality" and op is not None and drift is not None:
            if phi.shape[0] < 2:
                continue
            gap = float(np.max(np.diff(profile.t_grid)))
            phi_t = np.gradient(phi, profile.t_grid, axis=0, edge_order=1)
            dphi = (phi[:, 2:] - phi[:, :-2]) / (2 * h)
            d2 = (phi[:, 2:] - 2 * phi[:, 1:-1] + phi[:, :-2]) / h**2
            s_in = profile.s_grid[1:-1]
            b = drift(s_in) if callable(drift) else drift
            worst, loc = -np.inf, ()
            # phi_t at t = 0 is one-sided and sees the initial layer of
            # incompatible data, so the audit starts at the second slice
            for k, t in enumerate(profile.t_grid):
                if k == 0:
                    continue
                g = np.maximum(np.abs(dphi[k]), eps)
                alpha, beta = op.coefficients(g, phi[k, 1:-1], t)
                rhs = alpha * d2[k] + beta * b * dphi[k] + source.q(g, phi[k, 1:-1], t)
                defect = rhs - phi_t[k, 1:-1]
                i = int(np.argmax(defect))
                if defect[i] > worst:
                    worst, loc = float(defect[i]), (i + 1, float(t))
            add("phi_t >= model operator", worst, 10.0 * (h**2 + gap), loc)

    passed = all(it["passed"] for it in items)
    worst = max((it["worst_violation"] - it["tolerance"] for it in items), default=0.0)
    return CheckReport(f"profile admissible for {for_theorem}", passed, worst, (), 0.0,
                       {"hypotheses": items})


@dataclass
class InverseProfile:
    """Per-slice inverse ``Psi(., t)`` of a strictly increasing profile."""

    profile: ComparisonProfile
    _inv: list = field(default_factory=list, repr=False)
    _slope: list = field(default_factory=list, repr=False)

    def range(self, k):
        return float(self.profile.values[k, 0]), float(self.profile.values[k, -1])

    def _check_range(self, v, k, tol):
        lo, hi = self.range(k)
        v = np.asarray(v, dtype=float)
        if np.min(v) < lo - tol or np.max(v) > hi + tol:
            raise RangeError(f"values [{np.min(v):.6g}, {np.max(v):.6g}] exit barrier range "
                             f"[{lo:.6g}, {hi:.6g}] at slice {k}")
        return np.clip(v, lo, hi)

    def psi(self, v, k=0, tol=0.0):
        return self._inv[k](self._check_range(v, k, tol))

    def slope_at_value(self, v, k=0, tol=0.0):
        """``phi'(Psi(v))``."""
        return self._slope[k](self.psi(v, k, tol))


def invert_profile(profile: ComparisonProfile) -> InverseProfile:
    """Monotone piecewise-cubic inverse of every time slice."""
    dmin = float(np.min(profile.derivative))
    if dmin <= 0 or np.any(np.diff(profile.values, axis=1) <= 0):
        raise NotInvertible(f"profile is not strictly increasing (min phi' = {dmin:.3e})")
    inv = InverseProfile(profile)
    for k in range(len(profile.t_grid)):
        inv._inv.append(PchipInterpolator(profile.values[k], profile.s_grid))
        inv._slope.append(PchipInterpolator(profile.s_grid, profile.derivative[k]))
    return inv


def barrier_elliptic(op, source, kappa, u_range, c, *, a=0.0, m=400, max_span=1e3,
                     eps=DEFAULT_EPS, rtol=1e-10, atol=1e-12) -> ComparisonProfile:
    """Integrate ``alpha(phi, phi') phi'' - kappa s beta(phi, phi') phi' + b(phi, phi') = 0``.

    Starts at ``phi(a) = inf_u`` with slope ``c`` and stops where ``phi`` reaches
    ``sup_u`` (that point is ``b_c``). The result is one time slice sampled on
    ``m + 1`` uniform nodes of ``[a, b_c]``.
    """
    lo, hi = map(float, u_range)
    if not hi > lo:
        raise InvalidParameter("u_range must be increasing")
    if not c > 0:
        raise InvalidParameter("initial slope c must be positive")

    def rhs(s, y):
        phi, dphi = y
        g = max(abs(dphi), eps)
        alpha, beta = op.coefficients(np.array([g]), np.array([phi]), None)
        alpha, beta = float(alpha[0]), float(beta[0])
        if alpha <= 0:
            raise SlopeCollapse(f"alpha vanished at s={s:.6g}")
        bterm = float(np.asarray(source.b(np.array([phi]), np.array([g])))[0])
        return [dphi, (kappa * s * beta * dphi - bterm) / alpha]

    def reach_top(s, y):
        return y[0] - hi

    reach_top.terminal = True
    reach_top.direction = 1

    def flat(s, y):
        return y[1]

    flat.terminal = True
    flat.direction = -1

    sol = solve_ivp(rhs, (a, a + max_span), [lo, c], method="RK45", rtol=rtol, atol=atol,
                    events=(reach_top, flat), dense_output=True)
    if sol.t_events[0].size:
        b_c = float(sol.t_events[0][0])
    elif sol.t_events[1].size:
        # phi rises until phi' = 0, so a step can jump over both crossings of
        # sup_u; the dense output tells whether the top was passed first
        s_flat = float(sol.t_events[1][0])
        if sol.sol(s_flat)[0] < hi:
            raise SlopeCollapse(f"phi' reached 0 at s={s_flat:.6g} before phi = {hi}")
        b_c = brentq(lambda x: sol.sol(x)[0] - hi, a, s_flat, xtol=1e-14, rtol=1e-14)
    else:
        raise DomainExhausted(f"phi did not reach {hi} within span {max_span}")
    s = np.linspace(a, b_c, m + 1)
    y = sol.sol(s)
    y[0, -1] = hi
    return ComparisonProfile(s, np.array([0.0]), y[0][None, :], y[1][None, :], 0.0,
                             {"a": a, "b_c": b_c, "c": c, "kappa": kappa})
