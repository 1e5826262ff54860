"""Explicit evolution of ``u_t = Q[u] + q`` and relaxation to steady states.

Works on a :class:`~qcomp.geometry.WeightedInterval` or a
:class:`~qcomp.geometry.WarpedModel`; the space only enters through its
grid and its drift.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import scheme
from .errors import InvalidParameter, NonConvergence
from .operators import DEFAULT_EPS, NO_SOURCE, SourceTerm
from .scheme import Boundary


@dataclass
class Field1D:
    """Nodal values of ``u`` on ``space.grid`` at one time."""

    space: object
    values: np.ndarray
    time: float = 0.0
    bc: Boundary = field(default_factory=Boundary)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.bc = Boundary.parse(self.bc)
        if self.values.shape != self.space.grid.shape:
            raise InvalidParameter("field values do not match the space grid")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameter("field values must be finite")

    @classmethod
    def from_function(cls, space, fn, bc="dirichlet_zero", time=0.0):
        bc = Boundary.parse(bc)
        values = np.asarray(fn(space.grid), dtype=float).copy()
        bc.apply(values)
        return cls(space, values, time, bc)

    @property
    def grid(self):
        return self.space.grid

    def with_values(self, values, time):
        return Field1D(self.space, values, time, self.bc)


@dataclass
class SolverConfig:
    """``dt=None`` picks ``cfl / max(2 alpha / h^2 + beta |drift| / h)`` from the initial field."""

    dt: float | None = None
    eps: float = DEFAULT_EPS
    cfl: float = 0.9
    t_end: float = 1.0
    snapshot_every: int = 100
    h: float | None = None

    def __post_init__(self):
        if not 0 < self.cfl <= 0.9:
            raise InvalidParameter("cfl must lie in (0, 0.9]")
        if self.dt is not None and self.dt <= 0:
            raise InvalidParameter("dt must be positive")
        if self.snapshot_every < 1:
            raise InvalidParameter("snapshot_every must be >= 1")


@dataclass
class Trajectory:
    grid: np.ndarray
    times: np.ndarray
    values: np.ndarray  # shape (snapshots, nodes)
    space: object = None
    bc: Boundary | None = None
    dt: float = 0.0

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def field(self, k) -> Field1D:
        return Field1D(self.space, self.values[k], float(self.times[k]), self.bc)

    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "s", "u"])
            for t, row in zip(self.times, self.values):
                for s, u in zip(self.grid, row):
                    w.writerow([f"{t:.17g}", f"{s:.17g}", f"{u:.17g}"])


def _drift_on_grid(space):
    return np.asarray(space.drift(space.grid), dtype=float)


def step_parabolic(fld: Field1D, op, source: SourceTerm = NO_SOURCE, cfg: SolverConfig = None,
                   dt=None) -> Field1D:
    """Advance ``fld`` by one explicit step (two half steps if the audit demands it)."""
    cfg = cfg or SolverConfig()
    h = fld.grid[1] - fld.grid[0]
    drift = _drift_on_grid(fld.space)
    step = dt if dt is not None else cfg.dt
    if step is None:
        step = scheme.stable_dt(fld.values, h, drift, op, cfg.eps, fld.bc, cfg.cfl, fld.time)
    new, _ = scheme.explicit_step(fld.values, step, h, drift, op, cfg.eps, fld.bc,
                                  t=fld.time, cfl=cfg.cfl, q=source.q)
    return fld.with_values(new, fld.time + step)


def solve_parabolic(u0: Field1D, op, source: SourceTerm = NO_SOURCE,
                    cfg: SolverConfig = None) -> Trajectory:
    """Evolve to ``cfg.t_end`` storing every ``snapshot_every``-th step and the final state.

    The step is shrunk so that a whole number of steps lands exactly on ``t_end``.
    """
    cfg = cfg or SolverConfig()
    h = u0.grid[1] - u0.grid[0]
    if cfg.h is not None and not math.isclose(cfg.h, h, rel_tol=1e-9):
        raise InvalidParameter(f"config h={cfg.h} disagrees with the grid spacing {h}")
    drift = _drift_on_grid(u0.space)
    dt = cfg.dt
    if dt is None:
        dt = scheme.stable_dt(u0.values, h, drift, op, cfg.eps, u0.bc, cfg.cfl, u0.time)
    n_steps = max(1, math.ceil(cfg.t_end / dt - 1e-9))
    dt = cfg.t_end / n_steps
    u = u0.values.copy()
    u0.bc.apply(u)
    times, snaps = [u0.time], [u.copy()]
    t = u0.time
    for k in range(1, n_steps + 1):
        u, _ = scheme.explicit_step(u, dt, h, drift, op, cfg.eps, u0.bc, t=t, cfl=cfg.cfl,
                                    q=source.q)
        t = u0.time + k * dt
        if k % cfg.snapshot_every == 0 or k == n_steps:
            times.append(t)
            snaps.append(u.copy())
    return Trajectory(u0.grid.copy(), np.array(times), np.array(snaps), u0.space, u0.bc, dt)


def _elliptic_operator(u, h, drift, op, b, eps, bc):
    return scheme.discrete_operator(u, h, drift, op, eps, bc, upwind=False, b=b)


def residual_elliptic(fld: Field1D, op, source: SourceTerm, space=None, eps=DEFAULT_EPS) -> float:
    """Max interior ``|alpha D2u + beta drift Du + b(u, |Du|)|`` (centered differences)."""
    space = space or fld.space
    h = space.grid[1] - space.grid[0]
    drift = _drift_on_grid(space)
    out, _ = _elliptic_operator(fld.values, h, drift, op, source.b, eps, fld.bc)
    return float(np.max(np.abs(out))) if out.size else 0.0


def solve_elliptic(op, source: SourceTerm, space, bc, cfg: SolverConfig = None, u_init=None,
                   max_steps=2_000_000, check_every=200, tol=None) -> Field1D:
    """Pseudo-time relaxation ``u_tau = L_f(u)`` to a discrete steady state.

    Stops when the residual drops below ``tol``, by default ``1e-8 (1 + ||b||_inf)``.
    Degenerate operators (``alpha(0) = 0``, e.g. the p-Laplacian with ``p > 2``)
    need a grid with a node-free midpoint, i.e. odd ``m``, when the solution
    peaks there: the centered gradient vanishes at a midpoint node and the
    relaxation stalls.
    """
    cfg = cfg or SolverConfig()
    bc = Boundary.parse(bc)
    h = space.grid[1] - space.grid[0]
    drift = _drift_on_grid(space)
    u = np.zeros_like(space.grid) if u_init is None else np.asarray(u_init, dtype=float).copy()
    if u_init is None:
        # linear interpolation of the boundary data
        u = bc.left_value + (bc.right_value - bc.left_value) * (space.grid - space.grid[0]) / (
            space.grid[-1] - space.grid[0])
    bc.apply(u)
    bnorm = float(np.max(np.abs(source.b(u, np.zeros_like(u)))))
    tol = 1e-8 * (1.0 + bnorm) if tol is None else tol
    res = np.inf
    for k in range(max_steps):
        rhs, coef = _elliptic_operator(u, h, drift, op, source.b, cfg.eps, bc)
        if k % check_every == 0:
            res = float(np.max(np.abs(rhs)))
            if res < tol:
                return Field1D(space, u, 0.0, bc)
        cmax = float(np.max(coef))
        dtau = cfg.cfl / cmax if cmax > 0 else cfg.cfl * h**2
        if cfg.dt is not None:
            dtau = min(dtau, cfg.dt)
        u = u + dtau * rhs
        bc.apply(u)
    raise NonConvergence(f"elliptic relaxation stalled at residual {res:.3e}",
                         last_value=u, residual=res)


def with_dt(cfg: SolverConfig, dt) -> SolverConfig:
    return replace(cfg, dt=dt)
