"""Explicit monotone finite differences shared by the PDE solver and the profile evolver.

At node ``i`` with spacing ``h``::

    Du_c  = (u[i+1] - u[i-1]) / (2h)        argument of alpha, beta, q
    D2u   = (u[i+1] - 2u[i] + u[i-1]) / h^2
    Du_up = forward difference if drift > 0 else backward difference

Forward Euler with ``dt * (2 alpha / h^2 + beta |drift| / h) <= 1`` is monotone
for fixed coefficients; the step is audited against the *realized*
coefficients, so operators whose alpha grows with the gradient are caught.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CFLViolation, InvalidParameter, Overflow

KINDS = ("dirichlet", "neumann", "free")

_NAMED = {
    "dirichlet_zero": ("dirichlet", "dirichlet"),
    "neumann_zero": ("neumann", "neumann"),
    "dirichlet_both": ("dirichlet", "dirichlet"),
    "neumann_both": ("neumann", "neumann"),
    "dirichlet_left_neumann_right": ("dirichlet", "neumann"),
    "pinned_left+neumann_right": ("dirichlet", "neumann"),
    "pinned_left+free": ("dirichlet", "free"),
    "free": ("free", "free"),
    "neumann_left_dirichlet_right": ("neumann", "dirichlet"),
}

OVERFLOW_LIMIT = 1e12


@dataclass(frozen=True)
class Boundary:
    """Boundary handling at each end: ``dirichlet`` (value held), ``neumann``
    (ghost-node reflection) or ``free`` (linear extrapolation from the interior)."""

    left: str = "dirichlet"
    right: str = "dirichlet"
    left_value: float = 0.0
    right_value: float = 0.0

    def __post_init__(self):
        if self.left not in KINDS or self.right not in KINDS:
            raise InvalidParameter(f"boundary kinds must be in {KINDS}")

    @classmethod
    def parse(cls, spec, values=(0.0, 0.0)) -> "Boundary":
        if isinstance(spec, Boundary):
            return spec
        if spec == "dirichlet_values":
            return cls("dirichlet", "dirichlet", float(values[0]), float(values[1]))
        try:
            left, right = _NAMED[spec]
        except KeyError:
            raise InvalidParameter(f"unknown boundary condition {spec!r}") from None
        return cls(left, right, float(values[0]), float(values[1]))

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Enforce held values and extrapolated ends in place."""
        if self.left == "dirichlet":
            u[0] = self.left_value
        elif self.left == "free":
            u[0] = 2.0 * u[1] - u[2]
        if self.right == "dirichlet":
            u[-1] = self.right_value
        elif self.right == "free":
            u[-1] = 2.0 * u[-2] - u[-3]
        return u

    def to_json(self):
        return {"left": self.left, "right": self.right,
                "left_value": self.left_value, "right_value": self.right_value}


def _neighbours(u, bc):
    ul = np.empty_like(u)
    ur = np.empty_like(u)
    ul[1:] = u[:-1]
    ur[:-1] = u[1:]
    # reflection ghosts; overwritten or masked for the other kinds
    ul[0] = u[1]
    ur[-1] = u[-2]
    return ul, ur


def discrete_operator(u, h, drift, op, eps, bc: Boundary, *, t=0.0, upwind=True,
                      q=None, b=None):
    """Return ``(L u, stability coefficient)`` at every node.

    ``q(g, u, t)`` is added for evolutions, ``b(u, g)`` for steady states.
    Entries at held/extrapolated boundary nodes are zero.
    """
    ul, ur = _neighbours(u, bc)
    du_c = (ur - ul) / (2.0 * h)
    d2u = (ur - 2.0 * u + ul) / h**2
    g = np.maximum(np.abs(du_c), eps)
    alpha, beta = op.coefficients(g, u, t)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), u.shape)
    beta = np.broadcast_to(np.asarray(beta, dtype=float), u.shape)
    if upwind:
        du_drift = np.where(drift > 0, (ur - u) / h, (u - ul) / h)
        coef = 2.0 * alpha / h**2 + beta * np.abs(drift) / h
    else:
        du_drift = du_c
        coef = 2.0 * alpha / h**2
    first = beta * drift * du_drift
    # u' = 0 at reflected ends
    if bc.left == "neumann":
        first[0] = 0.0
    if bc.right == "neumann":
        first[-1] = 0.0
    out = alpha * d2u + first
    if q is not None:
        out = out + q(g, u, t)
    if b is not None:
        out = out + b(u, g)
    active = np.ones(u.shape, dtype=bool)
    if bc.left != "neumann":
        active[0] = False
    if bc.right != "neumann":
        active[-1] = False
    out = np.where(active, out, 0.0)
    coef = np.where(active, coef, 0.0)
    return out, coef


def explicit_step(u, dt, h, drift, op, eps, bc: Boundary, *, t=0.0, cfl=0.9, q=None,
                  allow_halving=True):
    """One forward-Euler step of ``u_t = L u``; returns ``(u_new, dt_used_per_substep)``."""
    rhs, coef = discrete_operator(u, h, drift, op, eps, bc, t=t, q=q)
    cmax = float(np.max(coef)) if coef.size else 0.0
    if dt * cmax > cfl:
        if not allow_halving or 0.5 * dt * cmax > cfl:
            raise CFLViolation(
                f"dt={dt:.3e} exceeds the realized bound cfl/max(2a/h^2+b|drift|/h)="
                f"{cfl / cmax:.3e}"
            )
        half, _ = explicit_step(u, 0.5 * dt, h, drift, op, eps, bc, t=t, cfl=cfl, q=q,
                                allow_halving=False)
        out, _ = explicit_step(half, 0.5 * dt, h, drift, op, eps, bc, t=t + 0.5 * dt, cfl=cfl,
                               q=q, allow_halving=False)
        return out, 0.5 * dt
    new = u + dt * rhs
    bc.apply(new)
    if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > OVERFLOW_LIMIT:
        raise Overflow("field norm exceeded 1e12")
    return new, dt


def stable_dt(u, h, drift, op, eps, bc: Boundary, cfl=0.9, t=0.0):
    """Largest step the audit accepts for the current field."""
    _, coef = discrete_operator(u, h, drift, op, eps, bc, t=t)
    cmax = float(np.max(coef))
    return cfl / cmax if cmax > 0 else np.inf
