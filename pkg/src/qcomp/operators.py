"""Isotropic quasilinear operators and their radial reduction.

For a radial (or one-dimensional) function the operator

    Q[u] = alpha(|Du|) D^2u(Du, Du)/|Du|^2 + beta(|Du|) (trace part) - beta(|Du|) <Du, Df>

collapses to ``alpha(|u'|) u'' + beta(|u'|) * drift(s) * u'`` where the drift
collects the first-order terms of the geometry (``-f'`` on a weighted
interval, ``(n-1) w'/w - f'`` on a warped product).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy

from .errors import InvalidParameter, UnknownOperator
from .geometry import parse_expression

DEFAULT_EPS = 1e-8


@dataclass(frozen=True)
class PowerLaw:
    """``alpha = a g^m`` and ``beta = b g^m``.

    Lets the eigen solvers integrate in the momentum ``Phi = |u'|^m u'``,
    which removes the degeneracy of ``alpha`` at ``u' = 0``.
    """

    a: float
    b: float
    m: float


@dataclass
class IsotropicOperator:
    name: str
    alpha: Callable
    beta: Callable
    gamma: float | None = None
    singular_at_zero: bool = False
    params: dict = field(default_factory=dict)
    power: PowerLaw | None = None

    def coefficients(self, g, u=None, t=None):
        return self.alpha(g, u, t), self.beta(g, u, t)

    def to_json(self):
        return {"name": self.name, "params": dict(self.params)}


def _const(c):
    return lambda g, u=None, t=None: np.full_like(np.asarray(g, dtype=float), c)


def _power(c, m):
    return lambda g, u=None, t=None: c * np.asarray(g, dtype=float) ** m


def _get_p(params):
    if "p" not in params:
        raise InvalidParameter("operator needs parameter p")
    p = float(params["p"])
    if not p > 1.0 or math.isinf(p):
        raise InvalidParameter(f"p must lie in (1, inf), got {p}")
    return p


CATALOG_NAMES = (
    "laplacian",
    "p_laplacian",
    "normalized_p_laplacian",
    "mean_curvature",
    "one_laplacian",
    "infinity_laplacian",
)


def catalog(name: str, params: dict | None = None) -> IsotropicOperator:
    """Build one of the named operators with its ``(alpha, beta, gamma)``."""
    params = dict(params or {})
    if name == "laplacian":
        return IsotropicOperator(name, _const(1.0), _const(1.0), 1.0, params=params,
                                 power=PowerLaw(1.0, 1.0, 0.0))
    if name == "p_laplacian":
        p = _get_p(params)
        return IsotropicOperator(
            name, _power(p - 1.0, p - 2.0), _power(1.0, p - 2.0), p - 1.0,
            singular_at_zero=p < 2.0, params=params, power=PowerLaw(p - 1.0, 1.0, p - 2.0),
        )
    if name == "normalized_p_laplacian":
        p = _get_p(params)
        return IsotropicOperator(
            name, _const((p - 1.0) / p), _const(1.0 / p), 1.0, params=params,
            power=PowerLaw((p - 1.0) / p, 1.0 / p, 0.0),
        )
    if name == "mean_curvature":
        return IsotropicOperator(
            name, lambda g, u=None, t=None: 1.0 / (1.0 + np.asarray(g, dtype=float) ** 2),
            _const(1.0), None, params=params,
        )
    if name == "one_laplacian":
        return IsotropicOperator(name, _const(0.0), _const(1.0), 1.0, params=params)
    if name == "infinity_laplacian":
        return IsotropicOperator(name, _const(1.0), _const(0.0), 1.0, params=params)
    raise UnknownOperator(name)


def from_json(spec: dict) -> IsotropicOperator:
    return catalog(spec["name"], spec.get("params", {}))


def evaluate_radial(op, drift, up, upp, s, eps=DEFAULT_EPS, u=None, t=None):
    """``alpha(|up|_eps) upp + beta(|up|_eps) drift(s) up`` with ``|up|_eps = max(|up|, eps)``.

    ``drift`` is a callable of ``s`` or a plain number.
    """
    if eps <= 0:
        raise InvalidParameter("eps must be positive")
    up = np.asarray(up, dtype=float)
    g = np.maximum(np.abs(up), eps)
    b = drift(s) if callable(drift) else drift
    alpha, beta = op.coefficients(g, u, t)
    out = alpha * np.asarray(upp, dtype=float) + beta * np.asarray(b, dtype=float) * up
    return out if np.ndim(out) else float(out)


HOMOGENEITY_SCALES = (0.5, 2.0, 7.0)


def homogeneity_check(op, gamma, jets, eps=DEFAULT_EPS) -> bool:
    """Check ``Q[c u] = c^gamma Q[u]`` on radial jets ``(up, upp, s, drift)``."""
    if not jets:
        raise InvalidParameter("need at least one jet")
    for up, upp, s, drift in jets:
        base = evaluate_radial(op, drift, up, upp, s, eps)
        for c in HOMOGENEITY_SCALES:
            scaled = evaluate_radial(op, drift, c * up, c * upp, s, eps)
            target = c**gamma * base
            if abs(scaled - target) > 1e-9 * (1.0 + abs(target)):
                return False
    return True


def _zero_q(g, u, t):
    return np.zeros_like(np.asarray(g, dtype=float))


def _zero_b(u, g):
    return np.zeros_like(np.asarray(u, dtype=float))


@dataclass
class SourceTerm:
    """Lower-order terms: ``q(|Du|, u, t)`` for evolutions, ``b(u, |Du|)`` for steady states."""

    q: Callable = _zero_q
    b: Callable = _zero_b
    q_expr: str = "0"
    b_expr: str = "0"

    @classmethod
    def from_expressions(cls, q="0", b="0"):
        """Build from strings in the variables ``g`` (gradient norm), ``u`` and ``t``."""
        qe = parse_expression(q, ("g", "u", "t"))
        be = parse_expression(b, ("u", "g"))
        gs, us, ts = (sympy.Symbol(n, real=True) for n in ("g", "u", "t"))
        qf = sympy.lambdify((gs, us, ts), qe, ["scipy", "numpy"])
        bf = sympy.lambdify((us, gs), be, ["scipy", "numpy"])

        def q_fn(g, u, t):
            g = np.asarray(g, dtype=float)
            return np.broadcast_to(np.asarray(qf(g, np.asarray(u, dtype=float), t), dtype=float),
                                   g.shape)

        def b_fn(u, g):
            u = np.asarray(u, dtype=float)
            return np.broadcast_to(np.asarray(bf(u, np.asarray(g, dtype=float)), dtype=float),
                                   u.shape)

        return cls(q_fn, b_fn, str(qe), str(be))

    def to_json(self):
        return {"q": self.q_expr, "b": self.b_expr}


NO_SOURCE = SourceTerm()
