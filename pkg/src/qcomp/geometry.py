"""One-dimensional reductions of smooth metric measure spaces.

A weighted interval ``[0, L]`` with measure ``e^{-f} ds`` has vanishing
Riemannian curvature, so all curvature information lives in the density:

    Ric^N_f = f'' - (f')^2 / (N - 1)      (N finite)
    Ric^inf_f = f''
    H_f(left) = f'(0),  H_f(right) = -f'(L)

The comparison function ``C_{kappa,Lambda}`` solves ``C'' + kappa C = 0``
with ``C(0) = 1``, ``C'(0) = -Lambda`` and ``T = -C'/C`` is the model drift
coefficient; it satisfies the Riccati identity ``T' = kappa + T^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy
from scipy.interpolate import CubicSpline

from .errors import DomainError, InvalidParameter

# below this |kappa| the closed forms are replaced by a short Taylor series
KAPPA_SERIES = 1e-10

_S = sympy.Symbol("s", real=True)
_ALLOWED_FUNCS = {
    "exp": sympy.exp,
    "log": sympy.log,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "sinh": sympy.sinh,
    "cosh": sympy.cosh,
    "sqrt": sympy.sqrt,
    "erf": sympy.erf,
}


@dataclass(frozen=True)
class CurvatureParams:
    """Lower bounds ``Ric^N_f >= (N-1) kappa`` and ``H_f >= (N-1) Lambda``.

    ``lam`` stores Lambda (``lambda`` is a Python keyword). ``bigN`` may be
    ``math.inf``.
    """

    kappa: float = 0.0
    lam: float = 0.0
    bigN: float = math.inf
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter("topological dimension n must be >= 1")
        if self.bigN < self.n:
            raise InvalidParameter(f"N={self.bigN} must be >= n={self.n}")
        if self.n == 1 and math.isfinite(self.bigN) and self.bigN <= 1:
            raise InvalidParameter("weighted intervals need N > 1 (or N = inf)")

    @property
    def finite_N(self) -> bool:
        return math.isfinite(self.bigN)

    def to_json(self):
        return {
            "kappa": self.kappa,
            "lambda": self.lam,
            "N": self.bigN if self.finite_N else "inf",
            "n": self.n,
        }


# ---------------------------------------------------------------------------
# comparison functions


def c_kappa_lambda(params: CurvatureParams, t):
    """Closed-form solution ``C_{kappa,Lambda}(t)``; vectorized in ``t``."""
    k, lam = params.kappa, params.lam
    t = np.asarray(t, dtype=float)
    if abs(k) < KAPPA_SERIES:
        out = 1.0 - lam * t - 0.5 * k * t**2 + k * lam * t**3 / 6.0
    elif k > 0:
        r = math.sqrt(k)
        out = np.cos(r * t) - (lam / r) * np.sin(r * t)
    else:
        r = math.sqrt(-k)
        out = np.cosh(r * t) - (lam / r) * np.sinh(r * t)
    return out if out.ndim else float(out)


def c_kappa_lambda_prime(params: CurvatureParams, t):
    k, lam = params.kappa, params.lam
    t = np.asarray(t, dtype=float)
    if abs(k) < KAPPA_SERIES:
        out = -lam - k * t + 0.5 * k * lam * t**2
    elif k > 0:
        r = math.sqrt(k)
        out = -r * np.sin(r * t) - lam * np.cos(r * t)
    else:
        r = math.sqrt(-k)
        out = r * np.sinh(r * t) - lam * np.cosh(r * t)
    return out if out.ndim else float(out)


def t_kappa_lambda(params: CurvatureParams, t):
    """``T = -C'/C``. Raises DomainError where ``C <= 0``."""
    c = np.asarray(c_kappa_lambda(params, t))
    if np.any(c <= 0):
        raise DomainError(
            f"C_(kappa={params.kappa}, Lambda={params.lam}) <= 0 inside the "
            "requested range; the model drift is undefined there"
        )
    out = -np.asarray(c_kappa_lambda_prime(params, t)) / c
    return out if out.ndim else float(out)


def first_zero(params: CurvatureParams) -> float:
    """Smallest ``t > 0`` with ``C(t) = 0`` (``inf`` if none)."""
    k, lam = params.kappa, params.lam
    # the closed forms stay accurate for any nonzero kappa, however small
    if k == 0.0:
        return 1.0 / lam if lam > 0 else math.inf
    if k > 0:
        r = math.sqrt(k)
        return math.atan2(r, lam) / r
    r = math.sqrt(-k)
    if lam <= r:
        return math.inf
    return math.atanh(r / lam) / r


def comparison_drift(params: CurvatureParams):
    """Drift ``-(N-1) T_{kappa,Lambda}(s)`` of the model equation (0 for N = inf)."""
    if not params.finite_N:
        return lambda s: np.zeros_like(np.asarray(s, dtype=float))
    scale = params.bigN - 1.0
    return lambda s: -scale * np.asarray(t_kappa_lambda(params, s))


# ---------------------------------------------------------------------------
# densities


class Density:
    """Scalar function on an interval with first and second derivatives."""

    def __call__(self, s):
        raise NotImplementedError

    def d1(self, s):
        raise NotImplementedError

    def d2(self, s):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


def _broadcast(fn):
    def wrapped(s):
        s = np.asarray(s, dtype=float)
        out = np.asarray(fn(s), dtype=float)
        if out.shape != s.shape:
            out = np.broadcast_to(out, s.shape).copy()
        return out if out.ndim else float(out)

    return wrapped


def parse_expression(text, symbols=("s",)):
    """Parse ``text`` into a sympy expression over the small allowed grammar."""
    local = {name: sympy.Symbol(name, real=True) for name in symbols}
    local.update(_ALLOWED_FUNCS)
    local["pi"] = sympy.pi
    local["E"] = sympy.E
    try:
        expr = sympy.parse_expr(str(text), local_dict=local, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise InvalidParameter(f"cannot parse expression {text!r}: {exc}") from exc
    extra = {str(x) for x in expr.free_symbols} - set(symbols)
    if extra:
        raise InvalidParameter(f"expression {text!r} uses unknown symbols {sorted(extra)}")
    allowed = set(_ALLOWED_FUNCS.values())
    for fn in expr.atoms(sympy.Function):
        if fn.func not in allowed:
            raise InvalidParameter(f"function {fn.func} is outside the density grammar")
    return expr


class ExprDensity(Density):
    """Closed-form density with exact symbolic derivatives."""

    def __init__(self, expr):
        if isinstance(expr, sympy.Basic):
            self.expr = expr.subs({sympy.Symbol("s"): _S})
        else:
            self.expr = parse_expression(expr).subs({sympy.Symbol("s", real=True): _S})
        d1 = sympy.diff(self.expr, _S)
        d2 = sympy.diff(d1, _S)
        self._f = _broadcast(sympy.lambdify(_S, self.expr, ["scipy", "numpy"]))
        self._d1 = _broadcast(sympy.lambdify(_S, d1, ["scipy", "numpy"]))
        self._d2 = _broadcast(sympy.lambdify(_S, d2, ["scipy", "numpy"]))

    def __call__(self, s):
        return self._f(s)

    def d1(self, s):
        return self._d1(s)

    def d2(self, s):
        return self._d2(s)

    def __repr__(self):
        return f"ExprDensity({str(self.expr)!r})"

    def to_json(self):
        return {"kind": "expr", "expr": str(self.expr)}


class SplineDensity(Density):
    """Density given by samples; the not-a-knot cubic spline is C^2."""

    def __init__(self, s, values):
        self.s = np.asarray(s, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.s.size < 4:
            raise InvalidParameter("spline densities need at least 4 samples")
        self._spl = CubicSpline(self.s, self.values)

    def __call__(self, s):
        return _broadcast(self._spl)(s)

    def d1(self, s):
        return _broadcast(lambda x: self._spl(x, 1))(s)

    def d2(self, s):
        return _broadcast(lambda x: self._spl(x, 2))(s)

    def to_json(self):
        return {"kind": "spline", "s": self.s.tolist(), "f": self.values.tolist()}


ZERO = ExprDensity("0")


def c_kappa_lambda_expr(params: CurvatureParams, arg):
    """Symbolic ``C_{kappa,Lambda}(arg)`` using the same branches as the numeric one."""
    k, lam = params.kappa, params.lam
    if abs(k) < KAPPA_SERIES:
        return 1 - lam * arg - sympy.Rational(1, 2) * k * arg**2 + k * lam * arg**3 / 6
    if k > 0:
        r = math.sqrt(k)
        return sympy.cos(r * arg) - (lam / r) * sympy.sin(r * arg)
    r = math.sqrt(-k)
    return sympy.cosh(r * arg) - (lam / r) * sympy.sinh(r * arg)


def model_density(params: CurvatureParams, R: float, shift: float = 0.0) -> ExprDensity:
    """Density ``f(s) = -(N-1) log C_{kappa,Lambda}(s - shift)`` on ``[0, R]``.

    With ``shift = 0`` it realizes equality in both ``Ric^N_f >= (N-1)kappa``
    and ``H_f(left) >= (N-1)Lambda``. A nonzero shift centres the model
    (useful with ``Lambda = 0``, where ``T_{kappa,0}`` is odd).
    """
    if not params.finite_N:
        raise InvalidParameter("model_density needs finite N")
    lo, hi = -shift, R - shift
    if not _c_positive_on(params, lo, hi):
        raise DomainError(
            f"C_(kappa={params.kappa}, Lambda={params.lam}) vanishes on [{lo}, {hi}]"
        )
    if params.kappa == 0.0 and params.lam == 0.0:
        return ExprDensity("0")
    c = c_kappa_lambda_expr(params, _S - shift)
    return ExprDensity(-(params.bigN - 1.0) * sympy.log(c))


def _c_positive_on(params: CurvatureParams, lo: float, hi: float) -> bool:
    if hi > 0 and first_zero(params) <= hi:
        return False
    if lo < 0:
        mirrored = CurvatureParams(params.kappa, -params.lam, params.bigN, params.n)
        if first_zero(mirrored) <= -lo:
            return False
    return True


# ---------------------------------------------------------------------------
# spaces


@dataclass
class WeightedInterval:
    """``[0, length]`` with measure ``e^{-f} ds`` and a uniform grid of ``m`` cells."""

    length: float
    density: Density = field(default_factory=lambda: ZERO)
    m: int = 200

    def __post_init__(self):
        if self.length <= 0:
            raise InvalidParameter("length must be positive")
        if self.m < 16:
            raise InvalidParameter("grid needs m >= 16 cells")
        if self.density is None:
            self.density = ZERO

    @property
    def h(self) -> float:
        return self.length / self.m

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.m + 1)

    @property
    def diameter(self) -> float:
        return self.length

    @property
    def inradius(self) -> float:
        return 0.5 * self.length

    def drift(self, s):
        return -np.asarray(self.density.d1(s))

    def distance_to_boundary(self, s):
        s = np.asarray(s, dtype=float)
        return np.minimum(s, self.length - s)

    def refined(self, factor: int = 2) -> "WeightedInterval":
        return WeightedInterval(self.length, self.density, self.m * factor)

    def to_json(self):
        return {"length": self.length, "m": self.m, "density": self.density.to_json()}


@dataclass
class WarpedModel:
    """Rotationally symmetric space ``dr^2 + w(r)^2 g_{S^{n-1}}`` with density ``f(r)``.

    Radial functions see the drift ``(n-1) w'/w - f'``. The pole is excluded:
    the computational domain is ``[3h, radius]`` with a symmetry condition
    at the inner end.
    """

    radius: float
    n: int
    warp: Density
    density: Density = field(default_factory=lambda: ZERO)
    m: int = 200

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameter("warped models need n >= 2")
        if self.m < 16:
            raise InvalidParameter("grid needs m >= 16 cells")
        w = np.asarray(self.warp(self.grid))
        if np.any(w <= 0):
            raise DomainError("warp function must be positive on the grid")

    @property
    def h(self) -> float:
        return self.radius / self.m

    @property
    def s_min(self) -> float:
        return 3.0 * self.h

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(self.s_min, self.radius, self.m - 2)

    @property
    def length(self) -> float:
        return self.radius - self.s_min

    def drift(self, s):
        s = np.asarray(s, dtype=float)
        w = np.asarray(self.warp(s))
        if np.any(w <= 0):
            raise DomainError("drift undefined where the warp vanishes")
        return (self.n - 1) * np.asarray(self.warp.d1(s)) / w - np.asarray(self.density.d1(s))

    def distance_to_boundary(self, s):
        return self.radius - np.asarray(s, dtype=float)

    def to_json(self):
        return {
            "radius": self.radius,
            "n": self.n,
            "m": self.m,
            "warp": self.warp.to_json(),
            "density": self.density.to_json(),
        }


# ---------------------------------------------------------------------------
# curvature of weighted intervals


def ricci_f_N(space: WeightedInterval, params: CurvatureParams, s):
    """Bakry-Emery Ricci curvature of the unit tangent at ``s``."""
    if params.n != 1:
        raise InvalidParameter("ricci_f_N is the n = 1 reduction")
    d1 = np.asarray(space.density.d1(s))
    d2 = np.asarray(space.density.d2(s))
    out = d2 - d1**2 / (params.bigN - 1.0) if params.finite_N else d2
    return out if out.ndim else float(out)


def boundary_hf(space: WeightedInterval, end: str) -> float:
    """f-mean curvature ``-<grad f, nu>`` of an endpoint with outward normal ``nu``."""
    if end == "left":
        return float(space.density.d1(0.0))
    if end == "right":
        return -float(space.density.d1(space.length))
    raise InvalidParameter(f"end must be 'left' or 'right', got {end!r}")


def effective_bounds(space: WeightedInterval, params: CurvatureParams):
    """Largest ``(kappa, Lambda)`` the grid scan certifies for ``space``.

    Grid-scan minima, so approximate with O(h^2) error. For ``N = inf`` the
    raw minima of ``f''`` and ``H_f`` are returned without the ``N - 1`` scaling.
    """
    ric = np.min(ricci_f_N(space, params, space.grid))
    hf = min(boundary_hf(space, "left"), boundary_hf(space, "right"))
    if params.finite_N:
        return float(ric / (params.bigN - 1.0)), float(hf / (params.bigN - 1.0))
    return float(ric), float(hf)
