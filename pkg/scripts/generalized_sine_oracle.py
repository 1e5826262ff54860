"""Reference Neumann eigenvalues of the one-dimensional p-Laplacian.

Independent of the qcomp package: fixed-step RK4 on the momentum system
``u' = |Phi|^(1/(p-1)) sign(Phi)``, ``Phi' = -lam |u|^(p-1) sign(u)`` over the
half segment ``[0, D/2]`` and plain bisection on ``Phi(D/2) = 0``. The result
is compared with ``(p - 1) (pi_p / D)^p`` where ``pi_p`` is evaluated by
quadrature of ``2 int_0^1 (1 - t^p)^(-1/p) dt``.

Usage: python3 scripts/generalized_sine_oracle.py [--steps 200000] [--D 2.0]
"""

import argparse
import json
import math

import numpy as np
from scipy.integrate import quad


def end_momentum(lam, p, half, steps):
    q = 1.0 / (p - 1.0)
    h = half / steps

    def rhs(u, phi):
        return (math.copysign(abs(phi) ** q, phi), -lam * math.copysign(abs(u) ** (p - 1.0), u))

    u, phi = 0.0, 1.0
    for _ in range(steps):
        k1 = rhs(u, phi)
        k2 = rhs(u + 0.5 * h * k1[0], phi + 0.5 * h * k1[1])
        k3 = rhs(u + 0.5 * h * k2[0], phi + 0.5 * h * k2[1])
        k4 = rhs(u + h * k3[0], phi + h * k3[1])
        u += h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6
        phi += h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6
    return phi


def shooting_eigenvalue(p, D, steps, iters=60):
    half = 0.5 * D
    lo, hi = 1e-3, 1.0
    while end_momentum(hi, p, half, steps) > 0:
        lo, hi = hi, 2.0 * hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if end_momentum(mid, p, half, steps) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pi_p_quadrature(p):
    val, _ = quad(lambda t: (1.0 - t**p) ** (-1.0 / p), 0.0, 1.0, limit=200)
    return 2.0 * val


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--D", type=float, default=2.0)
    ap.add_argument("--p", type=float, nargs="+", default=[1.5, 3.0, 4.0])
    args = ap.parse_args()
    out = {}
    for p in args.p:
        lam = shooting_eigenvalue(p, args.D, args.steps)
        closed = (p - 1.0) * (pi_p_quadrature(p) / args.D) ** p
        formula = (p - 1.0) * (2 * np.pi / (p * np.sin(np.pi / p)) / args.D) ** p
        out[str(p)] = {"rk4": lam, "quadrature": closed, "formula": float(formula),
                       "rel_diff_rk4_vs_quadrature": abs(lam - closed) / closed}
    print(json.dumps({"D": args.D, "steps": args.steps, "values": out}, indent=2))


if __name__ == "__main__":
    main()
