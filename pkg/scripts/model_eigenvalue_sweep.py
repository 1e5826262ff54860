"""First model eigenvalue against the radius for a few curvature pairs.

Writes one plot-data file per (kappa, Lambda) pair, columns ``R lambda1``.
The p-Laplacian is used with ``gamma = p - 1``.

    python3 scripts/model_eigenvalue_sweep.py --p 2.5 --out sweep_out
"""

import argparse
from pathlib import Path

import numpy as np

from qcomp import CurvatureParams, catalog, first_zero, shoot_1d_model
from qcomp.cli import emit_plot_data

PAIRS = [(-1.0, 0.0), (0.0, -0.3), (0.0, 0.0), (0.0, 0.3), (1.0, 0.3)]


def sweep(p, kappa, lam, radii):
    op = catalog("laplacian") if p == 2 else catalog("p_laplacian", {"p": p})
    params = CurvatureParams(kappa, lam, 3)
    # the model drift blows up where C vanishes
    radii = radii[radii < 0.95 * first_zero(params)]
    lams = [shoot_1d_model(op, params, float(r), p - 1).lam for r in radii]
    return {"R": radii, "lambda1": np.array(lams)}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=float, default=2.0)
    parser.add_argument("--out", default="sweep_out")
    parser.add_argument("--points", type=int, default=25)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    radii = np.linspace(0.25, 3.0, args.points)
    for kappa, lam in PAIRS:
        cols = sweep(args.p, kappa, lam, radii)
        path = emit_plot_data(cols, out / f"sweep_p{args.p:g}_k{kappa:+g}_L{lam:+g}.dat")
        print(f"{path}: {cols['R'].size} radii, lambda1 in "
              f"[{cols['lambda1'].min():.4g}, {cols['lambda1'].max():.4g}]")


if __name__ == "__main__":
    main()
