"""Scenario runner: ``qcomp run <config>`` and ``qcomp list``.

A config is a JSON file validated against ``data/scenario.schema.json``. Each
scenario produces ``<id>.json`` (checks and metrics), optional CSV tables and
whitespace column files for plotting; the run writes ``summary.json`` and
``summary.csv``. Exit status is 0 iff every ordinary scenario passes and every
scenario marked ``control`` fails its checks.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import traceback
import zlib
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import sympy

from .comparison import (
    ComparisonProfile,
    barrier_elliptic,
    check_profile_admissible,
    evolve_profile,
    invert_profile,
)
from .eigen import neumann_1d_model, shoot_1d_model, shoot_weighted_interval
from .errors import ConfigError, QcompError
from .geometry import (
    ZERO,
    CurvatureParams,
    ExprDensity,
    WeightedInterval,
    comparison_drift,
    effective_bounds,
    model_density,
    parse_expression,
)
from .operators import NO_SOURCE, SourceTerm, catalog
from .pde import Field1D, SolverConfig, Trajectory, solve_elliptic, solve_parabolic
from .report import CheckReport
from .verify import (
    EIGEN_REL_TOL,
    TOL_MODEL,
    ModulusCurve,
    RadialProfile,
    check_decay,
    check_eigen_comparison,
    check_gradient_bound,
    check_mc_dominated,
    check_supersolution_boundary,
    check_two_point_drift,
    decay_rate_estimate,
    modulus_of_continuity,
)

SCHEMA_VERSION = 1
DEFAULT_M = 200
OUT_ENV = "QCOMP_OUT"


# ---------------------------------------------------------------------------
# deterministic output


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps17(obj, indent=2, _level=0) -> str:
    """JSON text with every float written as 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps17(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _columns_of(obj) -> dict:
    if isinstance(obj, Trajectory):
        sup = obj.sup_norms()
        with np.errstate(divide="ignore"):
            return {"t": obj.times, "log_sup_norm": np.log(sup)}
    if isinstance(obj, ModulusCurve):
        return obj.to_columns()
    if hasattr(obj, "to_columns"):
        return obj.to_columns()
    if isinstance(obj, dict):
        return obj
    raise TypeError(f"no column view for {type(obj).__name__}")


def emit_plot_data(obj, out_path) -> Path:
    """Write ``obj`` as whitespace-separated columns under a ``# name name ...`` header.

    Accepts a Trajectory (``t log_sup_norm``), a ModulusCurve (``s omega``) or
    a mapping of column name to equal-length arrays.
    """
    cols = _columns_of(obj)
    names = list(cols)
    data = [np.asarray(cols[n], dtype=float).ravel() for n in names]
    if len({d.size for d in data}) != 1:
        raise ValueError("columns differ in length")
    out_path = Path(out_path)
    with open(out_path, "w") as fh:
        fh.write("# " + " ".join(names) + "\n")
        for row in zip(*data):
            fh.write(" ".join(_fmt(v) for v in row) + "\n")
    return out_path


def write_csv(cols: dict, out_path) -> Path:
    names = list(cols)
    data = [np.asarray(cols[n], dtype=float).ravel() for n in names]
    out_path = Path(out_path)
    with open(out_path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*data):
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return out_path


def _trajectory_table(traj: Trajectory) -> dict:
    t = np.repeat(traj.times, traj.grid.size)
    s = np.tile(traj.grid, traj.times.size)
    return {"t": t, "s": s, "u": np.asarray(traj.values).ravel()}


# ---------------------------------------------------------------------------
# config parsing


def _schema():
    text = resources.files("qcomp").joinpath("data/scenario.schema.json").read_text()
    return json.loads(text)


def bundled_configs() -> list[Path]:
    folder = resources.files("qcomp").joinpath("data/scenarios")
    return sorted(Path(str(p)) for p in folder.iterdir() if p.name.endswith(".json"))


def load_config(path) -> dict:
    """Read and validate a scenario file; bundled file names resolve too."""
    path = Path(path)
    if not path.exists():
        matches = [p for p in bundled_configs() if p.name in (path.name, path.name + ".json")]
        if not matches:
            raise ConfigError(f"config file not found: {path}")
        path = matches[0]
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path} ({exc})") from exc
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(x) for x in err.absolute_path) or "<root>"
        raise ConfigError(f"{err.message} (in {path})", where)
    seen = set()
    for k, sc in enumerate(cfg["scenarios"]):
        if sc["id"] in seen:
            raise ConfigError(f"duplicate id {sc['id']!r} (in {path})", f"scenarios/{k}/id")
        seen.add(sc["id"])
    return cfg


# ---------------------------------------------------------------------------
# scenario building blocks


def _big_n(value):
    if value is None or value in ("inf", "infinity"):
        return math.inf
    return float(value)


def random_density_expression(rng) -> str:
    """A smooth density ``a s + b s^2 + c sin(w s + theta)`` with random coefficients."""
    a, b, c = rng.uniform(-1, 1), rng.uniform(-0.5, 0.5), rng.uniform(0, 0.3)
    w, th = rng.uniform(1, 4), rng.uniform(0, 2 * np.pi)
    return f"{a:.6f}*s + {b:.6f}*s**2 + {c:.6f}*sin({w:.6f}*s + {th:.6f})"


def build_space(conf: dict, rng=None) -> WeightedInterval:
    length = float(conf["length"])
    m = int(conf.get("m", DEFAULT_M))
    dens = conf.get("density", {"kind": "zero"})
    kind = dens["kind"]
    if kind == "zero":
        density = ZERO
    elif kind == "expr":
        density = ExprDensity(dens["expr"])
    elif kind == "model":
        params = CurvatureParams(dens["kappa"], dens["lam"], _big_n(dens["N"]))
        density = model_density(params, float(dens.get("R", length)), float(dens.get("shift", 0.0)))
    else:
        if rng is None:
            raise ConfigError("random density needs a seeded generator", "space/density")
        density = ExprDensity(random_density_expression(rng))
    return WeightedInterval(length, density, m)


def build_operator(conf: dict):
    return catalog(conf["name"], conf.get("params"))


def build_params(conf, space=None) -> CurvatureParams:
    """Curvature bounds from the config; ``"effective"`` scans the density with ``N = 3``."""
    if conf == "effective":
        conf = {"effective": True}
    big_n = _big_n(conf.get("N", 3.0))
    if conf.get("effective", False):
        kappa, lam = effective_bounds(space, CurvatureParams(0.0, 0.0, big_n))
        return CurvatureParams(kappa, lam, big_n)
    return CurvatureParams(float(conf.get("kappa", 0.0)), float(conf.get("lam", 0.0)), big_n)


def build_solver(conf: dict | None) -> SolverConfig:
    conf = conf or {}
    return SolverConfig(dt=conf.get("dt"), cfl=conf.get("cfl", 0.9), t_end=conf.get("t_end", 1.0),
                        snapshot_every=conf.get("snapshot_every", 200),
                        **({"eps": conf["eps"]} if "eps" in conf else {}))


def _function(text: str | None, default, **constants):
    if text is None:
        return default
    expr = parse_expression(text, ("s",) + tuple(constants))
    fn = sympy.lambdify([sympy.Symbol("s", real=True)]
                        + [sympy.Symbol(k, real=True) for k in constants], expr, ["scipy", "numpy"])
    vals = list(constants.values())
    return lambda s: np.broadcast_to(np.asarray(fn(np.asarray(s, float), *vals), float),
                                     np.shape(s)).copy()


def _gamma(op, opts):
    if "gamma" in opts:
        return float(opts["gamma"])
    if op.gamma is None:
        raise ConfigError(f"operator {op.name} is not homogeneous; eigen scenarios need gamma",
                          "options/gamma")
    return float(op.gamma)


def _tol(sc, key, default):
    return float(sc.get("tolerances", {}).get(key, default))


# ---------------------------------------------------------------------------
# scenario kinds; each returns (checks, metrics, artifacts)


def _run_mc(sc, rng, neumann):
    opts = sc.get("options", {})
    space = build_space(sc["space"], rng)
    op = build_operator(sc["operator"])
    params = build_params(sc["curvature"], space)
    if neumann:
        params = CurvatureParams(params.kappa, 0.0, params.bigN)
    L = space.length
    amp = float(opts.get("amplitude", 1.0))
    if neumann:
        u0 = _function(opts.get("u0"), lambda s: amp * np.cos(np.pi * s / L), L=L)
        phi0 = _function(opts.get("phi0"), lambda s: amp * np.sin(np.pi * s / L), L=L)
        bc = "neumann_zero"
    else:
        u0 = _function(opts.get("u0"), lambda s: amp * np.sin(np.pi * s / L), L=L)
        phi0 = _function(opts.get("phi0"), lambda s: amp * np.sin(np.pi * s / L), L=L)
        bc = "dirichlet_zero"
    traj = solve_parabolic(Field1D.from_function(space, u0, bc), op, NO_SOURCE,
                           build_solver(sc.get("solver")))
    model_drift = comparison_drift(params)
    drift = (lambda s: -model_drift(s)) if opts.get("flip_drift") else model_drift
    s_grid = np.linspace(0.0, L / 2, space.m + 1)
    profile = evolve_profile(op, drift, NO_SOURCE, phi0, s_grid, snapshot_times=traj.times)
    tol_model = _tol(sc, "tol_model", TOL_MODEL)
    checks = [
        check_profile_admissible(profile, "MC_Neumann" if neumann else "MC_Dirichlet", op, drift),
        check_mc_dominated(traj, profile, tol_model, space=None if neumann else space),
    ]
    curve = modulus_of_continuity(traj.field(len(traj.times) - 1))
    phi_end = profile.values[-1]
    metrics = {"interior_worst": checks[1].metadata.get("interior_worst"),
               "params": params.to_json()}
    artifacts = [("modulus.dat", {"s": curve.s_grid, "omega": curve.omega,
                                  "phi": np.interp(curve.s_grid, s_grid, phi_end)}),
                 ("sup_norm.dat", _columns_of(traj)),
                 ("trajectory.csv", _trajectory_table(traj))]
    return checks, metrics, artifacts


def _decay_setup(sc, rng):
    opts = sc.get("options", {})
    space = build_space(sc["space"], rng)
    op = build_operator(sc["operator"])
    params = build_params(sc["curvature"], space)
    gamma = _gamma(op, opts)
    bc = opts.get("bc", "dirichlet_both")
    if bc == "neumann_both":
        raise ConfigError("decay needs a Dirichlet end", "options/bc")
    R = space.length / 2 if bc == "dirichlet_both" else space.length
    eig = shoot_1d_model(op, params, R, gamma)
    amp = float(opts.get("amplitude", 1.0))
    pde_bc = "dirichlet_zero" if bc == "dirichlet_both" else "dirichlet_left_neumann_right"
    if bc == "dirichlet_both":
        default_u0 = lambda s: amp * eig.shape(np.minimum(s, space.length - s))  # noqa: E731
    else:
        default_u0 = lambda s: amp * eig.shape(s)  # noqa: E731
    u0 = _function(opts.get("u0"), default_u0, L=space.length)
    traj = solve_parabolic(Field1D.from_function(space, u0, pde_bc), op, NO_SOURCE,
                           build_solver(sc.get("solver")))
    return space, op, params, gamma, eig, amp, traj


def _run_decay(sc, rng):
    opts = sc.get("options", {})
    space, op, params, gamma, eig, amp, traj = _decay_setup(sc, rng)
    if gamma != 1.0:
        raise ConfigError("the separable decay barrier needs gamma = 1", "options/gamma")
    s_grid = np.linspace(0.0, eig.grid[-1], 401)
    profile = ComparisonProfile.separable(s_grid, traj.times, lambda s: amp * eig.shape(s), eig.lam,
                                          lambda s: amp * eig.shape_derivative(s))
    tol_model = _tol(sc, "tol_model", TOL_MODEL)
    checks = [check_profile_admissible(profile, "Decay", op, comparison_drift(params)),
              check_decay(traj, profile, space, tol_model)]
    slack = checks[1].metadata["slack"]
    if opts.get("expect_sharp"):
        factor = _tol(sc, "slack_factor", 5.0)
        checks.append(CheckReport.from_violation("equality case slack", slack,
                                                 factor * checks[1].tolerance_used))
    metrics = {"lambda_model": eig.lam, "slack": slack, "params": params.to_json()}
    artifacts = [("sup_norm.dat", _columns_of(traj)),
                 ("eigenfunction.csv", {"s": eig.grid, "phi": eig.eigenfunction,
                                        "phi_s": eig.derivative})]
    return checks, metrics, artifacts


def _run_decay_rate(sc, rng):
    opts = sc.get("options", {})
    space, op, params, gamma, eig, amp, traj = _decay_setup(sc, rng)
    rate = decay_rate_estimate(traj)
    expected = float(opts.get("expected_rate", eig.lam))
    if gamma != 1.0:
        # separable solutions decay polynomially here; the rate is recorded, not asserted
        return [], {"rate": rate, "lambda_model": eig.lam, "asserted": False}, [
            ("sup_norm.dat", _columns_of(traj))]
    rel = _tol(sc, "rate_rel_tol", 0.02)
    if opts.get("rate_mode", "equal") == "equal":
        viol = abs(rate - expected) / expected
    else:
        viol = (expected - rate) / expected
    check = CheckReport.from_violation("fitted decay rate", viol, rel, (), rate=rate,
                                       expected=expected, mode=opts.get("rate_mode", "equal"))
    metrics = {"rate": rate, "expected": expected, "lambda_model": eig.lam}
    return [check], metrics, [("sup_norm.dat", _columns_of(traj))]


def _eigen_cases(sc, rng):
    count = int(sc.get("options", {}).get("count", 1))
    return [build_space(sc["space"], rng) for _ in range(count)]


def _run_eigen(sc, rng, neumann):
    opts = sc.get("options", {})
    op = build_operator(sc["operator"])
    gamma = _gamma(op, opts)
    rel_tol = _tol(sc, "rel_tol", EIGEN_REL_TOL)
    max_gap = sc.get("tolerances", {}).get("max_rel_gap")
    bc = "neumann_both" if neumann else opts.get("bc", "dirichlet_left_neumann_right")
    checks, cases, artifacts = [], [], []
    for k, space in enumerate(_eigen_cases(sc, rng)):
        params = build_params(sc["curvature"], space)
        lam_m = shoot_weighted_interval(op, space, bc, gamma)
        if neumann:
            variant = opts.get("variant", "finite_N" if params.finite_N else "infinite_N")
            lam_model = neumann_1d_model(op, params.kappa, params, space.length, gamma, variant)
        else:
            R = space.length / 2 if bc == "dirichlet_both" else space.length
            lam_model = shoot_1d_model(op, params, R, gamma)
        rep = check_eigen_comparison(lam_m, lam_model, rel_tol)
        rep.metadata["case"] = k
        checks.append(rep)
        gap = rep.metadata["rel_gap"]
        if max_gap is not None:
            checks.append(CheckReport.from_violation("model equality gap", abs(gap), float(max_gap),
                                                     (k,)))
        cases.append({"density": space.density.to_json(), "length": space.length,
                      "params": params.to_json(), "lambda_M": lam_m.lam,
                      "lambda_model": lam_model.lam, "rel_gap": gap})
        if k == 0:
            artifacts.append(("eigenfunction.csv", {"s": lam_m.grid, "phi": lam_m.eigenfunction,
                                                    "phi_s": lam_m.derivative}))
    if "sweep_R" in opts and not neumann:
        params = build_params(sc["curvature"], _eigen_cases(sc, rng)[0])
        radii = [float(r) for r in opts["sweep_R"]]
        lams = [shoot_1d_model(op, params, r, gamma).lam for r in radii]
        artifacts.append(("sweep.dat", {"R": radii, "lambda1": lams}))
    metrics = {"cases": cases, "max_abs_rel_gap": max(abs(c["rel_gap"]) for c in cases),
               "min_rel_gap": min(c["rel_gap"] for c in cases)}
    return checks, metrics, artifacts


def _run_supersolution(sc, rng):
    space = build_space(sc["space"], rng)
    op = build_operator(sc["operator"])
    params = build_params(sc["curvature"], space)
    profile = RadialProfile.from_expression(sc["options"]["profile"])
    rep = check_supersolution_boundary(profile, space, op, params,
                                       _tol(sc, "identity_tol", 1e-8))
    return [rep], {"params": params.to_json(), "slack": rep.metadata.get("slack")}, []


def _run_two_point(sc, rng):
    space = build_space(sc["space"], rng)
    params = build_params(sc["curvature"], space)
    rep = check_two_point_drift(space, params, _tol(sc, "identity_tol", 1e-8))
    return [rep], {"params": params.to_json()}, []


def _run_gradient_parabolic(sc, rng):
    opts = sc["options"]
    space = build_space(sc["space"], rng)
    op = build_operator(sc["operator"])
    params = build_params(sc["curvature"], space)
    phi0 = _function(opts["phi0"], None, L=space.length)
    u0 = _function(opts.get("u0"), phi0, L=space.length)
    traj = solve_parabolic(Field1D.from_function(space, u0, "neumann_zero"), op, NO_SOURCE,
                           build_solver(sc.get("solver")))
    kappa = params.kappa
    s_grid = np.linspace(0.0, space.length, 2 * space.m + 1)
    profile = evolve_profile(op, lambda s: -kappa * np.asarray(s), NO_SOURCE, phi0, s_grid,
                             bc="free", snapshot_times=traj.times)
    if "slope_scale" in opts:
        profile = profile.slope_scaled(float(opts["slope_scale"]))
    rep = check_gradient_bound(traj, invert_profile(profile),
                               tol_model=_tol(sc, "tol_model", TOL_MODEL))
    return [rep], {"kappa": kappa}, [("sup_norm.dat", _columns_of(traj))]


def _run_gradient_elliptic(sc, rng):
    opts = sc["options"]
    space = build_space(sc["space"], rng)
    op = build_operator(sc["operator"])
    params = build_params(sc["curvature"], space)
    source = SourceTerm.from_expressions(b=opts["source_b"])
    fld = solve_elliptic(op, source, space, "dirichlet_zero")
    u = fld.values
    profile = barrier_elliptic(op, source, params.kappa, (float(u.min()), float(u.max())),
                               float(opts["barrier_slope"]))
    if "slope_scale" in opts:
        profile = profile.slope_scaled(float(opts["slope_scale"]))
    rep = check_gradient_bound(fld, invert_profile(profile),
                               tol_model=_tol(sc, "tol_model", TOL_MODEL))
    metrics = {"kappa": params.kappa, "u_range": [float(u.min()), float(u.max())],
               "barrier_end": float(profile.s_grid[-1])}
    return [rep], metrics, [("solution.csv", {"s": fld.grid, "u": u})]


RUNNERS = {
    "mc_dirichlet": lambda sc, rng: _run_mc(sc, rng, False),
    "mc_neumann": lambda sc, rng: _run_mc(sc, rng, True),
    "decay": _run_decay,
    "decay_rate": _run_decay_rate,
    "eigen_dirichlet": lambda sc, rng: _run_eigen(sc, rng, False),
    "eigen_neumann": lambda sc, rng: _run_eigen(sc, rng, True),
    "supersolution": _run_supersolution,
    "two_point": _run_two_point,
    "gradient_parabolic": _run_gradient_parabolic,
    "gradient_elliptic": _run_gradient_elliptic,
}


# ---------------------------------------------------------------------------
# execution


def _outcome(control: bool, passed: bool, errored: bool) -> tuple[str, bool]:
    if errored:
        return "error", False
    if control:
        return ("expected-fail", True) if not passed else ("unexpected-pass", False)
    return ("pass", True) if passed else ("fail", False)


def run_scenario(sc: dict, seed: int) -> dict:
    """Execute one scenario; exceptions become an ``error`` outcome."""
    rng = np.random.default_rng([seed, zlib.crc32(sc["id"].encode())])
    control = bool(sc.get("control", False))
    result = {"id": sc["id"], "kind": sc["kind"], "control": control,
              "description": sc.get("description", ""), "seed": seed}
    artifacts = []
    try:
        checks, metrics, artifacts = RUNNERS[sc["kind"]](sc, rng)
        passed = all(c.passed for c in checks)
        result.update(passed=passed, checks=[c.to_json() for c in checks], metrics=metrics,
                      error=None)
        errored = False
    except (QcompError, ValueError, ArithmeticError) as exc:
        result.update(passed=False, checks=[], metrics={},
                      error=f"{type(exc).__name__}: {exc}",
                      traceback=traceback.format_exc(limit=3))
        errored = True
    result["outcome"], result["ok"] = _outcome(control, result["passed"], errored)
    outputs = sc.get("outputs", {})
    keep = [(name, cols) for name, cols in artifacts
            if (name.endswith(".csv") and outputs.get("csv", True))
            or (name.endswith(".dat") and outputs.get("plot", True))]
    return {"report": result, "artifacts": keep}


def run(config_path, out_dir, jobs=1, seed=0) -> int:
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenarios = cfg["scenarios"]
    if jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_scenario, scenarios, [seed] * len(scenarios)))
    else:
        results = [run_scenario(sc, seed) for sc in scenarios]

    # single collector: all files are written here, in config order
    summary = []
    for res in results:
        rep = res["report"]
        files = []
        for name, cols in res["artifacts"]:
            path = out / f"{rep['id']}_{name}"
            if name.endswith(".dat"):
                emit_plot_data(cols, path)
            else:
                write_csv(cols, path)
            files.append(path.name)
        rep["artifacts"] = files
        (out / f"{rep['id']}.json").write_text(dumps17(rep) + "\n")
        worst = max((c["worst_violation"] for c in rep["checks"]), default=None)
        summary.append({"id": rep["id"], "kind": rep["kind"], "control": rep["control"],
                        "outcome": rep["outcome"], "ok": rep["ok"], "worst_violation": worst,
                        "metrics": {k: v for k, v in rep["metrics"].items()
                                    if isinstance(v, (int, float)) and not isinstance(v, bool)},
                        "error": rep["error"]})
        flag = "ok " if rep["ok"] else "BAD"
        print(f"[{flag}] {rep['id']:<40} {rep['outcome']}", flush=True)
    all_ok = all(s["ok"] for s in summary)
    (out / "summary.json").write_text(dumps17({"schema_version": SCHEMA_VERSION,
                                               "config": str(config_path), "seed": seed,
                                               "all_ok": all_ok, "scenarios": summary}) + "\n")
    with open(out / "summary.csv", "w") as fh:
        fh.write("id,kind,control,outcome,ok,worst_violation\n")
        for s in summary:
            w = "" if s["worst_violation"] is None else _fmt(s["worst_violation"])
            fh.write(f"{s['id']},{s['kind']},{int(s['control'])},{s['outcome']},{int(s['ok'])},{w}\n")
    return 0 if all_ok else 1


def list_scenarios(stream=None) -> list[tuple[str, str, str]]:
    """Print ``id kind description`` for every bundled scenario and return the rows."""
    stream = stream or sys.stdout
    rows = []
    for path in bundled_configs():
        cfg = load_config(path)
        for sc in cfg["scenarios"]:
            tag = " (control)" if sc.get("control") else ""
            rows.append((sc["id"], sc["kind"], sc.get("description", "") + tag, path.name))
    width = max((len(r[0]) for r in rows), default=2)
    for sid, kind, desc, fname in rows:
        print(f"{sid:<{width}}  {kind:<19} {fname:<24} {desc}", file=stream)
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qcomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run every scenario in a config file")
    p_run.add_argument("config", help="path to a scenario JSON file or a bundled file name")
    p_run.add_argument("--out", default="qcomp_out", help="output directory (env QCOMP_OUT wins)")
    p_run.add_argument("--jobs", type=int, default=1, help="scenarios run in parallel")
    p_run.add_argument("--seed", type=int, default=0, help="seed for random densities")
    sub.add_parser("list", help="list bundled scenarios")
    args = parser.parse_args(argv)

    if args.command == "list":
        list_scenarios()
        return 0
    out = os.environ.get(OUT_ENV) or args.out
    try:
        return run(args.config, out, max(1, args.jobs), args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
