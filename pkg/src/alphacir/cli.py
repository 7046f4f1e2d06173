"""Command-line front end: every analytic and Monte Carlo operation plus the
figure-data presets, emitting CSV data files and a JSON reproducibility
sidecar per run.  No plotting here; the CSVs are the deliverable.

Exit codes: 0 success, 2 validation error, 3 numerical-diagnostic failure
(dual-route disagreement, concordance violation).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .affine import bond_price_from_curve, solve_v, stationary_laplace, yield_from_curve
from .derivatives import put_laplace, put_price
from .jumps import (
    RouteDisagreement,
    expected_tau,
    counter_laplace,
    survival_curve,
    survival_tau,
    survival_tau_via_rhat,
)
from .mc import mc_bond, mc_survival
from .mechanism import (
    ModelParams,
    boundary_classification,
    change_of_measure,
    mechanism_report,
)
from .sim import (
    SimConfig,
    THINNED,
    simulate_hawkes,
    simulate_hawkes_batch,
    simulate_lou,
    simulate_root,
    simulate_thinned,
    write_sidecar,
)
from .stable import StableSpec, sample_stable_increment

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIAGNOSTIC = 3

FIG12_PARAMS = dict(a=0.1, b=0.3, sigma=0.1, sigma_z=0.3, r0=0.1)
FIG3_PARAMS = dict(a=0.1, b=0.3, sigma=0.1, sigma_z=0.3, r0=0.05)
FIG45_PARAMS = dict(a=0.1, b=0.1, sigma=0.1, sigma_z=0.1, r0=0.2)


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, default=0.1, help="mean-reversion speed")
    p.add_argument("--b", type=float, default=0.3, help="mean-reversion level")
    p.add_argument("--sigma", type=float, default=0.1, help="diffusion coefficient")
    p.add_argument("--sigma-z", type=float, default=0.3, help="jump coefficient")
    p.add_argument("--alpha", type=float, default=1.5, help="stability index in (1, 2]")
    p.add_argument("--r0", type=float, default=0.05, help="initial short rate")


def _add_out_args(p: argparse.ArgumentParser, default_stem: str) -> None:
    p.add_argument("--out", type=str, default=default_stem,
                   help="output stem; writes <out>.csv and <out>.json")
    p.add_argument("--seed", type=int, default=0)


def _params(args) -> ModelParams:
    return ModelParams(a=args.a, b=args.b, sigma=args.sigma,
                       sigma_z=args.sigma_z, alpha=args.alpha, r0=args.r0)


def _finish(args, command, params, config, t0, result=None) -> int:
    write_sidecar(args.out + ".json", command, params, config,
                  getattr(args, "seed", None), time.time() - t0, __version__)
    if result is not None:
        with open(args.out + "_result.json", "w") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
        print(json.dumps(result))
    return EXIT_OK


def _write_csv(stem, header, columns) -> None:
    arr = np.column_stack(columns)
    np.savetxt(stem + ".csv", arr, delimiter=",", header=header, comments="")


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    t0 = time.time()
    params = _params(args)
    if args.scheme == "hawkes":
        path = simulate_hawkes(args.a, args.b, args.sigma_z, args.horizon,
                               n=args.n_agents, seed=args.seed)
        config = {"scheme": "hawkes", "horizon": args.horizon,
                  "n_agents": args.n_agents, "seed": args.seed}
    else:
        scheme = THINNED if args.scheme == "thinned" else "root_euler"
        config_obj = SimConfig(dt=args.dt, horizon=args.horizon, scheme=scheme,
                               y=args.y if args.scheme != "root" else None,
                               seed=args.seed)
        if args.scheme == "root":
            path = simulate_root(params, config_obj)
        elif args.scheme == "thinned":
            path = simulate_thinned(params, config_obj)
        elif args.scheme == "lou":
            path = simulate_lou(params, config_obj)
        else:
            raise ValueError(f"unknown scheme {args.scheme!r}")
        config = config_obj.to_json()
        config["scheme"] = args.scheme
    path.to_csv(args.out + ".csv")
    if path.events:
        path.events_to_csv(args.out + "_events.csv")
    return _finish(args, "simulate", params, config, t0)


# ------------------------------------------------------- analytic pricing


def cmd_bond(args) -> int:
    t0 = time.time()
    params = _params(args)
    curve = solve_v(0.0, 1.0, args.tmax, params)
    grid = np.linspace(0.0, args.tmax, args.points)
    prices = [bond_price_from_curve(curve, T, params.r0) for T in grid]
    _write_csv(args.out, "T,price", [grid, prices])
    return _finish(args, "bond", params,
                   {"tmax": args.tmax, "points": args.points}, t0)


def cmd_yield(args) -> int:
    t0 = time.time()
    params = _params(args)
    r = params.r0 if args.rate is None else args.rate
    curve = solve_v(0.0, 1.0, args.kappa, params)
    val = yield_from_curve(curve, args.kappa, r)
    return _finish(args, "yield", params, {"kappa": args.kappa, "rate": r}, t0,
                   result={"kappa": args.kappa, "rate": r, "value": val})


def cmd_put_laplace(args) -> int:
    t0 = time.time()
    params = _params(args)
    val, diag = put_laplace(args.theta, args.kappa, args.strike, params.r0,
                            params, with_diagnostics=True)
    result = {"laplace_value": val, "theta": args.theta, "kappa": args.kappa,
              "K": args.strike, "kbar": diag["kbar"],
              "diagnostics": {"q1": diag["q1"], "eps": diag["eps"],
                              "nodes": diag["nodes"], "void": diag["void"]}}
    return _finish(args, "put-laplace", params,
                   {"theta": args.theta, "kappa": args.kappa, "K": args.strike},
                   t0, result=result)


def cmd_put_price(args) -> int:
    t0 = time.time()
    params = _params(args)
    price, diag = put_price(args.maturity, args.kappa, args.strike, params.r0,
                            params, n_terms=args.n_terms, with_diagnostics=True)
    result = {"price": price, "T": args.maturity, "kappa": args.kappa,
              "K": args.strike, "kbar": diag["kbar"], "diagnostics": diag}
    return _finish(args, "put-price", params,
                   {"T": args.maturity, "kappa": args.kappa, "K": args.strike,
                    "n_terms": args.n_terms}, t0, result=result)


def cmd_stationary(args) -> int:
    t0 = time.time()
    params = _params(args)
    grid = np.linspace(0.0, args.pmax, args.points)
    vals = [stationary_laplace(p, params) for p in grid]
    _write_csv(args.out, "p,laplace", [grid, vals])
    return _finish(args, "stationary", params,
                   {"pmax": args.pmax, "points": args.points}, t0)


def cmd_boundary(args) -> int:
    t0 = time.time()
    params = _params(args)
    rep = mechanism_report(params)
    result = {"classification": boundary_classification(params),
              "x0": rep.x0, "drift": params.a}
    return _finish(args, "boundary", params, {}, t0, result=result)


def cmd_measure_change(args) -> int:
    t0 = time.time()
    params = _params(args)
    new_params, new_spec = change_of_measure(params, args.eta, args.theta)
    result = {"params": new_params.to_json(),
              "jump_spec": {"variant": new_spec.variant, "theta": new_spec.theta}}
    return _finish(args, "measure-change", params,
                   {"eta": args.eta, "theta": args.theta}, t0, result=result)


# ----------------------------------------------------------- jump analytics


def cmd_jump_survival(args) -> int:
    t0 = time.time()
    params = _params(args)
    grid = np.linspace(0.0, args.tmax, args.points)
    curve = survival_curve(args.y_bar, grid, params)
    _write_csv(args.out, "t,survival", [grid, curve.derived])
    t_chk = 0.5 * args.tmax
    s1 = survival_tau(args.y_bar, t_chk, params)
    s2 = survival_tau_via_rhat(args.y_bar, t_chk, params)
    if abs(s1 - s2) > 1e-6:
        print(f"dual-route survival disagreement at t={t_chk}: "
              f"{s1} vs {s2}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return _finish(args, "jump-survival", params,
                   {"y_bar": args.y_bar, "tmax": args.tmax,
                    "points": args.points}, t0)


def cmd_jump_counter(args) -> int:
    t0 = time.time()
    params = _params(args)
    grid = np.linspace(0.0, args.tmax, args.points)
    vals = [counter_laplace(args.p, args.y_bar, t, params) for t in grid]
    _write_csv(args.out, "t,counter_laplace", [grid, vals])
    return _finish(args, "jump-counter", params,
                   {"p": args.p, "y_bar": args.y_bar, "tmax": args.tmax,
                    "points": args.points}, t0)


def cmd_jump_expectation(args) -> int:
    t0 = time.time()
    params = _params(args)
    est = expected_tau(args.y_bar, params)
    result = {"value": est.value, "survival_route": est.survival_route,
              "density_route": est.density_route}
    return _finish(args, "jump-expectation", params, {"y_bar": args.y_bar},
                   t0, result=result)


def cmd_hawkes_limit(args) -> int:
    t0 = time.time()
    rng = np.random.default_rng(args.seed)
    lam = simulate_hawkes_batch(args.a, args.b, args.sigma_z, args.horizon,
                                args.n_agents, args.n_paths, rng)
    limit_mean = args.b * (1.0 - np.exp(-args.a * args.horizon))
    result = {"n_agents": args.n_agents, "horizon": args.horizon,
              "mc_mean": float(np.mean(lam)),
              "mc_se": float(np.std(lam, ddof=1) / np.sqrt(len(lam))),
              "limit_mean": limit_mean}
    return _finish(args, "hawkes-limit", None,
                   {"a": args.a, "b": args.b, "sigma_z": args.sigma_z,
                    "horizon": args.horizon, "n_agents": args.n_agents,
                    "n_paths": args.n_paths}, t0, result=result)


# ------------------------------------------------------------ figure presets


def _coupled_paths(alpha: float, dt: float, horizon: float, seed: int, pd: dict):
    """Driver path Z and the short rate built from that same Z, one seed."""
    rng = np.random.default_rng(seed)
    n = int(round(horizon / dt))
    dB = rng.normal(0.0, np.sqrt(dt), n)
    if alpha == 2.0:
        dz = rng.normal(0.0, np.sqrt(2.0 * dt), n)
    else:
        dz = sample_stable_increment(StableSpec(alpha=alpha), dt, rng, size=n)
    z = np.concatenate([[0.0], np.cumsum(dz)])
    r = np.empty(n + 1)
    r[0] = pd["r0"]
    a, b, sig, sz = pd["a"], pd["b"], pd["sigma"], pd["sigma_z"]
    for k in range(n):
        rp = max(r[k], 0.0)
        r[k + 1] = max(r[k] + a * (b - rp) * dt + sig * np.sqrt(rp) * dB[k]
                       + sz * rp ** (1.0 / alpha) * dz[k], 0.0)
    times = dt * np.arange(n + 1)
    return times, z, r


def cmd_fig1(args) -> int:
    t0 = time.time()
    cols, names = [], []
    for alpha in (2.0, 1.5, 1.2):
        times, z, _ = _coupled_paths(alpha, args.dt, args.horizon, args.seed,
                                     FIG12_PARAMS)
        cols.append(z)
        names.append(f"z_alpha_{alpha}")
    _write_csv(args.out, "t," + ",".join(names), [times] + cols)
    return _finish(args, "fig1", None,
                   {**FIG12_PARAMS, "dt": args.dt, "horizon": args.horizon}, t0)


def cmd_fig2(args) -> int:
    t0 = time.time()
    cols, names = [], []
    for alpha in (2.0, 1.5, 1.2):
        times, _, r = _coupled_paths(alpha, args.dt, args.horizon, args.seed,
                                     FIG12_PARAMS)
        cols.append(r)
        names.append(f"r_alpha_{alpha}")
    _write_csv(args.out, "t," + ",".join(names), [times] + cols)
    return _finish(args, "fig2", None,
                   {**FIG12_PARAMS, "dt": args.dt, "horizon": args.horizon}, t0)


def cmd_fig3(args) -> int:
    t0 = time.time()
    grid = np.linspace(0.0, args.tmax, args.points)
    cols, names = [], []
    for alpha in (1.2, 1.5, 2.0):
        p = ModelParams(alpha=alpha, **FIG3_PARAMS)
        curve = solve_v(0.0, 1.0, max(args.tmax, 1e-6), p)
        cols.append([bond_price_from_curve(curve, T, p.r0) for T in grid])
        names.append(f"alpha_{alpha}")
    p_cir = ModelParams(alpha=2.0, **{**FIG3_PARAMS, "sigma_z": 0.0})
    curve = solve_v(0.0, 1.0, max(args.tmax, 1e-6), p_cir)
    cols.append([bond_price_from_curve(curve, T, p_cir.r0) for T in grid])
    names.append("cir")
    _write_csv(args.out, "T," + ",".join(names), [grid] + cols)
    return _finish(args, "fig3", None,
                   {**FIG3_PARAMS, "tmax": args.tmax, "points": args.points}, t0)


def cmd_fig4(args) -> int:
    t0 = time.time()
    grid = np.linspace(0.0, args.tmax, args.points)
    cols, names = [], []
    for alpha in (1.2, 1.5, 1.8):
        p = ModelParams(alpha=alpha, **FIG45_PARAMS)
        curve = survival_curve(args.y_bar, grid, p)
        cols.append(curve.derived)
        names.append(f"alpha_{alpha}")
    _write_csv(args.out, "t," + ",".join(names), [grid] + cols)
    return _finish(args, "fig4", None,
                   {**FIG45_PARAMS, "y_bar": args.y_bar, "tmax": args.tmax,
                    "points": args.points}, t0)


def cmd_fig5(args) -> int:
    t0 = time.time()
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.points)
    vals = []
    for alpha in alphas:
        p = ModelParams(alpha=float(alpha), **FIG45_PARAMS)
        vals.append(expected_tau(args.y_bar, p).value)
    _write_csv(args.out, "alpha,expected_tau", [alphas, vals])
    return _finish(args, "fig5", None,
                   {**FIG45_PARAMS, "y_bar": args.y_bar,
                    "alpha_min": args.alpha_min, "alpha_max": args.alpha_max,
                    "points": args.points}, t0)


# --------------------------------------------------------------- selfcheck


def cmd_selfcheck(args) -> int:
    t0 = time.time()
    failures = []

    p3 = ModelParams(alpha=1.5, **FIG3_PARAMS)
    analytic = bond_price_from_curve(solve_v(0.0, 1.0, 1.0, p3), 1.0, p3.r0)
    est = mc_bond(p3, 1.0, n_paths=args.n_paths, dt=1e-3, seed=args.seed)
    z = abs(est.value - analytic) / est.std_error
    print(f"bond T=1 alpha=1.5: mc={est.value:.6f}±{est.std_error:.6f} "
          f"analytic={analytic:.6f} z={z:.2f}")
    if z > 3.0:
        failures.append("bond")

    p4 = ModelParams(alpha=1.5, **FIG45_PARAMS)
    analytic_s = survival_tau(0.1, 2.0, p4)
    est_s = mc_survival(p4, 0.1, [2.0], n_paths=args.n_paths, dt=2e-3,
                        seed=args.seed)[0]
    z = abs(est_s.value - analytic_s) / est_s.std_error
    print(f"survival t=2 alpha=1.5: mc={est_s.value:.6f}±{est_s.std_error:.6f} "
          f"analytic={analytic_s:.6f} z={z:.2f}")
    if z > 3.0:
        failures.append("survival")

    print(f"selfcheck {'FAILED: ' + ', '.join(failures) if failures else 'ok'} "
          f"({time.time() - t0:.1f}s)")
    return EXIT_DIAGNOSTIC if failures else EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="alphacir",
        description="Stable-jump short-rate model: simulation, pricing, "
                    "jump analytics, figure data.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one trajectory to CSV")
    _add_model_args(p)
    p.add_argument("--scheme", choices=["root", "thinned", "lou", "hawkes"],
                   default="root")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--y", type=float, default=1.0,
                   help="mark-space jump threshold (thinned/lou)")
    p.add_argument("--n-agents", type=int, default=50,
                   help="branching population size (hawkes)")
    _add_out_args(p, "simulate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bond", help="zero-coupon price curve")
    _add_model_args(p)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=101)
    _add_out_args(p, "bond")
    p.set_defaults(func=cmd_bond)

    p = sub.add_parser("yield", help="constant-maturity yield")
    _add_model_args(p)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=None,
                   help="current short rate; defaults to r0")
    _add_out_args(p, "yield")
    p.set_defaults(func=cmd_yield)

    p = sub.add_parser("put-laplace", help="Laplace transform of the "
                                           "running-minimum yield put")
    _add_model_args(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--strike", type=float, required=True)
    _add_out_args(p, "put_laplace")
    p.set_defaults(func=cmd_put_laplace)

    p = sub.add_parser("put-price", help="running-minimum yield put price")
    _add_model_args(p)
    p.add_argument("--maturity", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--strike", type=float, required=True)
    p.add_argument("--n-terms", type=int, default=14)
    _add_out_args(p, "put_price")
    p.set_defaults(func=cmd_put_price)

    p = sub.add_parser("jump-survival", help="P(first large jump > t) curve")
    _add_model_args(p)
    p.add_argument("--y-bar", type=float, default=0.1,
                   help="rate-space jump threshold")
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--points", type=int, default=301)
    _add_out_args(p, "jump_survival")
    p.set_defaults(func=cmd_jump_survival)

    p = sub.add_parser("jump-counter", help="Laplace functional of the "
                                            "large-jump counter")
    _add_model_args(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--y-bar", type=float, default=0.1)
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--points", type=int, default=301)
    _add_out_args(p, "jump_counter")
    p.set_defaults(func=cmd_jump_counter)

    p = sub.add_parser("jump-expectation", help="expected first-large-jump time")
    _add_model_args(p)
    p.add_argument("--y-bar", type=float, default=0.1)
    _add_out_args(p, "jump_expectation")
    p.set_defaults(func=cmd_jump_expectation)

    p = sub.add_parser("stationary", help="Laplace transform of the limit law")
    _add_model_args(p)
    p.add_argument("--pmax", type=float, default=50.0)
    p.add_argument("--points", type=int, default=101)
    _add_out_args(p, "stationary")
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("boundary", help="boundary classification at zero")
    _add_model_args(p)
    _add_out_args(p, "boundary")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("hawkes-limit", help="rescaled branching intensity "
                                            "against its diffusion limit")
    p.add_argument("--a", type=float, default=0.1)
    p.add_argument("--b", type=float, default=0.3)
    p.add_argument("--sigma-z", type=float, default=0.3)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--n-agents", type=int, default=50)
    p.add_argument("--n-paths", type=int, default=10_000)
    _add_out_args(p, "hawkes_limit")
    p.set_defaults(func=cmd_hawkes_limit)

    p = sub.add_parser("measure-change", help="parameters after the "
                                              "exponential change of measure")
    _add_model_args(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    _add_out_args(p, "measure_change")
    p.set_defaults(func=cmd_measure_change)

    p = sub.add_parser("fig1", help="stable driver trajectories")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=10.0)
    _add_out_args(p, "fig1")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="short-rate trajectories on the fig1 drivers")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=10.0)
    _add_out_args(p, "fig2")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", help="bond curves across stability indices")
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--points", type=int, default=121)
    _add_out_args(p, "fig3")
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("fig4", help="first-large-jump survival curves")
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--points", type=int, default=301)
    p.add_argument("--y-bar", type=float, default=0.1)
    _add_out_args(p, "fig4")
    p.set_defaults(func=cmd_fig4)

    p = sub.add_parser("fig5", help="expected first-large-jump time vs alpha")
    p.add_argument("--alpha-min", type=float, default=1.1)
    p.add_argument("--alpha-max", type=float, default=1.9)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--y-bar", type=float, default=0.1)
    _add_out_args(p, "fig5")
    p.set_defaults(func=cmd_fig5)

    p = sub.add_parser("selfcheck", help="quick analytic-vs-MC concordance")
    p.add_argument("--n-paths", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selfcheck)

    return top


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RouteDisagreement as exc:
        print(f"numerical diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
