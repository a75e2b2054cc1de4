"""Command-line surface.

Subcommands: solve / gibbs / trace-est / app {shadow|discriminate|design|
lowerbound} / ledger.  Every run takes --seed for bit-reproducibility and
emits a JSON result (optionally to --out); solve can also write a
per-iteration CSV trace.  Exit codes: 0 solved, 2 infeasible verdict,
3 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import FORMULAS, ledger as ledger_mod
from .errors import ContractViolation
from .gibbs import gibbs_exact, gibbs_operator_model
from .instance import SdpInstance, load_instance
from .ledger import QueryLedger
from .linalg import trace_distance
from .oracles import OperatorOracle
from .solver import SolverConfig, primal_oracle_solve, sdp_solve
from .traceest import build_trace_estimator, required_sample_count, trace_mean_estimate

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, default=_jsonable)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [[_jsonable(v) for v in row] for row in obj] if obj.ndim == 2 \
                else [_jsonable(v) for v in obj]
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return str(obj)


def _load(path: str) -> SdpInstance:
    try:
        return load_instance(path)
    except (OSError, ContractViolation) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _parse_y(text: str, size: int) -> np.ndarray:
    try:
        vals = json.loads(text)
        y = np.asarray(vals, dtype=np.float64)
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"invalid weight vector: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)
    if y.shape != (size,) or y.min() < 0:
        print(f"weight vector must be {size} nonnegative reals", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)
    return y


def cmd_solve(args) -> int:
    instance = _load(args.instance)
    ledger = QueryLedger()
    if args.framework == "primal":
        if args.guess is None:
            print("--guess is required for the primal framework", file=sys.stderr)
            return EXIT_INVALID
        cfg = SolverConfig.primal(instance, args.epsilon, guess=args.guess)
        out = primal_oracle_solve(
            instance, cfg, model=args.model, seed=args.seed, ledger=ledger,
            tau=args.tau, use_python=bool(args.trace_csv),
            capture_trace=bool(args.trace_csv),
        )
        payload = {
            "verdict": out.verdict,
            "guess": out.guess,
            "iterations": out.iterations_run,
            "y": out.y,
            "z": out.z,
            "report": out.report,
            "ledger": ledger.snapshot()["counts"],
        }
        if args.trace_csv and out.trace is not None:
            _write_trace(args.trace_csv, out.trace)
        _emit(payload, args.out)
        return EXIT_OK if out.verdict == "feasible" else EXIT_INFEASIBLE
    result = sdp_solve(
        instance, args.epsilon, model=args.model, seed=args.seed, tau=args.tau,
        ledger=ledger,
    )
    payload = {
        "verdict": "solved",
        "opt": result.opt_estimate,
        "certificates": {
            "dual": result.dual,
            "dual_guess": result.dual_guess,
            "primal_y": result.primal_y,
            "primal_z": result.primal_z,
            "primal_guess": result.primal_guess,
        },
        "ledger": ledger.snapshot()["counts"],
        "trace_csv_path": args.trace_csv,
    }
    payload.update(result.summary())
    payload.update({
        "dual_report": result.dual_report,
        "primal_report": result.primal_report,
    })
    if args.trace_csv and result.call_log:
        _write_trace(args.trace_csv, result.call_log)
    _emit(payload, args.out)
    return EXIT_OK


def _write_trace(path: str, rows: list) -> None:
    if not rows:
        return
    keys = sorted({k for row in rows for k in row})
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(row.get(k)) for k in keys})


def cmd_gibbs(args) -> int:
    instance = _load(args.instance)
    y = _parse_y(args.y, instance.m + 1)
    ledger = QueryLedger()
    mats = [instance.constraint(j) for j in range(instance.m + 1)]
    exact = gibbs_exact(y, mats)
    if args.model in ("sparse", "operator", "hamiltonian"):
        alpha = {"sparse": float(instance.s), "operator": 1.0,
                 "hamiltonian": 2.0 * args.tau}[args.model]
        oracle = OperatorOracle.from_instance(instance, alpha=alpha, ledger=ledger)
        state, charge = gibbs_operator_model(oracle, y, theta=args.theta)
    else:
        from .gibbs import gibbs_state_decomposition
        from .oracles import state_decomposition_for_instance
        from .vecstore import SparseVectorTree

        decomp = state_decomposition_for_instance(instance, ledger=ledger)
        tp = SparseVectorTree(instance.m + 1, 1e-12)
        tm = SparseVectorTree(instance.m + 1, 1e-12)
        for j in range(instance.m + 1):
            if y[j] > 0:
                tp.add([(j, y[j] * decomp.plus_weight[j])])
                tm.add([(j, y[j] * decomp.minus_weight[j])])
        state, info = gibbs_state_decomposition(
            decomp, tp, tm, K=max(float(y.sum()), 1.0), theta=args.theta,
            seed=args.seed, ledger=ledger,
        )
        charge = info["charge"]
    payload = {
        "state": state.mat,
        "trace_distance_to_exact": trace_distance(state, exact),
        "theta": args.theta,
        "charge": charge,
        "ledger": ledger.snapshot()["counts"],
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_trace_est(args) -> int:
    instance = _load(args.instance)
    y = _parse_y(args.y, instance.m + 1)
    mats = [instance.constraint(j) for j in range(instance.m + 1)]
    rho = gibbs_exact(y, mats)
    A = instance.constraint(args.j)
    est = build_trace_estimator(A, theta=args.theta)
    rng = np.random.default_rng(args.seed)
    ledger = QueryLedger()
    k = args.k if args.k else required_sample_count(1.0 / args.theta)
    value = trace_mean_estimate(est, rho.mat, k, rng, ledger=ledger)
    exact = float(np.trace(A @ rho.mat).real)
    payload = {
        "j": args.j,
        "estimate": value,
        "exact": exact,
        "error": abs(value - exact),
        "k": k,
        "ledger": ledger.snapshot()["counts"],
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_app(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.task == "shadow":
        from .apps import ShadowTask, shadow_tomography

        n, m = 4, 8
        tau = np.eye(n, dtype=complex) / n
        meas = []
        for _ in range(m):
            M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            M = (M + M.conj().T) / 2
            w, V = np.linalg.eigh(M)
            meas.append((V * np.clip(w / max(abs(w).max(), 1), 0, 1)) @ V.conj().T)
        result = shadow_tomography(ShadowTask(tau, meas, eps=args.epsilon),
                                   seed=args.seed)
        payload = {
            "estimates": result["estimates"],
            "targets": result["targets"],
            "max_error": float(np.abs(result["estimates"] - result["targets"]).max()),
            "tau_samples": result["sample_charge"],
        }
    elif args.task == "discriminate":
        from .apps import DiscriminationTask, solve_state_discrimination

        states = [np.diag([1.0, 0.0]).astype(complex),
                  np.diag([0.0, 1.0]).astype(complex)]
        result = solve_state_discrimination(
            DiscriminationTask(states), eps=args.epsilon, seed=args.seed,
        )
        payload = {
            "opt_estimate": result["opt_estimate"],
            "povm": result["povm"],
            "dual_matrix": result["dual_matrix"],
        }
    elif args.task == "design":
        from .apps import DesignTask, solve_e_optimal

        d = 3
        result = solve_e_optimal(
            DesignTask(np.eye(d), np.ones(d)), eps=args.epsilon, seed=args.seed,
        )
        payload = {"p": result["p"], "t": result["t"],
                   "opt_estimate": result["opt_estimate"]}
    else:
        from .apps import build_lower_bound_lp

        inst, _, info = build_lower_bound_lp(
            m=args.m, eps=args.inst_eps, tau=args.tau, case=args.case,
        )
        result = sdp_solve(inst, epsilon=args.epsilon, model="hamiltonian",
                           tau=info["tau"], seed=args.seed)
        payload = {
            "case": args.case,
            "opt_estimate": result.opt_estimate,
            "closed_form": info["opt"],
            "bracket": info["bracket"],
        }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_ledger(args) -> int:
    payload = {
        "conventions": ledger_mod.__doc__,
        "formulas": {name: (fn.__doc__ or "").strip()
                     for name, fn in FORMULAS.items()},
    }
    _emit(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsdplab")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run the full solver or a primal-oracle pass")
    ps.add_argument("instance")
    ps.add_argument("--epsilon", type=float, default=0.1)
    ps.add_argument("--model", choices=["sparse", "state", "operator", "hamiltonian"],
                    default="sparse")
    ps.add_argument("--framework", choices=["full", "primal"], default="full")
    ps.add_argument("--guess", type=float, default=None)
    ps.add_argument("--tau", type=float, default=2.0)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--trace-csv", default=None)
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_solve)

    pg = sub.add_parser("gibbs", help="prepare a Gibbs state and compare to exact")
    pg.add_argument("instance")
    pg.add_argument("--y", required=True, help="JSON list of m+1 nonnegative weights")
    pg.add_argument("--model", choices=["sparse", "state", "operator", "hamiltonian"],
                    default="operator")
    pg.add_argument("--theta", type=float, default=1e-3)
    pg.add_argument("--tau", type=float, default=2.0)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", default=None)
    pg.set_defaults(func=cmd_gibbs)

    pt = sub.add_parser("trace-est", help="averaged trace estimate on a Gibbs state")
    pt.add_argument("instance")
    pt.add_argument("--y", required=True)
    pt.add_argument("--j", type=int, default=1)
    pt.add_argument("--theta", type=float, default=1e-2)
    pt.add_argument("--k", type=int, default=0)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out", default=None)
    pt.set_defaults(func=cmd_trace_est)

    pa = sub.add_parser("app", help="application drivers")
    pa.add_argument("task", choices=["shadow", "discriminate", "design", "lowerbound"])
    pa.add_argument("--epsilon", type=float, default=0.1)
    pa.add_argument("--m", type=int, default=4)
    pa.add_argument("--inst-eps", type=float, default=0.1)
    pa.add_argument("--tau", type=float, default=2.0)
    pa.add_argument("--case", choices=["a", "b"], default="a")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--out", default=None)
    pa.set_defaults(func=cmd_app)

    pl = sub.add_parser("ledger", help="print the cost-formula registry")
    pl.add_argument("--out", default=None)
    pl.set_defaults(func=cmd_ledger)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractViolation as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
