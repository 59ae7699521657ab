"""Command-line entry point: ``bayesphase optimal|sweep|profile|optimize|verify``.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import sweep as sweeps
from .core import optimal_strategy, report_to_dict
from .optimizer import OptimizerConfig, optimize_probe, result_to_dict
from .prior import CircularPrior, diffusive_prior, prior_from_dict, prior_to_dict, uniform_prior
from .states import DensityMatrix, ProbeState, named_state, state_from_dict, state_to_dict
from .verify import run_checks

STATE_CHOICES = ("noon", "bw", "binomial", "flat")


class UsageError(Exception):
    pass


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _prior(args, n: int | None = None) -> CircularPrior:
    n = args.n if n is None else n
    min_order = n + 1 if n is not None else 0
    try:
        if args.prior == "uniform":
            return uniform_prior()
        if args.prior == "diffusive":
            if args.t is None:
                raise UsageError("--prior diffusive needs --t")
            return diffusive_prior(args.t, min_order=min_order)
        if args.prior.startswith("fourier-file:"):
            return prior_from_dict(_load_json(args.prior.split(":", 1)[1]), min_order=min_order)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown prior {args.prior!r}")


def _config(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(tol=args.tol, max_iter=args.max_iter, restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fixed_state(args) -> ProbeState | DensityMatrix | None:
    """State named by ``--state``; None when it is to be optimized."""
    choice = args.state
    if choice.startswith("file:"):
        try:
            state = state_from_dict(_load_json(choice.split(":", 1)[1]))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"invalid state file: {exc}") from exc
        if args.n is not None and state.n != args.n:
            raise UsageError(f"state file has N={state.n} but --n {args.n} was given")
        return state
    if choice not in STATE_CHOICES + ("optimal",):
        raise UsageError(f"unknown state {choice!r}")
    if args.n is None:
        raise UsageError(f"--state {choice} needs --n")
    if choice == "optimal":
        return None
    try:
        return named_state(choice, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _state_and_prior(args):
    state = _fixed_state(args)
    prior = _prior(args, args.n if state is None else state.n)
    if state is None:
        state = optimize_probe(args.n, prior, _config(args)).state
    return state, prior


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _dump(obj, path: str | None) -> None:
    with _output(path) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_optimal(args) -> int:
    state, prior = _state_and_prior(args)
    report = optimal_strategy(state, prior)
    out = report_to_dict(report)
    out.update(n=state.n, state=state_to_dict(state), prior=prior_to_dict(prior))
    _dump(out, args.out)
    return 0


def cmd_optimize(args) -> int:
    if args.n is None:
        raise UsageError("optimize needs --n")
    prior = _prior(args)
    result = optimize_probe(args.n, prior, _config(args))
    _dump(result_to_dict(result), args.out)
    return 0


def cmd_sweep(args) -> int:
    if args.n is None:
        raise UsageError("sweep needs --n")
    try:
        ts = sweeps.parse_t_grid(args.t_grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    states = [s.strip() for s in args.states.split(",") if s.strip()]
    unknown = [s for s in states if s not in STATE_CHOICES + ("optimal",)]
    if not states or unknown:
        raise UsageError(f"bad --states list {args.states!r}")
    records = sweeps.run_sweep(args.n, ts, states, _config(args), jobs=args.jobs or sweeps.default_jobs())
    with _output(args.out) as fh:
        sweeps.write_sweep_csv(fh, records)
    return 0


def cmd_profile(args) -> int:
    state, prior = _state_and_prior(args)
    if not isinstance(state, ProbeState):
        raise UsageError("profile needs a pure state")
    if args.points < 1:
        raise UsageError("--points must be positive")
    prof = sweeps.profile(state, prior, args.points)
    with _output(args.out) as fh:
        sweeps.write_rows(fh, prof.header, prof.rows())
    meta = args.meta
    if meta is None and args.out not in (None, "-"):
        meta = str(Path(args.out).with_suffix(".json"))
    if meta is not None:
        _dump(prof.metadata(), meta)
    return 0


def cmd_verify(args) -> int:
    ok = True
    for name, passed, detail in run_checks(args.seed):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="photon number N")
    common.add_argument("--prior", default="diffusive",
                        help="diffusive | uniform | fourier-file:<path> (default: diffusive)")
    common.add_argument("--t", type=float, help="diffusion time of the diffusive prior")
    common.add_argument("--state", default="optimal",
                        help="noon | bw | binomial | flat | optimal | file:<path> (default: optimal)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    common.add_argument("--tol", type=float, default=1e-12, help="optimizer stop: fidelity increase below this")
    common.add_argument("--max-iter", type=int, default=1000)
    common.add_argument("--restarts", type=int, default=4)

    parser = argparse.ArgumentParser(prog="bayesphase", description="Optimal single-shot Bayesian phase estimation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("optimal", parents=[common], help="optimal strategy for a probe state").set_defaults(func=cmd_optimal)
    sub.add_parser("optimize", parents=[common], help="optimize the probe state").set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", parents=[common], help="cost versus prior width as CSV")
    p.add_argument("--t-grid", default="0.001:30:log:40", help="min:max:log|lin:count")
    p.add_argument("--states", default="noon,bw,binomial,optimal")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("profile", parents=[common], help="p(k|phi) of the optimal strategy as CSV")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--meta", help="sidecar JSON with estimator phases and amplitudes")
    p.set_defaults(func=cmd_profile)

    sub.add_parser("verify", parents=[common], help="run the oracle self-checks").set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bayesphase: error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"bayesphase: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
