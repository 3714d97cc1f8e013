"""Command-line interface.

Subcommands: generate, design, run, sweep, typicality, verify, bounds.
Exit codes: 0 ok, 1 invariant violation, 2 config error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bounds as bounds_mod
from .errors import ConfigError, InvariantViolation, ResourceCapError
from .harness import (
    ExperimentConfig,
    run_experiment,
    sweep,
    sweep_csv_text,
    verify_against_comp,
    write_sweep_csv,
)
from .hypergraph import make_model_params, read_text, sample_er, write_text
from .testdesign import DEFAULT_C1, DEFAULT_C2, DEFAULT_C_PRIME, build_design, derive_params
from .typicality import check_typicality


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="requested vertex count (padded up)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--theta", type=float, help="sparsity exponent in (0,1)")
    group.add_argument("--q", type=float, help="edge probability")
    group.add_argument("--m-bar", type=float, dest="m_bar", help="expected edge count")
    p.add_argument("--q-mult", type=float, default=1.0, help="constant multiplier on derived q")
    p.add_argument("--seed", type=int, default=0)


def _add_design_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c1", type=float, default=DEFAULT_C1)
    p.add_argument("--c2", type=float, default=DEFAULT_C2)
    p.add_argument("--c-prime", type=float, default=DEFAULT_C_PRIME, dest="c_prime")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--paper-faithful", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hypersplit")
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a hypergraph to the text format")
    _add_model_args(g)
    g.add_argument("--out", type=str, default=None)

    d = sub.add_parser("design", help="export design parameters as JSON (no assignments)")
    _add_model_args(d)
    _add_design_args(d)
    d.add_argument("--out", type=str, default=None)
    d.add_argument("--export-design", type=str, default=None, dest="export_design")

    r = sub.add_parser("run", help="run one experiment, print a JSON report")
    _add_model_args(r)
    _add_design_args(r)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--no-typicality", action="store_true")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out", type=str, default=None)

    s = sub.add_parser("sweep", help="run a grid, emit CSV rows")
    s.add_argument("--n", type=str, required=True, help="comma-separated vertex counts")
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("--theta", type=float)
    group.add_argument("--m-bar", type=str, dest="m_bar", help="comma-separated expected edge counts")
    s.add_argument("--q-mult", type=float, default=1.0)
    _add_design_args(s)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=str, default=None)
    s.add_argument("--format", choices=("csv", "json"), default="csv")

    t = sub.add_parser("typicality", help="level statistics vs their bounds")
    t.add_argument("--in", dest="infile", type=str, default=None, help="hypergraph text file")
    t.add_argument("--n", type=int)
    group = t.add_mutually_exclusive_group()
    group.add_argument("--theta", type=float)
    group.add_argument("--q", type=float)
    group.add_argument("--m-bar", type=float, dest="m_bar")
    t.add_argument("--q-mult", type=float, default=1.0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--epsilon", type=float, default=None)
    t.add_argument("--out", type=str, default=None)

    v = sub.add_parser("verify", help="containment check against the COMP baseline")
    _add_model_args(v)
    _add_design_args(v)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--out", type=str, default=None)

    b = sub.add_parser("bounds", help="tail bound vs empirical tail")
    b.add_argument("--mu", type=float, required=True)
    group = b.add_mutually_exclusive_group(required=True)
    group.add_argument("--delta", type=float)
    group.add_argument("--t", type=float)
    b.add_argument("--n", type=int, default=1000)
    b.add_argument("--trials", type=int, default=100_000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", type=str, default=None)
    return top


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _model_from_args(args) -> dict:
    return dict(q=args.q, theta=args.theta, m_bar=args.m_bar)


def _cmd_generate(args) -> int:
    params = make_model_params(
        args.n, multiplier=args.q_mult, seed=args.seed, **_model_from_args(args)
    )
    h = sample_er(params)
    if args.out:
        write_text(h, args.out)
    else:
        sys.stdout.write(f"{h.n_raw} {h.n} {h.m}\n")
        for e in h.edges:
            sys.stdout.write(" ".join(map(str, e)) + "\n")
    return 0


def _cmd_design(args) -> int:
    params = make_model_params(
        args.n, multiplier=args.q_mult, seed=args.seed, **_model_from_args(args)
    )
    dp = derive_params(
        params, C1=args.c1, C2=args.c2, C_prime=args.c_prime, k=args.k,
        paper_faithful=args.paper_faithful,
    )
    design = build_design(dp, storage="lazy")
    payload = json.dumps(design.export_dict(), indent=2)
    _emit(payload, args.export_design or args.out)
    return 0


def _experiment_config(args, n_raw: int, **overrides) -> ExperimentConfig:
    base = dict(
        n_raw=n_raw,
        q=getattr(args, "q", None),
        theta=args.theta,
        m_bar=getattr(args, "m_bar", None),
        multiplier=args.q_mult,
        C1=args.c1,
        C2=args.c2,
        C_prime=args.c_prime,
        k=args.k,
        paper_faithful=args.paper_faithful,
        trials=args.trials,
        master_seed=args.seed,
        workers=getattr(args, "workers", 1),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _cmd_run(args) -> int:
    cfg = _experiment_config(args, args.n, run_typicality=not args.no_typicality)
    if args.format == "csv":
        rows = sweep([cfg])
        if args.out:
            write_sweep_csv(rows, args.out)
        else:
            sys.stdout.write(sweep_csv_text(rows))
        return 0
    report = run_experiment(cfg)
    _emit(json.dumps(report.to_dict(), indent=2), args.out)
    return 0


def _cmd_sweep(args) -> int:
    ns = [int(x) for x in args.n.split(",") if x]
    configs = []
    if args.theta is not None:
        grid = [(n, {"theta": args.theta}) for n in ns]
    else:
        mbars = [float(x) for x in args.m_bar.split(",") if x]
        grid = [(n, {"m_bar": mb}) for n in ns for mb in mbars]
    for n, model in grid:
        configs.append(
            ExperimentConfig(
                n_raw=n,
                multiplier=args.q_mult,
                C1=args.c1,
                C2=args.c2,
                C_prime=args.c_prime,
                k=args.k,
                paper_faithful=args.paper_faithful,
                trials=args.trials,
                master_seed=args.seed,
                workers=args.workers,
                **model,
            )
        )
    rows = sweep(configs)
    if args.format == "json":
        _emit(json.dumps(rows, indent=2), args.out)
    elif args.out:
        write_sweep_csv(rows, args.out)
    else:
        sys.stdout.write(sweep_csv_text(rows))
    return 0


def _cmd_typicality(args) -> int:
    if args.infile:
        h = read_text(args.infile)
        if args.m_bar is None and args.q is None and args.theta is None:
            model = {"m_bar": float(h.m)}
        else:
            model = _model_from_args(args)
        params = make_model_params(h.n_raw, multiplier=args.q_mult, seed=args.seed, **model)
    else:
        if args.n is None:
            raise ConfigError("typicality needs --in FILE or --n plus a model parameter")
        params = make_model_params(
            args.n, multiplier=args.q_mult, seed=args.seed, **_model_from_args(args)
        )
        h = sample_er(params)
    report = check_typicality(h, params, epsilon_n=args.epsilon)
    _emit(json.dumps(report.to_dict(), indent=2), args.out)
    return 0


def _cmd_verify(args) -> int:
    cfg = _experiment_config(args, args.n)
    result = verify_against_comp(cfg)
    _emit(json.dumps(result, indent=2), args.out)
    return 0 if result["ok"] else 1


def _cmd_bounds(args) -> int:
    mu = args.mu
    n = args.n
    p = mu / n
    if args.delta is not None:
        threshold = (1.0 + args.delta) * mu
        bound = bounds_mod.chernoff_mult(mu, args.delta)
        inputs = {"mu": mu, "delta": args.delta, "n": n, "p": p, "threshold": threshold}
    else:
        threshold = args.t
        bound = bounds_mod.chernoff_poisson(mu, args.t)
        inputs = {"mu": mu, "t": args.t, "n": n, "p": p, "threshold": threshold}
    emp = bounds_mod.empirical_tail(n, p, threshold, args.trials, args.seed)
    payload = {
        "inputs": inputs | {"trials": args.trials, "seed": args.seed},
        "bound": bound,
        "empirical": emp,
        "standard_error": bounds_mod.standard_error(emp, args.trials),
    }
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


_HANDLERS = {
    "generate": _cmd_generate,
    "design": _cmd_design,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "typicality": _cmd_typicality,
    "verify": _cmd_verify,
    "bounds": _cmd_bounds,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
