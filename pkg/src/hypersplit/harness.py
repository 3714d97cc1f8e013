"""Experiment orchestration: single runs, sweeps, COMP cross-checks.

A trial = sample a hypergraph, build the design, evaluate outcomes,
decode, compare.  Per-trial seeds are derived injectively from the
master seed and trial index, separately for the model and the design, so
reports are reproducible bit-for-bit (wall-clock fields aside) at any
worker count.

The no-false-negative assertion (every true edge recovered) runs on
every trial and raises InvariantViolation if it ever fails; in the
noiseless model a miss is a bug, not noise.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .decoder import DEFAULT_COMP_CAP, assert_pd_bound, comp_decode, decode
from .errors import ConfigError, InvariantViolation, ResourceCapError
from .hypergraph import make_model_params, sample_er
from .oracle import evaluate_outcomes
from .seeds import Domain, derive_key
from .testdesign import (
    DEFAULT_C1,
    DEFAULT_C2,
    DEFAULT_C_PRIME,
    DEFAULT_MEMORY_CAP,
    build_design,
    derive_params,
)
from .typicality import check_typicality, e_max

SWEEP_COLUMNS = [
    "n",
    "theta",
    "q",
    "m_bar",
    "C1",
    "C2",
    "C_prime",
    "trial",
    "seed",
    "m",
    "tests_total",
    "outcome_checks",
    "pd_max",
    "success",
    "false_positives",
    "typicality_pass",
    "decode_ms",
    "error",
]


@dataclass(frozen=True)
class ExperimentConfig:
    n_raw: int
    q: float | None = None
    theta: float | None = None
    m_bar: float | None = None
    multiplier: float = 1.0
    C1: float = DEFAULT_C1
    C2: float = DEFAULT_C2
    C_prime: float = DEFAULT_C_PRIME
    k: int = 3
    paper_faithful: bool = False
    trials: int = 1
    master_seed: int = 0
    workers: int = 1
    run_typicality: bool = True
    storage: str = "auto"
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP
    comp_cap: int = DEFAULT_COMP_CAP

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass
class TrialRecord:
    trial: int
    seed: int
    m: int = 0
    tests_total: int = 0
    outcome_checks: int = 0
    pd_sizes: list[int] = field(default_factory=list)
    pd_max: int = 0
    pd_bound_ok: bool = False
    success: bool = False
    false_positives: int = 0
    false_negatives: int = 0
    typicality_overall: bool | None = None
    decode_ms: float = 0.0
    error: str = ""


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    trials: list[TrialRecord]

    @property
    def completed(self) -> list[TrialRecord]:
        return [t for t in self.trials if not t.error]

    @property
    def success_rate(self) -> float:
        done = self.completed
        return sum(t.success for t in done) / len(done) if done else 0.0

    def aggregate(self) -> dict:
        done = self.completed
        agg = {
            "trials": len(self.trials),
            "completed": len(done),
            "failed": len(self.trials) - len(done),
            "success_rate": self.success_rate,
            "false_negatives_total": sum(t.false_negatives for t in self.trials),
        }
        if done:
            agg.update(
                mean_m=_mean(t.m for t in done),
                mean_outcome_checks=_mean(t.outcome_checks for t in done),
                mean_false_positives=_mean(t.false_positives for t in done),
                mean_decode_ms=_mean(t.decode_ms for t in done),
                max_pd=max(t.pd_max for t in done),
                pd_bound_rate=_mean(float(t.pd_bound_ok) for t in done),
                tests_total=done[0].tests_total,
            )
            if any(t.typicality_overall is not None for t in done):
                agg["typicality_rate"] = _mean(
                    float(bool(t.typicality_overall)) for t in done
                )
        return agg

    def to_dict(self) -> dict:
        return {
            "aggregate": self.aggregate(),
            "trials": [vars(t).copy() for t in self.trials],
        }


def _mean(xs) -> float:
    xs = list(xs)
    return sum(xs) / len(xs) if xs else 0.0


def _model_kwargs(cfg: ExperimentConfig) -> dict:
    return {"q": cfg.q, "theta": cfg.theta, "m_bar": cfg.m_bar}


def run_single_trial(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    """One end-to-end trial; resource caps become a recorded error."""
    model_seed = derive_key(cfg.master_seed, Domain.MODEL, trial)
    design_seed = derive_key(cfg.master_seed, Domain.DESIGN, trial)
    rec = TrialRecord(trial=trial, seed=model_seed)
    try:
        params = make_model_params(
            cfg.n_raw, multiplier=cfg.multiplier, seed=model_seed, k=cfg.k, **_model_kwargs(cfg)
        )
        h = sample_er(params)
        design_params = derive_params(
            params,
            C1=cfg.C1,
            C2=cfg.C2,
            C_prime=cfg.C_prime,
            k=cfg.k,
            seed=design_seed,
            paper_faithful=cfg.paper_faithful,
        )
        design = build_design(design_params, storage=cfg.storage, memory_cap_bytes=cfg.memory_cap_bytes)
        table = evaluate_outcomes(h, design)
        result = decode(design, table)

        truth = set(h.edges)
        estimate = set(result.estimated_edges)
        missed = truth - estimate
        rec.false_negatives = len(missed)
        if missed:
            raise InvariantViolation(
                f"decoder missed {len(missed)} true edges (seed {model_seed}): "
                f"{sorted(missed)[:5]}"
            )
        rec.m = h.m
        rec.tests_total = design_params.total_tests
        rec.outcome_checks = result.outcome_checks
        rec.pd_sizes = result.pd_sizes
        rec.pd_max = max(result.pd_sizes, default=0)
        rec.pd_bound_ok = assert_pd_bound(result.pd_sizes, e_max(params.m_bar, params.theta))
        rec.success = truth == estimate
        rec.false_positives = len(estimate - truth)
        rec.decode_ms = result.wall_time_ms
        if cfg.run_typicality and cfg.k == 3:  # level statistics are 3-uniform
            rec.typicality_overall = check_typicality(h, params).overall
    except ResourceCapError as exc:
        rec.error = f"resource-cap: {exc}"
    return rec


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """All trials, optionally across processes; order is by trial index."""
    if cfg.workers == 1 or cfg.trials == 1:
        records = [run_single_trial(cfg, t) for t in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(run_single_trial, [cfg] * cfg.trials, range(cfg.trials)))
    return ExperimentReport(config=cfg, trials=records)


# ---------------------------------------------------------------------------
# sweeps


def sweep(configs: list[ExperimentConfig]) -> list[dict]:
    """Run each grid point; one row per trial plus an aggregate row
    (marked trial = -1) per configuration.  Columns follow SWEEP_COLUMNS.
    """
    rows: list[dict] = []
    for cfg in configs:
        report = run_experiment(cfg)
        base = _config_columns(cfg, report)
        for t in report.trials:
            rows.append(
                base
                | {
                    "trial": t.trial,
                    "seed": t.seed,
                    "m": t.m,
                    "tests_total": t.tests_total,
                    "outcome_checks": t.outcome_checks,
                    "pd_max": t.pd_max,
                    "success": int(t.success),
                    "false_positives": t.false_positives,
                    "typicality_pass": int(bool(t.typicality_overall)),
                    "decode_ms": round(t.decode_ms, 3),
                    "error": t.error,
                }
            )
        agg = report.aggregate()
        rows.append(
            base
            | {
                "trial": -1,
                "seed": "",
                "m": round(agg.get("mean_m", 0.0), 3),
                "tests_total": agg.get("tests_total", 0),
                "outcome_checks": round(agg.get("mean_outcome_checks", 0.0), 3),
                "pd_max": agg.get("max_pd", 0),
                "success": round(agg["success_rate"], 4),
                "false_positives": round(agg.get("mean_false_positives", 0.0), 3),
                "typicality_pass": round(agg.get("typicality_rate", 0.0), 4),
                "decode_ms": round(agg.get("mean_decode_ms", 0.0), 3),
                "error": "",
            }
        )
    return rows


def _config_columns(cfg: ExperimentConfig, report: ExperimentReport) -> dict:
    params = make_model_params(
        cfg.n_raw, multiplier=cfg.multiplier, seed=0, k=cfg.k, **_model_kwargs(cfg)
    )
    return {
        "n": params.n,
        "theta": round(params.theta, 6),
        "q": params.q,
        "m_bar": round(params.m_bar, 6),
        "C1": cfg.C1,
        "C2": cfg.C2,
        "C_prime": cfg.C_prime,
    }


def write_sweep_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        _write_rows(rows, f)


def sweep_csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    _write_rows(rows, buf)
    return buf.getvalue()


def _write_rows(rows: list[dict], f) -> None:
    writer = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in SWEEP_COLUMNS})


# ---------------------------------------------------------------------------
# COMP cross-verification


def containment_violations(
    truth: set[tuple[int, ...]],
    estimate: set[tuple[int, ...]],
    comp_result: set[tuple[int, ...]],
) -> list[str]:
    """Check E subset-of estimate subset-of COMP; returns human messages."""
    out = []
    missing = truth - estimate
    if missing:
        out.append(f"decoder missed true edges: {sorted(missing)[:5]}")
    extra = estimate - comp_result
    if extra:
        out.append(f"decoder kept tuples COMP eliminated: {sorted(extra)[:5]}")
    return out


def verify_against_comp(cfg: ExperimentConfig) -> dict:
    """Per-trial containment check E <= estimate <= COMP at small n."""
    params = make_model_params(
        cfg.n_raw, multiplier=cfg.multiplier, seed=0, k=cfg.k, **_model_kwargs(cfg)
    )
    if params.n > cfg.comp_cap:
        raise ResourceCapError(
            f"COMP verification requires n <= {cfg.comp_cap}, got n={params.n}"
        )
    violations: list[dict] = []
    for trial in range(cfg.trials):
        model_seed = derive_key(cfg.master_seed, Domain.MODEL, trial)
        design_seed = derive_key(cfg.master_seed, Domain.DESIGN, trial)
        p = make_model_params(
            cfg.n_raw, multiplier=cfg.multiplier, seed=model_seed, k=cfg.k, **_model_kwargs(cfg)
        )
        h = sample_er(p)
        dp = derive_params(
            p, C1=cfg.C1, C2=cfg.C2, C_prime=cfg.C_prime, k=cfg.k, seed=design_seed,
            paper_faithful=cfg.paper_faithful,
        )
        design = build_design(dp, storage=cfg.storage, memory_cap_bytes=cfg.memory_cap_bytes)
        table = evaluate_outcomes(h, design)
        result = decode(design, table)
        comp = comp_decode(design, table, p.n, cap=cfg.comp_cap)
        msgs = containment_violations(set(h.edges), set(result.estimated_edges), comp)
        if msgs:
            violations.append({"trial": trial, "seed": model_seed, "violations": msgs})
    return {
        "trials": cfg.trials,
        "violations": violations,
        "ok": not violations,
    }
