"""Command-line harness: validate configs, run solves, run benchmark suites.

Exit codes: 0 success, 2 configuration problem, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import apps, bounds as bounds_mod
from .core import ConfigurationError, Problem, ComponentPair, ZERO_PROX, ZERO_SUBGRADIENT
from .engine import RunLimits, Trace, Variant, run
from .prox import (
    l1_prox_function,
    rank1_quadratic_prox_function,
    set_distance_prox_function,
    weighted_norm_prox_function,
)
from .schedule import OrderingPolicy, StepsizeSchedule
from .sets import WHOLE_SPACE, Ball, Box, ConstraintSet, Halfspace, Hyperplane

_STEPSIZE_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["constant", "harmonic", "table"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "a": {"type": "number", "exclusiveMinimum": 0},
        "b": {"type": "number", "exclusiveMinimum": 0},
        "values": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "cycle_locked": {"type": ["boolean", "null"]},
    },
    "required": ["kind"],
}

_SET_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["halfspace", "ball", "box", "hyperplane", "whole_space"]},
        "a": {"type": "array", "items": {"type": "number"}},
        "b": {"type": "number"},
        "center": {"type": "array", "items": {"type": "number"}},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "lower": {"type": "array", "items": {"type": "number"}},
        "upper": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["type"],
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "problem": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["lasso", "weber", "abs1d", "feasibility", "custom"]},
            },
            "required": ["kind"],
        },
        "algorithm": {
            "type": "object",
            "properties": {
                "variant": {"enum": [v.value for v in Variant]},
                "ordering": {"enum": ["cyclic", "shuffle", "uniform"]},
                "seed": {"type": "integer"},
                "stepsize": _STEPSIZE_SCHEMA,
                "beta": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
            },
            "required": ["stepsize"],
        },
        "limits": {
            "type": "object",
            "properties": {
                "max_iters": {"type": ["integer", "null"], "minimum": 0},
                "max_cycles": {"type": ["integer", "null"], "minimum": 0},
                "target_value": {"type": ["number", "null"]},
            },
        },
        "report": {
            "type": "object",
            "properties": {
                "eval_stride": {"type": ["integer", "null"], "minimum": 1},
                "emit": {"type": "array", "items": {"enum": ["csv", "json"]}},
                "epsilon": {"type": ["number", "null"], "exclusiveMinimum": 0},
            },
        },
        "x0": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["problem", "algorithm"],
}

_KNOWN_TOP_KEYS = {"problem", "algorithm", "limits", "report", "x0"}

_DEFAULT_VARIANTS = {
    "abs1d": Variant.SUBGRAD,
    "lasso": Variant.PROX_SUBGRAD,
    "weber": Variant.PROX,
    "feasibility": Variant.PROX,
}


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def validate_config(config: dict) -> list[str]:
    """Return a list of warnings; raise ConfigurationError on a bad config."""
    validator = Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.path) or "(top level)"
        raise ConfigurationError(f"config field {path}: {err.message}")
    kind = config["problem"]["kind"]
    if kind == "custom" and "components" not in config["problem"]:
        raise ConfigurationError("config field problem.components: required for custom problems")
    if kind == "feasibility" and "sets" not in config["problem"]:
        raise ConfigurationError("config field problem.sets: required for feasibility problems")
    if kind == "custom" and "variant" not in config["algorithm"]:
        raise ConfigurationError("config field algorithm.variant: required for custom problems")
    warnings = [
        f"unknown top-level key {key!r} ignored"
        for key in config
        if key not in _KNOWN_TOP_KEYS
    ]
    return warnings


def build_set(desc: dict) -> ConstraintSet:
    t = desc["type"]
    if t == "whole_space":
        return WHOLE_SPACE
    if t == "halfspace":
        return Halfspace(desc["a"], desc["b"])
    if t == "hyperplane":
        return Hyperplane(desc["a"], desc["b"])
    if t == "ball":
        return Ball(desc["center"], desc["radius"])
    if t == "box":
        return Box(desc["lower"], desc["upper"])
    raise ConfigurationError(f"unknown set type {t!r}")


def _build_f_part(desc: dict | None):
    if desc is None or desc.get("type", "zero") == "zero":
        return ZERO_PROX
    t = desc["type"]
    if t == "l1":
        return l1_prox_function(desc["gamma"])
    if t == "quad":
        return rank1_quadratic_prox_function(desc["c"], desc["d"])
    if t == "norm":
        return weighted_norm_prox_function(desc["center"], desc["w"])
    if t == "dist":
        return set_distance_prox_function(build_set(desc["set"]), desc["gamma"])
    raise ConfigurationError(f"unknown prox-part type {t!r}")


def _build_h_part(desc: dict | None):
    if desc is None or desc.get("type", "zero") == "zero":
        return ZERO_SUBGRADIENT
    t = desc["type"]
    if t == "abs":
        return apps.abs_value_function(desc["b"])
    if t == "quad":
        return apps.quadratic_residual_function(desc["c"], desc["d"])
    if t == "norm":
        return apps.weber_distance_function(desc["center"], desc["w"])
    if t == "l1":
        fn = l1_prox_function(desc["gamma"])
        from .core import SubgradientFunction

        return SubgradientFunction(value=fn.value, subgradient=fn.subgradient, label=fn.label)
    raise ConfigurationError(f"unknown subgradient-part type {t!r}")


def build_problem(pconf: dict) -> Problem:
    kind = pconf["kind"]
    if kind == "abs1d":
        if "b" in pconf:
            b = [float(v) for v in pconf["b"]]
        else:
            m = int(pconf.get("m", 3))
            b = [float(i) for i in range(1, m + 1)]
        box = tuple(pconf["box"]) if pconf.get("box") else None
        return apps.onedim_abs_benchmark(b, box=box)
    if kind == "lasso":
        split = apps.LassoSplit(pconf.get("split_mode", "per_component_scaled"))
        if "generate" in pconf:
            g = pconf["generate"]
            inst = apps.generate_lasso(int(g["seed"]), int(g["m"]), int(g["n"]),
                                       float(pconf["gamma"]), split)
        else:
            rows = tuple((row["c"], row["d"]) for row in pconf["rows"])
            inst = apps.LassoInstance(rows=rows, gamma=float(pconf["gamma"]), split_mode=split)
        return apps.lasso_problem(inst)
    if kind == "weber":
        anchors = tuple((a["y"], a["w"]) for a in pconf["anchors"])
        inst = apps.WeberInstance(anchors=anchors)
        return apps.weber_problem(inst, prox_mode=bool(pconf.get("prox_mode", True)))
    if kind == "feasibility":
        sets = [build_set(d) for d in pconf["sets"]]
        gamma = float(pconf.get("gamma", 100.0))
        components = tuple(
            ComponentPair(prox_part=set_distance_prox_function(s, gamma),
                          label=f"penalty:{s.description}")
            for s in sets
        )
        if "dim" in pconf:
            dim = int(pconf["dim"])
        else:
            first = pconf["sets"][0]
            vec = first.get("a") or first.get("center") or first.get("lower")
            if vec is None:
                raise ConfigurationError("config field problem.dim: required")
            dim = len(vec)
        return Problem(components=components, constraint=WHOLE_SPACE, dim=dim)
    if kind == "custom":
        constraint = build_set(pconf["constraint"]) if pconf.get("constraint") else WHOLE_SPACE
        components = tuple(
            ComponentPair(prox_part=_build_f_part(c.get("f")),
                          subgrad_part=_build_h_part(c.get("h")))
            for c in pconf["components"]
        )
        return Problem(components=components, constraint=constraint, dim=int(pconf["dim"]))
    raise ConfigurationError(f"unknown problem kind {kind!r}")


def build_schedule(sconf: dict) -> StepsizeSchedule:
    kind = sconf["kind"]
    locked = sconf.get("cycle_locked")
    if kind == "constant":
        return StepsizeSchedule.constant(float(sconf["alpha"]), cycle_locked=locked)
    if kind == "harmonic":
        return StepsizeSchedule.harmonic(float(sconf["a"]), float(sconf["b"]),
                                         cycle_locked=locked)
    return StepsizeSchedule.from_table(sconf["values"], cycle_locked=locked)


def normalize_config(config: dict) -> dict:
    """Fill defaults so the stored config replays the run exactly."""
    pconf = dict(config["problem"])
    aconf = dict(config.get("algorithm", {}))
    kind = pconf["kind"]
    if "variant" not in aconf:
        if kind not in _DEFAULT_VARIANTS:
            raise ConfigurationError("config field algorithm.variant: required")
        aconf["variant"] = _DEFAULT_VARIANTS[kind].value
    aconf.setdefault("ordering", "cyclic")
    aconf.setdefault("seed", 0)
    aconf.setdefault("beta", 0.0)
    limits = dict(config.get("limits", {}))
    limits.setdefault("max_iters", None)
    limits.setdefault("max_cycles", None)
    limits.setdefault("target_value", None)
    if limits["max_iters"] is None and limits["max_cycles"] is None:
        raise ConfigurationError("config field limits: set max_iters or max_cycles")
    report = dict(config.get("report", {}))
    report.setdefault("eval_stride", None)
    report.setdefault("emit", ["csv", "json"])
    report.setdefault("epsilon", None)
    out = {
        "problem": pconf,
        "algorithm": aconf,
        "limits": limits,
        "report": report,
    }
    if "x0" in config:
        out["x0"] = [float(v) for v in config["x0"]]
    return out


def execute_config(config: dict, timing: bool = False) -> tuple[Problem, Trace]:
    """Build everything from a normalized config and run it."""
    problem = build_problem(config["problem"])
    aconf = config["algorithm"]
    try:
        variant = Variant(aconf["variant"])
    except ValueError:
        raise ConfigurationError(
            f"config field algorithm.variant: unknown variant {aconf['variant']!r}"
        )
    ordering = OrderingPolicy(aconf["ordering"], problem.m, int(aconf["seed"]))
    schedule = build_schedule(aconf["stepsize"])
    limits = RunLimits(
        max_iters=config["limits"]["max_iters"],
        max_cycles=config["limits"]["max_cycles"],
        target_value=config["limits"]["target_value"],
    )
    trace = run(
        problem,
        variant,
        ordering,
        schedule,
        limits,
        x0=config.get("x0"),
        eval_stride=config["report"]["eval_stride"],
        momentum_beta=float(aconf.get("beta", 0.0)),
        timing=timing,
    )
    trace.metadata["config"] = config
    return problem, trace


def _write_outputs(problem: Problem, trace: Trace, config: dict, out_dir: Path,
                   quiet: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    emit = config["report"]["emit"]
    if "csv" in emit:
        (out_dir / "trace.csv").write_text(trace.to_csv())
    if "json" in emit:
        (out_dir / "trace.json").write_text(trace.to_json())
    report = _bound_report(problem, trace, config)
    (out_dir / "bounds.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if not quiet:
        print(f"best_value={trace.best_value!r} rows={len(trace.rows)} out={out_dir}")


def _bound_report(problem: Problem, trace: Trace, config: dict) -> dict:
    sconf = config["algorithm"]["stepsize"]
    alpha = sconf.get("alpha")
    if alpha is None:
        alpha = trace.rows[0][2] if trace.rows and trace.rows[0][2] else None
    out: dict = {"observed_best": trace.best_value}
    if problem.optimal_value is not None:
        out["observed_gap"] = trace.best_value - problem.optimal_value
    if trace.oracle_log.n_calls == 0 or alpha is None:
        out["note"] = "bounds omitted: no oracle data or no constant stepsize"
        return out
    c = bounds_mod.estimate_c(trace.oracle_log)
    if c <= 0:
        out["note"] = "bounds omitted: zero oracle norms"
        return out
    x0 = np.asarray(config.get("x0", [0.0] * problem.dim), dtype=float)
    dist0 = problem.distance_to_optimum(x0)
    epsilon = config["report"]["epsilon"]
    inputs = bounds_mod.BoundInputs(
        alpha=float(alpha),
        m=problem.m,
        c=c,
        dist0=dist0 if dist0 is not None else 0.0,
        epsilon=epsilon if epsilon is not None else max(c * c * float(alpha), 1e-12),
    )
    report = bounds_mod.build_report(
        inputs,
        observed_gap=out.get("observed_gap"),
        c_source="empirical",
        with_estimates=dist0 is not None,
    )
    out.update(report.to_dict())
    out["inputs"] = {
        "alpha": inputs.alpha,
        "m": inputs.m,
        "c": inputs.c,
        "dist0": dist0,
        "epsilon": inputs.epsilon,
    }
    return out


def cmd_run(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read config: {exc}")
    try:
        warnings = validate_config(config)
        config = normalize_config(config)
    except ConfigurationError as exc:
        return _fail(str(exc))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    try:
        problem, trace = execute_config(config, timing=args.timing)
    except ConfigurationError as exc:
        return _fail(str(exc))
    _write_outputs(problem, trace, config, Path(args.out), args.quiet)
    if trace.aborted:
        print(f"error: solver aborted: {trace.aborted}", file=sys.stderr)
        return 3
    return 0


def cmd_validate(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read config: {exc}")
    try:
        warnings = validate_config(config)
        normalize_config(config)
    except ConfigurationError as exc:
        return _fail(str(exc))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not args.quiet:
        print("config ok")
    return 0


def _parse_seeds(raw: str) -> list[int]:
    if "," in raw:
        return [int(s) for s in raw.split(",") if s.strip() != ""]
    return list(range(int(raw)))


def _thread_cap(n: int) -> int:
    env = os.environ.get("INCRPROX_THREADS")
    cap = int(env) if env else 4
    return max(1, min(cap, n))


def _bench_bounds(seeds: list[int], out_dir: Path, quiet: bool) -> int:
    m, alpha, iters = 10, 0.01, 100_000
    problem = apps.onedim_abs_benchmark([float(i) for i in range(1, m + 1)])
    schedule = StepsizeSchedule.constant(alpha)
    limits = RunLimits(max_iters=iters)
    inputs = bounds_mod.BoundInputs(alpha=alpha, m=m, c=1.0, dist0=0.0, epsilon=1.0)
    cyclic_bound = bounds_mod.cyclic_error_bound(inputs)
    randomized_bound = bounds_mod.randomized_error_bound(inputs)
    fstar = problem.optimal_value

    cyclic_trace = run(problem, Variant.SUBGRAD, OrderingPolicy.cyclic(m), schedule, limits)
    cyclic_gap = cyclic_trace.best_value - fstar

    def one(seed: int) -> dict:
        trace = run(problem, Variant.SUBGRAD, OrderingPolicy.uniform_random(m, seed),
                    schedule, limits)
        gap = trace.best_value - fstar
        return {
            "seed": seed,
            "gap": gap,
            "within_randomized_bound": gap <= randomized_bound,
            "within_cyclic_bound": gap <= cyclic_bound,
        }

    with ThreadPoolExecutor(max_workers=_thread_cap(len(seeds))) as pool:
        per_seed = list(pool.map(one, seeds))
    per_seed.sort(key=lambda r: seeds.index(r["seed"]))

    report = {
        "suite": "bounds",
        "m": m,
        "alpha": alpha,
        "c": 1.0,
        "optimal_value": fstar,
        "cyclic": {"gap": cyclic_gap, "bound": cyclic_bound,
                   "pass": cyclic_gap <= cyclic_bound},
        "randomized": {"bound": randomized_bound, "per_seed": per_seed},
        "bound_ratio": bounds_mod.bound_ratio(m),
        "criteria": {
            "cyclic_gap_within_cyclic_bound": cyclic_gap <= cyclic_bound,
            "all_randomized_within_randomized_bound": all(
                r["within_randomized_bound"] for r in per_seed
            ),
            "all_randomized_within_cyclic_bound": all(
                r["within_cyclic_bound"] for r in per_seed
            ),
        },
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench_bounds.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if not quiet:
        print(json.dumps(report["criteria"], sort_keys=True))
    return 0


def random_halfspaces(seed: int, count: int = 3, dim: int = 2) -> list[Halfspace]:
    """Random halfspaces sharing an interior point, for feasibility runs."""
    rng = np.random.default_rng(seed)
    anchor = rng.uniform(-0.5, 0.5, size=dim)
    sets = []
    for _ in range(count):
        a = rng.standard_normal(dim)
        a /= np.linalg.norm(a)
        margin = rng.uniform(0.05, 0.5)
        sets.append(Halfspace(a, float(a @ anchor) + margin))
    return sets


def _bench_feasibility(seeds: list[int], out_dir: Path, quiet: bool) -> int:
    gamma, iters, tol = 1000.0, 10_000, 1e-6

    def one(seed: int) -> dict:
        sets = random_halfspaces(seed)
        components = tuple(
            ComponentPair(prox_part=set_distance_prox_function(s, gamma)) for s in sets
        )
        problem = Problem(components=components, constraint=WHOLE_SPACE, dim=2)
        trace = run(problem, Variant.PROX, OrderingPolicy.cyclic(len(sets)),
                    StepsizeSchedule.constant(1.0), RunLimits(max_iters=iters),
                    x0=[5.0, -7.0])
        final = trace.final_point
        dists = [s.distance(final) for s in sets]
        return {"seed": seed, "max_distance": max(dists), "pass": max(dists) <= tol}

    with ThreadPoolExecutor(max_workers=_thread_cap(len(seeds))) as pool:
        per_seed = list(pool.map(one, seeds))
    per_seed.sort(key=lambda r: seeds.index(r["seed"]))
    report = {
        "suite": "feasibility",
        "tolerance": tol,
        "per_seed": per_seed,
        "criteria": {"all_within_tolerance": all(r["pass"] for r in per_seed)},
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench_feasibility.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n"
    )
    if not quiet:
        print(json.dumps(report["criteria"], sort_keys=True))
    return 0


def cmd_bench(args) -> int:
    if not args.suite:
        return _fail("bench requires --suite")
    try:
        seeds = _parse_seeds(args.seeds)
    except ValueError:
        return _fail(f"cannot parse --seeds {args.seeds!r}")
    if not seeds:
        return _fail("no seeds requested")
    out_dir = Path(args.out)
    if args.suite == "bounds":
        return _bench_bounds(seeds, out_dir, args.quiet)
    if args.suite == "feasibility":
        return _bench_feasibility(seeds, out_dir, args.quiet)
    return _fail(f"unknown suite {args.suite!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="incrprox",
                                     description="Incremental subgradient-proximal solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a config and write trace/bound files")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--quiet", action="store_true")
    p_run.add_argument("--timing", action="store_true",
                       help="record wall-clock per row (breaks byte determinism)")
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="run a benchmark suite")
    p_bench.add_argument("--suite", default="")
    p_bench.add_argument("--seeds", default="20", help="count or comma list")
    p_bench.add_argument("--out", default="out")
    p_bench.add_argument("--quiet", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    p_val = sub.add_parser("validate", help="schema-check a config, no run")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--quiet", action="store_true")
    p_val.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
