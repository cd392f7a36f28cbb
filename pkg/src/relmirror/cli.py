"""Command-line harness: ``relmirror {solve,certify,budget,subproblem,gen}``.

All run parameters come from a single JSON config document (``--config``);
``--seed`` and ``--out`` override the corresponding config entries.  Exit
codes: 0 success, 1 a certification check failed, 2 configuration error,
3 numerical failure.  Trace and report files are written atomically
(temp file + rename) so failures never leave partial outputs.
"""

import argparse
import concurrent.futures
import json
import math
import os
import sys
import time

import numpy as np

from . import certify as certify_mod
from .errors import (
    ConfigError,
    InvalidInputError,
    InvalidPolynomialError,
    NumericalFailureError,
    ParseError,
    ReferenceDegeneracyError,
    RelMirrorError,
)
from .geometry import reference_from_growth_polynomial
from .problems import (
    IepInstance,
    SvmInstance,
    generate_instance,
    iep_iteration_budget,
    instance_from_dict,
    instance_to_dict,
    parse_libsvm,
    svm_iteration_budget,
)
from .solvers import (
    ConstantStep,
    EpsOverMSquaredStep,
    RelativeStrongStep,
    SolverConfig,
    iteration_budget,
    mirror_descent,
    stochastic_replication,
)
from .subproblem import solve_ls

TRACE_HEADER = "iter,t,f_x,f_bar,f_hat,f_best"

CHECK_NAMES = (
    "relative_continuity",
    "key_property",
    "stochastic_boundedness",
    "bregman_upper_cubic",
    "bregman_upper_quartic",
    "bregman_lower",
)


def _fmt(value):
    # repr of a Python float is the shortest round-trip decimal form
    return repr(float(value))


def _atomic_write(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load_config(path):
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from None


def _resolve_problem(cfg, required=True):
    sources = [k for k in ("problem", "problem_path", "libsvm_path") if k in cfg]
    if not sources:
        if required:
            raise ConfigError("config must specify one of: problem, problem_path, libsvm_path")
        return None
    if len(sources) > 1:
        raise ConfigError(f"config specifies multiple problem sources: {sources}")
    if "problem" in cfg:
        return instance_from_dict(cfg["problem"])
    if "problem_path" in cfg:
        path = cfg["problem_path"]
        try:
            with open(path) as fh:
                return instance_from_dict(json.load(fh))
        except FileNotFoundError:
            raise ConfigError(f"problem file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"problem file {path} is not valid JSON: {e}") from None
    path = cfg["libsvm_path"]
    if "lambda" not in cfg:
        raise ConfigError("libsvm_path requires a 'lambda' entry")
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"data file not found: {path}") from None
    features, labels = parse_libsvm(text)
    return SvmInstance(features, labels, cfg["lambda"])


def _resolve_reference(cfg, problem):
    if "reference_coeffs" in cfg:
        return reference_from_growth_polynomial(cfg["reference_coeffs"])
    if isinstance(problem, SvmInstance):
        from .problems import svm_reference

        return svm_reference(problem)
    if isinstance(problem, IepInstance):
        from .problems import iep_reference

        return iep_reference(problem)
    raise ConfigError("no reference_coeffs given and none derivable from the problem")


def _build_policy(doc):
    try:
        kind = doc["kind"]
        if kind == "constant":
            return ConstantStep(doc["t"])
        if kind == "eps_over_m_squared":
            return EpsOverMSquaredStep(doc["eps"], doc["m"])
        if kind == "relative_strong":
            return RelativeStrongStep(doc["mu"])
    except (KeyError, TypeError) as e:
        raise ConfigError(f"malformed policy document: {e}") from None
    raise ConfigError(f"unknown policy kind {kind!r}")


def _resolve_run(cfg):
    """Turn a solve config into (policy, iterations, echo-fragment)."""
    has_iters = "iterations" in cfg
    has_eps = "epsilon_mode" in cfg
    if has_iters == has_eps:
        raise ConfigError("config must specify exactly one of 'iterations' or 'epsilon_mode'")
    if has_iters:
        iterations = cfg["iterations"]
        if "policy" not in cfg:
            raise ConfigError("'iterations' mode requires a 'policy' entry")
        policy = _build_policy(cfg["policy"])
        return policy, iterations, {"iterations": iterations, "policy": cfg["policy"]}
    mode = cfg["epsilon_mode"]
    try:
        eps, m, d0 = mode["eps"], mode["m"], mode["d0"]
    except (KeyError, TypeError) as e:
        raise ConfigError(f"epsilon_mode requires eps, m, d0: {e}") from None
    iterations = iteration_budget(m, d0, eps)
    policy = _build_policy(cfg["policy"]) if "policy" in cfg else EpsOverMSquaredStep(eps, m)
    echo = {
        "epsilon_mode": {"eps": eps, "m": m, "d0": d0},
        "iterations": iterations,
        "policy": cfg.get("policy", {"kind": "eps_over_m_squared", "eps": eps, "m": m}),
    }
    return policy, iterations, echo


def _worker_count(cfg):
    env = os.environ.get("RELMIRROR_THREADS")
    if env is not None:
        try:
            workers = int(env)
        except ValueError:
            raise ConfigError(f"RELMIRROR_THREADS must be an integer, got {env!r}") from None
    else:
        workers = cfg.get("threads", os.cpu_count() or 1)
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


def _trace_csv(trace):
    lines = [TRACE_HEADER]
    for row in trace.rows:
        f_hat = "" if row.f_hat is None else _fmt(row.f_hat)
        lines.append(
            f"{row.i},{_fmt(row.t)},{_fmt(row.f_x)},{_fmt(row.f_bar)},{f_hat},{_fmt(row.f_best)}"
        )
    return "\n".join(lines) + "\n"


def _trace_json(trace):
    rows = [
        {
            "iter": row.i,
            "t": row.t,
            "f_x": row.f_x,
            "f_bar": row.f_bar,
            "f_hat": row.f_hat,
            "f_best": row.f_best,
        }
        for row in trace.rows
    ]
    return json.dumps({"rows": rows}, indent=2) + "\n"


def _run_summary(trace):
    return {
        "replication": trace.replication,
        "k": trace.k,
        "f_final_iterate": float(trace.f_iterates[-1]),
        "f_bar": trace.f_bar,
        "f_hat": trace.f_hat,
        "f_best": trace.f_best,
        "x_bar": [float(v) for v in trace.x_bar],
        "x_hat": None if trace.x_hat is None else [float(v) for v in trace.x_hat],
        "step_sum": trace.bar_weight_sum,
    }


def cmd_solve(args):
    cfg = _load_config(args.config)
    problem = _resolve_problem(cfg)
    ref = _resolve_reference(cfg, problem)
    policy, iterations, run_echo = _resolve_run(cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    algorithm = cfg.get("algorithm", "deterministic")
    if algorithm not in ("deterministic", "stochastic"):
        raise ConfigError(f"algorithm must be 'deterministic' or 'stochastic', got {algorithm!r}")
    replications = cfg.get("replications", 1)
    if algorithm == "deterministic" and replications != 1:
        raise ConfigError("replications > 1 requires the stochastic algorithm")
    if algorithm == "stochastic" and not hasattr(problem, "stochastic_subgradient"):
        raise ConfigError("the configured problem has no stochastic oracle")
    x0 = np.asarray(cfg.get("x0", np.zeros(problem.dim)), dtype=float)
    out_dir = args.out if args.out is not None else cfg.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)
    fmt = args.format

    config = SolverConfig(
        policy=policy,
        iterations=iterations,
        seed=seed,
        replications=replications,
        record_trace=True,
    )

    echo = {
        "problem": instance_to_dict(problem),
        "reference_coeffs": list(ref.growth_coeffs),
        "reference_M": ref.rel_cont_constant,
        "algorithm": algorithm,
        "x0": [float(v) for v in x0],
        "seed": seed,
        "replications": replications,
        "out_dir": out_dir,
        "format": fmt,
    }
    echo.update(run_echo)

    ext = "csv" if fmt == "csv" else "json"
    render = _trace_csv if fmt == "csv" else _trace_json

    def run_one(r):
        if algorithm == "deterministic":
            trace = mirror_descent(problem, ref, x0, config)
        else:
            trace = stochastic_replication(problem, ref, x0, config, r)
        name = f"trace.{ext}" if replications == 1 else f"trace_r{r:03d}.{ext}"
        _atomic_write(os.path.join(out_dir, name), render(trace))
        return _run_summary(trace)

    start = time.perf_counter()
    if replications == 1:
        summaries = [run_one(0)]
    else:
        workers = min(_worker_count(cfg), replications)
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(run_one, range(replications)))
    wall = time.perf_counter() - start

    f_bars = [s["f_bar"] for s in summaries]
    summary = {
        "config": echo,
        "seed": seed,
        "wall_time_s": wall,
        "runs": summaries,
        "aggregate": {
            "mean_f_bar": float(np.mean(f_bars)),
            "std_f_bar": float(np.std(f_bars, ddof=1)) if len(f_bars) > 1 else 0.0,
            "min_f_best": min(s["f_best"] for s in summaries),
        },
    }
    _atomic_write(os.path.join(out_dir, "summary.json"), json.dumps(summary, indent=2) + "\n")
    return 0


def _build_sampler(cfg, problem):
    region = cfg.get("region", {"shape": "ball", "radius": 10.0})
    shape = region.get("shape", "ball")
    if shape == "ball":
        dim = region.get("dim", problem.dim if problem is not None else None)
        if dim is None:
            raise ConfigError("region needs a 'dim' when no problem is configured")
        return certify_mod.BallSampler(
            dim=dim, radius=region.get("radius", 10.0), center=region.get("center")
        )
    if shape == "box":
        try:
            return certify_mod.BoxSampler(tuple(region["lo"]), tuple(region["hi"]))
        except KeyError as e:
            raise ConfigError(f"box region requires lo and hi: {e}") from None
    raise ConfigError(f"unknown region shape {region.get('shape')!r}")


def cmd_certify(args):
    cfg = _load_config(args.config)
    checks = cfg.get("checks", ["relative_continuity", "key_property"])
    unknown = [c for c in checks if c not in CHECK_NAMES]
    if unknown:
        raise ConfigError(f"unknown check name(s): {unknown}; known: {list(CHECK_NAMES)}")

    problem = _resolve_problem(cfg, required=False)
    needs_problem = {"relative_continuity", "key_property", "stochastic_boundedness"}
    if problem is None and needs_problem.intersection(checks):
        raise ConfigError("the selected checks require a problem in the config")
    ref = None
    if problem is not None or "reference_coeffs" in cfg:
        ref = _resolve_reference(cfg, problem)
    if "bregman_lower" in checks and ref is None:
        raise ConfigError("bregman_lower requires a reference (problem or reference_coeffs)")

    sampler = _build_sampler(cfg, problem)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    samples = cfg.get("samples", 10000)
    m = cfg.get("m", ref.rel_cont_constant if ref is not None else 1.0)
    g = cfg.get("g", m)
    t_values = cfg.get("t_values", [0.01, 1.0, 100.0])

    reports = []
    for name in checks:
        if name == "relative_continuity":
            rep = certify_mod.check_relative_continuity(problem, ref, m, sampler, samples, seed)
        elif name == "key_property":
            rep = certify_mod.check_key_property(problem, ref, m, t_values, sampler, samples, seed)
        elif name == "stochastic_boundedness":
            if not hasattr(problem, "index_subgradients"):
                raise ConfigError("stochastic_boundedness requires a problem with an index oracle")
            rep = certify_mod.check_stochastic_boundedness(problem, ref, g, sampler, samples, seed)
        elif name == "bregman_upper_cubic":
            rep = certify_mod.check_bregman_upper_bounds("cubic", sampler, samples, seed)
        elif name == "bregman_upper_quartic":
            rep = certify_mod.check_bregman_upper_bounds("quartic", sampler, samples, seed)
        else:
            rep = certify_mod.check_bregman_lower_bound(ref, sampler, samples, seed)
        reports.append(rep)

    all_pass = all(r.passed for r in reports)
    doc = {"pass": all_pass, "reports": [r.as_dict() for r in reports]}
    out_dir = args.out if args.out is not None else cfg.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)
    _atomic_write(os.path.join(out_dir, "report.json"), json.dumps(doc, indent=2) + "\n")
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.check}: {status} (worst {r.worst_ratio:.6e}, bound {r.bound})")
    return 0 if all_pass else 1


def cmd_budget(args):
    cfg = _load_config(args.config)
    if "problem" in cfg or "problem_path" in cfg or "libsvm_path" in cfg:
        problem = _resolve_problem(cfg)
        try:
            eps = cfg["eps"]
            x_star = cfg["x_star"]
        except KeyError as e:
            raise ConfigError(f"problem-mode budget requires {e} in the config") from None
        x0 = cfg.get("x0", [0.0] * problem.dim)
        if isinstance(problem, SvmInstance):
            k = svm_iteration_budget(problem, x_star, x0, eps)
        else:
            k = iep_iteration_budget(problem, x_star, x0, eps)
    else:
        try:
            k = iteration_budget(cfg["m"], cfg["d0"], cfg["eps"])
        except KeyError as e:
            raise ConfigError(f"direct budget requires {e} in the config") from None
    print(k)
    return 0


def _parse_float_list(text, name):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"--{name} must be a comma-separated list of numbers, got {text!r}") from None


def cmd_subproblem(args):
    if args.config is not None:
        cfg = _load_config(args.config)
        try:
            coeffs, c = cfg["coeffs"], cfg["c"]
        except KeyError as e:
            raise ConfigError(f"subproblem config requires {e}") from None
    else:
        if args.coeffs is None or args.c is None:
            raise ConfigError("subproblem needs either --config or both --coeffs and --c")
        coeffs = _parse_float_list(args.coeffs, "coeffs")
        c = _parse_float_list(args.c, "c")
    ref = reference_from_growth_polynomial(coeffs)
    sol = solve_ls(np.asarray(c, dtype=float), ref)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "theta": sol.theta,
                    "x_new": [float(v) for v in sol.x_new],
                    "residual": sol.residual,
                }
            )
        )
    else:
        print(f"theta={_fmt(sol.theta)}")
        print(f"x_new=[{', '.join(_fmt(v) for v in sol.x_new)}]")
        print(f"residual={_fmt(sol.residual)}")
    return 0


def cmd_gen(args):
    cfg = _load_config(args.config)
    try:
        kind = cfg["kind"]
    except KeyError:
        raise ConfigError("gen config requires a 'kind' entry") from None
    params = dict(cfg.get("params", {}))
    if "lambda" in params:
        params["lam"] = params.pop("lambda")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    inst = generate_instance(kind, params, seed)
    doc = json.dumps(instance_to_dict(inst), indent=2) + "\n"
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "instance.json")
        _atomic_write(path, doc)
        print(path)
    else:
        sys.stdout.write(doc)
    return 0


def _seed_type(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="relmirror",
        description="Mirror descent under relative continuity: solve, certify, and budget.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="path to the JSON run configuration")
        p.add_argument("--seed", type=_seed_type, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_solve = sub.add_parser("solve", help="run a configured mirror descent experiment")
    add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_cert = sub.add_parser("certify", help="run sampled definition/lemma checks")
    add_common(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_budget = sub.add_parser("budget", help="print the iteration budget for a target accuracy")
    add_common(p_budget)
    p_budget.set_defaults(func=cmd_budget)

    p_sub = sub.add_parser("subproblem", help="solve one linearization subproblem")
    add_common(p_sub)
    p_sub.add_argument("--coeffs", help="comma-separated growth coefficients a0,a1,...")
    p_sub.add_argument("--c", help="comma-separated linear term")
    p_sub.set_defaults(func=cmd_subproblem)

    p_gen = sub.add_parser("gen", help="generate a reproducible random instance")
    add_common(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, InvalidInputError, InvalidPolynomialError) as e:
        print(f"relmirror: config error: {e}", file=sys.stderr)
        return 2
    except (NumericalFailureError, ReferenceDegeneracyError) as e:
        print(f"relmirror: numerical failure: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"relmirror: config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
