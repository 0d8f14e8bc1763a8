"""Command-line front end.

    abportfolio <command> SPEC.json [--out-dir DIR] [--seed S] [--format json|csv|both]
    abportfolio figures SPEC.json --family NAME [...]
    abportfolio schema <command-or-family> [--output]

Exit status: 0 success, 2 invalid spec or input, 3 numerical failure.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .allocation import AllocationProblem, dp_frontier, metaproduction_closed, solve_dp, solve_dp_multiplicity
from .decisions import (
    implied_b_for_alpha,
    implied_cost_for_alpha,
    minimax_constant,
    minimax_risk,
    optimal_threshold_generic,
    ship_probability,
)
from .exceptions import (
    BracketError,
    InfeasibleError,
    InfiniteRiskError,
    InsufficientDataError,
    MemoryBudgetError,
    NumericalFailure,
)
from .exclusive import _METHODS as EXCLUSIVE_METHODS
from .exclusive import optimize_I0
from .portfolio import ProgramError, ProgramSpec, program_frontier, solve_sequential, solve_shared_allocation, solve_shared_ideas
from .priors import (
    DiscretePrior,
    ExperimentRecord,
    GaussianPrior,
    Linear,
    LossAverse,
    NoiseModel,
    fit_gaussian_mle,
    read_records_csv,
    read_records_json,
)
from .production import CostModel, FixedTestingCost, ProductionHandle, ZeroTestingCost, find_x_star, rule_value
from .schemas import FIGURE_SCHEMAS, OUTPUT_SCHEMAS, SPEC_SCHEMAS

OUT_DIR_ENV = "ABPORTFOLIO_OUT_DIR"
EXIT_OK, EXIT_SPEC, EXIT_NUMERIC = 0, 2, 3


class SpecError(Exception):
    def __init__(self, field, message):
        super().__init__(f"spec field '{field}': {message}")
        self.field = field


# --- spec -> domain objects ----------------------------------------------------------


def build_prior(d):
    if d["type"] == "gaussian":
        return GaussianPrior(d["mu"], d["tau"])
    if len(d["values"]) != len(d["weights"]):
        raise SpecError("prior.weights", "must have the same length as prior.values")
    return DiscretePrior.from_arrays(d["values"], d["weights"])


def build_utility(d):
    if not d or d["type"] == "linear":
        return Linear()
    return LossAverse(d["b"])


def build_cost(d):
    d = d or {}
    testing = FixedTestingCost(d["testing_fixed"]) if d.get("testing_fixed") else ZeroTestingCost()
    return CostModel(d.get("implementation", 0.0), testing)


def build_handle(spec, cost_key="cost"):
    return ProductionHandle(
        build_prior(spec["prior"]), NoiseModel(spec["sigma"]), build_utility(spec.get("utility")), build_cost(spec.get(cost_key))
    )


def build_program(d):
    return ProgramSpec(
        d["name"], build_prior(d["prior"]), d["sigma"], d.get("I", 0), d.get("N", 0), d.get("weight", 1.0),
        build_utility(d.get("utility")), build_cost(d.get("cost")),
    )


def build_grid(g):
    if isinstance(g, list):
        return np.asarray(g, dtype=float)
    if g["min"] > g["max"]:
        raise SpecError("n_grid.min", "must not exceed n_grid.max")
    if g.get("scale", "log") == "log":
        return np.geomspace(g["min"], g["max"], g["points"])
    return np.linspace(g["min"], g["max"], g["points"])


def build_weights(w, T):
    if w is None or w == "equal":
        return np.ones(T)
    if w == "remaining":
        return np.arange(T - 1, -1, -1, dtype=float)
    if len(w) != T:
        raise SpecError("weights", f"expected {T} weights, got {len(w)}")
    return np.asarray(w, dtype=float)


# --- output ---------------------------------------------------------------------


def fmt(x):
    """CSV cell: integers verbatim, floats at 15 significant digits, non-finite empty."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if not math.isfinite(x):
        return ""
    return f"{x + 0.0:.15g}"


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x + 0.0 if math.isfinite(x) else None
    return obj


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(meta, columns, rows):
    buf = io.StringIO()
    buf.write(f"# spec_sha256={meta['spec_sha256']} seed={meta['seed']} version={meta['version']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def json_text(payload):
    return json.dumps(_json_clean(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


class Result:
    """Payload for the JSON output plus any number of named CSV tables."""

    def __init__(self, payload, tables=None):
        self.payload = payload
        self.tables = tables or {}


def _table(columns, rows):
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


# --- commands -------------------------------------------------------------------


def cmd_fit_prior(spec, ctx):
    has_inline, has_path = "records" in spec, "records_path" in spec
    if has_inline == has_path:
        raise SpecError("records", "give exactly one of 'records' or 'records_path'")
    if has_inline:
        records = [ExperimentRecord(r["delta_hat"], r["n"]) for r in spec["records"]]
    else:
        path = Path(spec["records_path"])
        if not path.is_absolute():
            path = ctx["spec_dir"] / path
        if not path.exists():
            raise SpecError("records_path", f"file not found: {path}")
        reader = read_records_json if path.suffix.lower() == ".json" else read_records_csv
        try:
            records = reader(path)
        except (ValueError, KeyError) as err:
            raise SpecError("records_path", str(err)) from err
    fit = fit_gaussian_mle(records, NoiseModel(spec["sigma"]))
    payload = {
        "mu": fit.mu, "tau": fit.tau, "tau2": fit.tau2, "se_mu": fit.se_mu, "se_tau": fit.se_tau,
        "se_tau2": fit.se_tau2, "loglik": fit.loglik, "n_records": fit.n_records, "degenerate": fit.degenerate,
    }
    rows = [("mu", fit.mu, fit.se_mu), ("tau", fit.tau, fit.se_tau), ("tau2", fit.tau2, fit.se_tau2)]
    return Result(payload, {"fit-prior": (["parameter", "estimate", "stderr"], rows)})


def _production_rows(handle, grid, z):
    rows = []
    for n in grid:
        rows.append((n, handle(n), rule_value(handle, n, z * handle.noise.sigma / math.sqrt(n)), rule_value(handle, n, 0.0)))
    return rows


def cmd_production_curve(spec, ctx):
    handle = build_handle(spec)
    cols = ["n", "f_optimal", "f_pvalue", "f_minimax_na"]
    rows = _production_rows(handle, build_grid(spec["n_grid"]), spec.get("z", 1.96))
    return Result(_table(cols, rows), {"production-curve": (cols, rows)})


def cmd_allocate(spec, ctx):
    handle = build_handle(spec, cost_key="costs")
    c0, k = spec.get("c0", 1), spec.get("k", 1)
    if c0 > spec["N"]:
        raise SpecError("c0", f"must not exceed N={spec['N']}")
    problem = AllocationProblem(spec["I"], spec["N"], c0, handle)
    sol = solve_dp(problem) if k == 1 else solve_dp_multiplicity(problem, k)
    payload = {"value": sol.value, "allocation": sol.run_length(), "tests_run": sol.tests_run, "k": k, "c0": c0}
    tables = {}
    if spec.get("frontier"):
        if k != 1:
            raise SpecError("frontier", "frontier export is only available for k = 1")
        n, F = dp_frontier(problem)
        tables["allocate-frontier"] = (["n", "F"], list(zip(n.tolist(), F.tolist())))
    return Result(payload, tables)


def cmd_thresholds(spec, ctx):
    prior, noise = build_prior(spec["prior"]), NoiseModel(spec["sigma"])
    u, cost = build_utility(spec.get("utility")), build_cost(spec.get("cost"))
    ProductionHandle(prior, noise, u, cost)  # utility/prior compatibility check
    cols = ["n", "cutoff", "t_stat", "alpha", "pass_prob"]
    rows, sat = [], []
    for n in build_grid(spec["n_grid"]):
        th = optimal_threshold_generic(prior, noise, n, u, cost.implementation)
        rows.append((n, th.cutoff_delta_hat, th.t_statistic, th.one_sided_alpha,
                     ship_probability(prior, noise, n, th.cutoff_delta_hat)))
        sat.append(th.saturation)
    return Result(_table(cols, rows) | {"saturation": sat}, {"thresholds": (cols, rows)})


def cmd_cost_analysis(spec, ctx):
    prior, noise, n = build_prior(spec["prior"]), NoiseModel(spec["sigma"]), spec["n"]
    cols = ["alpha", "implied_cost", "implied_b"]
    rows, notes = [], []
    for a in spec["alphas"]:
        s = implied_cost_for_alpha(prior, noise, n, a)
        try:
            b, note = implied_b_for_alpha(prior, noise, n, a, b_cap=spec.get("b_cap", 1e6)), None
        except ValueError as err:
            b, note = None, str(err)
        rows.append((a, s, b))
        notes.append(note)
    return Result(_table(cols, rows) | {"notes": notes}, {"cost-analysis": (cols, rows)})


def _programs(spec, need):
    progs = [build_program(p) for p in spec["programs"]]
    names = [p.name for p in progs]
    if len(set(names)) != len(names):
        raise SpecError("programs", "program names must be unique")
    for i, p in enumerate(spec["programs"]):
        if need not in p:
            raise SpecError(f"programs[{i}].{need}", "is required for this command")
    return progs


def cmd_multi_program(spec, ctx):
    progs = _programs(spec, "I")
    block = spec.get("block", 1)
    sol = solve_shared_allocation(progs, spec["N"], block)
    out, rows = [], []
    for p, units, alloc, fr in zip(progs, sol.units, sol.allocations, sol.frontiers):
        runs = []
        for a in alloc:
            if runs and runs[-1][0] == a:
                runs[-1][1] += 1
            else:
                runs.append([a, 1])
        out.append({"name": p.name, "units": units, "value": p.weight * float(fr[units // block]), "allocation": runs})
        rows.extend((p.name, j * block, v) for j, v in enumerate(fr.tolist()))
    return Result({"value": sol.value, "programs": out}, {"multi-program-curves": (["program", "N", "F"], rows)})


def cmd_share_ideas(spec, ctx):
    progs = _programs(spec, "N")
    sol = solve_shared_ideas(progs, spec["I"])
    out = [{"name": p.name, "ideas": j, "value": p.weight * float(c[j])} for p, j, c in zip(progs, sol.ideas, sol.curves)]
    rows = [(p.name, j, v) for p, c in zip(progs, sol.curves) for j, v in enumerate(c.tolist())]
    return Result({"value": sol.value, "programs": out}, {"share-ideas-curves": (["program", "I", "F"], rows)})


def cmd_sequential(spec, ctx):
    prog = build_program(spec["program"])
    T = spec["T"]
    weights = build_weights(spec.get("weights"), T)
    sched = solve_sequential(prog, spec["N"], spec["I"], T, weights)
    periods = [
        {"t": t + 1, "ideas": j, "weight": w, "value": v}
        for t, (j, w, v) in enumerate(zip(sched.ideas_per_period, sched.weights, sched.values_per_period))
    ]
    rows = [(p["t"], p["ideas"], p["weight"], p["value"]) for p in periods]
    return Result({"value": sched.value, "periods": periods}, {"sequential": (["t", "ideas", "weight", "value"], rows)})


def _exclusive(spec, ctx):
    prior, noise = build_prior(spec["prior"]), NoiseModel(spec["sigma"])
    method = spec.get("method", "monte_carlo")
    samples = spec.get("samples", 100_000)
    N, I = spec["N"], spec["I"]
    if "I0_grid" in spec:
        bad = [g for g in spec["I0_grid"] if g > min(I, N)]
        if bad:
            raise SpecError("I0_grid", f"entries {bad} exceed min(I, N) = {min(I, N)}")
        curve = [EXCLUSIVE_METHODS[method](prior, noise, N, g, samples, ctx["seed"]) for g in sorted(set(spec["I0_grid"]))]
        best = max(curve, key=lambda r: r.value).I0
    else:
        best, curve = optimize_I0(prior, noise, N, I, method, samples, ctx["seed"])
    cols = ["I0", "value", "stderr", "method", "validity_flag"]
    rows = [(r.I0, r.value, r.stderr, r.method, int(r.valid)) for r in curve]
    best_value = next(r.value for r in curve if r.I0 == best)
    return cols, rows, best, best_value


def cmd_exclusive(spec, ctx):
    cols, rows, best, best_value = _exclusive(spec, ctx)
    return Result(_table(cols, rows) | {"best_I0": best, "best_value": best_value}, {"exclusive": (cols, rows)})


def cmd_minimax(spec, ctx):
    noise = NoiseModel(spec["sigma"])
    c, nu = minimax_constant()
    payload = {"C": c, "nu_star": nu, "risk": None, "equal_split": None, "equal_split_risk": None}
    if "allocations" in spec:
        payload["risk"] = minimax_risk(spec["allocations"], noise)
    if ("I" in spec) != ("N" in spec):
        raise SpecError("I" if "I" not in spec else "N", "I and N must be given together")
    if "I" in spec:
        I, N = spec["I"], spec["N"]
        if N < I:
            raise SpecError("N", f"equal split needs N >= I = {I}")
        split = [N // I + (1 if i < N % I else 0) for i in range(I)]
        payload["equal_split"] = split
        payload["equal_split_risk"] = minimax_risk(split, noise)
    return Result(payload)


# --- figures --------------------------------------------------------------------


def fig_value_of_testing(spec, ctx):
    handle = build_handle(spec)
    base = ProductionHandle(handle.prior, handle.noise, handle.utility)
    i = np.arange(1, spec["I"] + 1)
    n = (spec["N"] // i).astype(float)
    rows = list(zip(i.tolist(), n.tolist(), (i * base(n)).tolist(), (i * handle(n)).tolist()))
    return {"value-of-testing": (["i", "n_per_test", "value", "value_cost"], rows)}


def fig_test_passing(spec, ctx):
    prior, noise = build_prior(spec["prior"]), NoiseModel(spec["sigma"])
    rows = []
    for n in build_grid(spec["n_grid"]):
        th = optimal_threshold_generic(prior, noise, n)
        rows.append((n, th.one_sided_alpha, ship_probability(prior, noise, n, th.cutoff_delta_hat)))
    return {"test-passing": (["n", "alpha", "pass_prob"], rows)}


def fig_p005(spec, ctx):
    handle = build_handle(spec)
    z = spec.get("z", 1.96)
    rows, lost = [], []
    for n, f_opt, f_p, _ in _production_rows(handle, build_grid(spec["n_grid"]), z):
        rows.append((n, f_opt, f_p))
        lost.append((n, 1.0 - f_p / f_opt if f_opt > 0 else None))
    return {
        "p005-comparison-returns": (["n", "f_optimal", "f_pvalue"], rows),
        "p005-comparison-lost": (["n", "lost_fraction"], lost),
    }


def fig_heatmap(spec, ctx):
    handle = build_handle(spec)
    n_max = max(spec["N_grid"])
    try:
        analysis = find_x_star(handle, spec.get("bracket_hi", 10.0 * n_max))
    except BracketError:
        # x* lies beyond the bracket, which is above every N: one big test everywhere
        analysis = None
    rows = []
    for N in spec["N_grid"]:
        for I in spec["I_grid"]:
            if analysis is None:
                rows.append((I, N, float(handle(N)), 1, "go_big"))
            else:
                r = metaproduction_closed(I, N, analysis)
                rows.append((I, N, r.value, r.i_star, r.regime))
    return {"metaproduction-heatmap": (["I", "N", "F", "i_star", "regime"], rows)}


def fig_cost_threshold(spec, ctx):
    prior, noise, n = build_prior(spec["prior"]), NoiseModel(spec["sigma"]), spec["n"]
    rows = [(s, optimal_threshold_generic(prior, noise, n, Linear(), s).one_sided_alpha) for s in spec["costs"]]
    return {"cost-threshold": (["cost", "alpha"], rows)}


def fig_utility_threshold(spec, ctx):
    prior, noise, n = build_prior(spec["prior"]), NoiseModel(spec["sigma"]), spec["n"]
    rows = [(b, optimal_threshold_generic(prior, noise, n, LossAverse(b)).one_sided_alpha) for b in spec["b_grid"]]
    return {"utility-threshold": (["b", "alpha"], rows)}


def fig_program_curves(spec, ctx):
    progs = _programs(spec, "I")
    block = spec.get("block", 1)
    bad = [n for n in spec["N_grid"] if n % block]
    if bad:
        raise SpecError("N_grid", f"entries {bad} are not multiples of block={block}")
    n_max = max(spec["N_grid"])
    rows = []
    for p in progs:
        fr = program_frontier(p, n_max, block)
        rows.extend((p.name, n, p.weight * float(fr[n // block])) for n in spec["N_grid"])
    return {"program-curves": (["program", "N", "F"], rows)}


def fig_sequential_surface(spec, ctx):
    prog = build_program(spec["program"])
    rows = []
    for T in spec["T_grid"]:
        w = build_weights(spec.get("weights"), T)
        for I in spec["I_grid"]:
            value = 0.0 if not np.any(w > 0) else solve_sequential(prog, spec["N"], I, T, w).value
            rows.append((I, T, value))
    return {"sequential-surface": (["I", "T", "value"], rows)}


def fig_exclusive_curve(spec, ctx):
    cols, rows, _, _ = _exclusive(spec, ctx)
    return {"exclusive-curve": (cols, rows)}


FIGURES = {
    "value-of-testing": fig_value_of_testing,
    "test-passing": fig_test_passing,
    "p005-comparison": fig_p005,
    "metaproduction-heatmap": fig_heatmap,
    "cost-threshold": fig_cost_threshold,
    "utility-threshold": fig_utility_threshold,
    "program-curves": fig_program_curves,
    "sequential-surface": fig_sequential_surface,
    "exclusive-curve": fig_exclusive_curve,
}

COMMANDS = {
    "fit-prior": cmd_fit_prior,
    "production-curve": cmd_production_curve,
    "allocate": cmd_allocate,
    "thresholds": cmd_thresholds,
    "cost-analysis": cmd_cost_analysis,
    "multi-program": cmd_multi_program,
    "share-ideas": cmd_share_ideas,
    "sequential": cmd_sequential,
    "exclusive": cmd_exclusive,
    "minimax": cmd_minimax,
}


# --- driver ---------------------------------------------------------------------


def _validation_error(err):
    path = ".".join(str(p) for p in err.absolute_path)
    if err.validator in ("required", "additionalProperties"):
        key = err.message.split("'")[1]
        path = f"{path}.{key}" if path else key
    return SpecError(path or "<root>", err.message)


def load_spec(path, schema):
    """Parse and validate a spec file; returns ``(spec, sha256 of its bytes)``."""
    raw = Path(path).read_bytes()
    try:
        spec = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise SpecError("<root>", f"not valid JSON: {err}") from err
    best = jsonschema.exceptions.best_match(jsonschema.Draft7Validator(schema).iter_errors(spec))
    if best is not None:
        raise _validation_error(best)
    return spec, hashlib.sha256(raw).hexdigest()


def run(command, spec_path, out_dir, seed=None, fmt_choice="both", family=None):
    """Execute one command and write its outputs; returns the written paths."""
    if command == "figures":
        if family not in FIGURES:
            raise SpecError("--family", f"unknown figure family {family!r}; choose from {sorted(FIGURES)}")
        schema = FIGURE_SCHEMAS[family]
    else:
        schema = SPEC_SCHEMAS[command]
    spec, digest = load_spec(spec_path, schema)
    seed = spec.get("seed", 0) if seed is None else seed
    meta = {"spec_sha256": digest, "seed": seed, "version": __version__,
            "command": command if family is None else f"figures:{family}"}
    ctx = {"seed": seed, "spec_dir": Path(spec_path).resolve().parent}
    out_dir = Path(out_dir)
    written = []
    if command == "figures":
        # figures are CSV bundles; the JSON file is only a manifest
        tables = FIGURES[family](spec, ctx)
        result = Result({"family": family, "files": sorted(f"{name}.csv" for name in tables)}, tables)
        json_name, write_csv = f"figures-{family}", True
    else:
        result = COMMANDS[command](spec, ctx)
        json_name, write_csv = command, fmt_choice in ("csv", "both")
    payload = {"meta": meta, **result.payload}
    out_schema = OUTPUT_SCHEMAS["figures" if command == "figures" else command]
    jsonschema.validate(_json_clean(payload), out_schema)
    if write_csv:
        for name, (cols, rows) in sorted(result.tables.items()):
            target = out_dir / f"{name}.csv"
            atomic_write(target, csv_text(meta, cols, rows))
            written.append(target)
    if fmt_choice in ("json", "both"):
        target = out_dir / f"{json_name}.json"
        atomic_write(target, json_text(payload))
        written.append(target)
    return written


def exit_code_for(err):
    """Exit status for a domain error (``None`` for unexpected exceptions)."""
    cause = err.__cause__ if isinstance(err, ProgramError) else err
    if isinstance(cause, (NumericalFailure, BracketError, MemoryBudgetError, ArithmeticError, MemoryError)):
        return EXIT_NUMERIC
    if isinstance(cause, (InfeasibleError, InsufficientDataError, InfiniteRiskError, ValueError, SpecError)):
        return EXIT_SPEC
    return None


def _parser():
    p = argparse.ArgumentParser(prog="abportfolio", description="Experiment-portfolio planning tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in [*COMMANDS, "figures"]:
        sp = sub.add_parser(name)
        sp.add_argument("spec", help="JSON spec file")
        sp.add_argument("--out-dir", default=None, help=f"output directory (default: ${OUT_DIR_ENV} or .)")
        sp.add_argument("--seed", type=int, default=None, help="overrides the spec's seed")
        sp.add_argument("--format", choices=["json", "csv", "both"], default="both")
        if name == "figures":
            sp.add_argument("--family", required=True, choices=sorted(FIGURES))
    sc = sub.add_parser("schema", help="print the JSON schema of a command's spec (or output)")
    sc.add_argument("name", choices=sorted([*COMMANDS, *FIGURES]))
    sc.add_argument("--output", action="store_true", help="print the output schema instead")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "schema":
        if args.output:
            schema = OUTPUT_SCHEMAS["figures" if args.name in FIGURES else args.name]
        else:
            schema = SPEC_SCHEMAS.get(args.name) or FIGURE_SCHEMAS[args.name]
        sys.stdout.write(json.dumps(schema, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be >= 0", file=sys.stderr)
        return EXIT_SPEC
    try:
        if not Path(args.spec).is_file():
            raise SpecError("<spec>", f"file not found: {args.spec}")
        written = run(args.command, args.spec, out_dir, args.seed, args.format, getattr(args, "family", None))
    except SpecError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SPEC
    except Exception as err:
        code = exit_code_for(err)
        if code is None:
            raise
        label = "numerical failure" if code == EXIT_NUMERIC else "error"
        print(f"{label}: {err}", file=sys.stderr)
        return code
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
