"""Command-line interface: run experiments, compare, test, export traces.

Commands: ``run``, ``compare``, ``stats``, ``export-trace``,
``list-problems``. Option values resolve with precedence command line >
``MCO_*`` environment variable > config file > built-in default. The config
file is INI-style with a single ``[run]`` section whose keys match the long
flag names with underscores (``algorithms``, ``problems``, ``runs``,
``seed``, ``dim``, ``fes_mult``, ``fes_max``, ``n``, ``jobs``, ``out``,
``trace_stride``, ``instance_seed``).

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from pathlib import Path

from . import harness, stats
from .problems import list_problems as registry_list
from .stages import Variant

ENV_PREFIX = "MCO_"

_RUN_KEYS = ("algorithms", "problems", "runs", "seed", "dim", "fes_mult",
             "fes_max", "n", "jobs", "out", "trace_stride", "instance_seed")


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


def _env(name):
    return os.environ.get(ENV_PREFIX + name.upper())


def _read_config(path) -> dict:
    parser = configparser.ConfigParser()
    loaded = parser.read(path)
    if not loaded:
        raise UsageError("config file not found: %s" % path)
    if not parser.has_section("run"):
        raise UsageError("config file %s is missing the [run] section" % path)
    out = {}
    for key in parser.options("run"):
        if key not in _RUN_KEYS:
            raise UsageError("unknown config key %r (valid: %s)"
                             % (key, ", ".join(_RUN_KEYS)))
        out[key] = parser.get("run", key)
    return out


def _resolve(name, cli_value, config, default, cast):
    """Apply the precedence chain and cast the chosen raw value."""
    raw = cli_value
    if raw is None:
        raw = _env(name)
    if raw is None:
        raw = config.get(name)
    if raw is None:
        return default
    if cast is None or not isinstance(raw, str):
        return raw
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError("bad value for %s: %s" % (name, exc))


def _csv_list(raw):
    if isinstance(raw, (list, tuple)):
        return [str(v) for v in raw]
    parts = [p.strip() for p in str(raw).split(",")]
    return [p for p in parts if p]


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mco",
        description="Population-based optimizer benchmark harness")
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment batch")
    run.add_argument("--config", help="INI config file with a [run] section")
    run.add_argument("--algorithms", help="comma-separated variant labels")
    run.add_argument("--problems", help="comma-separated problem names")
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--dim", type=int)
    run.add_argument("--fes-mult", type=int, dest="fes_mult")
    run.add_argument("--fes-max", type=int, dest="fes_max")
    run.add_argument("--n", type=int, help="population size")
    run.add_argument("--jobs", type=int)
    run.add_argument("--trace-stride", type=int, dest="trace_stride")
    run.add_argument("--instance-seed", type=int, dest="instance_seed")
    run.add_argument("--out", help="output directory for persisted results")

    comp = sub.add_parser("compare", help="Friedman ranks and win/tie/loss "
                                          "over persisted results")
    comp.add_argument("--results", help="directory written by `mco run`")
    comp.add_argument("--alpha", type=float)

    st = sub.add_parser("stats", help="write one statistical report")
    st.add_argument("--results", help="directory written by `mco run`")
    st.add_argument("--test", choices=("friedman", "wilcoxon", "kw"))
    st.add_argument("--alpha", type=float)
    st.add_argument("--out", help="directory for report files")

    et = sub.add_parser("export-trace", help="mean convergence series per "
                                             "algorithm on a shared grid")
    et.add_argument("--results", help="directory written by `mco run`")
    et.add_argument("--problem", help="problem name to export")
    et.add_argument("--algorithms", help="comma-separated subset (default all)")
    et.add_argument("--out", help="output CSV path (default stdout)")

    lp = sub.add_parser("list-problems", help="print the problem registry")
    lp.add_argument("--dim", type=int)
    return top


def cmd_run(args) -> int:
    config = _read_config(args.config) if args.config else {}
    if not args.config and _env("CONFIG"):
        config = _read_config(_env("CONFIG"))

    algorithms = _csv_list(_resolve("algorithms", args.algorithms, config,
                                    "ieco-mco,eco", None))
    problems = _csv_list(_resolve("problems", args.problems, config,
                                  None, None) or "")
    if not problems:
        raise UsageError("no problems given; use --problems or the config file")
    for label in algorithms:
        try:
            Variant.from_label(label)
        except ValueError as exc:
            raise UsageError(str(exc))

    runs = _resolve("runs", args.runs, config, 30, int)
    seed = _resolve("seed", args.seed, config, 0, int)
    dim = _resolve("dim", args.dim, config, 10, int)
    fes_mult = _resolve("fes_mult", args.fes_mult, config, 3000, int)
    fes_max = _resolve("fes_max", args.fes_max, config, None, int)
    n = _resolve("n", args.n, config, harness.DEFAULT_POPULATION, int)
    jobs = _resolve("jobs", args.jobs, config, 1, int)
    stride = _resolve("trace_stride", args.trace_stride, config, None, int)
    instance_seed = _resolve("instance_seed", args.instance_seed, config, 0, int)
    out = _resolve("out", args.out, config, "results", None)

    try:
        results = harness.run_batch(
            algorithms, problems, runs=runs, base_seed=seed, dimension=dim,
            n=n, fes_max=fes_max, fes_mult=fes_mult,
            instance_seed=instance_seed, trace_stride=stride, jobs=jobs)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc))

    harness.persist(results, out)
    print("persisted %d records to %s" % (len(results), out))
    print("%-10s %-24s %14s %14s %14s" % ("algorithm", "problem", "best",
                                          "mean", "std"))
    for row in results.summary():
        print("%-10s %-24s %14.6g %14.6g %14.6g"
              % (row["algorithm"], row["problem"], row["best"], row["mean"],
                 row["std"]))
    return 0


def _load_results(args):
    where = args.results or _env("RESULTS")
    if not where:
        raise UsageError("no results directory; use --results")
    try:
        return harness.load(where)
    except FileNotFoundError as exc:
        raise UsageError("cannot read results: %s" % exc)
    except harness.SchemaMismatchError as exc:
        raise UsageError(str(exc))


def cmd_compare(args) -> int:
    results = _load_results(args)
    alpha = _resolve("alpha", args.alpha, {}, stats.DEFAULT_ALPHA, float)
    try:
        results.validate_rectangular()
    except ValueError as exc:
        raise UsageError(str(exc))
    values = results.to_matrix()
    report = stats.friedman(values, results.algorithms)
    print(stats.format_friedman(report))
    if len(results.algorithms) >= 2:
        print(stats.format_wtl(stats.wtl_table(values, results.algorithms,
                                               alpha)))
    return 0


def cmd_stats(args) -> int:
    results = _load_results(args)
    test = args.test or _env("TEST") or "friedman"
    alpha = _resolve("alpha", args.alpha, {}, stats.DEFAULT_ALPHA, float)
    try:
        results.validate_rectangular()
    except ValueError as exc:
        raise UsageError(str(exc))
    values = results.to_matrix()
    algs = results.algorithms

    lines = []
    if test == "friedman":
        report = stats.friedman(values, algs)
        lines.append(stats.format_friedman(report))
    elif test == "wilcoxon":
        table = stats.wtl_table(values, algs, alpha)
        lines.append(stats.format_wtl(table))
    elif test == "kw":
        groups = [values[:, j, :].ravel() for j in range(values.shape[1])]
        h, p, ranks = stats.kruskal_wallis(groups)
        lines.append("Kruskal-Wallis: H = %.6g, p = %.6g" % (h, p))
        for name, rank in zip(algs, ranks):
            lines.append("  %s  mean rank %.4f" % (name, rank))
    else:
        raise UsageError("unknown test %r" % test)

    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    out = args.out or _env("OUT")
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / ("report-%s.txt" % test)).write_text(text)
    return 0


def cmd_export_trace(args) -> int:
    results = _load_results(args)
    problem = args.problem or _env("PROBLEM")
    if not problem:
        raise UsageError("no problem given; use --problem")
    matches = [p for p in results.problems
               if p == problem or p.split("-")[0] == problem]
    if not matches:
        raise UsageError("unknown problem %r; persisted problems: %s"
                         % (problem, ", ".join(results.problems)))
    problem = matches[0]
    algorithms = (_csv_list(args.algorithms) if args.algorithms
                  else results.algorithms)
    for a in algorithms:
        if a not in results.algorithms:
            raise UsageError("unknown algorithm %r; persisted algorithms: %s"
                             % (a, ", ".join(results.algorithms)))
    try:
        grid, series = harness.export_trace(results, problem, algorithms)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc))

    lines = ["fes," + ",".join(algorithms)]
    for i, fes in enumerate(grid):
        lines.append("%d,%s" % (fes, ",".join(repr(float(series[a][i]))
                                              for a in algorithms)))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print("wrote %s (%d grid points)" % (args.out, len(grid)))
    else:
        sys.stdout.write(text)
    return 0


def cmd_list_problems(args) -> int:
    dim = args.dim if args.dim else 10
    print("%-26s %-12s %s" % ("name", "category", "D"))
    for name, category, d in registry_list(dimension=dim):
        print("%-26s %-12s %d" % (name, category, d))
    return 0


_DISPATCH = {
    "run": cmd_run,
    "compare": cmd_compare,
    "stats": cmd_stats,
    "export-trace": cmd_export_trace,
    "list-problems": cmd_list_problems,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # runtime failure inside a command
        print("failed: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
